#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scbicm/bitmap.hpp"
#include "scbicm/protograph.hpp"

namespace scbicm {

// A circulant-lifted parity-check matrix in sparse coordinate form.
struct LiftedCode {
    int n = 0;         // code bits
    int n_checks = 0;  // parity checks
    int lift_factor = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<int, int>> edges;  // (check, bit), sorted
    std::vector<int> origin;                 // bit -> protograph VN

    double design_rate() const {
        return 1.0 - static_cast<double>(n_checks) / static_cast<double>(n);
    }
};

// Each protograph edge instance becomes a circulant of size Q with a random
// shift.  Shifts of parallel edges within one (CN, VN) pair are kept distinct
// and avoid 2*(s1 - s2) == 0 (mod Q), which would close a length-4 cycle
// through the pair.  Throws when Q is too small to satisfy that.
LiftedCode lift(const Protograph& g, int Q, std::uint64_t seed);

// Hard assignment of lifted bits to modulation levels.  Per VN the Q copies
// approximate the fractional row a(:, v) by largest remainder; a global
// repair pass then trades single bits between VNs until every level carries
// exactly n/m bits.
struct ChannelAssignment {
    int levels = 0;
    std::vector<std::uint8_t> level_of;  // bit -> modulation level

    std::vector<long> level_counts() const;
};

ChannelAssignment assign_channels(const BitMapping& map, int Q, std::uint64_t seed);

}  // namespace scbicm
