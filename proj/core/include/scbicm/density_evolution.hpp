#pragma once

#include <optional>
#include <span>
#include <vector>

#include "scbicm/bitmap.hpp"
#include "scbicm/channel.hpp"
#include "scbicm/protograph.hpp"

namespace scbicm {

struct DEOptions {
    int max_iters = 10000;
    double zero_tol = 1e-10;   // residual below which a VN counts as resolved
    double bisect_tol = 1e-4;  // threshold search resolution on the average erasure rate
    int bisect_max_steps = 30;
    // Early exit for hopeless runs: if the max residual improves by less than
    // stall_tol over stall_window iterations the run is declared stuck.
    // stall_window = 0 disables the shortcut and always runs to max_iters.
    int stall_window = 64;
    double stall_tol = 1e-12;
};

struct DEResult {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residuals;  // per-VN erasure probability at exit
};

// Edge-instance adjacency compiled once so repeated evolutions skip the
// multiplicity expansion.  Parallel edges become separate instances and carry
// separate messages.
class DEGraph {
  public:
    explicit DEGraph(const Protograph& g);

    int cn_count() const { return static_cast<int>(cn_off_.size()) - 1; }
    int vn_count() const { return static_cast<int>(vn_off_.size()) - 1; }
    int edge_count() const { return static_cast<int>(edge_vn_.size()); }

    // message_trace, when given, records the per-edge VN->CN erasure messages:
    // entry 0 is the initialization, entry k the state after iteration k.
    // Meant for small graphs; it grows by one E-sized row per iteration.
    DEResult run(std::span<const double> vn_erasures, const DEOptions& opts = {},
                 std::vector<std::vector<double>>* message_trace = nullptr) const;

  private:
    std::vector<int> edge_vn_;  // edge -> VN
    std::vector<int> cn_off_, cn_edges_;
    std::vector<int> vn_off_, vn_edges_;
};

DEResult run_de(const Protograph& g, const std::vector<double>& vn_erasures,
                const DEOptions& opts = {});

struct ThresholdResult {
    double eps_avg = 0.0;
    double snr_db = 0.0;
    int bisect_steps = 0;
    bool at_profile_edge = false;  // converged at the lowest tabulated SNR already
};

// Largest average erasure rate inside the profile range at which evolution
// converges, found by SNR bisection; ties resolve toward the converged side.
// Throws if even the highest tabulated SNR fails to converge.
ThresholdResult threshold(const DEGraph& g, const BitMapping& map, const ErasureProfile& profile,
                          const DEOptions& opts = {});
ThresholdResult threshold(const Protograph& g, const BitMapping& map, const ErasureProfile& profile,
                          const DEOptions& opts = {});

// Plain-BEC threshold: every VN sees the same scalar erasure rate.
double threshold_scalar(const DEGraph& g, const DEOptions& opts = {}, double lo = 0.0,
                        double hi = 1.0);
double threshold_scalar(const Protograph& g, const DEOptions& opts = {}, double lo = 0.0,
                        double hi = 1.0);

// Iteration count to converge at the given average erasure rate, or nullopt
// when evolution does not converge there.
std::optional<int> convergence_iterations(const DEGraph& g, const BitMapping& map,
                                          const ErasureProfile& profile, double eps_avg,
                                          const DEOptions& opts = {});

}  // namespace scbicm
