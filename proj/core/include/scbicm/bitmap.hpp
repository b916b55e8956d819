#pragma once

#include <string>
#include <vector>

#include "scbicm/channel.hpp"

namespace scbicm {

// Fractional assignment of VNs to modulation bit levels: entry (i, j) is the
// fraction of VN j's code bits carried on level i.  Columns sum to one; rows
// sum to V/m so every level carries the same share of the codeword.
class BitMapping {
  public:
    BitMapping(int levels, int vns, double fill = 0.0);
    static BitMapping uniform(int levels, int vns);

    int levels() const { return levels_; }
    int vns() const { return vns_; }
    double at(int level, int vn) const { return a_[static_cast<size_t>(level) * vns_ + vn]; }
    void set(int level, int vn, double value) { a_[static_cast<size_t>(level) * vns_ + vn] = value; }

  private:
    int levels_;
    int vns_;
    std::vector<double> a_;
};

struct MappingViolation {
    enum class Kind { ColumnSum, RowSum, Range };
    Kind kind;
    int level = -1;  // set for RowSum and Range
    int vn = -1;     // set for ColumnSum and Range
    double magnitude = 0.0;
    std::string describe() const;
};

std::vector<MappingViolation> validate(const BitMapping& map, double column_tol = 1e-9,
                                       double row_tol = 1e-6);

// eps'_j = sum_i eps_i * a(i, j); the loop runs over levels in ascending
// order so a uniform mapping reproduces the profile average bit-for-bit.
std::vector<double> effective_erasures(const BitMapping& map, const std::vector<double>& eps);

// Levels whose erasure-rate columns agree (within tol) at every profile
// sample; Gray QAM yields pairs of identical levels.
std::vector<std::vector<int>> level_groups(const ErasureProfile& profile, double tol = 1e-9);

// Grouped text format: `m`/`V` headers, `group` lines naming capacity-equal
// level sets, then `map <vn-range> <fraction-per-group>...` rows whose
// fractions sum to one and are split evenly inside each group.
BitMapping parse_grouped_table(const std::string& text);

}  // namespace scbicm
