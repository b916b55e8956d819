#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "scbicm/channel.hpp"
#include "scbicm/lifting.hpp"

namespace scbicm {

struct SimConfig {
    std::vector<double> ebn0_db;
    long max_frames = 100000;
    long target_bit_errors = 200;
    long target_frame_errors = 0;  // 0 = stop on bit errors alone
    int bp_iters = 100;
    std::uint64_t seed = 1;
};

struct BERRecord {
    double ebn0_db = 0.0;
    double snr_db = 0.0;
    long frames = 0;
    long bit_errors = 0;
    long frame_errors = 0;
    double sum_sq_frame_bit_errors = 0.0;  // per-frame cluster stats for CIs
    double avg_bp_iterations = 0.0;

    double ber(long n) const {
        return frames ? static_cast<double>(bit_errors) / (static_cast<double>(frames) * n) : 0.0;
    }
    double fer() const {
        return frames ? static_cast<double>(frame_errors) / static_cast<double>(frames) : 0.0;
    }
    // half-width of the 95% normal interval on BER, treating frames as
    // clusters (bit errors inside a frame are anything but independent)
    double ber_ci95(long n) const;
};

struct BPResult {
    bool converged = false;
    int iterations = 0;
};

// Flooding sum-product decoder over a compiled sparse parity-check matrix.
// LLRs are natural-log, positive favouring bit value 0.  A bit whose
// posterior stays exactly zero never counts as decided, so an all-zero input
// cannot satisfy the stopping rule.
class BpDecoder {
  public:
    explicit BpDecoder(const LiftedCode& code);

    int bit_count() const { return static_cast<int>(bit_off_.size()) - 1; }
    int check_count() const { return static_cast<int>(check_off_.size()) - 1; }

    BPResult decode(std::span<const double> llr, int max_iters, std::vector<std::uint8_t>& hard);

  private:
    std::vector<int> check_off_;
    std::vector<int> edge_bit_;  // edge -> bit, edges grouped by check
    std::vector<int> bit_off_, bit_edges_;
    std::vector<double> m_vc_, m_cv_, posterior_;
};

// Exact max-free LLRs for one received symbol; per-dimension sums when the
// constellation is separable, full summation otherwise.  noise_var is the
// total complex noise variance; amp_scale multiplies the unit-energy points.
std::vector<double> demap_llr(std::complex<double> y, double noise_var, double amp_scale,
                              const LabeledConstellation& cons);

// Monte-Carlo BER of the lifted code over the mapped AWGN channel.  Transmits
// scrambled all-zero codewords; fully deterministic for a fixed seed.
std::vector<BERRecord> run_ber(const LiftedCode& code, const ChannelAssignment& assign,
                               const LabeledConstellation& cons, const SimConfig& config);
std::vector<BERRecord> run_ber(const LiftedCode& code, const ChannelAssignment& assign,
                               const SimConfig& config);  // Gray 16-QAM

}  // namespace scbicm
