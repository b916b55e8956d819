#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace scbicm {

// A 2^m-point constellation with an m-bit labeling.  Bit i of a point's label
// is the value of bit level i.  When the constellation is a product of two
// PAM sets with an independent per-dimension labeling (Gray QAM), `dims`
// carries that structure so capacities and LLRs can be computed per
// dimension; it stays empty otherwise.
struct LabeledConstellation {
    std::vector<std::complex<double>> points;  // unit average symbol energy
    std::vector<std::uint32_t> labels;
    int bits_per_symbol = 0;

    struct Pam {
        std::vector<double> amplitudes;      // unscaled per-dimension points
        std::vector<std::vector<int>> bits;  // bits[point][k]
        std::vector<int> levels;             // global level of local bit k
    };
    std::vector<Pam> dims;  // dims[0] = real axis, dims[1] = imaginary axis

    static LabeledConstellation qam16_gray();
    static LabeledConstellation bpsk();
};

// Per-level BICM capacities C_i in bits, at the given SNR (= Es/N0 with unit
// noise).  Uses Gauss-Hermite quadrature of the given order; separable
// constellations are evaluated per dimension, everything else on the full
// 2-D grid.
std::vector<double> bit_channel_capacities(const LabeledConstellation& c, double snr_db,
                                           int quad_nodes = 64);

// Tabulated surrogate erasure channel: at each SNR sample the bit level i is
// treated as a BEC with erasure rate eps_i = 1 - C_i.
class ErasureProfile {
  public:
    struct Sample {
        double snr_db = 0.0;
        std::vector<double> eps;
        double eps_avg = 0.0;
    };

    ErasureProfile() = default;
    ErasureProfile(std::vector<Sample> samples, int levels);

    int levels() const { return levels_; }
    const std::vector<Sample>& samples() const { return samples_; }
    double min_snr_db() const { return samples_.front().snr_db; }
    double max_snr_db() const { return samples_.back().snr_db; }

    std::vector<double> erasures_at(double snr_db) const;  // linear interpolation
    double avg_erasure_at(double snr_db) const;
    double snr_for_avg_erasure(double eps_avg) const;  // inverse of the line above

  private:
    std::vector<Sample> samples_;
    int levels_ = 0;
};

ErasureProfile build_erasure_profile(const LabeledConstellation& c, double snr_min_db,
                                     double snr_max_db, double snr_step_db,
                                     int quad_nodes = 64);

// Eb/N0 in dB for a code of the given rate mapped m bits per symbol.
double ebn0_db(double snr_db, double code_rate, int bits_per_symbol);

}  // namespace scbicm
