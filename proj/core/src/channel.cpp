#include "scbicm/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scbicm/quadrature.hpp"

namespace scbicm {

LabeledConstellation LabeledConstellation::qam16_gray() {
    LabeledConstellation c;
    c.bits_per_symbol = 4;
    const double scale = 1.0 / std::sqrt(10.0);
    // Gray 4-PAM: first bit flips with the sign, second with the magnitude.
    LabeledConstellation::Pam pam;
    pam.amplitudes = {-3.0 * scale, -1.0 * scale, 1.0 * scale, 3.0 * scale};
    pam.bits = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
    c.dims.push_back(pam);
    c.dims.push_back(pam);
    c.dims[0].levels = {0, 1};
    c.dims[1].levels = {2, 3};
    for (size_t i = 0; i < 4; ++i)
        for (size_t q = 0; q < 4; ++q) {
            c.points.push_back({pam.amplitudes[i], pam.amplitudes[q]});
            std::uint32_t label = 0;
            label |= static_cast<std::uint32_t>(pam.bits[i][0]) << 0;
            label |= static_cast<std::uint32_t>(pam.bits[i][1]) << 1;
            label |= static_cast<std::uint32_t>(pam.bits[q][0]) << 2;
            label |= static_cast<std::uint32_t>(pam.bits[q][1]) << 3;
            c.labels.push_back(label);
        }
    return c;
}

LabeledConstellation LabeledConstellation::bpsk() {
    LabeledConstellation c;
    c.bits_per_symbol = 1;
    c.points = {{1.0, 0.0}, {-1.0, 0.0}};
    c.labels = {0, 1};
    LabeledConstellation::Pam pam;
    pam.amplitudes = {-1.0, 1.0};
    pam.bits = {{1}, {0}};
    pam.levels = {0};
    c.dims.push_back(pam);
    return c;
}

namespace {

// BICM capacity of one bit position of a PAM set in Gaussian noise with
// per-dimension variance sigma2.  y = x + sigma*sqrt(2)*t turns the Gaussian
// expectation into the Hermite weight.
double pam_bit_capacity(const std::vector<double>& amps, const std::vector<std::vector<int>>& bits,
                        int bit_index, double sigma2, const HermiteRule& rule) {
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    const double spread = std::sqrt(2.0 * sigma2);
    const size_t n = amps.size();
    double loss = 0.0;
    for (size_t xi = 0; xi < n; ++xi) {
        double acc = 0.0;
        for (size_t t = 0; t < rule.nodes.size(); ++t) {
            double y = amps[xi] + spread * rule.nodes[t];
            double den = 0.0, num = 0.0;
            for (size_t xj = 0; xj < n; ++xj) {
                double d = y - amps[xj];
                double e = std::exp(-d * d / (2.0 * sigma2));
                den += e;
                if (bits[xj][bit_index] == bits[xi][bit_index]) num += e;
            }
            acc += rule.weights[t] * std::log2(den / num);
        }
        loss += inv_sqrt_pi * acc;
    }
    return 1.0 - loss / static_cast<double>(n);
}

// Same quantity on the full 2-D constellation (complex noise CN(0, 2*sigma2)
// with sigma2 per dimension).
double qam_bit_capacity(const LabeledConstellation& c, const std::vector<std::complex<double>>& pts,
                        int bit_index, double sigma2, const HermiteRule& rule) {
    const double inv_pi = 1.0 / M_PI;
    const double spread = std::sqrt(2.0 * sigma2);
    const size_t n = pts.size();
    double loss = 0.0;
    for (size_t xi = 0; xi < n; ++xi) {
        int own = (c.labels[xi] >> bit_index) & 1u;
        double acc = 0.0;
        for (size_t t1 = 0; t1 < rule.nodes.size(); ++t1)
            for (size_t t2 = 0; t2 < rule.nodes.size(); ++t2) {
                std::complex<double> y = pts[xi] + std::complex<double>(spread * rule.nodes[t1],
                                                                        spread * rule.nodes[t2]);
                double den = 0.0, num = 0.0;
                for (size_t xj = 0; xj < n; ++xj) {
                    double d2 = std::norm(y - pts[xj]);
                    double e = std::exp(-d2 / (2.0 * sigma2));
                    den += e;
                    if (((c.labels[xj] >> bit_index) & 1u) == static_cast<unsigned>(own)) num += e;
                }
                acc += rule.weights[t1] * rule.weights[t2] * std::log2(den / num);
            }
        loss += inv_pi * acc;
    }
    return 1.0 - loss / static_cast<double>(n);
}

}  // namespace

std::vector<double> bit_channel_capacities(const LabeledConstellation& c, double snr_db,
                                           int quad_nodes) {
    if (c.bits_per_symbol < 1) throw std::invalid_argument("constellation has no bit levels");
    const double amp = std::sqrt(std::pow(10.0, snr_db / 10.0));
    HermiteRule rule = hermite_rule(quad_nodes);
    std::vector<double> cap(c.bits_per_symbol, 0.0);
    if (!c.dims.empty()) {
        // per-dimension noise variance for unit complex noise
        const double sigma2 = 0.5;
        for (const auto& dim : c.dims) {
            std::vector<double> scaled(dim.amplitudes.size());
            for (size_t i = 0; i < scaled.size(); ++i) scaled[i] = amp * dim.amplitudes[i];
            for (size_t k = 0; k < dim.levels.size(); ++k)
                cap[dim.levels[k]] = pam_bit_capacity(scaled, dim.bits, static_cast<int>(k), sigma2, rule);
        }
    } else {
        const double sigma2 = 0.5;
        std::vector<std::complex<double>> pts(c.points.size());
        for (size_t i = 0; i < pts.size(); ++i) pts[i] = amp * c.points[i];
        for (int b = 0; b < c.bits_per_symbol; ++b)
            cap[b] = qam_bit_capacity(c, pts, b, sigma2, rule);
    }
    return cap;
}

ErasureProfile::ErasureProfile(std::vector<Sample> samples, int levels)
    : samples_(std::move(samples)), levels_(levels) {
    if (samples_.size() < 2) throw std::invalid_argument("profile needs at least two samples");
    for (const auto& s : samples_)
        if (static_cast<int>(s.eps.size()) != levels_)
            throw std::invalid_argument("profile sample has the wrong number of levels");
    for (size_t i = 1; i < samples_.size(); ++i) {
        if (!(samples_[i].snr_db > samples_[i - 1].snr_db))
            throw std::invalid_argument("profile SNR samples must ascend");
        if (!(samples_[i].eps_avg < samples_[i - 1].eps_avg))
            throw std::invalid_argument("profile average erasure rate must strictly decrease");
    }
}

std::vector<double> ErasureProfile::erasures_at(double snr_db) const {
    if (snr_db < min_snr_db() || snr_db > max_snr_db())
        throw std::out_of_range("SNR outside the tabulated profile range");
    auto it = std::lower_bound(samples_.begin(), samples_.end(), snr_db,
                               [](const Sample& s, double v) { return s.snr_db < v; });
    if (it == samples_.begin()) return it->eps;
    if (it == samples_.end() || it->snr_db > snr_db) {
        const Sample& hi = *it;
        const Sample& lo = *(it - 1);
        double t = (snr_db - lo.snr_db) / (hi.snr_db - lo.snr_db);
        std::vector<double> out(levels_);
        for (int i = 0; i < levels_; ++i) out[i] = (1.0 - t) * lo.eps[i] + t * hi.eps[i];
        return out;
    }
    return it->eps;
}

double ErasureProfile::avg_erasure_at(double snr_db) const {
    // keep the exact operation order of a uniform bit mapping so that the
    // scalar collapse is bit-for-bit reproducible
    std::vector<double> eps = erasures_at(snr_db);
    const double inv_m = 1.0 / levels_;
    double acc = 0.0;
    for (int i = 0; i < levels_; ++i) acc += eps[i] * inv_m;
    return acc;
}

double ErasureProfile::snr_for_avg_erasure(double eps_avg) const {
    double lo = min_snr_db(), hi = max_snr_db();
    double f_lo = avg_erasure_at(lo), f_hi = avg_erasure_at(hi);
    if (eps_avg > f_lo || eps_avg < f_hi)
        throw std::out_of_range("average erasure rate outside the tabulated profile range");
    for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
        double mid = 0.5 * (lo + hi);
        if (avg_erasure_at(mid) >= eps_avg)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

ErasureProfile build_erasure_profile(const LabeledConstellation& c, double snr_min_db,
                                     double snr_max_db, double snr_step_db, int quad_nodes) {
    if (snr_step_db <= 0.0 || snr_max_db <= snr_min_db)
        throw std::invalid_argument("bad profile SNR grid");
    std::vector<ErasureProfile::Sample> samples;
    int count = static_cast<int>(std::floor((snr_max_db - snr_min_db) / snr_step_db + 1e-9)) + 1;
    const double inv_m = 1.0 / c.bits_per_symbol;
    for (int k = 0; k < count; ++k) {
        ErasureProfile::Sample s;
        s.snr_db = snr_min_db + k * snr_step_db;
        std::vector<double> cap = bit_channel_capacities(c, s.snr_db, quad_nodes);
        s.eps.resize(cap.size());
        for (size_t i = 0; i < cap.size(); ++i)
            s.eps[i] = std::clamp(1.0 - cap[i], 0.0, 1.0);
        double acc = 0.0;
        for (size_t i = 0; i < s.eps.size(); ++i) acc += s.eps[i] * inv_m;
        s.eps_avg = acc;
        samples.push_back(std::move(s));
    }
    // Interpolation error has to stay well under threshold tolerances, so
    // refuse grids where eps_avg jumps visibly between neighbors.
    for (size_t k = 1; k < samples.size(); ++k)
        if (samples[k - 1].eps_avg - samples[k].eps_avg >= 0.005)
            throw std::invalid_argument("profile SNR grid too coarse near " +
                                        std::to_string(samples[k].snr_db) + " dB");
    return ErasureProfile(std::move(samples), c.bits_per_symbol);
}

double ebn0_db(double snr_db, double code_rate, int bits_per_symbol) {
    if (code_rate <= 0.0 || bits_per_symbol < 1)
        throw std::invalid_argument("need a positive rate and at least one bit per symbol");
    return snr_db - 10.0 * std::log10(code_rate * bits_per_symbol);
}

}  // namespace scbicm
