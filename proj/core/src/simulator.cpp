#include "scbicm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scbicm/rng.hpp"

namespace scbicm {

double BERRecord::ber_ci95(long n) const {
    if (frames < 2) return 1.0;
    double f = static_cast<double>(frames);
    double mean = static_cast<double>(bit_errors) / f;
    double var = (sum_sq_frame_bit_errors - f * mean * mean) / (f - 1.0);
    if (var < 0.0) var = 0.0;
    return 1.96 * std::sqrt(var / f) / static_cast<double>(n);
}

BpDecoder::BpDecoder(const LiftedCode& code) {
    check_off_.assign(code.n_checks + 1, 0);
    edge_bit_.resize(code.edges.size());
    std::vector<std::vector<int>> per_bit(code.n);
    // edges arrive sorted by (check, bit)
    for (size_t e = 0; e < code.edges.size(); ++e) {
        auto [c, b] = code.edges[e];
        if (c < 0 || c >= code.n_checks || b < 0 || b >= code.n)
            throw std::invalid_argument("edge endpoint outside the code dimensions");
        ++check_off_[c + 1];
        edge_bit_[e] = b;
        per_bit[b].push_back(static_cast<int>(e));
    }
    for (int c = 0; c < code.n_checks; ++c) check_off_[c + 1] += check_off_[c];
    bit_off_.assign(code.n + 1, 0);
    for (int b = 0; b < code.n; ++b) {
        bit_off_[b] = static_cast<int>(bit_edges_.size());
        bit_edges_.insert(bit_edges_.end(), per_bit[b].begin(), per_bit[b].end());
    }
    bit_off_[code.n] = static_cast<int>(bit_edges_.size());
    m_vc_.resize(edge_bit_.size());
    m_cv_.resize(edge_bit_.size());
    posterior_.resize(code.n);
}

BPResult BpDecoder::decode(std::span<const double> llr, int max_iters,
                           std::vector<std::uint8_t>& hard) {
    const int n = bit_count(), C = check_count();
    if (static_cast<int>(llr.size()) != n)
        throw std::invalid_argument("LLR vector does not match the code length");
    constexpr double kMsgClamp = 31.0;
    constexpr double kTanhLim = 1.0 - 1e-14;

    hard.assign(n, 0);
    for (size_t e = 0; e < m_vc_.size(); ++e) m_vc_[e] = llr[edge_bit_[e]];

    std::vector<double> pre(64), suf(64);
    for (int iter = 1; iter <= max_iters; ++iter) {
        for (int c = 0; c < C; ++c) {
            int lo = check_off_[c], hi = check_off_[c + 1], d = hi - lo;
            if (d == 0) continue;
            if (static_cast<int>(pre.size()) < d + 1) {
                pre.resize(d + 1);
                suf.resize(d + 1);
            }
            pre[0] = 1.0;
            for (int k = 0; k < d; ++k)
                pre[k + 1] = pre[k] * std::tanh(0.5 * std::clamp(m_vc_[lo + k], -kMsgClamp, kMsgClamp));
            suf[d] = 1.0;
            for (int k = d - 1; k >= 0; --k)
                suf[k] = suf[k + 1] * std::tanh(0.5 * std::clamp(m_vc_[lo + k], -kMsgClamp, kMsgClamp));
            for (int k = 0; k < d; ++k) {
                double t = std::clamp(pre[k] * suf[k + 1], -kTanhLim, kTanhLim);
                m_cv_[lo + k] = 2.0 * std::atanh(t);
            }
        }
        bool zero_llr = false;
        for (int b = 0; b < n; ++b) {
            double total = llr[b];
            for (int k = bit_off_[b]; k < bit_off_[b + 1]; ++k) total += m_cv_[bit_edges_[k]];
            posterior_[b] = total;
            for (int k = bit_off_[b]; k < bit_off_[b + 1]; ++k) {
                int e = bit_edges_[k];
                m_vc_[e] = total - m_cv_[e];
            }
            hard[b] = total < 0.0 ? 1 : 0;
            if (total == 0.0) zero_llr = true;
        }
        if (!zero_llr) {
            bool clean = true;
            for (int c = 0; c < C && clean; ++c) {
                int parity = 0;
                for (int k = check_off_[c]; k < check_off_[c + 1]; ++k)
                    parity ^= hard[edge_bit_[k]];
                if (parity) clean = false;
            }
            if (clean) return {true, iter};
        }
    }
    return {false, max_iters};
}

namespace {

double logsumexp2(double a, double b) {
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double logsumexp(const std::vector<double>& v) {
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

std::vector<double> demap_llr(std::complex<double> y, double noise_var, double amp_scale,
                              const LabeledConstellation& cons) {
    std::vector<double> out(cons.bits_per_symbol, 0.0);
    if (!cons.dims.empty()) {
        const double scale = -1.0 / noise_var;  // per-dim variance is noise_var / 2
        for (size_t d = 0; d < cons.dims.size(); ++d) {
            const auto& dim = cons.dims[d];
            double yd = (d == 0) ? y.real() : y.imag();
            std::vector<double> metric(dim.amplitudes.size());
            for (size_t a = 0; a < dim.amplitudes.size(); ++a) {
                double diff = yd - amp_scale * dim.amplitudes[a];
                metric[a] = scale * diff * diff;
            }
            for (size_t k = 0; k < dim.levels.size(); ++k) {
                double l0 = -HUGE_VAL, l1 = -HUGE_VAL;
                for (size_t a = 0; a < dim.amplitudes.size(); ++a)
                    if (dim.bits[a][k] == 0)
                        l0 = (l0 == -HUGE_VAL) ? metric[a] : logsumexp2(l0, metric[a]);
                    else
                        l1 = (l1 == -HUGE_VAL) ? metric[a] : logsumexp2(l1, metric[a]);
                out[dim.levels[k]] = l0 - l1;
            }
        }
        return out;
    }
    const double scale = -1.0 / noise_var;
    std::vector<double> metric(cons.points.size());
    for (size_t p = 0; p < cons.points.size(); ++p)
        metric[p] = scale * std::norm(y - amp_scale * cons.points[p]);
    for (int b = 0; b < cons.bits_per_symbol; ++b) {
        std::vector<double> v0, v1;
        for (size_t p = 0; p < cons.points.size(); ++p)
            (((cons.labels[p] >> b) & 1u) ? v1 : v0).push_back(metric[p]);
        out[b] = logsumexp(v0) - logsumexp(v1);
    }
    return out;
}

std::vector<BERRecord> run_ber(const LiftedCode& code, const ChannelAssignment& assign,
                               const LabeledConstellation& cons, const SimConfig& config) {
    const int n = code.n;
    const int m = assign.levels;
    if (static_cast<int>(assign.level_of.size()) != n)
        throw std::invalid_argument("assignment length does not match the code");
    if (cons.bits_per_symbol != m)
        throw std::invalid_argument("assignment levels do not match the constellation");
    if (n % m != 0) throw std::invalid_argument("code length must fill whole symbols");
    const long n_sym = n / m;
    const double rate = code.design_rate();
    if (rate <= 0.0) throw std::invalid_argument("non-positive design rate");

    // one fixed interleaver per level, independent of the frame loop
    std::vector<std::vector<int>> perm(m);
    for (int b = 0; b < n; ++b) perm[assign.level_of[b]].push_back(b);
    for (int i = 0; i < m; ++i) {
        if (static_cast<long>(perm[i].size()) != n_sym)
            throw std::invalid_argument("levels are not filled evenly");
        auto rng = make_engine(config.seed, 0x17e000ULL + i);
        std::shuffle(perm[i].begin(), perm[i].end(), rng);
    }

    std::vector<int> point_of_label(1u << m, -1);
    for (size_t p = 0; p < cons.points.size(); ++p) point_of_label[cons.labels[p]] = static_cast<int>(p);
    for (int v : point_of_label)
        if (v < 0) throw std::invalid_argument("constellation labels must cover all m-bit values");

    BpDecoder decoder(code);
    std::vector<BERRecord> records;
    std::vector<std::uint8_t> scramble(n), hard;
    std::vector<double> llr(n);

    for (size_t pt = 0; pt < config.ebn0_db.size(); ++pt) {
        BERRecord rec;
        rec.ebn0_db = config.ebn0_db[pt];
        rec.snr_db = rec.ebn0_db + 10.0 * std::log10(rate * m);
        const double amp = std::sqrt(std::pow(10.0, rec.snr_db / 10.0));
        const double noise_var = 1.0;
        double iter_sum = 0.0;

        for (long frame = 0; frame < config.max_frames; ++frame) {
            if (rec.bit_errors >= config.target_bit_errors &&
                rec.frame_errors >= config.target_frame_errors &&
                frame > 0)
                break;
            auto rng = make_engine(config.seed, (static_cast<std::uint64_t>(pt) << 40) ^
                                                    static_cast<std::uint64_t>(frame));
            std::uniform_int_distribution<int> coin(0, 1);
            std::normal_distribution<double> noise(0.0, std::sqrt(0.5 * noise_var));
            for (int b = 0; b < n; ++b) scramble[b] = static_cast<std::uint8_t>(coin(rng));

            for (long t = 0; t < n_sym; ++t) {
                unsigned label = 0;
                for (int i = 0; i < m; ++i)
                    label |= static_cast<unsigned>(scramble[perm[i][t]]) << i;
                std::complex<double> x = amp * cons.points[point_of_label[label]];
                std::complex<double> yy(x.real() + noise(rng), x.imag() + noise(rng));
                std::vector<double> sym_llr = demap_llr(yy, noise_var, amp, cons);
                for (int i = 0; i < m; ++i) {
                    int b = perm[i][t];
                    llr[b] = scramble[b] ? -sym_llr[i] : sym_llr[i];
                }
            }

            BPResult res = decoder.decode(llr, config.bp_iters, hard);
            long e = 0;
            for (int b = 0; b < n; ++b) e += hard[b];
            rec.frames += 1;
            rec.bit_errors += e;
            rec.frame_errors += (e > 0) ? 1 : 0;
            rec.sum_sq_frame_bit_errors += static_cast<double>(e) * static_cast<double>(e);
            iter_sum += res.iterations;
        }
        rec.avg_bp_iterations = rec.frames ? iter_sum / static_cast<double>(rec.frames) : 0.0;
        records.push_back(rec);
    }
    return records;
}

std::vector<BERRecord> run_ber(const LiftedCode& code, const ChannelAssignment& assign,
                               const SimConfig& config) {
    return run_ber(code, assign, LabeledConstellation::qam16_gray(), config);
}

}  // namespace scbicm
