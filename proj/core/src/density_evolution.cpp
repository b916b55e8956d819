#include "scbicm/density_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace scbicm {

DEGraph::DEGraph(const Protograph& g) {
    const int C = g.cn_count(), V = g.vn_count();
    cn_off_.assign(C + 1, 0);
    std::vector<std::vector<int>> per_vn(V);
    for (int c = 0; c < C; ++c) {
        cn_off_[c] = static_cast<int>(edge_vn_.size());
        for (int v = 0; v < V; ++v)
            for (int k = 0; k < g.multiplicity(c, v); ++k) {
                per_vn[v].push_back(static_cast<int>(edge_vn_.size()));
                edge_vn_.push_back(v);
            }
    }
    cn_off_[C] = static_cast<int>(edge_vn_.size());
    cn_edges_.resize(edge_vn_.size());
    for (size_t e = 0; e < edge_vn_.size(); ++e) cn_edges_[e] = static_cast<int>(e);
    vn_off_.assign(V + 1, 0);
    for (int v = 0; v < V; ++v) {
        vn_off_[v] = static_cast<int>(vn_edges_.size());
        vn_edges_.insert(vn_edges_.end(), per_vn[v].begin(), per_vn[v].end());
    }
    vn_off_[V] = static_cast<int>(vn_edges_.size());
}

DEResult DEGraph::run(std::span<const double> vn_erasures, const DEOptions& opts,
                      std::vector<std::vector<double>>* message_trace) const {
    const int V = vn_count(), C = cn_count(), E = edge_count();
    if (static_cast<int>(vn_erasures.size()) != V)
        throw std::invalid_argument("erasure vector does not match the graph");
    for (double e : vn_erasures)
        if (e < 0.0 || e > 1.0) throw std::invalid_argument("erasure rates must lie in [0, 1]");

    std::vector<double> p(E), q(E), pre(16), suf(16);
    for (int e = 0; e < E; ++e) p[e] = vn_erasures[edge_vn_[e]];
    std::vector<double> residual(V, 0.0);
    if (message_trace) message_trace->push_back(p);

    DEResult res;
    double stall_ref = 2.0;
    for (int iter = 1; iter <= opts.max_iters; ++iter) {
        // CN pass: q_e = 1 - prod_{e' != e} (1 - p_e')
        for (int c = 0; c < C; ++c) {
            int lo = cn_off_[c], hi = cn_off_[c + 1], d = hi - lo;
            if (d == 0) continue;
            if (static_cast<int>(pre.size()) < d + 1) {
                pre.resize(d + 1);
                suf.resize(d + 1);
            }
            pre[0] = 1.0;
            for (int k = 0; k < d; ++k) pre[k + 1] = pre[k] * (1.0 - p[lo + k]);
            suf[d] = 1.0;
            for (int k = d - 1; k >= 0; --k) suf[k] = suf[k + 1] * (1.0 - p[lo + k]);
            for (int k = 0; k < d; ++k) q[lo + k] = 1.0 - pre[k] * suf[k + 1];
        }
        // VN pass: p_e = eps_v * prod_{e' != e} q_e', residual_v = eps_v * prod q
        double max_res = 0.0;
        for (int v = 0; v < V; ++v) {
            int lo = vn_off_[v], hi = vn_off_[v + 1], d = hi - lo;
            if (d == 0) {
                residual[v] = vn_erasures[v];
                max_res = std::max(max_res, residual[v]);
                continue;
            }
            if (static_cast<int>(pre.size()) < d + 1) {
                pre.resize(d + 1);
                suf.resize(d + 1);
            }
            pre[0] = 1.0;
            for (int k = 0; k < d; ++k) pre[k + 1] = pre[k] * q[vn_edges_[lo + k]];
            suf[d] = 1.0;
            for (int k = d - 1; k >= 0; --k) suf[k] = suf[k + 1] * q[vn_edges_[lo + k]];
            for (int k = 0; k < d; ++k) p[vn_edges_[lo + k]] = vn_erasures[v] * pre[k] * suf[k + 1];
            residual[v] = vn_erasures[v] * pre[d];
            max_res = std::max(max_res, residual[v]);
        }
        if (message_trace) message_trace->push_back(p);
        if (max_res < opts.zero_tol) {
            res.converged = true;
            res.iterations = iter;
            res.residuals = residual;
            return res;
        }
        if (opts.stall_window > 0 && iter % opts.stall_window == 0) {
            if (stall_ref - max_res < opts.stall_tol) {
                res.converged = false;
                res.iterations = iter;
                res.residuals = residual;
                return res;
            }
            stall_ref = max_res;
        }
    }
    res.converged = false;
    res.iterations = opts.max_iters;
    res.residuals = residual;
    return res;
}

DEResult run_de(const Protograph& g, const std::vector<double>& vn_erasures,
                const DEOptions& opts) {
    return DEGraph(g).run(vn_erasures, opts);
}

namespace {

bool converges_at(const DEGraph& g, const BitMapping& map, const ErasureProfile& profile,
                  double snr_db, const DEOptions& opts) {
    std::vector<double> eff = effective_erasures(map, profile.erasures_at(snr_db));
    return g.run(eff, opts).converged;
}

}  // namespace

ThresholdResult threshold(const DEGraph& g, const BitMapping& map, const ErasureProfile& profile,
                          const DEOptions& opts) {
    if (map.vns() != g.vn_count())
        throw std::invalid_argument("mapping width does not match the graph");
    double fail_snr = profile.min_snr_db();
    double conv_snr = profile.max_snr_db();
    if (!converges_at(g, map, profile, conv_snr, opts))
        throw std::runtime_error("no convergence anywhere in the profile range");
    ThresholdResult out;
    if (converges_at(g, map, profile, fail_snr, opts)) {
        out.eps_avg = profile.avg_erasure_at(fail_snr);
        out.snr_db = fail_snr;
        out.at_profile_edge = true;
        return out;
    }
    int steps = 0;
    while (steps < opts.bisect_max_steps &&
           profile.avg_erasure_at(fail_snr) - profile.avg_erasure_at(conv_snr) > opts.bisect_tol) {
        double mid = 0.5 * (fail_snr + conv_snr);
        if (converges_at(g, map, profile, mid, opts))
            conv_snr = mid;
        else
            fail_snr = mid;
        ++steps;
    }
    out.eps_avg = profile.avg_erasure_at(conv_snr);
    out.snr_db = conv_snr;
    out.bisect_steps = steps;
    return out;
}

ThresholdResult threshold(const Protograph& g, const BitMapping& map, const ErasureProfile& profile,
                          const DEOptions& opts) {
    return threshold(DEGraph(g), map, profile, opts);
}

double threshold_scalar(const DEGraph& g, const DEOptions& opts, double lo, double hi) {
    auto conv = [&](double eps) {
        std::vector<double> e(g.vn_count(), eps);
        return g.run(e, opts).converged;
    };
    if (conv(hi)) return hi;
    if (!conv(lo)) throw std::runtime_error("no convergence even at the lower bracket");
    int steps = 0;
    while (hi - lo > opts.bisect_tol && steps < 64) {
        double mid = 0.5 * (lo + hi);
        if (conv(mid))
            lo = mid;
        else
            hi = mid;
        ++steps;
    }
    return lo;
}

double threshold_scalar(const Protograph& g, const DEOptions& opts, double lo, double hi) {
    return threshold_scalar(DEGraph(g), opts, lo, hi);
}

std::optional<int> convergence_iterations(const DEGraph& g, const BitMapping& map,
                                          const ErasureProfile& profile, double eps_avg,
                                          const DEOptions& opts) {
    double snr = profile.snr_for_avg_erasure(eps_avg);
    std::vector<double> eff = effective_erasures(map, profile.erasures_at(snr));
    DEResult r = g.run(eff, opts);
    if (!r.converged) return std::nullopt;
    return r.iterations;
}

}  // namespace scbicm
