#include "scbicm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scbicm/rng.hpp"

namespace scbicm {

Candidate make_candidate(const Protograph& graph, ConnectionSpec spec) {
    return Candidate{std::move(spec), graph, DEGraph(graph)};
}

std::vector<Candidate> make_candidates(const SingleChainParams& p,
                                       const std::vector<ConnectionSpec>& specs) {
    std::vector<Candidate> out;
    out.reserve(specs.size());
    for (const auto& s : specs) {
        Protograph g = build_connected(p, s);
        out.push_back(Candidate{s, g, DEGraph(g)});
    }
    return out;
}

std::vector<double> repair_fractions(std::vector<double> fractions) {
    const double target = 0.5 * static_cast<double>(fractions.size());
    for (double& f : fractions) f = std::clamp(f, 0.0, 1.0);
    double sum = std::accumulate(fractions.begin(), fractions.end(), 0.0);
    if (sum > target && sum > 0.0) {
        double s = target / sum;
        for (double& f : fractions) f *= s;
    } else if (sum < target) {
        double rest = static_cast<double>(fractions.size()) - sum;
        if (rest > 0.0) {
            double s = (static_cast<double>(fractions.size()) - target) / rest;
            for (double& f : fractions) f = 1.0 - (1.0 - f) * s;
        }
    }
    return fractions;
}

BitMapping expand_genome(const Genome& g, const std::vector<std::vector<int>>& groups) {
    if (groups.size() != 2)
        throw std::invalid_argument("pair-share genomes need exactly two capacity groups");
    int m = 0;
    for (const auto& grp : groups) m += static_cast<int>(grp.size());
    BitMapping map(m, static_cast<int>(g.fractions.size()));
    for (int j = 0; j < map.vns(); ++j) {
        double f = g.fractions[j];
        for (int lvl : groups[0]) map.set(lvl, j, f / static_cast<double>(groups[0].size()));
        for (int lvl : groups[1]) map.set(lvl, j, (1.0 - f) / static_cast<double>(groups[1].size()));
    }
    return map;
}

namespace {

struct EvalSetup {
    std::vector<double> eps;       // per-level erasures at the target SNR
    std::vector<int> group_of;     // level -> group id
    std::vector<double> group_sz;  // level -> size of its group
    double penalty_floor = 0.0;
};

EvalSetup make_setup(const ErasureProfile& profile, double eps_avg,
                     const std::vector<std::vector<int>>& groups, const DEOptions& opts) {
    EvalSetup s;
    s.eps = profile.erasures_at(profile.snr_for_avg_erasure(eps_avg));
    s.group_of.assign(profile.levels(), 0);
    s.group_sz.assign(profile.levels(), 1.0);
    for (size_t g = 0; g < groups.size(); ++g)
        for (int lvl : groups[g]) {
            s.group_of[lvl] = static_cast<int>(g);
            s.group_sz[lvl] = static_cast<double>(groups[g].size());
        }
    s.penalty_floor = static_cast<double>(opts.max_iters);
    return s;
}

struct EvalResult {
    double cost = 0.0;
    bool converged = false;
};

// Mirrors effective_erasures(expand_genome(...)) operation for operation so
// the fast path and the expanded mapping agree bit-for-bit.
EvalResult eval_fractions(const DEGraph& de, const EvalSetup& s, const std::vector<double>& fr,
                          const DEOptions& opts, std::vector<double>& eff) {
    const int m = static_cast<int>(s.eps.size());
    const int V = static_cast<int>(fr.size());
    eff.resize(V);
    for (int j = 0; j < V; ++j) {
        double f = fr[j];
        double acc = 0.0;
        for (int i = 0; i < m; ++i) {
            double numer = (s.group_of[i] == 0) ? f : 1.0 - f;
            acc += s.eps[i] * (numer / s.group_sz[i]);
        }
        eff[j] = acc;
    }
    DEResult r = de.run(eff, opts);
    if (r.converged) return {static_cast<double>(r.iterations), true};
    double mean = std::accumulate(r.residuals.begin(), r.residuals.end(), 0.0) /
                  static_cast<double>(r.residuals.size());
    return {s.penalty_floor + 100.0 * mean, false};
}

struct CandidateBest {
    std::vector<double> fractions;
    double cost = 0.0;
    bool converged = false;
};

// rand/1/bin with clamping repair; the uniform mapping always seeds the
// population so the optimizer can only improve on it, and a warm genome from
// an earlier stage slots in next to it when available.
CandidateBest de_single(const DEGraph& de, const EvalSetup& s, const DEHyperParams& hyper,
                        const DEOptions& opts, std::uint64_t stream, const ProgressFn& progress,
                        int outer, int candidate, double eps_avg,
                        const std::vector<double>* warm = nullptr) {
    const int V = de.vn_count();
    const int NP = std::max(4, hyper.population);
    auto rng = make_engine(hyper.seed, 0xde000000ULL + stream);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, NP - 1);
    std::uniform_int_distribution<int> pick_dim(0, V - 1);

    std::vector<std::vector<double>> pop(NP);
    std::vector<EvalResult> score(NP);
    std::vector<double> eff;
    pop[0] = repair_fractions(std::vector<double>(V, 0.5));
    int fixed = 1;
    if (warm && static_cast<int>(warm->size()) == V) pop[fixed++] = repair_fractions(*warm);
    for (int i = fixed; i < NP; ++i) {
        std::vector<double> f(V);
        for (double& x : f) x = U(rng);
        pop[i] = repair_fractions(std::move(f));
    }
    for (int i = 0; i < NP; ++i) score[i] = eval_fractions(de, s, pop[i], opts, eff);

    auto report = [&](int gen) {
        if (!progress) return;
        double best = score[0].cost;
        for (int i = 1; i < NP; ++i) best = std::min(best, score[i].cost);
        progress({outer, candidate, gen, best, eps_avg});
    };
    report(0);

    std::vector<double> trial(V);
    for (int gen = 0; gen < hyper.generations; ++gen) {
        for (int i = 0; i < NP; ++i) {
            int r1 = pick(rng);
            while (r1 == i) r1 = pick(rng);
            int r2 = pick(rng);
            while (r2 == i || r2 == r1) r2 = pick(rng);
            int r3 = pick(rng);
            while (r3 == i || r3 == r1 || r3 == r2) r3 = pick(rng);
            int jrand = pick_dim(rng);
            for (int j = 0; j < V; ++j) {
                double mutant = pop[r1][j] + hyper.weight * (pop[r2][j] - pop[r3][j]);
                trial[j] = (U(rng) < hyper.crossover || j == jrand) ? mutant : pop[i][j];
            }
            std::vector<double> repaired = repair_fractions(trial);
            EvalResult sc = eval_fractions(de, s, repaired, opts, eff);
            if (sc.cost <= score[i].cost) {
                pop[i] = std::move(repaired);
                score[i] = sc;
            }
        }
        if (gen % 25 == 24 || gen == hyper.generations - 1) report(gen + 1);
    }

    int best = 0;
    for (int i = 1; i < NP; ++i)
        if (score[i].cost < score[best].cost) best = i;
    return {pop[best], score[best].cost, score[best].converged};
}

}  // namespace

double objective(const Genome& g, double eps_avg, const std::vector<Candidate>& candidates,
                 const ErasureProfile& profile, const DEOptions& opts) {
    if (g.candidate < 0 || g.candidate >= static_cast<int>(candidates.size()))
        throw std::out_of_range("genome references an unknown candidate");
    auto groups = level_groups(profile);
    EvalSetup s = make_setup(profile, eps_avg, groups, opts);
    std::vector<double> eff;
    return eval_fractions(candidates[g.candidate].de, s, g.fractions, opts, eff).cost;
}

DEOutcome differential_evolution(double eps_avg, const std::vector<Candidate>& candidates,
                                 const DEHyperParams& hyper, const ErasureProfile& profile,
                                 const DEOptions& opts, const ProgressFn& progress) {
    if (candidates.empty()) throw std::invalid_argument("no candidates to optimize");
    auto groups = level_groups(profile);
    if (groups.size() != 2)
        throw std::runtime_error("pair-share genomes need exactly two capacity groups");
    EvalSetup s = make_setup(profile, eps_avg, groups, opts);
    DEOutcome out;
    bool first = true;
    for (size_t c = 0; c < candidates.size(); ++c) {
        CandidateBest cb = de_single(candidates[c].de, s, hyper, opts, c, progress, 0,
                                     static_cast<int>(c), eps_avg);
        if (first || cb.cost < out.best_objective) {
            out.best = {static_cast<int>(c), cb.fractions};
            out.best_objective = cb.cost;
            out.converged = cb.converged;
            first = false;
        }
    }
    return out;
}

namespace {

DesignResult design_loop(std::vector<Candidate> cands, double eps0, const ErasureProfile& profile,
                         const DEHyperParams& hyper, const DEOptions& opts,
                         const ProgressFn& progress) {
    auto groups = level_groups(profile);
    if (groups.size() != 2)
        throw std::runtime_error("pair-share genomes need exactly two capacity groups");

    DesignResult best{.spec = {}, .genome = {}, .mapping = BitMapping(profile.levels(), 1)};
    bool have_best = false;
    double eps = eps0;
    std::vector<double> eff;

    for (int outer = 1; outer <= hyper.max_outer; ++outer) {
        EvalSetup s = make_setup(profile, eps, groups, opts);

        // rank candidates by one uniform-mapping evaluation, then spend the
        // full DE budget only on the leaders
        std::vector<size_t> live(cands.size());
        std::iota(live.begin(), live.end(), size_t{0});
        if (static_cast<int>(live.size()) > hyper.top_candidates) {
            std::vector<std::pair<double, size_t>> ranked;
            ranked.reserve(live.size());
            for (size_t c : live) {
                std::vector<double> uniform(cands[c].de.vn_count(), 0.5);
                ranked.push_back({eval_fractions(cands[c].de, s, uniform, opts, eff).cost, c});
            }
            std::sort(ranked.begin(), ranked.end());
            live.clear();
            for (int k = 0; k < hyper.top_candidates; ++k) live.push_back(ranked[k].second);
            // the incumbent keeps its seat even if its uniform score slipped
            if (have_best) {
                auto inc = static_cast<size_t>(best.genome.candidate);
                if (std::find(live.begin(), live.end(), inc) == live.end()) live.push_back(inc);
            }
            std::sort(live.begin(), live.end());
        }

        bool first = true;
        CandidateBest win;
        size_t win_idx = 0;
        for (size_t c : live) {
            const std::vector<double>* warm =
                have_best && c == static_cast<size_t>(best.genome.candidate)
                    ? &best.genome.fractions
                    : nullptr;
            CandidateBest cb = de_single(cands[c].de, s, hyper, opts, c, progress, outer,
                                         static_cast<int>(c), eps, warm);
            if (first || cb.cost < win.cost) {
                win = std::move(cb);
                win_idx = c;
                first = false;
            }
        }

        if (!win.converged) {
            if (!have_best)
                throw std::runtime_error("optimizer budget exhausted before any design converged");
            best.budget_exhausted = true;
            best.outer_iterations = outer;
            return best;
        }

        Genome genome{static_cast<int>(win_idx), win.fractions};
        BitMapping mapping = expand_genome(genome, groups);
        ThresholdResult thr = threshold(cands[win_idx].de, mapping, profile, opts);

        if (!have_best || thr.eps_avg > best.eps_avg) {
            best.spec = cands[win_idx].spec;
            best.genome = genome;
            best.mapping = mapping;
            best.eps_avg = thr.eps_avg;
            best.snr_db = thr.snr_db;
            have_best = true;
        }
        best.outer_iterations = outer;
        if (thr.eps_avg > eps)
            eps = thr.eps_avg;
        else
            break;
    }
    return best;
}

}  // namespace

DesignResult joint_design(const SingleChainParams& p, int num_chains,
                          const ErasureProfile& profile, const DEHyperParams& hyper,
                          const DEOptions& opts, const EnumerationOptions& enum_opts,
                          const ProgressFn& progress) {
    p.validate();
    Protograph base = build_single_chain(p);
    DEGraph base_de(base);
    BitMapping uniform = BitMapping::uniform(profile.levels(), base.vn_count());
    double eps0 = threshold(base_de, uniform, profile, opts).eps_avg;

    std::vector<Candidate> cands;
    if (num_chains >= 2)
        cands = make_candidates(p, enumerate_connections(p, num_chains, enum_opts));
    else
        cands.push_back(make_candidate(base));
    if (cands.empty()) throw std::runtime_error("connection enumeration came up empty");
    return design_loop(std::move(cands), eps0, profile, hyper, opts, progress);
}

DesignResult optimize_mapping_only(const Protograph& graph, const ErasureProfile& profile,
                                   const DEHyperParams& hyper, const DEOptions& opts,
                                   const ProgressFn& progress) {
    std::vector<Candidate> cands;
    cands.push_back(make_candidate(graph));
    BitMapping uniform = BitMapping::uniform(profile.levels(), graph.vn_count());
    double eps0 = threshold(cands[0].de, uniform, profile, opts).eps_avg;
    return design_loop(std::move(cands), eps0, profile, hyper, opts, progress);
}

}  // namespace scbicm
