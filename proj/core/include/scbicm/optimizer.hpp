#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "scbicm/bitmap.hpp"
#include "scbicm/channel.hpp"
#include "scbicm/density_evolution.hpp"
#include "scbicm/protograph.hpp"

namespace scbicm {

// Progress report emitted at generation boundaries; handy for log lines.
struct ProgressEvent {
    int outer = 0;       // design-loop iteration (1-based), 0 for a bare DE call
    int candidate = 0;   // index into the candidate list
    int generation = 0;  // generations finished for this candidate
    double best_objective = 0.0;
    double eps_avg = 0.0;  // erasure rate the stage is optimizing at
};
using ProgressFn = std::function<void(const ProgressEvent&)>;

// Knobs of the rand/1/bin differential evolution and the surrounding design
// loop.  top_candidates bounds how many connection patterns get a full DE
// pass per outer iteration; the rest are ranked out by a single
// uniform-mapping evaluation, which is orders of magnitude cheaper.
struct DEHyperParams {
    int population = 60;
    double weight = 0.7;
    double crossover = 0.9;
    int generations = 300;
    std::uint64_t seed = 1;
    int top_candidates = 12;
    int max_outer = 20;
};

// A connection pattern with its graph compiled for density evolution.
struct Candidate {
    ConnectionSpec spec;  // empty edges for a plain single chain
    Protograph graph;
    DEGraph de;
};

Candidate make_candidate(const Protograph& graph, ConnectionSpec spec = {});
std::vector<Candidate> make_candidates(const SingleChainParams& p,
                                       const std::vector<ConnectionSpec>& specs);

// Genome: per-VN share of the first capacity group (the other group takes
// the complement).  Requires a profile with exactly two capacity groups.
struct Genome {
    int candidate = 0;
    std::vector<double> fractions;
};

// Clamp to [0, 1], then restore the row balance sum(f) = V/2 by scaling
// either the shares or their complements; both moves keep entries in range.
std::vector<double> repair_fractions(std::vector<double> fractions);

BitMapping expand_genome(const Genome& g, const std::vector<std::vector<int>>& groups);

// Iterations to converge at eps_avg, or max_iters + 100 * mean residual when
// the run gets stuck.  Lower is better.
double objective(const Genome& g, double eps_avg, const std::vector<Candidate>& candidates,
                 const ErasureProfile& profile, const DEOptions& opts = {});

struct DEOutcome {
    Genome best;
    double best_objective = 0.0;
    bool converged = false;  // best genome converges at the target erasure rate
};

// Full DE over mappings for every listed candidate at the target erasure
// rate; returns the global winner.
DEOutcome differential_evolution(double eps_avg, const std::vector<Candidate>& candidates,
                                 const DEHyperParams& hyper, const ErasureProfile& profile,
                                 const DEOptions& opts = {}, const ProgressFn& progress = {});

struct DesignResult {
    ConnectionSpec spec;
    Genome genome;
    BitMapping mapping;
    double eps_avg = 0.0;  // threshold of the returned design
    double snr_db = 0.0;
    int outer_iterations = 0;
    bool budget_exhausted = false;  // stopped because nothing converged at the target
};

// Alternating design loop: start from the uniform-mapping threshold of the
// plain chain, optimize mappings (and the connection choice) at that erasure
// rate, re-measure the winner's threshold, and repeat while it improves.
DesignResult joint_design(const SingleChainParams& p, int num_chains,
                          const ErasureProfile& profile, const DEHyperParams& hyper = {},
                          const DEOptions& opts = {}, const EnumerationOptions& enum_opts = {},
                          const ProgressFn& progress = {});

// Same loop with the connection pattern frozen to the given graph.
DesignResult optimize_mapping_only(const Protograph& graph, const ErasureProfile& profile,
                                   const DEHyperParams& hyper = {}, const DEOptions& opts = {},
                                   const ProgressFn& progress = {});

}  // namespace scbicm
