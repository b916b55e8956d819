// End-to-end acceptance gate.  Each numbered criterion prints one
// [PASS]/[FAIL] line with the measured values; the process exits nonzero if
// any criterion fails.  Criterion 10 shells out to the CLI binary, whose path
// comes from argv[1] or the SCBICM_BIN environment variable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "scbicm/bitmap.hpp"
#include "scbicm/channel.hpp"
#include "scbicm/density_evolution.hpp"
#include "scbicm/io.hpp"
#include "scbicm/lifting.hpp"
#include "scbicm/optimizer.hpp"
#include "scbicm/protograph.hpp"
#include "scbicm/rng.hpp"
#include "scbicm/simulator.hpp"

using namespace scbicm;

namespace {

int failures = 0;

// Runs one criterion, times it, and turns exceptions into failures.
void criterion(int number, const char* title, const std::function<std::string()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;
    try {
        detail = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = std::string("exception: ") + e.what();
    }
    if (!detail.empty() && detail.rfind("FAIL", 0) == 0) {
        pass = false;
        detail = detail.substr(4);
        if (!detail.empty() && detail.front() == ' ') detail.erase(0, 1);
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d. %s — %s (%.1f s)\n", pass ? "PASS" : "FAIL", number, title,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ------------------------------------------------------------------ oracle ---

// Scalar-BEC threshold of the uncoupled (3,6) ensemble by direct recursion.
double scalar_recursion_threshold_36() {
    auto converges = [](double e) {
        double x = e;
        for (int i = 0; i < 20000; ++i) {
            double q = 1.0 - std::pow(1.0 - x, 5);
            double nx = e * q * q;
            if (nx < 1e-12) return true;
            if (std::fabs(nx - x) < 1e-15) return false;  // parked at a fixed point
            x = nx;
        }
        return x < 1e-12;
    };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 60; ++i) {
        double mid = 0.5 * (lo + hi);
        (converges(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Protograph uncoupled_36() {
    Protograph g(1, 2);
    g.add_edges(0, 0, 3);
    g.add_edges(0, 1, 3);
    return g;
}

// ------------------------------------------------------- BER curve helpers ---

struct Curve {
    std::vector<BERRecord> recs;
    long n = 0;

    double ber(size_t i) const { return recs[i].ber(n); }
    double lower95(size_t i) const {
        return std::max(0.0, ber(i) - recs[i].ber_ci95(n));
    }
    double upper95(size_t i) const {
        double up = ber(i) + recs[i].ber_ci95(n);
        if (recs[i].bit_errors == 0)  // rule-of-three bound for clean runs
            up = std::max(up, 3.0 / (static_cast<double>(recs[i].frames) * n));
        return up;
    }
};

// Eb/N0 where the curve crosses `target` (log-linear between grid points).
std::optional<double> crossing(const Curve& c, const std::vector<double>& grid, double target) {
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
        double b0 = c.ber(i), b1 = c.ber(i + 1);
        if (b0 >= target && b1 < target && b1 > 0.0) {
            double l0 = std::log(b0), l1 = std::log(b1);
            double t = (std::log(target) - l0) / (l1 - l0);
            return grid[i] + t * (grid[i + 1] - grid[i]);
        }
        if (b0 >= target && b1 == 0.0) return grid[i + 1];  // fell off a cliff
    }
    return std::nullopt;
}

// Curve value at x, interpolated on a log scale; zero-error points enter at
// their 95% upper bound, which is conservative for "is this curve lower".
double value_at(const Curve& c, const std::vector<double>& grid, double x) {
    size_t i = 0;
    while (i + 2 < grid.size() && grid[i + 1] < x) ++i;
    double b0 = std::max(c.ber(i), c.upper95(i) * (c.recs[i].bit_errors == 0 ? 1.0 : 0.0));
    double b1 = std::max(c.ber(i + 1), c.upper95(i + 1) * (c.recs[i + 1].bit_errors == 0 ? 1.0 : 0.0));
    b0 = std::max(b0, 1e-300);
    b1 = std::max(b1, 1e-300);
    double t = (x - grid[i]) / (grid[i + 1] - grid[i]);
    return std::exp(std::log(b0) + t * (std::log(b1) - std::log(b0)));
}

}  // namespace

int main(int argc, char** argv) {
    std::string cli_bin = argc > 1 ? argv[1] : "";
    if (cli_bin.empty())
        if (const char* env = std::getenv("SCBICM_BIN")) cli_bin = env;

    SingleChainParams p;  // (3,6,10,2)
    std::optional<ErasureProfile> profile;
    std::optional<Protograph> single, loop, cont;
    double single_eps = 0, loop_eps = 0, cont_eps = 0;
    std::optional<DesignResult> joint;

    criterion(1, "exact design rate", [&] {
        Rational r = design_rate(p);
        if (r.num * 5 != r.den * 2 || r.value() != 0.4)
            return "FAIL rate = " + std::to_string(r.num) + "/" + std::to_string(r.den);
        return "rate = " + std::to_string(r.num) + "/" + std::to_string(r.den) + " = 0.4";
    });

    criterion(2, "scalar-BEC threshold matches the direct recursion", [&] {
        double oracle = scalar_recursion_threshold_36();
        double lib = threshold_scalar(uncoupled_36());
        double diff = std::fabs(lib - oracle);
        std::string d = "lib " + fmt(lib) + " vs recursion " + fmt(oracle) + ", diff " + fmt(diff);
        if (diff >= 5e-4) return "FAIL " + d;
        return d;
    });

    criterion(3, "single-chain uniform threshold on Gray 16-QAM", [&] {
        profile = build_erasure_profile(LabeledConstellation::qam16_gray(), -2.0, 12.0, 0.05);
        single = build_single_chain(p);
        ThresholdResult t =
            threshold(*single, BitMapping::uniform(profile->levels(), single->vn_count()),
                      *profile);
        single_eps = t.eps_avg;
        double ebn0 = ebn0_db(t.snr_db, 0.4, profile->levels());
        std::string d = "eps " + fmt(t.eps_avg) + " (ref 0.5036±0.003), Eb/N0 " + fmt(ebn0) +
                        " dB (ref 3.16±0.05)";
        if (std::fabs(t.eps_avg - 0.5036) > 0.003 || std::fabs(ebn0 - 3.16) > 0.05)
            return "FAIL " + d;
        return d;
    });

    criterion(4, "erasure-rate to Eb/N0 conversion consistency", [&] {
        const double pairs[][2] = {{0.5365, 2.61}, {0.5187, 2.91}, {0.5697, 2.11}};
        std::string d;
        for (const auto& pr : pairs) {
            double snr = profile->snr_for_avg_erasure(pr[0]);
            double ebn0 = ebn0_db(snr, 0.4, profile->levels());
            if (!d.empty()) d += ", ";
            d += fmt(pr[0]) + "->" + fmt(ebn0) + " dB (ref " + fmt(pr[1]) + ")";
            if (std::fabs(ebn0 - pr[1]) > 0.05) return "FAIL " + d;
        }
        return d;
    });

    criterion(5, "connected-ensemble uniform thresholds", [&] {
        loop = build_loop_connected(p);
        cont = build_continuous_connected(p);
        int m = profile->levels();
        loop_eps = threshold(*loop, BitMapping::uniform(m, loop->vn_count()), *profile).eps_avg;
        cont_eps = threshold(*cont, BitMapping::uniform(m, cont->vn_count()), *profile).eps_avg;
        std::string d = "loop " + fmt(loop_eps) + " (ref 0.5365±0.005), continuous " +
                        fmt(cont_eps) + " (ref 0.5036±0.005)";
        bool bands =
            std::fabs(loop_eps - 0.5365) <= 0.005 && std::fabs(cont_eps - 0.5036) <= 0.005;
        if (bands) return d;
        // Degraded, reconstruction-independent form.
        bool property = loop_eps > single_eps && cont_eps >= single_eps - 0.002;
        if (property) return d + " [property form: beats/matches the single chain]";
        return "FAIL " + d;
    });

    criterion(6, "mapping-only optimization beats the uniform baseline", [&] {
        DesignResult r = optimize_mapping_only(*single, *profile);
        std::string d = "eps " + fmt(r.eps_avg) + " (floor 0.5036, default-budget bar 0.515, ref 0.5187)";
        if (r.eps_avg < 0.5036 || r.eps_avg < 0.515) return "FAIL " + d;
        return d;
    });

    criterion(7, "joint connection + mapping design clears the uniform bar", [&] {
        joint = joint_design(p, 2, *profile);
        std::string d = "eps " + fmt(joint->eps_avg) + " (bar 0.5365, aspirational ref 0.5697), " +
                        std::to_string(joint->spec.edges.size()) + " connection edge bundles, " +
                        std::to_string(joint->outer_iterations) + " outer rounds";
        if (joint->eps_avg < 0.5365) return "FAIL " + d;
        return d;
    });

    criterion(8, "invariant property suites", [&] {
        auto groups = level_groups(*profile);
        if (groups.size() != 2) return std::string("FAIL expected two capacity groups");

        // Mapping constraints after repair, 1000 random genomes.
        {
            auto eng = make_engine(11, 0);
            std::uniform_real_distribution<double> u(-0.5, 1.5);
            std::uniform_int_distribution<int> nv(2, 40);
            for (int i = 0; i < 1000; ++i) {
                int v = 2 * nv(eng);  // even so the balanced sum V/2 is reachable
                std::vector<double> f(v);
                for (auto& x : f) x = u(eng);
                Genome g{0, repair_fractions(f)};
                BitMapping map = expand_genome(g, groups);
                if (!validate(map).empty())
                    return "FAIL repaired mapping " + std::to_string(i) + " violates constraints";
            }
        }

        // Message monotonicity in the iteration count and convergence-time
        // monotonicity in the erasure rate, 50 random ensembles.
        {
            auto eng = make_engine(12, 0);
            std::uniform_int_distribution<int> wd(1, 3), bd(1, 3), Ld(4, 8);
            for (int i = 0; i < 50; ++i) {
                SingleChainParams q;
                q.w = wd(eng);
                q.J = q.w + 1;
                q.b_c = 1;
                q.b_v = bd(eng);
                q.K = q.J * q.b_v;
                q.L = Ld(eng);
                Protograph g = build_single_chain(q);
                DEGraph de(g);
                double thr = threshold_scalar(de);
                int prev = 0;
                for (double delta : {0.05, 0.02, 0.01}) {
                    std::vector<double> eps(g.vn_count(), thr - delta);
                    std::vector<std::vector<double>> trace;
                    DEResult r = de.run(eps, {}, &trace);
                    if (!r.converged)
                        return "FAIL ensemble " + std::to_string(i) + " diverged below threshold";
                    for (size_t k = 1; k < trace.size(); ++k) {
                        double mprev = *std::max_element(trace[k - 1].begin(), trace[k - 1].end());
                        double mcur = *std::max_element(trace[k].begin(), trace[k].end());
                        if (mcur > mprev + 1e-12)
                            return "FAIL ensemble " + std::to_string(i) +
                                   ": messages grew at iteration " + std::to_string(k);
                    }
                    if (r.iterations < prev)
                        return "FAIL ensemble " + std::to_string(i) +
                               ": convergence time dropped at a worse erasure rate";
                    prev = r.iterations;
                }
            }
        }

        // Uniform-mapping collapse: effective erasures equal the profile
        // average bit-for-bit, and the evolution is identical.
        {
            BitMapping uni = BitMapping::uniform(profile->levels(), single->vn_count());
            for (double snr : {4.0, 5.0, 6.0}) {
                auto eps = profile->erasures_at(snr);
                double avg = profile->avg_erasure_at(snr);
                auto eff = effective_erasures(uni, eps);
                for (double e : eff)
                    if (e != avg) return std::string("FAIL uniform collapse is not bit-exact");
                DEResult a = run_de(*single, eff);
                DEResult b = run_de(*single, std::vector<double>(single->vn_count(), avg));
                if (a.iterations != b.iterations || a.residuals != b.residuals)
                    return std::string("FAIL scalar and vector evolutions differ");
            }
        }

        // Mean preservation of effective erasures, 200 random mappings.
        {
            auto eng = make_engine(13, 0);
            std::uniform_real_distribution<double> u(-0.5, 1.5), ue(0.0, 1.0);
            for (int i = 0; i < 200; ++i) {
                int v = 2 * std::uniform_int_distribution<int>(2, 30)(eng);
                std::vector<double> f(v);
                for (auto& x : f) x = u(eng);
                BitMapping map = expand_genome({0, repair_fractions(f)}, groups);
                std::vector<double> eps(4);
                // One draw per group, mirroring the two-group structure.
                eps[groups[0][0]] = eps[groups[0][1]] = ue(eng);
                eps[groups[1][0]] = eps[groups[1][1]] = ue(eng);
                double want = (eps[0] + eps[1] + eps[2] + eps[3]) / 4.0;
                auto eff = effective_erasures(map, eps);
                double got = 0;
                for (double e : eff) got += e;
                got /= eff.size();
                if (std::fabs(got - want) > 1e-12)
                    return "FAIL mapping " + std::to_string(i) + " shifts the mean erasure rate";
            }
        }

        // Permutation equivariance of the evolution.
        {
            auto eng = make_engine(14, 0);
            const Protograph& g = *loop;
            std::vector<int> vperm(g.vn_count()), cperm(g.cn_count());
            std::iota(vperm.begin(), vperm.end(), 0);
            std::iota(cperm.begin(), cperm.end(), 0);
            std::shuffle(vperm.begin(), vperm.end(), eng);
            std::shuffle(cperm.begin(), cperm.end(), eng);
            Protograph h(g.cn_count(), g.vn_count());
            for (int c = 0; c < g.cn_count(); ++c)
                for (int v = 0; v < g.vn_count(); ++v)
                    if (int m = g.multiplicity(c, v); m > 0) h.add_edges(cperm[c], vperm[v], m);
            std::vector<double> eps(g.vn_count()), heps(g.vn_count());
            std::uniform_real_distribution<double> ue(0.3, 0.5);
            for (auto& e : eps) e = ue(eng);
            for (int v = 0; v < g.vn_count(); ++v) heps[vperm[v]] = eps[v];
            DEResult a = run_de(g, eps);
            DEResult b = run_de(h, heps);
            if (a.iterations != b.iterations)
                return std::string("FAIL relabeling changed the iteration count");
            for (int v = 0; v < g.vn_count(); ++v)
                if (std::fabs(a.residuals[v] - b.residuals[vperm[v]]) > 1e-12)
                    return std::string("FAIL relabeling changed the residuals");
        }

        // Lifting degree preservation and assignment apportionment.
        {
            const int Q = 40;
            LiftedCode code = lift(*loop, Q, 21);
            std::vector<int> bdeg(code.n, 0), cdeg(code.n_checks, 0);
            for (auto [c, b] : code.edges) {
                ++cdeg[c];
                ++bdeg[b];
            }
            for (int b = 0; b < code.n; ++b)
                if (bdeg[b] != loop->vn_degree(code.origin[b]))
                    return std::string("FAIL lift changed a bit degree");
            for (int c = 0; c < code.n_checks; ++c)
                if (cdeg[c] != loop->cn_degree(c / Q))
                    return std::string("FAIL lift changed a check degree");
            auto eng = make_engine(15, 0);
            std::uniform_real_distribution<double> u(-0.5, 1.5);
            for (int i = 0; i < 10; ++i) {
                std::vector<double> f(loop->vn_count());
                for (auto& x : f) x = u(eng);
                BitMapping map = expand_genome({0, repair_fractions(f)}, groups);
                ChannelAssignment assign = assign_channels(map, Q, 22 + i);
                auto counts = assign.level_counts();
                long per_level = static_cast<long>(loop->vn_count()) * Q / 4;
                for (long c : counts)
                    if (c != per_level) return std::string("FAIL assignment level totals drifted");
                std::vector<std::vector<long>> per_vn(loop->vn_count(), std::vector<long>(4, 0));
                for (int b = 0; b < static_cast<int>(assign.level_of.size()); ++b)
                    ++per_vn[b / Q][assign.level_of[b]];
                for (int v = 0; v < loop->vn_count(); ++v)
                    for (int lv = 0; lv < 4; ++lv)
                        if (std::fabs(per_vn[v][lv] - map.at(lv, v) * Q) > 2.0000001)
                            return std::string("FAIL per-bit apportionment strayed from the row");
            }
        }
        return std::string("mapping repair, evolution monotonicity, uniform collapse, mean "
                           "preservation, relabeling, lifting");
    });

    criterion(9, "desk-scale BER ordering and waterfall gain", [&] {
        if (!joint) return std::string("FAIL no joint design available");
        Protograph designed = build_connected(p, joint->spec);

        SimConfig cfg;
        cfg.ebn0_db = {2.75, 3.0, 3.25, 3.5, 3.75, 4.0, 4.25};
        cfg.max_frames = 600;
        cfg.target_bit_errors = 200;
        cfg.target_frame_errors = 20;  // enough clusters for honest intervals
        cfg.bp_iters = 100;
        cfg.seed = 9;

        auto run_curve = [&](const Protograph& g, const BitMapping& map, int Q) {
            LiftedCode code = lift(g, Q, cfg.seed);
            ChannelAssignment assign = assign_channels(map, Q, cfg.seed);
            return Curve{run_ber(code, assign, cfg), code.n};
        };
        // Same code length everywhere: the single chain has half the nodes,
        // so it gets twice the lift.
        Curve c = run_curve(*single, BitMapping::uniform(4, single->vn_count()), 1000);
        Curve l = run_curve(*loop, BitMapping::uniform(4, loop->vn_count()), 500);
        Curve d = run_curve(designed, joint->mapping, 500);
        const auto& grid = cfg.ebn0_db;

        for (size_t i = 0; i < grid.size(); ++i)
            if (d.ber(i) > l.ber(i) || l.ber(i) > c.ber(i))
                return "FAIL ordering broken at " + fmt(grid[i]) + " dB: designed " +
                       fmt(d.ber(i)) + ", loop " + fmt(l.ber(i)) + ", single " + fmt(c.ber(i));

        auto cross = crossing(c, grid, 1e-4);
        if (!cross)
            return std::string("FAIL the single-chain curve never crosses 1e-4 on the grid");
        double d_at = value_at(d, grid, *cross);
        double factor = 1e-4 / d_at;
        std::string detail = "single-chain 1e-4 crossing at " + fmt(*cross) +
                             " dB, designed <= " + fmt(d_at) + " there (x" + fmt(factor) + ")";
        if (factor < 5.0) return "FAIL " + detail;

        // 95% intervals must separate each better/worse pair wherever the
        // worse curve is measurably failing (its waterfall).
        struct Pair {
            const Curve *better, *worse;
            const char* name;
        };
        for (const Pair& pr : {Pair{&d, &l, "designed<loop"}, Pair{&l, &c, "loop<single"},
                               Pair{&d, &c, "designed<single"}}) {
            int checked = 0;
            for (size_t i = 0; i < grid.size(); ++i) {
                if (pr.worse->recs[i].bit_errors < 10) continue;  // not failing here
                ++checked;
                if (pr.better->upper95(i) >= pr.worse->lower95(i))
                    return "FAIL " + std::string(pr.name) + " intervals overlap at " +
                           fmt(grid[i]) + " dB";
            }
            if (checked == 0)
                return "FAIL no grid point exercises " + std::string(pr.name);
        }
        return detail + ", intervals separated";
    });

    criterion(10, "threshold report is byte-identical across reruns", [&] {
        if (cli_bin.empty())
            return std::string("FAIL CLI path missing (argv[1] or SCBICM_BIN)");
        namespace fs = std::filesystem;
        fs::path dir = fs::temp_directory_path() / "scbicm_acceptance";
        fs::create_directories(dir);
        fs::path a = dir / "report_a.txt", b = dir / "report_b.txt";
        std::string budget = " --quiet --population 16 --generations 30 --top 4 --max-outer 3"
                             " --seed 7";
        for (const fs::path& out : {a, b}) {
            std::string cmd = "'" + cli_bin + "' reproduce table2 --out '" + out.string() + "'" +
                              budget + " > /dev/null 2>&1";
            int st = std::system(cmd.c_str());
            if (st != 0)
                return "FAIL CLI exited with status " + std::to_string(st);
        }
        std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
        std::stringstream sa, sb;
        sa << fa.rdbuf();
        sb << fb.rdbuf();
        if (sa.str().empty() || sa.str() != sb.str())
            return std::string("FAIL reports differ between runs");
        return "two runs, " + std::to_string(sa.str().size()) + " identical bytes";
    });

    std::printf("%d/10 criteria passed\n", 10 - failures);
    return failures == 0 ? 0 : 1;
}
