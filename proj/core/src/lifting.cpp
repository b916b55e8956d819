#include "scbicm/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "scbicm/rng.hpp"

namespace scbicm {

LiftedCode lift(const Protograph& g, int Q, std::uint64_t seed) {
    if (Q < 2) throw std::invalid_argument("lift factor must be at least 2");
    LiftedCode code;
    code.n = g.vn_count() * Q;
    code.n_checks = g.cn_count() * Q;
    code.lift_factor = Q;
    code.seed = seed;
    code.origin.resize(code.n);
    for (int b = 0; b < code.n; ++b) code.origin[b] = b / Q;

    for (int c = 0; c < g.cn_count(); ++c)
        for (int v = 0; v < g.vn_count(); ++v) {
            int mu = g.multiplicity(c, v);
            if (mu == 0) continue;
            auto rng = make_engine(seed, (static_cast<std::uint64_t>(c) << 20) | static_cast<std::uint64_t>(v));
            std::uniform_int_distribution<int> draw(0, Q - 1);
            std::vector<int> shifts;
            int attempts = 0;
            while (static_cast<int>(shifts.size()) < mu) {
                if (++attempts > 1000 * mu)
                    throw std::runtime_error("lift factor too small for the parallel edges here");
                int s = draw(rng);
                bool ok = true;
                for (int prev : shifts) {
                    int d = ((s - prev) % Q + Q) % Q;
                    if (d == 0 || (2 * d) % Q == 0) {
                        ok = false;
                        break;
                    }
                }
                if (ok) shifts.push_back(s);
            }
            for (int s : shifts)
                for (int k = 0; k < Q; ++k)
                    code.edges.push_back({c * Q + k, v * Q + (k + s) % Q});
        }
    std::sort(code.edges.begin(), code.edges.end());
    return code;
}

std::vector<long> ChannelAssignment::level_counts() const {
    std::vector<long> out(levels, 0);
    for (std::uint8_t lvl : level_of) ++out[lvl];
    return out;
}

ChannelAssignment assign_channels(const BitMapping& map, int Q, std::uint64_t seed) {
    const int V = map.vns(), m = map.levels();
    const long n = static_cast<long>(V) * Q;
    if (n % m != 0)
        throw std::invalid_argument("code length must divide evenly across the levels");
    const long per_level = n / m;

    // per-VN integer apportionment by largest remainder
    std::vector<std::vector<int>> counts(V, std::vector<int>(m, 0));
    for (int j = 0; j < V; ++j) {
        std::vector<double> frac(m);
        int used = 0;
        for (int i = 0; i < m; ++i) {
            double want = map.at(i, j) * Q;
            counts[j][i] = static_cast<int>(std::floor(want));
            frac[i] = want - counts[j][i];
            used += counts[j][i];
        }
        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return frac[a] > frac[b]; });
        for (int k = 0; used < Q; ++k) {
            ++counts[j][order[k % m]];
            ++used;
        }
    }

    // global repair: move single bits between levels, preferring the VNs
    // where the integer counts already deviate most from the fractional target
    std::vector<long> totals(m, 0);
    for (int j = 0; j < V; ++j)
        for (int i = 0; i < m; ++i) totals[i] += counts[j][i];
    auto deviation = [&](int j, int i) {
        return static_cast<double>(counts[j][i]) - map.at(i, j) * Q;
    };
    for (int guard = 0; guard < 16 * m * V; ++guard) {
        int over = -1, under = -1;
        for (int i = 0; i < m; ++i) {
            if (totals[i] > per_level && (over < 0 || totals[i] > totals[over])) over = i;
            if (totals[i] < per_level && (under < 0 || totals[i] < totals[under])) under = i;
        }
        if (over < 0 && under < 0) break;
        if (over < 0 || under < 0)
            throw std::runtime_error("level totals inconsistent during repair");
        int pick = -1;
        double best = 0.0;
        for (int j = 0; j < V; ++j) {
            if (counts[j][over] == 0) continue;
            double gain = deviation(j, over) - deviation(j, under);
            if (pick < 0 || gain > best) {
                pick = j;
                best = gain;
            }
        }
        if (pick < 0) throw std::runtime_error("channel repair ran out of movable bits");
        --counts[pick][over];
        ++counts[pick][under];
        --totals[over];
        ++totals[under];
    }

    ChannelAssignment out;
    out.levels = m;
    out.level_of.resize(n);
    for (int j = 0; j < V; ++j) {
        std::vector<std::uint8_t> slots;
        slots.reserve(Q);
        for (int i = 0; i < m; ++i)
            slots.insert(slots.end(), counts[j][i], static_cast<std::uint8_t>(i));
        auto rng = make_engine(seed, 0xa55160000ULL + j);
        std::shuffle(slots.begin(), slots.end(), rng);
        std::copy(slots.begin(), slots.end(), out.level_of.begin() + static_cast<long>(j) * Q);
    }
    return out;
}

}  // namespace scbicm
