#include "scbicm/lifting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "scbicm/bitmap.hpp"
#include "scbicm/optimizer.hpp"
#include "scbicm/protograph.hpp"

using namespace scbicm;

namespace {

std::vector<int> bit_degrees(const LiftedCode& code) {
    std::vector<int> d(code.n, 0);
    for (auto [c, b] : code.edges) ++d[b];
    return d;
}

std::vector<int> check_degrees(const LiftedCode& code) {
    std::vector<int> d(code.n_checks, 0);
    for (auto [c, b] : code.edges) ++d[c];
    return d;
}

}  // namespace

TEST_SUITE_BEGIN("lifting");

TEST_CASE("full-size code keeps the protograph shape") {
    Protograph g = build_single_chain({});
    const int Q = 4000;
    LiftedCode code = lift(g, Q, 11);

    CHECK(code.n == 80000);
    CHECK(code.n_checks == 48000);
    CHECK(code.lift_factor == Q);
    CHECK(code.design_rate() == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(static_cast<int>(code.edges.size()) == g.edge_count() * Q);

    auto bd = bit_degrees(code);
    for (int b = 0; b < code.n; ++b) CHECK(bd[b] == g.vn_degree(code.origin[b]));
    auto cd = check_degrees(code);
    for (int c = 0; c < code.n_checks; ++c) CHECK(cd[c] == g.cn_degree(c / Q));

    // origin partitions the bits into contiguous VN blocks
    for (int b = 0; b < code.n; ++b) CHECK(code.origin[b] == b / Q);

    CHECK(std::is_sorted(code.edges.begin(), code.edges.end()));
    CHECK(std::adjacent_find(code.edges.begin(), code.edges.end()) == code.edges.end());
}

TEST_CASE("every circulant is a clean cyclic shift") {
    SingleChainParams p;
    p.L = 3;
    Protograph g = build_single_chain(p);
    const int Q = 8;
    LiftedCode code = lift(g, Q, 3);

    std::set<std::pair<int, int>> present(code.edges.begin(), code.edges.end());
    for (int c = 0; c < g.cn_count(); ++c)
        for (int v = 0; v < g.vn_count(); ++v) {
            int mu = g.multiplicity(c, v);
            // shifts read off the first check row of the block
            std::vector<int> shifts;
            for (int s = 0; s < Q; ++s)
                if (present.count({c * Q, v * Q + s})) shifts.push_back(s);
            REQUIRE(static_cast<int>(shifts.size()) == mu);
            for (size_t a = 0; a < shifts.size(); ++a)
                for (size_t b = a + 1; b < shifts.size(); ++b) {
                    int d = ((shifts[a] - shifts[b]) % Q + Q) % Q;
                    CHECK(d != 0);
                    CHECK((2 * d) % Q != 0);
                }
            for (int k = 0; k < Q; ++k)
                for (int s : shifts) CHECK(present.count({c * Q + k, v * Q + (k + s) % Q}) == 1u);
        }
}

TEST_CASE("lift factor limits") {
    Protograph toy(1, 1);
    toy.add_edges(0, 0, 3);

    CHECK_THROWS_AS(lift(toy, 1, 5), std::invalid_argument);
    // Q = 2 leaves no shift pair with 2*(s1-s2) != 0 (mod Q)
    CHECK_THROWS_AS(lift(toy, 2, 5), std::runtime_error);

    LiftedCode ok = lift(toy, 3, 5);
    CHECK(ok.n == 3);
    CHECK(ok.edges.size() == 9u);
    for (int d : bit_degrees(ok)) CHECK(d == 3);
    for (int d : check_degrees(ok)) CHECK(d == 3);
}

TEST_CASE("lifting is deterministic in the seed") {
    SingleChainParams p;
    p.L = 3;
    Protograph g = build_single_chain(p);
    LiftedCode a = lift(g, 16, 77);
    LiftedCode b = lift(g, 16, 77);
    CHECK(a.edges == b.edges);
    LiftedCode c = lift(g, 16, 78);
    CHECK(a.edges != c.edges);
}

TEST_CASE("uniform assignment splits every block evenly") {
    BitMapping uni = BitMapping::uniform(4, 40);
    const int Q = 2000;
    ChannelAssignment asg = assign_channels(uni, Q, 9);

    REQUIRE(static_cast<long>(asg.level_of.size()) == 80000L);
    auto totals = asg.level_counts();
    for (long t : totals) CHECK(t == 20000L);

    for (int j = 0; j < 40; ++j) {
        std::vector<int> count(4, 0);
        for (int k = 0; k < Q; ++k) ++count[asg.level_of[static_cast<long>(j) * Q + k]];
        for (int i = 0; i < 4; ++i) CHECK(count[i] == 500);
    }
}

TEST_CASE("fractional rows resolve by largest remainder") {
    BitMapping map(2, 2);
    map.set(0, 0, 0.9920);
    map.set(1, 0, 0.0080);
    map.set(0, 1, 0.0080);
    map.set(1, 1, 0.9920);
    ChannelAssignment asg = assign_channels(map, 1000, 4);

    std::vector<std::vector<int>> count(2, std::vector<int>(2, 0));
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 1000; ++k) ++count[j][asg.level_of[j * 1000 + k]];
    CHECK(count[0][0] == 992);
    CHECK(count[0][1] == 8);
    CHECK(count[1][0] == 8);
    CHECK(count[1][1] == 992);
}

TEST_CASE("repair balances arbitrary pair-share mappings") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int V = 20, Q = 50;
    std::vector<std::vector<int>> groups{{0, 2}, {1, 3}};

    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> f(V);
        for (double& x : f) x = U(rng);
        BitMapping map = expand_genome(Genome{0, repair_fractions(f)}, groups);
        ChannelAssignment asg = assign_channels(map, Q, 100 + trial);

        auto totals = asg.level_counts();
        for (long t : totals) CHECK(t == V * Q / 4);

        for (int j = 0; j < V; ++j) {
            std::vector<int> count(4, 0);
            for (int k = 0; k < Q; ++k) ++count[asg.level_of[static_cast<long>(j) * Q + k]];
            for (int i = 0; i < 4; ++i)
                CHECK(std::abs(count[i] - map.at(i, j) * Q) <= 2.0000001);
        }
    }
}

TEST_CASE("assignment determinism and input checks") {
    BitMapping uni = BitMapping::uniform(4, 6);
    ChannelAssignment a = assign_channels(uni, 8, 13);
    ChannelAssignment b = assign_channels(uni, 8, 13);
    CHECK(a.level_of == b.level_of);
    ChannelAssignment c = assign_channels(uni, 8, 14);
    CHECK(a.level_of != c.level_of);

    // n = 10 bits cannot split across 4 levels
    CHECK_THROWS_AS(assign_channels(BitMapping::uniform(4, 2), 5, 1), std::invalid_argument);
}

TEST_SUITE_END();
