#include "scbicm/io.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "scbicm/bitmap.hpp"
#include "scbicm/channel.hpp"
#include "scbicm/lifting.hpp"
#include "scbicm/optimizer.hpp"
#include "scbicm/protograph.hpp"

using namespace scbicm;

namespace {

std::string tmp_path(const std::string& name) {
    static const std::string dir = [] {
        auto d = std::filesystem::temp_directory_path() / "scbicm_io_tests";
        std::filesystem::create_directories(d);
        return d.string();
    }();
    return dir + "/" + name;
}

bool same_graph(const Protograph& a, const Protograph& b) {
    if (a.cn_count() != b.cn_count() || a.vn_count() != b.vn_count()) return false;
    for (int c = 0; c < a.cn_count(); ++c)
        for (int v = 0; v < a.vn_count(); ++v)
            if (a.multiplicity(c, v) != b.multiplicity(c, v)) return false;
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("doubles round-trip through their printed form") {
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 12345.6789, 0.50456031322479248, -2.75}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(0.5) == "0.5");
}

TEST_CASE("protograph files round-trip") {
    Protograph g = build_loop_connected({});
    std::string path = tmp_path("graph.json");
    save_protograph(g, path);
    Protograph h = load_protograph(path);
    CHECK(same_graph(g, h));
    CHECK(g.canonical_form() == h.canonical_form());
    for (int c = 0; c < g.cn_count(); ++c) {
        CHECK(g.cn_position(c).chain == h.cn_position(c).chain);
        CHECK(g.cn_position(c).position == h.cn_position(c).position);
        CHECK(g.cn_position(c).replica == h.cn_position(c).replica);
    }
    for (int v = 0; v < g.vn_count(); ++v) {
        CHECK(g.vn_position(v).chain == h.vn_position(v).chain);
        CHECK(g.vn_position(v).position == h.vn_position(v).position);
    }

    CHECK_THROWS_AS(load_protograph(tmp_path("missing.json")), IOError);
    write_text_file(tmp_path("broken.json"), "{ not json");
    CHECK_THROWS_AS(load_protograph(tmp_path("broken.json")), IOError);
}

TEST_CASE("ensemble files build every family") {
    auto build_from = [&](const std::string& text) {
        std::string path = tmp_path("ensemble.json");
        write_text_file(path, text);
        return build_ensemble_file(path);
    };

    SingleChainParams p;
    CHECK(same_graph(build_from(R"({"family": "single"})"), build_single_chain(p)));

    SingleChainParams p4 = p;
    p4.L = 4;
    CHECK(same_graph(build_from(R"({"family": "single", "L": 4})"), build_single_chain(p4)));

    // top-level keys win over nested params
    SingleChainParams p6 = p;
    p6.L = 6;
    CHECK(same_graph(build_from(R"({"family": "single", "params": {"L": 4}, "L": 6})"),
                     build_single_chain(p6)));

    CHECK(same_graph(build_from(R"({"family": "loop"})"), build_loop_connected(p)));
    CHECK(same_graph(build_from(R"({"family": "loop", "M": 3, "connect_positions": [3, 4]})"),
                     build_loop_connected(p, 3)));
    CHECK(same_graph(build_from(R"({"family": "continuous", "chains": 2})"),
                     build_continuous_connected(p)));

    // a custom spec spelled out edge by edge reproduces the loop family
    ConnectionSpec spec = loop_connection_spec(p, 2, {3, 4});
    std::string custom = R"({"family": "custom", "M": 2, "connecting_end": ["right", "right"],
      "edges": [)";
    for (size_t i = 0; i < spec.edges.size(); ++i) {
        const auto& e = spec.edges[i];
        custom += (i ? "," : "") + std::string("{\"source_chain\": ") +
                  std::to_string(e.source_chain) + ", \"cn_slot\": " + std::to_string(e.cn_slot) +
                  ", \"target_chain\": " + std::to_string(e.target_chain) +
                  ", \"target_vn\": " + std::to_string(e.target_vn) +
                  ", \"multiplicity\": " + std::to_string(e.multiplicity) + "}";
    }
    custom += "]}";
    CHECK(same_graph(build_from(custom), build_loop_connected(p)));

    CHECK_THROWS_AS(build_from(R"({"family": "ring"})"), IOError);
    CHECK_THROWS_AS(build_from(R"({"L": 4})"), IOError);
    CHECK_THROWS_AS(build_ensemble_file(tmp_path("nowhere.json")), IOError);
}

TEST_CASE("profile files round-trip bit-exactly") {
    ErasureProfile p =
        build_erasure_profile(LabeledConstellation::qam16_gray(), -2.0, 2.0, 0.05);
    std::string path = tmp_path("profile.txt");
    save_profile(p, path);
    ErasureProfile q = load_profile(path);

    REQUIRE(q.levels() == p.levels());
    REQUIRE(q.samples().size() == p.samples().size());
    for (size_t k = 0; k < p.samples().size(); ++k) {
        CHECK(q.samples()[k].snr_db == p.samples()[k].snr_db);
        CHECK(q.samples()[k].eps_avg == p.samples()[k].eps_avg);
        for (int i = 0; i < p.levels(); ++i)
            CHECK(q.samples()[k].eps[i] == p.samples()[k].eps[i]);
    }
    for (double snr : {-1.3, 0.0, 1.7})
        for (int i = 0; i < p.levels(); ++i)
            CHECK(q.erasures_at(snr)[i] == p.erasures_at(snr)[i]);
}

TEST_CASE("profile files reject inconsistent rows") {
    CHECK_THROWS_AS(load_profile(tmp_path("no_such_profile.txt")), IOError);

    // eps_avg column must match the level values
    write_text_file(tmp_path("bad_avg.txt"),
                    "levels 2\n0 0.5 0.5 0.6\n1 0.4 0.4 0.4\n");
    CHECK_THROWS_AS(load_profile(tmp_path("bad_avg.txt")), IOError);

    write_text_file(tmp_path("no_header.txt"), "0 0.5 0.5 0.5\n");
    CHECK_THROWS_AS(load_profile(tmp_path("no_header.txt")), IOError);

    write_text_file(tmp_path("short_row.txt"), "levels 2\n0 0.5\n");
    CHECK_THROWS_AS(load_profile(tmp_path("short_row.txt")), IOError);

    write_text_file(tmp_path("one_row.txt"), "levels 2\n0 0.5 0.5 0.5\n");
    CHECK_THROWS_AS(load_profile(tmp_path("one_row.txt")), IOError);
}

TEST_CASE("bitmap files round-trip in both formats") {
    BitMapping map = expand_genome(Genome{0, repair_fractions({0.9, 0.1, 0.7, 0.3, 0.5, 0.5})},
                                   {{0, 2}, {1, 3}});
    std::string path = tmp_path("map.txt");
    save_bitmap(map, path);
    BitMapping back = load_bitmap(path);
    REQUIRE(back.levels() == map.levels());
    REQUIRE(back.vns() == map.vns());
    for (int i = 0; i < map.levels(); ++i)
        for (int j = 0; j < map.vns(); ++j) CHECK(back.at(i, j) == map.at(i, j));

    write_text_file(tmp_path("grouped.txt"),
                    "m 4\nV 4\ngroup 0 2\ngroup 1 3\nmap 1-2 0.8 0.2\nmap 3-4 0.2 0.8\n");
    BitMapping grouped = load_bitmap(tmp_path("grouped.txt"));
    CHECK(grouped.at(0, 0) == 0.8 / 2.0);
    CHECK(grouped.at(1, 0) == 0.2 / 2.0);
    CHECK(grouped.at(0, 3) == 0.2 / 2.0);
    CHECK(grouped.at(3, 3) == 0.8 / 2.0);

    write_text_file(tmp_path("bad_grouped.txt"),
                    "m 4\nV 4\ngroup 0 2\ngroup 1 3\nmap 1-4 0.8 0.1\n");
    CHECK_THROWS_AS(load_bitmap(tmp_path("bad_grouped.txt")), IOError);
    write_text_file(tmp_path("bad_matrix.txt"), "m 2\nV 2\na 0.5 0.5\n");
    CHECK_THROWS_AS(load_bitmap(tmp_path("bad_matrix.txt")), IOError);
    write_text_file(tmp_path("odd_word.txt"), "m 2\nV 2\nq 1 2\n");
    CHECK_THROWS_AS(load_bitmap(tmp_path("odd_word.txt")), IOError);
}

TEST_CASE("lifted code files round-trip") {
    SingleChainParams p;
    p.L = 3;
    LiftedCode code = lift(build_single_chain(p), 8, 21);
    std::string path = tmp_path("code.txt");
    save_lifted(code, path);
    LiftedCode back = load_lifted(path);
    CHECK(back.n == code.n);
    CHECK(back.n_checks == code.n_checks);
    CHECK(back.lift_factor == code.lift_factor);
    CHECK(back.seed == code.seed);
    CHECK(back.edges == code.edges);
    CHECK(back.origin == code.origin);

    write_text_file(tmp_path("bad_q.txt"), "n 10\nchecks 4\nQ 3\ne 0 0\n");
    CHECK_THROWS_AS(load_lifted(tmp_path("bad_q.txt")), IOError);
    write_text_file(tmp_path("no_q.txt"), "n 10\nchecks 4\ne 0 0\n");
    CHECK_THROWS_AS(load_lifted(tmp_path("no_q.txt")), IOError);
}

TEST_CASE("assignment files round-trip through run-length form") {
    ChannelAssignment a = assign_channels(BitMapping::uniform(4, 6), 8, 3);
    std::string path = tmp_path("assign.txt");
    save_assignment(a, path);
    ChannelAssignment back = load_assignment(path);
    CHECK(back.levels == a.levels);
    CHECK(back.level_of == a.level_of);

    write_text_file(tmp_path("bad_run.txt"), "levels 2\nn 4\nr 0 2\nr 5 2\n");
    CHECK_THROWS_AS(load_assignment(tmp_path("bad_run.txt")), IOError);
    write_text_file(tmp_path("short_run.txt"), "levels 2\nn 4\nr 0 2\n");
    CHECK_THROWS_AS(load_assignment(tmp_path("short_run.txt")), IOError);
}

TEST_CASE("ber csv layout is stable") {
    BERRecord rec;
    rec.ebn0_db = 2.5;
    rec.snr_db = 4.5;
    rec.frames = 2;
    rec.bit_errors = 16;
    rec.frame_errors = 2;
    rec.sum_sq_frame_bit_errors = 128.0;  // equals f * mean^2, so the CI is 0
    rec.avg_bp_iterations = 3.5;
    std::string path = tmp_path("ber.csv");
    save_ber_csv({rec}, 128, path);
    CHECK(read_text_file(path) ==
          "ebn0_db,snr_db,frames,bit_errors,frame_errors,ber,fer,ber_ci95,avg_bp_iters,"
          "sum_sq_frame_bit_errors\n"
          "2.5,4.5,2,16,2,0.0625,1,0,3.5,128\n");
}

TEST_CASE("text helpers surface filesystem errors") {
    std::string path = tmp_path("note.txt");
    write_text_file(path, "hello\n");
    CHECK(read_text_file(path) == "hello\n");
    CHECK_THROWS_AS(read_text_file(tmp_path("absent.txt")), IOError);
}

TEST_SUITE_END();
