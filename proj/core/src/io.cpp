#include "scbicm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace scbicm {

using json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IOError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IOError("cannot write " + path);
    out << content;
    if (!out) throw IOError("short write to " + path);
}

namespace {

json position_to_json(const NodePosition& p) {
    return json::array({p.chain, p.position, p.replica});
}

NodePosition position_from_json(const json& j) {
    return {j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>()};
}

}  // namespace

void save_protograph(const Protograph& g, const std::string& path) {
    json j;
    j["cn_count"] = g.cn_count();
    j["vn_count"] = g.vn_count();
    json cpos = json::array(), vpos = json::array(), edges = json::array();
    for (int c = 0; c < g.cn_count(); ++c) cpos.push_back(position_to_json(g.cn_position(c)));
    for (int v = 0; v < g.vn_count(); ++v) vpos.push_back(position_to_json(g.vn_position(v)));
    for (int c = 0; c < g.cn_count(); ++c)
        for (int v = 0; v < g.vn_count(); ++v)
            if (int m = g.multiplicity(c, v); m > 0) edges.push_back(json::array({c, v, m}));
    j["cn_positions"] = std::move(cpos);
    j["vn_positions"] = std::move(vpos);
    j["edges"] = std::move(edges);
    write_text_file(path, j.dump(2) + "\n");
}

Protograph load_protograph(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw IOError(path + ": " + e.what());
    }
    try {
        Protograph g(j.at("cn_count").get<int>(), j.at("vn_count").get<int>());
        const auto& cpos = j.at("cn_positions");
        const auto& vpos = j.at("vn_positions");
        for (int c = 0; c < g.cn_count(); ++c) g.cn_position(c) = position_from_json(cpos.at(c));
        for (int v = 0; v < g.vn_count(); ++v) g.vn_position(v) = position_from_json(vpos.at(v));
        for (const auto& e : j.at("edges"))
            g.add_edges(e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>());
        return g;
    } catch (const json::exception& e) {
        throw IOError(path + ": " + e.what());
    }
}

namespace {

SingleChainParams params_from_json(const json& j) {
    SingleChainParams p;
    p.J = j.value("J", p.J);
    p.K = j.value("K", p.K);
    p.L = j.value("L", p.L);
    p.w = j.value("w", p.w);
    p.b_c = j.value("b_c", p.b_c);
    p.b_v = j.value("b_v", p.b_v);
    return p;
}

ChainEnd end_from_string(const std::string& s) {
    if (s == "left") return ChainEnd::Left;
    if (s == "right") return ChainEnd::Right;
    throw IOError("connecting_end must be 'left' or 'right', got '" + s + "'");
}

}  // namespace

Protograph build_ensemble_file(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw IOError(path + ": " + e.what());
    }
    std::string family;
    try {
        family = j.at("family").get<std::string>();
        // Chain parameters live at the top level; a nested "params" object is
        // accepted too and top-level keys win.
        SingleChainParams p = params_from_json(j.value("params", json::object()));
        p.J = j.value("J", p.J);
        p.K = j.value("K", p.K);
        p.L = j.value("L", p.L);
        p.w = j.value("w", p.w);
        p.b_c = j.value("b_c", p.b_c);
        p.b_v = j.value("b_v", p.b_v);
        int chains = j.value("M", j.value("chains", 2));
        if (family == "single") return build_single_chain(p);
        if (family == "loop") {
            std::vector<int> pos = {3, 4};
            if (j.contains("connect_positions")) pos = j["connect_positions"].get<std::vector<int>>();
            return build_loop_connected(p, chains, pos);
        }
        if (family == "continuous") return build_continuous_connected(p, chains);
        if (family == "custom") {
            ConnectionSpec spec;
            spec.num_chains = chains;
            for (const auto& e : j.value("connecting_end", json::array()))
                spec.connecting_end.push_back(end_from_string(e.get<std::string>()));
            if (spec.connecting_end.empty())
                spec.connecting_end.assign(chains, ChainEnd::Right);
            for (const auto& e : j.value("edges", json::array())) {
                ConnectionEdge ce;
                ce.source_chain = e.at("source_chain").get<int>();
                ce.cn_slot = e.at("cn_slot").get<int>();
                ce.target_chain = e.at("target_chain").get<int>();
                ce.target_vn = e.at("target_vn").get<int>();
                ce.multiplicity = e.value("multiplicity", 1);
                spec.edges.push_back(ce);
            }
            return build_connected(p, spec);
        }
    } catch (const json::exception& e) {
        throw IOError(path + ": " + e.what());
    }
    throw IOError(path + ": unknown ensemble family '" + family + "'");
}

void save_profile(const ErasureProfile& p, const std::string& path) {
    std::ostringstream os;
    os << "levels " << p.levels() << "\n";
    os << "# snr_db";
    for (int i = 0; i < p.levels(); ++i) os << " eps_" << i;
    os << " eps_avg\n";
    for (const auto& s : p.samples()) {
        os << format_double(s.snr_db);
        for (double e : s.eps) os << " " << format_double(e);
        os << " " << format_double(s.eps_avg) << "\n";
    }
    write_text_file(path, os.str());
}

ErasureProfile load_profile(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string line;
    int levels = -1;
    std::vector<ErasureProfile::Sample> samples;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        if (first == "levels") {
            if (!(ls >> levels) || levels < 1) throw IOError(path + ": bad levels header");
            continue;
        }
        if (levels < 1) throw IOError(path + ": data before the levels header");
        ErasureProfile::Sample s;
        try {
            s.snr_db = std::stod(first);
        } catch (const std::exception&) {
            throw IOError(path + ": unparseable SNR '" + first + "'");
        }
        s.eps.resize(levels);
        for (int i = 0; i < levels; ++i)
            if (!(ls >> s.eps[i])) throw IOError(path + ": truncated profile row");
        double stored_avg;
        if (!(ls >> stored_avg)) throw IOError(path + ": missing eps_avg column");
        const double inv_m = 1.0 / levels;
        double acc = 0.0;
        for (int i = 0; i < levels; ++i) acc += s.eps[i] * inv_m;
        if (std::abs(acc - stored_avg) > 1e-9)
            throw IOError(path + ": eps_avg column disagrees with the level values");
        s.eps_avg = acc;
        samples.push_back(std::move(s));
    }
    if (levels < 1 || samples.size() < 2) throw IOError(path + ": empty profile");
    try {
        return ErasureProfile(std::move(samples), levels);
    } catch (const std::exception& e) {
        throw IOError(path + ": " + e.what());
    }
}

void save_bitmap(const BitMapping& map, const std::string& path) {
    std::ostringstream os;
    os << "m " << map.levels() << "\n"
       << "V " << map.vns() << "\n";
    for (int i = 0; i < map.levels(); ++i) {
        os << "a";
        for (int j = 0; j < map.vns(); ++j) os << " " << format_double(map.at(i, j));
        os << "\n";
    }
    write_text_file(path, os.str());
}

BitMapping load_bitmap(const std::string& path) {
    std::string text = read_text_file(path);
    // grouped tables carry `group`/`map` directives, full matrices carry `a` rows
    {
        std::istringstream sniff(text);
        std::string line;
        while (std::getline(sniff, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            std::istringstream ls(line);
            std::string word;
            if (!(ls >> word)) continue;
            if (word == "group" || word == "map") {
                try {
                    return parse_grouped_table(text);
                } catch (const std::exception& e) {
                    throw IOError(path + ": " + e.what());
                }
            }
            if (word == "a") break;
        }
    }
    std::istringstream in(text);
    std::string line;
    int m = -1, V = -1, row = 0;
    BitMapping map(1, 1);
    bool sized = false;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "m") {
            if (!(ls >> m)) throw IOError(path + ": bad m header");
        } else if (word == "V") {
            if (!(ls >> V)) throw IOError(path + ": bad V header");
        } else if (word == "a") {
            if (m < 1 || V < 1) throw IOError(path + ": matrix row before m/V headers");
            if (!sized) {
                map = BitMapping(m, V);
                sized = true;
            }
            if (row >= m) throw IOError(path + ": too many matrix rows");
            for (int j = 0; j < V; ++j) {
                double v;
                if (!(ls >> v)) throw IOError(path + ": truncated matrix row");
                map.set(row, j, v);
            }
            ++row;
        } else {
            throw IOError(path + ": unknown directive '" + word + "'");
        }
    }
    if (!sized || row != m) throw IOError(path + ": expected " + std::to_string(m) + " matrix rows");
    return map;
}

void save_lifted(const LiftedCode& code, const std::string& path) {
    std::ostringstream os;
    os << "n " << code.n << "\n"
       << "checks " << code.n_checks << "\n"
       << "Q " << code.lift_factor << "\n"
       << "seed " << code.seed << "\n";
    for (const auto& [c, b] : code.edges) os << "e " << c << " " << b << "\n";
    write_text_file(path, os.str());
}

LiftedCode load_lifted(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string word;
    LiftedCode code;
    bool have_n = false, have_checks = false, have_q = false;
    while (in >> word) {
        if (word == "n") {
            in >> code.n;
            have_n = true;
        } else if (word == "checks") {
            in >> code.n_checks;
            have_checks = true;
        } else if (word == "Q") {
            in >> code.lift_factor;
            have_q = true;
        } else if (word == "seed") {
            in >> code.seed;
        } else if (word == "e") {
            int c, b;
            if (!(in >> c >> b)) throw IOError(path + ": truncated edge line");
            code.edges.push_back({c, b});
        } else {
            throw IOError(path + ": unknown directive '" + word + "'");
        }
        if (!in) throw IOError(path + ": parse failure near '" + word + "'");
    }
    if (!have_n || !have_checks || !have_q) throw IOError(path + ": missing code headers");
    if (code.lift_factor < 1 || code.n % code.lift_factor != 0)
        throw IOError(path + ": lift factor does not divide the code length");
    code.origin.resize(code.n);
    for (int b = 0; b < code.n; ++b) code.origin[b] = b / code.lift_factor;
    std::sort(code.edges.begin(), code.edges.end());
    return code;
}

void save_assignment(const ChannelAssignment& a, const std::string& path) {
    std::ostringstream os;
    os << "levels " << a.levels << "\n"
       << "n " << a.level_of.size() << "\n";
    size_t i = 0;
    while (i < a.level_of.size()) {
        size_t j = i;
        while (j < a.level_of.size() && a.level_of[j] == a.level_of[i]) ++j;
        os << "r " << static_cast<int>(a.level_of[i]) << " " << (j - i) << "\n";
        i = j;
    }
    write_text_file(path, os.str());
}

ChannelAssignment load_assignment(const std::string& path) {
    std::istringstream in(read_text_file(path));
    std::string word;
    ChannelAssignment a;
    long n = -1;
    while (in >> word) {
        if (word == "levels") {
            in >> a.levels;
        } else if (word == "n") {
            in >> n;
        } else if (word == "r") {
            int lvl;
            long count;
            if (!(in >> lvl >> count)) throw IOError(path + ": truncated run line");
            if (lvl < 0 || lvl >= a.levels) throw IOError(path + ": run level out of range");
            a.level_of.insert(a.level_of.end(), count, static_cast<std::uint8_t>(lvl));
        } else {
            throw IOError(path + ": unknown directive '" + word + "'");
        }
        if (!in) throw IOError(path + ": parse failure near '" + word + "'");
    }
    if (a.levels < 1 || n < 0 || static_cast<long>(a.level_of.size()) != n)
        throw IOError(path + ": run lengths disagree with the declared size");
    return a;
}

void save_ber_csv(const std::vector<BERRecord>& records, long code_bits, const std::string& path) {
    std::ostringstream os;
    os << "ebn0_db,snr_db,frames,bit_errors,frame_errors,ber,fer,ber_ci95,avg_bp_iters,"
          "sum_sq_frame_bit_errors\n";
    for (const auto& r : records) {
        os << format_double(r.ebn0_db) << "," << format_double(r.snr_db) << "," << r.frames << ","
           << r.bit_errors << "," << r.frame_errors << "," << format_double(r.ber(code_bits)) << ","
           << format_double(r.fer()) << "," << format_double(r.ber_ci95(code_bits)) << ","
           << format_double(r.avg_bp_iterations) << "," << format_double(r.sum_sq_frame_bit_errors)
           << "\n";
    }
    write_text_file(path, os.str());
}

}  // namespace scbicm
