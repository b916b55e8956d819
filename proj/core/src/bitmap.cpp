#include "scbicm/bitmap.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace scbicm {

BitMapping::BitMapping(int levels, int vns, double fill) : levels_(levels), vns_(vns) {
    if (levels < 1 || vns < 1) throw std::invalid_argument("mapping needs positive dimensions");
    a_.assign(static_cast<size_t>(levels) * vns, fill);
}

BitMapping BitMapping::uniform(int levels, int vns) {
    return BitMapping(levels, vns, 1.0 / levels);
}

std::string MappingViolation::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::ColumnSum:
            os << "column " << vn << " sums off by " << magnitude;
            break;
        case Kind::RowSum:
            os << "row " << level << " sums off by " << magnitude;
            break;
        case Kind::Range:
            os << "entry (" << level << ", " << vn << ") outside [0, 1] by " << magnitude;
            break;
    }
    return os.str();
}

std::vector<MappingViolation> validate(const BitMapping& map, double column_tol, double row_tol) {
    std::vector<MappingViolation> out;
    for (int i = 0; i < map.levels(); ++i)
        for (int j = 0; j < map.vns(); ++j) {
            double a = map.at(i, j);
            if (a < 0.0 || a > 1.0)
                out.push_back({MappingViolation::Kind::Range, i, j,
                               a < 0.0 ? -a : a - 1.0});
        }
    for (int j = 0; j < map.vns(); ++j) {
        double sum = 0.0;
        for (int i = 0; i < map.levels(); ++i) sum += map.at(i, j);
        if (std::abs(sum - 1.0) > column_tol)
            out.push_back({MappingViolation::Kind::ColumnSum, -1, j, sum - 1.0});
    }
    const double row_target = static_cast<double>(map.vns()) / map.levels();
    for (int i = 0; i < map.levels(); ++i) {
        double sum = 0.0;
        for (int j = 0; j < map.vns(); ++j) sum += map.at(i, j);
        if (std::abs(sum - row_target) > row_tol)
            out.push_back({MappingViolation::Kind::RowSum, i, -1, sum - row_target});
    }
    return out;
}

std::vector<double> effective_erasures(const BitMapping& map, const std::vector<double>& eps) {
    if (static_cast<int>(eps.size()) != map.levels())
        throw std::invalid_argument("erasure vector does not match the mapping levels");
    std::vector<double> out(map.vns());
    for (int j = 0; j < map.vns(); ++j) {
        double acc = 0.0;
        for (int i = 0; i < map.levels(); ++i) acc += eps[i] * map.at(i, j);
        out[j] = acc;
    }
    return out;
}

std::vector<std::vector<int>> level_groups(const ErasureProfile& profile, double tol) {
    std::vector<std::vector<int>> groups;
    for (int i = 0; i < profile.levels(); ++i) {
        bool placed = false;
        for (auto& g : groups) {
            int rep = g.front();
            bool same = true;
            for (const auto& s : profile.samples())
                if (std::abs(s.eps[i] - s.eps[rep]) > tol) {
                    same = false;
                    break;
                }
            if (same) {
                g.push_back(i);
                placed = true;
                break;
            }
        }
        if (!placed) groups.push_back({i});
    }
    return groups;
}

namespace {

std::pair<int, int> parse_range(const std::string& token) {
    auto dash = token.find('-');
    if (dash == std::string::npos) {
        int v = std::stoi(token);
        return {v, v};
    }
    int a = std::stoi(token.substr(0, dash));
    int b = std::stoi(token.substr(dash + 1));
    return {a, b};
}

}  // namespace

BitMapping parse_grouped_table(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int m = -1, V = -1;
    std::vector<std::vector<int>> groups;
    struct Row {
        int lo, hi;
        std::vector<double> fracs;
    };
    std::vector<Row> rows;
    int lineno = 0;
    auto fail = [&](const std::string& what) {
        throw std::runtime_error("grouped mapping line " + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word)) continue;
        if (word == "m") {
            if (!(ls >> m) || m < 1) fail("bad level count");
        } else if (word == "V") {
            if (!(ls >> V) || V < 1) fail("bad VN count");
        } else if (word == "group") {
            std::vector<int> g;
            int lvl;
            while (ls >> lvl) g.push_back(lvl);
            if (g.empty()) fail("empty group");
            groups.push_back(std::move(g));
        } else if (word == "map") {
            std::string range;
            if (!(ls >> range)) fail("missing VN range");
            Row row{};
            try {
                auto [lo, hi] = parse_range(range);
                row.lo = lo;
                row.hi = hi;
            } catch (const std::exception&) {
                fail("unparseable VN range '" + range + "'");
            }
            double f;
            while (ls >> f) row.fracs.push_back(f);
            rows.push_back(std::move(row));
        } else {
            fail("unknown directive '" + word + "'");
        }
    }
    lineno = 0;
    if (m < 1 || V < 1) throw std::runtime_error("grouped mapping: missing m or V header");
    if (groups.empty()) throw std::runtime_error("grouped mapping: no group lines");
    std::vector<int> seen_level(m, 0);
    for (const auto& g : groups)
        for (int lvl : g) {
            if (lvl < 0 || lvl >= m) throw std::runtime_error("grouped mapping: level out of range");
            if (seen_level[lvl]++) throw std::runtime_error("grouped mapping: level listed twice");
        }
    for (int lvl = 0; lvl < m; ++lvl)
        if (!seen_level[lvl]) throw std::runtime_error("grouped mapping: level missing from groups");

    BitMapping map(m, V);
    std::vector<int> covered(V, 0);
    for (const auto& row : rows) {
        if (row.lo < 1 || row.hi > V || row.lo > row.hi)
            throw std::runtime_error("grouped mapping: VN range outside 1.." + std::to_string(V));
        if (row.fracs.size() != groups.size())
            throw std::runtime_error("grouped mapping: expected one fraction per group");
        double sum = 0.0;
        for (double f : row.fracs) sum += f;
        if (std::abs(sum - 1.0) > 1e-3)
            throw std::runtime_error("grouped mapping: fractions do not sum to 1");
        for (int j = row.lo; j <= row.hi; ++j) {
            if (covered[j - 1]++)
                throw std::runtime_error("grouped mapping: VN " + std::to_string(j) + " covered twice");
            for (size_t g = 0; g < groups.size(); ++g) {
                double share = row.fracs[g] / groups[g].size();
                for (int lvl : groups[g]) map.set(lvl, j - 1, share);
            }
        }
    }
    for (int j = 0; j < V; ++j)
        if (!covered[j])
            throw std::runtime_error("grouped mapping: VN " + std::to_string(j + 1) + " not covered");
    return map;
}

}  // namespace scbicm
