#include "scbicm/protograph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace scbicm {

Protograph::Protograph(int cn_count, int vn_count)
    : cn_count_(cn_count), vn_count_(vn_count) {
    if (cn_count <= 0 || vn_count <= 0)
        throw std::invalid_argument("protograph needs at least one CN and one VN");
    mult_.assign(static_cast<size_t>(cn_count) * vn_count, 0);
    cn_pos_.resize(cn_count);
    vn_pos_.resize(vn_count);
}

void Protograph::add_edges(int cn, int vn, int count) {
    if (cn < 0 || cn >= cn_count_ || vn < 0 || vn >= vn_count_)
        throw std::out_of_range("edge endpoint out of range");
    if (count < 1) throw std::invalid_argument("edge count must be positive");
    mult_[static_cast<size_t>(cn) * vn_count_ + vn] += count;
}

int Protograph::multiplicity(int cn, int vn) const {
    if (cn < 0 || cn >= cn_count_ || vn < 0 || vn >= vn_count_)
        throw std::out_of_range("edge endpoint out of range");
    return mult_[static_cast<size_t>(cn) * vn_count_ + vn];
}

int Protograph::cn_degree(int cn) const {
    int d = 0;
    for (int v = 0; v < vn_count_; ++v) d += multiplicity(cn, v);
    return d;
}

int Protograph::vn_degree(int vn) const {
    int d = 0;
    for (int c = 0; c < cn_count_; ++c) d += multiplicity(c, vn);
    return d;
}

std::vector<int> Protograph::cn_degrees() const {
    std::vector<int> out(cn_count_);
    for (int c = 0; c < cn_count_; ++c) out[c] = cn_degree(c);
    return out;
}

std::vector<int> Protograph::vn_degrees() const {
    std::vector<int> out(vn_count_);
    for (int v = 0; v < vn_count_; ++v) out[v] = vn_degree(v);
    return out;
}

int Protograph::edge_count() const {
    return std::accumulate(mult_.begin(), mult_.end(), 0);
}

namespace {

// Colour refinement for canonical labelling.  Colours are dense ints ordered
// by (previous colour, sorted neighbour-colour multiset), which keeps the
// refinement order-stable and therefore canonical.  Nodes carry weights (twin
// class sizes) that are folded into the signature.
struct Refiner {
    const Protograph& g;
    std::vector<std::vector<std::pair<int, int>>> cn_adj;  // (vn, mult)
    std::vector<std::vector<std::pair<int, int>>> vn_adj;  // (cn, mult)
    std::vector<int> cn_w, vn_w;

    explicit Refiner(const Protograph& graph) : g(graph) {
        cn_adj.resize(g.cn_count());
        vn_adj.resize(g.vn_count());
        cn_w.assign(g.cn_count(), 1);
        vn_w.assign(g.vn_count(), 1);
        for (int c = 0; c < g.cn_count(); ++c)
            for (int v = 0; v < g.vn_count(); ++v)
                if (int m = g.multiplicity(c, v); m > 0) {
                    cn_adj[c].push_back({v, m});
                    vn_adj[v].push_back({c, m});
                }
    }

    static void relabel(std::vector<int>& colors,
                        const std::vector<std::vector<std::pair<int, int>>>& adj,
                        const std::vector<int>& other_colors) {
        using Key = std::pair<int, std::vector<std::pair<int, int>>>;
        std::vector<Key> keys(colors.size());
        for (size_t i = 0; i < colors.size(); ++i) {
            std::vector<std::pair<int, int>> nb;
            nb.reserve(adj[i].size());
            for (auto [j, m] : adj[i]) nb.push_back({other_colors[j], m});
            std::sort(nb.begin(), nb.end());
            keys[i] = {colors[i], std::move(nb)};
        }
        std::map<Key, int> dense;
        for (const auto& k : keys) dense.emplace(k, 0);
        int next = 0;
        for (auto& [k, id] : dense) id = next++;
        for (size_t i = 0; i < colors.size(); ++i) colors[i] = dense[keys[i]];
    }

    void refine(std::vector<int>& cc, std::vector<int>& vc) const {
        while (true) {
            size_t before = count_colors(cc) + count_colors(vc);
            relabel(cc, cn_adj, vc);
            relabel(vc, vn_adj, cc);
            if (count_colors(cc) + count_colors(vc) == before) break;
        }
    }

    static size_t count_colors(const std::vector<int>& c) {
        return std::set<int>(c.begin(), c.end()).size();
    }

    static bool discrete(const std::vector<int>& c) {
        return count_colors(c) == c.size();
    }

    std::string signature(const std::vector<int>& cc, const std::vector<int>& vc) const {
        std::vector<int> corder(cc.size()), vorder(vc.size());
        // colour -> node (discrete colouring is a bijection onto 0..n-1)
        for (size_t i = 0; i < cc.size(); ++i) corder[cc[i]] = static_cast<int>(i);
        for (size_t i = 0; i < vc.size(); ++i) vorder[vc[i]] = static_cast<int>(i);
        const std::vector<int>& vrank = vc;
        std::ostringstream os;
        os << "C" << cc.size() << "V" << vc.size() << ";W";
        for (int c : corder) os << cn_w[c] << ",";
        os << ";w";
        for (int v : vorder) os << vn_w[v] << ",";
        os << ";";
        for (size_t r = 0; r < corder.size(); ++r) {
            int c = corder[r];
            std::vector<std::pair<int, int>> row;
            for (auto [v, m] : cn_adj[c]) row.push_back({vrank[v], m});
            std::sort(row.begin(), row.end());
            for (auto [v, m] : row) os << v << ":" << m << ",";
            os << ";";
        }
        return os.str();
    }

    std::string canonical(std::vector<int> cc, std::vector<int> vc) const {
        refine(cc, vc);
        if (discrete(cc) && discrete(vc)) return signature(cc, vc);
        // individualise the smallest non-singleton cell, prefer the CN side
        auto cell_members = [](const std::vector<int>& cols) {
            std::map<int, std::vector<int>> cells;
            for (size_t i = 0; i < cols.size(); ++i) cells[cols[i]].push_back(static_cast<int>(i));
            for (auto& [col, mem] : cells)
                if (mem.size() > 1) return mem;
            return std::vector<int>{};
        };
        std::string best;
        auto mem = cell_members(cc);
        bool cn_side = !mem.empty();
        if (!cn_side) mem = cell_members(vc);
        int fresh = static_cast<int>(cc.size() + vc.size());
        for (int node : mem) {
            auto cc2 = cc;
            auto vc2 = vc;
            (cn_side ? cc2[node] : vc2[node]) = fresh;
            std::string sig = canonical(std::move(cc2), std::move(vc2));
            if (best.empty() || sig < best) best = std::move(sig);
        }
        return best;
    }
};

}  // namespace

std::string Protograph::canonical_form() const {
    // True twins (identical rows / columns, multiplicities included) collapse
    // into weighted super-nodes first.  Colour refinement can never split
    // twins, so the individualisation search would otherwise branch on every
    // replica pair and the replicated VNs alone would make it exponential.
    std::map<std::vector<int>, std::vector<int>> row_classes, col_classes;
    for (int c = 0; c < cn_count_; ++c) {
        std::vector<int> row(vn_count_);
        for (int v = 0; v < vn_count_; ++v) row[v] = multiplicity(c, v);
        row_classes[std::move(row)].push_back(c);
    }
    for (int v = 0; v < vn_count_; ++v) {
        std::vector<int> col(cn_count_);
        for (int c = 0; c < cn_count_; ++c) col[c] = multiplicity(c, v);
        col_classes[std::move(col)].push_back(v);
    }
    const int R = static_cast<int>(row_classes.size());
    const int S = static_cast<int>(col_classes.size());
    std::vector<int> cw(R), vw(S), cn_rep(R), vn_rep(S);
    int i = 0;
    for (const auto& [row, members] : row_classes) {
        cw[i] = static_cast<int>(members.size());
        cn_rep[i] = members.front();
        ++i;
    }
    int j = 0;
    for (const auto& [col, members] : col_classes) {
        vw[j] = static_cast<int>(members.size());
        vn_rep[j] = members.front();
        ++j;
    }
    Protograph reduced(R, S);
    for (int r = 0; r < R; ++r)
        for (int s = 0; s < S; ++s)
            if (int m = multiplicity(cn_rep[r], vn_rep[s]); m > 0) reduced.add_edges(r, s, m);

    Refiner rf(reduced);
    rf.cn_w = cw;
    rf.vn_w = vw;
    std::vector<int> cc(R), vc(S);
    for (int r = 0; r < R; ++r) cc[r] = cw[r] * 100003 + reduced.cn_degree(r);
    for (int s = 0; s < S; ++s) vc[s] = vw[s] * 100003 + reduced.vn_degree(s);
    return rf.canonical(std::move(cc), std::move(vc));
}

bool Protograph::isomorphic_to(const Protograph& other) const {
    if (cn_count_ != other.cn_count_ || vn_count_ != other.vn_count_) return false;
    if (edge_count() != other.edge_count()) return false;
    return canonical_form() == other.canonical_form();
}

void SingleChainParams::validate() const {
    if (J < 2) throw std::invalid_argument("J must be at least 2");
    if (L < 1) throw std::invalid_argument("L must be at least 1");
    if (w < 1) throw std::invalid_argument("w must be at least 1");
    if (b_c < 1 || b_v < 1) throw std::invalid_argument("b_c and b_v must be positive");
    if (J != w + 1)
        throw std::invalid_argument("one-per-shift edge spreading requires J == w + 1");
    if (K * b_c != J * b_v)
        throw std::invalid_argument("regularity requires K * b_c == J * b_v");
}

Rational design_rate(const SingleChainParams& p) {
    p.validate();
    long long num = static_cast<long long>(p.L) * p.b_v - static_cast<long long>(p.L + p.w) * p.b_c;
    long long den = static_cast<long long>(p.L) * p.b_v;
    long long g = std::gcd(num, den);
    if (g == 0) g = 1;
    return {num / g, den / g};
}

namespace {

int vn_index(const SingleChainParams& p, int chain, int pos, int replica) {
    return chain * p.vn_per_chain() + (pos - 1) * p.b_v + replica;
}

int cn_index(const SingleChainParams& p, int chain, int pos, int replica) {
    return chain * p.cn_per_chain() + (pos - 1) * p.b_c + replica;
}

// Terminal CN of a chain end, counted from the chain interior outward.
// slot s covers (position offset s / b_c, replica s % b_c).
int terminal_cn_index(const SingleChainParams& p, int chain, ChainEnd end, int slot) {
    int pos_off = slot / p.b_c;
    int replica = slot % p.b_c;
    int pos = (end == ChainEnd::Right) ? p.L + 1 + pos_off : p.w - pos_off;
    return cn_index(p, chain, pos, replica);
}

int terminal_slot_count(const SingleChainParams& p) { return p.w * p.b_c; }

int terminal_slot_degree(const SingleChainParams& p, int slot) {
    // degree of the terminal CN at this slot in the plain chain
    int pos_off = slot / p.b_c;
    return (p.w - pos_off) * p.b_v / p.b_c;
}

void add_chain_edges(Protograph& g, const SingleChainParams& p, int chain) {
    for (int t = 1; t <= p.L; ++t)
        for (int r = 0; r < p.b_v; ++r) {
            int v = vn_index(p, chain, t, r);
            g.vn_position(v) = {chain, t, r};
            for (int s = 0; s <= p.w; ++s)
                g.add_edges(cn_index(p, chain, t + s, r % p.b_c), v);
        }
    for (int u = 1; u <= p.L + p.w; ++u)
        for (int r = 0; r < p.b_c; ++r)
            g.cn_position(cn_index(p, chain, u, r)) = {chain, u, r};
}

}  // namespace

int spare_socket_budget(const SingleChainParams& p) {
    p.validate();
    int total = 0;
    for (int s = 0; s < terminal_slot_count(p); ++s)
        total += p.K - terminal_slot_degree(p, s);
    return total;
}

Protograph build_single_chain(const SingleChainParams& p) {
    p.validate();
    Protograph g(p.cn_per_chain(), p.vn_per_chain());
    add_chain_edges(g, p, 0);
    return g;
}

Protograph build_connected(const SingleChainParams& p, const ConnectionSpec& spec) {
    p.validate();
    const int M = spec.num_chains;
    if (M < 2) throw std::invalid_argument("connected ensembles need at least two chains");
    if (static_cast<int>(spec.connecting_end.size()) != M)
        throw std::invalid_argument("connecting_end must list one end per chain");

    Protograph g(M * p.cn_per_chain(), M * p.vn_per_chain());
    for (int c = 0; c < M; ++c) add_chain_edges(g, p, c);

    for (const auto& e : spec.edges) {
        if (e.source_chain < 0 || e.source_chain >= M || e.target_chain < 0 || e.target_chain >= M)
            throw std::invalid_argument("connection edge references an unknown chain");
        if (e.multiplicity < 1)
            throw std::invalid_argument("connection edge multiplicity must be positive");
        if (e.cn_slot < 0 || e.cn_slot >= terminal_slot_count(p))
            throw ConstraintError(2, "connection source is not a terminal CN of the selected end");
        if (e.target_chain == e.source_chain)
            throw ConstraintError(2, "connection edges must lead to a different chain");
        if (e.target_vn < 0 || e.target_vn >= p.vn_per_chain())
            throw std::invalid_argument("connection target VN out of range");
        int cn = terminal_cn_index(p, e.source_chain, spec.connecting_end[e.source_chain], e.cn_slot);
        int vn = e.target_chain * p.vn_per_chain() + e.target_vn;
        g.add_edges(cn, vn, e.multiplicity);
    }

    for (int c = 0; c < g.cn_count(); ++c)
        if (g.cn_degree(c) > p.K)
            throw ConstraintError(1, "CN degree exceeds K at check node " + std::to_string(c));

    // identical structure per chain, up to relabeling the chains cyclically
    using Item = std::tuple<int, int, int, int>;  // slot, target_vn, chain offset, mult
    std::vector<std::vector<Item>> per_chain(M);
    for (const auto& e : spec.edges) {
        int off = (e.target_chain - e.source_chain + M) % M;
        per_chain[e.source_chain].push_back({e.cn_slot, e.target_vn, off, e.multiplicity});
    }
    for (auto& items : per_chain) std::sort(items.begin(), items.end());
    for (int c = 1; c < M; ++c)
        if (per_chain[c] != per_chain[0])
            throw ConstraintError(3, "chains do not share an identical connection structure");

    // node sets are fixed by construction, so the design rate cannot move;
    // keep the check anyway so the invariant is enforced, not assumed
    Rational r0 = design_rate(p);
    long long num = static_cast<long long>(M) * p.L * p.b_v - static_cast<long long>(M) * (p.L + p.w) * p.b_c;
    long long den = static_cast<long long>(M) * p.L * p.b_v;
    if (num * r0.den != r0.num * den)
        throw ConstraintError(4, "design rate changed by the connection");
    return g;
}

ConnectionSpec loop_connection_spec(const SingleChainParams& p, int num_chains,
                                    const std::vector<int>& connect_positions) {
    p.validate();
    if (num_chains < 2) throw std::invalid_argument("loopback needs at least two chains");
    if (static_cast<int>(connect_positions.size()) != p.w)
        throw std::invalid_argument("loopback expects exactly w connect positions");
    for (int pos : connect_positions)
        if (pos < 1 || pos > p.L)
            throw std::invalid_argument("connect position outside the chain");

    ConnectionSpec spec;
    spec.num_chains = num_chains;
    spec.connecting_end.assign(num_chains, ChainEnd::Right);
    for (int c = 0; c < num_chains; ++c) {
        int target = (c + 1) % num_chains;
        // Treat the partner positions as a virtual continuation of this chain:
        // the i-th listed position stands in for chain position L+1+i and
        // reaches the terminal CNs the continued chain would have reached.
        for (size_t i = 0; i < connect_positions.size(); ++i)
            for (int r = 0; r < p.b_v; ++r) {
                int tv = (connect_positions[i] - 1) * p.b_v + r;
                for (int j = static_cast<int>(i); j < p.w; ++j)
                    spec.edges.push_back({c, j * p.b_c + r % p.b_c, target, tv, 1});
            }
    }
    return spec;
}

Protograph build_loop_connected(const SingleChainParams& p, int num_chains,
                                const std::vector<int>& connect_positions) {
    return build_connected(p, loop_connection_spec(p, num_chains, connect_positions));
}

Protograph build_continuous_connected(const SingleChainParams& p, int num_chains) {
    p.validate();
    if (num_chains != 2)
        throw std::invalid_argument("the continuation family is defined for exactly two chains");
    const int q = 5;  // window starts at chain-position 5
    if (q + 2 * p.w - 1 > p.L)
        throw std::invalid_argument("chain too short to host the continuation window");

    Protograph g(2 * p.cn_per_chain(), 2 * p.vn_per_chain());
    for (int c = 0; c < 2; ++c) add_chain_edges(g, p, c);

    // One-directional: both ends of chain 0 continue into the middle of
    // chain 1, whose own terminations stay untouched.  Positions q..q+w-1
    // stand in for the virtual right prolongation L+1..L+w, positions
    // q+w..q+2w-1 for the virtual left prolongation 1-w..0 (ascending), so
    // every spare socket of chain 0 fills to degree K.
    for (int i = 0; i < p.w; ++i)
        for (int r = 0; r < p.b_v; ++r) {
            int tv = vn_index(p, 1, q + i, r);
            for (int j = i; j < p.w; ++j)
                g.add_edges(terminal_cn_index(p, 0, ChainEnd::Right, j * p.b_c + r % p.b_c), tv);
        }
    for (int i = 0; i < p.w; ++i)
        for (int r = 0; r < p.b_v; ++r) {
            // virtual position 1-w+i reaches CN positions 1..i+1, i.e. the
            // outermost i+1 slots of the left end
            int tv = vn_index(p, 1, q + p.w + i, r);
            for (int s = p.w - 1 - i; s < p.w; ++s)
                g.add_edges(terminal_cn_index(p, 0, ChainEnd::Left, s * p.b_c + r % p.b_c), tv);
        }

    for (int c = 0; c < g.cn_count(); ++c)
        if (g.cn_degree(c) > p.K)
            throw ConstraintError(1, "CN degree exceeds K at check node " + std::to_string(c));
    return g;
}

std::vector<ConnectionSpec> enumerate_connections(const SingleChainParams& p, int num_chains,
                                                  const EnumerationOptions& opts) {
    p.validate();
    if (num_chains < 2) throw std::invalid_argument("enumeration needs at least two chains");
    const int budget = spare_socket_budget(p);
    const int slots = terminal_slot_count(p);
    std::vector<int> spare0(slots);
    for (int s = 0; s < slots; ++s) spare0[s] = p.K - terminal_slot_degree(p, s);

    std::vector<ConnectionSpec> out;
    std::set<std::string> seen;

    // assign the extras of one VN to terminal slots, preferring distinct
    // sockets in the given fill order and stacking on the last live socket
    // once the distinct ones run out
    auto assign = [&](std::vector<int>& spare, int extras, const std::vector<int>& order) {
        std::vector<std::pair<int, int>> picked;  // (slot, mult)
        for (int s : order) {
            if (extras == 0) break;
            if (spare[s] > 0) {
                picked.push_back({s, 1});
                --spare[s];
                --extras;
            }
        }
        while (extras > 0) {
            int last = -1;
            for (int s : order)
                if (spare[s] > 0) last = s;
            if (last < 0) return std::vector<std::pair<int, int>>{};  // infeasible
            int take = std::min(extras, spare[last]);
            picked.push_back({last, take});
            spare[last] -= take;
            extras -= take;
        }
        return picked;
    };

    std::vector<std::vector<int>> orders;
    {
        std::vector<int> fwd(slots);
        for (int s = 0; s < slots; ++s) fwd[s] = s;
        orders.push_back(fwd);
        if (opts.both_socket_orders) {
            std::vector<int> rev(fwd.rbegin(), fwd.rend());
            orders.push_back(rev);
        }
    }

    for (int size = 1; size <= std::min(opts.max_window, p.L); ++size) {
        int nvn = size * p.b_v;
        for (int start = 1; start + size - 1 <= p.L; ++start) {
            // per-VN extra counts over the window, position-major
            std::vector<int> extras(nvn, 0);
            auto emit = [&]() {
                // first and last window positions must actually be used
                int first = 0, last = 0;
                for (int r = 0; r < p.b_v; ++r) {
                    first += extras[r];
                    last += extras[nvn - p.b_v + r];
                }
                if (first == 0 || last == 0) return;
                for (const auto& order : orders) {
                    std::vector<int> spare = spare0;
                    std::vector<ConnectionEdge> local;
                    bool ok = true;
                    for (int i = 0; i < nvn && ok; ++i) {
                        if (extras[i] == 0) continue;
                        auto picked = assign(spare, extras[i], order);
                        if (picked.empty()) ok = false;
                        int pos = start + i / p.b_v;
                        int tv = (pos - 1) * p.b_v + i % p.b_v;
                        for (auto [s, m] : picked) local.push_back({0, s, 0, tv, m});
                    }
                    if (!ok) continue;
                    std::string key;
                    for (const auto& e : local)
                        key += std::to_string(e.cn_slot) + "/" + std::to_string(e.target_vn) +
                               "/" + std::to_string(e.multiplicity) + ";";
                    if (!seen.insert(key).second) continue;
                    ConnectionSpec spec;
                    spec.num_chains = num_chains;
                    spec.connecting_end.assign(num_chains, ChainEnd::Right);
                    for (int c = 0; c < num_chains; ++c) {
                        int target = (c + 1) % num_chains;
                        for (auto e : local) {
                            e.source_chain = c;
                            e.target_chain = target;
                            spec.edges.push_back(e);
                        }
                    }
                    out.push_back(std::move(spec));
                }
            };
            // depth-first over per-VN extras with the budget constraint
            std::function<void(int, int)> walk = [&](int idx, int used) {
                if (idx == nvn) {
                    bool full = (used == budget);
                    if (full || (!opts.require_full_budget && used > 0)) emit();
                    return;
                }
                int room = budget - used;
                for (int e = 0; e <= std::min(opts.max_extra_per_vn, room); ++e) {
                    extras[idx] = e;
                    walk(idx + 1, used + e);
                }
                extras[idx] = 0;
            };
            walk(0, 0);
        }
    }
    return out;
}

bool is_connected_graph(const Protograph& g) {
    int n = g.cn_count() + g.vn_count();
    std::vector<char> vis(n, 0);
    std::vector<int> stack{0};  // CNs first, then VNs offset by cn_count
    vis[0] = 1;
    int reached = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (u < g.cn_count()) {
            for (int v = 0; v < g.vn_count(); ++v)
                if (g.multiplicity(u, v) > 0 && !vis[g.cn_count() + v]) {
                    vis[g.cn_count() + v] = 1;
                    ++reached;
                    stack.push_back(g.cn_count() + v);
                }
        } else {
            int v = u - g.cn_count();
            for (int c = 0; c < g.cn_count(); ++c)
                if (g.multiplicity(c, v) > 0 && !vis[c]) {
                    vis[c] = 1;
                    ++reached;
                    stack.push_back(c);
                }
        }
    }
    return reached == n;
}

}  // namespace scbicm
