#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace scbicm {

// Base-matrix view of a protograph: a small bipartite multigraph between
// check nodes (CNs) and variable nodes (VNs).  Parallel edges are allowed and
// tracked as integer multiplicities.  Every node carries a (chain, position)
// tag so coupled-chain builders can reason about where a node sits; position
// is 1-based along a chain, chain ids are 0-based.
struct NodePosition {
    int chain = 0;
    int position = 0;  // 1-based coupling index along the chain
    int replica = 0;   // index among same-position nodes (0..b-1)
};

class Protograph {
  public:
    Protograph(int cn_count, int vn_count);

    int cn_count() const { return cn_count_; }
    int vn_count() const { return vn_count_; }

    void add_edges(int cn, int vn, int count = 1);
    int multiplicity(int cn, int vn) const;

    int cn_degree(int cn) const;
    int vn_degree(int vn) const;
    std::vector<int> cn_degrees() const;
    std::vector<int> vn_degrees() const;
    int edge_count() const;  // counts parallel edges individually

    NodePosition& cn_position(int cn) { return cn_pos_.at(cn); }
    NodePosition& vn_position(int vn) { return vn_pos_.at(vn); }
    const NodePosition& cn_position(int cn) const { return cn_pos_.at(cn); }
    const NodePosition& vn_position(int vn) const { return vn_pos_.at(vn); }

    // Canonical string invariant under independent relabelings of CNs and
    // VNs (positions are ignored).  Two protographs are isomorphic as
    // multigraphs iff their canonical forms compare equal.
    std::string canonical_form() const;
    bool isomorphic_to(const Protograph& other) const;

  private:
    int cn_count_;
    int vn_count_;
    std::vector<int> mult_;  // row-major [cn][vn]
    std::vector<NodePosition> cn_pos_;
    std::vector<NodePosition> vn_pos_;
};

// Parameters of one terminated coupled chain.  The edge-spreading rule is the
// classic one-per-shift spread: each VN at position t sends one edge to each
// CN position t, t+1, ..., t+w, which requires J == w + 1.  b_c and b_v are
// the per-position node counts (protograph "thickness"); regularity requires
// K * b_c == J * b_v.
struct SingleChainParams {
    int J = 3;
    int K = 6;
    int L = 10;
    int w = 2;
    int b_c = 1;
    int b_v = 2;

    void validate() const;  // throws std::invalid_argument on bad combinations
    int vn_per_chain() const { return L * b_v; }
    int cn_per_chain() const { return (L + w) * b_c; }
};

// Exact design rate 1 - ((L+w)*b_c) / (L*b_v), reduced.
struct Rational {
    long long num = 0;
    long long den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};
Rational design_rate(const SingleChainParams& p);

// One bundle of extra edges wired between chains.  Slots index the terminal
// (degree-deficient) CNs of the source chain's connecting end, counted from
// the chain interior outward: slot 0 is the innermost terminal CN (the one
// with the largest degree), slot w-1 the outermost.
struct ConnectionEdge {
    int source_chain = 0;
    int cn_slot = 0;
    int target_chain = 0;
    int target_vn = 0;  // local VN index inside the target chain, 0-based
    int multiplicity = 1;
};

enum class ChainEnd { Left, Right };

struct ConnectionSpec {
    int num_chains = 2;
    std::vector<ChainEnd> connecting_end;  // one entry per chain
    std::vector<ConnectionEdge> edges;
};

// Thrown by build_connected when a structural constraint is violated.  The id
// is stable and reported to CLI users: 1 = CN degree above K, 2 = more than
// one connecting end used by a chain (or a non-terminal CN used as source),
// 3 = chains do not share the same connection structure, 4 = node set or
// design rate changed.
class ConstraintError : public std::runtime_error {
  public:
    ConstraintError(int id, const std::string& what)
        : std::runtime_error(what), constraint_id(id) {}
    int constraint_id;
};

Protograph build_single_chain(const SingleChainParams& p);

// M >= 2 copies of the chain with the extra edges wired in; validates the
// structural constraints above and throws ConstraintError on violation.
// An empty edge list is accepted (the result is simply disconnected).
Protograph build_connected(const SingleChainParams& p, const ConnectionSpec& spec);

// Loopback family: each chain uses exactly one end; the selected terminal CNs
// are filled back to full degree K by edges to low-position VNs of the next
// chain (cyclically).  connect_positions lists the 1-based target positions;
// the default {3, 4} continues the coupling pattern of a virtually prolonged
// chain into the partner.
Protograph build_loop_connected(const SingleChainParams& p, int num_chains = 2,
                                const std::vector<int>& connect_positions = {3, 4});

// Continuation family: both termination ends of the first chain continue
// into mid-chain VNs of the second (positions 5..4+2w), as if the first
// chain were prolonged indefinitely with the partner standing in for the
// virtual positions.  The first chain ends up with every CN at full degree
// K while the second keeps its own terminations.  Not expressible as a
// ConnectionSpec, which allows each chain only one connecting end.
Protograph build_continuous_connected(const SingleChainParams& p, int num_chains = 2);

ConnectionSpec loop_connection_spec(const SingleChainParams& p, int num_chains,
                                    const std::vector<int>& connect_positions);

// Spare sockets available at one end of a chain: sum over terminal CNs of
// (K - degree).  This is the budget enumerate_connections distributes.
int spare_socket_budget(const SingleChainParams& p);

struct EnumerationOptions {
    int max_window = 4;        // widest contiguous block of target positions
    int max_extra_per_vn = 2;  // cap on added edges per target VN
    bool require_full_budget = true;
    bool both_socket_orders = true;  // innermost-first and outermost-first fills
};

// All single-ended (loopback-style) connection patterns for M chains under
// the options above, duplicate-free as specs.  Every chain gets the same
// local pattern, so constraint 3 holds by construction.
std::vector<ConnectionSpec> enumerate_connections(const SingleChainParams& p,
                                                  int num_chains,
                                                  const EnumerationOptions& opts = {});

bool is_connected_graph(const Protograph& g);

}  // namespace scbicm
