#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ibplab/netmodel.hpp"

namespace ibplab {

/// Binary series-parallel decomposition. Every node records the two terminals
/// of the sub-network it spans; series nodes also record the joining vertex.
struct SpNode {
  enum class Kind { leaf, series, parallel };
  Kind kind = Kind::leaf;
  int left = -1;
  int right = -1;
  std::size_t edge = 0;    // leaves only
  std::size_t u = 0;       // terminal shared with `left` for series nodes
  std::size_t v = 0;       // terminal shared with `right` for series nodes
  std::size_t middle = 0;  // series only
};

struct SpTree {
  std::vector<SpNode> nodes;
  int root = -1;

  const SpNode& node(int id) const { return nodes[static_cast<std::size_t>(id)]; }
  /// Edge indices below a node, in leaf order.
  std::vector<std::size_t> leaves(int id) const;
  bool contains_parallel(int id) const;
  /// Series factors of a node read from `from` to the opposite terminal.
  std::vector<int> series_factors(int id, std::size_t from) const;
};

struct SpDecomposition {
  std::optional<SpTree> tree;
  /// Irreducible remainder when the network is not SP: one entry per
  /// surviving reduced edge (its endpoints and the original edges it absorbed).
  struct Piece {
    std::size_t a;
    std::size_t b;
    std::vector<std::size_t> edges;
  };
  std::vector<Piece> remainder;
};

SpDecomposition sp_decompose(const Network& net);

/// Edge endpoints obtained by replaying the tree; index = edge index.
std::vector<std::pair<std::size_t, std::size_t>> replay(const SpTree& tree, std::size_t num_edges);

/// Vertex indices increasing along every route (SP networks only).
std::vector<std::size_t> sp_vertex_order(const Network& net, const SpTree& tree);

struct EmbeddingWitness {
  std::string pattern;
  std::map<VertexId, VertexId> vertex_map;            // pattern vertex -> network vertex
  std::map<EdgeId, std::vector<EdgeId>> edge_paths;   // pattern edge -> network path
  std::vector<EdgeId> origin_path;                    // network origin -> image of pattern origin
  std::vector<EdgeId> destination_path;               // image of pattern destination -> network destination
};

struct LiBlock {
  Network network;
  std::vector<EdgeId> edges;
};

struct TopologyReport {
  bool is_sp = false;
  bool is_li = false;
  bool is_sli = false;
  std::optional<SpTree> sp_tree;
  std::vector<LiBlock> li_blocks;
  std::optional<EmbeddingWitness> witness;
};

struct ClassifyOptions {
  /// Look for a forbidden-pattern witness when the network is not SLI.
  bool find_witness = false;
  std::size_t witness_budget = 2'000'000;
};

TopologyReport classify(const Network& net, const ClassifyOptions& options = {});

/// Rank test on the 0/1 route incidence vectors over GF(2).
bool li_bruteforce(const Network& net, std::size_t cap = kRouteCap);
/// Every route owns an edge used by no other route.
bool routes_have_private_edges(const Network& net, std::size_t cap = kRouteCap);
/// For every two routes and every shared vertex v other than the terminals,
/// the sections O..v agree or the sections v..D agree.
bool li_section_condition(const Network& net, std::size_t cap = kRouteCap);

/// Rank over GF(2) of a list of equal-length 0/1 rows.
std::size_t gf2_rank(std::vector<std::vector<bool>> rows);

enum class Pattern { fig4a, fig4b, fig4c, fig4d, fig4e, fig4f, fig4g, fig4h, fig4i };

inline constexpr Pattern kAllPatterns[] = {Pattern::fig4a, Pattern::fig4b, Pattern::fig4c,
                                           Pattern::fig4d, Pattern::fig4e, Pattern::fig4f,
                                           Pattern::fig4g, Pattern::fig4h, Pattern::fig4i};

std::string pattern_name(Pattern p);
std::optional<Pattern> pattern_from_name(const std::string& name);
/// The nine minimal non-SLI networks. Edge roles: e1,e2 the origin-side pair,
/// e3,e4 the destination-side pair, e5 the bypass, e6 the middle link, e7 the
/// origin prefix, e8 the destination suffix (Wheatstone: e5 is the bridge).
Network pattern_network(Pattern p);
/// Parallel pair in series with a parallel pair.
Network double_diamond();
/// Double diamond with a single edge between the two pairs.
Network split_double_diamond();

enum class EmbedStatus { found, absent, inconclusive };

struct EmbedResult {
  EmbedStatus status = EmbedStatus::absent;
  std::optional<EmbeddingWitness> witness;
  std::size_t nodes_explored = 0;
};

/// Searches `g` for a subdivision of `h` whose terminals connect to the
/// terminals of `g` by disjoint paths; remaining edges of `g` count as added
/// edges. Exponential; intended for small networks and tests.
EmbedResult embeds(const Network& h, const Network& g, std::size_t budget = 2'000'000);

/// Terminal-preserving canonical form: the lexicographically least sorted
/// endpoint list over relabellings of non-terminal vertices.
std::vector<std::pair<std::size_t, std::size_t>> canonical_form(const Network& net);
bool isomorphic(const Network& a, const Network& b);

/// Vertices whose removal disconnects the network.
std::vector<std::size_t> cut_vertices(const Network& net);
bool is_biconnected(const Network& net);

}  // namespace ibplab
