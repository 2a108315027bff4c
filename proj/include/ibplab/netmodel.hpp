#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace ibplab {

using VertexId = std::string;
using EdgeId = std::string;

/// Raised for malformed or inconsistent user input (documents, ids, parameters).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a type has more routes than exact route-based methods accept.
class RouteCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kRouteCap = 10000;

struct Edge {
  EdgeId id;
  VertexId u;
  VertexId v;
};

/// Undirected two-terminal multigraph. Parallel edges are distinct entries of
/// the edge list; self-loops are rejected. The graph part is shared between
/// copies that differ only in their terminals.
class Network {
 public:
  Network() = default;
  Network(std::vector<VertexId> vertices, std::vector<Edge> edges, VertexId origin,
          VertexId destination);

  const std::vector<VertexId>& vertices() const { return graph_->vertices; }
  const std::vector<Edge>& edges() const { return graph_->edges; }
  std::size_t num_vertices() const { return graph_->vertices.size(); }
  std::size_t num_edges() const { return graph_->edges.size(); }

  const VertexId& origin() const { return vertex(origin_); }
  const VertexId& destination() const { return vertex(destination_); }
  std::size_t origin_index() const { return origin_; }
  std::size_t destination_index() const { return destination_; }

  const VertexId& vertex(std::size_t index) const { return graph_->vertices[index]; }
  const Edge& edge(std::size_t index) const { return graph_->edges[index]; }

  std::size_t vertex_index(const VertexId& id) const;
  std::size_t edge_index(const EdgeId& id) const;
  std::optional<std::size_t> find_vertex(const VertexId& id) const;
  std::optional<std::size_t> find_edge(const EdgeId& id) const;

  std::size_t tail(std::size_t edge) const { return graph_->ends[edge].first; }
  std::size_t head(std::size_t edge) const { return graph_->ends[edge].second; }
  std::size_t other_end(std::size_t edge, std::size_t vertex) const;
  /// Edge indices incident to a vertex, ascending.
  const std::vector<std::size_t>& incident(std::size_t vertex) const {
    return graph_->incident[vertex];
  }

  /// Same graph, different terminal pair.
  Network with_terminals(const VertexId& origin, const VertexId& destination) const;

 private:
  struct Graph {
    std::vector<VertexId> vertices;
    std::vector<Edge> edges;
    std::vector<std::pair<std::size_t, std::size_t>> ends;
    std::vector<std::vector<std::size_t>> incident;
    std::map<VertexId, std::size_t> vertex_lookup;
    std::map<EdgeId, std::size_t> edge_lookup;
  };

  std::shared_ptr<const Graph> graph_ = std::make_shared<const Graph>();
  std::size_t origin_ = 0;
  std::size_t destination_ = 0;
};

/// Edges (as a mask over the network's edge list) that lie on at least one
/// simple path between the given terminals. Computed from the block-cut tree:
/// an edge is on some simple s-t path iff its biconnected block lies on the
/// block-cut-tree path between s and t.
std::vector<bool> relevant_edges(const Network& net, std::size_t source, std::size_t target);

/// True iff every vertex and edge lies on some origin-destination route.
bool is_fully_relevant(const Network& net);

/// Drops vertices and edges that lie on no origin-destination route.
Network strip_irrelevant(const Network& net);

/// Simple path from an origin. `edges` are edge indices in traversal order and
/// `vertices` has one more entry than `edges`.
struct Route {
  std::vector<std::size_t> edges;
  std::vector<std::size_t> vertices;

  bool contains_edge(std::size_t e) const;
  bool contains_vertex(std::size_t v) const;
  /// Sub-path between two vertices on the route (either order).
  Route section(std::size_t from_vertex, std::size_t to_vertex) const;

  friend bool operator==(const Route&, const Route&) = default;
};

std::string route_label(const Network& net, const Route& route);

/// All simple origin-destination paths using only `allowed` edges, sorted by
/// edge-id sequence. Throws RouteCapExceeded past `cap` routes.
std::vector<Route> enumerate_routes(const Network& net, const std::vector<bool>& allowed,
                                    std::size_t cap = kRouteCap);
std::vector<Route> enumerate_routes(const Network& net, std::size_t cap = kRouteCap);

/// Nonnegative, nondecreasing edge latency from a structurally monotone family.
/// Constant and affine costs are stored as low-degree polynomials.
class CostFunction {
 public:
  enum class Kind { constant, affine, polynomial, piecewise_linear };

  /// c(x) = x.
  CostFunction() : kind_(Kind::affine), coeffs_(Eigen::Vector2d(0.0, 1.0)) {}

  static CostFunction constant(double c);
  static CostFunction affine(double a, double b);
  /// coeffs[k] multiplies x^k.
  static CostFunction polynomial(std::vector<double> coeffs);
  /// Breakpoints (x, value); x strictly increasing from 0, values nondecreasing.
  static CostFunction piecewise_linear(std::vector<std::pair<double, double>> points);

  Kind kind() const { return kind_; }
  /// Highest power with a nonzero coefficient (piecewise-linear: 1).
  int degree() const;
  const Eigen::VectorXd& coefficients() const { return coeffs_; }
  const Eigen::VectorXd& breakpoints() const { return xs_; }
  const Eigen::VectorXd& breakpoint_values() const { return ys_; }
  bool is_convex() const;

  template <typename Scalar>
  Scalar operator()(Scalar x) const;

  /// Closed-form antiderivative from 0.
  template <typename Scalar>
  Scalar integral(Scalar x) const;

  /// Right derivative.
  double derivative(double x) const;
  /// d/dx [x c(x)].
  double marginal(double x) const { return (*this)(x) + x * derivative(x); }

  CostFunction scaled(double factor) const;

 private:
  Kind kind_ = Kind::polynomial;
  Eigen::VectorXd coeffs_;
  Eigen::VectorXd xs_;
  Eigen::VectorXd ys_;
};

struct UserType {
  std::string id;
  double demand = 0.0;
  std::vector<bool> info;  // mask over network edges
  std::size_t od = 0;      // index into InstanceSpec::od_pairs
};

struct OdPair {
  std::size_t origin = 0;
  std::size_t destination = 0;
  std::vector<std::size_t> types;
};

/// Network, edge costs and user types with their information sets.
struct InstanceSpec {
  Network network;
  std::vector<CostFunction> costs;  // aligned with network.edges()
  std::vector<OdPair> od_pairs;
  std::vector<UserType> types;

  std::size_t type_index(const std::string& id) const;
  bool is_multi_od() const { return od_pairs.size() > 1; }
  double total_demand() const;
  /// Network re-rooted at the terminals of the given OD pair.
  Network od_network(std::size_t od) const;
};

/// Throws InputError if the instance breaks a structural invariant.
void validate_instance(const InstanceSpec& instance);

/// Build a single-OD instance from edge-id information sets.
InstanceSpec make_instance(Network net, std::vector<CostFunction> costs,
                           const std::vector<std::tuple<std::string, double, std::vector<EdgeId>>>&
                               types);

struct LoadOptions {
  /// Strip vertices/edges off every OD route (with a warning) instead of rejecting.
  bool strip_irrelevant = true;
  /// Overrides for the document's "params" object.
  std::map<std::string, double> params;
};

struct LoadResult {
  InstanceSpec instance;
  std::vector<std::string> warnings;
};

/// Parses a JSON instance document. `source` is a path, or the document itself
/// when it starts with '{'.
LoadResult load_instance(const std::string& source, const LoadOptions& options = {});

/// Per-type route sets and their route/edge incidence matrices.
struct RouteSets {
  std::vector<std::vector<Route>> routes;                         // per type
  std::vector<Eigen::SparseMatrix<double, Eigen::RowMajor>> incidence;  // per type, |R_i| x |E|

  static RouteSets build(const InstanceSpec& instance, std::size_t cap = kRouteCap);
  std::size_t num_types() const { return routes.size(); }
  /// Index of a route within a type's set, by edge sequence.
  std::optional<std::size_t> find(std::size_t type, const std::vector<std::size_t>& edges) const;
};

/// Route flows together with everything they induce.
struct FlowProfile {
  std::shared_ptr<const RouteSets> routes;
  std::vector<Eigen::VectorXd> route_flows;   // per type
  std::vector<Eigen::VectorXd> route_costs;   // per type
  Eigen::MatrixXd type_edge_flows;            // types x edges
  Eigen::VectorXd edge_flows;
  Eigen::VectorXd edge_costs;
  Eigen::VectorXd type_costs;                 // min available route cost per type
};

enum class Feasibility { lenient, strict };

/// Keyed route flows as they appear in documents: type id and edge-id sequence.
using RouteFlowMap = std::map<std::pair<std::string, std::vector<EdgeId>>, double>;

FlowProfile evaluate_flow(const InstanceSpec& instance, std::shared_ptr<const RouteSets> routes,
                          std::vector<Eigen::VectorXd> route_flows,
                          Feasibility feasibility = Feasibility::lenient);
FlowProfile evaluate_flow(const InstanceSpec& instance, const RouteFlowMap& flows,
                          Feasibility feasibility = Feasibility::lenient);

/// Conservation tolerance for a type with demand s.
inline double feasibility_tolerance(double demand) { return 1e-9 * std::max(1.0, demand); }

template <typename Scalar>
Scalar potential(const InstanceSpec& instance, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& edge_flows);

double total_cost(const InstanceSpec& instance, const Eigen::VectorXd& edge_flows);

// --- CostFunction templates -------------------------------------------------

template <typename Scalar>
Scalar CostFunction::operator()(Scalar x) const {
  if (kind_ == Kind::piecewise_linear) {
    const Eigen::Index n = xs_.size();
    Eigen::Index k = 0;
    while (k + 2 < n && x >= static_cast<Scalar>(xs_[k + 1])) ++k;
    if (n == 1) return static_cast<Scalar>(ys_[0]);
    const Scalar slope =
        static_cast<Scalar>((ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]));
    return static_cast<Scalar>(ys_[k]) + slope * (x - static_cast<Scalar>(xs_[k]));
  }
  Scalar acc(0);
  for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * x + static_cast<Scalar>(coeffs_[k]);
  return acc;
}

template <typename Scalar>
Scalar CostFunction::integral(Scalar x) const {
  if (kind_ == Kind::piecewise_linear) {
    const Eigen::Index n = xs_.size();
    if (n == 1) return static_cast<Scalar>(ys_[0]) * x;
    Scalar acc(0);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      const Scalar lo = static_cast<Scalar>(xs_[k]);
      const bool last = (k + 2 == n);
      const Scalar hi = last ? x : std::min(x, static_cast<Scalar>(xs_[k + 1]));
      if (hi <= lo) break;
      acc += (hi - lo) * ((*this)(lo) + (*this)(hi)) / Scalar(2);
    }
    return acc;
  }
  Scalar acc(0);
  for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k)
    acc = acc * x + static_cast<Scalar>(coeffs_[k]) / static_cast<Scalar>(k + 1);
  return acc * x;
}

template <typename Scalar>
Scalar potential(const InstanceSpec& instance,
                 const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& edge_flows) {
  Scalar phi(0);
  for (Eigen::Index e = 0; e < edge_flows.size(); ++e)
    phi += instance.costs[static_cast<std::size_t>(e)].integral(edge_flows[e]);
  return phi;
}

}  // namespace ibplab
