#include "ibplab/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

#include "expr.hpp"

namespace ibplab {

// --- Network ------------------------------------------------------------------

Network::Network(std::vector<VertexId> vertices, std::vector<Edge> edges, VertexId origin,
                 VertexId destination) {
  auto graph = std::make_shared<Graph>();
  graph->vertices = std::move(vertices);
  graph->edges = std::move(edges);
  for (std::size_t i = 0; i < graph->vertices.size(); ++i) {
    if (!graph->vertex_lookup.emplace(graph->vertices[i], i).second)
      throw InputError("duplicate vertex id '" + graph->vertices[i] + "'");
  }
  graph->incident.resize(graph->vertices.size());
  for (std::size_t e = 0; e < graph->edges.size(); ++e) {
    const Edge& edge = graph->edges[e];
    if (!graph->edge_lookup.emplace(edge.id, e).second)
      throw InputError("duplicate edge id '" + edge.id + "'");
    const auto u = graph->vertex_lookup.find(edge.u);
    const auto v = graph->vertex_lookup.find(edge.v);
    if (u == graph->vertex_lookup.end() || v == graph->vertex_lookup.end())
      throw InputError("edge '" + edge.id + "' has an unknown endpoint");
    if (u->second == v->second) throw InputError("edge '" + edge.id + "' is a self-loop");
    graph->ends.emplace_back(u->second, v->second);
    graph->incident[u->second].push_back(e);
    graph->incident[v->second].push_back(e);
  }
  const auto o = graph->vertex_lookup.find(origin);
  const auto d = graph->vertex_lookup.find(destination);
  if (o == graph->vertex_lookup.end() || d == graph->vertex_lookup.end())
    throw InputError("terminal is not a vertex of the network");
  if (o->second == d->second) throw InputError("origin and destination coincide");
  origin_ = o->second;
  destination_ = d->second;
  graph_ = std::move(graph);
}

std::size_t Network::vertex_index(const VertexId& id) const {
  const auto found = find_vertex(id);
  if (!found) throw InputError("unknown vertex '" + id + "'");
  return *found;
}

std::size_t Network::edge_index(const EdgeId& id) const {
  const auto found = find_edge(id);
  if (!found) throw InputError("unknown edge '" + id + "'");
  return *found;
}

std::optional<std::size_t> Network::find_vertex(const VertexId& id) const {
  const auto it = graph_->vertex_lookup.find(id);
  if (it == graph_->vertex_lookup.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Network::find_edge(const EdgeId& id) const {
  const auto it = graph_->edge_lookup.find(id);
  if (it == graph_->edge_lookup.end()) return std::nullopt;
  return it->second;
}

std::size_t Network::other_end(std::size_t edge, std::size_t vertex) const {
  const auto& [a, b] = graph_->ends[edge];
  return vertex == a ? b : a;
}

Network Network::with_terminals(const VertexId& origin, const VertexId& destination) const {
  Network copy = *this;
  copy.origin_ = vertex_index(origin);
  copy.destination_ = vertex_index(destination);
  if (copy.origin_ == copy.destination_) throw InputError("origin and destination coincide");
  return copy;
}

// --- relevance via biconnected components ---------------------------------------

namespace {

struct Blocks {
  std::vector<int> edge_block;                   // block id per edge
  std::vector<std::vector<int>> vertex_blocks;   // blocks touching each vertex
  int count = 0;
};

Blocks biconnected_blocks(const Network& net) {
  const std::size_t n = net.num_vertices();
  Blocks out;
  out.edge_block.assign(net.num_edges(), -1);
  out.vertex_blocks.resize(n);
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<std::size_t> edge_stack;
  int timer = 0;

  std::function<void(std::size_t, std::ptrdiff_t)> dfs = [&](std::size_t u, std::ptrdiff_t parent_edge) {
    disc[u] = low[u] = timer++;
    for (const std::size_t e : net.incident(u)) {
      if (static_cast<std::ptrdiff_t>(e) == parent_edge) continue;
      const std::size_t w = net.other_end(e, u);
      if (disc[w] == -1) {
        edge_stack.push_back(e);
        dfs(w, static_cast<std::ptrdiff_t>(e));
        low[u] = std::min(low[u], low[w]);
        if (low[w] >= disc[u]) {
          const int id = out.count++;
          std::set<std::size_t> touched;
          for (;;) {
            const std::size_t top = edge_stack.back();
            edge_stack.pop_back();
            out.edge_block[top] = id;
            touched.insert(net.tail(top));
            touched.insert(net.head(top));
            if (top == e) break;
          }
          for (const std::size_t v : touched) out.vertex_blocks[v].push_back(id);
        }
      } else if (disc[w] < disc[u]) {
        edge_stack.push_back(e);
        low[u] = std::min(low[u], disc[w]);
      }
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (disc[v] == -1) dfs(v, -1);
  return out;
}

}  // namespace

std::vector<bool> relevant_edges(const Network& net, std::size_t source, std::size_t target) {
  std::vector<bool> mask(net.num_edges(), false);
  if (source == target) return mask;
  const Blocks blocks = biconnected_blocks(net);
  if (blocks.vertex_blocks[source].empty() || blocks.vertex_blocks[target].empty()) return mask;

  // Block-cut tree: block nodes [0, count), cut-vertex nodes count + v.
  const std::size_t nb = static_cast<std::size_t>(blocks.count);
  const std::size_t total = nb + net.num_vertices();
  std::vector<std::vector<std::size_t>> adj(total);
  for (std::size_t v = 0; v < net.num_vertices(); ++v) {
    if (blocks.vertex_blocks[v].size() < 2) continue;
    for (const int b : blocks.vertex_blocks[v]) {
      adj[nb + v].push_back(static_cast<std::size_t>(b));
      adj[static_cast<std::size_t>(b)].push_back(nb + v);
    }
  }
  auto node_of = [&](std::size_t v) {
    return blocks.vertex_blocks[v].size() >= 2 ? nb + v
                                               : static_cast<std::size_t>(blocks.vertex_blocks[v][0]);
  };
  const std::size_t start = node_of(source);
  const std::size_t goal = node_of(target);
  std::vector<std::ptrdiff_t> parent(total, -2);
  std::vector<std::size_t> queue{start};
  parent[start] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t x = queue[head];
    for (const std::size_t y : adj[x]) {
      if (parent[y] != -2) continue;
      parent[y] = static_cast<std::ptrdiff_t>(x);
      queue.push_back(y);
    }
  }
  if (parent[goal] == -2) return mask;
  std::vector<bool> on_path(nb, false);
  for (std::ptrdiff_t x = static_cast<std::ptrdiff_t>(goal); x != -1; x = parent[static_cast<std::size_t>(x)])
    if (static_cast<std::size_t>(x) < nb) on_path[static_cast<std::size_t>(x)] = true;
  for (std::size_t e = 0; e < net.num_edges(); ++e)
    mask[e] = on_path[static_cast<std::size_t>(blocks.edge_block[e])];
  return mask;
}

bool is_fully_relevant(const Network& net) {
  const auto mask = relevant_edges(net, net.origin_index(), net.destination_index());
  if (std::find(mask.begin(), mask.end(), false) != mask.end()) return false;
  for (std::size_t v = 0; v < net.num_vertices(); ++v)
    if (net.incident(v).empty()) return false;
  return true;
}

Network strip_irrelevant(const Network& net) {
  const auto mask = relevant_edges(net, net.origin_index(), net.destination_index());
  std::vector<bool> keep_vertex(net.num_vertices(), false);
  std::vector<Edge> edges;
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    if (!mask[e]) continue;
    edges.push_back(net.edge(e));
    keep_vertex[net.tail(e)] = keep_vertex[net.head(e)] = true;
  }
  std::vector<VertexId> vertices;
  for (std::size_t v = 0; v < net.num_vertices(); ++v)
    if (keep_vertex[v]) vertices.push_back(net.vertex(v));
  return Network(std::move(vertices), std::move(edges), net.origin(), net.destination());
}

// --- routes -----------------------------------------------------------------

bool Route::contains_edge(std::size_t e) const {
  return std::find(edges.begin(), edges.end(), e) != edges.end();
}

bool Route::contains_vertex(std::size_t v) const {
  return std::find(vertices.begin(), vertices.end(), v) != vertices.end();
}

Route Route::section(std::size_t from_vertex, std::size_t to_vertex) const {
  auto a = std::find(vertices.begin(), vertices.end(), from_vertex);
  auto b = std::find(vertices.begin(), vertices.end(), to_vertex);
  if (a == vertices.end() || b == vertices.end())
    throw std::invalid_argument("section endpoint is not on the route");
  auto i = static_cast<std::size_t>(a - vertices.begin());
  auto j = static_cast<std::size_t>(b - vertices.begin());
  if (i > j) std::swap(i, j);
  Route out;
  out.vertices.assign(vertices.begin() + static_cast<std::ptrdiff_t>(i),
                      vertices.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  out.edges.assign(edges.begin() + static_cast<std::ptrdiff_t>(i),
                   edges.begin() + static_cast<std::ptrdiff_t>(j));
  return out;
}

std::string route_label(const Network& net, const Route& route) {
  std::string out;
  for (std::size_t k = 0; k < route.edges.size(); ++k) {
    if (k) out += ',';
    out += net.edge(route.edges[k]).id;
  }
  return out;
}

std::vector<Route> enumerate_routes(const Network& net, const std::vector<bool>& allowed,
                                    std::size_t cap) {
  if (allowed.size() != net.num_edges()) throw std::invalid_argument("edge mask size mismatch");
  std::vector<Route> out;
  std::vector<bool> visited(net.num_vertices(), false);
  Route current;
  current.vertices.push_back(net.origin_index());
  visited[net.origin_index()] = true;
  const std::size_t goal = net.destination_index();

  std::function<void(std::size_t)> walk = [&](std::size_t v) {
    if (v == goal) {
      out.push_back(current);
      if (out.size() > cap)
        throw RouteCapExceeded("more than " + std::to_string(cap) + " routes");
      return;
    }
    for (const std::size_t e : net.incident(v)) {
      if (!allowed[e]) continue;
      const std::size_t w = net.other_end(e, v);
      if (visited[w]) continue;
      visited[w] = true;
      current.edges.push_back(e);
      current.vertices.push_back(w);
      walk(w);
      current.edges.pop_back();
      current.vertices.pop_back();
      visited[w] = false;
    }
  };
  walk(net.origin_index());

  std::sort(out.begin(), out.end(), [&](const Route& a, const Route& b) {
    return std::lexicographical_compare(
        a.edges.begin(), a.edges.end(), b.edges.begin(), b.edges.end(),
        [&](std::size_t x, std::size_t y) { return net.edge(x).id < net.edge(y).id; });
  });
  return out;
}

std::vector<Route> enumerate_routes(const Network& net, std::size_t cap) {
  return enumerate_routes(net, std::vector<bool>(net.num_edges(), true), cap);
}

// --- costs ------------------------------------------------------------------

namespace {

void require_nonnegative(double x, const char* what) {
  if (!std::isfinite(x) || x < 0.0) throw InputError(std::string(what) + " must be finite and nonnegative");
}

}  // namespace

CostFunction CostFunction::constant(double c) {
  require_nonnegative(c, "constant cost");
  CostFunction f = polynomial({c});
  f.kind_ = Kind::constant;
  return f;
}

CostFunction CostFunction::affine(double a, double b) {
  require_nonnegative(a, "affine slope");
  require_nonnegative(b, "affine intercept");
  CostFunction f = polynomial({b, a});
  f.kind_ = Kind::affine;
  return f;
}

CostFunction CostFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) throw InputError("polynomial cost needs at least one coefficient");
  for (const double c : coeffs) require_nonnegative(c, "polynomial coefficient");
  CostFunction f;
  f.kind_ = Kind::polynomial;
  f.coeffs_ = Eigen::Map<const Eigen::VectorXd>(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  f.xs_.resize(0);
  f.ys_.resize(0);
  return f;
}

CostFunction CostFunction::piecewise_linear(std::vector<std::pair<double, double>> points) {
  if (points.empty()) throw InputError("piecewise-linear cost needs breakpoints");
  if (points.front().first != 0.0) throw InputError("piecewise-linear cost must start at x = 0");
  for (std::size_t k = 0; k < points.size(); ++k) {
    require_nonnegative(points[k].first, "breakpoint");
    require_nonnegative(points[k].second, "breakpoint value");
    if (k > 0 && !(points[k].first > points[k - 1].first))
      throw InputError("breakpoints must be strictly increasing");
    if (k > 0 && points[k].second < points[k - 1].second)
      throw InputError("piecewise-linear values must be nondecreasing");
  }
  CostFunction f;
  f.kind_ = Kind::piecewise_linear;
  f.coeffs_.resize(0);
  f.xs_.resize(static_cast<Eigen::Index>(points.size()));
  f.ys_.resize(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    f.xs_[static_cast<Eigen::Index>(k)] = points[k].first;
    f.ys_[static_cast<Eigen::Index>(k)] = points[k].second;
  }
  return f;
}

int CostFunction::degree() const {
  if (kind_ == Kind::piecewise_linear) return xs_.size() > 1 ? 1 : 0;
  for (Eigen::Index k = coeffs_.size() - 1; k > 0; --k)
    if (coeffs_[k] != 0.0) return static_cast<int>(k);
  return 0;
}

bool CostFunction::is_convex() const {
  if (kind_ != Kind::piecewise_linear) return true;
  double previous = 0.0;
  for (Eigen::Index k = 0; k + 1 < xs_.size(); ++k) {
    const double slope = (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
    if (slope < previous) return false;
    previous = slope;
  }
  return true;
}

double CostFunction::derivative(double x) const {
  if (kind_ == Kind::piecewise_linear) {
    const Eigen::Index n = xs_.size();
    if (n == 1) return 0.0;
    Eigen::Index k = 0;
    while (k + 2 < n && x >= xs_[k + 1]) ++k;
    return (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
  }
  double acc = 0.0;
  for (Eigen::Index k = coeffs_.size() - 1; k >= 1; --k) acc = acc * x + static_cast<double>(k) * coeffs_[k];
  return acc;
}

CostFunction CostFunction::scaled(double factor) const {
  require_nonnegative(factor, "cost scale");
  CostFunction f = *this;
  f.coeffs_ *= factor;
  f.ys_ *= factor;
  return f;
}

// --- instances --------------------------------------------------------------

std::size_t InstanceSpec::type_index(const std::string& id) const {
  for (std::size_t i = 0; i < types.size(); ++i)
    if (types[i].id == id) return i;
  throw InputError("unknown type '" + id + "'");
}

double InstanceSpec::total_demand() const {
  double s = 0.0;
  for (const auto& t : types) s += t.demand;
  return s;
}

Network InstanceSpec::od_network(std::size_t od) const {
  const OdPair& pair = od_pairs.at(od);
  return network.with_terminals(network.vertex(pair.origin), network.vertex(pair.destination));
}

void validate_instance(const InstanceSpec& instance) {
  const Network& net = instance.network;
  if (instance.costs.size() != net.num_edges()) throw InputError("one cost function per edge required");
  if (instance.od_pairs.empty()) throw InputError("at least one OD pair required");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < instance.types.size(); ++i) {
    const UserType& t = instance.types[i];
    if (!ids.insert(t.id).second) throw InputError("duplicate type id '" + t.id + "'");
    if (!std::isfinite(t.demand) || t.demand < 0.0)
      throw InputError("type '" + t.id + "' has a negative or non-finite demand");
    if (t.info.size() != net.num_edges()) throw InputError("information mask size mismatch");
    if (t.od >= instance.od_pairs.size()) throw InputError("type refers to a missing OD pair");
    const Network od_net = instance.od_network(t.od);
    if (enumerate_routes(od_net, t.info, kRouteCap).empty())
      throw InputError("type '" + t.id + "' has no route inside its information set");
  }
}

InstanceSpec make_instance(
    Network net, std::vector<CostFunction> costs,
    const std::vector<std::tuple<std::string, double, std::vector<EdgeId>>>& types) {
  InstanceSpec inst;
  inst.costs = std::move(costs);
  OdPair pair{net.origin_index(), net.destination_index(), {}};
  for (const auto& [id, demand, edges] : types) {
    UserType t;
    t.id = id;
    t.demand = demand;
    t.info.assign(net.num_edges(), false);
    for (const auto& e : edges) t.info[net.edge_index(e)] = true;
    pair.types.push_back(inst.types.size());
    inst.types.push_back(std::move(t));
  }
  inst.network = std::move(net);
  inst.od_pairs.push_back(std::move(pair));
  validate_instance(inst);
  return inst;
}

// --- loading ----------------------------------------------------------------

namespace {

using nlohmann::json;

double number(const json& value, const std::map<std::string, double>& params, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) return detail::evaluate_expression(value.get<std::string>(), params);
  throw InputError(where + ": expected a number or expression");
}

const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name))
    throw InputError(where + ": missing field \"" + name + "\"");
  return obj.at(name);
}

CostFunction parse_cost(const json& cost, const std::map<std::string, double>& params,
                        const std::string& where) {
  const std::string kind = field(cost, "kind", where).get<std::string>();
  const json& p = field(cost, "params", where);
  if (kind == "affine") return CostFunction::affine(number(field(p, "a", where), params, where),
                                                    number(field(p, "b", where), params, where));
  if (kind == "constant") return CostFunction::constant(number(field(p, "c", where), params, where));
  if (kind == "polynomial") {
    std::vector<double> coeffs;
    for (const auto& c : field(p, "coeffs", where)) coeffs.push_back(number(c, params, where));
    return CostFunction::polynomial(std::move(coeffs));
  }
  if (kind == "piecewise_linear" || kind == "piecewise-linear") {
    std::vector<std::pair<double, double>> points;
    for (const auto& pt : field(p, "points", where)) {
      if (!pt.is_array() || pt.size() != 2) throw InputError(where + ": breakpoint must be [x, value]");
      points.emplace_back(number(pt[0], params, where), number(pt[1], params, where));
    }
    return CostFunction::piecewise_linear(std::move(points));
  }
  throw InputError(where + ": unknown cost kind '" + kind + "'");
}

std::string read_source(const std::string& source) {
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') return source;
  std::ifstream in(source);
  if (!in) throw InputError("cannot open '" + source + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

LoadResult load_instance(const std::string& source, const LoadOptions& options) {
  json doc;
  try {
    doc = json::parse(read_source(source));
  } catch (const json::parse_error& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("instance document must be a JSON object");

  try {
    std::map<std::string, double> params;
    if (doc.contains("params")) {
      for (const auto& [k, v] : doc.at("params").items()) {
        if (!v.is_number()) throw InputError("params." + k + " must be a number");
        params[k] = v.get<double>();
      }
    }
    for (const auto& [k, v] : options.params) params[k] = v;

    std::vector<VertexId> vertices;
    for (const auto& v : field(doc, "vertices", "instance")) vertices.push_back(v.get<std::string>());
    std::vector<Edge> edges;
    std::vector<CostFunction> costs;
    for (const auto& e : field(doc, "edges", "instance")) {
      const std::string id = field(e, "id", "edge").get<std::string>();
      const std::string where = "edge '" + id + "'";
      edges.push_back({id, field(e, "u", where).get<std::string>(), field(e, "v", where).get<std::string>()});
      costs.push_back(parse_cost(field(e, "cost", where), params, where));
    }

    const json& pairs = field(doc, "od_pairs", "instance");
    if (!pairs.is_array() || pairs.empty()) throw InputError("od_pairs must be a nonempty array");
    const std::string o0 = field(pairs[0], "origin", "od pair").get<std::string>();
    const std::string d0 = field(pairs[0], "destination", "od pair").get<std::string>();
    Network net(vertices, edges, o0, d0);

    InstanceSpec inst;
    for (const auto& pair : pairs) {
      OdPair od;
      od.origin = net.vertex_index(field(pair, "origin", "od pair").get<std::string>());
      od.destination = net.vertex_index(field(pair, "destination", "od pair").get<std::string>());
      if (od.origin == od.destination) throw InputError("od pair with identical terminals");
      for (const auto& t : field(pair, "types", "od pair")) {
        UserType type;
        type.id = field(t, "id", "type").is_string() ? t.at("id").get<std::string>() : t.at("id").dump();
        const std::string where = "type '" + type.id + "'";
        type.demand = number(field(t, "demand", where), params, where);
        type.od = inst.od_pairs.size();
        if (t.contains("edges")) {
          type.info.assign(net.num_edges(), false);
          for (const auto& e : t.at("edges")) type.info[net.edge_index(e.get<std::string>())] = true;
        } else {
          type.info.assign(net.num_edges(), true);
        }
        od.types.push_back(inst.types.size());
        inst.types.push_back(std::move(type));
      }
      inst.od_pairs.push_back(std::move(od));
    }

    // Relevance across all OD pairs.
    std::vector<bool> relevant(net.num_edges(), false);
    for (const auto& od : inst.od_pairs) {
      const auto mask = relevant_edges(net, od.origin, od.destination);
      for (std::size_t e = 0; e < mask.size(); ++e) relevant[e] = relevant[e] || mask[e];
    }
    std::vector<bool> keep_vertex(net.num_vertices(), false);
    for (std::size_t e = 0; e < net.num_edges(); ++e)
      if (relevant[e]) keep_vertex[net.tail(e)] = keep_vertex[net.head(e)] = true;

    LoadResult result;
    std::vector<std::string> dropped;
    for (std::size_t v = 0; v < net.num_vertices(); ++v)
      if (!keep_vertex[v]) dropped.push_back("vertex '" + net.vertex(v) + "'");
    for (std::size_t e = 0; e < net.num_edges(); ++e)
      if (!relevant[e]) dropped.push_back("edge '" + net.edge(e).id + "'");

    if (!dropped.empty()) {
      if (!options.strip_irrelevant)
        throw InputError(dropped.front() + " lies on no origin-destination route");
      std::vector<VertexId> kept_vertices;
      for (std::size_t v = 0; v < net.num_vertices(); ++v)
        if (keep_vertex[v]) kept_vertices.push_back(net.vertex(v));
      std::vector<Edge> kept_edges;
      std::vector<CostFunction> kept_costs;
      std::vector<std::size_t> new_index(net.num_edges(), 0);
      for (std::size_t e = 0; e < net.num_edges(); ++e) {
        if (!relevant[e]) continue;
        new_index[e] = kept_edges.size();
        kept_edges.push_back(net.edge(e));
        kept_costs.push_back(costs[e]);
      }
      Network stripped(kept_vertices, kept_edges, net.origin(), net.destination());
      for (auto& od : inst.od_pairs) {
        od.origin = stripped.vertex_index(net.vertex(od.origin));
        od.destination = stripped.vertex_index(net.vertex(od.destination));
      }
      for (auto& t : inst.types) {
        std::vector<bool> info(kept_edges.size(), false);
        for (std::size_t e = 0; e < net.num_edges(); ++e)
          if (relevant[e] && t.info[e]) info[new_index[e]] = true;
        t.info = std::move(info);
      }
      for (const auto& d : dropped) result.warnings.push_back("stripped " + d + " (on no origin-destination route)");
      net = std::move(stripped);
      costs = std::move(kept_costs);
    }
    inst.network = std::move(net);
    inst.costs = std::move(costs);
    validate_instance(inst);
    result.instance = std::move(inst);
    return result;
  } catch (const json::exception& e) {
    throw InputError(std::string("schema error: ") + e.what());
  }
}

// --- route sets and flow evaluation ---------------------------------------------

RouteSets RouteSets::build(const InstanceSpec& instance, std::size_t cap) {
  RouteSets sets;
  const std::size_t m = instance.network.num_edges();
  std::vector<Network> od_nets;
  for (std::size_t od = 0; od < instance.od_pairs.size(); ++od) od_nets.push_back(instance.od_network(od));
  for (const UserType& t : instance.types) {
    auto routes = enumerate_routes(od_nets[t.od], t.info, cap);
    Eigen::SparseMatrix<double, Eigen::RowMajor> a(static_cast<Eigen::Index>(routes.size()),
                                                   static_cast<Eigen::Index>(m));
    std::vector<Eigen::Triplet<double>> entries;
    for (std::size_t r = 0; r < routes.size(); ++r)
      for (const std::size_t e : routes[r].edges)
        entries.emplace_back(static_cast<int>(r), static_cast<int>(e), 1.0);
    a.setFromTriplets(entries.begin(), entries.end());
    sets.routes.push_back(std::move(routes));
    sets.incidence.push_back(std::move(a));
  }
  return sets;
}

std::optional<std::size_t> RouteSets::find(std::size_t type, const std::vector<std::size_t>& edges) const {
  const auto& rs = routes.at(type);
  for (std::size_t r = 0; r < rs.size(); ++r)
    if (rs[r].edges == edges) return r;
  return std::nullopt;
}

FlowProfile evaluate_flow(const InstanceSpec& instance, std::shared_ptr<const RouteSets> routes,
                          std::vector<Eigen::VectorXd> route_flows, Feasibility feasibility) {
  const std::size_t k = instance.types.size();
  const auto m = static_cast<Eigen::Index>(instance.network.num_edges());
  if (route_flows.size() != k) throw std::invalid_argument("one flow vector per type required");

  FlowProfile p;
  p.type_edge_flows = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), m);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& x = route_flows[i];
    if (x.size() != routes->incidence[i].rows()) throw std::invalid_argument("route flow size mismatch");
    if ((x.array() < 0.0).any()) throw InputError("route flows must be nonnegative");
    if (feasibility == Feasibility::strict) {
      const double s = instance.types[i].demand;
      if (std::abs(x.sum() - s) > feasibility_tolerance(s))
        throw InputError("type '" + instance.types[i].id + "' violates flow conservation");
    }
    p.type_edge_flows.row(static_cast<Eigen::Index>(i)) = (routes->incidence[i].transpose() * x).transpose();
  }
  p.edge_flows = p.type_edge_flows.colwise().sum().transpose();
  p.edge_costs.resize(m);
  for (Eigen::Index e = 0; e < m; ++e) p.edge_costs[e] = instance.costs[static_cast<std::size_t>(e)](p.edge_flows[e]);
  p.type_costs.resize(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    Eigen::VectorXd c = routes->incidence[i] * p.edge_costs;
    p.type_costs[static_cast<Eigen::Index>(i)] = c.size() ? c.minCoeff() : 0.0;
    p.route_costs.push_back(std::move(c));
  }
  p.route_flows = std::move(route_flows);
  p.routes = std::move(routes);
  return p;
}

FlowProfile evaluate_flow(const InstanceSpec& instance, const RouteFlowMap& flows, Feasibility feasibility) {
  auto routes = std::make_shared<const RouteSets>(RouteSets::build(instance));
  std::vector<Eigen::VectorXd> x;
  for (std::size_t i = 0; i < instance.types.size(); ++i)
    x.push_back(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(routes->routes[i].size())));
  for (const auto& [key, value] : flows) {
    const std::size_t i = instance.type_index(key.first);
    std::vector<std::size_t> edges;
    for (const auto& e : key.second) edges.push_back(instance.network.edge_index(e));
    const auto r = routes->find(i, edges);
    if (!r) throw InputError("route is not available to type '" + key.first + "'");
    x[i][static_cast<Eigen::Index>(*r)] += value;
  }
  return evaluate_flow(instance, std::move(routes), std::move(x), feasibility);
}

double total_cost(const InstanceSpec& instance, const Eigen::VectorXd& edge_flows) {
  double c = 0.0;
  for (Eigen::Index e = 0; e < edge_flows.size(); ++e)
    c += edge_flows[e] * instance.costs[static_cast<std::size_t>(e)](edge_flows[e]);
  return c;
}

}  // namespace ibplab
