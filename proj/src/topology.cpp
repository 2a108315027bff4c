#include "ibplab/topology.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace ibplab {

// --- tree helpers -----------------------------------------------------------

std::vector<std::size_t> SpTree::leaves(int id) const {
  std::vector<std::size_t> out;
  std::vector<int> stack{id};
  while (!stack.empty()) {
    const int x = stack.back();
    stack.pop_back();
    const SpNode& n = node(x);
    if (n.kind == SpNode::Kind::leaf) {
      out.push_back(n.edge);
    } else {
      stack.push_back(n.right);
      stack.push_back(n.left);
    }
  }
  return out;
}

bool SpTree::contains_parallel(int id) const {
  const SpNode& n = node(id);
  if (n.kind == SpNode::Kind::leaf) return false;
  if (n.kind == SpNode::Kind::parallel) return true;
  return contains_parallel(n.left) || contains_parallel(n.right);
}

std::vector<int> SpTree::series_factors(int id, std::size_t from) const {
  const SpNode& n = node(id);
  if (n.kind != SpNode::Kind::series) return {id};
  const bool forward = (n.u == from);
  std::vector<int> first = series_factors(forward ? n.left : n.right, from);
  const std::vector<int> second = series_factors(forward ? n.right : n.left, n.middle);
  first.insert(first.end(), second.begin(), second.end());
  return first;
}

// --- series-parallel reduction ----------------------------------------------------

SpDecomposition sp_decompose(const Network& net) {
  struct Reduced {
    std::size_t a, b;
    int node;
    bool alive;
  };
  SpTree tree;
  std::vector<Reduced> pieces;
  std::vector<std::set<std::size_t>> incident(net.num_vertices());
  for (std::size_t e = 0; e < net.num_edges(); ++e) {
    SpNode leaf;
    leaf.edge = e;
    leaf.u = net.tail(e);
    leaf.v = net.head(e);
    tree.nodes.push_back(leaf);
    pieces.push_back({leaf.u, leaf.v, static_cast<int>(e), true});
    incident[leaf.u].insert(e);
    incident[leaf.v].insert(e);
  }
  auto other = [&](std::size_t p, std::size_t x) { return pieces[p].a == x ? pieces[p].b : pieces[p].a; };
  auto kill = [&](std::size_t p) {
    pieces[p].alive = false;
    incident[pieces[p].a].erase(p);
    incident[pieces[p].b].erase(p);
  };
  auto add = [&](std::size_t a, std::size_t b, int node) {
    const std::size_t id = pieces.size();
    pieces.push_back({a, b, node, true});
    incident[a].insert(id);
    incident[b].insert(id);
    return id;
  };

  std::vector<std::size_t> work(net.num_vertices());
  std::iota(work.begin(), work.end(), 0);
  const std::size_t o = net.origin_index(), d = net.destination_index();
  while (!work.empty()) {
    const std::size_t x = work.back();
    work.pop_back();
    // Parallel reductions at x.
    bool merged = true;
    while (merged) {
      merged = false;
      std::map<std::size_t, std::size_t> by_end;
      for (const std::size_t p : incident[x]) {
        const std::size_t y = other(p, x);
        const auto it = by_end.find(y);
        if (it == by_end.end()) {
          by_end.emplace(y, p);
          continue;
        }
        const std::size_t q = it->second;
        SpNode node;
        node.kind = SpNode::Kind::parallel;
        node.left = pieces[q].node;
        node.right = pieces[p].node;
        node.u = pieces[q].a;
        node.v = pieces[q].b;
        tree.nodes.push_back(node);
        const std::size_t a = pieces[q].a, b = pieces[q].b;
        kill(p);
        kill(q);
        add(a, b, static_cast<int>(tree.nodes.size() - 1));
        work.push_back(y);
        merged = true;
        break;
      }
    }
    // Series reduction through x.
    if (x == o || x == d || incident[x].size() != 2) continue;
    const std::size_t p = *incident[x].begin();
    const std::size_t q = *std::next(incident[x].begin());
    const std::size_t y = other(p, x), z = other(q, x);
    if (y == z) continue;
    SpNode node;
    node.kind = SpNode::Kind::series;
    node.left = pieces[p].node;
    node.right = pieces[q].node;
    node.u = y;
    node.v = z;
    node.middle = x;
    tree.nodes.push_back(node);
    kill(p);
    kill(q);
    add(y, z, static_cast<int>(tree.nodes.size() - 1));
    work.push_back(y);
    work.push_back(z);
  }

  SpDecomposition out;
  std::vector<std::size_t> alive;
  for (std::size_t p = 0; p < pieces.size(); ++p)
    if (pieces[p].alive) alive.push_back(p);
  const bool done = alive.size() == 1 &&
                    ((pieces[alive[0]].a == o && pieces[alive[0]].b == d) ||
                     (pieces[alive[0]].a == d && pieces[alive[0]].b == o));
  if (done) {
    tree.root = pieces[alive[0]].node;
    out.tree = std::move(tree);
  } else {
    for (const std::size_t p : alive) {
      auto edges = tree.leaves(pieces[p].node);
      std::sort(edges.begin(), edges.end());
      out.remainder.push_back({pieces[p].a, pieces[p].b, std::move(edges)});
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> replay(const SpTree& tree, std::size_t num_edges) {
  std::vector<std::pair<std::size_t, std::size_t>> ends(num_edges);
  // Orient each node from a given terminal; terminals of children follow from
  // the recorded series middle vertices.
  std::function<void(int, std::size_t, std::size_t)> walk = [&](int id, std::size_t from, std::size_t to) {
    const SpNode& n = tree.node(id);
    switch (n.kind) {
      case SpNode::Kind::leaf:
        ends[n.edge] = {from, to};
        break;
      case SpNode::Kind::parallel:
        walk(n.left, from, to);
        walk(n.right, from, to);
        break;
      case SpNode::Kind::series:
        if (n.u == from) {
          walk(n.left, from, n.middle);
          walk(n.right, n.middle, to);
        } else {
          walk(n.right, from, n.middle);
          walk(n.left, n.middle, to);
        }
        break;
    }
  };
  const SpNode& root = tree.node(tree.root);
  walk(tree.root, root.u, root.v);
  return ends;
}

std::vector<std::size_t> sp_vertex_order(const Network& net, const SpTree& tree) {
  std::vector<std::size_t> index(net.num_vertices(), 0);
  std::size_t next = 1;
  std::function<void(int, std::size_t)> walk = [&](int id, std::size_t from) {
    const SpNode& n = tree.node(id);
    if (n.kind == SpNode::Kind::parallel) {
      walk(n.left, from);
      walk(n.right, from);
    } else if (n.kind == SpNode::Kind::series) {
      walk(n.u == from ? n.left : n.right, from);
      index[n.middle] = next++;
      walk(n.u == from ? n.right : n.left, n.middle);
    }
  };
  index[net.origin_index()] = 0;
  walk(tree.root, net.origin_index());
  index[net.destination_index()] = next;
  return index;
}

// --- classification ---------------------------------------------------------

namespace {

bool tree_li(const SpTree& tree, int id) {
  const SpNode& n = tree.node(id);
  switch (n.kind) {
    case SpNode::Kind::leaf:
      return true;
    case SpNode::Kind::parallel:
      return tree_li(tree, n.left) && tree_li(tree, n.right);
    case SpNode::Kind::series:
      return (!tree.contains_parallel(n.left) && tree_li(tree, n.right)) ||
             (!tree.contains_parallel(n.right) && tree_li(tree, n.left));
  }
  return false;
}

Network sub_network(const Network& net, const std::vector<std::size_t>& edges, std::size_t from,
                    std::size_t to) {
  std::set<std::size_t> vs{from, to};
  std::vector<Edge> kept;
  for (const std::size_t e : edges) {
    vs.insert(net.tail(e));
    vs.insert(net.head(e));
    kept.push_back(net.edge(e));
  }
  std::vector<VertexId> vertices;
  for (const std::size_t v : vs) vertices.push_back(net.vertex(v));
  return Network(std::move(vertices), std::move(kept), net.vertex(from), net.vertex(to));
}

}  // namespace

TopologyReport classify(const Network& net, const ClassifyOptions& options) {
  TopologyReport report;
  SpDecomposition dec = sp_decompose(net);
  if (dec.tree) {
    const SpTree& tree = *dec.tree;
    report.is_sp = true;
    report.is_li = tree_li(tree, tree.root);
    const auto factors = tree.series_factors(tree.root, net.origin_index());
    report.is_sli = std::all_of(factors.begin(), factors.end(), [&](int f) { return tree_li(tree, f); });
    if (report.is_sli) {
      std::size_t from = net.origin_index();
      for (const int f : factors) {
        const SpNode& n = tree.node(f);
        const std::size_t to = (n.u == from) ? n.v : n.u;
        auto edges = tree.leaves(f);
        std::sort(edges.begin(), edges.end());
        LiBlock block{sub_network(net, edges, from, to), {}};
        for (const std::size_t e : edges) block.edges.push_back(net.edge(e).id);
        report.li_blocks.push_back(std::move(block));
        from = to;
      }
    }
    report.sp_tree = std::move(dec.tree);
  }
  if (!report.is_sli && options.find_witness) {
    for (const Pattern p : kAllPatterns) {
      const EmbedResult r = embeds(pattern_network(p), net, options.witness_budget);
      if (r.status == EmbedStatus::found) {
        report.witness = r.witness;
        report.witness->pattern = pattern_name(p);
        break;
      }
    }
  }
  return report;
}

// --- brute-force LI oracles ---------------------------------------------------------

std::size_t gf2_rank(std::vector<std::vector<bool>> rows) {
  std::size_t rank = 0;
  const std::size_t cols = rows.empty() ? 0 : rows[0].size();
  for (std::size_t c = 0; c < cols && rank < rows.size(); ++c) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][c]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[pivot], rows[rank]);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || !rows[r][c]) continue;
      for (std::size_t k = c; k < cols; ++k) rows[r][k] = rows[r][k] != rows[rank][k];
    }
    ++rank;
  }
  return rank;
}

bool li_bruteforce(const Network& net, std::size_t cap) {
  const auto routes = enumerate_routes(net, cap);
  if (routes.size() > net.num_edges()) return false;
  std::vector<std::vector<bool>> rows(routes.size(), std::vector<bool>(net.num_edges(), false));
  for (std::size_t r = 0; r < routes.size(); ++r)
    for (const std::size_t e : routes[r].edges) rows[r][e] = true;
  return gf2_rank(std::move(rows)) == routes.size();
}

bool routes_have_private_edges(const Network& net, std::size_t cap) {
  const auto routes = enumerate_routes(net, cap);
  std::vector<int> uses(net.num_edges(), 0);
  for (const auto& r : routes)
    for (const std::size_t e : r.edges) ++uses[e];
  return std::all_of(routes.begin(), routes.end(), [&](const Route& r) {
    return std::any_of(r.edges.begin(), r.edges.end(), [&](std::size_t e) { return uses[e] == 1; });
  });
}

bool li_section_condition(const Network& net, std::size_t cap) {
  const auto routes = enumerate_routes(net, cap);
  const std::size_t o = net.origin_index(), d = net.destination_index();
  for (std::size_t i = 0; i < routes.size(); ++i)
    for (std::size_t j = i + 1; j < routes.size(); ++j)
      for (const std::size_t v : routes[i].vertices) {
        if (v == o || v == d || !routes[j].contains_vertex(v)) continue;
        if (routes[i].section(o, v) != routes[j].section(o, v) &&
            routes[i].section(v, d) != routes[j].section(v, d))
          return false;
      }
  return true;
}

// --- patterns -----------------------------------------------------------------

std::string pattern_name(Pattern p) {
  static const char* names[] = {"fig4a", "fig4b", "fig4c", "fig4d", "fig4e",
                                "fig4f", "fig4g", "fig4h", "fig4i"};
  return names[static_cast<int>(p)];
}

std::optional<Pattern> pattern_from_name(const std::string& name) {
  for (const Pattern p : kAllPatterns)
    if (pattern_name(p) == name) return p;
  if (name == "wheatstone") return Pattern::fig4a;
  return std::nullopt;
}

Network pattern_network(Pattern p) {
  if (p == Pattern::fig4a)
    return Network({"O", "A", "B", "D"},
                   {{"e1", "O", "A"}, {"e2", "O", "B"}, {"e3", "A", "D"}, {"e4", "B", "D"}, {"e5", "A", "B"}},
                   "O", "D");
  const bool prefix = p == Pattern::fig4d || p == Pattern::fig4g || p == Pattern::fig4h || p == Pattern::fig4i;
  const bool suffix = p == Pattern::fig4e || p == Pattern::fig4f || p == Pattern::fig4h || p == Pattern::fig4i;
  const bool link = p == Pattern::fig4c || p == Pattern::fig4f || p == Pattern::fig4g || p == Pattern::fig4h;
  std::vector<VertexId> vs{"O", "D"};
  std::vector<Edge> es;
  const VertexId start = prefix ? "A" : "O";
  const VertexId end = suffix ? "B" : "D";
  const VertexId left = link ? "Ap" : "v";
  const VertexId right = link ? "Bp" : "v";
  if (prefix) vs.push_back("A");
  vs.push_back(left);
  if (link) vs.push_back(right);
  if (suffix) vs.push_back("B");
  es.push_back({"e1", start, left});
  es.push_back({"e2", start, left});
  es.push_back({"e3", right, end});
  es.push_back({"e4", right, end});
  es.push_back({"e5", "O", "D"});
  if (link) es.push_back({"e6", left, right});
  if (prefix) es.push_back({"e7", "O", "A"});
  if (suffix) es.push_back({"e8", "B", "D"});
  return Network(vs, es, "O", "D");
}

Network double_diamond() {
  return Network({"O", "m", "D"}, {{"e1", "O", "m"}, {"e2", "O", "m"}, {"e3", "m", "D"}, {"e4", "m", "D"}},
                 "O", "D");
}

Network split_double_diamond() {
  return Network({"O", "x", "m", "D"},
                 {{"e1", "O", "x"}, {"e2", "O", "x"}, {"e3", "x", "m"}, {"e4", "m", "D"}, {"e5", "m", "D"}},
                 "O", "D");
}

// --- embedding oracle -------------------------------------------------------------

namespace {

class EmbeddingSearch {
 public:
  EmbeddingSearch(const Network& h, const Network& g, std::size_t budget)
      : h_(h), g_(g), budget_(budget), used_vertex_(g.num_vertices(), false),
        used_edge_(g.num_edges(), false), phi_(h.num_vertices(), kNone), paths_(h.num_edges()) {
    // Pattern edges ordered so each one touches an already placed vertex.
    std::vector<bool> placed(h.num_vertices(), false), done(h.num_edges(), false);
    placed[h.origin_index()] = placed[h.destination_index()] = true;
    for (std::size_t round = 0; round < h.num_edges(); ++round) {
      for (std::size_t e = 0; e < h.num_edges(); ++e) {
        if (done[e] || (!placed[h.tail(e)] && !placed[h.head(e)])) continue;
        done[e] = true;
        order_.push_back(e);
        placed[h.tail(e)] = placed[h.head(e)] = true;
        break;
      }
    }
  }

  EmbedResult run() {
    EmbedResult result;
    if (h_.num_edges() <= g_.num_edges() && h_.num_vertices() <= g_.num_vertices() &&
        order_.size() == h_.num_edges()) {
      try {
        if (place_origin()) {
          result.status = EmbedStatus::found;
          result.witness = std::move(witness_);
        }
      } catch (const Exhausted&) {
        result.status = EmbedStatus::inconclusive;
      }
    }
    result.nodes_explored = nodes_;
    return result;
  }

 private:
  static constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  struct Exhausted {};

  void tick() {
    if (++nodes_ > budget_) throw Exhausted{};
  }

  // Enumerates simple paths from `from` through unused vertices; `accept`
  // decides on the endpoint and continues the search, returning true to stop.
  bool paths_from(std::size_t from, std::vector<std::size_t>& path_edges,
                  const std::function<bool(std::size_t)>& at_end, bool allow_empty) {
    tick();
    if (allow_empty && at_end(from)) return true;
    for (const std::size_t e : g_.incident(from)) {
      if (used_edge_[e]) continue;
      const std::size_t w = g_.other_end(e, from);
      used_edge_[e] = true;
      path_edges.push_back(e);
      bool stop = false;
      if (!used_vertex_[w]) {
        // w may be an endpoint or an interior vertex.
        stop = at_end(w);
        if (!stop) {
          used_vertex_[w] = true;
          stop = paths_from(w, path_edges, at_end, false);
          used_vertex_[w] = false;
        }
      } else {
        stop = at_end(w);
      }
      path_edges.pop_back();
      used_edge_[e] = false;
      if (stop) return true;
    }
    return false;
  }

  bool place_origin() {
    const std::size_t og = g_.origin_index();
    used_vertex_[og] = true;
    std::vector<std::size_t> path;
    const bool ok = paths_from(og, path, [&](std::size_t a) {
      if (a != og && used_vertex_[a]) return false;
      const bool was = used_vertex_[a];
      used_vertex_[a] = true;
      phi_[h_.origin_index()] = a;
      origin_path_ = path;
      const bool r = place_destination();
      phi_[h_.origin_index()] = kNone;
      used_vertex_[a] = was;
      return r;
    }, true);
    used_vertex_[og] = false;
    return ok;
  }

  bool place_destination() {
    const std::size_t dg = g_.destination_index();
    if (used_vertex_[dg]) return false;
    used_vertex_[dg] = true;
    std::vector<std::size_t> path;
    const bool ok = paths_from(dg, path, [&](std::size_t b) {
      if (b != dg && used_vertex_[b]) return false;
      const bool was = used_vertex_[b];
      used_vertex_[b] = true;
      phi_[h_.destination_index()] = b;
      destination_path_ = path;
      const bool r = place_edge(0);
      phi_[h_.destination_index()] = kNone;
      used_vertex_[b] = was;
      return r;
    }, true);
    used_vertex_[dg] = false;
    return ok;
  }

  bool place_edge(std::size_t k) {
    if (k == order_.size()) {
      witness_ = make_witness();
      return true;
    }
    const std::size_t e = order_[k];
    std::size_t x = h_.tail(e), y = h_.head(e);
    if (phi_[x] == kNone) std::swap(x, y);
    const std::size_t fx = phi_[x];
    std::vector<std::size_t> path;
    if (phi_[y] != kNone) {
      const std::size_t fy = phi_[y];
      return paths_from(fx, path, [&](std::size_t w) {
        if (w != fy) return false;
        paths_[e] = path;
        return place_edge(k + 1);
      }, false);
    }
    return paths_from(fx, path, [&](std::size_t w) {
      if (used_vertex_[w]) return false;
      used_vertex_[w] = true;
      phi_[y] = w;
      paths_[e] = path;
      const bool r = place_edge(k + 1);
      phi_[y] = kNone;
      used_vertex_[w] = false;
      return r;
    }, false);
  }

  EmbeddingWitness make_witness() const {
    EmbeddingWitness w;
    for (std::size_t v = 0; v < h_.num_vertices(); ++v) w.vertex_map[h_.vertex(v)] = g_.vertex(phi_[v]);
    auto ids = [&](const std::vector<std::size_t>& p) {
      std::vector<EdgeId> out;
      for (const std::size_t e : p) out.push_back(g_.edge(e).id);
      return out;
    };
    for (std::size_t e = 0; e < h_.num_edges(); ++e) {
      // Orient each path from the image of the pattern edge's tail.
      std::vector<std::size_t> p = paths_[e];
      std::size_t at = phi_[h_.tail(e)];
      if (!p.empty() && g_.tail(p.front()) != at && g_.head(p.front()) != at) std::reverse(p.begin(), p.end());
      w.edge_paths[h_.edge(e).id] = ids(p);
    }
    w.origin_path = ids(origin_path_);
    auto dest = destination_path_;
    std::reverse(dest.begin(), dest.end());
    w.destination_path = ids(dest);
    return w;
  }

  const Network& h_;
  const Network& g_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
  std::vector<bool> used_vertex_;
  std::vector<bool> used_edge_;
  std::vector<std::size_t> phi_;
  std::vector<std::vector<std::size_t>> paths_;
  std::vector<std::size_t> order_;
  std::vector<std::size_t> origin_path_;
  std::vector<std::size_t> destination_path_;
  EmbeddingWitness witness_;
};

}  // namespace

EmbedResult embeds(const Network& h, const Network& g, std::size_t budget) {
  return EmbeddingSearch(h, g, budget).run();
}

// --- isomorphism, connectivity ---------------------------------------------------

std::vector<std::pair<std::size_t, std::size_t>> canonical_form(const Network& net) {
  const std::size_t n = net.num_vertices();
  std::vector<std::size_t> inner;
  for (std::size_t v = 0; v < n; ++v)
    if (v != net.origin_index() && v != net.destination_index()) inner.push_back(v);
  std::vector<std::size_t> perm(inner.size());
  std::iota(perm.begin(), perm.end(), 2);
  std::vector<std::pair<std::size_t, std::size_t>> best;
  std::vector<std::size_t> label(n);
  label[net.origin_index()] = 0;
  label[net.destination_index()] = 1;
  do {
    for (std::size_t k = 0; k < inner.size(); ++k) label[inner[k]] = perm[k];
    std::vector<std::pair<std::size_t, std::size_t>> form;
    for (std::size_t e = 0; e < net.num_edges(); ++e) {
      std::size_t a = label[net.tail(e)], b = label[net.head(e)];
      if (a > b) std::swap(a, b);
      form.emplace_back(a, b);
    }
    std::sort(form.begin(), form.end());
    if (best.empty() || form < best) best = std::move(form);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

bool isomorphic(const Network& a, const Network& b) {
  return a.num_vertices() == b.num_vertices() && a.num_edges() == b.num_edges() &&
         canonical_form(a) == canonical_form(b);
}

std::vector<std::size_t> cut_vertices(const Network& net) {
  const std::size_t n = net.num_vertices();
  std::vector<int> disc(n, -1), low(n, 0);
  std::vector<bool> cut(n, false);
  int timer = 0;
  std::function<void(std::size_t, std::ptrdiff_t)> dfs = [&](std::size_t u, std::ptrdiff_t parent_edge) {
    disc[u] = low[u] = timer++;
    int children = 0;
    for (const std::size_t e : net.incident(u)) {
      if (static_cast<std::ptrdiff_t>(e) == parent_edge) continue;
      const std::size_t w = net.other_end(e, u);
      if (disc[w] == -1) {
        ++children;
        dfs(w, static_cast<std::ptrdiff_t>(e));
        low[u] = std::min(low[u], low[w]);
        if (parent_edge != -1 && low[w] >= disc[u]) cut[u] = true;
      } else {
        low[u] = std::min(low[u], disc[w]);
      }
    }
    if (parent_edge == -1 && children > 1) cut[u] = true;
  };
  for (std::size_t v = 0; v < n; ++v)
    if (disc[v] == -1) dfs(v, -1);
  std::vector<std::size_t> out;
  for (std::size_t v = 0; v < n; ++v)
    if (cut[v]) out.push_back(v);
  return out;
}

bool is_biconnected(const Network& net) {
  if (net.num_vertices() < 2) return false;
  std::vector<bool> seen(net.num_vertices(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (const std::size_t e : net.incident(u)) {
      const std::size_t w = net.other_end(e, u);
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == net.num_vertices() && cut_vertices(net).empty();
}

}  // namespace ibplab
