#include "generators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ibplab/topology.hpp"

namespace gen {

namespace {

std::string vertex_name(int v) {
  if (v == 0) return "O";
  if (v == 1) return "D";
  return "v" + std::to_string(v);
}

void compose_sp(Rng& rng, int k, int s, int t, int& next, EdgeList& out) {
  if (k == 1) {
    out.emplace_back(s, t);
    return;
  }
  const int k1 = std::uniform_int_distribution<int>(1, k - 1)(rng);
  if (std::bernoulli_distribution(0.5)(rng)) {
    compose_sp(rng, k1, s, t, next, out);
    compose_sp(rng, k - k1, s, t, next, out);
  } else {
    const int m = next++;
    compose_sp(rng, k1, s, m, next, out);
    compose_sp(rng, k - k1, m, t, next, out);
  }
}

void compose_li(Rng& rng, int k, int s, int t, int& next, EdgeList& out) {
  if (k == 1) {
    out.emplace_back(s, t);
    return;
  }
  if (std::bernoulli_distribution(0.4)(rng)) {
    const int m = next++;
    if (std::bernoulli_distribution(0.5)(rng)) {
      out.emplace_back(s, m);
      compose_li(rng, k - 1, m, t, next, out);
    } else {
      compose_li(rng, k - 1, s, m, next, out);
      out.emplace_back(m, t);
    }
  } else {
    const int k1 = std::uniform_int_distribution<int>(1, k - 1)(rng);
    compose_li(rng, k1, s, t, next, out);
    compose_li(rng, k - k1, s, t, next, out);
  }
}

}  // namespace

ibplab::Network to_network(const EdgeList& edges, int num_vertices) {
  std::vector<ibplab::VertexId> vs;
  for (int v = 0; v < num_vertices; ++v) vs.push_back(vertex_name(v));
  std::vector<ibplab::Edge> es;
  for (std::size_t k = 0; k < edges.size(); ++k)
    es.push_back({"e" + std::to_string(k + 1), vertex_name(edges[k].first), vertex_name(edges[k].second)});
  return ibplab::Network(vs, es, "O", "D");
}

std::vector<ibplab::Network> all_small_networks(int max_edges) {
  std::vector<ibplab::Network> out;
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
  for (int n = 2; n <= max_edges + 1; ++n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    EdgeList current;
    std::vector<int> degree(static_cast<std::size_t>(n), 0);
    // Multisets of pairs in nondecreasing pair index.
    auto rec = [&](auto&& self, std::size_t first) -> void {
      if (!current.empty()) {
        bool ok = degree[0] >= 1 && degree[1] >= 1;
        for (int v = 2; v < n && ok; ++v) ok = degree[static_cast<std::size_t>(v)] >= 2;
        if (ok) {
          const auto net = to_network(current, n);
          if (ibplab::is_fully_relevant(net) && seen.insert(ibplab::canonical_form(net)).second)
            out.push_back(net);
        }
      }
      if (static_cast<int>(current.size()) == max_edges) return;
      for (std::size_t p = first; p < pairs.size(); ++p) {
        current.push_back(pairs[p]);
        ++degree[static_cast<std::size_t>(pairs[p].first)];
        ++degree[static_cast<std::size_t>(pairs[p].second)];
        self(self, p);
        --degree[static_cast<std::size_t>(pairs[p].first)];
        --degree[static_cast<std::size_t>(pairs[p].second)];
        current.pop_back();
      }
    };
    rec(rec, 0);
  }
  return out;
}

ibplab::Network random_sp(Rng& rng, int edges) {
  EdgeList out;
  int next = 2;
  compose_sp(rng, edges, 0, 1, next, out);
  return to_network(out, next);
}

ibplab::Network random_li(Rng& rng, int edges) {
  EdgeList out;
  int next = 2;
  compose_li(rng, edges, 0, 1, next, out);
  return to_network(out, next);
}

ibplab::Network random_sli(Rng& rng, int edges) {
  EdgeList out;
  int next = 2;
  int remaining = edges;
  int from = 0;
  while (remaining > 0) {
    const int k = std::uniform_int_distribution<int>(1, remaining)(rng);
    remaining -= k;
    const int to = remaining == 0 ? 1 : next++;
    compose_li(rng, k, from, to, next, out);
    from = to;
  }
  return to_network(out, next);
}

ibplab::Network random_composed(Rng& rng, int max_edges) {
  const int base = std::uniform_int_distribution<int>(1, max_edges)(rng);
  EdgeList out;
  int next = 2;
  compose_sp(rng, base, 0, 1, next, out);
  const int chords = std::min(max_edges - base, std::uniform_int_distribution<int>(0, 2)(rng));
  for (int c = 0; c < chords; ++c) {
    std::uniform_int_distribution<int> pick(0, next - 1);
    const int a = pick(rng), b = pick(rng);
    if (a != b) out.emplace_back(a, b);
  }
  return ibplab::strip_irrelevant(to_network(out, next));
}

std::vector<ibplab::CostFunction> random_affine_costs(Rng& rng, std::size_t m, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::bernoulli_distribution zero(0.2);
  std::vector<ibplab::CostFunction> out;
  for (std::size_t e = 0; e < m; ++e) {
    const double a = zero(rng) ? 0.0 : std::exp(u(rng));
    const double b = zero(rng) ? 0.0 : std::exp(u(rng));
    out.push_back(ibplab::CostFunction::affine(a, b));
  }
  return out;
}

std::vector<bool> random_info_set(Rng& rng, const ibplab::Network& net, double keep) {
  std::bernoulli_distribution coin(keep);
  const auto routes = ibplab::enumerate_routes(net);
  std::vector<bool> mask(net.num_edges());
  for (std::size_t e = 0; e < mask.size(); ++e) mask[e] = coin(rng);
  const auto& r = routes[std::uniform_int_distribution<std::size_t>(0, routes.size() - 1)(rng)];
  for (const std::size_t e : r.edges) mask[e] = true;
  return mask;
}

}  // namespace gen
