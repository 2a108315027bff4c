#include "ibplab/paradox.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iterator>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace ibplab {

namespace {

bool knows_everything(const UserType& t) {
  return std::all_of(t.info.begin(), t.info.end(), [](bool b) { return b; });
}

Solution solve_checked(const InstanceSpec& inst, const SolveOptions& options, const char* stage) {
  Solution sol = solve_icwe(inst, options);
  if (!sol.certificate.converged) {
    std::ostringstream msg;
    msg << stage << " solve did not converge (residual " << sol.certificate.residual << ", gap "
        << sol.certificate.gap << ")";
    throw NotConverged(msg.str());
  }
  return sol;
}

}  // namespace

void validate_expansion(const InstanceSpec& instance, const ExpansionSpec& expansion) {
  const std::size_t k = instance.type_index(expansion.type);
  const UserType& t = instance.types[k];
  if (expansion.added.empty()) throw InputError("expansion adds no edges");
  std::set<EdgeId> seen;
  for (const EdgeId& id : expansion.added) {
    const auto e = instance.network.find_edge(id);
    if (!e) throw InputError("expansion names unknown edge '" + id + "'");
    if (t.info[*e]) throw InputError("type '" + t.id + "' already knows edge '" + id + "'");
    if (!seen.insert(id).second) throw InputError("expansion repeats edge '" + id + "'");
  }
  if (!expansion.restricted) return;
  for (std::size_t i = 0; i < instance.types.size(); ++i)
    if (i != k && !knows_everything(instance.types[i]))
      throw InputError("restricted mode: type '" + instance.types[i].id + "' lacks full information");
  std::size_t known = static_cast<std::size_t>(std::count(t.info.begin(), t.info.end(), true));
  if (known + expansion.added.size() != instance.network.num_edges())
    throw InputError("restricted mode: expansion must reach full information");
}

InstanceSpec apply_expansion(const InstanceSpec& instance, const ExpansionSpec& expansion) {
  validate_expansion(instance, expansion);
  InstanceSpec out = instance;
  UserType& t = out.types[out.type_index(expansion.type)];
  for (const EdgeId& id : expansion.added) t.info[out.network.edge_index(id)] = true;
  return out;
}

double ibp_threshold(const Certificate& before, const Certificate& after) {
  return std::max(1e-6, 10.0 * (before.residual + after.residual));
}

IbpVerdict check_ibp(const InstanceSpec& instance, const ExpansionSpec& expansion,
                     const SolveOptions& options) {
  const InstanceSpec expanded = apply_expansion(instance, expansion);
  const std::size_t k = instance.type_index(expansion.type);
  IbpVerdict v;
  v.type = expansion.type;
  Solution pre = solve_checked(instance, options, "pre-expansion");
  Solution post = solve_checked(expanded, options, "post-expansion");
  v.pre_costs = pre.profile.type_costs;
  v.post_costs = post.profile.type_costs;
  v.pre = v.pre_costs[static_cast<Eigen::Index>(k)];
  v.post = v.post_costs[static_cast<Eigen::Index>(k)];
  v.margin = v.post - v.pre;
  v.before = pre.certificate;
  v.after = post.certificate;
  v.threshold = ibp_threshold(v.before, v.after);
  v.occurs = v.margin > v.threshold;
  v.pre_solution = std::move(pre);
  v.post_solution = std::move(post);
  return v;
}

IbpVerdict check_ibp_restricted(const InstanceSpec& instance, ExpansionSpec expansion,
                                const SolveOptions& options) {
  const std::size_t k = instance.type_index(expansion.type);
  const UserType& t = instance.types[k];
  for (std::size_t i = 0; i < instance.types.size(); ++i)
    if (i != k && !knows_everything(instance.types[i]))
      throw InputError("restricted mode: type '" + instance.types[i].id + "' lacks full information");
  expansion.restricted = true;
  if (expansion.added.empty()) {
    for (std::size_t e = 0; e < t.info.size(); ++e)
      if (!t.info[e]) expansion.added.push_back(instance.network.edge(e).id);
  }
  if (!expansion.added.empty()) return check_ibp(instance, expansion, options);

  IbpVerdict v;
  v.type = expansion.type;
  Solution sol = solve_checked(instance, options, "pre-expansion");
  v.pre_costs = v.post_costs = sol.profile.type_costs;
  v.pre = v.post = v.pre_costs[static_cast<Eigen::Index>(k)];
  v.before = v.after = sol.certificate;
  v.threshold = ibp_threshold(v.before, v.after);
  v.pre_solution = sol;
  v.post_solution = std::move(sol);
  return v;
}

// --- randomized search ----------------------------------------------------------------

IbpCase sample_trial(const Network& net, const SearchOptions& options, int trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                    static_cast<std::uint32_t>(trial)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = std::log(options.cost_low), log_hi = std::log(options.cost_high);
  auto coefficient = [&]() {
    if (unit(rng) < options.zero_probability) return 0.0;
    return std::exp(log_lo + (log_hi - log_lo) * unit(rng));
  };

  const std::size_t m = net.num_edges();
  std::vector<CostFunction> costs;
  for (std::size_t e = 0; e < m; ++e) {
    const double a = coefficient();
    const double b = coefficient();
    costs.push_back(CostFunction::affine(a, b));
  }

  const auto routes = enumerate_routes(net);
  auto random_route = [&]() -> const Route& {
    return routes[std::uniform_int_distribution<std::size_t>(0, routes.size() - 1)(rng)];
  };
  auto random_info = [&](double keep) {
    std::vector<bool> info(m, false);
    for (std::size_t e = 0; e < m; ++e) info[e] = unit(rng) < keep;
    for (const std::size_t e : random_route().edges) info[e] = true;
    return info;
  };
  auto route_only = [&]() {
    std::vector<bool> info(m, false);
    for (const std::size_t e : random_route().edges) info[e] = true;
    return info;
  };
  auto full = [](const std::vector<bool>& info) {
    return std::all_of(info.begin(), info.end(), [](bool b) { return b; });
  };

  const int k = std::uniform_int_distribution<int>(1, std::max(1, options.max_types))(rng);
  InstanceSpec inst;
  inst.network = net;
  inst.costs = std::move(costs);
  inst.od_pairs.push_back({net.origin_index(), net.destination_index(), {}});
  for (int i = 0; i < k; ++i) {
    UserType t;
    t.id = std::to_string(i + 1);
    t.demand = std::exp(std::log(0.1) + (std::log(10.0) - std::log(0.1)) * unit(rng));
    if (options.restricted && i > 0)
      t.info.assign(m, true);
    else
      t.info = random_info(unit(rng));
    inst.od_pairs[0].types.push_back(inst.types.size());
    inst.types.push_back(std::move(t));
  }
  UserType& first = inst.types[0];
  if (full(first.info)) first.info = route_only();

  ExpansionSpec exp;
  exp.type = first.id;
  exp.restricted = options.restricted;
  std::vector<std::size_t> unknown;
  for (std::size_t e = 0; e < m; ++e)
    if (!first.info[e]) unknown.push_back(e);
  if (options.restricted) {
    for (const std::size_t e : unknown) exp.added.push_back(net.edge(e).id);
  } else if (!unknown.empty()) {
    std::shuffle(unknown.begin(), unknown.end(), rng);
    const std::size_t count = std::uniform_int_distribution<std::size_t>(1, unknown.size())(rng);
    std::sort(unknown.begin(), unknown.begin() + static_cast<std::ptrdiff_t>(count));
    for (std::size_t j = 0; j < count; ++j) exp.added.push_back(net.edge(unknown[j]).id);
  }
  validate_instance(inst);
  return {std::move(inst), std::move(exp)};
}

SearchResult search_ibp(const Network& net, const SearchOptions& options) {
  if (options.trials < 1) throw InputError("trials must be at least 1");
  if (options.jobs < 1) throw InputError("jobs must be at least 1");
  if (!(options.cost_low > 0.0) || !(options.cost_high >= options.cost_low))
    throw InputError("cost range must satisfy 0 < low <= high");
  validate_options(options.solve);
  enumerate_routes(net);  // surface RouteCapExceeded before spawning workers

  struct Slot {
    std::optional<SearchHit> hit;
    bool skipped = false;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(options.trials));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&]() {
    for (int trial = next++; trial < options.trials; trial = next++) {
      try {
        IbpCase c = sample_trial(net, options, trial);
        if (c.expansion.added.empty()) continue;
        IbpVerdict v = check_ibp(c.instance, c.expansion, options.solve);
        if (v.occurs) slots[static_cast<std::size_t>(trial)].hit = SearchHit{trial, std::move(c), std::move(v)};
      } catch (const NotConverged&) {
        slots[static_cast<std::size_t>(trial)].skipped = true;
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = options.trials;
      }
    }
  };

  const int jobs = std::min(options.jobs, options.trials);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  SearchResult result;
  result.trials = options.trials;
  for (auto& s : slots) {
    if (s.skipped) ++result.skipped;
    if (s.hit) result.hits.push_back(std::move(*s.hit));
  }
  return result;
}

// --- affine family on the two-diamond network -------------------------------------------

std::pair<double, double> ibp_family_interval(double a1, double a3, double a5) {
  const double t = a1 + a3 + a5;
  const double lower = (a1 + a3) / t;
  const double q = a3 * a5 + a3 * a1 + a1 * a5;
  const double upper = ((a3 + a5) * (a3 * a5 + a1 * a1 + a1 * a3 + a1 * a5) - a1 * a5 * a5) / (t * q);
  return {lower, std::min(upper, 1.0)};
}

IbpCase generate_ibp_family(double a1, double a3, double a5, double s_fraction, double total_demand) {
  if (!(a1 > 0.0 && a3 > 0.0 && a5 > 0.0)) throw InputError("a1, a3, a5 must be positive");
  if (!(a1 + a3 > a5)) throw InputError("a1 + a3 > a5 required");
  if (!(total_demand > 0.0)) throw InputError("total demand must be positive");
  const auto [lo, hi] = ibp_family_interval(a1, a3, a5);
  if (!(s_fraction > lo && s_fraction < hi)) {
    std::ostringstream msg;
    msg << "s_fraction " << s_fraction << " outside (" << lo << ", " << hi << ")";
    throw InputError(msg.str());
  }
  const double t = a1 + a3 + a5;
  const double s = total_demand;
  const double b2 = a1 * a5 * s / t;
  const double b4 = a5 * a3 * s / t;
  const double a2 = a5 * a5 * (s_fraction * t - a1) / (a5 * t * s_fraction - a1 * t * (1.0 - s_fraction) - a3 * a5) -
                    a3 - a5;
  if (!(a2 >= 0.0)) throw InputError("parameters give a negative slope on e2");

  IbpCase c;
  c.instance = make_instance(pattern_network(Pattern::fig4b),
                             {CostFunction::affine(a1, 0.0), CostFunction::affine(a2, b2), CostFunction::affine(a3, 0.0),
                              CostFunction::constant(b4), CostFunction::affine(a5, 0.0)},
                             {{"1", s_fraction * s, {"e2", "e3", "e5"}}, {"2", (1.0 - s_fraction) * s, {"e1", "e4", "e5"}}});
  c.expansion = {"1", {"e1"}, false};
  return c;
}

// --- stored witnesses -------------------------------------------------------------------

IbpCase pattern_witness_instance(Pattern pattern) {
  const Network net = pattern_network(pattern);
  IbpCase c;
  if (pattern == Pattern::fig4a) {
    c.instance = make_instance(net,
                               {CostFunction::affine(1, 0), CostFunction::constant(1), CostFunction::constant(1),
                                CostFunction::affine(1, 0), CostFunction::constant(0)},
                               {{"1", 1.0, {"e1", "e2", "e3", "e4"}}});
    c.expansion = {"1", {"e5"}, false};
    return c;
  }
  std::vector<CostFunction> costs{CostFunction::affine(0.5, 0), CostFunction::affine(1, 0.75),
                                  CostFunction::affine(4.0 / 3.0, 0), CostFunction::constant(2),
                                  CostFunction::affine(1, 0)};
  std::vector<EdgeId> info1{"e2", "e3", "e5"};
  std::vector<EdgeId> info2{"e1", "e4", "e5"};
  for (std::size_t e = 5; e < net.num_edges(); ++e) {
    costs.push_back(CostFunction::constant(0));
    info1.push_back(net.edge(e).id);
    info2.push_back(net.edge(e).id);
  }
  c.instance = make_instance(net, std::move(costs), {{"1", 13.0 / 4.0, info1}, {"2", 1.0, info2}});
  c.expansion = {"1", {"e1"}, false};
  return c;
}

IbpCase restricted_witness_instance() {
  IbpCase c;
  c.instance = make_instance(pattern_network(Pattern::fig4a),
                             {CostFunction::affine(1, 0), CostFunction::constant(1), CostFunction::constant(1),
                              CostFunction::affine(1, 0), CostFunction::constant(0)},
                             {{"1", 0.8, {"e1", "e2", "e3", "e4"}}, {"2", 0.2, {"e1", "e2", "e3", "e4", "e5"}}});
  c.expansion = {"1", {"e5"}, true};
  return c;
}

// --- lifting through an embedding --------------------------------------------------------

namespace {

/// Walks a path from `start`; returns the far end or throws.
std::size_t walk(const Network& g, std::size_t start, const std::vector<EdgeId>& path,
                 std::vector<std::size_t>& visited, const std::string& what) {
  std::size_t at = start;
  visited.push_back(at);
  for (const EdgeId& id : path) {
    const auto e = g.find_edge(id);
    if (!e) throw InputError(what + ": unknown edge '" + id + "'");
    if (g.tail(*e) != at && g.head(*e) != at) throw InputError(what + ": path is not contiguous at '" + id + "'");
    at = g.other_end(*e, at);
    visited.push_back(at);
  }
  return at;
}

}  // namespace

void validate_witness(const Network& pattern, const Network& target, const EmbeddingWitness& w) {
  std::vector<std::size_t> image(pattern.num_vertices());
  std::set<std::size_t> image_set;
  for (std::size_t v = 0; v < pattern.num_vertices(); ++v) {
    const auto it = w.vertex_map.find(pattern.vertex(v));
    if (it == w.vertex_map.end()) throw InputError("witness: pattern vertex '" + pattern.vertex(v) + "' unmapped");
    const auto t = target.find_vertex(it->second);
    if (!t) throw InputError("witness: unknown target vertex '" + it->second + "'");
    if (!image_set.insert(*t).second) throw InputError("witness: vertex map is not injective");
    image[v] = *t;
  }
  if (w.vertex_map.size() != pattern.num_vertices()) throw InputError("witness: vertex map has extra entries");
  if (w.edge_paths.size() != pattern.num_edges()) throw InputError("witness: edge paths do not match pattern");

  std::set<std::string> used_edges;
  std::set<std::size_t> interior;
  auto take = [&](const std::vector<EdgeId>& path, std::size_t from, std::size_t to, bool allow_empty,
                  const std::string& what) {
    if (path.empty() && !allow_empty) throw InputError(what + ": empty path");
    std::vector<std::size_t> visited;
    const std::size_t end = walk(target, from, path, visited, what);
    if (end != to) throw InputError(what + ": path ends at the wrong vertex");
    for (const EdgeId& id : path)
      if (!used_edges.insert(id).second) throw InputError(what + ": edge '" + id + "' used twice");
    for (std::size_t i = 1; i + 1 < visited.size(); ++i) {
      if (image_set.count(visited[i]) || !interior.insert(visited[i]).second)
        throw InputError(what + ": paths are not internally disjoint");
    }
  };
  for (std::size_t e = 0; e < pattern.num_edges(); ++e) {
    const auto it = w.edge_paths.find(pattern.edge(e).id);
    if (it == w.edge_paths.end()) throw InputError("witness: pattern edge '" + pattern.edge(e).id + "' unmapped");
    take(it->second, image[pattern.tail(e)], image[pattern.head(e)], false, "witness edge " + it->first);
  }
  take(w.origin_path, target.origin_index(), image[pattern.origin_index()], true, "witness origin path");
  take(w.destination_path, image[pattern.destination_index()], target.destination_index(), true,
       "witness destination path");
}

LiftResult lift_witness(Pattern pattern, const Network& target, const EmbeddingWitness& witness,
                        const SolveOptions& options) {
  const Network h = pattern_network(pattern);
  validate_witness(h, target, witness);
  const IbpCase base = pattern_witness_instance(pattern);

  const std::size_t m = target.num_edges();
  std::vector<CostFunction> costs(m, CostFunction::affine(1, 0));
  std::vector<std::vector<bool>> info(base.instance.types.size(), std::vector<bool>(m, false));
  std::map<EdgeId, std::vector<EdgeId>> image;
  for (std::size_t e = 0; e < h.num_edges(); ++e) {
    const auto& path = witness.edge_paths.at(h.edge(e).id);
    image[h.edge(e).id] = path;
    const double k = static_cast<double>(path.size());
    for (const EdgeId& id : path) {
      const std::size_t g = target.edge_index(id);
      costs[g] = base.instance.costs[e].scaled(1.0 / k);
      for (std::size_t t = 0; t < info.size(); ++t) info[t][g] = base.instance.types[t].info[e];
    }
  }
  std::size_t extension = 0;
  for (const auto* path : {&witness.origin_path, &witness.destination_path})
    for (const EdgeId& id : *path) {
      const std::size_t g = target.edge_index(id);
      costs[g] = CostFunction::affine(1, 0);
      for (auto& mask : info) mask[g] = true;
      ++extension;
    }

  LiftResult out;
  out.extension_edges = extension;
  InstanceSpec& inst = out.instance.instance;
  inst.network = target;
  inst.costs = std::move(costs);
  inst.od_pairs.push_back({target.origin_index(), target.destination_index(), {}});
  for (std::size_t t = 0; t < base.instance.types.size(); ++t) {
    UserType u = base.instance.types[t];
    u.info = info[t];
    u.od = 0;
    inst.od_pairs[0].types.push_back(t);
    inst.types.push_back(std::move(u));
  }
  validate_instance(inst);
  out.instance.expansion = {base.expansion.type, {}, false};
  for (const EdgeId& id : base.expansion.added)
    for (const EdgeId& g : image.at(id)) out.instance.expansion.added.push_back(g);

  const IbpVerdict pattern_verdict = check_ibp(base.instance, base.expansion, options);
  out.pattern_pre = pattern_verdict.pre;
  out.verdict = check_ibp(inst, out.instance.expansion, options);
  if (!out.verdict.occurs)
    throw ConstructionFailure("lifted " + pattern_name(pattern) + " instance shows no paradox (margin " +
                              std::to_string(out.verdict.margin) + ")");
  return out;
}

// --- several OD pairs ---------------------------------------------------------------------

MultiOdReport check_multi_od_sufficient(const InstanceSpec& instance) {
  MultiOdReport report;
  struct Relevant {
    std::string name;
    std::set<EdgeId> edges;
    std::vector<LiBlock> blocks;
  };
  std::vector<Relevant> nets;
  bool sli = true;
  for (std::size_t od = 0; od < instance.od_pairs.size(); ++od) {
    const Network g = strip_irrelevant(instance.od_network(od));
    Relevant r;
    r.name = g.origin() + "->" + g.destination();
    for (const Edge& e : g.edges()) r.edges.insert(e.id);
    const TopologyReport t = classify(g);
    if (!t.is_sli) {
      sli = false;
      report.reasons.push_back("relevant network " + r.name + " is not SLI");
    }
    r.blocks = t.li_blocks;
    nets.push_back(std::move(r));
  }
  if (!sli) return report;

  auto terminals = [](const LiBlock& b) {
    return std::minmax(b.network.origin(), b.network.destination());
  };
  bool shared_ok = true;
  for (std::size_t i = 0; i < nets.size(); ++i)
    for (std::size_t j = i + 1; j < nets.size(); ++j) {
      std::set<EdgeId> common;
      std::set_intersection(nets[i].edges.begin(), nets[i].edges.end(), nets[j].edges.begin(), nets[j].edges.end(),
                            std::inserter(common, common.end()));
      if (common.empty()) continue;
      std::set<EdgeId> coincident;
      for (const LiBlock& a : nets[i].blocks)
        for (const LiBlock& b : nets[j].blocks) {
          const std::set<EdgeId> ea(a.edges.begin(), a.edges.end()), eb(b.edges.begin(), b.edges.end());
          if (ea == eb && terminals(a) == terminals(b)) coincident.insert(ea.begin(), ea.end());
        }
      if (coincident != common) {
        shared_ok = false;
        report.reasons.push_back("relevant networks " + nets[i].name + " and " + nets[j].name +
                                 " share edges outside their coincident LI blocks");
      }
    }
  report.guaranteed_no_ibp = shared_ok;
  if (shared_ok) report.reasons.push_back("every relevant network is SLI and overlaps are coincident LI blocks");
  return report;
}

}  // namespace ibplab
