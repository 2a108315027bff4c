#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "fixtures.hpp"
#include "generators.hpp"
#include "ibplab/efficiency.hpp"
#include "ibplab/paradox.hpp"
#include "ibplab/topology.hpp"
#include "properties.hpp"

using namespace ibplab;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::vector<std::pair<Certificate, double>> g_certificates;

void record(const Certificate& c, double cost_scale) { g_certificates.emplace_back(c, cost_scale); }

double max_route_cost(const FlowProfile& p) {
  double m = 0.0;
  for (const auto& c : p.route_costs)
    if (c.size() > 0) m = std::max(m, c.maxCoeff());
  return m;
}

void record(const Solution& s) { record(s.certificate, max_route_cost(s.profile)); }

void record(const IbpVerdict& v) {
  if (v.pre_solution) record(*v.pre_solution);
  if (v.post_solution) record(*v.post_solution);
}

int jobs() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

double log_uniform(gen::Rng& rng, double lo, double hi) {
  return std::exp(std::uniform_real_distribution<double>(std::log(lo), std::log(hi))(rng));
}

double route_flow(const Solution& sol, const InstanceSpec& inst, const std::string& type,
                  const std::vector<std::string>& edges) {
  const std::size_t i = inst.type_index(type);
  std::vector<std::size_t> ids;
  for (const auto& e : edges) ids.push_back(inst.network.edge_index(e));
  const auto r = sol.profile.routes->find(i, ids);
  return r ? sol.profile.route_flows[i][static_cast<Eigen::Index>(*r)] : 0.0;
}

Verdict example1_closed_forms() {
  const double a = 1.0;
  double worst = 0.0;
  for (const double s : {0.3, 0.5, 0.9}) {
    const InstanceSpec inst = fixtures::example1(a, s);
    const Solution sol = solve_icwe(inst);
    record(sol);
    const bool low = s <= (2 + a) / (3 + 2 * a);
    const double c1 = low ? s * (a + 2) : (2 + a) * (2 + a) / (3 + 2 * a);
    const double c2 = low ? (1 - s) * (1 + a) + 1 : c1;
    worst = std::max({worst, std::abs(sol.profile.type_costs[0] - c1), std::abs(sol.profile.type_costs[1] - c2)});
  }
  return {worst <= 1e-5, "max abs error " + fmt("%.2e", worst)};
}

Verdict example2b_regression() {
  const InstanceSpec inst = fixtures::example2b(false);
  const ExpansionSpec x{"1", {"e1"}, false};
  const IbpVerdict v = check_ibp(inst, x);
  record(v);
  const InstanceSpec post = apply_expansion(inst, x);
  const Solution& a = *v.pre_solution;
  const Solution& b = *v.post_solution;
  const double errors[] = {
      route_flow(a, inst, "2", {"e1", "e4"}) - 1.0,
      route_flow(a, inst, "2", {"e5"}),
      route_flow(a, inst, "1", {"e2", "e3"}) - 0.75,
      route_flow(a, inst, "1", {"e5"}) - 2.5,
      route_flow(b, post, "2", {"e1", "e4"}),
      route_flow(b, post, "2", {"e5"}) - 1.0,
      route_flow(b, post, "1", {"e2", "e3"}),
      route_flow(b, post, "1", {"e1", "e3"}) - 1.5,
      route_flow(b, post, "1", {"e5"}) - 1.75,
      v.pre_costs[0] - 2.5,
      v.pre_costs[1] - 2.5,
      v.post_costs[0] - 2.75,
      v.post_costs[1] - 2.75,
  };
  double worst = 0.0;
  for (const double e : errors) worst = std::max(worst, std::abs(e));
  const bool margin_ok = std::abs(v.margin - 0.25) <= 1e-4;
  return {v.occurs && margin_ok && worst <= 1e-5,
          "max abs error " + fmt("%.2e", worst) + ", margin " + fmt("%.6f", v.margin)};
}

Verdict braess_regression() {
  const IbpCase c = pattern_witness_instance(Pattern::fig4a);
  const IbpVerdict v = check_ibp(c.instance, c.expansion);
  record(v);
  const double err = std::max(std::abs(v.pre - 1.5), std::abs(v.post - 2.0));
  return {v.occurs && err <= 1e-5, "cost " + fmt("%.6f", v.pre) + " -> " + fmt("%.6f", v.post)};
}

Verdict affine_family() {
  gen::Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int occurs = 0, total = 0;
  std::string note;
  for (int k = 0; k < 50; ++k) {
    const double a1 = log_uniform(rng, 0.1, 10), a3 = log_uniform(rng, 0.1, 10);
    const double a5 = (a1 + a3) * (0.02 + 0.96 * u(rng));
    const auto [lo, hi] = ibp_family_interval(a1, a3, a5);
    for (const double t : {0.25, 0.5, 0.75}) {
      ++total;
      try {
        const IbpCase c = generate_ibp_family(a1, a3, a5, lo + t * (hi - lo), log_uniform(rng, 0.5, 5));
        const IbpVerdict v = check_ibp(c.instance, c.expansion);
        record(v);
        if (v.occurs) ++occurs;
      } catch (const std::exception& e) {
        if (note.empty()) note = std::string(", first failure: ") + e.what();
      }
    }
  }
  return {occurs == total, std::to_string(occurs) + "/" + std::to_string(total) + " occur" + note};
}

Verdict oracle_equivalence() {
  auto corpus = gen::all_small_networks(6);
  const std::size_t small = corpus.size();
  gen::Rng rng(5);
  for (int k = 0; k < 300; ++k) corpus.push_back(gen::random_composed(rng, 10));
  int agree = 0, inconclusive = 0;
  for (const auto& net : corpus) {
    bool found = false;
    for (const Pattern p : kAllPatterns) {
      const EmbedResult r = embeds(pattern_network(p), net);
      if (r.status == EmbedStatus::inconclusive) ++inconclusive;
      if (r.status == EmbedStatus::found) {
        found = true;
        break;
      }
    }
    if (classify(net).is_sli != found) ++agree;
  }
  return {agree == static_cast<int>(corpus.size()) && inconclusive == 0,
          std::to_string(agree) + "/" + std::to_string(corpus.size()) + " agree (" + std::to_string(small) +
              " small), " + std::to_string(inconclusive) + " inconclusive"};
}

Verdict search_suite(bool restricted, int networks, int trials) {
  gen::Rng rng(restricted ? 7 : 6);
  int hits = 0, skipped = 0, done = 0;
  for (int n = 0; n < networks; ++n) {
    const Network net = restricted ? gen::random_sp(rng, 4 + n % 7) : gen::random_sli(rng, 4 + n % 7);
    SearchOptions o;
    o.trials = trials;
    o.seed = 1000 + static_cast<std::uint64_t>(n);
    o.jobs = jobs();
    o.restricted = restricted;
    const SearchResult r = search_ibp(net, o);
    hits += static_cast<int>(r.hits.size());
    skipped += r.skipped;
    done += r.trials;
  }
  return {hits == 0 && skipped == 0, std::to_string(hits) + " occurrences in " + std::to_string(done) +
                                         " trials, " + std::to_string(skipped) + " skipped"};
}

Verdict li_property_suites() {
  gen::Rng rng(8);
  props::Outcome load, gains, split, maxmin;
  for (int k = 0; k < 200; ++k) {
    const Network li = gen::random_li(rng, 2 + k % 9);
    load += props::monotone_load(rng, li);
    gains += props::some_type_gains(rng, li);
    maxmin += props::max_min(rng, li);
    split += props::series_split(rng, gen::random_composed(rng, 6), gen::random_composed(rng, 6));
  }
  const int bad = load.violations + gains.violations + split.violations + maxmin.violations;
  std::ostringstream os;
  os << "violations/checks: load " << load.violations << "/" << load.checks << ", series " << split.violations
     << "/" << split.checks << ", max-min " << maxmin.violations << "/" << maxmin.checks << ", expansion "
     << gains.violations << "/" << gains.checks;
  for (const auto* o : {&load, &split, &maxmin, &gains})
    if (o->violations > 0) {
      os << "; " << o->first;
      break;
    }
  return {bad == 0, os.str()};
}

Verdict uniqueness() {
  gen::Rng rng(9);
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const InstanceSpec inst = props::random_instance(rng, gen::random_composed(rng, 8), 3, false);
    SolveOptions o;
    o.seed = rng();
    const UniquenessReport r = check_essential_uniqueness(inst, 5, o);
    for (const auto& s : r.solutions) record(s);
    worst = std::max(worst, r.max_edge_cost_spread);
  }
  return {worst <= 1e-5, "max edge-cost spread " + fmt("%.2e", worst)};
}

Verdict efficiency() {
  const EfficiencyReport pigou = efficiency_report(fixtures::pigou());
  const EfficiencyReport ex4 = efficiency_report(fixtures::example4(1, 0.25, 1));
  record(pigou.cwe_certificate, pigou.type_costs.maxCoeff());
  record(ex4.cwe_certificate, ex4.type_costs.maxCoeff());
  const bool fixed = std::abs(pigou.ratio - 0.75) <= 1e-6 && std::abs(ex4.ratio - 0.8) <= 1e-5 &&
                     std::abs(ex4.type_ratio[0] - 0.5) <= 1e-5;
  gen::Rng rng(10);
  double lowest = 1.0;
  for (int k = 0; k < 500; ++k) {
    const InstanceSpec inst = props::random_instance(rng, gen::random_composed(rng, 8), 3, false);
    const EfficiencyReport r = efficiency_report(inst);
    record(r.cwe_certificate, r.type_costs.maxCoeff());
    lowest = std::min(lowest, r.ratio);
  }
  return {fixed && lowest >= 0.75 - 1e-6, "Pigou " + fmt("%.8f", pigou.ratio) + ", example4 " +
                                              fmt("%.6f", ex4.ratio) + " / type 1 " + fmt("%.6f", ex4.type_ratio[0]) +
                                              ", sweep minimum " + fmt("%.6f", lowest)};
}

Verdict gradient_and_gap() {
  gen::Rng rng(11);
  props::Outcome grad;
  for (int k = 0; k < 100; ++k) grad += props::gradient_check(rng, gen::random_composed(rng, 8));
  for (int k = 0; k < 100; ++k) record(solve_icwe(props::random_instance(rng, gen::random_composed(rng, 8), 3, false)));
  props::Outcome gap;
  for (const auto& [c, scale] : g_certificates) gap += props::residual_within_gap(c, scale);
  std::ostringstream os;
  os << "gradient " << grad.violations << "/" << grad.checks << " off, residual above gap " << gap.violations << "/"
     << gap.checks;
  if (grad.violations) os << "; " << grad.first;
  if (gap.violations) os << "; " << gap.first;
  return {grad.violations == 0 && gap.violations == 0, os.str()};
}

Verdict triangle() {
  gen::Rng rng(12);
  std::bernoulli_distribution zero(0.25);
  int occurs = 0, total = 0;
  for (int k = 0; k < 500; ++k) {
    std::vector<CostFunction> costs;
    for (int e = 0; e < 3; ++e)
      costs.push_back(CostFunction::affine(zero(rng) ? 0.0 : log_uniform(rng, 1e-2, 10),
                                           zero(rng) ? 0.0 : log_uniform(rng, 1e-2, 10)));
    const IbpCase c = fixtures::fig8_case(1 + k % 4, costs, log_uniform(rng, 0.1, 10), log_uniform(rng, 0.1, 10),
                                          log_uniform(rng, 0.1, 10));
    const IbpVerdict v = check_ibp(c.instance, c.expansion);
    record(v);
    ++total;
    if (v.occurs) ++occurs;
  }
  return {occurs == 0, std::to_string(occurs) + " occurrences in " + std::to_string(total) + " configurations"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"example1 closed forms", example1_closed_forms},
      {"example2b flows, costs and margin", example2b_regression},
      {"Wheatstone bridge 3/2 -> 2", braess_regression},
      {"affine family 150 cases", affine_family},
      {"SLI recognition vs embedding oracle", oracle_equivalence},
      {"no paradox on SLI networks", [] { return search_suite(false, 20, 1000); }},
      {"no restricted paradox on SP networks", [] { return search_suite(true, 20, 500); }},
      {"LI and series property suites", li_property_suites},
      {"essential uniqueness", uniqueness},
      {"efficiency ratios", efficiency},
      {"gradient and residual/gap numerics", gradient_and_gap},
      {"triangle with two OD pairs", triangle},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.2fs]\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
