#include "ibplab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

namespace ibplab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

/// Separable convex objective sum_e F_e(f_e) with gradient g_e = F_e'.
class Objective {
 public:
  Objective(const InstanceSpec& instance, bool social) : costs_(instance.costs), social_(social) {
    linear_ = std::all_of(costs_.begin(), costs_.end(), [](const CostFunction& c) {
      return c.kind() != CostFunction::Kind::piecewise_linear && c.degree() <= 1;
    });
    if (social_)
      for (const auto& c : costs_)
        if (!c.is_convex()) throw InputError("social optimum requires convex piecewise-linear costs");
  }

  double gradient(std::size_t e, double x) const {
    return social_ ? costs_[e].marginal(x) : costs_[e](x);
  }
  double value(std::size_t e, double x) const {
    return social_ ? x * costs_[e](x) : costs_[e].integral(x);
  }
  /// Slope of the gradient for affine costs.
  double slope(std::size_t e) const {
    const auto& k = costs_[e].coefficients();
    const double a = k.size() > 1 ? k[1] : 0.0;
    return social_ ? 2.0 * a : a;
  }
  bool linear() const { return linear_; }
  std::size_t size() const { return costs_.size(); }

 private:
  const std::vector<CostFunction>& costs_;
  bool social_;
  bool linear_ = false;
};

struct Move {
  std::vector<std::size_t> edges;
  std::vector<double> delta;
};

class Solver {
 public:
  Solver(const InstanceSpec& instance, std::shared_ptr<const RouteSets> routes, const SolveOptions& options,
         bool social)
      : instance_(instance), routes_(std::move(routes)), options_(options), objective_(instance, social) {
    const std::size_t k = instance.types.size();
    x_.resize(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto n = static_cast<Eigen::Index>(routes_->routes[i].size());
      if (n == 0) throw InputError("type '" + instance.types[i].id + "' has no available route");
      x_[i] = Eigen::VectorXd::Zero(n);
    }
    initialize();
  }

  Solution run() {
    const std::size_t k = instance_.types.size();
    Certificate cert;
    const double phi0 = objective_value();
    cert.gap_tolerance = options_.gap_tolerance * std::max(1.0, phi0);
    int iteration = 0;
    double best_residual = std::numeric_limits<double>::infinity();
    int stall = 0;
    bool within = false;
    for (;;) {
      const Measures m = measure();
      cert.residual_tolerance = options_.residual_tolerance * std::max(1.0, m.cost_scale);
      if (options_.record_history) cert.history.push_back(objective_value());
      within = m.gap <= cert.gap_tolerance && m.residual <= cert.residual_tolerance;
      const double floor = 64.0 * kEps * std::max(1.0, m.cost_scale);
      if (within) {
        if (!options_.polish || m.residual <= floor) break;
        if (m.residual < 0.5 * best_residual) {
          best_residual = m.residual;
          stall = 0;
        } else if (++stall > 1000) {
          break;
        }
      }
      if (iteration >= options_.max_iterations) break;
      ++iteration;
      if (iteration % 64 == 0) resync();
      if (options_.direction == Direction::classic) {
        classic_step(iteration);
      } else {
        bool moved = false;
        for (std::size_t i = 0; i < k; ++i) moved = pairwise_step(i) || moved;
        if (!moved) break;
      }
    }
    resync();
    const Measures m = measure();
    cert.iterations = iteration;
    cert.gap = m.gap;
    cert.residual = m.residual;
    cert.residual_tolerance = options_.residual_tolerance * std::max(1.0, m.cost_scale);
    cert.converged = m.gap <= cert.gap_tolerance && m.residual <= cert.residual_tolerance;
    cert.potential = objective_value();

    Solution out;
    out.profile = evaluate_flow(instance_, routes_, x_);
    out.certificate = std::move(cert);
    return out;
  }

 private:
  struct Measures {
    double gap = 0.0;
    double residual = 0.0;
    double cost_scale = 0.0;
  };

  void initialize() {
    std::mt19937_64 rng(options_.seed);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double s = instance_.types[i].demand;
      if (options_.random_start) {
        std::gamma_distribution<double> gamma(1.0, 1.0);
        Eigen::VectorXd w(x_[i].size());
        for (Eigen::Index r = 0; r < w.size(); ++r) w[r] = gamma(rng) + 1e-12;
        x_[i] = s * w / w.sum();
      } else {
        x_[i][0] = s;
      }
    }
    resync();
  }

  /// Recomputes edge flows and gradients from route flows.
  void resync() {
    f_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(objective_.size()));
    for (std::size_t i = 0; i < x_.size(); ++i) f_ += routes_->incidence[i].transpose() * x_[i];
    g_.resize(f_.size());
    for (Eigen::Index e = 0; e < f_.size(); ++e) g_[e] = objective_.gradient(static_cast<std::size_t>(e), f_[e]);
  }

  double objective_value() const {
    double v = 0.0;
    for (Eigen::Index e = 0; e < f_.size(); ++e) v += objective_.value(static_cast<std::size_t>(e), f_[e]);
    return v;
  }

  Measures measure() const {
    Measures m;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const Eigen::VectorXd c = routes_->incidence[i] * g_;
      const double cmin = c.minCoeff();
      m.cost_scale = std::max(m.cost_scale, std::abs(cmin));
      const double threshold = options_.activity_fraction * instance_.types[i].demand;
      for (Eigen::Index r = 0; r < c.size(); ++r) {
        m.gap += x_[i][r] * (c[r] - cmin);
        if (x_[i][r] > threshold) m.residual = std::max(m.residual, c[r] - cmin);
      }
    }
    return m;
  }

  /// Minimizes the objective along f + t d for t in [0, tmax].
  double line_search(const Move& d, double tmax) const {
    auto h = [&](double t) {
      double s = 0.0;
      for (std::size_t k = 0; k < d.edges.size(); ++k)
        s += objective_.gradient(d.edges[k], f_[static_cast<Eigen::Index>(d.edges[k])] + t * d.delta[k]) * d.delta[k];
      return s;
    };
    const double h0 = h(0.0);
    if (h0 >= 0.0) return 0.0;
    if (objective_.linear()) {
      double curvature = 0.0;
      for (std::size_t k = 0; k < d.edges.size(); ++k)
        curvature += objective_.slope(d.edges[k]) * d.delta[k] * d.delta[k];
      if (curvature <= 0.0) return tmax;
      return std::min(tmax, -h0 / curvature);
    }
    if (h(tmax) <= 0.0) return tmax;
    double lo = 0.0, hi = tmax;
    for (int it = 0; it < 200 && hi - lo > 4.0 * kEps * tmax; ++it) {
      const double mid = 0.5 * (lo + hi);
      (h(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  void apply(const Move& d, double t) {
    for (std::size_t k = 0; k < d.edges.size(); ++k) {
      const auto e = static_cast<Eigen::Index>(d.edges[k]);
      f_[e] = std::max(0.0, f_[e] + t * d.delta[k]);
      g_[e] = objective_.gradient(d.edges[k], f_[e]);
    }
  }

  bool pairwise_step(std::size_t i) {
    const double s = instance_.types[i].demand;
    if (s <= 0.0 || x_[i].size() < 2) return false;
    const Eigen::VectorXd c = routes_->incidence[i] * g_;
    Eigen::Index best = 0, worst = -1;
    for (Eigen::Index r = 1; r < c.size(); ++r)
      if (c[r] < c[best]) best = r;
    for (Eigen::Index r = 0; r < c.size(); ++r)
      if (x_[i][r] > 0.0 && r != best && (worst < 0 || c[r] > c[worst])) worst = r;
    if (worst < 0 || c[worst] <= c[best]) return false;

    Move d;
    std::map<std::size_t, double> delta;
    for (const std::size_t e : routes_->routes[i][static_cast<std::size_t>(best)].edges) delta[e] += 1.0;
    for (const std::size_t e : routes_->routes[i][static_cast<std::size_t>(worst)].edges) delta[e] -= 1.0;
    for (const auto& [e, v] : delta)
      if (v != 0.0) {
        d.edges.push_back(e);
        d.delta.push_back(v);
      }
    const double tmax = x_[i][worst];
    const double t = line_search(d, tmax);
    if (t <= 0.0) return false;
    if (t >= tmax) {
      x_[i][best] += x_[i][worst];
      x_[i][worst] = 0.0;
    } else {
      x_[i][best] += t;
      x_[i][worst] -= t;
    }
    apply(d, t);
    return true;
  }

  void classic_step(int iteration) {
    // All-or-nothing target: each type's demand on its cheapest route.
    Eigen::VectorXd y = Eigen::VectorXd::Zero(f_.size());
    std::vector<Eigen::Index> target(x_.size(), 0);
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const Eigen::VectorXd c = routes_->incidence[i] * g_;
      Eigen::Index best = 0;
      for (Eigen::Index r = 1; r < c.size(); ++r)
        if (c[r] < c[best]) best = r;
      target[i] = best;
      for (const std::size_t e : routes_->routes[i][static_cast<std::size_t>(best)].edges)
        y[static_cast<Eigen::Index>(e)] += instance_.types[i].demand;
    }
    Move d;
    for (Eigen::Index e = 0; e < f_.size(); ++e) {
      const double v = y[e] - f_[e];
      if (v != 0.0) {
        d.edges.push_back(static_cast<std::size_t>(e));
        d.delta.push_back(v);
      }
    }
    const double t = options_.step == StepRule::harmonic ? 2.0 / (iteration + 2.0) : line_search(d, 1.0);
    if (t <= 0.0) return;
    for (std::size_t i = 0; i < x_.size(); ++i) {
      x_[i] *= (1.0 - t);
      x_[i][target[i]] += t * instance_.types[i].demand;
    }
    apply(d, t);
  }

  const InstanceSpec& instance_;
  std::shared_ptr<const RouteSets> routes_;
  SolveOptions options_;
  Objective objective_;
  std::vector<Eigen::VectorXd> x_;
  Eigen::VectorXd f_;
  Eigen::VectorXd g_;
};

}  // namespace

void validate_options(const SolveOptions& options) {
  if (options.max_iterations < 1) throw InputError("max iterations must be at least 1");
  if (!(options.gap_tolerance > 0.0) || !(options.residual_tolerance > 0.0) || !(options.activity_fraction > 0.0))
    throw InputError("tolerances must be positive");
}

Solution solve_icwe(const InstanceSpec& instance, std::shared_ptr<const RouteSets> routes,
                    const SolveOptions& options) {
  validate_options(options);
  return Solver(instance, std::move(routes), options, false).run();
}

Solution solve_icwe(const InstanceSpec& instance, const SolveOptions& options) {
  return solve_icwe(instance, std::make_shared<const RouteSets>(RouteSets::build(instance)), options);
}

SocialOptimum solve_social_optimum(const InstanceSpec& instance, const SolveOptions& options) {
  validate_options(options);
  auto routes = std::make_shared<const RouteSets>(RouteSets::build(instance));
  Solution s = Solver(instance, routes, options, true).run();
  SocialOptimum out;
  out.objective = total_cost(instance, s.profile.edge_flows);
  out.profile = std::move(s.profile);
  out.certificate = std::move(s.certificate);
  return out;
}

Certificate verify_equilibrium(const InstanceSpec& instance, const FlowProfile& profile, double tolerance,
                               double activity_fraction) {
  const std::size_t k = instance.types.size();
  const Network& net = instance.network;
  if (profile.route_flows.size() != k) throw InputError("profile does not match the instance");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.num_edges()));
  for (std::size_t i = 0; i < k; ++i) {
    const auto& rs = profile.routes->routes[i];
    const double s = instance.types[i].demand;
    const double sum = profile.route_flows[i].sum();
    if (std::abs(sum - s) > feasibility_tolerance(s) || (profile.route_flows[i].array() < 0.0).any())
      throw InputError("profile is infeasible for type '" + instance.types[i].id + "'");
    for (std::size_t r = 0; r < rs.size(); ++r)
      for (const std::size_t e : rs[r].edges) f[static_cast<Eigen::Index>(e)] += profile.route_flows[i][static_cast<Eigen::Index>(r)];
  }
  Certificate cert;
  double scale = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto& rs = profile.routes->routes[i];
    std::vector<double> c(rs.size(), 0.0);
    for (std::size_t r = 0; r < rs.size(); ++r)
      for (const std::size_t e : rs[r].edges) c[r] += instance.costs[e](f[static_cast<Eigen::Index>(e)]);
    const double cmin = *std::min_element(c.begin(), c.end());
    scale = std::max(scale, std::abs(cmin));
    const double threshold = activity_fraction * instance.types[i].demand;
    for (std::size_t r = 0; r < rs.size(); ++r) {
      const double x = profile.route_flows[i][static_cast<Eigen::Index>(r)];
      cert.gap += x * (c[r] - cmin);
      if (x > threshold) cert.residual = std::max(cert.residual, c[r] - cmin);
    }
  }
  cert.potential = potential<double>(instance, f);
  cert.residual_tolerance = tolerance;
  cert.converged = cert.residual <= tolerance;
  return cert;
}

std::vector<Eigen::VectorXd> potential_gradient(const InstanceSpec& instance, const RouteSets& routes,
                                                const std::vector<Eigen::VectorXd>& route_flows) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(instance.network.num_edges()));
  for (std::size_t i = 0; i < route_flows.size(); ++i) f += routes.incidence[i].transpose() * route_flows[i];
  Eigen::VectorXd c(f.size());
  for (Eigen::Index e = 0; e < f.size(); ++e) c[e] = instance.costs[static_cast<std::size_t>(e)](f[e]);
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < route_flows.size(); ++i) out.push_back(routes.incidence[i] * c);
  return out;
}

UniquenessReport check_essential_uniqueness(const InstanceSpec& instance, int runs, const SolveOptions& options,
                                            double tolerance) {
  if (runs < 2) throw InputError("uniqueness check needs at least two runs");
  auto routes = std::make_shared<const RouteSets>(RouteSets::build(instance));
  UniquenessReport report;
  report.runs = runs;
  report.tolerance = tolerance;
  std::seed_seq seq{options.seed};
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(runs));
  seq.generate(seeds.begin(), seeds.end());
  for (int k = 0; k < runs; ++k) {
    SolveOptions o = options;
    o.random_start = true;
    o.seed = seeds[static_cast<std::size_t>(k)];
    Solution s = solve_icwe(instance, routes, o);
    if (!s.certificate.converged) throw NotConverged("uniqueness run " + std::to_string(k) + " did not converge");
    report.solutions.push_back(std::move(s));
  }
  const auto ntypes = static_cast<Eigen::Index>(instance.types.size());
  report.type_cost_spread = Eigen::VectorXd::Zero(ntypes);
  for (std::size_t a = 0; a < report.solutions.size(); ++a)
    for (std::size_t b = a + 1; b < report.solutions.size(); ++b) {
      const FlowProfile& p = report.solutions[a].profile;
      const FlowProfile& q = report.solutions[b].profile;
      report.max_edge_cost_spread = std::max(report.max_edge_cost_spread, (p.edge_costs - q.edge_costs).cwiseAbs().maxCoeff());
      report.max_edge_flow_spread = std::max(report.max_edge_flow_spread, (p.edge_flows - q.edge_flows).cwiseAbs().maxCoeff());
      report.type_cost_spread = report.type_cost_spread.cwiseMax((p.type_costs - q.type_costs).cwiseAbs());
    }
  report.unique = report.max_edge_cost_spread <= tolerance;
  return report;
}

}  // namespace ibplab
