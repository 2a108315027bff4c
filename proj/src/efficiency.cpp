#include "ibplab/efficiency.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ibplab {

namespace {

/// Golden-section maximization of a unimodal function on [lo, hi] after a grid scan.
double maximize(const std::function<double(double)>& f, double lo, double hi) {
  constexpr int kGrid = 400;
  double best_z = lo, best = f(lo);
  for (int k = 1; k <= kGrid; ++k) {
    const double z = lo + (hi - lo) * k / kGrid;
    const double v = f(z);
    if (v > best) best = v, best_z = z;
  }
  const double step = (hi - lo) / kGrid;
  double a = std::max(lo, best_z - step), b = std::min(hi, best_z + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12 * std::max(1.0, hi - lo)) {
    if (fc > fd) {
      b = d, d = c, fd = fc;
      c = b - phi * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + phi * (b - a), fd = f(d);
    }
  }
  return std::max(best, f(0.5 * (a + b)));
}

}  // namespace

std::string CostClass::name() const {
  switch (kind) {
    case Kind::constant: return "constant";
    case Kind::affine: return "affine";
    case Kind::polynomial: return "polynomial-" + std::to_string(degree);
    case Kind::unsupported: break;
  }
  return "unsupported";
}

CostClass classify_costs(const InstanceSpec& instance) {
  CostClass cls{CostClass::Kind::constant, 0};
  for (const CostFunction& c : instance.costs) {
    if (c.kind() == CostFunction::Kind::piecewise_linear) return {CostClass::Kind::unsupported, 0};
    cls.degree = std::max(cls.degree, c.degree());
  }
  if (cls.degree == 1) cls.kind = CostClass::Kind::affine;
  if (cls.degree >= 2) cls.kind = CostClass::Kind::polynomial;
  return cls;
}

double beta_of(const CostFunction& c, double x) {
  const double cx = c(x);
  if (!(x > 0.0) || !(cx > 0.0)) return 0.0;
  return maximize([&](double z) { return z * (cx - c(z)) / (x * cx); }, 0.0, x);
}

double beta_bound(const CostClass& cls) {
  switch (cls.kind) {
    case CostClass::Kind::constant: return 0.0;
    case CostClass::Kind::affine: return 0.25;
    case CostClass::Kind::polynomial: {
      // Nonnegative combinations are dominated by the top monomial; beta of a
      // monomial does not depend on the load, so x = 1 suffices.
      double best = 0.0;
      for (int k = 1; k <= cls.degree; ++k) {
        std::vector<double> coeffs(static_cast<std::size_t>(k) + 1, 0.0);
        coeffs.back() = 1.0;
        best = std::max(best, beta_of(CostFunction::polynomial(coeffs), 1.0));
      }
      return best;
    }
    case CostClass::Kind::unsupported: break;
  }
  throw InputError("no efficiency bound for this cost class");
}

EfficiencyReport efficiency_report(const InstanceSpec& instance, const SolveOptions& options) {
  const Solution cwe = solve_icwe(instance, options);
  if (!cwe.certificate.converged) throw NotConverged("equilibrium solve did not converge");
  const SocialOptimum so = solve_social_optimum(instance, options);
  if (!so.certificate.converged) throw NotConverged("social optimum solve did not converge");

  EfficiencyReport r;
  r.cwe_certificate = cwe.certificate;
  r.so_certificate = so.certificate;
  r.type_costs = cwe.profile.type_costs;
  r.type_cwe = cwe.profile.type_edge_flows * cwe.profile.edge_costs;
  r.type_so = so.profile.type_edge_flows * so.profile.edge_costs;
  r.c_cwe = r.type_cwe.sum();
  r.c_so = r.type_so.sum();
  r.ratio = r.c_cwe > 0.0 ? r.c_so / r.c_cwe : 1.0;
  r.type_ratio.resize(r.type_cwe.size());
  for (Eigen::Index i = 0; i < r.type_cwe.size(); ++i)
    r.type_ratio[i] = r.type_cwe[i] > 0.0 ? r.type_so[i] / r.type_cwe[i] : 1.0;
  r.variational = (cwe.profile.type_edge_flows - so.profile.type_edge_flows) * cwe.profile.edge_costs;
  r.cost_class = classify_costs(instance);
  if (r.cost_class.kind != CostClass::Kind::unsupported) {
    r.beta = beta_bound(r.cost_class);
    r.lower_bound = 1.0 - *r.beta;
  }
  return r;
}

}  // namespace ibplab
