#pragma once

#include <optional>
#include <string>

#include "ibplab/equilibrium.hpp"
#include "ibplab/netmodel.hpp"

namespace ibplab {

/// Cost families with a known efficiency bound.
struct CostClass {
  enum class Kind { constant, affine, polynomial, unsupported };
  Kind kind = Kind::unsupported;
  int degree = 0;  // polynomial only

  std::string name() const;
};

/// Smallest class containing every edge cost of the instance.
CostClass classify_costs(const InstanceSpec& instance);

/// sup over the class of max_z z (c(x) - c(z)) / (x c(x)). Throws InputError
/// for unsupported classes.
double beta_bound(const CostClass& cls);

/// max over z in [0, x] of z (c(x) - c(z)) / (x c(x)) for one function and one load.
double beta_of(const CostFunction& c, double x);

struct EfficiencyReport {
  double c_cwe = 0.0;
  double c_so = 0.0;
  double ratio = 1.0;  // c_so / c_cwe
  Eigen::VectorXd type_costs;  // equilibrium cost per unit of each type
  Eigen::VectorXd type_cwe;
  Eigen::VectorXd type_so;
  Eigen::VectorXd type_ratio;
  CostClass cost_class;
  std::optional<double> beta;
  std::optional<double> lower_bound;  // 1 - beta
  Certificate cwe_certificate;
  Certificate so_certificate;
  /// Per type: sum_e c_e(f_cwe) (f_cwe^(i) - f_so^(i)); nonpositive at an equilibrium.
  Eigen::VectorXd variational;
};

/// Solves both programs and compares total and per-type costs. Throws
/// NotConverged if either solve misses its tolerances.
EfficiencyReport efficiency_report(const InstanceSpec& instance, const SolveOptions& options = {});

}  // namespace ibplab
