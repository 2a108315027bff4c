#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ibplab/netmodel.hpp"

namespace ibplab {

enum class StepRule { exact, harmonic };
enum class Direction { pairwise, classic };

struct SolveOptions {
  int max_iterations = 200000;
  /// Frank-Wolfe gap tolerance, relative to max(1, initial objective).
  double gap_tolerance = 1e-8;
  /// Equilibrium residual tolerance, relative to max(1, largest type cost).
  double residual_tolerance = 1e-6;
  /// Routes with flow above this fraction of the type demand count as used.
  double activity_fraction = 1e-7;
  StepRule step = StepRule::exact;
  Direction direction = Direction::pairwise;
  /// Keep iterating past the tolerances until the residual reaches roundoff or stalls.
  bool polish = true;
  /// Start from a random interior point instead of each type's first route.
  bool random_start = false;
  std::uint64_t seed = 42;
  bool record_history = false;
};

/// Throws InputError if a tolerance or iteration limit is out of range.
void validate_options(const SolveOptions& options);

struct Certificate {
  double potential = 0.0;  // objective value at the returned iterate
  double residual = 0.0;   // max over used routes of (route cost - cheapest available)
  double gap = 0.0;        // sum over types and routes of flow * (route cost - cheapest available)
  double residual_tolerance = 0.0;
  double gap_tolerance = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> history;  // objective per iteration when requested
};

struct Solution {
  FlowProfile profile;
  Certificate certificate;
};

/// Information constrained Wardrop equilibrium: minimizes the Beckmann
/// potential over the per-type route simplices.
Solution solve_icwe(const InstanceSpec& instance, const SolveOptions& options = {});
Solution solve_icwe(const InstanceSpec& instance, std::shared_ptr<const RouteSets> routes,
                    const SolveOptions& options = {});

struct SocialOptimum {
  FlowProfile profile;
  Certificate certificate;  // in marginal costs
  double objective = 0.0;
};

/// Minimizes total cost sum_e f_e c_e(f_e) over the same feasible set.
SocialOptimum solve_social_optimum(const InstanceSpec& instance, const SolveOptions& options = {});

/// Recomputes route costs from the instance and the profile's route flows.
/// `converged` reports whether the residual is within `tolerance`.
Certificate verify_equilibrium(const InstanceSpec& instance, const FlowProfile& profile, double tolerance,
                               double activity_fraction = 1e-7);

/// Gradient of the potential with respect to route flows: route costs at the
/// given route flows, one vector per type.
std::vector<Eigen::VectorXd> potential_gradient(const InstanceSpec& instance, const RouteSets& routes,
                                                const std::vector<Eigen::VectorXd>& route_flows);

struct UniquenessReport {
  int runs = 0;
  double max_edge_cost_spread = 0.0;
  double max_edge_flow_spread = 0.0;
  Eigen::VectorXd type_cost_spread;
  double tolerance = 0.0;
  bool unique = false;
  std::vector<Solution> solutions;
};

/// Solves from `runs` random interior starting points derived from the seed.
UniquenessReport check_essential_uniqueness(const InstanceSpec& instance, int runs,
                                            const SolveOptions& options = {}, double tolerance = 1e-5);

class NotConverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ibplab
