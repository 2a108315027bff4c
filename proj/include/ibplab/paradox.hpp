#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ibplab/equilibrium.hpp"
#include "ibplab/netmodel.hpp"
#include "ibplab/topology.hpp"

namespace ibplab {

/// One type learns about additional edges; everyone else keeps their sets.
struct ExpansionSpec {
  std::string type;
  std::vector<EdgeId> added;
  /// Every other type already knows every edge and the expansion reaches all of E.
  bool restricted = false;
};

/// Throws InputError if the expansion is empty, names unknown edges, repeats
/// known ones, or breaks the restricted-mode precondition.
void validate_expansion(const InstanceSpec& instance, const ExpansionSpec& expansion);

InstanceSpec apply_expansion(const InstanceSpec& instance, const ExpansionSpec& expansion);

struct IbpVerdict {
  bool occurs = false;
  std::string type;
  double pre = 0.0;
  double post = 0.0;
  double margin = 0.0;
  double threshold = 0.0;
  Certificate before;
  Certificate after;
  Eigen::VectorXd pre_costs;   // per type
  Eigen::VectorXd post_costs;  // per type
  std::optional<Solution> pre_solution;
  std::optional<Solution> post_solution;
};

/// Decision threshold for a pair of certificates.
double ibp_threshold(const Certificate& before, const Certificate& after);

/// Solves before and after the expansion and compares the expanding type's cost.
/// Throws NotConverged if either solve misses its tolerances.
IbpVerdict check_ibp(const InstanceSpec& instance, const ExpansionSpec& expansion,
                     const SolveOptions& options = {});

/// Restricted mode: `added` may be left empty to mean "everything the type does
/// not know yet". A type that already knows everything gives a vacuous verdict.
IbpVerdict check_ibp_restricted(const InstanceSpec& instance, ExpansionSpec expansion,
                                const SolveOptions& options = {});

/// A paradox instance together with the expansion that triggers it.
struct IbpCase {
  InstanceSpec instance;
  ExpansionSpec expansion;
};

struct SearchOptions {
  int trials = 100;
  std::uint64_t seed = 42;
  int jobs = 1;
  /// Restricted mode: only the expanding type lacks information, and learns everything.
  bool restricted = false;
  int max_types = 3;
  double cost_low = 1e-2;
  double cost_high = 10.0;
  /// Chance that a cost coefficient is zero instead of log-uniform.
  double zero_probability = 0.25;
  SolveOptions solve;
};

struct SearchHit {
  int trial = 0;
  IbpCase instance;
  IbpVerdict verdict;
};

struct SearchResult {
  int trials = 0;
  int skipped = 0;  // trials whose solves did not converge
  std::vector<SearchHit> hits;
};

/// Random affine costs, demands, information sets and expansions on a fixed
/// network. Trials are independent and seeded by (seed, trial index).
SearchResult search_ibp(const Network& net, const SearchOptions& options = {});

/// The trial instance that `search_ibp` would draw for a given index.
IbpCase sample_trial(const Network& net, const SearchOptions& options, int trial);

/// Open interval of s1/(s1+s2) for which the affine family produces a paradox.
std::pair<double, double> ibp_family_interval(double a1, double a3, double a5);

/// Affine paradox instance on the two-diamond-plus-bypass network.
IbpCase generate_ibp_family(double a1, double a3, double a5, double s_fraction, double total_demand = 1.0);

/// Stored paradox instance for one of the nine minimal non-SLI networks.
IbpCase pattern_witness_instance(Pattern pattern);

/// Restricted-mode paradox on the Wheatstone network (two types).
IbpCase restricted_witness_instance();

/// Throws InputError unless the embedding is consistent with both networks.
void validate_witness(const Network& pattern, const Network& target, const EmbeddingWitness& witness);

struct LiftResult {
  IbpCase instance;
  IbpVerdict verdict;
  /// Number of terminal-extension edges; each carries the full demand.
  std::size_t extension_edges = 0;
  double pattern_pre = 0.0;
};

class ConstructionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Transports the stored pattern instance through the embedding. Throws
/// ConstructionFailure if the lifted instance does not exhibit the paradox.
LiftResult lift_witness(Pattern pattern, const Network& target, const EmbeddingWitness& witness,
                        const SolveOptions& options = {});

struct MultiOdReport {
  bool guaranteed_no_ibp = false;
  std::vector<std::string> reasons;
};

/// Sufficient topological condition for the absence of the paradox with several
/// OD pairs: every relevant network is SLI, and any two of them share either
/// nothing or exactly their coincident LI blocks.
MultiOdReport check_multi_od_sufficient(const InstanceSpec& instance);

}  // namespace ibplab
