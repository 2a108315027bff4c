#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ibplab/efficiency.hpp"
#include "ibplab/equilibrium.hpp"
#include "ibplab/netmodel.hpp"
#include "ibplab/paradox.hpp"
#include "ibplab/topology.hpp"

namespace ibplab {

using Json = nlohmann::ordered_json;

/// Instance in the document schema read by load_instance.
Json to_json(const InstanceSpec& instance);
Json to_json(const CostFunction& cost);
/// Instance plus an "expansion" stanza.
Json to_json(const IbpCase& c);
Json to_json(const ExpansionSpec& expansion);

/// Instance document with an optional "expansion" stanza.
struct CaseDocument {
  InstanceSpec instance;
  std::optional<ExpansionSpec> expansion;
  std::vector<std::string> warnings;
};
CaseDocument load_case(const std::string& source, const LoadOptions& options = {});

/// Network part of a document; costs and types are optional. Terminals come
/// from "origin"/"destination" or the first OD pair.
Network load_network(const std::string& source);

/// Leaves are edge ids, inner nodes ["S", left, right] or ["P", left, right].
Json sp_tree_json(const Network& net, const SpTree& tree);
Json to_json(const EmbeddingWitness& witness);
EmbeddingWitness witness_from_json(const Json& doc);
Json topology_json(const Network& net, const TopologyReport& report);

/// "typeId/e1,e2" for a route of a type.
std::string route_key(const InstanceSpec& instance, std::size_t type, const Route& route);
Json to_json(const Certificate& certificate);
Json solution_json(const InstanceSpec& instance, const FlowProfile& profile, const Certificate& certificate);
Json social_optimum_json(const InstanceSpec& instance, const SocialOptimum& so);
Json verdict_json(const InstanceSpec& instance, const IbpVerdict& verdict);
Json search_json(const SearchResult& result);
Json lift_json(const LiftResult& result);
Json multi_od_json(const MultiOdReport& report);
Json efficiency_json(const InstanceSpec& instance, const EfficiencyReport& report);
Json uniqueness_json(const InstanceSpec& instance, const UniquenessReport& report);

/// CSV with a header row and one row per record; columns in a fixed order.
std::string efficiency_csv(const std::vector<std::string>& names, const std::vector<EfficiencyReport>& reports);
std::string search_csv(const SearchResult& result);

/// Checks the "kind"-specific required fields of an output document. Returns
/// the list of problems (empty when valid).
std::vector<std::string> validate_output(const Json& doc);

}  // namespace ibplab
