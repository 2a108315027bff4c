#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "ibplab/netmodel.hpp"
#include "ibplab/paradox.hpp"

namespace fixtures {

using ibplab::CostFunction;
using ibplab::InstanceSpec;
using ibplab::Network;

inline CostFunction lin(double a, double b = 0.0) { return CostFunction::affine(a, b); }

inline Network example1_network() {
  return Network({"O", "A", "B", "C", "D"},
                 {{"e1", "O", "A"},
                  {"e2", "O", "A"},
                  {"e3", "A", "B"},
                  {"e4", "B", "D"},
                  {"e5", "B", "D"},
                  {"e6", "O", "C"},
                  {"e7", "C", "D"}},
                 "O", "D");
}

inline InstanceSpec example1(double a, double s) {
  return ibplab::make_instance(
      example1_network(),
      {lin(1), lin(a, 1), lin(a), lin(1), lin(a, 1), lin(1), lin(a, 1)},
      {{"1", s, {"e1", "e2", "e3", "e4", "e5", "e6", "e7"}}, {"2", 1.0 - s, {"e6", "e7"}}});
}

inline Network wheatstone() {
  return Network({"O", "A", "B", "D"},
                 {{"e1", "O", "A"}, {"e2", "O", "B"}, {"e3", "A", "D"}, {"e4", "B", "D"}, {"e5", "A", "B"}},
                 "O", "D");
}

inline std::vector<CostFunction> braess_costs() {
  return {lin(1), CostFunction::constant(1), CostFunction::constant(1), lin(1), CostFunction::constant(0)};
}

inline InstanceSpec braess(bool with_bridge) {
  std::vector<std::string> edges{"e1", "e2", "e3", "e4"};
  if (with_bridge) edges.push_back("e5");
  return ibplab::make_instance(wheatstone(), braess_costs(), {{"1", 1.0, edges}});
}

inline Network fig4b() {
  return Network({"O", "v", "D"},
                 {{"e1", "O", "v"}, {"e2", "O", "v"}, {"e3", "v", "D"}, {"e4", "v", "D"}, {"e5", "O", "D"}},
                 "O", "D");
}

inline InstanceSpec example2b(bool expanded) {
  std::vector<std::string> e1{"e2", "e3", "e5"};
  if (expanded) e1.push_back("e1");
  return ibplab::make_instance(
      fig4b(), {lin(0.5), lin(1, 0.75), lin(4.0 / 3.0), CostFunction::constant(2), lin(1)},
      {{"1", 13.0 / 4.0, e1}, {"2", 1.0, {"e1", "e4", "e5"}}});
}

inline Network two_parallel() {
  return Network({"O", "D"}, {{"e1", "O", "D"}, {"e2", "O", "D"}}, "O", "D");
}

inline InstanceSpec pigou() {
  return ibplab::make_instance(two_parallel(), {lin(1), CostFunction::constant(1)}, {{"1", 1.0, {"e1", "e2"}}});
}

inline InstanceSpec example4(double a, double s1, double s2) {
  return ibplab::make_instance(two_parallel(), {lin(a), CostFunction::constant(1)},
                               {{"1", s1, {"e1"}}, {"2", s2, {"e1", "e2"}}});
}

/// Builds a multi-OD instance; each type names its OD pair by terminal ids.
struct TypeSpec {
  std::string id;
  double demand;
  std::string origin;
  std::string destination;
  std::vector<std::string> edges;
};

inline InstanceSpec multi_od(Network net, std::vector<CostFunction> costs, const std::vector<TypeSpec>& types) {
  InstanceSpec inst;
  inst.costs = std::move(costs);
  for (const auto& spec : types) {
    const std::size_t o = net.vertex_index(spec.origin), d = net.vertex_index(spec.destination);
    std::size_t od = 0;
    while (od < inst.od_pairs.size() && !(inst.od_pairs[od].origin == o && inst.od_pairs[od].destination == d)) ++od;
    if (od == inst.od_pairs.size()) inst.od_pairs.push_back({o, d, {}});
    ibplab::UserType t;
    t.id = spec.id;
    t.demand = spec.demand;
    t.od = od;
    t.info.assign(net.num_edges(), false);
    for (const auto& e : spec.edges) t.info[net.edge_index(e)] = true;
    inst.od_pairs[od].types.push_back(inst.types.size());
    inst.types.push_back(std::move(t));
  }
  inst.network = std::move(net);
  ibplab::validate_instance(inst);
  return inst;
}

/// Two OD pairs sharing a parallel pair X=Y.
inline Network fig7b() {
  return Network({"O1", "O2", "X", "Y", "D1", "D2"},
                 {{"e1", "O1", "X"}, {"e2", "O2", "X"}, {"e3", "X", "Y"}, {"e4", "X", "Y"}, {"e5", "Y", "D1"},
                  {"e6", "Y", "D2"}},
                 "O1", "D1");
}

inline InstanceSpec fig7b_instance() {
  const std::vector<std::string> all{"e1", "e2", "e3", "e4", "e5", "e6"};
  return multi_od(fig7b(), {lin(1), lin(1), lin(2, 1), lin(1, 2), lin(1), lin(1)},
                  {{"1.1", 1.0, "O1", "D1", {"e1", "e3", "e5"}}, {"2.1", 1.0, "O2", "D2", all}});
}

/// Triangle x, y, z with O1 = O2 = x, D1 = y, D2 = z.
inline Network fig8() {
  return Network({"x", "y", "z"}, {{"e1", "x", "y"}, {"e2", "x", "z"}, {"e3", "z", "y"}}, "x", "y");
}

/// The four information patterns for the triangle. Type "1.1" expands to full
/// information; "2.1" (x to z) and, in cases 3 and 4, "1.2" (x to y) know everything.
inline ibplab::IbpCase fig8_case(int which, std::vector<CostFunction> costs, double s11, double s21,
                                 double s12 = 1.0) {
  const std::vector<std::string> all{"e1", "e2", "e3"};
  const bool direct = which == 1 || which == 3;
  std::vector<TypeSpec> types{{"1.1", s11, "x", "y", direct ? std::vector<std::string>{"e1"}
                                                            : std::vector<std::string>{"e2", "e3"}},
                              {"2.1", s21, "x", "z", all}};
  if (which >= 3) types.push_back({"1.2", s12, "x", "y", all});
  ibplab::IbpCase c{multi_od(fig8(), std::move(costs), types), {}};
  c.expansion.type = "1.1";
  c.expansion.added = direct ? std::vector<std::string>{"e2", "e3"} : std::vector<std::string>{"e1"};
  return c;
}

}  // namespace fixtures
