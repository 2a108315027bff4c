#include "ibplab/serialize.hpp"

#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace ibplab {

namespace {

std::string read_text(const std::string& source) {
  const auto first = source.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && source[first] == '{') return source;
  std::ifstream in(source);
  if (!in) throw InputError("cannot open '" + source + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Json parse(const std::string& source) {
  try {
    return Json::parse(read_text(source));
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("malformed document: ") + e.what());
  }
}

std::vector<EdgeId> edge_ids(const Network& net, const std::vector<bool>& mask) {
  std::vector<EdgeId> out;
  for (std::size_t e = 0; e < mask.size(); ++e)
    if (mask[e]) out.push_back(net.edge(e).id);
  return out;
}

Json per_type(const InstanceSpec& inst, const Eigen::VectorXd& values) {
  Json out = Json::object();
  for (std::size_t i = 0; i < inst.types.size(); ++i) out[inst.types[i].id] = values[static_cast<Eigen::Index>(i)];
  return out;
}

Json per_edge(const Network& net, const Eigen::VectorXd& values) {
  Json out = Json::object();
  for (std::size_t e = 0; e < net.num_edges(); ++e) out[net.edge(e).id] = values[static_cast<Eigen::Index>(e)];
  return out;
}

std::string number_text(double x) {
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

}  // namespace

// --- instances -------------------------------------------------------------------------

Json to_json(const CostFunction& cost) {
  const Eigen::VectorXd& k = cost.coefficients();
  switch (cost.kind()) {
    case CostFunction::Kind::constant:
      return {{"kind", "constant"}, {"params", {{"c", k.size() ? k[0] : 0.0}}}};
    case CostFunction::Kind::affine:
      return {{"kind", "affine"}, {"params", {{"a", k.size() > 1 ? k[1] : 0.0}, {"b", k.size() ? k[0] : 0.0}}}};
    case CostFunction::Kind::polynomial:
      return {{"kind", "polynomial"}, {"params", {{"coeffs", std::vector<double>(k.data(), k.data() + k.size())}}}};
    case CostFunction::Kind::piecewise_linear: {
      Json points = Json::array();
      for (Eigen::Index i = 0; i < cost.breakpoints().size(); ++i)
        points.push_back({cost.breakpoints()[i], cost.breakpoint_values()[i]});
      return {{"kind", "piecewise_linear"}, {"params", {{"points", points}}}};
    }
  }
  return nullptr;
}

Json to_json(const InstanceSpec& inst) {
  const Network& net = inst.network;
  Json doc;
  doc["kind"] = "instance";
  doc["vertices"] = net.vertices();
  Json edges = Json::array();
  for (std::size_t e = 0; e < net.num_edges(); ++e)
    edges.push_back({{"id", net.edge(e).id}, {"u", net.edge(e).u}, {"v", net.edge(e).v}, {"cost", to_json(inst.costs[e])}});
  doc["edges"] = edges;
  Json pairs = Json::array();
  for (const OdPair& od : inst.od_pairs) {
    Json types = Json::array();
    for (const std::size_t t : od.types) {
      const UserType& u = inst.types[t];
      types.push_back({{"id", u.id}, {"demand", u.demand}, {"edges", edge_ids(net, u.info)}});
    }
    pairs.push_back({{"origin", net.vertex(od.origin)}, {"destination", net.vertex(od.destination)}, {"types", types}});
  }
  doc["od_pairs"] = pairs;
  return doc;
}

Json to_json(const ExpansionSpec& expansion) {
  return {{"type", expansion.type}, {"added", expansion.added}, {"restricted", expansion.restricted}};
}

Json to_json(const IbpCase& c) {
  Json doc = to_json(c.instance);
  doc["expansion"] = to_json(c.expansion);
  return doc;
}

CaseDocument load_case(const std::string& source, const LoadOptions& options) {
  const std::string text = read_text(source);
  LoadResult loaded = load_instance(text, options);
  CaseDocument out{std::move(loaded.instance), std::nullopt, std::move(loaded.warnings)};
  const Json doc = parse(text);
  if (doc.contains("expansion")) {
    const Json& e = doc.at("expansion");
    try {
      ExpansionSpec spec;
      spec.type = e.at("type").is_string() ? e.at("type").get<std::string>() : e.at("type").dump();
      spec.added = e.value("added", std::vector<std::string>{});
      spec.restricted = e.value("restricted", false);
      out.expansion = std::move(spec);
    } catch (const Json::exception& ex) {
      throw InputError(std::string("schema error in expansion: ") + ex.what());
    }
  }
  return out;
}

Network load_network(const std::string& source) {
  const Json doc = parse(source);
  try {
    std::vector<VertexId> vertices = doc.at("vertices").get<std::vector<std::string>>();
    std::vector<Edge> edges;
    for (const auto& e : doc.at("edges"))
      edges.push_back({e.at("id").get<std::string>(), e.at("u").get<std::string>(), e.at("v").get<std::string>()});
    std::string o, d;
    if (doc.contains("origin")) {
      o = doc.at("origin").get<std::string>();
      d = doc.at("destination").get<std::string>();
    } else {
      const Json& pair = doc.at("od_pairs").at(0);
      o = pair.at("origin").get<std::string>();
      d = pair.at("destination").get<std::string>();
    }
    return Network(std::move(vertices), std::move(edges), o, d);
  } catch (const Json::exception& e) {
    throw InputError(std::string("schema error: ") + e.what());
  }
}

// --- topology ----------------------------------------------------------------------------

Json sp_tree_json(const Network& net, const SpTree& tree) {
  std::function<Json(int)> node = [&](int id) -> Json {
    const SpNode& n = tree.node(id);
    if (n.kind == SpNode::Kind::leaf) return net.edge(n.edge).id;
    return Json::array({n.kind == SpNode::Kind::series ? "S" : "P", node(n.left), node(n.right)});
  };
  return node(tree.root);
}

Json to_json(const EmbeddingWitness& w) {
  Json vm = Json::object(), paths = Json::object();
  for (const auto& [k, v] : w.vertex_map) vm[k] = v;
  for (const auto& [k, v] : w.edge_paths) paths[k] = v;
  return {{"pattern", w.pattern},
          {"vertex_map", vm},
          {"edge_paths", paths},
          {"origin_path", w.origin_path},
          {"destination_path", w.destination_path}};
}

EmbeddingWitness witness_from_json(const Json& doc) {
  try {
    EmbeddingWitness w;
    w.pattern = doc.value("pattern", std::string());
    for (const auto& [k, v] : doc.at("vertex_map").items()) w.vertex_map[k] = v.get<std::string>();
    for (const auto& [k, v] : doc.at("edge_paths").items()) w.edge_paths[k] = v.get<std::vector<std::string>>();
    w.origin_path = doc.value("origin_path", std::vector<std::string>{});
    w.destination_path = doc.value("destination_path", std::vector<std::string>{});
    return w;
  } catch (const Json::exception& e) {
    throw InputError(std::string("schema error in witness: ") + e.what());
  }
}

Json topology_json(const Network& net, const TopologyReport& r) {
  Json doc;
  doc["kind"] = "topology";
  doc["origin"] = net.origin();
  doc["destination"] = net.destination();
  doc["is_sp"] = r.is_sp;
  doc["is_li"] = r.is_li;
  doc["is_sli"] = r.is_sli;
  doc["sp_tree"] = r.sp_tree ? sp_tree_json(net, *r.sp_tree) : Json(nullptr);
  Json blocks = Json::array();
  for (const LiBlock& b : r.li_blocks)
    blocks.push_back({{"origin", b.network.origin()}, {"destination", b.network.destination()}, {"edges", b.edges}});
  doc["li_blocks"] = blocks;
  doc["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  return doc;
}

// --- equilibria ----------------------------------------------------------------------------

std::string route_key(const InstanceSpec& inst, std::size_t type, const Route& route) {
  std::string key = inst.types[type].id + "/";
  for (std::size_t k = 0; k < route.edges.size(); ++k) {
    if (k) key += ",";
    key += inst.network.edge(route.edges[k]).id;
  }
  return key;
}

Json to_json(const Certificate& c) {
  return {{"potential", c.potential},
          {"residual", c.residual},
          {"gap", c.gap},
          {"residual_tolerance", c.residual_tolerance},
          {"gap_tolerance", c.gap_tolerance},
          {"iterations", c.iterations},
          {"converged", c.converged}};
}

Json solution_json(const InstanceSpec& inst, const FlowProfile& p, const Certificate& c) {
  Json doc;
  doc["kind"] = "solution";
  Json flows = Json::object();
  for (std::size_t t = 0; t < p.routes->num_types(); ++t)
    for (std::size_t r = 0; r < p.routes->routes[t].size(); ++r) {
      const double f = p.route_flows[t][static_cast<Eigen::Index>(r)];
      if (f > 0.0) flows[route_key(inst, t, p.routes->routes[t][r])] = f;
    }
  doc["route_flows"] = flows;
  doc["edge_flows"] = per_edge(inst.network, p.edge_flows);
  doc["edge_costs"] = per_edge(inst.network, p.edge_costs);
  doc["type_costs"] = per_type(inst, p.type_costs);
  doc["total_cost"] = total_cost(inst, p.edge_flows);
  doc["certificate"] = to_json(c);
  return doc;
}

Json social_optimum_json(const InstanceSpec& inst, const SocialOptimum& so) {
  Json doc = solution_json(inst, so.profile, so.certificate);
  doc["kind"] = "social_optimum";
  doc["objective"] = so.objective;
  return doc;
}

// --- paradox ---------------------------------------------------------------------------------

Json verdict_json(const InstanceSpec& inst, const IbpVerdict& v) {
  Json doc;
  doc["kind"] = "ibp_verdict";
  doc["type"] = v.type;
  doc["occurs"] = v.occurs;
  doc["pre"] = v.pre;
  doc["post"] = v.post;
  doc["margin"] = v.margin;
  doc["threshold"] = v.threshold;
  doc["type_costs"] = {{"before", per_type(inst, v.pre_costs)}, {"after", per_type(inst, v.post_costs)}};
  doc["certificates"] = {{"before", to_json(v.before)}, {"after", to_json(v.after)}};
  return doc;
}

Json search_json(const SearchResult& r) {
  Json hits = Json::array();
  for (const SearchHit& h : r.hits)
    hits.push_back({{"trial", h.trial},
                    {"verdict", verdict_json(h.instance.instance, h.verdict)},
                    {"instance", to_json(h.instance)}});
  return {{"kind", "ibp_search"}, {"trials", r.trials}, {"skipped", r.skipped}, {"hits", hits}};
}

Json lift_json(const LiftResult& r) {
  return {{"kind", "ibp_lift"},
          {"extension_edges", r.extension_edges},
          {"pattern_pre", r.pattern_pre},
          {"verdict", verdict_json(r.instance.instance, r.verdict)},
          {"instance", to_json(r.instance)}};
}

Json multi_od_json(const MultiOdReport& r) {
  return {{"kind", "multi_od"}, {"guaranteed_no_ibp", r.guaranteed_no_ibp}, {"reasons", r.reasons}};
}

// --- efficiency ------------------------------------------------------------------------------

Json efficiency_json(const InstanceSpec& inst, const EfficiencyReport& r) {
  Json types = Json::array();
  for (std::size_t i = 0; i < inst.types.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    types.push_back({{"id", inst.types[i].id},
                     {"demand", inst.types[i].demand},
                     {"cost", r.type_costs[k]},
                     {"c_cwe", r.type_cwe[k]},
                     {"c_so", r.type_so[k]},
                     {"ratio", r.type_ratio[k]},
                     {"variational", r.variational[k]}});
  }
  Json doc;
  doc["kind"] = "efficiency";
  doc["c_cwe"] = r.c_cwe;
  doc["c_so"] = r.c_so;
  doc["ratio"] = r.ratio;
  doc["cost_class"] = r.cost_class.name();
  doc["beta"] = r.beta ? Json(*r.beta) : Json(nullptr);
  doc["lower_bound"] = r.lower_bound ? Json(*r.lower_bound) : Json(nullptr);
  doc["types"] = types;
  doc["certificates"] = {{"equilibrium", to_json(r.cwe_certificate)}, {"social_optimum", to_json(r.so_certificate)}};
  return doc;
}

Json uniqueness_json(const InstanceSpec& inst, const UniquenessReport& r) {
  return {{"kind", "uniqueness"},
          {"runs", r.runs},
          {"unique", r.unique},
          {"tolerance", r.tolerance},
          {"max_edge_cost_spread", r.max_edge_cost_spread},
          {"max_edge_flow_spread", r.max_edge_flow_spread},
          {"type_cost_spread", per_type(inst, r.type_cost_spread)}};
}

std::string efficiency_csv(const std::vector<std::string>& names, const std::vector<EfficiencyReport>& reports) {
  std::ostringstream out;
  out << "instance,c_cwe,c_so,ratio,min_type_ratio,cost_class,lower_bound\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const EfficiencyReport& r = reports[i];
    out << names.at(i) << ',' << number_text(r.c_cwe) << ',' << number_text(r.c_so) << ',' << number_text(r.ratio)
        << ',' << number_text(r.type_ratio.size() ? r.type_ratio.minCoeff() : 1.0) << ',' << r.cost_class.name()
        << ',' << (r.lower_bound ? number_text(*r.lower_bound) : std::string()) << '\n';
  }
  return out.str();
}

std::string search_csv(const SearchResult& result) {
  std::ostringstream out;
  out << "trial,type,types,pre,post,margin,threshold\n";
  for (const SearchHit& h : result.hits)
    out << h.trial << ',' << h.verdict.type << ',' << h.instance.instance.types.size() << ','
        << number_text(h.verdict.pre) << ',' << number_text(h.verdict.post) << ',' << number_text(h.verdict.margin)
        << ',' << number_text(h.verdict.threshold) << '\n';
  return out.str();
}

// --- output validation ------------------------------------------------------------------------

namespace {

enum class Want { number, boolean, string, object, array, tree, optional_number, optional_object };

bool matches(const Json& v, Want w) {
  switch (w) {
    case Want::number: return v.is_number();
    case Want::boolean: return v.is_boolean();
    case Want::string: return v.is_string();
    case Want::object: return v.is_object();
    case Want::array: return v.is_array();
    case Want::tree: return v.is_null() || v.is_string() || v.is_array();
    case Want::optional_number: return v.is_null() || v.is_number();
    case Want::optional_object: return v.is_null() || v.is_object();
  }
  return false;
}

using Fields = std::vector<std::pair<const char*, Want>>;

const std::map<std::string, Fields>& schemas() {
  static const std::map<std::string, Fields> table{
      {"instance", {{"vertices", Want::array}, {"edges", Want::array}, {"od_pairs", Want::array}}},
      {"topology",
       {{"is_sp", Want::boolean}, {"is_li", Want::boolean}, {"is_sli", Want::boolean}, {"sp_tree", Want::tree},
        {"li_blocks", Want::array}, {"witness", Want::optional_object}}},
      {"solution",
       {{"route_flows", Want::object}, {"edge_flows", Want::object}, {"edge_costs", Want::object},
        {"type_costs", Want::object}, {"total_cost", Want::number}, {"certificate", Want::object}}},
      {"social_optimum",
       {{"route_flows", Want::object}, {"edge_flows", Want::object}, {"type_costs", Want::object},
        {"objective", Want::number}, {"certificate", Want::object}}},
      {"ibp_verdict",
       {{"type", Want::string}, {"occurs", Want::boolean}, {"pre", Want::number}, {"post", Want::number},
        {"margin", Want::number}, {"threshold", Want::number}, {"type_costs", Want::object},
        {"certificates", Want::object}}},
      {"ibp_search", {{"trials", Want::number}, {"skipped", Want::number}, {"hits", Want::array}}},
      {"ibp_lift",
       {{"extension_edges", Want::number}, {"pattern_pre", Want::number}, {"verdict", Want::object},
        {"instance", Want::object}}},
      {"ibp_family", {{"verdict", Want::object}, {"instance", Want::object}}},
      {"multi_od", {{"guaranteed_no_ibp", Want::boolean}, {"reasons", Want::array}}},
      {"efficiency",
       {{"c_cwe", Want::number}, {"c_so", Want::number}, {"ratio", Want::number}, {"cost_class", Want::string},
        {"beta", Want::optional_number}, {"lower_bound", Want::optional_number}, {"types", Want::array},
        {"certificates", Want::object}}},
      {"uniqueness",
       {{"runs", Want::number}, {"unique", Want::boolean}, {"max_edge_cost_spread", Want::number},
        {"max_edge_flow_spread", Want::number}, {"type_cost_spread", Want::object}}},
  };
  return table;
}

const Fields kCertificate{{"potential", Want::number}, {"residual", Want::number}, {"gap", Want::number},
                          {"iterations", Want::number}, {"converged", Want::boolean}};

void check_fields(const Json& doc, const Fields& fields, const std::string& where, std::vector<std::string>& problems) {
  for (const auto& [name, want] : fields) {
    if (!doc.contains(name))
      problems.push_back(where + ": missing \"" + name + "\"");
    else if (!matches(doc.at(name), want))
      problems.push_back(where + ": \"" + name + "\" has the wrong type");
  }
}

void check_document(const Json& doc, const std::string& where, std::vector<std::string>& problems) {
  if (!doc.is_object() || !doc.contains("kind") || !doc.at("kind").is_string()) {
    problems.push_back(where + ": missing \"kind\"");
    return;
  }
  const std::string kind = doc.at("kind").get<std::string>();
  const auto it = schemas().find(kind);
  if (it == schemas().end()) {
    problems.push_back(where + ": unknown kind '" + kind + "'");
    return;
  }
  check_fields(doc, it->second, where, problems);
  if (!problems.empty()) return;
  if (doc.contains("certificate")) check_fields(doc.at("certificate"), kCertificate, where + ".certificate", problems);
  if (kind == "solution" || kind == "social_optimum")
    for (const auto& [key, value] : doc.at("route_flows").items())
      if (key.find('/') == std::string::npos || !value.is_number())
        problems.push_back(where + ": bad route flow entry '" + key + "'");
  if (kind == "ibp_search")
    for (std::size_t i = 0; i < doc.at("hits").size(); ++i) {
      const Json& hit = doc.at("hits")[i];
      const std::string w = where + ".hits[" + std::to_string(i) + "]";
      if (!hit.contains("verdict") || !hit.contains("instance")) {
        problems.push_back(w + ": incomplete hit");
        continue;
      }
      check_document(hit.at("verdict"), w + ".verdict", problems);
      check_document(hit.at("instance"), w + ".instance", problems);
    }
  if (kind == "ibp_lift" || kind == "ibp_family") {
    check_document(doc.at("verdict"), where + ".verdict", problems);
    check_document(doc.at("instance"), where + ".instance", problems);
  }
  if (kind == "instance") {
    try {
      load_case(Json(doc).dump());
    } catch (const std::exception& e) {
      problems.push_back(where + ": " + e.what());
    }
  }
}

}  // namespace

std::vector<std::string> validate_output(const Json& doc) {
  std::vector<std::string> problems;
  check_document(doc, "document", problems);
  return problems;
}

}  // namespace ibplab
