#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "ibplab/efficiency.hpp"
#include "ibplab/equilibrium.hpp"
#include "ibplab/paradox.hpp"
#include "ibplab/serialize.hpp"
#include "ibplab/topology.hpp"

namespace ibplab::cli {

namespace {

struct Config {
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 42;
  int jobs = 1;
  std::optional<double> tol_gap;
  std::optional<double> tol_eq;
  std::vector<std::string> params;

  std::string input;
  std::vector<std::string> inputs;
  bool witness = false;
  bool social = false;

  std::string type;
  std::vector<std::string> added;
  bool restricted = false;
  bool fail_on_paradox = false;
  int trials = 100;
  int max_types = 3;

  double a1 = 0, a3 = 0, a5 = 0, frac = 0, total = 1;
  std::string pattern;
  std::string witness_file;

  int runs = 5;
  double tolerance = 1e-5;
};

void configure_logging() {
  const char* level = std::getenv("IBPLAB_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

SolveOptions solve_options(const Config& cfg) {
  SolveOptions o;
  if (cfg.tol_gap) o.gap_tolerance = *cfg.tol_gap;
  if (cfg.tol_eq) o.residual_tolerance = *cfg.tol_eq;
  o.seed = cfg.seed;
  validate_options(o);
  return o;
}

LoadOptions load_options(const Config& cfg) {
  LoadOptions o;
  for (const std::string& p : cfg.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw InputError("--param expects name=value, got '" + p + "'");
    const std::string value = p.substr(eq + 1);
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0') throw InputError("--param " + p.substr(0, eq) + ": not a number");
    o.params[p.substr(0, eq)] = v;
  }
  return o;
}

CaseDocument load(const Config& cfg, const std::string& path) {
  CaseDocument doc = load_case(path, load_options(cfg));
  for (const auto& w : doc.warnings) spdlog::warn("{}: {}", path, w);
  spdlog::info("loaded {}: {} edges, {} types", path, doc.instance.network.num_edges(), doc.instance.types.size());
  return doc;
}

void require_json(const Config& cfg, const char* command) {
  if (cfg.format != "json") throw InputError(std::string(command) + " writes JSON only");
}

void check_document(const Json& doc) {
  const auto problems = validate_output(doc);
  if (!problems.empty()) throw std::logic_error("output failed validation: " + problems.front());
}

std::string render(const Json& doc) {
  check_document(doc);
  return doc.dump(2) + "\n";
}

Json classify_cmd(const Config& cfg) {
  require_json(cfg, "classify");
  const Network net = load_network(cfg.input);
  ClassifyOptions opts;
  opts.find_witness = cfg.witness;
  return topology_json(net, classify(net, opts));
}

std::pair<Json, bool> solve_cmd(const Config& cfg) {
  require_json(cfg, "solve");
  const CaseDocument doc = load(cfg, cfg.input);
  const SolveOptions opts = solve_options(cfg);
  if (cfg.social) {
    const SocialOptimum so = solve_social_optimum(doc.instance, opts);
    return {social_optimum_json(doc.instance, so), so.certificate.converged};
  }
  const Solution sol = solve_icwe(doc.instance, opts);
  spdlog::info("solved in {} iterations, residual {:.3e}", sol.certificate.iterations, sol.certificate.residual);
  return {solution_json(doc.instance, sol.profile, sol.certificate), sol.certificate.converged};
}

std::pair<Json, bool> check_cmd(const Config& cfg) {
  require_json(cfg, "ibp check");
  const CaseDocument doc = load(cfg, cfg.input);
  ExpansionSpec exp;
  if (!cfg.type.empty()) {
    exp.type = cfg.type;
    exp.added = cfg.added;
  } else if (doc.expansion) {
    exp = *doc.expansion;
  } else {
    throw InputError("no expansion: pass --type/--add or include an \"expansion\" stanza");
  }
  const SolveOptions opts = solve_options(cfg);
  const bool restricted = cfg.restricted || exp.restricted;
  const IbpVerdict v = restricted ? check_ibp_restricted(doc.instance, exp, opts) : check_ibp(doc.instance, exp, opts);
  spdlog::info("type {}: {} -> {} (margin {:.3e})", v.type, v.pre, v.post, v.margin);
  return {verdict_json(doc.instance, v), v.occurs};
}

std::string search_cmd(const Config& cfg) {
  const Network net = load_network(cfg.input);
  SearchOptions opts;
  opts.trials = cfg.trials;
  opts.seed = cfg.seed;
  opts.jobs = cfg.jobs;
  opts.restricted = cfg.restricted;
  opts.max_types = cfg.max_types;
  opts.solve = solve_options(cfg);
  const SearchResult r = search_ibp(net, opts);
  spdlog::info("{} trials, {} hits, {} skipped", r.trials, r.hits.size(), r.skipped);
  if (r.skipped) spdlog::warn("{} trials skipped: solver did not converge", r.skipped);
  if (cfg.format == "csv") return search_csv(r);
  return render(search_json(r));
}

std::pair<Json, bool> family_cmd(const Config& cfg) {
  require_json(cfg, "ibp family");
  const IbpCase c = generate_ibp_family(cfg.a1, cfg.a3, cfg.a5, cfg.frac, cfg.total);
  const IbpVerdict v = check_ibp(c.instance, c.expansion, solve_options(cfg));
  const Json doc{{"kind", "ibp_family"}, {"verdict", verdict_json(c.instance, v)}, {"instance", to_json(c)}};
  return {doc, v.occurs};
}

Json lift_cmd(const Config& cfg) {
  require_json(cfg, "ibp lift");
  const auto pattern = pattern_from_name(cfg.pattern);
  if (!pattern) throw InputError("unknown pattern '" + cfg.pattern + "'");
  const Network target = load_network(cfg.input);
  EmbeddingWitness witness;
  if (!cfg.witness_file.empty()) {
    std::ifstream in(cfg.witness_file);
    if (!in) throw InputError("cannot open '" + cfg.witness_file + "'");
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::parse_error& e) {
      throw InputError(std::string("malformed witness: ") + e.what());
    }
    witness = witness_from_json(doc.contains("witness") ? doc.at("witness") : doc);
  } else {
    const EmbedResult found = embeds(pattern_network(*pattern), target);
    if (found.status == EmbedStatus::inconclusive) throw InputError("embedding search exhausted its budget");
    if (found.status == EmbedStatus::absent)
      throw InputError("pattern " + cfg.pattern + " does not embed in the target network");
    witness = *found.witness;
  }
  return lift_json(lift_witness(*pattern, target, witness, solve_options(cfg)));
}

Json multi_od_cmd(const Config& cfg) {
  require_json(cfg, "ibp multi-od");
  return multi_od_json(check_multi_od_sufficient(load(cfg, cfg.input).instance));
}

std::string poa_cmd(const Config& cfg) {
  const SolveOptions opts = solve_options(cfg);
  std::vector<std::string> names;
  std::vector<EfficiencyReport> reports;
  std::vector<InstanceSpec> instances;
  for (const std::string& path : cfg.inputs) {
    instances.push_back(load(cfg, path).instance);
    reports.push_back(efficiency_report(instances.back(), opts));
    names.push_back(path);
  }
  if (cfg.format == "csv") return efficiency_csv(names, reports);
  if (reports.size() == 1) return render(efficiency_json(instances[0], reports[0]));
  throw InputError("several inputs need --format csv");
}

Json uniqueness_cmd(const Config& cfg) {
  require_json(cfg, "uniqueness");
  const CaseDocument doc = load(cfg, cfg.input);
  const UniquenessReport r = check_essential_uniqueness(doc.instance, cfg.runs, solve_options(cfg), cfg.tolerance);
  return uniqueness_json(doc.instance, r);
}

void emit(const Config& cfg, const std::string& text, std::ostream& out) {
  if (cfg.out.empty() || cfg.out == "-") {
    out << text;
    return;
  }
  std::ofstream file(cfg.out);
  if (!file) throw InputError("cannot write '" + cfg.out + "'");
  file << text;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  Config cfg;
  CLI::App app{"Equilibria, topology and informational paradoxes on two-terminal congestion networks", "ibplab"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--out", cfg.out, "Output file (default: stdout)");
  app.add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
  app.add_option("--jobs", cfg.jobs, "Worker threads for searches")->check(CLI::PositiveNumber);
  app.add_option("--tol-gap", cfg.tol_gap, "Relative Frank-Wolfe gap tolerance");
  app.add_option("--tol-eq", cfg.tol_eq, "Relative equilibrium residual tolerance");
  app.add_option("--param", cfg.params, "Document parameter override, name=value");

  auto* classify_app = app.add_subcommand("classify", "SP / LI / SLI classification");
  classify_app->add_option("input", cfg.input)->required();
  classify_app->add_flag("--witness", cfg.witness, "Search for a forbidden-pattern embedding when not SLI");

  auto* solve_app = app.add_subcommand("solve", "Information constrained equilibrium");
  solve_app->add_option("input", cfg.input)->required();
  solve_app->add_flag("--social-optimum", cfg.social, "Minimize total cost instead");

  auto* ibp_app = app.add_subcommand("ibp", "Informational paradox tools");
  ibp_app->require_subcommand(1);
  auto* check_app = ibp_app->add_subcommand("check", "Compare a type's cost before and after an expansion");
  check_app->add_option("input", cfg.input)->required();
  check_app->add_option("--type", cfg.type, "Expanding type (overrides the document's expansion)");
  check_app->add_option("--add", cfg.added, "Edges added to the type's information set")->delimiter(',');
  check_app->add_flag("--restricted", cfg.restricted, "Restricted mode: the type learns every edge");
  check_app->add_flag("--fail-on-paradox", cfg.fail_on_paradox, "Exit with status 1 when the paradox occurs");

  auto* search_app = ibp_app->add_subcommand("search", "Randomized search on a fixed network");
  search_app->add_option("input", cfg.input)->required();
  search_app->add_option("--trials", cfg.trials)->check(CLI::PositiveNumber)->capture_default_str();
  search_app->add_option("--max-types", cfg.max_types)->check(CLI::Range(1, 16))->capture_default_str();
  search_app->add_flag("--restricted", cfg.restricted);

  auto* family_app = ibp_app->add_subcommand("family", "Affine paradox instance on the two-diamond network");
  family_app->add_option("--a1", cfg.a1)->required();
  family_app->add_option("--a3", cfg.a3)->required();
  family_app->add_option("--a5", cfg.a5)->required();
  family_app->add_option("--frac", cfg.frac, "s1 / (s1 + s2)")->required();
  family_app->add_option("--total", cfg.total, "s1 + s2")->capture_default_str();

  auto* lift_app = ibp_app->add_subcommand("lift", "Transport a pattern instance into a larger network");
  lift_app->add_option("input", cfg.input, "Target network")->required();
  lift_app->add_option("--pattern", cfg.pattern, "fig4a ... fig4i or wheatstone")->required();
  lift_app->add_option("--witness", cfg.witness_file, "Embedding document (default: search for one)");

  auto* multi_app = ibp_app->add_subcommand("multi-od", "Sufficient condition with several OD pairs");
  multi_app->add_option("input", cfg.input)->required();

  auto* poa_app = app.add_subcommand("poa", "Equilibrium versus social optimum costs");
  poa_app->add_option("inputs", cfg.inputs)->required();

  auto* unique_app = app.add_subcommand("uniqueness", "Solve from several random starts and compare");
  unique_app->add_option("input", cfg.input)->required();
  unique_app->add_option("--runs", cfg.runs)->check(CLI::Range(2, 1000))->capture_default_str();
  unique_app->add_option("--tolerance", cfg.tolerance)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    int code = kOk;
    std::string text;
    auto finish = [&](const std::pair<Json, bool>& result, int flag_code) {
      text = render(result.first);
      if (!result.second) code = flag_code;
    };
    if (*classify_app) {
      text = render(classify_cmd(cfg));
    } else if (*solve_app) {
      finish(solve_cmd(cfg), kNotConverged);
    } else if (*check_app) {
      const auto [doc, occurs] = check_cmd(cfg);
      text = render(doc);
      if (occurs && cfg.fail_on_paradox) code = kParadox;
    } else if (*search_app) {
      text = search_cmd(cfg);
    } else if (*family_app) {
      const auto [doc, occurs] = family_cmd(cfg);
      text = render(doc);
      if (!occurs) throw ConstructionFailure("generated instance shows no paradox");
    } else if (*lift_app) {
      text = render(lift_cmd(cfg));
    } else if (*multi_app) {
      text = render(multi_od_cmd(cfg));
    } else if (*poa_app) {
      text = poa_cmd(cfg);
    } else if (*unique_app) {
      text = render(uniqueness_cmd(cfg));
    }
    emit(cfg, text, out);
    if (code == kNotConverged) err << "error: solver did not converge\n";
    return code;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const RouteCapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const NotConverged& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace ibplab::cli
