#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "ibplab/serialize.hpp"

using namespace ibplab;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string data(const std::string& name) { return std::string(IBPLAB_DATA_DIR) + "/" + name; }

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

Json json_of(const Run& r) {
  REQUIRE_MESSAGE(r.code != 2, r.err);
  return Json::parse(r.out);
}

}  // namespace

TEST_CASE("cli classify") {
  auto r = run({"classify", data("wheatstone.json")});
  CHECK(r.code == 0);
  auto d = json_of(r);
  CHECK_FALSE(d["is_sp"].get<bool>());
  d = json_of(run({"classify", data("single_edge.json")}));
  CHECK(d["is_sp"].get<bool>());
  CHECK(d["is_li"].get<bool>());
  CHECK(d["is_sli"].get<bool>());
  d = json_of(run({"classify", data("wheatstone.json"), "--witness"}));
  CHECK(d["witness"]["pattern"] == "fig4a");
}

TEST_CASE("cli solve with parameter overrides") {
  auto d = json_of(run({"solve", data("example1.json"), "--param", "a=1", "--param", "s=0.5"}));
  CHECK(d["type_costs"]["1"].get<double>() == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(d["type_costs"]["2"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
  d = json_of(run({"solve", data("example1.json"), "--param", "s=0.9"}));
  CHECK(d["type_costs"]["1"].get<double>() == doctest::Approx(2.0 - 0.9 * 0.5 + 0.25).epsilon(1e-6));
  d = json_of(run({"solve", data("pigou.json"), "--social-optimum"}));
  CHECK(d["kind"] == "social_optimum");
  CHECK(d["total_cost"].get<double>() == doctest::Approx(0.75));
}

TEST_CASE("cli exit codes") {
  auto r = run({"solve", data("bad.json")});
  CHECK(r.code == cli::kInputError);
  CHECK(r.err.find("cost") != std::string::npos);
  CHECK(run({"solve", data("missing.json")}).code == cli::kInputError);
  CHECK(run({"frobnicate"}).code == cli::kInputError);
  CHECK(run({"--help"}).code == cli::kOk);
  r = run({"--tol-gap", "1e-300", "--tol-eq", "1e-300", "solve", data("cubic_wheatstone.json")});
  CHECK(r.code == cli::kNotConverged);
  CHECK(run({"ibp", "check", data("wheatstone.json")}).code == cli::kOk);
  CHECK(run({"ibp", "check", data("wheatstone.json"), "--fail-on-paradox"}).code == cli::kParadox);
  CHECK(run({"ibp", "check", data("fig7b.json"), "--fail-on-paradox"}).code == cli::kOk);
  CHECK(run({"ibp", "search", data("fig4b.json"), "--trials", "0"}).code == cli::kInputError);
}

TEST_CASE("cli ibp check") {
  auto d = json_of(run({"ibp", "check", data("example2b.json")}));
  CHECK(d["occurs"].get<bool>());
  CHECK(d["margin"].get<double>() == doctest::Approx(0.25).epsilon(1e-4));
  d = json_of(run({"ibp", "check", data("wheatstone_restricted.json")}));
  CHECK(d["pre"].get<double>() == doctest::Approx(1.6));
  CHECK(d["post"].get<double>() == doctest::Approx(2.0));
  d = json_of(run({"ibp", "check", data("example2b.json"), "--type", "2", "--add", "e2,e3"}));
  CHECK(d["type"] == "2");
  CHECK(run({"ibp", "check", data("fig4b.json"), "--type", "1", "--add", "e5"}).code == cli::kInputError);
}

TEST_CASE("cli ibp family, lift and multi-od") {
  auto d = json_of(run({"ibp", "family", "--a1", "1", "--a3", "1", "--a5", "1", "--frac", "0.7"}));
  CHECK(d["verdict"]["occurs"].get<bool>());
  CHECK(d["verdict"]["pre"].get<double>() == doctest::Approx(0.3 + 1.0 / 3));
  CHECK(d["verdict"]["post"].get<double>() == doctest::Approx(2.0 / 3));
  CHECK(run({"ibp", "family", "--a1", "1", "--a3", "1", "--a5", "1", "--frac", "0.99"}).code == cli::kInputError);

  d = json_of(run({"ibp", "lift", data("wheatstone_chord.json"), "--pattern", "fig4a"}));
  CHECK(d["verdict"]["occurs"].get<bool>());
  CHECK(run({"ibp", "lift", data("sli_net.json"), "--pattern", "fig4a"}).code != cli::kOk);

  d = json_of(run({"ibp", "multi-od", data("fig7b.json")}));
  CHECK(d["guaranteed_no_ibp"].get<bool>());
  d = json_of(run({"ibp", "multi-od", data("fig8.json")}));
  CHECK_FALSE(d["guaranteed_no_ibp"].get<bool>());
}

TEST_CASE("cli ibp search") {
  auto d = json_of(run({"ibp", "search", data("sli_net.json"), "--trials", "1000", "--seed", "7", "--jobs", "4"}));
  CHECK(d["hits"].empty());
  const auto csv = run({"--format", "csv", "ibp", "search", data("fig4b.json"), "--trials", "1000"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("trial,type,types,pre,post,margin,threshold\n607,", 0) == 0);
}

TEST_CASE("cli poa") {
  auto d = json_of(run({"poa", data("pigou.json")}));
  CHECK(d["ratio"].get<double>() == doctest::Approx(0.75));
  d = json_of(run({"poa", data("example4.json")}));
  CHECK(d["ratio"].get<double>() == doctest::Approx(0.8));
  CHECK(d["types"][0]["ratio"].get<double>() == doctest::Approx(0.5));
  d = json_of(run({"poa", data("constant.json")}));
  CHECK(d["ratio"].get<double>() == doctest::Approx(1.0));
  const auto csv = run({"--format", "csv", "poa", data("pigou.json"), data("constant.json")});
  CHECK(csv.code == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 3);
}

TEST_CASE("cli output is deterministic and validates") {
  const std::vector<std::vector<std::string>> commands = {
      {"classify", data("example1.json")},
      {"solve", data("example2b.json")},
      {"ibp", "check", data("example2b.json")},
      {"ibp", "search", data("fig4b.json"), "--trials", "700", "--jobs", "3"},
      {"ibp", "multi-od", data("fig8.json")},
      {"poa", data("example4.json")},
      {"uniqueness", data("example1.json")},
  };
  for (const auto& c : commands) {
    const auto a = run(c), b = run(c);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(validate_output(Json::parse(a.out)).empty());
  }
}

TEST_CASE("cli writes to --out") {
  const auto path = std::filesystem::temp_directory_path() / "ibplab_cli_out.json";
  std::filesystem::remove(path);
  const auto r = run({"--out", path.string(), "poa", data("pigou.json")});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  CHECK(Json::parse(in)["kind"] == "efficiency");
  std::filesystem::remove(path);
}
