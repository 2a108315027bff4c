#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "generators.hpp"
#include "ibplab/efficiency.hpp"

using namespace ibplab;

TEST_CASE("beta for the supported classes") {
  CHECK(beta_bound({CostClass::Kind::constant, 0}) == 0.0);
  CHECK(beta_bound({CostClass::Kind::affine, 1}) == 0.25);
  CHECK(beta_bound({CostClass::Kind::polynomial, 1}) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(beta_bound({CostClass::Kind::polynomial, 2}) == doctest::Approx(2.0 / (3.0 * std::sqrt(3.0))).epsilon(1e-10));
  // x^d peaks at z = x (d+1)^(-1/d).
  CHECK(beta_bound({CostClass::Kind::polynomial, 4}) ==
        doctest::Approx(4.0 / std::pow(5.0, 5.0 / 4.0)).epsilon(1e-10));
  CHECK_THROWS_AS(beta_bound({CostClass::Kind::unsupported, 0}), InputError);

  // Affine with an offset is never worse than the pure slope.
  CHECK(beta_of(CostFunction::affine(2, 0), 3.0) == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(beta_of(CostFunction::affine(2, 1), 3.0) < 0.25);
  CHECK(beta_of(CostFunction::constant(1), 3.0) == doctest::Approx(0.0));
}

TEST_CASE("cost class detection") {
  CHECK(classify_costs(fixtures::pigou()).kind == CostClass::Kind::affine);
  auto inst = fixtures::pigou();
  inst.costs = {CostFunction::constant(1), CostFunction::constant(2)};
  CHECK(classify_costs(inst).kind == CostClass::Kind::constant);
  inst.costs[0] = CostFunction::polynomial({0, 0, 1});
  CHECK(classify_costs(inst).name() == "polynomial-2");
  inst.costs[0] = CostFunction::piecewise_linear({{0, 0}, {1, 1}});
  CHECK(classify_costs(inst).kind == CostClass::Kind::unsupported);
}

TEST_CASE("Pigou ratio") {
  const EfficiencyReport r = efficiency_report(fixtures::pigou());
  CHECK(r.c_cwe == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.c_so == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(std::abs(r.ratio - 0.75) < 1e-6);
  REQUIRE(r.lower_bound);
  CHECK(*r.lower_bound == 0.75);
}

TEST_CASE("type-specific ratio can fall below the aggregate bound") {
  const EfficiencyReport r = efficiency_report(fixtures::example4(1, 0.25, 1));
  CHECK(std::abs(r.ratio - 0.8) < 1e-5);
  CHECK(std::abs(r.type_ratio[0] - 0.5) < 1e-5);
  CHECK(r.type_cwe[0] == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(r.type_cwe[1] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.type_so[1] == doctest::Approx(-0.25 + 1 + 0.125).epsilon(1e-8));
}

TEST_CASE("constant costs are efficient") {
  auto inst = fixtures::pigou();
  inst.costs = {CostFunction::constant(1), CostFunction::constant(2)};
  const EfficiencyReport r = efficiency_report(inst);
  CHECK(r.ratio == doctest::Approx(1.0));
  CHECK(*r.lower_bound == 1.0);
}

TEST_CASE("random affine instances respect the bound") {
  gen::Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 40; ++k) {
    const Network net = gen::random_composed(rng, 8);
    std::vector<std::tuple<std::string, double, std::vector<EdgeId>>> types;
    const int count = 1 + static_cast<int>(u(rng) * 3);
    for (int t = 0; t < count; ++t) {
      const auto info = gen::random_info_set(rng, net);
      std::vector<EdgeId> ids;
      for (std::size_t e = 0; e < info.size(); ++e)
        if (info[e]) ids.push_back(net.edge(e).id);
      types.emplace_back(std::to_string(t + 1), 0.1 + 3 * u(rng), ids);
    }
    const auto inst = make_instance(net, gen::random_affine_costs(rng, net.num_edges()), types);
    const EfficiencyReport r = efficiency_report(inst);
    CHECK(r.ratio <= 1.0 + 1e-9);
    CHECK(r.ratio >= 0.75 - 1e-6);
    for (Eigen::Index i = 0; i < r.type_cwe.size(); ++i) {
      const double s = inst.types[static_cast<std::size_t>(i)].demand;
      CHECK(r.type_cwe[i] == doctest::Approx(s * r.type_costs[i]).epsilon(1e-7));
      CHECK(r.variational[i] <= 1e-6 * std::max(1.0, r.c_cwe));
    }
  }
}
