#include "doctest.h"
#include "fixtures.hpp"
#include "properties.hpp"

using namespace ibplab;

namespace {

void require_clean(const props::Outcome& o) {
  INFO(o.first);
  CHECK(o.checks > 0);
  CHECK(o.violations == 0);
}

}  // namespace

TEST_CASE("series join") {
  const Network g = props::series(fixtures::two_parallel(), fixtures::wheatstone());
  CHECK(g.num_edges() == 7);
  CHECK(g.origin() == "a.O");
  CHECK(g.destination() == "b.D");
  CHECK(enumerate_routes(g).size() == 8);
}

TEST_CASE("load monotonicity on LI networks") {
  gen::Rng rng(11);
  props::Outcome total;
  for (int k = 0; k < 20; ++k) total += props::monotone_load(rng, gen::random_li(rng, 2 + k % 7));
  require_clean(total);
}

TEST_CASE("expansion on LI networks leaves some type no worse off") {
  gen::Rng rng(12);
  props::Outcome total;
  for (int k = 0; k < 20; ++k) total += props::some_type_gains(rng, gen::random_li(rng, 2 + k % 7));
  require_clean(total);
}

TEST_CASE("equilibria split over series joins") {
  gen::Rng rng(13);
  props::Outcome total;
  for (int k = 0; k < 20; ++k)
    total += props::series_split(rng, gen::random_composed(rng, 5), gen::random_sp(rng, 1 + k % 4));
  require_clean(total);
}

TEST_CASE("max-min cost change on LI networks") {
  gen::Rng rng(14);
  props::Outcome total;
  for (int k = 0; k < 20; ++k) total += props::max_min(rng, gen::random_li(rng, 2 + k % 7));
  require_clean(total);
}

TEST_CASE("potential gradient against central differences") {
  gen::Rng rng(15);
  props::Outcome total;
  for (int k = 0; k < 20; ++k) total += props::gradient_check(rng, gen::random_composed(rng, 8));
  require_clean(total);
}

TEST_CASE("residual stays within the final gap") {
  gen::Rng rng(16);
  props::Outcome total;
  for (int k = 0; k < 20; ++k) {
    const auto inst = props::random_instance(rng, gen::random_composed(rng, 8), 3, false);
    const Solution s = solve_icwe(inst);
    total += props::residual_within_gap(s.certificate, s.profile.edge_costs.maxCoeff());
  }
  require_clean(total);
}

TEST_CASE("max-min check fails on networks that are not LI") {
  gen::Rng rng(1);
  props::Outcome total;
  for (int k = 0; k < 300; ++k) {
    const Network n = gen::random_composed(rng, 8);
    if (!classify(n).is_li) total += props::max_min(rng, n);
  }
  CHECK(total.violations > 0);
}
