#include <doctest.h>

#include <cmath>
#include <random>

#include "isdn/market.hpp"
#include "support.hpp"

using namespace isdn;

TEST_CASE("cleared allocations: prices cancel out of the total payoff") {
  std::mt19937_64 g(21);
  int cases = 0;
  for (std::uint64_t seed = 1; cases < 1000; ++seed) {
    const Scenario s = test::tiny(seed);
    const RateTable r = build_rate_table(s);
    for (int k = 0; k < 20; ++k, ++cases) {
      const AllocationState a = test::random_cleared(Dims::of(s), g);
      const PriceState p = test::random_prices(Dims::of(s), g, 5.0);
      const double j = total_payoff(a, r, s);
      const double b = payoff_breakdown(a, p, r, s).total;
      REQUIRE(b == doctest::Approx(j).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("breakdown adds up") {
  std::mt19937_64 g(2);
  const Scenario s = test::tiny(9);
  const RateTable r = build_rate_table(s);
  const AllocationState a = test::random_alloc(Dims::of(s), g);
  const PriceState p = test::random_prices(Dims::of(s), g);
  const PayoffBreakdown b = payoff_breakdown(a, p, r, s);
  double sum = b.satellite;
  for (auto* v : {&b.user, &b.bs_buyer, &b.bs_seller, &b.mbs})
    for (double x : *v) sum += x;
  CHECK(sum == doctest::Approx(b.total));
  CHECK(b.user.size() == static_cast<std::size_t>(s.U()));
  CHECK(b.user[0] == doctest::Approx(user_payoff(0, a, p, r, s)));
}

TEST_CASE("total payoff needs a cleared allocation") {
  std::mt19937_64 g(3);
  const Scenario s = test::tiny(2);
  const RateTable r = build_rate_table(s);
  AllocationState a = test::random_cleared(Dims::of(s), g);
  a.theta[0] ^= 1;
  CHECK_THROWS_AS(total_payoff(a, r, s), std::logic_error);
}

TEST_CASE("constraint checker is pure") {
  std::mt19937_64 g(33);
  int cases = 0;
  for (std::uint64_t seed = 1; cases < 1000; ++seed) {
    const Scenario s = test::tiny(seed);
    const RateTable r = build_rate_table(s);
    for (int k = 0; k < 25; ++k, ++cases) {
      const AllocationState a = k % 2 ? test::random_cleared(Dims::of(s), g, 0.2) : test::random_alloc(Dims::of(s), g);
      const AllocationState before = a;
      const auto first = check_constraints(a, r, s).to_json();
      const auto second = check_constraints(a, r, s).to_json();
      REQUIRE(a == before);
      REQUIRE(first == second);
    }
  }
}

TEST_CASE("empty allocation fails only the lower bounds") {
  const Scenario s = test::tiny(1);
  const RateTable r = build_rate_table(s);
  const ConstraintReport rep = check_constraints(AllocationState::zeros(Dims::of(s)), r, s);
  CHECK_FALSE(rep.all_ok());
  CHECK(rep.ok('c'));
  CHECK(rep.ok('s'));
  CHECK_FALSE(rep.ok('a'));
  CHECK_FALSE(rep.at('a').first_violation.empty());
}

TEST_CASE("a user served twice in one slot is flagged") {
  const Scenario s = load_scenario(test::tiny_doc(1));
  const RateTable r = build_rate_table(s);
  AllocationState a = AllocationState::zeros(Dims::of(s));
  if (s.N() < 2) return;
  a.rho[a.iu(0, 0, 0)] = a.theta[a.iu(0, 0, 0)] = 1;
  a.rho[a.iu(1, 0, 0)] = a.theta[a.iu(1, 0, 0)] = 1;
  bool some = false;
  for (const auto& f : check_constraints(a, r, s).families)
    if (!f.ok && f.first_violation.find("u=0") != std::string::npos) some = true;
  CHECK(some);
}

TEST_CASE("allocation json round-trip") {
  std::mt19937_64 g(4);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = test::tiny(seed);
    const AllocationState a = test::random_alloc(Dims::of(s), g);
    CHECK(allocation_from_json(to_json(a)) == a);
  }
}

TEST_CASE("prices start at zero") {
  const PriceState p = PriceState::zeros(Dims{2, 3, 1, 4});
  CHECK(p.lambda.size() == 24u);
  CHECK(p.varsigma.size() == 8u);
  CHECK(p.xi.size() == 8u);
  CHECK(p.k == 1);
}
