#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "bcp/bm_formulas.hpp"
#include "oracles.hpp"

using namespace bcp;
using bcp::testing::pinned_bridge_survival;
using bcp::testing::pinned_bridge_upper_first;
using bcp::testing::stay_in_band;

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kStayBand1 = 0.3707774297995239;  // stay in (-1, 1) up to t = 1

TwoSidedParams corridor(double a, double b, double c, double d, double t) {
  return {a, b, c, d, t};
}
}  // namespace

TEST_CASE("bridge_upcross_prob examples") {
  CHECK(bridge_upcross_prob(0, 1, 1, 0) == doctest::Approx(0.1353352832366127).epsilon(1e-14));
  CHECK(bridge_upcross_prob(0, 1, 1, 1.5) == 1.0);
  CHECK(bridge_upcross_prob(0, 1, 1, 1.0) == 1.0);
  CHECK(bridge_upcross_prob(0, -0.2, 1, -3) == 1.0);
  CHECK(bridge_upcross_prob(0.5, 1.5, 1, 0) ==
        doctest::Approx(0.002478752176666358).epsilon(1e-13));
}

TEST_CASE("bridge_upcross_prob agrees with pinned-bridge simulation") {
  const auto sim = pinned_bridge_upper_first(1.5, 0.5, 0, 0, 1, 0, true, 200, 200000, 11);
  const double p = bridge_upcross_prob(0.5, 1.5, 1, 0);
  CHECK(std::abs(sim.p - p) < 4 * sim.se + 1e-9);

  const auto sim2 = pinned_bridge_upper_first(0.8, -0.3, 0, 0, 2, 0.1, true, 400, 50000, 12);
  const double p2 = bridge_upcross_prob(-0.3, 0.8, 2, 0.1);
  CHECK(std::abs(sim2.p - p2) < 4 * sim2.se);
}

TEST_CASE("bridge_upcross_prob rejects bad input") {
  CHECK_THROWS_AS(bridge_upcross_prob(0, 1, 0, 0), std::domain_error);
  CHECK_THROWS_AS(bridge_upcross_prob(0, 1, -1, 0), std::domain_error);
  CHECK_THROWS_AS(bridge_upcross_prob(kNaN, 1, 1, 0), std::domain_error);
  CHECK_THROWS_AS(bridge_upcross_prob(0, 1, 1, INFINITY), std::domain_error);
}

TEST_CASE("bridge_upcross_prob monotonicity") {
  for (double a : {-1.0, 0.0, 0.7}) {
    for (double x : {-2.0, -0.5, 0.0, 0.3}) {
      double prev = 2.0;
      for (double b = 0.6; b < 4.0; b += 0.1) {
        if (x >= a + b) continue;
        const double p = bridge_upcross_prob(a, b, 1.0, x);
        CHECK(p <= prev);
        prev = p;
      }
    }
    double prev = -1.0;
    for (double x = -3.0; x < 2.0; x += 0.05) {
      const double p = bridge_upcross_prob(a, 1.2, 1.0, x);
      CHECK(p >= prev);
      prev = p;
    }
  }
}

TEST_CASE("linear_noncross_prob examples") {
  CHECK(linear_noncross_prob(0, 1, 1) == doctest::Approx(0.6826894921370859).epsilon(1e-13));
  CHECK(linear_noncross_prob(0.5, 1.5, 1) == doctest::Approx(0.9418490958337050).epsilon(1e-13));
  CHECK(linear_noncross_prob(-0.5, 1.5, 1) == doctest::Approx(0.7393857283676394).epsilon(1e-13));
  CHECK(std::abs(linear_noncross_prob(0.5, 1.5, 1) - 0.941846) < 5e-6);
  CHECK(std::abs(linear_noncross_prob(-0.5, 1.5, 1) - 0.739387) < 5e-6);
  CHECK(linear_noncross_prob(LinearBoundaryParams{0, 1, 1}) == linear_noncross_prob(0, 1, 1));
  CHECK(linear_noncross_prob(0, 0, 1) == 0.0);
  CHECK(linear_noncross_prob(1, -1, 1) == 0.0);
  CHECK_THROWS_AS(linear_noncross_prob(0, 1, 0), std::domain_error);
}

TEST_CASE("linear_noncross_prob stays finite for extreme slopes") {
  for (double a : {-200.0, -40.0, 40.0, 200.0}) {
    for (double b : {0.01, 1.0, 30.0}) {
      const double p = linear_noncross_prob(a, b, 1.0);
      CHECK(std::isfinite(p));
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
  CHECK(linear_noncross_prob(200, 1, 1) == doctest::Approx(1.0 - std::exp(-400.0)));
}

TEST_CASE("anderson_theta without a lower line reduces to the bridge formula") {
  for (double g1 : {0.3, 1.0, 2.0}) {
    for (double d1 : {-0.5, 0.0, 0.8}) {
      for (double x : {-1.5, 0.0, 0.5}) {
        if (x >= g1 + d1) continue;
        const double th = anderson_theta(g1, d1, -1e6, 0.0, 1.0, x);
        CHECK(std::abs(th - bridge_upcross_prob(d1, g1, 1.0, x)) < 1e-8);
      }
    }
  }
}

TEST_CASE("anderson_theta against pinned-bridge simulation") {
  const double th = anderson_theta(1, 0, -1, 0, 1, 0);
  CHECK(th > 0.0);
  CHECK(th < 1.0);
  const auto sim = pinned_bridge_upper_first(1, 0, -1, 0, 1, 0, false, 400, 100000, 21);
  CHECK(std::abs(sim.p - th) < 4 * sim.se);

  const double th2 = anderson_theta(1.2, 0.4, -0.7, -0.3, 1.5, 0.2);
  const auto sim2 = pinned_bridge_upper_first(1.2, 0.4, -0.7, -0.3, 1.5, 0.2, false, 400, 100000, 22);
  CHECK(std::abs(sim2.p - th2) < 4 * sim2.se);
}

TEST_CASE("anderson_theta precondition branch") {
  CHECK(anderson_theta(1, 0, -1, 0, 1, 1.0) == 1.0);
  CHECK(anderson_theta(1, 0.5, -1, 0, 1, 2.0) == 1.0);
}

TEST_CASE("anderson_chi examples and reductions") {
  CHECK(anderson_chi(1, 0, -1, 0, 1) ==
        doctest::Approx((1 - kStayBand1) / 2).epsilon(1e-12));
  CHECK(anderson_chi(1e3, 0, -1, 0, 1) < 1e-12);
  for (double g1 : {0.5, 1.0, 2.0}) {
    for (double d1 : {-0.5, 0.0, 0.5}) {
      const double chi = anderson_chi(g1, d1, -1e6, 0.0, 1.0);
      CHECK(std::abs(chi - (1.0 - linear_noncross_prob(d1, g1, 1.0))) < 1e-8);
    }
  }
}

TEST_CASE("two_sided_segment_factor") {
  const auto sym = corridor(0, 1, 0, 1, 1);
  const auto sim = pinned_bridge_survival(1, 0, -1, 0, 1, 0, 400, 100000, 31);
  CHECK(std::abs(sim.p - two_sided_segment_factor(sym, 0)) < 4 * sim.se);

  const auto sloped = corridor(0.5, 1.2, -0.3, 0.9, 1.3);
  const auto sim2 = pinned_bridge_survival(1.2, 0.5, -0.9, 0.3, 1.3, 0.4, 400, 100000, 32);
  CHECK(std::abs(sim2.p - two_sided_segment_factor(sloped, 0.4)) < 4 * sim2.se);

  for (double x : {-0.5, 0.0, 0.7}) {
    const auto wide = corridor(0.3, 1.1, 0.0, 1e6, 1.0);
    CHECK(std::abs(two_sided_segment_factor(wide, x) - (1 - bridge_upcross_prob(0.3, 1.1, 1, x))) <
          1e-8);
  }
  CHECK(two_sided_segment_factor(sloped, 0.5 * 1.3 + 1.2) == 0.0);
  CHECK(two_sided_segment_factor(sloped, -(-0.3 * 1.3 + 0.9)) == 0.0);
  CHECK(two_sided_segment_factor(sloped, 5.0) == 0.0);
}

TEST_CASE("two_sided_tail_prob examples") {
  CHECK(two_sided_tail_prob(corridor(0, 1, 0, 1, 1)) ==
        doctest::Approx(stay_in_band(1, 1)).epsilon(1e-12));
  CHECK(std::abs(two_sided_tail_prob(corridor(0, 1, 0, 1, 1)) - 0.370777) < 1e-6);
  CHECK(two_sided_tail_prob(corridor(0, 0.5, 0, 0.5, 2)) ==
        doctest::Approx(stay_in_band(0.5, 2)).epsilon(1e-10));
  CHECK(two_sided_tail_prob(corridor(0, 1, 0, 1, 1e-12)) == doctest::Approx(1.0).epsilon(1e-12));
  // Sloped corridors, cross-checked by quadrature of theta and simulation.
  CHECK(two_sided_tail_prob(corridor(0.5, 1.5, 0.3, 0.8, 1)) ==
        doctest::Approx(0.615503435979987).epsilon(1e-11));
  CHECK(two_sided_tail_prob(corridor(-0.4, 1.2, 0.7, 0.6, 2)) ==
        doctest::Approx(0.11647667375929108).epsilon(1e-10));
}

TEST_CASE("two_sided_tail_prob reductions and symmetry") {
  for (double a : {-0.5, 0.0, 0.5}) {
    for (double b : {0.5, 1.0, 1.5}) {
      const double two = two_sided_tail_prob(corridor(a, b, 0.0, 1e6, 1.0));
      CHECK(std::abs(two - linear_noncross_prob(a, b, 1.0)) < 1e-6);
    }
  }
  const double grid[] = {-0.6, 0.0, 0.4};
  for (double a : grid)
    for (double c : grid)
      for (double b : {0.4, 1.0, 1.7})
        for (double d : {0.5, 1.3}) {
          const double lhs = two_sided_tail_prob(corridor(a, b, c, d, 1.2));
          const double rhs = two_sided_tail_prob(corridor(c, d, a, b, 1.2));
          CHECK(std::abs(lhs - rhs) <= 1e-12);
        }
}

TEST_CASE("two_sided_tail_prob degenerate corridors") {
  CHECK(two_sided_tail_prob(corridor(0, 0, 0, 1, 1)) == 0.0);
  CHECK(two_sided_tail_prob(corridor(0, 1, 0, -0.1, 1)) == 0.0);
  CHECK(two_sided_tail_prob(corridor(-2, 1, 0, 0.5, 1)) == 0.0);  // lines meet before t
  CHECK_FALSE(corridor(-2, 1, 0, 0.5, 1).valid());
  CHECK(corridor(0.1, 1, 0.2, 0.5, 1).valid());
}

TEST_CASE("series values stay in [0, 1] on a grid") {
  for (double a : {-1.0, 0.0, 1.0})
    for (double c : {-1.0, 0.0, 1.0})
      for (double b : {0.05, 0.5, 2.0})
        for (double d : {0.05, 0.5, 2.0})
          for (double t : {0.01, 1.0, 5.0}) {
            const auto p = corridor(a, b, c, d, t);
            if (!p.valid()) continue;
            const double tail = two_sided_tail_prob(p);
            CHECK(tail >= 0.0);
            CHECK(tail <= 1.0);
            for (double f : {-0.9, 0.0, 0.9}) {
              const double x = f * std::min(a * t + b, c * t + d);
              const double seg = two_sided_segment_factor(p, x);
              CHECK(seg >= 0.0);
              CHECK(seg <= 1.0);
            }
          }
}

TEST_CASE("series terms decay geometrically") {
  // With max_terms = r the failure reports the size of term r.
  struct In {
    double g1, d1, g2, d2, t;
  };
  const In inputs[] = {{1, 0, -1, 0, 1}, {1.5, 0.5, -0.8, 0.3, 1}, {0.6, -0.2, -0.6, 0.2, 2}};
  for (const auto& in : inputs) {
    std::vector<double> terms;
    for (int r = 1; r <= 40; ++r) {
      try {
        anderson_chi(in.g1, in.d1, in.g2, in.d2, in.t, SeriesTolerance{1e-300, r});
        break;
      } catch (const SeriesNotConverged& e) {
        terms.push_back(e.last_term());
      }
    }
    REQUIRE(terms.size() >= 4);
    // Past the first few terms, every ratio is below 1 and shrinking.
    for (std::size_t i = 3; i < terms.size(); ++i) {
      CHECK(terms[i] < terms[i - 1]);
      if (terms[i] > 1e-250) CHECK(terms[i] / terms[i - 1] <= terms[i - 1] / terms[i - 2] * (1 + 1e-9));
    }
  }
}

TEST_CASE("series honour the term budget") {
  CHECK_THROWS_AS(anderson_theta(1, 0, -1, 0, 50, 0, SeriesTolerance{1e-12, 1}),
                  SeriesNotConverged);
  CHECK_NOTHROW(anderson_theta(1, 0, -1, 0, 50, 0, SeriesTolerance{1e-12, 200}));
}

TEST_CASE("corridors that pinch shut at the horizon") {
  for (double w : {0.0, 1e-11, 1e-8, 1e-5, 1e-3, 1e-2}) {
    const auto p = corridor(-0.7, 0.3, 0.0, 0.4 + w, 1.0);
    double tail = -1.0;
    CHECK_NOTHROW(tail = two_sided_tail_prob(p));
    CHECK(tail >= 0.0);
    CHECK(tail < 1e-12);
    double seg = -1.0;
    CHECK_NOTHROW(seg = two_sided_segment_factor(p, -0.4 - 0.5 * w));
    CHECK(seg < 1e-12);
  }
}
