#include <doctest.h>

#include <cmath>

#include "fairshare/oracle.h"
#include "fixtures.h"

using namespace fairshare;
using fairshare::testing::linear_instance;
using fairshare::testing::random_instance;
using fairshare::testing::single_link_instance;
using fairshare::testing::two_path_instance;

namespace {

// Linear network optimum from the stationarity conditions: the two short
// requests share symmetric prices, so y1 = y2 = 2^(1/alpha) y0 and y0 + y1 = 1.
double linear_y0(double alpha) { return 1.0 / (1.0 + std::pow(2.0, 1.0 / alpha)); }

}  // namespace

TEST_CASE("certificate of the linear optimum") {
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    const auto inst = linear_instance(alpha);
    const auto inc = build_incidence(inst);
    const double y0 = linear_y0(alpha);
    const auto cert = fairness_certificate(inst, inc, {y0, 1.0 - y0, 1.0 - y0});
    CHECK(cert.certified);
    CHECK(std::abs(cert.violation) <= 1e-9);
  }
}

TEST_CASE("certificate rejects non-optimal points") {
  const auto inst = linear_instance();
  const auto inc = build_incidence(inst);
  const auto cert = fairness_certificate(inst, inc, {0.5, 0.5, 0.5});
  // Best response to prices 2,2,2: one unit to each short request, value 4,
  // against a baseline of 3.
  CHECK(cert.violation == doctest::Approx(1.0));
  CHECK_FALSE(cert.certified);
}

TEST_CASE("certificate of the equal split on one link") {
  const auto inst = single_link_instance(12.0, 3, 2.0);
  const auto inc = build_incidence(inst);
  CHECK(fairness_certificate(inst, inc, {4.0, 4.0, 4.0}).certified);
  CHECK_FALSE(fairness_certificate(inst, inc, {5.0, 4.0, 3.0}).certified);
}

TEST_CASE("certificate input errors") {
  const auto inst = linear_instance();
  const auto inc = build_incidence(inst);
  CHECK_THROWS_AS(fairness_certificate(inst, inc, {0.6, 0.6, 0.3}), OracleError);
  CHECK_THROWS_AS(fairness_certificate(inst, inc, {-0.1, 0.5, 0.5}), OracleError);
  CHECK_THROWS_AS(fairness_certificate(inst, inc, {0.0, 0.5, 0.5}), OracleError);
  CHECK_THROWS_AS(fairness_certificate(inst, inc, {0.5, 0.5}), OracleError);
}

TEST_CASE("reference solutions of hand instances") {
  SUBCASE("single link") {
    const auto ref = solve_reference(single_link_instance(100.0, 4, 2.0));
    for (double y : ref.y) CHECK(y == doctest::Approx(25.0).epsilon(1e-5));
  }
  SUBCASE("two paths") {
    const auto ref = solve_reference(two_path_instance(3.0, 5.0));
    CHECK(ref.y[0] == doctest::Approx(8.0).epsilon(1e-5));
  }
  SUBCASE("linear network") {
    for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
      const auto ref = solve_reference(linear_instance(alpha));
      const double y0 = linear_y0(alpha);
      CHECK(ref.y[0] == doctest::Approx(y0).epsilon(1e-4));
      CHECK(ref.y[1] == doctest::Approx(1.0 - y0).epsilon(1e-4));
      CHECK(ref.y[2] == doctest::Approx(1.0 - y0).epsilon(1e-4));
      CHECK(ref.certificate.certified);
    }
  }
  SUBCASE("no requests") {
    Instance inst;
    inst.links = {{"j", 1.0, {}, {}}};
    CHECK(solve_reference(inst).y.empty());
  }
}

TEST_CASE("reference is certified on random instances") {
  for (double alpha : {1.0, 2.0}) {
    const auto inst = random_instance(7, 30, 40, alpha);
    const auto ref = solve_reference(inst);
    CHECK(ref.certificate.certified);
    CHECK(allocation_feasible(inst, ref.x, 1e-9));
  }
}

TEST_CASE("lower bound hand case") {
  const auto report = lower_bound_check(linear_instance());
  CHECK(report.holds);
  CHECK(report.lower[0] == doctest::Approx(1.0 / 3.0));
  CHECK(report.optimum[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
  CHECK(report.max_excess <= 1e-6);
}

TEST_CASE("lower bound on random instances") {
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
      const auto report = lower_bound_check(random_instance(seed, 20, 20, alpha));
      CHECK(report.holds);
    }
  }
}
