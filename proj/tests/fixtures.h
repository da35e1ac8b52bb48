#ifndef FAIRSHARE_TESTS_FIXTURES_H_
#define FAIRSHARE_TESTS_FIXTURES_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "fairshare/harness.h"
#include "fairshare/instance.h"
#include "fairshare/topology.h"

namespace fairshare::testing {

// Two unit links in a row; r0 crosses both, r1 and r2 use one each.
inline Instance linear_instance(double alpha = 1.0) {
  Instance i;
  i.alpha = alpha;
  i.links = {{"j1", 1.0, {}, {}}, {"j2", 1.0, {}, {}}};
  i.paths = {{"p0", {"j1", "j2"}}, {"p1", {"j1"}}, {"p2", {"j2"}}};
  i.requests = {{"r0", 1.0, {"p0"}, "", ""}, {"r1", 1.0, {"p1"}, "", ""}, {"r2", 1.0, {"p2"}, "", ""}};
  return i;
}

inline Instance single_link_instance(double capacity, std::size_t requests, double alpha = 1.0) {
  Instance i;
  i.alpha = alpha;
  i.links = {{"j", capacity, {}, {}}};
  for (std::size_t r = 0; r < requests; ++r) {
    const std::string id = std::to_string(r);
    i.paths.push_back({"p" + id, {"j"}});
    i.requests.push_back({"r" + id, 1.0, {"p" + id}, "", ""});
  }
  return i;
}

// One request with two disjoint single-link paths.
inline Instance two_path_instance(double c1, double c2, double alpha = 1.0) {
  Instance i;
  i.alpha = alpha;
  i.links = {{"a", c1, {}, {}}, {"b", c2, {}, {}}};
  i.paths = {{"pa", {"a"}}, {"pb", {"b"}}};
  i.requests = {{"r", 1.0, {"pa", "pb"}, "", ""}};
  return i;
}

// Desk-scale random instance: BA(nodes, 4), capacity 100, 1-4 paths.
inline Instance random_instance(std::uint64_t seed, std::size_t nodes = 30, std::size_t requests = 40,
                                double alpha = 1.0) {
  Instance i = make_network(generate_barabasi_albert(nodes, 4, seed), 100.0);
  generate_requests(i, {requests, 1, 4, 1.0, seed});
  i.alpha = alpha;
  return i;
}

// Golden-section minimum of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi,
                             double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double neg_utility(double y, double w, double alpha) {
  return alpha == 1.0 ? -w * std::log(y) : -w * std::pow(y, 1.0 - alpha) / (1.0 - alpha);
}

}  // namespace fairshare::testing

#endif  // FAIRSHARE_TESTS_FIXTURES_H_
