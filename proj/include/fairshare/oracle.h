#ifndef FAIRSHARE_ORACLE_H_
#define FAIRSHARE_ORACLE_H_

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fairshare/fd_admm.h"
#include "fairshare/instance.h"

namespace fairshare {

class OracleError : public std::runtime_error {
 public:
  explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

struct Certificate {
  std::vector<double> candidate_y;
  // max over the capacity polytope of sum_r w_r (y'_r - y_r) / y_r^alpha.
  double violation = 0.0;
  double tolerance = 0.0;
  bool certified = false;
};

// Variational check of (w, alpha)-fairness by an exact LP. The candidate
// must be capacity feasible within `feasibility_tol` and have positive
// aggregates, otherwise OracleError.
Certificate fairness_certificate(const Instance& instance, const Incidence& inc,
                                 const std::vector<double>& candidate_x, double tolerance = 1e-9,
                                 double feasibility_tol = 1e-7);

struct ReferenceOptions {
  double residual_tol = 1e-6;
  std::size_t max_iters = 500000;
  // Certification threshold, scaled by sum of weights.
  double certificate_tol = 1e-5;
};

struct ReferenceSolution {
  std::vector<double> y;
  std::vector<double> x;
  double fairness = 0.0;
  std::size_t iterations = 0;
  Certificate certificate;
};

// Single-domain FD-ADMM run to a tight residual, accepted only once the
// certificate passes. The residual threshold is cut by 100 up to three times
// before giving up with OracleError.
ReferenceSolution solve_reference(const Instance& instance, const ReferenceOptions& options = {});

struct LowerBoundReport {
  std::vector<double> lower;     // d_r
  std::vector<double> optimum;   // y*_r
  double max_excess = 0.0;       // max_r d_r - y*_r
  bool holds = true;             // every d_r <= y*_r + slack
};

LowerBoundReport lower_bound_check(const Instance& instance, double slack = 1e-6,
                                   const ReferenceOptions& options = {});

}  // namespace fairshare

#endif  // FAIRSHARE_ORACLE_H_
