#ifndef FAIRSHARE_FAIR_CORE_H_
#define FAIRSHARE_FAIR_CORE_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace fairshare {

// f_r(y) = w log y for alpha == 1, w y^(1-alpha) / (1-alpha) otherwise.
double alpha_utility(double y, double weight, double alpha);

// Sum of per-request utilities. Throws std::domain_error on y_r <= 0.
double alpha_utility(std::span<const double> y, std::span<const double> weights, double alpha);

// Euclidean projection onto {z >= 0, sum z <= radius}, sort based.
std::vector<double> project_simplex(std::span<const double> point, double radius);
void project_simplex_inplace(std::span<double> point, double radius);

// Unique positive root of y^(alpha+1) - s * y^alpha - lw = 0 for lw > 0.
// Closed form for alpha == 1, safeguarded Newton otherwise; relative
// accuracy near machine precision.
double positive_root(double s, double lw, double alpha);

struct SwitchingCost {
  double theta = 0.0;
  std::vector<double> baseline;  // x0 per path of the request
};

// Data of the per-request x update. anchor_p = consensus_p - lambda * v_p.
struct ProxInput {
  std::vector<double> anchor;
  double lambda = 1.0;
  double weight = 1.0;
  double alpha = 1.0;
  std::optional<SwitchingCost> switching;
};

// Minimizer of  g(sum_p x_p) + 1/(2 lambda) sum_p (x_p - anchor_p)^2  with
// g(y) = -f(y). The summed stationarity condition is
//   y^(alpha+1) - S y^alpha - |P_r| lambda w = 0,   S = sum_p anchor_p,
// after which x_p = lambda w / y^alpha + anchor_p.
std::vector<double> prox_request(const ProxInput& input);

class ProxError : public std::runtime_error {
 public:
  explicit ProxError(const std::string& what) : std::runtime_error(what) {}
};

// Same objective plus theta * sum_p |x_p - x0_p|. Solved exactly through the
// aggregate y: for fixed y every coordinate is a soft-threshold around x0,
// and the sum of those coordinates minus y is strictly decreasing in y, so
// one bracketed scalar root pins the minimizer. theta == 0 defers to
// prox_request.
std::vector<double> prox_request_l1(const ProxInput& input);

// Stage-1a objective value of x for the given input (includes the l1 term
// when switching is present).
double prox_objective(const ProxInput& input, std::span<const double> x);

}  // namespace fairshare

#endif  // FAIRSHARE_FAIR_CORE_H_
