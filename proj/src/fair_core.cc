#include "fairshare/fair_core.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/core.h>

namespace fairshare {

namespace {

void check_prox_input(const ProxInput& in) {
  if (in.anchor.empty()) throw std::invalid_argument("prox input has no paths");
  if (!(in.lambda > 0.0) || !(in.weight > 0.0) || !(in.alpha > 0.0)) {
    throw std::invalid_argument("prox input needs lambda, weight and alpha > 0");
  }
  for (double a : in.anchor) {
    if (!std::isfinite(a)) throw std::invalid_argument("prox anchor is not finite");
  }
}

struct Root {
  double y;
  double y_minus_s;  // y - s, computed without cancellation
};

Root solve_root(double s, double lw, double alpha) {
  if (!(lw > 0.0) || !std::isfinite(lw)) throw std::invalid_argument("positive_root needs lw > 0");
  if (!(alpha > 0.0)) throw std::invalid_argument("positive_root needs alpha > 0");
  if (!std::isfinite(s)) throw std::invalid_argument("positive_root needs a finite s");

  if (alpha == 1.0) {
    const double disc = std::sqrt(s * s + 4.0 * lw);
    if (s >= 0.0) {
      const double y = 0.5 * (s + disc);
      return {y, 2.0 * lw / (s + disc)};
    }
    const double y = 2.0 * lw / (disc - s);
    return {y, 0.5 * (disc - s)};
  }

  // Write y = b + t with b = max(s, 0) and solve, in u = log t,
  //   alpha log(b + t) + log(t + gap) = log lw,   gap = max(-s, 0).
  // The left side is increasing in u with slope in [min(1, alpha), alpha+1].
  const double b = std::max(s, 0.0);
  const double gap = std::max(-s, 0.0);
  const double log_lw = std::log(lw);
  auto h = [&](double u) {
    const double t = std::exp(u);
    return alpha * std::log(b + t) + std::log(t + gap) - log_lw;
  };
  auto dh = [&](double u) {
    const double t = std::exp(u);
    return alpha * t / (b + t) + t / (t + gap);
  };

  // Upper bounds on t: t^(alpha+1), b^alpha t and t^alpha gap all bound
  // the left-hand product from below.
  double upper = std::pow(lw, 1.0 / (alpha + 1.0));
  if (b > 0.0) upper = std::min(upper, std::exp(log_lw - alpha * std::log(b)));
  if (gap > 0.0) upper = std::min(upper, std::exp((log_lw - std::log(gap)) / alpha));
  double hi = std::log(upper);
  double lo = hi - 1.0;
  while (h(lo) > 0.0) lo -= 2.0 * (hi - lo);
  if (h(hi) < 0.0) {
    // Rounding in the bound; widen.
    while (h(hi) < 0.0) hi += 1.0;
  }

  double u = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double val = h(u);
    if (val == 0.0) break;
    if (val > 0.0) hi = u; else lo = u;
    double next = u - val / dh(u);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 1e-15 * std::max(1.0, std::abs(u)) || hi - lo <= 1e-15 * std::max(1.0, std::abs(u))) break;
  }
  const double t = std::exp(u);
  return {b + t, t + gap};
}

}  // namespace

double alpha_utility(double y, double weight, double alpha) {
  if (!(y > 0.0)) {
    throw std::domain_error(fmt::format("utility undefined for aggregate {}", y));
  }
  if (alpha == 1.0) return weight * std::log(y);
  return weight * std::pow(y, 1.0 - alpha) / (1.0 - alpha);
}

double alpha_utility(std::span<const double> y, std::span<const double> weights, double alpha) {
  if (y.size() != weights.size()) throw std::invalid_argument("utility: size mismatch");
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) total += alpha_utility(y[r], weights[r], alpha);
  return total;
}

void project_simplex_inplace(std::span<double> point, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("simplex radius must be positive");
  double clipped_sum = 0.0;
  for (double& v : point) {
    v = std::max(v, 0.0);
    clipped_sum += v;
  }
  if (clipped_sum <= radius) return;

  // The sum constraint is active: threshold tau with sum max(v - tau, 0) = radius.
  std::vector<double> sorted(point.begin(), point.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double tau = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    prefix += sorted[i];
    const double candidate = (prefix - radius) / static_cast<double>(i + 1);
    if (sorted[i] - candidate > 0.0) tau = candidate;
    else break;
  }
  for (double& v : point) v = std::max(v - tau, 0.0);
}

std::vector<double> project_simplex(std::span<const double> point, double radius) {
  std::vector<double> out(point.begin(), point.end());
  project_simplex_inplace(out, radius);
  return out;
}

double positive_root(double s, double lw, double alpha) { return solve_root(s, lw, alpha).y; }

std::vector<double> prox_request(const ProxInput& input) {
  check_prox_input(input);
  const std::size_t n = input.anchor.size();
  double s = 0.0;
  for (double a : input.anchor) s += a;
  const Root root = solve_root(s, static_cast<double>(n) * input.lambda * input.weight, input.alpha);
  // lambda w / y^alpha == (y - s) / n at the root.
  const double push = root.y_minus_s / static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t p = 0; p < n; ++p) x[p] = input.anchor[p] + push;
  return x;
}

std::vector<double> prox_request_l1(const ProxInput& input) {
  check_prox_input(input);
  if (!input.switching || input.switching->theta == 0.0) return prox_request(input);
  const auto& sw = *input.switching;
  const std::size_t n = input.anchor.size();
  if (sw.baseline.size() != n) throw std::invalid_argument("baseline size differs from path count");
  if (!(sw.theta >= 0.0) || !std::isfinite(sw.theta)) throw std::invalid_argument("theta must be >= 0");

  const double shrink = input.lambda * sw.theta;
  const double lw = input.lambda * input.weight;
  auto coords = [&](double y, std::vector<double>& x) {
    const double push = lw * std::pow(y, -input.alpha);
    for (std::size_t p = 0; p < n; ++p) {
      const double d = input.anchor[p] + push - sw.baseline[p];
      const double soft = d > shrink ? d - shrink : (d < -shrink ? d + shrink : 0.0);
      x[p] = sw.baseline[p] + soft;
    }
  };
  std::vector<double> x(n);
  // F(y) = sum_p x_p(y) - y is strictly decreasing, +inf at 0+ and -inf at +inf.
  auto excess = [&](double y) {
    coords(y, x);
    return std::accumulate(x.begin(), x.end(), 0.0) - y;
  };

  double hi = 1.0;
  int guard = 0;
  while (excess(hi) > 0.0) {
    hi *= 2.0;
    if (++guard > 2100 || !std::isfinite(hi)) {
      throw ProxError(fmt::format("l1 prox: no upper bracket (theta={}, lambda={}, w={})", sw.theta,
                                  input.lambda, input.weight));
    }
  }
  double lo = hi / 2.0;
  guard = 0;
  while (excess(lo) <= 0.0) {
    hi = lo;
    lo /= 2.0;
    if (++guard > 2100 || lo == 0.0) {
      throw ProxError(fmt::format("l1 prox: no lower bracket (theta={}, lambda={}, w={})", sw.theta,
                                  input.lambda, input.weight));
    }
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-15 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (excess(mid) > 0.0) lo = mid; else hi = mid;
  }
  coords(0.5 * (lo + hi), x);
  return x;
}

double prox_objective(const ProxInput& input, std::span<const double> x) {
  double y = 0.0;
  double quad = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    y += x[p];
    quad += (x[p] - input.anchor[p]) * (x[p] - input.anchor[p]);
  }
  if (!(y > 0.0)) return std::numeric_limits<double>::infinity();
  double value = -alpha_utility(y, input.weight, input.alpha) + quad / (2.0 * input.lambda);
  if (input.switching) {
    for (std::size_t p = 0; p < x.size(); ++p) {
      value += input.switching->theta * std::abs(x[p] - input.switching->baseline[p]);
    }
  }
  return value;
}

}  // namespace fairshare
