#include "fairshare/oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "fairshare/lp.h"
#include "fairshare/partition.h"

namespace fairshare {

namespace {
constexpr int kRefinements = 4;
}  // namespace

Certificate fairness_certificate(const Instance& instance, const Incidence& inc,
                                 const std::vector<double>& candidate_x, double tolerance,
                                 double feasibility_tol) {
  if (candidate_x.size() != inc.num_paths()) {
    throw OracleError(fmt::format("candidate has {} entries for {} paths", candidate_x.size(),
                                  inc.num_paths()));
  }
  for (std::size_t p = 0; p < candidate_x.size(); ++p) {
    if (!(candidate_x[p] >= -feasibility_tol)) {
      throw OracleError(fmt::format("infeasible candidate: path {} is negative", instance.paths[p].id));
    }
  }
  const auto load = link_loads(inc, candidate_x);
  for (std::size_t j = 0; j < load.size(); ++j) {
    if (load[j] > instance.links[j].capacity + feasibility_tol) {
      throw OracleError(fmt::format("infeasible candidate: link {} carries {} > {}",
                                    instance.links[j].id, load[j], instance.links[j].capacity));
    }
  }

  Certificate cert;
  cert.tolerance = tolerance;
  cert.candidate_y = aggregates(inc, candidate_x);
  const double alpha = instance.alpha;
  double baseline = 0.0;
  std::vector<double> gain(inc.num_requests());
  for (std::size_t r = 0; r < inc.num_requests(); ++r) {
    const double y = cert.candidate_y[r];
    if (!(y > 0.0)) {
      throw OracleError("zero aggregate for request " + instance.requests[r].id);
    }
    gain[r] = instance.requests[r].weight / std::pow(y, alpha);
    baseline += gain[r] * y;
  }

  std::vector<double> objective(inc.num_paths());
  for (std::size_t p = 0; p < inc.num_paths(); ++p) objective[p] = gain[inc.path_to_request[p]];
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  for (std::size_t j = 0; j < inc.num_links(); ++j) {
    if (inc.link_to_paths[j].empty()) continue;
    std::vector<double> row(inc.num_paths(), 0.0);
    for (std::size_t p : inc.link_to_paths[j]) row[p] = 1.0;
    a.push_back(std::move(row));
    b.push_back(instance.links[j].capacity);
  }
  const auto lp = maximize_packing(a, b, objective);
  cert.violation = lp.value - baseline;
  cert.certified = cert.violation <= tolerance;
  return cert;
}

ReferenceSolution solve_reference(const Instance& instance, const ReferenceOptions& options) {
  const Incidence inc = build_incidence(instance);
  ReferenceSolution out;
  if (inc.num_requests() == 0) {
    out.x.assign(inc.num_paths(), 0.0);
    out.certificate.certified = true;
    return out;
  }
  const auto bound = penalty_bound(instance, inc);
  SolverState state = init_state(instance, single_domain(instance, inc), bound.lambda_star);
  double wsum = 0.0;
  for (const auto& r : instance.requests) wsum += r.weight;
  const double cert_tol = options.certificate_tol * wsum;

  // Tighten the residual threshold until the certificate passes.
  SolveOptions solve_opts;
  solve_opts.stop.residual_threshold = options.residual_tol;
  bool converged = false;
  for (int attempt = 0; attempt < kRefinements; ++attempt) {
    solve_opts.stop.max_iters = options.max_iters - std::min(options.max_iters, state.iteration);
    const auto trace = solve(state, solve_opts);
    converged = trace.converged;
    out.x = trace.final_point;
    out.certificate = fairness_certificate(instance, inc, out.x, cert_tol);
    if (!converged || out.certificate.certified) break;
    solve_opts.stop.residual_threshold *= 0.01;
  }
  out.iterations = state.iteration;
  if (!converged || !out.certificate.certified) {
    throw OracleError(fmt::format(
        "reference not certified after {} rounds (converged={}, violation={:.3g}, tol={:.3g})",
        state.iteration, converged, out.certificate.violation, out.certificate.tolerance));
  }
  out.y = out.certificate.candidate_y;
  out.fairness = fairness_of(instance, inc, out.x);
  return out;
}

LowerBoundReport lower_bound_check(const Instance& instance, double slack,
                                   const ReferenceOptions& options) {
  const Incidence inc = build_incidence(instance);
  LowerBoundReport report;
  report.lower = penalty_bound(instance, inc).lower;
  report.optimum = solve_reference(instance, options).y;
  report.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < report.lower.size(); ++r) {
    const double excess = report.lower[r] - report.optimum[r];
    report.max_excess = std::max(report.max_excess, excess);
    if (excess > slack) report.holds = false;
  }
  return report;
}

}  // namespace fairshare
