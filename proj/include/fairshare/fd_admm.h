#ifndef FAIRSHARE_FD_ADMM_H_
#define FAIRSHARE_FD_ADMM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fairshare/instance.h"
#include "fairshare/partition.h"

namespace fairshare {

// Private variables of one domain controller. Slot layouts are CSR style:
// x/v hold one slot per path of each originating request, z/u one slot per
// (link, path through link). The local consensus copy covers `known_paths`,
// the paths traversing the domain plus the paths of its own requests.
struct DomainState {
  std::size_t index = 0;

  std::vector<std::size_t> requests;        // R_m
  std::vector<std::size_t> request_offsets;  // requests.size() + 1 entries
  std::vector<std::size_t> x_paths;         // global path per x slot
  std::vector<double> x;
  std::vector<double> v;

  std::vector<std::size_t> links;        // J_m
  std::vector<std::size_t> link_offsets;  // links.size() + 1 entries
  std::vector<std::size_t> z_paths;      // global path per z slot
  std::vector<double> z;
  std::vector<double> u;

  std::vector<std::size_t> known_paths;  // sorted
  std::vector<double> z_tilde;           // aligned with known_paths
  std::vector<double> contribution;      // outgoing z-dot, aligned with known_paths
  std::vector<std::size_t> x_known;      // x slot -> position in known_paths
  std::vector<std::size_t> z_known;      // z slot -> position in known_paths
};

// Paths two domains both hold copies of; each round both send one float
// per shared path.
struct PeerLink {
  std::size_t other = 0;
  std::vector<std::size_t> mine;    // positions in my known_paths
  std::vector<std::size_t> theirs;  // positions in the peer's known_paths
};

struct SwitchingMode {
  double theta = 0.0;
  std::vector<double> baseline;  // x0 per global path
};

struct Residuals {
  double primal = 0.0;
  double dual = 0.0;
};

// Everything the orchestration loop owns: the problem data (copied so that
// events can edit it), the per-domain variables and the exchange plan.
struct SolverState {
  Instance instance;
  Incidence incidence;
  Partition partition;
  std::vector<DomainState> domains;
  std::vector<std::vector<PeerLink>> peers;  // per domain, ascending peer index
  std::vector<std::size_t> multiplicity;     // |J_p| + 1
  double lambda = 1.0;
  std::size_t iteration = 0;
  std::optional<SwitchingMode> switching;

  std::vector<double> consensus;       // global z-tilde of the last round
  std::vector<double> prev_consensus;  // the round before
  Residuals last_residuals{};
  std::vector<std::vector<std::size_t>> round_pair_floats;  // [from][to], last round
  std::vector<std::vector<std::size_t>> total_pair_floats;  // cumulative
  std::size_t workers = 1;

  std::size_t total_copies() const;
};

class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

// Builds the variables for the given partition. init_point (one value per
// path, default all zeros) seeds every primal copy; duals start at zero.
SolverState init_state(const Instance& instance, const Partition& partition, double lambda,
                       const std::vector<double>& init_point = {});

// Stage 2: every domain sums the contributions of the domains sharing each
// path (ascending domain order) and divides by |J_p| + 1. Also refreshes the
// global consensus vectors.
void consensus(SolverState& state);

// Stage 3: u += (z - z~) / lambda, v += (x - z~) / lambda.
void dual_update(SolverState& state);

// Stage 1: per-link simplex projection of z~ - lambda u and per-request prox
// of z~ - lambda v.
void primal_update(SolverState& state);

// Builds each domain's outgoing contribution and counts the floats sent per
// domain pair.
void exchange(SolverState& state);

// One synchronous round: consensus, duals, primal, exchange. The residuals
// are taken at the end of the round, so the fresh copies are compared with
// the z-tilde they were anchored on.
void iterate(SolverState& state);

// z-dagger_p = min over link copies of p; capacity feasible at every round.
std::vector<double> feasible_point(const SolverState& state);

// Consensus residuals of the state as it stands: copies against the held
// z-tilde, z-tilde against the previous one, both normalized by
// sqrt(total copies).
Residuals residuals(const SolverState& state);

// |K_m ∩ K_n| floats per round from m to n, from incidence alone.
std::vector<std::vector<std::size_t>> expected_pair_floats(const SolverState& state);

// Enables the l1 switching-cost objective with the given baseline.
void set_switching(SolverState& state, double theta, std::vector<double> baseline);

struct PenaltyBound {
  std::vector<double> utopic;     // a_r
  std::vector<double> midpoint;   // rho_r
  std::vector<double> lower;      // d_r
  std::vector<std::vector<std::size_t>> contenders;  // R(r), includes r
  double lambda_star = 0.0;
};

// Utopic allocations via small exact LPs, the local midpoints, the lower
// bound on the optimal aggregates and the derived penalty lambda*.
PenaltyBound penalty_bound(const Instance& instance, const Incidence& inc);

struct StopCriteria {
  double residual_threshold = 1e-2;
  std::size_t max_iters = 10000;
  double deadline_seconds = 0.0;  // wall-clock cap, 0 = none
};

struct TraceRow {
  std::size_t iteration = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double fairness = 0.0;      // NaN while some aggregate of z-dagger is zero
  double optimality_gap = 0.0;  // NaN without reference
  double min_slack = 0.0;
  std::size_t floats_sent = 0;
};

struct IterationTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  std::vector<double> final_point;  // z-dagger at exit
  std::vector<std::vector<std::size_t>> pair_floats_per_round;  // [from][to]
};

struct SolveOptions {
  StopCriteria stop;
  std::optional<double> reference_fairness;  // Phi*, enables the gap column
  // Called after every round with the row and the feasible point.
  std::function<void(const TraceRow&, const std::vector<double>&)> on_round;
};

// Optimality gap |Phi* - Phi| / |Phi*|; 1 when Phi is undefined.
double optimality_gap(double reference, double fairness);

// Fairness of a path allocation; NaN when some aggregate is not positive.
double fairness_of(const Instance& instance, const Incidence& inc, const std::vector<double>& x);

IterationTrace solve(SolverState& state, const SolveOptions& options);

struct WeightChange {
  std::string request;
  double weight = 1.0;
};
struct RequestAdd {
  Request request;
  std::vector<Path> paths;
};
struct RequestRemove {
  std::string request;
};
struct BaselineReset {};

using Event = std::variant<WeightChange, RequestAdd, RequestRemove, BaselineReset>;

// Warm-started edit of the problem. Surviving copies and duals keep their
// values; copies of new paths start at zero.
void apply_event(SolverState& state, const Event& event);

std::string trace_to_csv(const IterationTrace& trace);
std::string pair_floats_to_csv(const SolverState& state, std::size_t rounds);

}  // namespace fairshare

#endif  // FAIRSHARE_FD_ADMM_H_
