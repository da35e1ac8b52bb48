#ifndef FAIRSHARE_HARNESS_H_
#define FAIRSHARE_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairshare/fd_admm.h"
#include "fairshare/instance.h"

namespace fairshare {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct GeneratorSpec {
  std::string topology = "ba";  // "ba" or "fat_tree"
  std::size_t nodes = 30;
  std::size_t min_degree = 4;
  std::size_t pods = 4;
  bool directed = false;
  double capacity = 100.0;
  std::size_t requests = 40;
  std::size_t min_paths = 1;
  std::size_t max_paths = 4;
  std::size_t paths_per_request = 2;  // fat tree only
};

enum class ExperimentMode { kConvergence, kReconfig };

struct ExperimentConfig {
  ExperimentMode mode = ExperimentMode::kConvergence;
  std::optional<std::string> instance_file;  // overrides the generator
  GeneratorSpec generator;
  double alpha = 1.0;
  std::vector<std::size_t> domain_counts{1};
  std::optional<double> lambda;  // unset = lambda*
  StopCriteria stop;
  std::vector<std::uint64_t> seeds{0};
  std::vector<double> theta_grid{0.0, 1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0};
  double weight_min = 1.0;
  double weight_max = 10.0;
  double epsilon = 1e-2;
  bool oracle_reference = true;  // false = long single-domain self-reference
  std::size_t workers = 1;       // concurrent cells
};

// Throws ConfigError on an invalid configuration.
void validate(const ExperimentConfig& config);
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
// SHA-256 of the canonical JSON form, lowercase hex.
std::string config_hash(const ExperimentConfig& config);

// The instance of one seed: loaded from file or generated, with the
// configured alpha.
Instance build_instance(const ExperimentConfig& config, std::uint64_t seed);

// Independent capacity and sign check of a path allocation, straight from
// the instance's link lists.
bool allocation_feasible(const Instance& instance, const std::vector<double>& x, double tol = 1e-9);

struct ConvergenceCell {
  std::size_t domains = 0;
  std::uint64_t seed = 0;
  double reference_fairness = 0.0;
  bool oracle_reference = true;
  IterationTrace trace;
  std::vector<double> gaps;  // index k = gap after k rounds, gaps[0] at the initial point
  bool feasible = true;      // every round's point passed allocation_feasible
};

struct SummaryRow {
  std::size_t domains = 0;
  std::size_t iteration = 0;
  std::size_t samples = 0;
  double mean = 0.0;
  double half_width = 0.0;  // 95% t interval, NaN for a single sample
};

struct ConvergenceStudy {
  std::vector<ConvergenceCell> cells;  // sorted by (domains, seed)
  std::vector<SummaryRow> gap_summary;
  std::vector<SummaryRow> rounds_summary;  // iteration = 0, mean rounds run
};

ConvergenceStudy run_convergence(const ExperimentConfig& config);

struct ReconfigResult {
  std::uint64_t seed = 0;
  double theta = 0.0;
  std::size_t n = 0;
  double phi = 0.0;
  double psi = 0.0;
  std::size_t paths = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct ReconfigSummary {
  double theta = 0.0;
  std::size_t samples = 0;
  double n_mean = 0.0;
  double n_half_width = 0.0;
  double phi_mean = 0.0;
  double phi_half_width = 0.0;
  double psi_mean = 0.0;
  double psi_half_width = 0.0;
};

struct ReconfigStudy {
  std::vector<ReconfigResult> results;  // sorted by (seed, theta)
  std::vector<ReconfigSummary> summary;  // one per theta, grid order
  // Paths moved by more than epsilon when the new weights are solved
  // without switching cost, per seed.
  std::vector<std::size_t> unconstrained_n;
};

ReconfigStudy run_reconfig(const ExperimentConfig& config);

// N_eps and Psi of a move from x0 to x.
std::size_t reconfigured_paths(const std::vector<double>& x, const std::vector<double>& x0,
                               double epsilon);
double movement(const std::vector<double>& x, const std::vector<double>& x0, double epsilon);

struct OverheadRow {
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t counted = 0;      // floats per round seen by the exchange
  std::size_t closed_form = 0;  // from incidence alone
};

struct OverheadReport {
  std::vector<OverheadRow> pairs;      // every ordered pair m != n
  std::vector<std::size_t> per_domain;  // floats sent per round by each domain
  std::vector<std::size_t> local_copies;  // primal copies updated per round
  bool consistent = true;
};

OverheadReport overhead_report(const SolverState& state, const IterationTrace& trace);

// Mean and 95% half width with Student's t quantile.
std::pair<double, double> mean_ci(const std::vector<double>& samples);

std::string convergence_cells_csv(const ConvergenceStudy& study);
std::string convergence_summary_csv(const ConvergenceStudy& study);
std::string reconfig_csv(const ReconfigStudy& study);
std::string reconfig_summary_csv(const ReconfigStudy& study);
std::string overhead_csv(const OverheadReport& report);

// Manifest JSON: config, its hash, seeds, library version and the files
// written. The timestamp is the only run-dependent field.
std::string manifest_json(const ExperimentConfig& config, const std::vector<std::string>& files);

extern const char* const kVersion;

}  // namespace fairshare

#endif  // FAIRSHARE_HARNESS_H_
