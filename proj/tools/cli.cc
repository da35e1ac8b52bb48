#include "cli.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include "fairshare/fd_admm.h"
#include "fairshare/harness.h"
#include "fairshare/instance_io.h"
#include "fairshare/lp.h"
#include "fairshare/oracle.h"
#include "fairshare/partition.h"
#include "fairshare/topology.h"

namespace fairshare {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// FAIRSHARE_LOG: 0/quiet, 1/info (default), 2/debug.
int log_level() {
  const char* env = std::getenv("FAIRSHARE_LOG");
  if (env == nullptr) return 1;
  const std::string v = env;
  if (v == "0" || v == "quiet" || v == "off") return 0;
  if (v == "2" || v == "debug") return 2;
  return 1;
}

struct Options {
  std::string instance;
  std::string partition;
  std::string config;
  std::string solution;
  std::string baseline;
  std::string pairs;
  std::string out;
  std::vector<std::size_t> domains;
  std::optional<double> alpha;
  std::optional<double> lambda;
  std::optional<double> tol;
  std::optional<std::size_t> max_iters;
  std::vector<double> theta;
  std::optional<double> epsilon;
  std::vector<std::uint64_t> seed;
  std::size_t workers = 1;

  std::string topology = "ba";
  std::size_t nodes = 30;
  std::size_t min_degree = 4;
  std::size_t pods = 4;
  std::size_t requests = 40;
  std::size_t min_paths = 1;
  std::size_t max_paths = 4;
  std::size_t paths_per_request = 2;
  double capacity = 100.0;
  bool directed = false;
};

class Runner {
 public:
  Runner(const Options& o, std::ostream& out, std::ostream& err)
      : o_(o), out_(out), err_(err), level_(log_level()) {}

  int generate();
  int partition();
  int solve();
  int certify();
  int bound();
  int sweep_domains();
  int sweep_theta();

 private:
  template <typename... Args>
  void info(fmt::format_string<Args...> f, Args&&... args) {
    if (level_ >= 1) err_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }
  template <typename... Args>
  void debug(fmt::format_string<Args...> f, Args&&... args) {
    if (level_ >= 2) err_ << fmt::format(f, std::forward<Args>(args)...) << '\n';
  }

  void emit(const std::string& text) {
    if (o_.out.empty()) {
      out_ << text;
    } else {
      write_text(o_.out, text);
      info("wrote {}", o_.out);
    }
  }

  std::uint64_t single_seed() const {
    if (o_.seed.size() != 1) throw UsageError("--seed takes exactly one value here");
    return o_.seed.front();
  }

  Instance load_instance() const {
    if (o_.instance.empty()) throw UsageError("--instance is required");
    Instance instance = read_instance(o_.instance);
    if (o_.alpha) instance.alpha = *o_.alpha;
    if (auto report = validate(instance); !report.empty()) throw InvalidInstance(describe(report));
    return instance;
  }

  Partition load_partition(const Instance& instance, const Incidence& inc) const {
    if (!o_.partition.empty()) return read_partition(o_.partition, instance, inc);
    const std::size_t m = o_.domains.empty() ? 1 : o_.domains.front();
    if (o_.domains.size() > 1) throw UsageError("--domains takes one value here");
    if (m == 1) return single_domain(instance, inc);
    if (o_.seed.empty()) throw UsageError("--seed is required to partition into several domains");
    return partition_domains(instance, inc, m, single_seed());
  }

  ExperimentConfig sweep_config(ExperimentMode mode) const {
    ExperimentConfig c;
    if (!o_.config.empty()) c = config_from_json(read_text(o_.config));
    c.mode = mode;
    if (!o_.instance.empty()) c.instance_file = o_.instance;
    if (!o_.domains.empty()) c.domain_counts = o_.domains;
    if (!o_.seed.empty()) c.seeds = o_.seed;
    if (o_.config.empty() && o_.seed.empty()) throw UsageError("--seed is required without --config");
    if (o_.alpha) c.alpha = *o_.alpha;
    if (o_.lambda) c.lambda = *o_.lambda;
    if (o_.tol) c.stop.residual_threshold = *o_.tol;
    if (o_.max_iters) c.stop.max_iters = *o_.max_iters;
    if (!o_.theta.empty()) c.theta_grid = o_.theta;
    if (o_.epsilon) c.epsilon = *o_.epsilon;
    c.workers = o_.workers;
    try {
      validate(c);
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    return c;
  }

  void write_outputs(const ExperimentConfig& c,
                     const std::vector<std::pair<std::string, std::string>>& files) {
    if (o_.out.empty()) {
      out_ << files.back().second;
      return;
    }
    std::filesystem::create_directories(o_.out);
    std::vector<std::string> names;
    for (const auto& [name, text] : files) {
      write_text(std::filesystem::path(o_.out) / name, text);
      names.push_back(name);
    }
    write_text(std::filesystem::path(o_.out) / "manifest.json", manifest_json(c, names));
    info("wrote {} files to {}", names.size() + 1, o_.out);
  }

  const Options& o_;
  std::ostream& out_;
  std::ostream& err_;
  int level_;
};

int Runner::generate() {
  const std::uint64_t seed = single_seed();
  ExperimentConfig c;
  c.generator = {o_.topology, o_.nodes,    o_.min_degree, o_.pods,      o_.directed,
                 o_.capacity, o_.requests, o_.min_paths,  o_.max_paths, o_.paths_per_request};
  c.alpha = o_.alpha.value_or(1.0);
  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  const Instance instance = build_instance(c, seed);
  info("generated {} links, {} paths, {} requests", instance.links.size(), instance.paths.size(),
       instance.requests.size());
  emit(instance_to_json(instance));
  return kExitOk;
}

int Runner::partition() {
  const Instance instance = load_instance();
  const Incidence inc = build_incidence(instance);
  if (o_.domains.size() != 1) throw UsageError("--domains takes exactly one value");
  const std::size_t m = o_.domains.front();
  const Partition part =
      m == 1 ? single_domain(instance, inc) : partition_domains(instance, inc, m, single_seed());
  for (std::size_t d = 0; d < part.num_domains; ++d) {
    info("domain {}: {} links, {} requests", d, part.domain_links[d].size(),
         part.domain_requests[d].size());
  }
  emit(partition_to_json(instance, part));
  return kExitOk;
}

int Runner::solve() {
  const Instance instance = load_instance();
  const Incidence inc = build_incidence(instance);
  const Partition part = load_partition(instance, inc);
  const double lambda = o_.lambda ? *o_.lambda : penalty_bound(instance, inc).lambda_star;
  SolverState state = init_state(instance, part, lambda);
  state.workers = o_.workers;
  if (!o_.theta.empty()) {
    if (o_.theta.size() != 1) throw UsageError("--theta takes one value here");
    if (o_.baseline.empty()) throw UsageError("--theta needs --baseline");
    set_switching(state, o_.theta.front(), allocation_from_json(read_text(o_.baseline), instance));
  } else if (!o_.baseline.empty()) {
    throw UsageError("--baseline needs --theta");
  }
  SolveOptions options;
  if (o_.tol) options.stop.residual_threshold = *o_.tol;
  if (o_.max_iters) options.stop.max_iters = *o_.max_iters;
  options.on_round = [&](const TraceRow& row, const std::vector<double>&) {
    if (row.iteration % 100 == 0) {
      debug("round {}: primal {:.3g} dual {:.3g}", row.iteration, row.primal_residual, row.dual_residual);
    }
  };
  info("solving {} requests over {} domains, lambda {:.6g}", instance.requests.size(),
       part.num_domains, lambda);
  const auto trace = fairshare::solve(state, options);
  info("{} after {} rounds", trace.converged ? "converged" : "stopped", state.iteration);
  if (!o_.solution.empty()) write_text(o_.solution, allocation_to_json(instance, trace.final_point));
  if (!o_.pairs.empty()) write_text(o_.pairs, pair_floats_to_csv(state, state.iteration));
  if (!trace.converged) info("warning: residual threshold not reached");
  emit(trace_to_csv(trace));
  return kExitOk;
}

int Runner::certify() {
  const Instance instance = load_instance();
  const Incidence inc = build_incidence(instance);
  double wsum = 0.0;
  for (const auto& r : instance.requests) wsum += r.weight;
  std::vector<double> x;
  if (o_.solution.empty()) {
    info("no --solution given, certifying the reference solution");
    x = solve_reference(instance).x;
  } else {
    x = allocation_from_json(read_text(o_.solution), instance);
  }
  const double tol = o_.tol.value_or(1e-3) * wsum;
  const auto cert = fairness_certificate(instance, inc, x, tol);
  std::string text = "request,aggregate\n";
  for (std::size_t r = 0; r < cert.candidate_y.size(); ++r) {
    text += fmt::format("{},{:.17g}\n", instance.requests[r].id, cert.candidate_y[r]);
  }
  text += fmt::format("\nviolation,{:.17g}\ntolerance,{:.17g}\ncertified,{}\n", cert.violation,
                      cert.tolerance, cert.certified ? 1 : 0);
  emit(text);
  return cert.certified ? kExitOk : kExitFailure;
}

int Runner::bound() {
  const Instance instance = load_instance();
  const Incidence inc = build_incidence(instance);
  const auto b = penalty_bound(instance, inc);
  std::string text = "request,utopic,midpoint,lower\n";
  for (std::size_t r = 0; r < instance.requests.size(); ++r) {
    text += fmt::format("{},{:.17g},{:.17g},{:.17g}\n", instance.requests[r].id, b.utopic[r],
                        b.midpoint[r], b.lower[r]);
  }
  text += fmt::format("\nlambda_star,{:.17g}\n", b.lambda_star);
  emit(text);
  return kExitOk;
}

int Runner::sweep_domains() {
  const ExperimentConfig c = sweep_config(ExperimentMode::kConvergence);
  info("convergence sweep: {} domain counts x {} seeds", c.domain_counts.size(), c.seeds.size());
  const auto study = run_convergence(c);
  bool feasible = true;
  for (const auto& cell : study.cells) {
    feasible = feasible && cell.feasible;
    info("M={} seed={}: {} rounds, final gap {:.3g}", cell.domains, cell.seed,
         cell.trace.rows.size(), cell.gaps.back());
  }
  write_outputs(c, {{"convergence_cells.csv", convergence_cells_csv(study)},
                    {"convergence_summary.csv", convergence_summary_csv(study)}});
  if (!feasible) {
    err_ << "error: a recorded feasible point violated the capacities\n";
    return kExitFailure;
  }
  return kExitOk;
}

int Runner::sweep_theta() {
  const ExperimentConfig c = sweep_config(ExperimentMode::kReconfig);
  info("theta sweep: {} values x {} seeds", c.theta_grid.size(), c.seeds.size());
  const auto study = run_reconfig(c);
  for (const auto& row : study.summary) {
    info("theta={:.3g}: n {:.2f}, phi {:.6g}, psi {:.4g}", row.theta, row.n_mean, row.phi_mean,
         row.psi_mean);
  }
  write_outputs(c, {{"reconfig.csv", reconfig_csv(study)},
                    {"reconfig_summary.csv", reconfig_summary_csv(study)}});
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Distributed alpha-fair bandwidth allocation", "fairshare"};
  app.require_subcommand(1);
  Options o;

  auto instance_opt = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--instance", o.instance, "Instance JSON file")->check(CLI::ExistingFile);
    if (required) opt->required();
  };
  auto solver_opts = [&](CLI::App* sub) {
    sub->add_option("--alpha", o.alpha, "Override the fairness parameter")->check(CLI::PositiveNumber);
    sub->add_option("--lambda", o.lambda, "ADMM penalty (default lambda*)")->check(CLI::PositiveNumber);
    sub->add_option("--tol", o.tol, "Residual threshold")->check(CLI::PositiveNumber);
    sub->add_option("--max-iters", o.max_iters, "Round budget")->check(CLI::PositiveNumber);
    sub->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto out_opt = [&](CLI::App* sub, const char* what) { sub->add_option("--out", o.out, what); };

  auto* gen = app.add_subcommand("generate", "Generate a random instance");
  gen->add_option("--topology", o.topology, "ba or fat_tree")->check(CLI::IsMember({"ba", "fat_tree"}));
  gen->add_option("--nodes", o.nodes, "Barabasi-Albert node count")->check(CLI::PositiveNumber);
  gen->add_option("--min-degree", o.min_degree, "Barabasi-Albert attachment degree")
      ->check(CLI::PositiveNumber);
  gen->add_option("--pods", o.pods, "Fat tree pods (even)")->check(CLI::PositiveNumber);
  gen->add_option("--requests", o.requests, "Request count (Barabasi-Albert)");
  gen->add_option("--min-paths", o.min_paths, "Fewest paths per request")->check(CLI::PositiveNumber);
  gen->add_option("--max-paths", o.max_paths, "Most paths per request")->check(CLI::PositiveNumber);
  gen->add_option("--paths-per-request", o.paths_per_request, "Fat tree paths per request")
      ->check(CLI::PositiveNumber);
  gen->add_option("--capacity", o.capacity, "Link capacity")->check(CLI::PositiveNumber);
  gen->add_flag("--directed", o.directed, "One link per direction");
  gen->add_option("--alpha", o.alpha, "Fairness parameter")->check(CLI::PositiveNumber);
  gen->add_option("--seed", o.seed, "Random seed")->required()->expected(1);
  out_opt(gen, "Output file (default stdout)");

  auto* part = app.add_subcommand("partition", "Split the links into connected domains");
  instance_opt(part, true);
  part->add_option("--domains", o.domains, "Domain count")->required()->expected(1)->check(CLI::PositiveNumber);
  part->add_option("--seed", o.seed, "Random seed")->required()->expected(1);
  out_opt(part, "Output file (default stdout)");

  auto* sol = app.add_subcommand("solve", "Run FD-ADMM and print the trace CSV");
  instance_opt(sol, true);
  sol->add_option("--partition", o.partition, "Partition JSON file")->check(CLI::ExistingFile);
  sol->add_option("--domains", o.domains, "Domain count when no partition file is given")
      ->expected(1)
      ->check(CLI::PositiveNumber);
  sol->add_option("--seed", o.seed, "Partition seed")->expected(1);
  sol->add_option("--theta", o.theta, "Switching cost")->expected(1)->check(CLI::NonNegativeNumber);
  sol->add_option("--baseline", o.baseline, "Incumbent allocation JSON for --theta")
      ->check(CLI::ExistingFile);
  sol->add_option("--solution", o.solution, "Write the feasible point as allocation JSON");
  sol->add_option("--pairs", o.pairs, "Write per-pair float counts CSV");
  solver_opts(sol);
  out_opt(sol, "Trace CSV file (default stdout)");
  sol->get_option("--partition")->excludes("--domains");

  auto* cert = app.add_subcommand("certify", "Check the fairness certificate of an allocation");
  instance_opt(cert, true);
  cert->add_option("--solution", o.solution, "Allocation JSON (default: reference solution)")
      ->check(CLI::ExistingFile);
  cert->add_option("--alpha", o.alpha, "Override the fairness parameter")->check(CLI::PositiveNumber);
  cert->add_option("--tol", o.tol, "Violation threshold per unit weight (default 1e-3)")
      ->check(CLI::PositiveNumber);
  out_opt(cert, "Output file (default stdout)");

  auto* bnd = app.add_subcommand("bound", "Print utopic, midpoint and lower bounds and lambda*");
  instance_opt(bnd, true);
  bnd->add_option("--alpha", o.alpha, "Override the fairness parameter")->check(CLI::PositiveNumber);
  out_opt(bnd, "Output file (default stdout)");

  auto sweep_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Experiment config JSON")->check(CLI::ExistingFile);
    instance_opt(sub, false);
    sub->add_option("--domains", o.domains, "Domain counts")->check(CLI::PositiveNumber);
    sub->add_option("--seed", o.seed, "Seeds");
    solver_opts(sub);
    out_opt(sub, "Output directory (default: summary CSV on stdout)");
  };
  auto* sd = app.add_subcommand("sweep-domains", "Convergence study over domain counts");
  sweep_common(sd);
  auto* st = app.add_subcommand("sweep-theta", "Switching-cost sweep");
  sweep_common(st);
  st->add_option("--theta", o.theta, "Theta grid")->check(CLI::NonNegativeNumber);
  st->add_option("--epsilon", o.epsilon, "Reconfiguration threshold")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  Runner runner(o, out, err);
  try {
    if (*gen) return runner.generate();
    if (*part) return runner.partition();
    if (*sol) return runner.solve();
    if (*cert) return runner.certify();
    if (*bnd) return runner.bound();
    if (*sd) return runner.sweep_domains();
    if (*st) return runner.sweep_theta();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidInstance& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace fairshare
