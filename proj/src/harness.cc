#include "fairshare/harness.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <map>
#include <random>
#include <utility>

#include <boost/math/distributions/students_t.hpp>
#include <fmt/chrono.h>
#include <fmt/core.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "fairshare/instance_io.h"
#include "fairshare/oracle.h"
#include "fairshare/partition.h"
#include "fairshare/topology.h"
#include "parallel.h"

namespace fairshare {

const char* const kVersion = "1.0.0";

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSelfReferenceTol = 1e-6;

std::string num(double v) { return std::isnan(v) ? std::string() : fmt::format("{:.17g}", v); }

const char* mode_name(ExperimentMode m) {
  return m == ExperimentMode::kConvergence ? "convergence" : "reconfig";
}

template <typename T>
T get(const json& obj, const char* key, const T& fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("/{}: {}", key, e.what()));
  }
}

void reject_unknown(const json& obj, const std::vector<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ConfigError(fmt::format("{}/{}: unknown field", where, key));
    }
  }
}

double lambda_for(const ExperimentConfig& config, const Instance& instance, const Incidence& inc) {
  if (config.lambda) return *config.lambda;
  return penalty_bound(instance, inc).lambda_star;
}

Partition partition_for(const Instance& instance, const Incidence& inc, std::size_t domains,
                        std::uint64_t seed) {
  if (domains == 1) return single_domain(instance, inc);
  return partition_domains(instance, inc, domains, seed);
}

// Long single-domain run without certification.
std::vector<double> self_reference(const Instance& instance, const ExperimentConfig& config) {
  const Incidence inc = build_incidence(instance);
  SolverState state = init_state(instance, single_domain(instance, inc), lambda_for(config, instance, inc));
  SolveOptions options;
  options.stop.residual_threshold = kSelfReferenceTol;
  options.stop.max_iters = 10 * config.stop.max_iters;
  return solve(state, options).final_point;
}

std::vector<double> optimum_point(const Instance& instance, const ExperimentConfig& config) {
  if (config.oracle_reference) return solve_reference(instance).x;
  return self_reference(instance, config);
}

}  // namespace

void validate(const ExperimentConfig& c) {
  if (c.seeds.empty()) throw ConfigError("seeds: must not be empty");
  if (c.domain_counts.empty()) throw ConfigError("domain_counts: must not be empty");
  for (std::size_t m : c.domain_counts) {
    if (m == 0) throw ConfigError("domain_counts: entries must be positive");
    if (std::count(c.domain_counts.begin(), c.domain_counts.end(), m) > 1) {
      throw ConfigError("domain_counts: entries must be distinct");
    }
  }
  for (std::uint64_t seed : c.seeds) {
    if (std::count(c.seeds.begin(), c.seeds.end(), seed) > 1) {
      throw ConfigError("seeds: entries must be distinct");
    }
  }
  if (!(c.alpha > 0.0)) throw ConfigError("alpha: must be positive");
  if (c.lambda && !(*c.lambda > 0.0)) throw ConfigError("lambda: must be positive");
  if (!(c.stop.residual_threshold > 0.0)) throw ConfigError("tol: must be positive");
  if (c.stop.max_iters == 0) throw ConfigError("max_iters: must be positive");
  if (c.stop.deadline_seconds < 0.0) throw ConfigError("deadline_seconds: must be nonnegative");
  for (double t : c.theta_grid) {
    if (!(t >= 0.0)) throw ConfigError("theta_grid: entries must be nonnegative");
  }
  if (c.mode == ExperimentMode::kReconfig && c.theta_grid.empty()) {
    throw ConfigError("theta_grid: must not be empty in reconfig mode");
  }
  if (!(c.epsilon > 0.0)) throw ConfigError("epsilon: must be positive");
  if (!(c.weight_min > 0.0) || !(c.weight_max >= c.weight_min)) {
    throw ConfigError("weight_range: need 0 < min <= max");
  }
  if (c.workers == 0) throw ConfigError("workers: must be positive");
  const auto& g = c.generator;
  if (g.topology != "ba" && g.topology != "fat_tree") {
    throw ConfigError("generator/topology: expected \"ba\" or \"fat_tree\"");
  }
  if (!(g.capacity > 0.0)) throw ConfigError("generator/capacity: must be positive");
  if (g.min_paths == 0 || g.max_paths < g.min_paths) {
    throw ConfigError("generator/paths: need 1 <= min_paths <= max_paths");
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("expected an object");
  reject_unknown(doc,
                 {"mode", "instance", "generator", "alpha", "domain_counts", "lambda", "tol",
                  "max_iters", "deadline_seconds", "seeds", "theta_grid", "weight_range", "epsilon",
                  "oracle_reference", "workers"},
                 "");
  ExperimentConfig c;
  const auto mode = get<std::string>(doc, "mode", "convergence");
  if (mode == "convergence") {
    c.mode = ExperimentMode::kConvergence;
  } else if (mode == "reconfig") {
    c.mode = ExperimentMode::kReconfig;
  } else {
    throw ConfigError("/mode: expected \"convergence\" or \"reconfig\"");
  }
  if (doc.contains("instance")) c.instance_file = get<std::string>(doc, "instance", "");
  if (doc.contains("generator")) {
    const json& g = doc.at("generator");
    if (!g.is_object()) throw ConfigError("/generator: expected an object");
    reject_unknown(g,
                   {"topology", "nodes", "min_degree", "pods", "directed", "capacity", "requests",
                    "min_paths", "max_paths", "paths_per_request"},
                   "/generator");
    auto& s = c.generator;
    s.topology = get(g, "topology", s.topology);
    s.nodes = get(g, "nodes", s.nodes);
    s.min_degree = get(g, "min_degree", s.min_degree);
    s.pods = get(g, "pods", s.pods);
    s.directed = get(g, "directed", s.directed);
    s.capacity = get(g, "capacity", s.capacity);
    s.requests = get(g, "requests", s.requests);
    s.min_paths = get(g, "min_paths", s.min_paths);
    s.max_paths = get(g, "max_paths", s.max_paths);
    s.paths_per_request = get(g, "paths_per_request", s.paths_per_request);
  }
  c.alpha = get(doc, "alpha", c.alpha);
  c.domain_counts = get(doc, "domain_counts", c.domain_counts);
  if (doc.contains("lambda") && !doc.at("lambda").is_null()) c.lambda = get(doc, "lambda", 1.0);
  c.stop.residual_threshold = get(doc, "tol", c.stop.residual_threshold);
  c.stop.max_iters = get(doc, "max_iters", c.stop.max_iters);
  c.stop.deadline_seconds = get(doc, "deadline_seconds", c.stop.deadline_seconds);
  c.seeds = get(doc, "seeds", c.seeds);
  c.theta_grid = get(doc, "theta_grid", c.theta_grid);
  if (doc.contains("weight_range")) {
    const auto range = get<std::vector<double>>(doc, "weight_range", {});
    if (range.size() != 2) throw ConfigError("/weight_range: expected [min, max]");
    c.weight_min = range[0];
    c.weight_max = range[1];
  }
  c.epsilon = get(doc, "epsilon", c.epsilon);
  c.oracle_reference = get(doc, "oracle_reference", c.oracle_reference);
  c.workers = get(doc, "workers", c.workers);
  validate(c);
  return c;
}

namespace {

json config_document(const ExperimentConfig& c) {
  json doc;
  doc["mode"] = mode_name(c.mode);
  if (c.instance_file) doc["instance"] = *c.instance_file;
  const auto& g = c.generator;
  doc["generator"] = {{"topology", g.topology},   {"nodes", g.nodes},
                      {"min_degree", g.min_degree}, {"pods", g.pods},
                      {"directed", g.directed},   {"capacity", g.capacity},
                      {"requests", g.requests},   {"min_paths", g.min_paths},
                      {"max_paths", g.max_paths}, {"paths_per_request", g.paths_per_request}};
  doc["alpha"] = c.alpha;
  doc["domain_counts"] = c.domain_counts;
  doc["lambda"] = c.lambda ? json(*c.lambda) : json(nullptr);
  doc["tol"] = c.stop.residual_threshold;
  doc["max_iters"] = c.stop.max_iters;
  doc["deadline_seconds"] = c.stop.deadline_seconds;
  doc["seeds"] = c.seeds;
  doc["theta_grid"] = c.theta_grid;
  doc["weight_range"] = {c.weight_min, c.weight_max};
  doc["epsilon"] = c.epsilon;
  doc["oracle_reference"] = c.oracle_reference;
  doc["workers"] = c.workers;
  return doc;
}

}  // namespace

std::string config_to_json(const ExperimentConfig& config) { return config_document(config).dump(2) + "\n"; }

std::string config_hash(const ExperimentConfig& config) {
  // Workers do not change results, so they stay out of the hash.
  json doc = config_document(config);
  doc.erase("workers");
  const std::string text = doc.dump();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(text.data(), text.size(), digest, &length, EVP_sha256(), nullptr);
  std::string hex;
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

Instance build_instance(const ExperimentConfig& config, std::uint64_t seed) {
  Instance instance;
  if (config.instance_file) {
    instance = read_instance(*config.instance_file);
  } else {
    const auto& g = config.generator;
    const LinkMode mode = g.directed ? LinkMode::kDirected : LinkMode::kUndirected;
    if (g.topology == "fat_tree") {
      const FatTree tree = generate_fat_tree(g.pods);
      instance = make_network(tree.graph, g.capacity, mode);
      generate_fat_tree_requests(instance, tree, g.paths_per_request, seed);
    } else {
      instance = make_network(generate_barabasi_albert(g.nodes, g.min_degree, seed), g.capacity, mode);
      generate_requests(instance, {g.requests, g.min_paths, g.max_paths, 1.0, seed});
    }
  }
  instance.alpha = config.alpha;
  return instance;
}

bool allocation_feasible(const Instance& instance, const std::vector<double>& x, double tol) {
  if (x.size() != instance.paths.size()) return false;
  std::map<std::string, double> load;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (!(x[p] >= 0.0)) return false;
    for (const auto& link : instance.paths[p].links) load[link] += x[p];
  }
  for (const auto& link : instance.links) {
    const auto it = load.find(link.id);
    if (it != load.end() && it->second > link.capacity + tol) return false;
  }
  return true;
}

std::pair<double, double> mean_ci(const std::vector<double>& samples) {
  if (samples.empty()) return {kNaN, kNaN};
  const double n = static_cast<double>(samples.size());
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= n;
  if (samples.size() < 2) return {mean, kNaN};
  double ss = 0.0;
  for (double v : samples) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  return {mean, boost::math::quantile(dist, 0.975) * sd / std::sqrt(n)};
}

ConvergenceStudy run_convergence(const ExperimentConfig& config) {
  validate(config);
  const std::size_t S = config.seeds.size();
  std::vector<Instance> instances(S);
  std::vector<double> reference(S);
  detail::parallel_for(S, config.workers, [&](std::size_t i) {
    instances[i] = build_instance(config, config.seeds[i]);
    reference[i] = fairness_of(instances[i], build_incidence(instances[i]),
                               optimum_point(instances[i], config));
  });

  ConvergenceStudy study;
  for (std::size_t m : config.domain_counts) {
    for (std::size_t i = 0; i < S; ++i) {
      ConvergenceCell cell;
      cell.domains = m;
      cell.seed = config.seeds[i];
      cell.reference_fairness = reference[i];
      cell.oracle_reference = config.oracle_reference;
      study.cells.push_back(std::move(cell));
    }
  }
  std::sort(study.cells.begin(), study.cells.end(), [](const auto& a, const auto& b) {
    return std::pair(a.domains, a.seed) < std::pair(b.domains, b.seed);
  });

  detail::parallel_for(study.cells.size(), config.workers, [&](std::size_t c) {
    auto& cell = study.cells[c];
    const std::size_t i = static_cast<std::size_t>(
        std::find(config.seeds.begin(), config.seeds.end(), cell.seed) - config.seeds.begin());
    const Instance& instance = instances[i];
    const Incidence inc = build_incidence(instance);
    const Partition part = partition_for(instance, inc, cell.domains, cell.seed);
    SolverState state = init_state(instance, part, lambda_for(config, instance, inc));
    cell.gaps.push_back(optimality_gap(
        cell.reference_fairness, fairness_of(instance, inc, feasible_point(state))));
    SolveOptions options;
    options.stop = config.stop;
    options.reference_fairness = cell.reference_fairness;
    options.on_round = [&](const TraceRow& row, const std::vector<double>& point) {
      cell.gaps.push_back(row.optimality_gap);
      if (!allocation_feasible(instance, point)) cell.feasible = false;
    };
    cell.trace = solve(state, options);
  });

  // Gap curves are extended with their last value past convergence.
  std::size_t cursor = 0;
  while (cursor < study.cells.size()) {
    const std::size_t m = study.cells[cursor].domains;
    std::vector<const ConvergenceCell*> group;
    while (cursor < study.cells.size() && study.cells[cursor].domains == m) {
      group.push_back(&study.cells[cursor++]);
    }
    std::size_t length = 0;
    std::vector<double> rounds;
    for (const auto* cell : group) {
      length = std::max(length, cell->gaps.size());
      rounds.push_back(static_cast<double>(cell->trace.rows.size()));
    }
    for (std::size_t k = 0; k < length; ++k) {
      std::vector<double> values;
      for (const auto* cell : group) values.push_back(cell->gaps[std::min(k, cell->gaps.size() - 1)]);
      const auto [mean, hw] = mean_ci(values);
      study.gap_summary.push_back({m, k, values.size(), mean, hw});
    }
    const auto [mean, hw] = mean_ci(rounds);
    study.rounds_summary.push_back({m, 0, rounds.size(), mean, hw});
  }
  return study;
}

std::size_t reconfigured_paths(const std::vector<double>& x, const std::vector<double>& x0,
                               double epsilon) {
  std::size_t n = 0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    if (std::abs(x[p] - x0[p]) > epsilon) ++n;
  }
  return n;
}

double movement(const std::vector<double>& x, const std::vector<double>& x0, double epsilon) {
  double psi = 0.0;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double d = std::abs(x[p] - x0[p]);
    if (d > epsilon) psi += d;
  }
  return psi;
}

ReconfigStudy run_reconfig(const ExperimentConfig& config) {
  validate(config);
  const std::size_t S = config.seeds.size();
  const std::size_t T = config.theta_grid.size();
  ReconfigStudy study;
  study.results.resize(S * T);
  study.unconstrained_n.resize(S);

  detail::parallel_for(S, config.workers, [&](std::size_t i) {
    const std::uint64_t seed = config.seeds[i];
    Instance instance = build_instance(config, seed);
    for (auto& r : instance.requests) r.weight = 1.0;
    const auto x0 = optimum_point(instance, config);

    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    std::uniform_real_distribution<double> draw(config.weight_min, config.weight_max);
    for (auto& r : instance.requests) r.weight = draw(rng);
    const Incidence inc = build_incidence(instance);
    const Partition part = partition_for(instance, inc, config.domain_counts.front(), seed);
    const double lambda = lambda_for(config, instance, inc);
    SolveOptions options;
    options.stop = config.stop;

    {
      SolverState state = init_state(instance, part, lambda, x0);
      const auto trace = solve(state, options);
      study.unconstrained_n[i] = reconfigured_paths(trace.final_point, x0, config.epsilon);
    }
    for (std::size_t t = 0; t < T; ++t) {
      SolverState state = init_state(instance, part, lambda, x0);
      set_switching(state, config.theta_grid[t], x0);
      const auto trace = solve(state, options);
      const auto& x = trace.final_point;
      auto& out = study.results[i * T + t];
      out.seed = seed;
      out.theta = config.theta_grid[t];
      out.n = reconfigured_paths(x, x0, config.epsilon);
      out.phi = fairness_of(instance, inc, x);
      out.psi = movement(x, x0, config.epsilon);
      out.paths = x.size();
      out.iterations = state.iteration;
      out.converged = trace.converged;
    }
  });

  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> n, phi, psi;
    for (std::size_t i = 0; i < S; ++i) {
      const auto& r = study.results[i * T + t];
      n.push_back(static_cast<double>(r.n));
      phi.push_back(r.phi);
      psi.push_back(r.psi);
    }
    ReconfigSummary row;
    row.theta = config.theta_grid[t];
    row.samples = S;
    std::tie(row.n_mean, row.n_half_width) = mean_ci(n);
    std::tie(row.phi_mean, row.phi_half_width) = mean_ci(phi);
    std::tie(row.psi_mean, row.psi_half_width) = mean_ci(psi);
    study.summary.push_back(row);
  }
  std::stable_sort(study.results.begin(), study.results.end(), [](const auto& a, const auto& b) {
    return std::pair(a.seed, a.theta) < std::pair(b.seed, b.theta);
  });
  return study;
}

OverheadReport overhead_report(const SolverState& state, const IterationTrace& trace) {
  OverheadReport report;
  const auto expected = expected_pair_floats(state);
  const std::size_t M = expected.size();
  const std::size_t rounds = trace.rows.size();
  report.per_domain.assign(M, 0);
  report.local_copies.assign(M, 0);
  for (std::size_t m = 0; m < M; ++m) {
    report.local_copies[m] = state.domains[m].x.size() + state.domains[m].z.size();
    for (std::size_t n = 0; n < M; ++n) {
      if (m == n) continue;
      OverheadRow row;
      row.from = m;
      row.to = n;
      row.closed_form = expected[m][n];
      row.counted = trace.pair_floats_per_round.empty() ? 0 : trace.pair_floats_per_round[m][n];
      if (row.counted != row.closed_form ||
          state.total_pair_floats[m][n] != row.closed_form * state.iteration) {
        report.consistent = false;
      }
      report.per_domain[m] += row.counted;
      report.pairs.push_back(row);
    }
  }
  if (rounds == 0 && state.iteration != 0) report.consistent = false;
  return report;
}

std::string convergence_cells_csv(const ConvergenceStudy& study) {
  std::string out =
      "domains,seed,iteration,primal_residual,dual_residual,fairness_value,optimality_gap,"
      "feasible_min_slack,floats_sent_total\n";
  for (const auto& cell : study.cells) {
    for (const auto& r : cell.trace.rows) {
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", cell.domains, cell.seed, r.iteration,
                         num(r.primal_residual), num(r.dual_residual), num(r.fairness),
                         num(r.optimality_gap), num(r.min_slack), r.floats_sent);
    }
  }
  return out;
}

std::string convergence_summary_csv(const ConvergenceStudy& study) {
  std::string out = "domains,iteration,samples,gap_mean,gap_ci95\n";
  for (const auto& r : study.gap_summary) {
    out += fmt::format("{},{},{},{},{}\n", r.domains, r.iteration, r.samples, num(r.mean),
                       num(r.half_width));
  }
  return out;
}

std::string reconfig_csv(const ReconfigStudy& study) {
  std::string out = "seed,theta,paths,n,phi,psi,iterations,converged\n";
  for (const auto& r : study.results) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", r.seed, num(r.theta), r.paths, r.n, num(r.phi),
                       num(r.psi), r.iterations, r.converged ? 1 : 0);
  }
  return out;
}

std::string reconfig_summary_csv(const ReconfigStudy& study) {
  std::string out = "theta,samples,n_mean,n_ci95,phi_mean,phi_ci95,psi_mean,psi_ci95\n";
  for (const auto& r : study.summary) {
    out += fmt::format("{},{},{},{},{},{},{},{}\n", num(r.theta), r.samples, num(r.n_mean),
                       num(r.n_half_width), num(r.phi_mean), num(r.phi_half_width), num(r.psi_mean),
                       num(r.psi_half_width));
  }
  return out;
}

std::string overhead_csv(const OverheadReport& report) {
  std::string out = "from_domain,to_domain,floats_per_round,closed_form\n";
  for (const auto& r : report.pairs) {
    out += fmt::format("{},{},{},{}\n", r.from, r.to, r.counted, r.closed_form);
  }
  return out;
}

std::string manifest_json(const ExperimentConfig& config, const std::vector<std::string>& files) {
  json doc;
  doc["config"] = config_document(config);
  doc["config_hash"] = config_hash(config);
  doc["seeds"] = config.seeds;
  doc["version"] = kVersion;
  doc["files"] = files;
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  doc["created"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
  return doc.dump(2) + "\n";
}

}  // namespace fairshare
