#include "fairshare/fd_admm.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <unordered_map>

#include <fmt/core.h>

#include "fairshare/fair_core.h"
#include "fairshare/lp.h"
#include "parallel.h"

namespace fairshare {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t position_of(const std::vector<std::size_t>& sorted, std::size_t value) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), value);
  return static_cast<std::size_t>(it - sorted.begin());
}

DomainState build_domain(const SolverState& s, std::size_t m, const std::vector<double>& init) {
  const auto& inc = s.incidence;
  DomainState d;
  d.index = m;
  d.requests = s.partition.domain_requests[m];
  d.request_offsets.push_back(0);
  for (std::size_t r : d.requests) {
    for (std::size_t p : inc.request_to_paths[r]) d.x_paths.push_back(p);
    d.request_offsets.push_back(d.x_paths.size());
  }
  d.links = s.partition.domain_links[m];
  d.link_offsets.push_back(0);
  for (std::size_t j : d.links) {
    for (std::size_t p : inc.link_to_paths[j]) d.z_paths.push_back(p);
    d.link_offsets.push_back(d.z_paths.size());
  }

  d.known_paths = s.partition.domain_paths[m];
  d.known_paths.insert(d.known_paths.end(), d.x_paths.begin(), d.x_paths.end());
  std::sort(d.known_paths.begin(), d.known_paths.end());
  d.known_paths.erase(std::unique(d.known_paths.begin(), d.known_paths.end()), d.known_paths.end());

  for (std::size_t p : d.x_paths) d.x_known.push_back(position_of(d.known_paths, p));
  for (std::size_t p : d.z_paths) d.z_known.push_back(position_of(d.known_paths, p));

  d.x.resize(d.x_paths.size());
  d.v.assign(d.x_paths.size(), 0.0);
  d.z.resize(d.z_paths.size());
  d.u.assign(d.z_paths.size(), 0.0);
  for (std::size_t i = 0; i < d.x.size(); ++i) d.x[i] = init[d.x_paths[i]];
  for (std::size_t i = 0; i < d.z.size(); ++i) d.z[i] = init[d.z_paths[i]];
  d.z_tilde.resize(d.known_paths.size());
  for (std::size_t k = 0; k < d.known_paths.size(); ++k) d.z_tilde[k] = init[d.known_paths[k]];
  d.contribution.assign(d.known_paths.size(), 0.0);
  return d;
}

void build_peers(SolverState& s) {
  const std::size_t M = s.domains.size();
  s.peers.assign(M, {});
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < M; ++n) {
      if (n == m) continue;
      const auto& a = s.domains[m].known_paths;
      const auto& b = s.domains[n].known_paths;
      PeerLink link;
      link.other = n;
      std::size_t i = 0, k = 0;
      while (i < a.size() && k < b.size()) {
        if (a[i] < b[k]) ++i;
        else if (b[k] < a[i]) ++k;
        else {
          link.mine.push_back(i++);
          link.theirs.push_back(k++);
        }
      }
      if (!link.mine.empty()) s.peers[m].push_back(std::move(link));
    }
  }
}

void build_contributions(SolverState& s) {
  detail::parallel_for(s.domains.size(), s.workers, [&](std::size_t m) {
    auto& d = s.domains[m];
    std::fill(d.contribution.begin(), d.contribution.end(), 0.0);
    for (std::size_t i = 0; i < d.z.size(); ++i) d.contribution[d.z_known[i]] += d.z[i];
    for (std::size_t i = 0; i < d.x.size(); ++i) d.contribution[d.x_known[i]] += d.x[i];
  });
}

void refresh_global_consensus(SolverState& s) {
  std::vector<char> seen(s.incidence.num_paths(), 0);
  for (const auto& d : s.domains) {
    for (std::size_t k = 0; k < d.known_paths.size(); ++k) {
      const std::size_t p = d.known_paths[k];
      if (!seen[p]) {
        seen[p] = 1;
        s.consensus[p] = d.z_tilde[k];
      }
    }
  }
}

}  // namespace

std::size_t SolverState::total_copies() const {
  std::size_t n = 0;
  for (std::size_t m : multiplicity) n += m;
  return n;
}

SolverState init_state(const Instance& instance, const Partition& partition, double lambda,
                       const std::vector<double>& init_point) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw SolverError(fmt::format("penalty lambda must be positive (got {})", lambda));
  }
  SolverState s;
  s.instance = instance;
  s.incidence = build_incidence(instance);
  s.partition = partition;
  s.lambda = lambda;
  const std::size_t P = s.incidence.num_paths();
  if (partition.link_domain.size() != s.incidence.num_links() ||
      partition.request_domain.size() != s.incidence.num_requests() ||
      partition.domain_links.size() != partition.num_domains) {
    throw SolverError("partition does not match the instance");
  }
  std::vector<double> init = init_point;
  if (init.empty()) init.assign(P, 0.0);
  if (init.size() != P) {
    throw SolverError(fmt::format("init point has {} entries for {} paths", init.size(), P));
  }
  s.multiplicity.resize(P);
  for (std::size_t p = 0; p < P; ++p) s.multiplicity[p] = s.incidence.multiplicity(p);
  for (std::size_t m = 0; m < partition.num_domains; ++m) s.domains.push_back(build_domain(s, m, init));
  build_peers(s);
  s.consensus = init;
  s.prev_consensus = init;
  const std::size_t M = partition.num_domains;
  s.round_pair_floats.assign(M, std::vector<std::size_t>(M, 0));
  s.total_pair_floats.assign(M, std::vector<std::size_t>(M, 0));
  build_contributions(s);
  return s;
}

void consensus(SolverState& s) {
  detail::parallel_for(s.domains.size(), s.workers, [&](std::size_t m) {
    auto& d = s.domains[m];
    std::vector<double> acc(d.known_paths.size(), 0.0);
    bool own_done = false;
    auto add_own = [&] {
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += d.contribution[k];
      own_done = true;
    };
    for (const auto& peer : s.peers[m]) {
      if (!own_done && peer.other > m) add_own();
      const auto& theirs = s.domains[peer.other].contribution;
      for (std::size_t i = 0; i < peer.mine.size(); ++i) acc[peer.mine[i]] += theirs[peer.theirs[i]];
    }
    if (!own_done) add_own();
    for (std::size_t k = 0; k < acc.size(); ++k) {
      d.z_tilde[k] = acc[k] / static_cast<double>(s.multiplicity[d.known_paths[k]]);
    }
  });
  s.prev_consensus = s.consensus;
  refresh_global_consensus(s);
}

void dual_update(SolverState& s) {
  const double inv = 1.0 / s.lambda;
  detail::parallel_for(s.domains.size(), s.workers, [&](std::size_t m) {
    auto& d = s.domains[m];
    for (std::size_t i = 0; i < d.z.size(); ++i) d.u[i] += inv * (d.z[i] - d.z_tilde[d.z_known[i]]);
    for (std::size_t i = 0; i < d.x.size(); ++i) d.v[i] += inv * (d.x[i] - d.z_tilde[d.x_known[i]]);
  });
}

void primal_update(SolverState& s) {
  const double lambda = s.lambda;
  const auto& inst = s.instance;
  detail::parallel_for(s.domains.size(), s.workers, [&](std::size_t m) {
    auto& d = s.domains[m];
    for (std::size_t l = 0; l < d.links.size(); ++l) {
      const std::size_t begin = d.link_offsets[l];
      const std::size_t end = d.link_offsets[l + 1];
      for (std::size_t i = begin; i < end; ++i) d.z[i] = d.z_tilde[d.z_known[i]] - lambda * d.u[i];
      project_simplex_inplace(std::span<double>(d.z).subspan(begin, end - begin),
                              inst.links[d.links[l]].capacity);
    }
    ProxInput in;
    in.lambda = lambda;
    in.alpha = inst.alpha;
    for (std::size_t q = 0; q < d.requests.size(); ++q) {
      const std::size_t begin = d.request_offsets[q];
      const std::size_t end = d.request_offsets[q + 1];
      in.weight = inst.requests[d.requests[q]].weight;
      in.anchor.resize(end - begin);
      for (std::size_t i = begin; i < end; ++i) {
        in.anchor[i - begin] = d.z_tilde[d.x_known[i]] - lambda * d.v[i];
      }
      std::vector<double> x;
      if (s.switching && s.switching->theta > 0.0) {
        SwitchingCost sw{s.switching->theta, {}};
        for (std::size_t i = begin; i < end; ++i) sw.baseline.push_back(s.switching->baseline[d.x_paths[i]]);
        in.switching = std::move(sw);
        x = prox_request_l1(in);
        in.switching.reset();
      } else {
        x = prox_request(in);
      }
      std::copy(x.begin(), x.end(), d.x.begin() + static_cast<std::ptrdiff_t>(begin));
    }
  });
}

void exchange(SolverState& s) {
  build_contributions(s);
  for (auto& row : s.round_pair_floats) std::fill(row.begin(), row.end(), 0);
  for (std::size_t m = 0; m < s.domains.size(); ++m) {
    for (const auto& peer : s.peers[m]) {
      s.round_pair_floats[m][peer.other] += peer.mine.size();
      s.total_pair_floats[m][peer.other] += peer.mine.size();
    }
  }
}

void iterate(SolverState& s) {
  consensus(s);
  dual_update(s);
  primal_update(s);
  exchange(s);
  s.last_residuals = residuals(s);
  ++s.iteration;
}

std::vector<double> feasible_point(const SolverState& s) {
  std::vector<double> out(s.incidence.num_paths(), std::numeric_limits<double>::infinity());
  for (const auto& d : s.domains) {
    for (std::size_t i = 0; i < d.z.size(); ++i) out[d.z_paths[i]] = std::min(out[d.z_paths[i]], d.z[i]);
  }
  return out;
}

Residuals residuals(const SolverState& s) {
  const double n = static_cast<double>(std::max<std::size_t>(s.total_copies(), 1));
  double primal = 0.0;
  for (const auto& d : s.domains) {
    for (std::size_t i = 0; i < d.z.size(); ++i) {
      const double r = d.z[i] - d.z_tilde[d.z_known[i]];
      primal += r * r;
    }
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      const double r = d.x[i] - d.z_tilde[d.x_known[i]];
      primal += r * r;
    }
  }
  double dual = 0.0;
  for (std::size_t p = 0; p < s.consensus.size(); ++p) {
    const double g = s.consensus[p] - s.prev_consensus[p];
    dual += static_cast<double>(s.multiplicity[p]) * g * g;
  }
  return {std::sqrt(primal / n), std::sqrt(dual / n) / s.lambda};
}

std::vector<std::vector<std::size_t>> expected_pair_floats(const SolverState& s) {
  const std::size_t M = s.domains.size();
  std::vector<std::vector<std::size_t>> out(M, std::vector<std::size_t>(M, 0));
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t n = 0; n < M; ++n) {
      if (m == n) continue;
      const auto& a = s.domains[m].known_paths;
      const auto& b = s.domains[n].known_paths;
      std::vector<std::size_t> common;
      std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
      out[m][n] = common.size();
    }
  }
  return out;
}

void set_switching(SolverState& s, double theta, std::vector<double> baseline) {
  if (!(theta >= 0.0) || !std::isfinite(theta)) throw SolverError("theta must be >= 0");
  if (baseline.size() != s.incidence.num_paths()) {
    throw SolverError(fmt::format("baseline has {} entries for {} paths", baseline.size(),
                                  s.incidence.num_paths()));
  }
  s.switching = SwitchingMode{theta, std::move(baseline)};
}

PenaltyBound penalty_bound(const Instance& instance, const Incidence& inc) {
  const std::size_t R = inc.num_requests();
  PenaltyBound pb;
  pb.utopic.resize(R);
  pb.midpoint.resize(R);
  pb.lower.resize(R);
  pb.contenders.resize(R);
  if (R == 0) {
    pb.lambda_star = 1.0;
    return pb;
  }
  const double alpha = instance.alpha;

  std::vector<std::vector<std::size_t>> request_links(R);
  std::vector<std::vector<std::size_t>> link_requests(inc.num_links());
  for (std::size_t r = 0; r < R; ++r) {
    for (std::size_t p : inc.request_to_paths[r]) {
      for (std::size_t j : inc.path_to_links[p]) request_links[r].push_back(j);
    }
    auto& links = request_links[r];
    std::sort(links.begin(), links.end());
    links.erase(std::unique(links.begin(), links.end()), links.end());
    for (std::size_t j : links) link_requests[j].push_back(r);
  }

  for (std::size_t r = 0; r < R; ++r) {
    auto& cont = pb.contenders[r];
    for (std::size_t j : request_links[r]) {
      cont.insert(cont.end(), link_requests[j].begin(), link_requests[j].end());
    }
    std::sort(cont.begin(), cont.end());
    cont.erase(std::unique(cont.begin(), cont.end()), cont.end());

    // Utopic aggregate: contenders pinned at zero, so only r's paths and
    // the links they use enter the LP.
    const auto& paths = inc.request_to_paths[r];
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (std::size_t j : request_links[r]) {
      std::vector<double> row(paths.size(), 0.0);
      for (std::size_t q = 0; q < paths.size(); ++q) {
        const auto& lp = inc.path_to_links[paths[q]];
        if (std::binary_search(lp.begin(), lp.end(), j)) row[q] = 1.0;
      }
      a.push_back(std::move(row));
      b.push_back(instance.links[j].capacity);
    }
    const auto sol = maximize_packing(a, b, std::vector<double>(paths.size(), 1.0));
    if (!(sol.value > 0.0)) {
      throw SolverError("request " + instance.requests[r].id + " has a zero utopic allocation");
    }
    pb.utopic[r] = sol.value;
  }

  for (std::size_t r = 0; r < R; ++r) {
    double wsum = 0.0;
    for (std::size_t s : pb.contenders[r]) wsum += instance.requests[s].weight;
    pb.midpoint[r] = instance.requests[r].weight / wsum * pb.utopic[r];
  }

  if (alpha >= 1.0) {
    const double rho_min = *std::min_element(pb.midpoint.begin(), pb.midpoint.end());
    for (std::size_t r = 0; r < R; ++r) {
      pb.lower[r] = std::pow(rho_min, 1.0 - 1.0 / alpha) * std::pow(pb.midpoint[r], 1.0 / alpha);
    }
  } else {
    for (std::size_t r = 0; r < R; ++r) {
      double denom = 0.0;
      for (std::size_t s : pb.contenders[r]) {
        denom += instance.requests[s].weight * std::pow(pb.utopic[s], 1.0 - alpha);
      }
      pb.lower[r] = std::pow(instance.requests[r].weight * pb.utopic[r] / denom, 1.0 / alpha);
    }
  }

  double min_a = std::numeric_limits<double>::infinity();
  double max_d = 0.0;
  for (std::size_t r = 0; r < R; ++r) {
    const double w = instance.requests[r].weight;
    min_a = std::min(min_a, w / std::pow(pb.utopic[r], alpha + 1.0));
    max_d = std::max(max_d, w / std::pow(pb.lower[r], alpha + 1.0));
  }
  pb.lambda_star = alpha / std::sqrt(min_a * max_d);
  return pb;
}

double optimality_gap(double reference, double fairness) {
  if (!std::isfinite(fairness)) return 1.0;
  if (reference == 0.0) return std::abs(fairness);
  return std::abs(reference - fairness) / std::abs(reference);
}

double fairness_of(const Instance& instance, const Incidence& inc, const std::vector<double>& x) {
  const auto y = aggregates(inc, x);
  double total = 0.0;
  for (std::size_t r = 0; r < y.size(); ++r) {
    if (!(y[r] > 0.0)) return kNaN;
    total += alpha_utility(y[r], instance.requests[r].weight, instance.alpha);
  }
  return total;
}

IterationTrace solve(SolverState& s, const SolveOptions& options) {
  IterationTrace trace;
  const auto start = std::chrono::steady_clock::now();
  const auto& stop = options.stop;
  for (std::size_t k = 0; k < stop.max_iters; ++k) {
    iterate(s);
    const auto point = feasible_point(s);
    TraceRow row;
    row.iteration = s.iteration;
    row.primal_residual = s.last_residuals.primal;
    row.dual_residual = s.last_residuals.dual;
    row.fairness = fairness_of(s.instance, s.incidence, point);
    row.optimality_gap =
        options.reference_fairness ? optimality_gap(*options.reference_fairness, row.fairness) : kNaN;
    row.min_slack = min_capacity_slack(s.instance, s.incidence, point);
    for (const auto& r : s.round_pair_floats) {
      for (std::size_t f : r) row.floats_sent += f;
    }
    trace.rows.push_back(row);
    if (options.on_round) options.on_round(row, point);
    if (k == 0) trace.pair_floats_per_round = s.round_pair_floats;
    if (row.primal_residual < stop.residual_threshold && row.dual_residual < stop.residual_threshold) {
      trace.converged = true;
      break;
    }
    if (stop.deadline_seconds > 0.0) {
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      if (elapsed.count() >= stop.deadline_seconds) break;
    }
  }
  trace.final_point = feasible_point(s);
  return trace;
}

void apply_event(SolverState& s, const Event& event) {
  auto find_request = [&](const std::string& id) {
    for (std::size_t r = 0; r < s.instance.requests.size(); ++r) {
      if (s.instance.requests[r].id == id) return r;
    }
    throw SolverError("unknown request '" + id + "'");
  };

  if (const auto* e = std::get_if<WeightChange>(&event)) {
    if (!(e->weight > 0.0) || !std::isfinite(e->weight)) throw SolverError("weight must be positive");
    s.instance.requests[find_request(e->request)].weight = e->weight;
    return;
  }
  if (std::holds_alternative<BaselineReset>(event)) {
    const double theta = s.switching ? s.switching->theta : 0.0;
    s.switching = SwitchingMode{theta, feasible_point(s)};
    return;
  }

  Instance next = s.instance;
  if (const auto* e = std::get_if<RequestAdd>(&event)) {
    next.requests.push_back(e->request);
    next.paths.insert(next.paths.end(), e->paths.begin(), e->paths.end());
    if (auto report = validate(next); !report.empty()) {
      throw SolverError("request_add makes the instance invalid: " + describe(report));
    }
  } else if (const auto* e = std::get_if<RequestRemove>(&event)) {
    const std::size_t r = find_request(e->request);
    const auto& gone = next.requests[r].paths;
    std::erase_if(next.paths, [&](const Path& p) {
      return std::find(gone.begin(), gone.end(), p.id) != gone.end();
    });
    next.requests.erase(next.requests.begin() + static_cast<std::ptrdiff_t>(r));
  }

  // Carry every surviving copy over by id.
  const auto& inst = s.instance;
  std::map<std::string, std::pair<double, double>> xv;
  std::map<std::pair<std::string, std::string>, std::pair<double, double>> zu;
  std::map<std::string, std::pair<double, double>> cons;
  std::map<std::string, double> base;
  for (const auto& d : s.domains) {
    for (std::size_t i = 0; i < d.x.size(); ++i) xv[inst.paths[d.x_paths[i]].id] = {d.x[i], d.v[i]};
    for (std::size_t l = 0; l < d.links.size(); ++l) {
      for (std::size_t i = d.link_offsets[l]; i < d.link_offsets[l + 1]; ++i) {
        zu[{inst.links[d.links[l]].id, inst.paths[d.z_paths[i]].id}] = {d.z[i], d.u[i]};
      }
    }
  }
  for (std::size_t p = 0; p < inst.paths.size(); ++p) {
    cons[inst.paths[p].id] = {s.consensus[p], s.prev_consensus[p]};
    if (s.switching) base[inst.paths[p].id] = s.switching->baseline[p];
  }

  const Incidence inc = build_incidence(next);
  Partition part = derive_partition(next, inc, s.partition.link_domain, s.partition.num_domains);
  SolverState fresh = init_state(next, part, s.lambda);
  fresh.iteration = s.iteration;
  fresh.workers = s.workers;
  fresh.total_pair_floats = s.total_pair_floats;
  fresh.last_residuals = s.last_residuals;
  for (auto& d : fresh.domains) {
    for (std::size_t i = 0; i < d.x.size(); ++i) {
      if (auto it = xv.find(next.paths[d.x_paths[i]].id); it != xv.end()) {
        std::tie(d.x[i], d.v[i]) = it->second;
      }
    }
    for (std::size_t l = 0; l < d.links.size(); ++l) {
      for (std::size_t i = d.link_offsets[l]; i < d.link_offsets[l + 1]; ++i) {
        auto it = zu.find({next.links[d.links[l]].id, next.paths[d.z_paths[i]].id});
        if (it != zu.end()) std::tie(d.z[i], d.u[i]) = it->second;
      }
    }
    for (std::size_t k = 0; k < d.known_paths.size(); ++k) {
      if (auto it = cons.find(next.paths[d.known_paths[k]].id); it != cons.end()) {
        d.z_tilde[k] = it->second.first;
      }
    }
  }
  for (std::size_t p = 0; p < next.paths.size(); ++p) {
    if (auto it = cons.find(next.paths[p].id); it != cons.end()) {
      fresh.consensus[p] = it->second.first;
      fresh.prev_consensus[p] = it->second.second;
    }
  }
  if (s.switching) {
    std::vector<double> baseline(next.paths.size(), 0.0);
    for (std::size_t p = 0; p < next.paths.size(); ++p) {
      if (auto it = base.find(next.paths[p].id); it != base.end()) baseline[p] = it->second;
    }
    fresh.switching = SwitchingMode{s.switching->theta, std::move(baseline)};
  }
  build_contributions(fresh);
  s = std::move(fresh);
}

std::string trace_to_csv(const IterationTrace& trace) {
  std::string out =
      "iteration,primal_residual,dual_residual,fairness_value,optimality_gap,feasible_min_slack,"
      "floats_sent_total\n";
  for (const auto& r : trace.rows) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{},{:.17g},{}\n", r.iteration, r.primal_residual,
                       r.dual_residual, r.fairness,
                       std::isnan(r.optimality_gap) ? std::string()
                                                    : fmt::format("{:.17g}", r.optimality_gap),
                       r.min_slack, r.floats_sent);
  }
  return out;
}

std::string pair_floats_to_csv(const SolverState& s, std::size_t rounds) {
  std::string out = "from_domain,to_domain,floats_per_round,rounds,floats_total\n";
  const auto expected = expected_pair_floats(s);
  for (std::size_t m = 0; m < expected.size(); ++m) {
    for (std::size_t n = 0; n < expected.size(); ++n) {
      if (m == n) continue;
      out += fmt::format("{},{},{},{},{}\n", m, n, expected[m][n], rounds, s.total_pair_floats[m][n]);
    }
  }
  return out;
}

}  // namespace fairshare
