#include "fairshare/instance.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace fairshare {

namespace {

template <typename T>
std::unordered_map<std::string, std::size_t> index_by_id(const std::vector<T>& items,
                                                         const char* what,
                                                         ValidationReport& report) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (!index.emplace(items[i].id, i).second) {
      report.push_back({"duplicate id", items[i].id, what});
    }
  }
  return index;
}

}  // namespace

ValidationReport validate(const Instance& instance) {
  ValidationReport report;
  if (!(instance.alpha > 0.0) || !std::isfinite(instance.alpha)) {
    report.push_back({"nonpositive alpha", "alpha", std::to_string(instance.alpha)});
  }

  std::unordered_set<std::string> node_ids;
  for (const auto& n : instance.nodes) {
    if (!node_ids.insert(n).second) report.push_back({"duplicate id", n, "node"});
  }

  auto link_index = index_by_id(instance.links, "link", report);
  auto path_index = index_by_id(instance.paths, "path", report);
  index_by_id(instance.requests, "request", report);

  for (const auto& link : instance.links) {
    if (!(link.capacity > 0.0) || !std::isfinite(link.capacity)) {
      report.push_back({"nonpositive capacity", link.id, std::to_string(link.capacity)});
    }
    for (const auto& end : {link.from, link.to}) {
      if (end && *end >= instance.nodes.size()) {
        report.push_back({"dangling node id", link.id, "link endpoint out of range"});
      }
    }
  }

  for (const auto& path : instance.paths) {
    if (path.links.empty()) {
      report.push_back({"empty path", path.id, ""});
      continue;
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : path.links) {
      if (!link_index.contains(l)) report.push_back({"dangling link id", path.id, l});
      if (!seen.insert(l).second) report.push_back({"repeated link", path.id, l});
    }
  }

  std::vector<int> owners(instance.paths.size(), 0);
  for (const auto& req : instance.requests) {
    if (!(req.weight > 0.0) || !std::isfinite(req.weight)) {
      report.push_back({"nonpositive weight", req.id, std::to_string(req.weight)});
    }
    if (req.paths.empty()) report.push_back({"request without paths", req.id, ""});
    std::unordered_set<std::string> seen;
    for (const auto& p : req.paths) {
      auto it = path_index.find(p);
      if (it == path_index.end()) {
        report.push_back({"dangling path id", req.id, p});
        continue;
      }
      if (!seen.insert(p).second) {
        report.push_back({"repeated path", req.id, p});
        continue;
      }
      ++owners[it->second];
    }
    for (const auto* node : {&req.source_node, &req.target_node}) {
      if (!node->empty() && instance.has_topology() && !node_ids.contains(*node)) {
        report.push_back({"dangling node id", req.id, *node});
      }
    }
  }
  for (std::size_t p = 0; p < instance.paths.size(); ++p) {
    if (owners[p] == 0) report.push_back({"orphan path", instance.paths[p].id, ""});
    if (owners[p] > 1) report.push_back({"shared path", instance.paths[p].id, ""});
  }
  return report;
}

std::string describe(const ValidationReport& report) {
  std::ostringstream out;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (i) out << "; ";
    out << report[i].kind << " (" << report[i].subject;
    if (!report[i].detail.empty()) out << ": " << report[i].detail;
    out << ")";
  }
  return out.str();
}

Incidence build_incidence(const Instance& instance) {
  if (auto report = validate(instance); !report.empty()) {
    throw InvalidInstance("invalid instance: " + describe(report));
  }
  std::unordered_map<std::string, std::size_t> link_index;
  std::unordered_map<std::string, std::size_t> path_index;
  for (std::size_t j = 0; j < instance.links.size(); ++j) link_index[instance.links[j].id] = j;
  for (std::size_t p = 0; p < instance.paths.size(); ++p) path_index[instance.paths[p].id] = p;

  Incidence inc;
  inc.link_to_paths.resize(instance.links.size());
  inc.path_to_links.resize(instance.paths.size());
  inc.request_to_paths.resize(instance.requests.size());
  inc.path_to_request.resize(instance.paths.size());

  for (std::size_t p = 0; p < instance.paths.size(); ++p) {
    for (const auto& l : instance.paths[p].links) {
      const std::size_t j = link_index.at(l);
      inc.path_to_links[p].push_back(j);
      inc.link_to_paths[j].push_back(p);
    }
    std::sort(inc.path_to_links[p].begin(), inc.path_to_links[p].end());
  }
  for (std::size_t r = 0; r < instance.requests.size(); ++r) {
    for (const auto& pid : instance.requests[r].paths) {
      const std::size_t p = path_index.at(pid);
      inc.request_to_paths[r].push_back(p);
      inc.path_to_request[p] = r;
    }
    std::sort(inc.request_to_paths[r].begin(), inc.request_to_paths[r].end());
  }
  return inc;
}

std::vector<double> link_loads(const Incidence& inc, const std::vector<double>& x) {
  std::vector<double> load(inc.num_links(), 0.0);
  for (std::size_t j = 0; j < inc.num_links(); ++j) {
    for (std::size_t p : inc.link_to_paths[j]) load[j] += x[p];
  }
  return load;
}

std::vector<double> aggregates(const Incidence& inc, const std::vector<double>& x) {
  std::vector<double> y(inc.num_requests(), 0.0);
  for (std::size_t r = 0; r < inc.num_requests(); ++r) {
    for (std::size_t p : inc.request_to_paths[r]) y[r] += x[p];
  }
  return y;
}

double min_capacity_slack(const Instance& instance, const Incidence& inc,
                          const std::vector<double>& x) {
  double slack = std::numeric_limits<double>::infinity();
  const auto load = link_loads(inc, x);
  for (std::size_t j = 0; j < load.size(); ++j) {
    slack = std::min(slack, instance.links[j].capacity - load[j]);
  }
  return slack;
}

}  // namespace fairshare
