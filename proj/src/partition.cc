#include "fairshare/partition.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include <fmt/core.h>

namespace fairshare {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

void sort_unique(std::vector<std::size_t>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<std::size_t> bfs_distances(const std::vector<std::vector<std::size_t>>& adj,
                                       const std::vector<std::size_t>& sources) {
  std::vector<std::size_t> dist(adj.size(), kNone);
  std::vector<std::size_t> queue;
  for (std::size_t s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const std::size_t u = queue[head];
    for (std::size_t v : adj[u]) {
      if (dist[v] == kNone) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  return dist;
}

// Links of `members` whose removal keeps the induced subgraph connected.
std::vector<std::size_t> removable_links(const std::vector<std::size_t>& members,
                                         const std::vector<std::size_t>& link_domain,
                                         std::size_t domain,
                                         const std::vector<std::vector<std::size_t>>& adj) {
  if (members.size() <= 1) return {};
  std::unordered_map<std::size_t, std::size_t> order;
  std::vector<std::size_t> low(members.size(), 0);
  std::vector<char> articulation(members.size(), 0);
  std::size_t counter = 0;

  std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t u, std::size_t parent) {
    const std::size_t iu = order.size();
    order[u] = counter++;
    const std::size_t mine = order[u];
    low[iu] = mine;
    std::size_t children = 0;
    for (std::size_t v : adj[u]) {
      if (link_domain[v] != domain || v == parent) continue;
      auto it = order.find(v);
      if (it != order.end()) {
        low[iu] = std::min(low[iu], it->second);
        continue;
      }
      const std::size_t iv = order.size();
      visit(v, u);
      low[iu] = std::min(low[iu], low[iv]);
      ++children;
      if (parent != kNone && low[iv] >= mine) articulation[iu] = 1;
    }
    if (parent == kNone && children > 1) articulation[iu] = 1;
  };
  visit(members.front(), kNone);

  // order[u] doubles as the slot index because slots are handed out in
  // discovery order.
  std::vector<std::size_t> out;
  for (std::size_t l : members) {
    auto it = order.find(l);
    if (it != order.end() && !articulation[it->second]) out.push_back(l);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<std::vector<std::size_t>> link_adjacency(const Instance& instance) {
  const std::size_t n = instance.links.size();
  std::vector<std::vector<std::size_t>> adj(n);
  bool endpoints = instance.has_topology();
  for (const auto& l : instance.links) endpoints = endpoints && l.from && l.to;
  if (endpoints) {
    std::vector<std::vector<std::size_t>> incident(instance.nodes.size());
    for (std::size_t j = 0; j < n; ++j) {
      incident[*instance.links[j].from].push_back(j);
      incident[*instance.links[j].to].push_back(j);
    }
    for (const auto& links : incident) {
      for (std::size_t a : links) {
        for (std::size_t b : links) {
          if (a != b) adj[a].push_back(b);
        }
      }
    }
  } else {
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t j = 0; j < n; ++j) index[instance.links[j].id] = j;
    for (const auto& p : instance.paths) {
      for (std::size_t i = 0; i + 1 < p.links.size(); ++i) {
        const std::size_t a = index.at(p.links[i]);
        const std::size_t b = index.at(p.links[i + 1]);
        adj[a].push_back(b);
        adj[b].push_back(a);
      }
    }
  }
  for (auto& a : adj) sort_unique(a);
  return adj;
}

Partition derive_partition(const Instance& instance, const Incidence& inc,
                           std::vector<std::size_t> link_domain, std::size_t num_domains) {
  if (num_domains == 0) throw PartitionError("at least one domain is required");
  if (link_domain.size() != inc.num_links()) {
    throw PartitionError(fmt::format("link_domain has {} entries for {} links",
                                     link_domain.size(), inc.num_links()));
  }
  Partition part;
  part.num_domains = num_domains;
  part.link_domain = std::move(link_domain);
  part.domain_links.resize(num_domains);
  part.domain_paths.resize(num_domains);
  part.domain_requests.resize(num_domains);
  for (std::size_t j = 0; j < inc.num_links(); ++j) {
    const std::size_t m = part.link_domain[j];
    if (m >= num_domains) throw PartitionError(fmt::format("link {} assigned to domain {}", j, m));
    part.domain_links[m].push_back(j);
  }
  for (std::size_t p = 0; p < inc.num_paths(); ++p) {
    for (std::size_t j : inc.path_to_links[p]) part.domain_paths[part.link_domain[j]].push_back(p);
  }
  for (auto& paths : part.domain_paths) sort_unique(paths);

  std::unordered_map<std::string, std::size_t> link_index;
  std::unordered_map<std::string, std::size_t> path_index;
  for (std::size_t j = 0; j < instance.links.size(); ++j) link_index[instance.links[j].id] = j;
  for (std::size_t p = 0; p < instance.paths.size(); ++p) path_index[instance.paths[p].id] = p;
  part.request_domain.resize(inc.num_requests());
  for (std::size_t r = 0; r < inc.num_requests(); ++r) {
    const auto& first_path = instance.paths[path_index.at(instance.requests[r].paths.front())];
    const std::size_t m = part.link_domain[link_index.at(first_path.links.front())];
    part.request_domain[r] = m;
    part.domain_requests[m].push_back(r);
  }
  return part;
}

Partition single_domain(const Instance& instance, const Incidence& inc) {
  return derive_partition(instance, inc, std::vector<std::size_t>(inc.num_links(), 0), 1);
}

Partition partition_domains(const Instance& instance, const Incidence& inc,
                            std::size_t num_domains, std::uint64_t seed) {
  const std::size_t n = inc.num_links();
  if (num_domains == 0 || num_domains > std::max<std::size_t>(n, 1)) {
    throw PartitionError(fmt::format("cannot split {} links into {} domains", n, num_domains));
  }
  if (num_domains == 1) return single_domain(instance, inc);

  const auto adj = link_adjacency(instance);

  // Connected components of the link adjacency.
  std::vector<std::size_t> component(n, kNone);
  std::vector<std::vector<std::size_t>> components;
  for (std::size_t s = 0; s < n; ++s) {
    if (component[s] != kNone) continue;
    components.emplace_back();
    std::vector<std::size_t> queue{s};
    component[s] = components.size() - 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t v : adj[queue[head]]) {
        if (component[v] == kNone) {
          component[v] = components.size() - 1;
          queue.push_back(v);
        }
      }
    }
    std::sort(queue.begin(), queue.end());
    components.back() = std::move(queue);
  }
  if (num_domains < components.size()) {
    throw PartitionError(fmt::format(
        "{} domains cannot cover {} disconnected link components", num_domains,
        components.size()));
  }

  // Domains per component: one each, the rest by largest remainder.
  std::vector<std::size_t> share(components.size(), 1);
  {
    std::size_t left = num_domains - components.size();
    while (left > 0) {
      std::size_t best = kNone;
      double best_load = -1.0;
      for (std::size_t c = 0; c < components.size(); ++c) {
        if (share[c] >= components[c].size()) continue;
        const double load = static_cast<double>(components[c].size()) / share[c];
        if (load > best_load) {
          best_load = load;
          best = c;
        }
      }
      if (best == kNone) break;
      ++share[best];
      --left;
    }
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> target;
  std::vector<std::size_t> seeds;
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& links = components[c];
    const std::size_t k = share[c];
    for (std::size_t i = 0; i < k; ++i) target.push_back(links.size() / k + (i < links.size() % k));
    std::uniform_int_distribution<std::size_t> pick(0, links.size() - 1);
    std::vector<std::size_t> chosen{links[pick(rng)]};
    while (chosen.size() < k) {
      const auto dist = bfs_distances(adj, chosen);
      std::size_t far = kNone;
      for (std::size_t l : links) {
        if (std::find(chosen.begin(), chosen.end(), l) != chosen.end()) continue;
        if (far == kNone || dist[l] > dist[far]) far = l;
      }
      chosen.push_back(far);
    }
    seeds.insert(seeds.end(), chosen.begin(), chosen.end());
  }
  const std::size_t M = seeds.size();

  // Region growing: the most under-filled domain claims its closest
  // frontier link.
  std::vector<std::size_t> link_domain(n, kNone);
  std::vector<std::size_t> size(M, 0);
  std::vector<std::vector<std::size_t>> seed_dist(M);
  std::vector<std::set<std::pair<std::size_t, std::size_t>>> frontier(M);
  std::size_t unassigned = n;
  auto claim = [&](std::size_t d, std::size_t l) {
    link_domain[l] = d;
    ++size[d];
    --unassigned;
    for (std::size_t v : adj[l]) {
      if (link_domain[v] == kNone) frontier[d].insert({seed_dist[d][v], v});
    }
  };
  for (std::size_t d = 0; d < M; ++d) seed_dist[d] = bfs_distances(adj, {seeds[d]});
  for (std::size_t d = 0; d < M; ++d) claim(d, seeds[d]);

  while (unassigned > 0) {
    std::size_t best = kNone;
    long best_key = 0;
    for (std::size_t d = 0; d < M; ++d) {
      auto& f = frontier[d];
      while (!f.empty() && link_domain[f.begin()->second] != kNone) f.erase(f.begin());
      if (f.empty()) continue;
      const long key = static_cast<long>(size[d]) - static_cast<long>(target[d]);
      if (best == kNone || key < best_key) {
        best = d;
        best_key = key;
      }
    }
    if (best == kNone) throw PartitionError("region growing stalled");
    const std::size_t l = frontier[best].begin()->second;
    frontier[best].erase(frontier[best].begin());
    claim(best, l);
  }

  // Rebalancing: move boundary links along chains of adjacent domains from
  // a domain above its target to one below it.
  std::vector<std::vector<std::size_t>> members(M);
  for (std::size_t l = 0; l < n; ++l) members[link_domain[l]].push_back(l);
  const std::size_t max_rounds = 4 * n + 16;
  for (std::size_t round = 0; round < max_rounds; ++round) {
    bool balanced = true;
    for (std::size_t d = 0; d < M; ++d) balanced = balanced && size[d] == target[d];
    if (balanced) break;

    // move_link[a][b]: a link of a adjacent to b that a can give away.
    std::vector<std::vector<std::size_t>> move_link(M, std::vector<std::size_t>(M, kNone));
    for (std::size_t a = 0; a < M; ++a) {
      for (std::size_t l : removable_links(members[a], link_domain, a, adj)) {
        for (std::size_t v : adj[l]) {
          const std::size_t b = link_domain[v];
          if (b != a && move_link[a][b] == kNone) move_link[a][b] = l;
        }
      }
    }
    std::vector<std::size_t> prev(M, kNone);
    std::vector<char> seen(M, 0);
    std::vector<std::size_t> queue;
    for (std::size_t d = 0; d < M; ++d) {
      if (size[d] > target[d]) {
        seen[d] = 1;
        queue.push_back(d);
      }
    }
    std::size_t sink = kNone;
    for (std::size_t head = 0; head < queue.size() && sink == kNone; ++head) {
      const std::size_t a = queue[head];
      for (std::size_t b = 0; b < M; ++b) {
        if (seen[b] || move_link[a][b] == kNone) continue;
        seen[b] = 1;
        prev[b] = a;
        if (size[b] < target[b]) {
          sink = b;
          break;
        }
        queue.push_back(b);
      }
    }
    if (sink == kNone) break;

    std::vector<std::size_t> chain{sink};
    while (prev[chain.back()] != kNone) chain.push_back(prev[chain.back()]);
    std::reverse(chain.begin(), chain.end());
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const std::size_t a = chain[i];
      const std::size_t b = chain[i + 1];
      std::size_t pick = kNone;
      for (std::size_t l : removable_links(members[a], link_domain, a, adj)) {
        if (std::any_of(adj[l].begin(), adj[l].end(),
                        [&](std::size_t v) { return link_domain[v] == b; })) {
          pick = l;
          break;
        }
      }
      if (pick == kNone) break;
      link_domain[pick] = b;
      members[a].erase(std::find(members[a].begin(), members[a].end(), pick));
      members[b].insert(std::lower_bound(members[b].begin(), members[b].end(), pick), pick);
      --size[a];
      ++size[b];
    }
  }

  return derive_partition(instance, inc, std::move(link_domain), M);
}

bool domains_connected(const Partition& partition,
                       const std::vector<std::vector<std::size_t>>& adjacency) {
  for (std::size_t m = 0; m < partition.num_domains; ++m) {
    const auto& links = partition.domain_links[m];
    if (links.empty()) continue;
    std::vector<char> seen(adjacency.size(), 0);
    std::vector<std::size_t> queue{links.front()};
    seen[links.front()] = 1;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      for (std::size_t v : adjacency[queue[head]]) {
        if (!seen[v] && partition.link_domain[v] == m) {
          seen[v] = 1;
          queue.push_back(v);
        }
      }
    }
    if (queue.size() != links.size()) return false;
  }
  return true;
}

}  // namespace fairshare
