#include "fairshare/topology.h"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <fmt/core.h>

namespace fairshare {

std::vector<std::vector<std::size_t>> Graph::adjacency() const {
  std::vector<std::vector<std::size_t>> adj(num_nodes());
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

Graph generate_barabasi_albert(std::size_t num_nodes, std::size_t min_degree,
                               std::uint64_t seed, SeedCore core) {
  if (min_degree < 1 || num_nodes <= min_degree) {
    throw std::invalid_argument(fmt::format(
        "barabasi-albert needs num_nodes > min_degree >= 1 (got {} and {})", num_nodes,
        min_degree));
  }
  Graph g;
  g.names.reserve(num_nodes);
  for (std::size_t i = 0; i < num_nodes; ++i) g.names.push_back(fmt::format("n{}", i));

  std::mt19937_64 rng(seed);
  // Every node appears once per incident edge, so uniform draws from this
  // list are degree-proportional.
  std::vector<std::size_t> repeated;
  std::vector<std::size_t> targets;
  std::size_t next = 0;
  if (core == SeedCore::kComplete) {
    for (std::size_t u = 0; u <= min_degree; ++u) {
      for (std::size_t v = u + 1; v <= min_degree; ++v) {
        g.edges.emplace_back(u, v);
        repeated.push_back(u);
        repeated.push_back(v);
      }
    }
    next = min_degree + 1;
  } else {
    for (std::size_t u = 0; u < min_degree; ++u) targets.push_back(u);
    next = min_degree;
  }

  for (std::size_t source = next; source < num_nodes; ++source) {
    if (source != next || core == SeedCore::kComplete) {
      std::set<std::size_t> chosen;
      std::uniform_int_distribution<std::size_t> pick(0, repeated.size() - 1);
      while (chosen.size() < min_degree) chosen.insert(repeated[pick(rng)]);
      targets.assign(chosen.begin(), chosen.end());
    }
    for (std::size_t t : targets) {
      g.edges.emplace_back(std::min(source, t), std::max(source, t));
      repeated.push_back(t);
      repeated.push_back(source);
    }
  }
  return g;
}

FatTree generate_fat_tree(std::size_t pods) {
  if (pods < 2 || pods % 2 != 0) {
    throw std::invalid_argument(fmt::format("fat tree needs an even pod count >= 2 (got {})", pods));
  }
  const std::size_t half = pods / 2;
  FatTree t;
  t.pods = pods;
  auto add = [&](std::string name) {
    t.graph.names.push_back(std::move(name));
    return t.graph.names.size() - 1;
  };
  auto connect = [&](std::size_t u, std::size_t v) {
    t.graph.edges.emplace_back(std::min(u, v), std::max(u, v));
  };

  for (std::size_t i = 0; i < half; ++i) {
    for (std::size_t j = 0; j < half; ++j) t.core.push_back(add(fmt::format("c{}_{}", i, j)));
  }
  for (std::size_t pod = 0; pod < pods; ++pod) {
    std::vector<std::size_t> aggs;
    std::vector<std::size_t> edges;
    for (std::size_t i = 0; i < half; ++i) aggs.push_back(add(fmt::format("a{}_{}", pod, i)));
    for (std::size_t i = 0; i < half; ++i) edges.push_back(add(fmt::format("e{}_{}", pod, i)));
    for (std::size_t i = 0; i < half; ++i) {
      // Aggregation switch i uplinks to core group i.
      for (std::size_t j = 0; j < half; ++j) connect(t.core[i * half + j], aggs[i]);
      for (std::size_t e : edges) connect(aggs[i], e);
    }
    for (std::size_t i = 0; i < half; ++i) {
      for (std::size_t h = 0; h < half; ++h) {
        const std::size_t s = add(fmt::format("s{}_{}_{}", pod, i, h));
        connect(edges[i], s);
        t.servers.push_back(s);
      }
    }
    t.aggregation.insert(t.aggregation.end(), aggs.begin(), aggs.end());
    t.edge.insert(t.edge.end(), edges.begin(), edges.end());
  }
  t.root = add("root");
  for (std::size_t c : t.core) connect(c, t.root);
  return t;
}

Instance make_network(const Graph& graph, double capacity, LinkMode mode, double alpha) {
  Instance inst;
  inst.alpha = alpha;
  inst.directed = mode == LinkMode::kDirected;
  inst.nodes = graph.names;
  for (auto [u, v] : graph.edges) {
    if (mode == LinkMode::kUndirected) {
      inst.links.push_back({graph.names[u] + "-" + graph.names[v], capacity, u, v});
    } else {
      inst.links.push_back({graph.names[u] + ">" + graph.names[v], capacity, u, v});
      inst.links.push_back({graph.names[v] + ">" + graph.names[u], capacity, v, u});
    }
  }
  return inst;
}

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

using NodePath = std::vector<std::size_t>;

// Hop-count path search with lexicographic tie-breaking over the
// instance's topology.
class PathFinder {
 public:
  explicit PathFinder(const Instance& net)
      : n_(net.nodes.size()), num_links_(net.links.size()), out_(n_), in_(n_) {
    for (std::size_t j = 0; j < net.links.size(); ++j) {
      const auto& l = net.links[j];
      if (!l.from || !l.to) {
        throw std::invalid_argument("path search needs link endpoints (link " + l.id + ")");
      }
      out_[*l.from].push_back({*l.to, j});
      in_[*l.to].push_back({*l.from, j});
      if (!net.directed) {
        out_[*l.to].push_back({*l.from, j});
        in_[*l.from].push_back({*l.to, j});
      }
    }
    for (auto* adj : {&out_, &in_}) {
      for (auto& a : *adj) std::sort(a.begin(), a.end());
    }
  }

  std::size_t link_between(std::size_t u, std::size_t v) const {
    for (const auto& arc : out_[u]) {
      if (arc.to == v) return arc.link;
    }
    throw std::logic_error("no link between consecutive path nodes");
  }

  // Lexicographically smallest among the shortest s->t paths avoiding the
  // blocked nodes and links. Empty when t is unreachable.
  NodePath shortest(std::size_t s, std::size_t t, const std::vector<char>& blocked_node,
                    const std::vector<char>& blocked_link) const {
    std::vector<std::size_t> dist(n_, kUnreached);
    std::vector<std::size_t> queue{t};
    dist[t] = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const std::size_t v = queue[head];
      for (const auto& arc : in_[v]) {
        if (blocked_link[arc.link] || blocked_node[arc.to] || dist[arc.to] != kUnreached) continue;
        dist[arc.to] = dist[v] + 1;
        queue.push_back(arc.to);
      }
    }
    if (dist[s] == kUnreached) return {};
    NodePath path{s};
    std::size_t u = s;
    while (u != t) {
      for (const auto& arc : out_[u]) {
        if (!blocked_link[arc.link] && !blocked_node[arc.to] && dist[arc.to] + 1 == dist[u]) {
          u = arc.to;
          break;
        }
      }
      path.push_back(u);
    }
    return path;
  }

  // Yen's algorithm.
  std::vector<NodePath> k_shortest(std::size_t s, std::size_t t, std::size_t k) const {
    std::vector<char> blocked_node(n_, 0);
    std::vector<char> blocked_link(num_links_, 0);
    std::vector<NodePath> accepted;
    if (k == 0 || s == t) return accepted;
    NodePath first = shortest(s, t, blocked_node, blocked_link);
    if (first.empty()) return accepted;
    accepted.push_back(std::move(first));

    auto shorter = [](const NodePath& a, const NodePath& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    };
    std::set<NodePath, decltype(shorter)> candidates(shorter);

    while (accepted.size() < k) {
      const NodePath& last = accepted.back();
      for (std::size_t i = 0; i + 1 < last.size(); ++i) {
        std::fill(blocked_node.begin(), blocked_node.end(), 0);
        std::fill(blocked_link.begin(), blocked_link.end(), 0);
        for (const auto& p : accepted) {
          if (p.size() > i + 1 && std::equal(p.begin(), p.begin() + i + 1, last.begin())) {
            blocked_link[link_between(p[i], p[i + 1])] = 1;
          }
        }
        for (std::size_t q = 0; q < i; ++q) blocked_node[last[q]] = 1;
        NodePath spur = shortest(last[i], t, blocked_node, blocked_link);
        if (spur.empty()) continue;
        NodePath total(last.begin(), last.begin() + i);
        total.insert(total.end(), spur.begin(), spur.end());
        if (std::find(accepted.begin(), accepted.end(), total) == accepted.end()) {
          candidates.insert(std::move(total));
        }
      }
      if (candidates.empty()) break;
      accepted.push_back(*candidates.begin());
      candidates.erase(candidates.begin());
    }
    return accepted;
  }

 private:
  struct Arc {
    std::size_t to;
    std::size_t link;
    auto operator<=>(const Arc&) const = default;
  };

  std::size_t n_;
  std::size_t num_links_;
  std::vector<std::vector<Arc>> out_;
  std::vector<std::vector<Arc>> in_;
};

void append_request(Instance& net, const PathFinder& finder, std::size_t s, std::size_t t,
                    std::size_t k, double weight) {
  const auto node_paths = finder.k_shortest(s, t, k);
  if (node_paths.empty()) {
    throw std::runtime_error(fmt::format("no path between {} and {}", net.nodes[s], net.nodes[t]));
  }
  Request req;
  req.id = fmt::format("r{}", net.requests.size());
  req.weight = weight;
  req.source_node = net.nodes[s];
  req.target_node = net.nodes[t];
  for (std::size_t q = 0; q < node_paths.size(); ++q) {
    Path path;
    path.id = fmt::format("{}.p{}", req.id, q);
    const auto& np = node_paths[q];
    for (std::size_t i = 0; i + 1 < np.size(); ++i) {
      path.links.push_back(net.links[finder.link_between(np[i], np[i + 1])].id);
    }
    req.paths.push_back(path.id);
    net.paths.push_back(std::move(path));
  }
  net.requests.push_back(std::move(req));
}

}  // namespace

std::vector<std::vector<std::size_t>> k_shortest_paths(const Instance& network,
                                                       std::size_t source,
                                                       std::size_t target, std::size_t k) {
  if (source >= network.nodes.size() || target >= network.nodes.size()) {
    throw std::out_of_range("path endpoint out of range");
  }
  return PathFinder(network).k_shortest(source, target, k);
}

void generate_requests(Instance& network, const RequestGenParams& params) {
  if (network.nodes.size() < 2) {
    throw std::invalid_argument("request generation needs a topology with >= 2 nodes");
  }
  if (params.min_paths < 1 || params.max_paths < params.min_paths) {
    throw std::invalid_argument("paths-per-request range must satisfy 1 <= min <= max");
  }
  const PathFinder finder(network);
  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> node(0, network.nodes.size() - 1);
  std::uniform_int_distribution<std::size_t> paths(params.min_paths, params.max_paths);
  for (std::size_t i = 0; i < params.count; ++i) {
    const std::size_t s = node(rng);
    std::size_t t = node(rng);
    while (t == s) t = node(rng);
    append_request(network, finder, s, t, paths(rng), params.weight);
  }
}

void generate_fat_tree_requests(Instance& network, const FatTree& tree,
                                std::size_t paths_per_request, std::uint64_t seed,
                                double weight) {
  if (tree.servers.size() < 2) throw std::invalid_argument("fat tree needs >= 2 servers");
  const PathFinder finder(network);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> other(0, tree.servers.size() - 2);
  for (std::size_t i = 0; i < tree.servers.size(); ++i) {
    const std::size_t s = tree.servers[i];
    append_request(network, finder, s, tree.root, paths_per_request, weight);
    append_request(network, finder, s, tree.root, paths_per_request, weight);
    std::size_t d = other(rng);
    if (d >= i) ++d;
    append_request(network, finder, s, tree.servers[d], paths_per_request, weight);
  }
}

}  // namespace fairshare
