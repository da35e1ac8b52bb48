#ifndef FAIRSHARE_TOPOLOGY_H_
#define FAIRSHARE_TOPOLOGY_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fairshare/instance.h"

namespace fairshare {

// Simple undirected graph; edges are stored with the lower index first.
struct Graph {
  std::vector<std::string> names;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  std::size_t num_nodes() const { return names.size(); }
  std::vector<std::vector<std::size_t>> adjacency() const;
  bool operator==(const Graph&) const = default;
};

enum class SeedCore {
  // The first min_degree + 1 nodes form a clique.
  kComplete,
  // min_degree isolated nodes; the first arriving node links to all of
  // them. Yields exactly (n - m) * m edges.
  kEmpty,
};

// Preferential attachment: every node after the seed core attaches
// min_degree edges to distinct existing nodes, chosen with probability
// proportional to degree. Pure function of the arguments.
Graph generate_barabasi_albert(std::size_t num_nodes, std::size_t min_degree,
                               std::uint64_t seed, SeedCore core = SeedCore::kComplete);

struct FatTree {
  Graph graph;
  std::size_t pods = 0;
  std::size_t root = 0;
  std::vector<std::size_t> core;
  std::vector<std::size_t> aggregation;
  std::vector<std::size_t> edge;
  std::vector<std::size_t> servers;
};

// k-ary fat tree (k = pods) plus a root node attached to every core switch.
FatTree generate_fat_tree(std::size_t pods);

enum class LinkMode { kUndirected, kDirected };

// Turns a graph into a request-free instance with uniform capacity.
// Undirected links are named "u-v", directed ones "u>v".
Instance make_network(const Graph& graph, double capacity,
                      LinkMode mode = LinkMode::kUndirected, double alpha = 1.0);

// Up to k loop-free paths from source to target in order of hop count,
// ties broken by lexicographic node sequence. Works on the instance's
// topology metadata and respects Instance::directed. Returns node sequences.
std::vector<std::vector<std::size_t>> k_shortest_paths(const Instance& network,
                                                       std::size_t source,
                                                       std::size_t target, std::size_t k);

struct RequestGenParams {
  std::size_t count = 1;
  std::size_t min_paths = 1;
  std::size_t max_paths = 1;
  double weight = 1.0;
  std::uint64_t seed = 0;
};

// Appends `count` requests with uniformly drawn distinct endpoints and
// k-shortest paths, k uniform in [min_paths, max_paths]. Throws
// std::runtime_error when a pair of endpoints is disconnected.
void generate_requests(Instance& network, const RequestGenParams& params);

// Fat-tree workload: per server, two requests towards the root and one
// towards another uniformly drawn server, each with `paths_per_request`
// paths.
void generate_fat_tree_requests(Instance& network, const FatTree& tree,
                                std::size_t paths_per_request, std::uint64_t seed,
                                double weight = 1.0);

}  // namespace fairshare

#endif  // FAIRSHARE_TOPOLOGY_H_
