#include <doctest.h>

#include <algorithm>
#include <deque>
#include <set>

#include "fairshare/topology.h"
#include "fixtures.h"

using namespace fairshare;

namespace {

bool connected(const Graph& g) {
  const auto adj = g.adjacency();
  std::vector<char> seen(g.num_nodes(), 0);
  std::deque<std::size_t> queue{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        queue.push_back(v);
      }
    }
  }
  return count == g.num_nodes();
}

bool simple(const Graph& g) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (auto [a, b] : g.edges) {
    if (a >= b) return false;
    if (!seen.insert({a, b}).second) return false;
  }
  return true;
}

// Every simple path from s to t, by exhaustive search.
void all_paths(const std::vector<std::vector<std::size_t>>& adj, std::size_t u, std::size_t t,
               std::vector<std::size_t>& stack, std::vector<char>& on, std::vector<std::vector<std::size_t>>& out) {
  if (u == t) {
    out.push_back(stack);
    return;
  }
  for (std::size_t v : adj[u]) {
    if (on[v]) continue;
    on[v] = 1;
    stack.push_back(v);
    all_paths(adj, v, t, stack, on, out);
    stack.pop_back();
    on[v] = 0;
  }
}

}  // namespace

TEST_CASE("Barabasi-Albert edge counts and shape") {
  for (std::uint64_t seed : {0u, 1u, 7u}) {
    const auto g = generate_barabasi_albert(50, 4, seed);
    CHECK(g.num_nodes() == 50);
    CHECK(g.edges.size() == 4 * 5 / 2 + (50 - 5) * 4);
    CHECK(connected(g));
    CHECK(simple(g));
    const auto e = generate_barabasi_albert(50, 4, seed, SeedCore::kEmpty);
    CHECK(e.edges.size() == (50 - 4) * 4);
    CHECK(connected(e));
    CHECK(simple(e));
  }
}

TEST_CASE("smallest Barabasi-Albert graph is the complete seed core") {
  const auto g = generate_barabasi_albert(5, 4, 3);
  CHECK(g.edges.size() == 10);
}

TEST_CASE("Barabasi-Albert is deterministic under the seed") {
  CHECK(generate_barabasi_albert(50, 4, 9) == generate_barabasi_albert(50, 4, 9));
  CHECK_FALSE(generate_barabasi_albert(50, 4, 9) == generate_barabasi_albert(50, 4, 10));
}

TEST_CASE("directed Barabasi-Albert reproduces the published resource count") {
  const auto g = generate_barabasi_albert(500, 4, 1, SeedCore::kEmpty);
  const auto net = make_network(g, 1.0, LinkMode::kDirected);
  CHECK(net.links.size() == 3968);
}

TEST_CASE("invalid Barabasi-Albert sizes throw") {
  CHECK_THROWS(generate_barabasi_albert(4, 4, 0));
  CHECK_THROWS(generate_barabasi_albert(10, 0, 0));
}

TEST_CASE("fat tree counts match the construction formula") {
  for (std::size_t k : {2u, 4u, 6u, 8u}) {
    CAPTURE(k);
    const auto t = generate_fat_tree(k);
    CHECK(t.core.size() == k * k / 4);
    CHECK(t.aggregation.size() == k * k / 2);
    CHECK(t.edge.size() == k * k / 2);
    CHECK(t.servers.size() == k * k * k / 4);
    CHECK(t.graph.num_nodes() == k * k / 4 + k * k + k * k * k / 4 + 1);
    CHECK(t.graph.edges.size() == 3 * k * k * k / 4 + k * k / 4);
    CHECK(connected(t.graph));
    CHECK(simple(t.graph));
    // Degrees by brute force: every switch has k ports, servers one, the
    // root one per core switch.
    std::vector<std::size_t> degree(t.graph.num_nodes(), 0);
    for (auto [a, b] : t.graph.edges) {
      ++degree[a];
      ++degree[b];
    }
    CHECK(degree[t.root] == t.core.size());
    for (std::size_t c : t.core) CHECK(degree[c] == k + 1);
    for (std::size_t a : t.aggregation) CHECK(degree[a] == k);
    for (std::size_t e : t.edge) CHECK(degree[e] == k);
    for (std::size_t s : t.servers) CHECK(degree[s] == 1);
  }
}

TEST_CASE("fat tree sizes from the evaluation") {
  CHECK(generate_fat_tree(4).graph.num_nodes() == 37);
  const auto t = generate_fat_tree(16);
  CHECK(t.graph.num_nodes() == 1345);
  CHECK(make_network(t.graph, 1.0).links.size() == 3136);
  CHECK_THROWS(generate_fat_tree(3));
  CHECK_THROWS(generate_fat_tree(0));
}

TEST_CASE("k shortest paths match exhaustive enumeration") {
  const auto g = generate_barabasi_albert(9, 2, 4);
  const auto net = make_network(g, 1.0);
  const auto adj = g.adjacency();
  for (std::size_t s = 0; s < 9; ++s) {
    for (std::size_t t = 0; t < 9; ++t) {
      if (s == t) continue;
      std::vector<std::vector<std::size_t>> every;
      std::vector<std::size_t> stack{s};
      std::vector<char> on(9, 0);
      on[s] = 1;
      all_paths(adj, s, t, stack, on, every);
      std::sort(every.begin(), every.end(), [](const auto& a, const auto& b) {
        return a.size() != b.size() ? a.size() < b.size() : a < b;
      });
      for (std::size_t k : {1u, 3u, 6u}) {
        const auto got = k_shortest_paths(net, s, t, k);
        const std::vector<std::vector<std::size_t>> want(
            every.begin(), every.begin() + static_cast<std::ptrdiff_t>(std::min(k, every.size())));
        CHECK(got == want);
      }
    }
  }
}

TEST_CASE("generated requests use valid paths between their endpoints") {
  auto net = make_network(generate_barabasi_albert(30, 4, 2), 10.0);
  generate_requests(net, {25, 1, 4, 1.0, 8});
  CHECK(validate(net).empty());
  CHECK(net.requests.size() == 25);
  for (const auto& r : net.requests) {
    CHECK(r.paths.size() >= 1);
    CHECK(r.paths.size() <= 4);
    CHECK(r.source_node != r.target_node);
  }
}

TEST_CASE("single request with one path takes a shortest path") {
  const auto g = generate_barabasi_albert(30, 4, 6);
  auto net = make_network(g, 10.0);
  generate_requests(net, {1, 1, 1, 1.0, 3});
  REQUIRE(net.requests.size() == 1);
  REQUIRE(net.paths.size() == 1);
  const auto& r = net.requests[0];
  const auto s = static_cast<std::size_t>(std::find(net.nodes.begin(), net.nodes.end(), r.source_node) -
                                          net.nodes.begin());
  const auto t = static_cast<std::size_t>(std::find(net.nodes.begin(), net.nodes.end(), r.target_node) -
                                          net.nodes.begin());
  // BFS distance as the oracle.
  const auto adj = g.adjacency();
  std::vector<std::size_t> dist(g.num_nodes(), SIZE_MAX);
  std::deque<std::size_t> queue{s};
  dist[s] = 0;
  while (!queue.empty()) {
    const auto u = queue.front();
    queue.pop_front();
    for (auto v : adj[u]) {
      if (dist[v] == SIZE_MAX) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
    }
  }
  CHECK(net.paths[0].links.size() == dist[t]);
}

TEST_CASE("request generation is deterministic") {
  auto a = make_network(generate_barabasi_albert(30, 4, 2), 10.0);
  auto b = a;
  generate_requests(a, {20, 1, 4, 1.0, 5});
  generate_requests(b, {20, 1, 4, 1.0, 5});
  CHECK(a == b);
}

TEST_CASE("path totals at the Barabasi-Albert evaluation scale") {
  auto net = make_network(generate_barabasi_albert(500, 4, 1), 1.0);
  generate_requests(net, {5000, 2, 4, 1.0, 1});
  // k uniform in {2,3,4} puts the mean at 15000, the top of the published
  // band; allow a few standard deviations (about 58 paths) above it.
  CHECK(net.paths.size() >= 11000);
  CHECK(net.paths.size() <= 15150);
}

TEST_CASE("fat tree workload") {
  const auto tree = generate_fat_tree(4);
  auto net = make_network(tree.graph, 1.0);
  generate_fat_tree_requests(net, tree, 2, 3);
  CHECK(validate(net).empty());
  CHECK(net.requests.size() == 3 * tree.servers.size());
  std::size_t to_root = 0;
  for (const auto& r : net.requests) {
    if (r.target_node == net.nodes[tree.root]) ++to_root;
  }
  CHECK(to_root == 2 * tree.servers.size());
}
