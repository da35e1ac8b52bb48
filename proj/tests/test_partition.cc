#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>

#include "fairshare/instance_io.h"
#include "fairshare/partition.h"
#include "fixtures.h"

using namespace fairshare;

namespace {

// Derived sets recomputed from the link map alone.
void check_derived(const Instance& inst, const Incidence& inc, const Partition& part) {
  std::vector<std::size_t> all;
  for (std::size_t m = 0; m < part.num_domains; ++m) {
    for (std::size_t j : part.domain_links[m]) {
      CHECK(part.link_domain[j] == m);
      all.push_back(j);
    }
    std::vector<std::size_t> paths;
    for (std::size_t p = 0; p < inc.num_paths(); ++p) {
      for (std::size_t j : inc.path_to_links[p]) {
        if (part.link_domain[j] == m) {
          paths.push_back(p);
          break;
        }
      }
    }
    CHECK(part.domain_paths[m] == paths);
  }
  std::sort(all.begin(), all.end());
  std::vector<std::size_t> expect(inst.links.size());
  for (std::size_t j = 0; j < expect.size(); ++j) expect[j] = j;
  CHECK(all == expect);
  std::set<std::size_t> requests;
  for (std::size_t m = 0; m < part.num_domains; ++m) {
    for (std::size_t r : part.domain_requests[m]) {
      CHECK(requests.insert(r).second);
      CHECK(part.request_domain[r] == m);
      std::size_t p = 0;
      while (inst.paths[p].id != inst.requests[r].paths.front()) ++p;
      const auto& first_link = inst.paths[p].links.front();
      std::size_t j = 0;
      while (inst.links[j].id != first_link) ++j;
      CHECK(part.link_domain[j] == m);
    }
  }
  CHECK(requests.size() == inc.num_requests());
}

}  // namespace

TEST_CASE("single domain holds everything") {
  const auto inst = fairshare::testing::random_instance(3);
  const auto inc = build_incidence(inst);
  const auto part = partition_domains(inst, inc, 1, 0);
  CHECK(part.num_domains == 1);
  CHECK(part.domain_links[0].size() == inst.links.size());
  CHECK(part.domain_paths[0].size() == inst.paths.size());
  CHECK(part.domain_requests[0].size() == inst.requests.size());
  CHECK(part == single_domain(inst, inc));
}

TEST_CASE("two links in a row split one per domain") {
  const auto inst = fairshare::testing::linear_instance();
  const auto inc = build_incidence(inst);
  const auto part = partition_domains(inst, inc, 2, 5);
  CHECK(part.domain_links[0].size() == 1);
  CHECK(part.domain_links[1].size() == 1);
  CHECK(domains_connected(part, link_adjacency(inst)));
  check_derived(inst, inc, part);
}

TEST_CASE("four domains on BA(50,4) are connected and balanced") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    CAPTURE(seed);
    const auto inst = fairshare::testing::random_instance(seed, 50, 60);
    const auto inc = build_incidence(inst);
    const auto part = partition_domains(inst, inc, 4, seed);
    CHECK(domains_connected(part, link_adjacency(inst)));
    std::size_t lo = SIZE_MAX, hi = 0;
    for (const auto& links : part.domain_links) {
      lo = std::min(lo, links.size());
      hi = std::max(hi, links.size());
    }
    CHECK(hi - lo <= 1);
    check_derived(inst, inc, part);
  }
}

TEST_CASE("many domains stay connected") {
  const auto inst = fairshare::testing::random_instance(4, 50, 60);
  const auto inc = build_incidence(inst);
  for (std::size_t m : {2u, 8u, 16u, 32u}) {
    CAPTURE(m);
    const auto part = partition_domains(inst, inc, m, 1);
    CHECK(part.num_domains == m);
    CHECK(domains_connected(part, link_adjacency(inst)));
    for (const auto& links : part.domain_links) CHECK_FALSE(links.empty());
    check_derived(inst, inc, part);
  }
}

TEST_CASE("partitioning is deterministic under the seed") {
  const auto inst = fairshare::testing::random_instance(8);
  const auto inc = build_incidence(inst);
  CHECK(partition_domains(inst, inc, 4, 2) == partition_domains(inst, inc, 4, 2));
}

TEST_CASE("too many domains") {
  const auto inst = fairshare::testing::linear_instance();
  const auto inc = build_incidence(inst);
  CHECK_THROWS_AS(partition_domains(inst, inc, 3, 0), PartitionError);
  CHECK_THROWS_AS(partition_domains(inst, inc, 0, 0), PartitionError);
}

TEST_CASE("partition file round trip") {
  const auto inst = fairshare::testing::random_instance(6);
  const auto inc = build_incidence(inst);
  const auto part = partition_domains(inst, inc, 4, 6);
  const auto file = std::filesystem::temp_directory_path() / "fairshare_test_partition.json";
  write_partition(inst, part, file);
  CHECK(read_partition(file, inst, inc) == part);
  std::filesystem::remove(file);
  CHECK_THROWS_AS(partition_from_json(R"({"num_domains": 2, "link_domain": {}})", inst, inc), FormatError);
}
