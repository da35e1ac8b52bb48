#ifndef FAIRSHARE_PARTITION_H_
#define FAIRSHARE_PARTITION_H_

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fairshare/instance.h"

namespace fairshare {

// Assignment of links to domains with the derived per-domain path and
// request sets. All sets are sorted index lists.
struct Partition {
  std::size_t num_domains = 1;
  std::vector<std::size_t> link_domain;                 // J_m membership
  std::vector<std::vector<std::size_t>> domain_links;   // J_m
  std::vector<std::vector<std::size_t>> domain_paths;   // P_m: paths with a link in J_m
  std::vector<std::vector<std::size_t>> domain_requests;  // R_m
  std::vector<std::size_t> request_domain;              // m(r)

  bool operator==(const Partition&) const = default;
};

class PartitionError : public std::runtime_error {
 public:
  explicit PartitionError(const std::string& what) : std::runtime_error(what) {}
};

// Completes a partition from a link -> domain map. A request originates in
// the domain owning the first link of its first path (that link touches the
// request's source node).
Partition derive_partition(const Instance& instance, const Incidence& inc,
                           std::vector<std::size_t> link_domain, std::size_t num_domains);

Partition single_domain(const Instance& instance, const Incidence& inc);

// Link adjacency used for connectivity: links sharing an endpoint when the
// instance carries topology, otherwise links that are consecutive on some
// path.
std::vector<std::vector<std::size_t>> link_adjacency(const Instance& instance);

// Splits the links into M connected domains of near-equal size by seeded
// multi-source region growing followed by a rebalancing pass. Heuristic:
// sizes end within +-1 whenever the moves it tries allow it. Throws
// PartitionError when M > |J| or M is smaller than the number of connected
// components of the link adjacency.
Partition partition_domains(const Instance& instance, const Incidence& inc,
                            std::size_t num_domains, std::uint64_t seed);

// True when every domain induces a connected link subgraph.
bool domains_connected(const Partition& partition,
                       const std::vector<std::vector<std::size_t>>& adjacency);

}  // namespace fairshare

#endif  // FAIRSHARE_PARTITION_H_
