#ifndef FAIRSHARE_INSTANCE_H_
#define FAIRSHARE_INSTANCE_H_

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fairshare {

// A capacity resource. Endpoints are optional topology metadata; when
// present they index into Instance::nodes.
struct Link {
  std::string id;
  double capacity = 0.0;
  std::optional<std::size_t> from;
  std::optional<std::size_t> to;

  bool operator==(const Link&) const = default;
};

// Ordered list of link ids. Paths are private to a single request.
struct Path {
  std::string id;
  std::vector<std::string> links;

  bool operator==(const Path&) const = default;
};

struct Request {
  std::string id;
  double weight = 1.0;
  std::vector<std::string> paths;
  std::string source_node;  // empty when no topology metadata
  std::string target_node;

  bool operator==(const Request&) const = default;
};

// Network links, established paths and requests plus the fairness exponent.
// References between entities are by id so that malformed documents can be
// represented and reported by validate().
struct Instance {
  double alpha = 1.0;
  // Directed mode: every topology edge carries one link per direction.
  bool directed = false;
  std::vector<std::string> nodes;
  std::vector<Link> links;
  std::vector<Path> paths;
  std::vector<Request> requests;

  bool has_topology() const { return !nodes.empty(); }
  bool operator==(const Instance&) const = default;
};

struct Violation {
  std::string kind;     // e.g. "nonpositive capacity"
  std::string subject;  // offending id
  std::string detail;
};

using ValidationReport = std::vector<Violation>;

// Lists every structural problem of the instance; empty means well-formed.
ValidationReport validate(const Instance& instance);

std::string describe(const ValidationReport& report);

class InvalidInstance : public std::runtime_error {
 public:
  explicit InvalidInstance(const std::string& what) : std::runtime_error(what) {}
};

// Index-resolved incidence structures (rows of A and B). All indices refer
// to positions in the owning Instance's vectors; inner lists are sorted.
struct Incidence {
  std::vector<std::vector<std::size_t>> link_to_paths;
  std::vector<std::vector<std::size_t>> request_to_paths;
  std::vector<std::vector<std::size_t>> path_to_links;
  std::vector<std::size_t> path_to_request;

  std::size_t num_links() const { return link_to_paths.size(); }
  std::size_t num_paths() const { return path_to_links.size(); }
  std::size_t num_requests() const { return request_to_paths.size(); }

  // |J_p| + 1: one copy per link plus the source-domain copy.
  std::size_t multiplicity(std::size_t path) const {
    return path_to_links[path].size() + 1;
  }
};

// Throws InvalidInstance when validate() reports anything.
Incidence build_incidence(const Instance& instance);

// A x with A the link-path incidence.
std::vector<double> link_loads(const Incidence& inc, const std::vector<double>& x);
// B x with B the request-path incidence.
std::vector<double> aggregates(const Incidence& inc, const std::vector<double>& x);

// min_j (c_j - (A x)_j); +inf when there are no links.
double min_capacity_slack(const Instance& instance, const Incidence& inc,
                          const std::vector<double>& x);

}  // namespace fairshare

#endif  // FAIRSHARE_INSTANCE_H_
