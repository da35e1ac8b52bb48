#ifndef FAIRSHARE_INSTANCE_IO_H_
#define FAIRSHARE_INSTANCE_IO_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairshare/instance.h"
#include "fairshare/partition.h"

namespace fairshare {

// Malformed or schema-violating document. what() starts with the JSON
// pointer of the offending element, e.g. "/links/3/capacity: ...".
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

std::string instance_to_json(const Instance& instance);
Instance instance_from_json(const std::string& text);

void write_instance(const Instance& instance, const std::filesystem::path& file);
Instance read_instance(const std::filesystem::path& file);

// Partition documents carry num_domains and a link id -> domain map; the
// derived sets are rebuilt from the instance on load.
std::string partition_to_json(const Instance& instance, const Partition& partition);
Partition partition_from_json(const std::string& text, const Instance& instance,
                              const Incidence& inc);

void write_partition(const Instance& instance, const Partition& partition,
                     const std::filesystem::path& file);
Partition read_partition(const std::filesystem::path& file, const Instance& instance,
                         const Incidence& inc);

// Path allocations as {"x": {path id: value}}.
std::string allocation_to_json(const Instance& instance, const std::vector<double>& x);
std::vector<double> allocation_from_json(const std::string& text, const Instance& instance);

std::string read_text(const std::filesystem::path& file);
void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace fairshare

#endif  // FAIRSHARE_INSTANCE_IO_H_
