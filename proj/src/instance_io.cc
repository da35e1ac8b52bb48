#include "fairshare/instance_io.h"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace fairshare {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw FormatError(where + ": " + what);
}

const json& field(const json& obj, const std::string& where, const char* key) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where + "/" + key, "missing required field");
  return *it;
}

const json& array_field(const json& obj, const std::string& where, const char* key) {
  const json& v = field(obj, where, key);
  if (!v.is_array()) fail(where + "/" + key, "expected an array");
  return v;
}

std::string string_at(const json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) fail(where, "expected a number");
  return v.get<double>();
}

std::string string_field(const json& obj, const std::string& where, const char* key) {
  return string_at(field(obj, where, key), where + "/" + key);
}

double number_field(const json& obj, const std::string& where, const char* key) {
  return number_at(field(obj, where, key), where + "/" + key);
}

std::vector<std::string> string_list(const json& obj, const std::string& where, const char* key) {
  const json& arr = array_field(obj, where, key);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(string_at(arr[i], where + "/" + key + "/" + std::to_string(i)));
  }
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("/: malformed document: ") + e.what());
  }
}

}  // namespace

std::string instance_to_json(const Instance& instance) {
  json doc;
  doc["alpha"] = instance.alpha;
  doc["directed"] = instance.directed;
  doc["nodes"] = instance.nodes;
  json links = json::array();
  json edges = json::array();
  for (const auto& l : instance.links) {
    links.push_back({{"id", l.id}, {"capacity", l.capacity}});
    if (l.from && l.to) {
      edges.push_back({{"link", l.id},
                       {"from", instance.nodes.at(*l.from)},
                       {"to", instance.nodes.at(*l.to)}});
    }
  }
  doc["links"] = std::move(links);
  doc["edges"] = std::move(edges);
  json paths = json::array();
  for (const auto& p : instance.paths) paths.push_back({{"id", p.id}, {"links", p.links}});
  doc["paths"] = std::move(paths);
  json requests = json::array();
  for (const auto& r : instance.requests) {
    json item = {{"id", r.id}, {"weight", r.weight}, {"paths", r.paths}};
    if (!r.source_node.empty()) item["source_node"] = r.source_node;
    if (!r.target_node.empty()) item["target_node"] = r.target_node;
    requests.push_back(std::move(item));
  }
  doc["requests"] = std::move(requests);
  return doc.dump(1) + "\n";
}

Instance instance_from_json(const std::string& text) {
  const json doc = parse(text);
  if (!doc.is_object()) fail("", "expected a top-level object");
  Instance inst;
  inst.alpha = number_field(doc, "", "alpha");
  if (auto it = doc.find("directed"); it != doc.end()) {
    if (!it->is_boolean()) fail("/directed", "expected a boolean");
    inst.directed = it->get<bool>();
  }
  if (doc.contains("nodes")) inst.nodes = string_list(doc, "", "nodes");

  const json& links = array_field(doc, "", "links");
  for (std::size_t i = 0; i < links.size(); ++i) {
    const std::string where = "/links/" + std::to_string(i);
    inst.links.push_back(
        {string_field(links[i], where, "id"), number_field(links[i], where, "capacity"), {}, {}});
  }

  if (doc.contains("edges")) {
    std::unordered_map<std::string, std::size_t> node_index;
    for (std::size_t i = 0; i < inst.nodes.size(); ++i) node_index[inst.nodes[i]] = i;
    std::unordered_map<std::string, std::size_t> link_index;
    for (std::size_t j = 0; j < inst.links.size(); ++j) link_index[inst.links[j].id] = j;
    const json& edges = array_field(doc, "", "edges");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const std::string where = "/edges/" + std::to_string(i);
      const std::string link = string_field(edges[i], where, "link");
      const std::string from = string_field(edges[i], where, "from");
      const std::string to = string_field(edges[i], where, "to");
      auto l = link_index.find(link);
      if (l == link_index.end()) fail(where + "/link", "unknown link '" + link + "'");
      auto f = node_index.find(from);
      if (f == node_index.end()) fail(where + "/from", "unknown node '" + from + "'");
      auto t = node_index.find(to);
      if (t == node_index.end()) fail(where + "/to", "unknown node '" + to + "'");
      inst.links[l->second].from = f->second;
      inst.links[l->second].to = t->second;
    }
  }

  const json& paths = array_field(doc, "", "paths");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const std::string where = "/paths/" + std::to_string(i);
    inst.paths.push_back({string_field(paths[i], where, "id"), string_list(paths[i], where, "links")});
  }

  const json& requests = array_field(doc, "", "requests");
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const std::string where = "/requests/" + std::to_string(i);
    Request r;
    r.id = string_field(requests[i], where, "id");
    r.weight = number_field(requests[i], where, "weight");
    r.paths = string_list(requests[i], where, "paths");
    if (requests[i].contains("source_node")) {
      r.source_node = string_field(requests[i], where, "source_node");
    }
    if (requests[i].contains("target_node")) {
      r.target_node = string_field(requests[i], where, "target_node");
    }
    inst.requests.push_back(std::move(r));
  }
  return inst;
}

std::string partition_to_json(const Instance& instance, const Partition& partition) {
  json doc;
  doc["num_domains"] = partition.num_domains;
  json map = json::object();
  for (std::size_t j = 0; j < instance.links.size(); ++j) {
    map[instance.links[j].id] = partition.link_domain.at(j);
  }
  doc["link_domain"] = std::move(map);
  return doc.dump(1) + "\n";
}

Partition partition_from_json(const std::string& text, const Instance& instance,
                              const Incidence& inc) {
  const json doc = parse(text);
  const json& m = field(doc, "", "num_domains");
  if (!m.is_number_unsigned() || m.get<std::size_t>() == 0) {
    fail("/num_domains", "expected a positive integer");
  }
  const json& map = field(doc, "", "link_domain");
  if (!map.is_object()) fail("/link_domain", "expected an object");
  std::vector<std::size_t> link_domain(instance.links.size());
  for (std::size_t j = 0; j < instance.links.size(); ++j) {
    const std::string where = "/link_domain/" + instance.links[j].id;
    auto it = map.find(instance.links[j].id);
    if (it == map.end()) fail(where, "missing link");
    if (!it->is_number_unsigned()) fail(where, "expected a domain index");
    link_domain[j] = it->get<std::size_t>();
  }
  if (map.size() != instance.links.size()) fail("/link_domain", "contains unknown link ids");
  try {
    return derive_partition(instance, inc, std::move(link_domain), m.get<std::size_t>());
  } catch (const PartitionError& e) {
    throw FormatError(std::string("/link_domain: ") + e.what());
  }
}

std::string allocation_to_json(const Instance& instance, const std::vector<double>& x) {
  json doc;
  json paths = json::object();
  for (std::size_t p = 0; p < instance.paths.size(); ++p) paths[instance.paths[p].id] = x.at(p);
  doc["x"] = std::move(paths);
  return doc.dump(1) + "\n";
}

std::vector<double> allocation_from_json(const std::string& text, const Instance& instance) {
  const json doc = parse(text);
  const json& map = field(doc, "", "x");
  if (!map.is_object()) fail("/x", "expected an object");
  std::vector<double> x(instance.paths.size());
  for (std::size_t p = 0; p < instance.paths.size(); ++p) {
    const std::string where = "/x/" + instance.paths[p].id;
    auto it = map.find(instance.paths[p].id);
    if (it == map.end()) fail(where, "missing path");
    x[p] = number_at(*it, where);
  }
  if (map.size() != instance.paths.size()) fail("/x", "contains unknown path ids");
  return x;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << text;
}

void write_instance(const Instance& instance, const std::filesystem::path& file) {
  write_text(file, instance_to_json(instance));
}

Instance read_instance(const std::filesystem::path& file) {
  return instance_from_json(read_text(file));
}

void write_partition(const Instance& instance, const Partition& partition,
                     const std::filesystem::path& file) {
  write_text(file, partition_to_json(instance, partition));
}

Partition read_partition(const std::filesystem::path& file, const Instance& instance,
                         const Incidence& inc) {
  return partition_from_json(read_text(file), instance, inc);
}

}  // namespace fairshare
