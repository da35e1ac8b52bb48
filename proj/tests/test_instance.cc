#include <doctest.h>

#include <algorithm>
#include <filesystem>

#include "fairshare/instance.h"
#include "fairshare/instance_io.h"
#include "fixtures.h"

using namespace fairshare;
using fairshare::testing::linear_instance;

namespace {

bool has_kind(const ValidationReport& report, const std::string& kind) {
  return std::any_of(report.begin(), report.end(), [&](const Violation& v) { return v.kind == kind; });
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("fairshare_test_" + name);
}

}  // namespace

TEST_CASE("linear instance is well formed") { CHECK(validate(linear_instance()).empty()); }

TEST_CASE("zero capacity is reported") {
  auto inst = linear_instance();
  inst.links[0].capacity = 0.0;
  const auto report = validate(inst);
  REQUIRE(report.size() == 1);
  CHECK(report[0].kind == "nonpositive capacity");
  CHECK(report[0].subject == "j1");
}

TEST_CASE("dangling link id is reported") {
  auto inst = linear_instance();
  inst.paths[1].links.push_back("nowhere");
  CHECK(has_kind(validate(inst), "dangling link id"));
}

TEST_CASE("structural violations") {
  SUBCASE("alpha") {
    auto inst = linear_instance();
    inst.alpha = 0.0;
    CHECK(has_kind(validate(inst), "nonpositive alpha"));
  }
  SUBCASE("weight") {
    auto inst = linear_instance();
    inst.requests[2].weight = -1.0;
    CHECK(has_kind(validate(inst), "nonpositive weight"));
  }
  SUBCASE("empty path") {
    auto inst = linear_instance();
    inst.paths[2].links.clear();
    CHECK(has_kind(validate(inst), "empty path"));
  }
  SUBCASE("repeated link on a path") {
    auto inst = linear_instance();
    inst.paths[0].links = {"j1", "j1"};
    CHECK(has_kind(validate(inst), "repeated link"));
  }
  SUBCASE("shared path") {
    auto inst = linear_instance();
    inst.requests[2].paths = {"p1"};
    CHECK(has_kind(validate(inst), "shared path"));
  }
  SUBCASE("orphan path") {
    auto inst = linear_instance();
    inst.paths.push_back({"p9", {"j1"}});
    CHECK(has_kind(validate(inst), "orphan path"));
  }
  SUBCASE("dangling path id") {
    auto inst = linear_instance();
    inst.requests[0].paths.push_back("p9");
    CHECK(has_kind(validate(inst), "dangling path id"));
  }
  SUBCASE("duplicate id") {
    auto inst = linear_instance();
    inst.links[1].id = "j1";
    CHECK(has_kind(validate(inst), "duplicate id"));
  }
}

TEST_CASE("incidence follows the link lists") {
  const auto inst = linear_instance();
  const auto inc = build_incidence(inst);
  CHECK(inc.link_to_paths[0] == std::vector<std::size_t>{0, 1});
  CHECK(inc.link_to_paths[1] == std::vector<std::size_t>{0, 2});
  CHECK(inc.path_to_links[0] == std::vector<std::size_t>{0, 1});
  CHECK(inc.request_to_paths[1] == std::vector<std::size_t>{1});
  CHECK(inc.path_to_request == std::vector<std::size_t>{0, 1, 2});
  CHECK(inc.multiplicity(0) == 3);
  CHECK(inc.multiplicity(1) == 2);
}

TEST_CASE("incidence of multi-path request and unused link") {
  auto inst = fairshare::testing::two_path_instance(3.0, 5.0);
  inst.links.push_back({"idle", 1.0, {}, {}});
  const auto inc = build_incidence(inst);
  CHECK(inc.request_to_paths[0] == std::vector<std::size_t>{0, 1});
  CHECK(inc.link_to_paths[2].empty());
}

TEST_CASE("incidence is consistent with an independent scan") {
  const auto inst = fairshare::testing::random_instance(5);
  const auto inc = build_incidence(inst);
  for (std::size_t j = 0; j < inst.links.size(); ++j) {
    for (std::size_t p = 0; p < inst.paths.size(); ++p) {
      const auto& ls = inst.paths[p].links;
      const bool uses = std::find(ls.begin(), ls.end(), inst.links[j].id) != ls.end();
      const auto& row = inc.link_to_paths[j];
      CHECK(uses == std::binary_search(row.begin(), row.end(), p));
    }
  }
  CHECK(build_incidence(inst).link_to_paths == inc.link_to_paths);
}

TEST_CASE("build_incidence rejects invalid instances") {
  auto inst = linear_instance();
  inst.links[1].capacity = -2.0;
  CHECK_THROWS_AS(build_incidence(inst), InvalidInstance);
}

TEST_CASE("loads, aggregates and slack") {
  const auto inst = linear_instance();
  const auto inc = build_incidence(inst);
  const std::vector<double> x{0.25, 0.5, 0.75};
  CHECK(link_loads(inc, x) == std::vector<double>{0.75, 1.0});
  CHECK(aggregates(inc, x) == std::vector<double>{0.25, 0.5, 0.75});
  CHECK(min_capacity_slack(inst, inc, x) == doctest::Approx(0.0));
}

TEST_CASE("instance round trip through a file") {
  const auto inst = fairshare::testing::random_instance(11, 20, 10, 2.5);
  const auto file = temp_file("roundtrip.json");
  write_instance(inst, file);
  CHECK(read_instance(file) == inst);
  std::filesystem::remove(file);
  CHECK(instance_from_json(instance_to_json(linear_instance())) == linear_instance());
}

TEST_CASE("missing capacity names the field") {
  const std::string doc = R"({"alpha": 1, "links": [{"id": "j1"}], "paths": [], "requests": []})";
  try {
    instance_from_json(doc);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).rfind("/links/0/capacity", 0) == 0);
  }
}

TEST_CASE("malformed documents") {
  CHECK_THROWS_AS(instance_from_json("{not json"), FormatError);
  CHECK_THROWS_AS(instance_from_json(R"({"alpha": "one", "links": [], "paths": [], "requests": []})"),
                  FormatError);
}

TEST_CASE("alpha written as integer parses exactly") {
  const std::string doc = R"({"alpha": 1, "links": [{"id": "j", "capacity": 2}],
    "paths": [{"id": "p", "links": ["j"]}], "requests": [{"id": "r", "weight": 1, "paths": ["p"]}]})";
  const auto inst = instance_from_json(doc);
  CHECK(inst.alpha == 1.0);
  CHECK(inst.links[0].capacity == 2.0);
}

TEST_CASE("doubles survive serialization bit for bit") {
  auto inst = linear_instance(0.1 + 0.2);
  inst.links[0].capacity = 1.0 / 3.0;
  inst.requests[0].weight = 2.0 / 7.0;
  const auto back = instance_from_json(instance_to_json(inst));
  CHECK(back.alpha == inst.alpha);
  CHECK(back.links[0].capacity == inst.links[0].capacity);
  CHECK(back.requests[0].weight == inst.requests[0].weight);
}

TEST_CASE("allocation documents") {
  const auto inst = linear_instance();
  const std::vector<double> x{1.0 / 3.0, 2.0 / 3.0, 0.5};
  CHECK(allocation_from_json(allocation_to_json(inst, x), inst) == x);
  CHECK_THROWS_AS(allocation_from_json(R"({"x": {"p0": 1}})", inst), FormatError);
}
