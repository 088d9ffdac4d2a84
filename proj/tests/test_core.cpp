#include <algorithm>
#include <set>
#include <stdexcept>

#include "doctest.h"
#include "maintminer/activity.hpp"
#include "maintminer/change_type.hpp"
#include "maintminer/csv.hpp"
#include "maintminer/parallel.hpp"
#include "maintminer/random.hpp"
#include "maintminer/resources.hpp"
#include "maintminer/strings.hpp"

using namespace maintminer;

TEST_CASE("change type manifest matches the shipped data file") {
  CHECK(change_type_manifest() == std::string(resources::change_types));
  auto names = resource_lines(resources::change_types);
  REQUIRE(names.size() == kChangeTypeCount);
  CHECK(std::is_sorted(names.begin(), names.end()));
  for (std::size_t i = 0; i < kChangeTypeCount; ++i) {
    CHECK(to_string(change_type_at(i)) == names[i]);
    CHECK(parse_change_type(names[i]) == change_type_at(i));
  }
}

TEST_CASE("change type names include the fourteen used in the analysis") {
  for (const char* n : {"STATEMENT_INSERT", "STATEMENT_UPDATE", "STATEMENT_DELETE", "ADDITIONAL_FUNCTIONALITY",
                        "REMOVED_FUNCTIONALITY", "ADDITIONAL_CLASS", "REMOVED_CLASS", "ADDITIONAL_OBJECT_STATE",
                        "REMOVED_OBJECT_STATE", "ALTERNATIVE_PART_INSERT", "DOC_UPDATE", "DOC_DELETE",
                        "COMMENT_INSERT", "PARAMETER_INSERT"}) {
    CHECK(parse_change_type(n).has_value());
  }
}

TEST_CASE("change type aliases") {
  CHECK(parse_change_type("statement_updated") == ChangeType::STATEMENT_UPDATE);
  CHECK(parse_change_type("UNCLASSIFIED_CHANGE") == ChangeType::UNKNOWN);
  CHECK(parse_change_type("parameter_insert") == ChangeType::PARAMETER_INSERT);
  CHECK_FALSE(parse_change_type("NOT_A_TYPE"));
}

TEST_CASE("manifest hash is FNV-1a of the manifest") {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : std::string(resources::change_types)) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  CHECK(change_type_manifest_hash() == h);
}

TEST_CASE("activity tokens") {
  CHECK(parse_activity("C") == Activity::Corrective);
  CHECK(parse_activity(" perfective ") == Activity::Perfective);
  CHECK(parse_activity("a") == Activity::Adaptive);
  CHECK_FALSE(parse_activity("x"));
  CHECK(to_string(Activity::Adaptive) == "adaptive");
}

TEST_CASE("csv round trip with quoting") {
  std::vector<csv::Row> rows{{"a", "b,c", "say \"hi\""}, {"multi\nline", "", "x"}};
  std::string text;
  for (auto& r : rows) text += csv::format_row(r);
  std::vector<std::size_t> lines;
  auto parsed = csv::parse(text, &lines);
  CHECK(parsed == rows);
  CHECK(lines == std::vector<std::size_t>{1, 2});
  CHECK(csv::parse("h1,h2\r\n1,2\r\n\r\n3,4") == std::vector<csv::Row>{{"h1", "h2"}, {"1", "2"}, {"3", "4"}});
}

TEST_CASE("dates are UTC days") {
  CHECK(parse_date("1970-01-02") == 86400);
  CHECK(iso_date(parse_date("2016-02-29")) == "2016-02-29");
  CHECK(parse_date("1234") == 1234);
}

TEST_CASE("uniform_index stays in range and shuffle is a permutation") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) CHECK(uniform_index(rng, 3) < 3);
  std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
  shuffle(v, rng);
  CHECK(std::set<int>(v.begin(), v.end()).size() == 8);
  Rng a(42), b(42);
  std::vector<int> x{1, 2, 3, 4, 5}, y = x;
  shuffle(x, a);
  shuffle(y, b);
  CHECK(x == y);
}

TEST_CASE("parallel_for fills every slot and rethrows") {
  std::vector<int> out(100, 0);
  parallel_for(out.size(), [&](std::size_t i) { out[i] = static_cast<int>(i) * 2; });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i) * 2);
  CHECK_THROWS(parallel_for(10, [](std::size_t i) {
    if (i == 3) throw std::runtime_error("boom");
  }));
}
