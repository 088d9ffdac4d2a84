#include <set>

#include "doctest.h"
#include "maintminer/dataset.hpp"
#include "maintminer/random.hpp"

using namespace maintminer;
using namespace maintminer::dataset;

namespace {

std::vector<LabeledCommit> synthetic(std::size_t c, std::size_t p, std::size_t a, std::uint64_t seed = 1) {
  Rng rng(seed);
  std::vector<LabeledCommit> out;
  auto add = [&](Activity label, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      LabeledCommit x;
      x.project = "p" + std::to_string(uniform_index(rng, 4));
      x.commit_id = std::string(to_string(label)).substr(0, 1) + std::to_string(i);
      x.label = label;
      x.message = "message, with \"quotes\" " + std::to_string(i);
      x.change_counts[uniform_index(rng, kChangeTypeCount)] = static_cast<std::int64_t>(uniform_index(rng, 5));
      out.push_back(x);
    }
  };
  add(Activity::Corrective, c);
  add(Activity::Perfective, p);
  add(Activity::Adaptive, a);
  shuffle(out, rng);
  return out;
}

}  // namespace

TEST_CASE("long-form load aggregates rows per commit") {
  const char* text =
      "project,commit_id,label,message,change_type,count\n"
      "camel,abc,c,\"Fix NPE, again\",STATEMENT_INSERT,2\n"
      "camel,abc,c,\"Fix NPE, again\",statement_updated,1\n"
      "camel,def,perfective,Refactor,,\n"
      "camel,ghi,x,bad label,STATEMENT_INSERT,1\n";
  auto r = parse_labeled_dataset(text);
  REQUIRE(r.commits.size() == 2);
  CHECK(r.commits[0].commit_id == "abc");
  CHECK(r.commits[0].message == "Fix NPE, again");
  CHECK(r.commits[0].change_counts[index_of(ChangeType::STATEMENT_INSERT)] == 2);
  CHECK(r.commits[0].change_counts[index_of(ChangeType::STATEMENT_UPDATE)] == 1);
  CHECK(r.commits[1].label == Activity::Perfective);
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].line == 5);
  CHECK(r.errors[0].message.find("'x'") != std::string::npos);
  CHECK(r.class_counts == std::array<std::size_t, 3>{0, 1, 1});
}

TEST_CASE("wide-form load with aliased columns") {
  const char* text =
      "repo,commitId,class,comment,Statement_Insert,ADDITIONAL_FUNCTIONALITY,other\n"
      "hadoop,1,a,Add support,1,2,zz\n"
      "hadoop,2,p,Cleanup,0,,zz\n";
  auto r = parse_labeled_dataset(text);
  REQUIRE(r.commits.size() == 2);
  CHECK(r.commits[0].project == "hadoop");
  CHECK(r.commits[0].label == Activity::Adaptive);
  CHECK(r.commits[0].change_counts[index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)] == 2);
  CHECK(r.commits[1].change_counts[index_of(ChangeType::STATEMENT_INSERT)] == 0);
}

TEST_CASE("schema and row errors") {
  CHECK_THROWS_AS(parse_labeled_dataset(""), SchemaError);
  CHECK_THROWS_AS(parse_labeled_dataset("project,commit_id,message\n"), SchemaError);
  CHECK_THROWS_AS(parse_labeled_dataset("commit_id,label,message,change_type\n"), SchemaError);
  CHECK_THROWS_AS(parse_labeled_dataset("commit_id,label,message\n1,x,m\n2,q,m\n"), RowErrors);
  auto header_only = parse_labeled_dataset("commit_id,label,message\n");
  CHECK(header_only.commits.empty());
}

TEST_CASE("long-form round trip is lossless") {
  auto data = synthetic(30, 20, 10);
  data[0].change_counts.fill(0);
  data[1].message = "multi\nline";
  auto back = parse_labeled_dataset(to_long_form(data));
  CHECK(back.errors.empty());
  CHECK(back.commits == data);
}

TEST_CASE("stratified split is a seeded partition with ceiling per class") {
  auto data = synthetic(500, 404, 247);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto s = stratified_split(data, {0.85, seed});
    CHECK(s.train.size() + s.test.size() == data.size());
    std::array<std::size_t, 3> train{}, test{};
    std::set<std::string> ids;
    for (auto& c : s.train) {
      ++train[index_of(c.label)];
      ids.insert(c.commit_id);
    }
    for (auto& c : s.test) {
      ++test[index_of(c.label)];
      CHECK_FALSE(ids.count(c.commit_id));
    }
    // Class order adaptive, corrective, perfective.
    CHECK(train == std::array<std::size_t, 3>{210, 425, 344});
    CHECK(test == std::array<std::size_t, 3>{37, 75, 60});
  }
  auto a = stratified_split(data, {0.85, 7}), b = stratified_split(data, {0.85, 7});
  CHECK(a.train == b.train);
  CHECK(stratified_split(data, {1.0, 3}).test.empty());
  CHECK_THROWS_AS(stratified_split(synthetic(5, 5, 0), {0.85, 1}), StratifyError);
  CHECK_THROWS_AS(stratified_split(data, {0.0, 1}), ArgError);
}

TEST_CASE("per-class train count stays within one of the exact share") {
  for (std::size_t n = 1; n < 400; ++n) {
    for (double f : {0.5, 0.7, 0.85, 0.9}) {
      const double exact = f * static_cast<double>(n);
      const auto t = train_count(n, f);
      CHECK(static_cast<double>(t) >= std::floor(exact - 1e-9));
      CHECK(static_cast<double>(t) <= std::ceil(exact + 1e-9));
    }
  }
}

TEST_CASE("worked 68-coordinate example") {
  LabeledCommit c;
  c.message = "Refactored blob logic into separate methods";
  c.change_counts[index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)] = 2;
  c.change_counts[index_of(ChangeType::STATEMENT_UPDATE)] = 1;
  const auto& vocab = text::Vocabulary::defaults();
  auto combined = assemble_features(c, Encoding::Combined68);
  REQUIRE(combined.size() == 68);
  CHECK(combined(20 + index_of(ChangeType::ADDITIONAL_FUNCTIONALITY)) == 2);
  CHECK(combined(20 + index_of(ChangeType::STATEMENT_UPDATE)) == 1);
  CHECK(combined(vocab.index_of("refactor")) == 1);
  CHECK(combined(vocab.index_of("method")) == 1);
  CHECK(combined.sum() == 5);
  auto kw = assemble_features(c, Encoding::Keywords20);
  CHECK(kw.size() == 20);
  CHECK(kw.sum() == 2);
  LabeledCommit empty;
  for (auto e : kAllEncodings) CHECK(assemble_features(empty, e).isZero());
}

TEST_CASE("combined encoding is the concatenation of the other two") {
  for (const auto& c : synthetic(40, 40, 40, 3)) {
    auto comb = assemble_features(c, Encoding::Combined68);
    CHECK(comb.head(20) == assemble_features(c, Encoding::Keywords20));
    CHECK(comb.tail(48) == assemble_features(c, Encoding::Changes48));
  }
  auto names = feature_names(Encoding::Combined68);
  CHECK(names.size() == 68);
  CHECK(names[0] == "add");
  CHECK(names[20] == "ADDING_ATTRIBUTE_MODIFIABILITY");
}

TEST_CASE("feature matrix and jsonl") {
  auto data = synthetic(3, 2, 1);
  auto m = assemble_matrix(data, Encoding::Changes48);
  CHECK(m.x.rows() == 6);
  CHECK(m.x.cols() == 48);
  auto jsonl = to_features_jsonl(data, Encoding::Keywords20);
  CHECK(std::count(jsonl.begin(), jsonl.end(), '\n') == 6);
  CHECK(jsonl.find("\"encoding\":\"KEYWORDS_20\"") != std::string::npos);
}
