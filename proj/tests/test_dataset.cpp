// Copyright 2026 The firstint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "doctest.h"

#include "firstint/dataset.hpp"
#include "firstint/digest.hpp"
#include "firstint/notation.hpp"
#include "known_systems.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace firstint;
using vars::t;
using vars::x;
using vars::y;

namespace {

const OdeSystem kOscillator = OdeSystem::planar(y(), -x());

// Small, fast, distinct records: x' = y, y' = -k x with V = k x^2 + y^2.
std::vector<DatasetRecord> oscillators(int n, SourceTag tag = SourceTag::BwdSyn) {
  std::vector<DatasetRecord> out;
  for (int k = 1; k <= n; ++k) {
    OdeSystem s = OdeSystem::planar(y(), num(-k) * x());
    out.push_back(make_record(s, {num(k) * pow(x(), num(2)) + pow(y(), num(2))}, tag));
  }
  return out;
}

std::set<std::string> ids(const std::vector<DatasetRecord>& rs) {
  std::set<std::string> out;
  for (const auto& r : rs) out.insert(r.id);
  return out;
}

}  // namespace

TEST_CASE("canonical id") {
  const Expr v = pow(x(), num(2)) + pow(y(), num(2));
  std::string id = canonical_id(kOscillator, {v});
  CHECK(id.size() == 64);
  // Same content after simplification, different spelling.
  CHECK(canonical_id(OdeSystem::planar(y() + num(0), num(-1) * x()), {pow(y(), num(2)) + x() * x()}) == id);
  CHECK(canonical_id(kOscillator, {v * num(2)}) != id);
  // Oracle: the digest of the documented serialization.
  CHECK(id == sha256_hex("x' = y\ny' = - 0 x\nV = + ^ x 2 ^ y 2\n"));
  // Integral order does not matter.
  OdeSystem lr = OdeSystem::planar(parse_polish(testing::kLogRatio.f), parse_polish(testing::kLogRatio.g));
  Expr a = parse_polish(testing::kLogRatio.integral), b = parse_polish("+ + ^ x 2 x * 2 y");
  CHECK(canonical_id(lr, {a, b}) == canonical_id(lr, {b, a}));
}

TEST_CASE("record write/read round trip") {
  BatchConfig cfg;
  cfg.count = 40;
  cfg.master_seed = 9;
  BatchResult b = generate_batch(cfg);
  std::vector<DatasetRecord> recs;
  for (const auto& p : b.pairs) recs.push_back(make_record(p, SourceTag::BwdBase));
  recs.push_back(make_record(sample_family(FamilyParams{9, 9, 7, 2, 2, 5}), {}, SourceTag::Fwd));

  std::stringstream buf;
  write_records(buf, recs);
  const std::string text = buf.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(recs.size()));
  CHECK(text.rfind("{\"id\":", 0) == 0);
  auto back = read_records(buf);
  CHECK(back == recs);

  // Fixed key order.
  const std::string first = text.substr(0, text.find('\n'));
  CHECK(first.find("\"id\"") < first.find("\"system\""));
  CHECK(first.find("\"system\"") < first.find("\"integrals\""));
  CHECK(first.find("\"integrals\"") < first.find("\"meta\""));
  CHECK(first.find("\"meta\"") < first.find("\"source_tag\""));

  const Json meta = back[0].meta;
  CHECK(meta["seed"].get<std::uint64_t>() == b.pairs[0].meta.seed);
  CHECK(meta["sampler_digest"] == SamplerConfig{}.digest());
  CHECK(meta["integral_stats"].size() == 1);

  // Every stored integral re-verifies against its stored system.
  for (const auto& r : back)
    for (const Expr& v : integrals_of(r)) CHECK(verify_first_integral(v, system_of(r)).verdict);
}

TEST_CASE("empty and malformed record files") {
  std::stringstream empty;
  CHECK(read_records(empty).empty());

  std::stringstream good;
  write_records(good, oscillators(3));
  std::string lines = good.str();
  std::string bad = lines;
  bad.insert(lines.find('\n') + 1, "{\"id\": \"x\", \"system\": [\"y\"]}\n");
  std::stringstream in(bad);
  try {
    read_records(in);
    FAIL("expected MalformedRecord");
  } catch (const MalformedRecord& e) {
    CHECK(e.line() == 2);
  }

  std::stringstream garbage("not json\n");
  CHECK_THROWS_AS(read_records(garbage), MalformedRecord);

  // An expression that parses but is not in printed form.
  Json j = to_json(oscillators(1)[0]);
  j["integrals"][0] = "+ ^ x 2 ^ y 2 ";
  CHECK_THROWS_AS(record_from_json(j, 1), MalformedRecord);
  j = to_json(oscillators(1)[0]);
  j["integrals"][0] = "+ x w";
  CHECK_THROWS_AS(record_from_json(j, 1), MalformedRecord);
  j = to_json(oscillators(1)[0]);
  j["source_tag"] = "synthetic";
  CHECK_THROWS_AS(record_from_json(j, 1), MalformedRecord);
}

TEST_CASE("record files and manifests on disk") {
  auto dir = std::filesystem::temp_directory_path() / "firstint_test_dataset";
  std::filesystem::create_directories(dir);
  auto path = dir / "records.jsonl";
  auto recs = oscillators(5);
  write_records(path, recs);
  CHECK(read_records(path) == recs);
  write_manifest(path, Json{{"seed", 1}});
  CHECK(manifest_path(path).filename() == "records.jsonl.manifest.json");
  CHECK(std::filesystem::exists(manifest_path(path)));
  std::filesystem::remove_all(dir);
}

TEST_CASE("dedup") {
  auto recs = oscillators(4);
  DedupResult same = dedup(recs);
  CHECK(same.records == recs);
  CHECK(same.removed == 0);

  // A syntactic variant of the first record under another tag.
  DatasetRecord variant = make_record(OdeSystem::planar(y(), num(0) - x()), {pow(y(), num(2)) + x() * x()},
                                      SourceTag::External);
  CHECK(variant.system[1] != recs[0].system[1]);
  recs.push_back(variant);
  DedupResult d = dedup(recs);
  CHECK(d.records.size() == 4);
  CHECK(d.removed == 1);
  CHECK(d.records[0].source_tag == SourceTag::BwdSyn);
  REQUIRE(d.notes.size() == 1);
  CHECK(d.notes[0].find("kept bwd_syn") != std::string::npos);
}

TEST_CASE("split") {
  auto recs = oscillators(100);
  SplitResult s = split(recs, {{"train", 0.9}, {"valid", 0.1}}, 3);
  CHECK(s.manifest.counts == std::vector<std::size_t>{90, 10});
  CHECK(s.parts[0].size() == 90);
  CHECK(s.parts[1].size() == 10);
  auto a = ids(s.parts[0]), b = ids(s.parts[1]);
  for (const auto& id : b) CHECK_FALSE(a.count(id));

  SplitResult again = split(recs, {{"train", 0.9}, {"valid", 0.1}}, 3);
  CHECK(again.parts == s.parts);
  SplitResult other = split(recs, {{"train", 0.9}, {"valid", 0.1}}, 4);
  CHECK(other.parts != s.parts);

  // Largest remainder, ties to the earlier split.
  SplitResult one = split(oscillators(1), {{"a", 0.5}, {"b", 0.5}}, 1);
  CHECK(one.manifest.counts == std::vector<std::size_t>{1, 0});
  SplitResult three = split(oscillators(7), {{"a", 0.2}, {"b", 0.3}, {"c", 0.5}}, 1);
  // 1.4, 2.1, 3.5 -> 1, 2, 3 plus one for c.
  CHECK(three.manifest.counts == std::vector<std::size_t>{1, 2, 4});

  CHECK_THROWS_AS(split(recs, {{"a", 0.5}, {"b", 0.4}}, 1), std::invalid_argument);
  CHECK_THROWS_AS(split(recs, {{"a", 1.5}, {"b", -0.5}}, 1), std::invalid_argument);

  Json m = s.manifest.to_json();
  CHECK(m["seed"] == 3);
  CHECK(m["splits"][0]["count"] == 90);
}

TEST_CASE("split drops duplicates and reserved test ids") {
  auto recs = oscillators(20);
  auto dup = recs;
  dup.insert(dup.end(), recs.begin(), recs.begin() + 5);
  std::set<std::string> reserved{recs[0].id, recs[7].id};
  SplitResult s = split(dup, {{"train", 1.0}}, 1, reserved);
  CHECK(s.manifest.dedup_removed == 5);
  CHECK(s.manifest.excluded == 2);
  CHECK(s.parts[0].size() == 18);
  for (const auto& r : s.parts[0]) CHECK_FALSE(reserved.count(r.id));
}

TEST_CASE("blend") {
  auto base = oscillators(343, SourceTag::BwdSyn);
  std::vector<DatasetRecord> fwd;
  Rng rng(2);
  for (int i = 0; i < 70; ++i) fwd.push_back(make_record(sample_family(rng), {}, SourceTag::Fwd));

  CHECK(blend(base, fwd, 0, 1).size() == base.size());
  CHECK(ids(blend(base, fwd, 0, 1)) == ids(base));

  // 2% of a 343-record target: 7 forward records.
  auto mixed = blend(base, fwd, 0.02, 1);
  CHECK(mixed.size() == 343);
  long n_fwd = std::count_if(mixed.begin(), mixed.end(), [](const auto& r) { return r.source_tag == SourceTag::Fwd; });
  CHECK(std::labs(n_fwd - 7) <= 1);
  CHECK(blend(base, fwd, 0.02, 1) == mixed);

  auto small = oscillators(10);
  auto all = blend(small, fwd, 1.0, 5);
  CHECK(all.size() == 10);
  for (const auto& r : all) CHECK(r.source_tag == SourceTag::Fwd);

  CHECK_THROWS_AS(blend(base, fwd, 0.5, 1), InsufficientExtras);
  CHECK_THROWS_AS(blend(base, fwd, 1.5, 1), std::invalid_argument);

  for (double a : {0.05, 0.1, 0.13, 0.2}) {
    auto m = blend(base, fwd, a, 9);
    long k = std::count_if(m.begin(), m.end(), [](const auto& r) { return r.source_tag == SourceTag::Fwd; });
    CHECK(std::fabs(static_cast<double>(k) - a * 343) <= 1);
  }
}

TEST_CASE("make_testset") {
  BatchConfig cfg;
  cfg.master_seed = 21;
  CHECK(make_testset(TestsetKind::Normal, 0, cfg).records.empty());

  auto n1 = make_testset(TestsetKind::Normal, 20, cfg);
  auto n2 = make_testset(TestsetKind::Normal, 20, cfg);
  CHECK(n1.records == n2.records);
  CHECK(n1.records.size() == 20);

  auto hard = make_testset(TestsetKind::Hard, 60, cfg);
  CHECK(hard.records.size() == 60);
  CHECK(hard.predicate_rejections > 0);
  for (const auto& r : hard.records) {
    CHECK(r.meta["testset"] == "hard");
    for (const Expr& v : integrals_of(r)) {
      ExprStats st = stats(v);
      CHECK(st.has_t);
      CHECK(st.has_nonlinear_op);
    }
  }

  BatchConfig tiny = cfg;
  tiny.max_attempts = 1;
  CHECK_THROWS_AS(make_testset(TestsetKind::Hard, 20, tiny), TestsetBudgetExhausted);
}

TEST_CASE("reward batch records") {
  Json in = {{"system", {"y", "- 0 x"}},
             {"references", {"+ ^ x 2 ^ y 2"}},
             {"candidates", {"+ ^ x 2 ^ y 2", "+ ^ x 2 ^ y 3", "+ x w", "+ x y t"}}};
  Json out = score_reward_record(in, RewardConfig{});
  REQUIRE(out["scores"].size() == 4);
  CHECK(out["scores"][0]["reward"] == 100.0);
  CHECK(out["scores"][0]["branch"] == "verified");
  CHECK(out["scores"][1]["branch"] == "shaped");
  CHECK(out["scores"][1]["L"] == 1);
  CHECK(out["scores"][2]["reward"] == -1.0);
  CHECK(out["scores"][3]["E_k"] == 1);
  CHECK(out["candidates"] == in["candidates"]);
  CHECK_THROWS_AS(score_reward_record(Json{{"system", {"y"}}}, RewardConfig{}), std::invalid_argument);
}
