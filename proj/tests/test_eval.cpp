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

#include "firstint/eval.hpp"
#include "known_systems.hpp"

#include <algorithm>
#include <sstream>

using namespace firstint;
using vars::t;
using vars::x;
using vars::y;

namespace {

OdeSystem system_of(const testing::KnownSystem& k) { return OdeSystem::planar(parse_polish(k.f), parse_polish(k.g)); }

CandidateSet beam(std::string id, std::initializer_list<const char*> cands) {
  CandidateSet c;
  c.system_id = std::move(id);
  for (const char* s : cands) c.candidates.push_back(tokenize(s));
  return c;
}

std::vector<DatasetRecord> generated(std::size_t n, std::uint64_t seed) {
  BatchConfig cfg;
  cfg.count = n;
  cfg.master_seed = seed;
  std::vector<DatasetRecord> out;
  for (const auto& p : generate_batch(cfg).pairs) out.push_back(make_record(p, SourceTag::BwdBase));
  return out;
}

bool contains_form(const std::vector<Expr>& vs, const Expr& target) {
  const Expr s = simplify(target);
  return std::any_of(vs.begin(), vs.end(), [&](const Expr& v) { return v == s; });
}

}  // namespace

TEST_CASE("verify_candidates") {
  const OdeSystem parabolic = system_of(testing::kParabolic);
  auto v = verify_candidates(parabolic, beam("p", {"* x y", "+ ^ x 2 y", "+ x", "+ x w"}));
  REQUIRE(v.size() == 4);
  CHECK(v[0] == CandidateVerdict::NotIntegral);
  CHECK(v[1] == CandidateVerdict::Verified);
  CHECK(v[2] == CandidateVerdict::Invalid);
  CHECK(v[3] == CandidateVerdict::Invalid);

  const OdeSystem log_ratio = system_of(testing::kLogRatio);
  for (CandidateVerdict c :
       verify_candidates(log_ratio, beam("l", {"* t log - x y", "* ^ t 2 log - x y", "* x log - x y"})))
    CHECK(c == CandidateVerdict::NotIntegral);

  CHECK_THROWS_AS(verify_candidates(parabolic, CandidateSet{"p", {}}), std::invalid_argument);

  // A tiny step budget times out the symbolic work; other candidates are unaffected.
  EvalConfig tight;
  tight.timeout = TimeoutPolicy::step_budget(5);
  auto t1 = verify_candidates(system_of(testing::kTravelingWave), beam("w", {testing::kTravelingWave.integral, "+ x"}),
                              tight);
  CHECK(t1[0] == CandidateVerdict::Timeout);
  CHECK(t1[1] == CandidateVerdict::Invalid);

  EvalConfig wall;
  wall.timeout = TimeoutPolicy::wall_clock(30);
  CHECK(verify_candidates(parabolic, beam("p", {"+ ^ x 2 y"}), wall)[0] == CandidateVerdict::Verified);
}

TEST_CASE("evaluate: ground-truth replay, empty candidates, accounting") {
  auto data = generated(60, 8);
  REQUIRE(data.size() == 60);
  EvalReport full = evaluate(data, ground_truth_candidates(data));
  CHECK(full.accuracy == 1.0);
  CHECK(full.verified_systems == 60);
  CHECK(full.verified == 60);
  CHECK(full.missing_systems == 0);

  EvalReport none = evaluate(data, {});
  CHECK(none.accuracy == 0.0);
  CHECK(none.missing_systems == 60);
  CHECK(none.candidates == 0);

  // Half the systems get a wrong candidate in front of the right one, the
  // rest only wrong or invalid candidates.
  std::vector<CandidateSet> mixed;
  for (std::size_t i = 0; i < data.size(); ++i) {
    CandidateSet c;
    c.system_id = data[i].id;
    c.candidates.push_back(tokenize("* x y"));
    if (i % 2 == 0) c.candidates.push_back(tokenize(data[i].integrals[0]));
    else c.candidates.push_back(tokenize("+ x"));
    mixed.push_back(std::move(c));
  }
  mixed.push_back(beam("not-a-system", {"x"}));
  EvalReport r = evaluate(data, mixed);
  CHECK(r.verified_systems == 30);
  CHECK(r.accuracy == static_cast<double>(r.verified_systems) / static_cast<double>(r.total_systems));
  CHECK(r.verified + r.not_integral + r.invalid + r.timeouts == r.candidates);
  CHECK(r.candidates == 120);
  CHECK(r.invalid == 30);
  CHECK(r.unknown_ids == std::vector<std::string>{"not-a-system"});
  CHECK(r.mean_tokens_per_candidate > 0);
  CHECK(r.mean_tokens_per_sample == doctest::Approx(2 * r.mean_tokens_per_candidate));

  // Beam prefixes never score higher than the full beam.
  std::vector<CandidateSet> prefix = mixed;
  for (auto& c : prefix) c.candidates.resize(1);
  CHECK(evaluate(data, prefix).accuracy <= r.accuracy);

  EvalConfig four;
  four.workers = 4;
  EvalReport r4 = evaluate(data, mixed, four);
  CHECK(r4.to_json().dump() == r.to_json().dump());
  CHECK(r.table().find("accuracy") != std::string::npos);
}

TEST_CASE("candidates file round trip") {
  std::vector<CandidateSet> sets{beam("a", {"+ x y", "* 2 x"}), beam("b", {"x"})};
  std::stringstream buf;
  write_candidates(buf, sets);
  auto back = read_candidates(buf);
  REQUIRE(back.size() == 2);
  CHECK(back[0].system_id == "a");
  CHECK(back[0].candidates == sets[0].candidates);
  CHECK(back[1].candidates == sets[1].candidates);
  std::stringstream bad("{\"system_id\": 3}\n");
  CHECK_THROWS_AS(read_candidates(bad), MalformedRecord);
}

TEST_CASE("enumerate_baseline") {
  const OdeSystem oscillator = OdeSystem::planar(y(), -x());
  EnumerateOptions opt;
  opt.max_ops = 3;
  EnumerateResult h = enumerate_baseline(oscillator, opt);
  CHECK(h.complete);
  CHECK(contains_form(h.verified, pow(x(), num(2)) + pow(y(), num(2))));
  for (const Expr& v : h.verified) CHECK(verify_first_integral(v, oscillator).verdict);

  const OdeSystem parabolic = system_of(testing::kParabolic);
  opt.max_ops = 2;
  EnumerateResult p = enumerate_baseline(parabolic, opt);
  CHECK(contains_form(p.verified, pow(x(), num(2)) + y()));

  // Oracle for the distinct count at one operator: every unary and binary
  // combination of the five leaves, deduplicated by canonical form.
  opt.max_ops = 1;
  EnumerateResult one = enumerate_baseline(parabolic, opt);
  std::set<std::string> forms;
  const std::vector<Expr> leaves{x(), y(), t(), num(1), num(2)};
  for (const Expr& l : leaves) forms.insert(polish_string(l));
  for (const Expr& a : leaves) {
    for (Expr u : {sin(a), cos(a), tan(a), exp(a), log(a), sqrt(a)}) forms.insert(polish_string(simplify(u)));
    for (const Expr& b : leaves)
      for (Expr e : {a + b, a - b, a * b, a / b, pow(a, b)}) forms.insert(polish_string(simplify(e)));
  }
  CHECK(one.distinct == forms.size());

  opt.max_ops = 0;
  CHECK(enumerate_baseline(oscillator, opt).verified.empty());
  CHECK(enumerate_baseline(parabolic, opt).verified.empty());

  opt.max_ops = 3;
  opt.step_budget = 1000;
  EnumerateResult cut = enumerate_baseline(oscillator, opt);
  CHECK_FALSE(cut.complete);

  opt.step_budget = 0;
  opt.max_results = 1;
  EnumerateResult first = enumerate_baseline(parabolic, opt);
  CHECK(first.verified.size() == 1);
  CHECK_FALSE(first.complete);
}
