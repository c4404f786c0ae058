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

#include "firstint/backgen.hpp"
#include "firstint/notation.hpp"
#include "known_systems.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

using namespace firstint;
using vars::t;
using vars::x;
using vars::y;

namespace {

std::vector<std::string> golden_lines(const std::string& file) {
  std::ifstream in(std::string(FIRSTINT_GOLDEN_DIR) + "/" + file);
  REQUIRE(in.good());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

std::size_t leaf_count(const Expr& e, std::size_t& var_leaves) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      return 1;
    case Expr::Kind::Var:
      ++var_leaves;
      return 1;
    case Expr::Kind::Unary:
      return leaf_count(e.child(), var_leaves);
    case Expr::Kind::Binary:
      return leaf_count(e.left(), var_leaves) + leaf_count(e.right(), var_leaves);
  }
  return 0;
}

std::string shape(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Unary:
      return "u(" + shape(e.child()) + ")";
    case Expr::Kind::Binary:
      return "b(" + shape(e.left()) + "," + shape(e.right()) + ")";
    default:
      return "L";
  }
}

OdeSystem solved(const std::vector<Expr>& vs, const SeedSpec& spec) {
  auto r = invert(vs, spec);
  if (auto* rej = std::get_if<Rejection>(&r)) FAIL("unexpected rejection: ", to_string(rej->reason), " ", rej->detail);
  return std::get<OdeSystem>(r);
}

RejectReason rejected(const std::vector<Expr>& vs, const SeedSpec& spec) {
  auto r = invert(vs, spec);
  REQUIRE(std::holds_alternative<Rejection>(r));
  return std::get<Rejection>(r).reason;
}

SeedSpec prescribe(VarId v, Expr rhs) {
  SeedSpec s;
  s.prescribed_rhs[v] = std::move(rhs);
  return s;
}

bool same(const Expr& a, const Expr& b) { return is_identically_zero(simplify(a - b)); }

}  // namespace

TEST_CASE("SamplerConfig validation and digest") {
  SamplerConfig c;
  CHECK_NOTHROW(c.validate());
  SamplerConfig bad = c;
  bad.min_ops = 4;
  bad.max_ops = 2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.leaf_var_prob = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.unary_weights[0] = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  CHECK(c.digest().size() == 16);
  SamplerConfig d = c;
  CHECK(d.digest() == c.digest());
  d.rng_seed = 1;
  CHECK(d.digest() != c.digest());
}

TEST_CASE("sample_tree has exactly the requested operator count") {
  SamplerConfig cfg;
  Rng rng(5);
  for (int ops = 0; ops <= 12; ++ops)
    for (int i = 0; i < 50; ++i) {
      Expr e = sample_tree(cfg, ops, rng);
      CHECK(stats(e).operator_count == static_cast<std::size_t>(ops));
    }
  Expr leaf = sample_tree(cfg, 0, rng);
  CHECK((leaf.is_var() || leaf.is_const()));
}

TEST_CASE("sample_integral golden draws") {
  SamplerConfig cfg;
  Rng rng(20240611);
  auto lines = golden_lines("sample_integral.txt");
  REQUIRE(lines.size() == 24);
  for (const std::string& line : lines) {
    SampledIntegral s = sample_integral_detailed(cfg, rng);
    std::ostringstream got;
    got << s.ops << " | " << polish_string(s.raw) << " | " << polish_string(s.integral);
    CHECK(got.str() == line);
  }
}

TEST_CASE("sampler leaf-variable fraction") {
  // Trees as drawn, k uniform over 0..6.
  SamplerConfig cfg;
  Rng rng(2024);
  std::size_t leaves = 0, var_leaves = 0;
  while (leaves < 100000)
    leaves += leaf_count(sample_tree(cfg, static_cast<int>(rng.range(cfg.min_ops, cfg.max_ops)), rng), var_leaves);
  const double frac = static_cast<double>(var_leaves) / static_cast<double>(leaves);
  INFO("variable fraction ", frac, " over ", leaves, " leaves");
  CHECK(std::fabs(frac - 0.70) <= 0.01);

  // Rejecting trees without x or y skews accepted integrals towards variables.
  std::size_t acc_leaves = 0, acc_var = 0;
  while (acc_leaves < 20000) acc_leaves += leaf_count(sample_integral_detailed(cfg, rng).raw, acc_var);
  CHECK(static_cast<double>(acc_var) / static_cast<double>(acc_leaves) > 0.70);
}

TEST_CASE("sampler operator count is uniform over 0..6") {
  SamplerConfig cfg;
  Rng rng(99);
  std::array<double, 7> hist{};
  const int n = 14000;
  for (int i = 0; i < n; ++i) {
    SampledIntegral s = sample_integral_detailed(cfg, rng);
    REQUIRE(s.ops >= 0);
    REQUIRE(s.ops <= 6);
    CHECK(stats(s.raw).operator_count == static_cast<std::size_t>(s.ops));
    hist[static_cast<std::size_t>(s.ops)] += 1;
  }
  double chi2 = 0;
  const double expected = n / 7.0;
  for (double h : hist) chi2 += (h - expected) * (h - expected) / expected;
  INFO("chi2 = ", chi2);
  CHECK(chi2 < 16.812);  // 6 degrees of freedom, p = 0.01
}

TEST_CASE("tree shapes are uniform") {
  // One unary and one binary operator of equal weight: the six trees with two
  // operators must be equally likely.
  SamplerConfig cfg;
  cfg.unary_weights = {1, 0, 0, 0, 0, 0, 0};
  cfg.binary_weights = {1, 0, 0, 0, 0};
  Rng rng(8);
  std::map<std::string, int> hist;
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++hist[shape(sample_tree(cfg, 2, rng))];
  REQUIRE(hist.size() == 6);
  double chi2 = 0;
  for (const auto& [s, c] : hist) chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
  INFO("chi2 = ", chi2);
  CHECK(chi2 < 15.086);  // 5 degrees of freedom, p = 0.01
}

TEST_CASE("sample_integral never returns a constant or a t-only expression") {
  SamplerConfig cfg;
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    Expr v = sample_integral(cfg, rng);
    CHECK_FALSE(v.is_const());
    CHECK_FALSE((v.variables() & VarSet{VarId::x, VarId::y}).empty());
  }
  SamplerConfig consts;
  consts.leaf_var_prob = 0;
  consts.min_ops = consts.max_ops = 0;
  consts.max_attempts = 5;
  CHECK_THROWS_AS(sample_integral(consts, rng), SampleBudgetExhausted);
}

TEST_CASE("invert examples") {
  OdeSystem a = solved({x() + y()}, prescribe(VarId::x, num(1)));
  CHECK(a.rhs[0] == num(1));
  CHECK(a.rhs[1] == num(-1));

  OdeSystem h = solved({pow(x(), num(2)) + pow(y(), num(2))}, prescribe(VarId::x, y()));
  CHECK(h.rhs[0] == y());
  CHECK(h.rhs[1] == -x());

  CHECK(rejected({x() * t()}, prescribe(VarId::x, num(1))) == RejectReason::SingularJb);

  // Prescribing y instead solves for x.
  OdeSystem b = solved({x() * y()}, prescribe(VarId::y, y()));
  CHECK(b.rhs[1] == y());
  CHECK(b.rhs[0] == -x());

  SeedSpec two;
  two.m = 2;
  OdeSystem c = solved({x() - t(), y() + t()}, two);
  CHECK(c.rhs[0] == num(1));
  CHECK(c.rhs[1] == num(-1));

  OdeSystem d = solved({x() * exp(-t()), y() * exp(t())}, two);
  CHECK(d.rhs[0] == x());
  CHECK(d.rhs[1] == -y());

  // Coupled 2x2 block: V1 = x + y - 2t, V2 = x - y gives x' = y' = 1.
  OdeSystem e = solved({x() + y() - num(2) * t(), x() - y()}, two);
  CHECK(e.rhs[0] == num(1));
  CHECK(e.rhs[1] == num(1));

  CHECK(rejected({x() + y(), num(2) * x() + num(2) * y()}, two) == RejectReason::Underdetermined);
  CHECK(rejected({x() + y(), x() + y() + t()}, two) == RejectReason::SingularJb);
}

TEST_CASE("invert argument checks") {
  SeedSpec two;
  two.m = 2;
  CHECK_THROWS_AS(invert({x()}, two), std::invalid_argument);
  CHECK_THROWS_AS(invert({x() + y()}, SeedSpec{}), std::invalid_argument);
  SeedSpec zero;
  zero.m = 0;
  CHECK_THROWS_AS(invert({}, zero), std::invalid_argument);
}

TEST_CASE("invert respects the node cap") {
  InvertOptions tight;
  tight.node_cap = 8;
  Expr v = pow(x(), num(3)) * sin(y()) + exp(x() * y() * t());
  auto r = invert({v}, prescribe(VarId::x, y()), tight);
  REQUIRE(std::holds_alternative<Rejection>(r));
  CHECK(std::get<Rejection>(r).reason == RejectReason::SimplificationBlowup);
}

TEST_CASE("inversion reproduces the traveling-wave equation") {
  const Expr v = parse_polish(testing::kTravelingWave.integral);
  const Expr reference = simplify(parse_polish(testing::kTravelingWave.g));
  OdeSystem sys = solved({v}, prescribe(VarId::x, y()));
  CHECK(sys.rhs[0] == y());
  INFO(polish_string(sys.rhs[1]));
  CHECK(polish_string(sys.rhs[1]) == "/ + + * 9 x * 9 t 7 + + * 2 x * 2 t 5");
  ZeroTestOutcome z = zero_test(sys.rhs[1] - reference, ZeroTestConfig{});
  CHECK(z.zero());
  CHECK(z.tier == Tier::Symbolic);
  CHECK(total_derivative(v, sys) == num(0));

  Rng rng(1);
  auto p = generate_pair(SeedSpec::with_x_dot_y(v), SamplerConfig{}, rng);
  REQUIRE(std::holds_alternative<IntegralPair>(p));
  const IntegralPair& pair = std::get<IntegralPair>(p);
  CHECK(pair.system.rhs[1] == sys.rhs[1]);
  REQUIRE(pair.integrals.size() == 1);
  CHECK(pair.integrals[0] == v);
}

TEST_CASE("filter_nontrivial") {
  CHECK_FALSE(filter_nontrivial(OdeSystem::planar(x() * t(), x() + y())));
  CHECK(filter_nontrivial(OdeSystem::planar(y(), -x())));
  CHECK_FALSE(filter_nontrivial(OdeSystem::planar(y(), num(3))));
  CHECK_FALSE(filter_nontrivial(OdeSystem::planar(y(), y() * t())));
  CHECK_FALSE(filter_nontrivial(OdeSystem::planar(y(), x() - x() + y())));
  CHECK(filter_nontrivial(OdeSystem::planar(y() + x() * t(), x())));
}

TEST_CASE("generate_pair on external integrals") {
  Rng rng(7);
  auto h = generate_pair(SeedSpec::with_x_dot_y(pow(x(), num(2)) + pow(y(), num(2))), SamplerConfig{}, rng);
  REQUIRE(std::holds_alternative<IntegralPair>(h));
  const IntegralPair& pair = std::get<IntegralPair>(h);
  CHECK(pair.system.rhs[0] == y());
  CHECK(pair.system.rhs[1] == -x());
  CHECK(pair.meta.tier == Tier::Symbolic);
  REQUIRE(pair.meta.integral_stats.size() == 1);
  CHECK(pair.meta.integral_stats[0].operator_count == 3);
  CHECK(pair.meta.sampler_digest == SamplerConfig{}.digest());

  // x' = y with V = y - t: y' = 1, a constant equation.
  auto c = generate_pair(SeedSpec::with_x_dot_y(y() - t()), SamplerConfig{}, rng);
  REQUIRE(std::holds_alternative<Rejection>(c));
  CHECK(std::get<Rejection>(c).reason == RejectReason::Decoupled);

  // V = x*t with x' = 1 has no y-dependence.
  SeedSpec s = prescribe(VarId::x, num(1));
  s.external = {x() * t()};
  auto d = generate_pair(s, SamplerConfig{}, rng);
  REQUIRE(std::holds_alternative<Rejection>(d));
  CHECK(std::get<Rejection>(d).reason == RejectReason::SingularJb);
}

TEST_CASE("sampled pairs satisfy the correctness and filter invariants") {
  BatchConfig cfg;
  cfg.count = 500;
  cfg.master_seed = 11;
  BatchResult r = generate_batch(cfg);
  CHECK(r.pairs.size() == 500);
  CHECK(r.exhausted == 0);
  for (const IntegralPair& p : r.pairs) {
    INFO(polish_string(p.system.rhs[0]), " ; ", polish_string(p.system.rhs[1]), " ; ", polish_string(p.integrals[0]));
    CHECK(verify_first_integral(p.integrals[0], p.system).verdict);
    for (std::size_t i = 0; i < p.system.size(); ++i) {
      const VarSet own{p.system.state_vars[i], VarId::t};
      CHECK_FALSE(simplify(p.system.rhs[i]).variables().subset_of(own));
    }
    CHECK(p.meta.seed != 0);
  }
}

TEST_CASE("batch output does not depend on the worker count") {
  BatchConfig cfg;
  cfg.count = 120;
  cfg.master_seed = 42;
  cfg.workers = 1;
  BatchResult a = generate_batch(cfg);
  cfg.workers = 4;
  BatchResult b = generate_batch(cfg);
  REQUIRE(a.pairs.size() == b.pairs.size());
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    CHECK(a.pairs[i].system.rhs == b.pairs[i].system.rhs);
    CHECK(a.pairs[i].integrals == b.pairs[i].integrals);
    CHECK(a.pairs[i].meta.seed == b.pairs[i].meta.seed);
    CHECK(a.pairs[i].meta.attempts == b.pairs[i].meta.attempts);
  }
  CHECK(a.rejections == b.rejections);
  cfg.master_seed = 43;
  BatchResult c = generate_batch(cfg);
  CHECK_FALSE(c.pairs[0].integrals == a.pairs[0].integrals);
}

TEST_CASE("batch acceptance predicate") {
  BatchConfig cfg;
  cfg.count = 30;
  cfg.master_seed = 5;
  cfg.accept = [](const IntegralPair& p) { return stats(p.integrals[0]).has_t; };
  BatchResult r = generate_batch(cfg);
  CHECK(r.pairs.size() == 30);
  CHECK(r.predicate_rejections > 0);
  for (const IntegralPair& p : r.pairs) CHECK(p.integrals[0].variables().contains(VarId::t));
}

TEST_CASE("sample_family") {
  OdeSystem s = sample_family(FamilyParams{9, 9, 7, 2, 2, 5});
  CHECK(s.rhs[0] == y());
  CHECK(s.rhs[1] == simplify(parse_polish(testing::kTravelingWave.g)));
  CHECK(verify_first_integral(parse_polish(testing::kTravelingWave.integral), s).verdict);

  CHECK_THROWS_AS(sample_family(FamilyParams{1, 2, 3, 0, 0, 0}), DegenerateDenominator);
  CHECK_THROWS_AS(sample_family(FamilyParams{10, 0, 0, 1, 0, 0}), std::invalid_argument);

  Rng rng(777);
  for (const std::string& line : golden_lines("sample_family.txt")) {
    FamilyParams p = sample_family_params(rng);
    std::ostringstream got;
    got << p.a << ' ' << p.b << ' ' << p.c << ' ' << p.d << ' ' << p.e << ' ' << p.f << " | "
        << polish_string(sample_family(p).rhs[1]);
    CHECK(got.str() == line);
  }
}
