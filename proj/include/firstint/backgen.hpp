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

#pragma once

// Backward generation: sample first integrals, solve the linear constraint
// Ja dx_a/dt + Jb dx_b/dt + dV/dt = 0 for the missing right-hand sides, and
// keep the (system, integrals) pairs that pass the filter and verification.

#include "firstint/calculus.hpp"
#include "firstint/expr.hpp"
#include "firstint/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace firstint {

struct SamplerConfig {
  int min_ops = 0;
  int max_ops = 6;
  double leaf_var_prob = 0.7;
  // Indexed by UnaryOp / BinaryOp. neg is never sampled by default.
  std::array<double, 7> unary_weights{1, 1, 1, 1, 1, 1, 0};
  std::array<double, 5> binary_weights{1, 1, 1, 1, 1};
  std::uint64_t rng_seed = 0;
  int max_attempts = 100;  // resamples per integral

  /// Throws std::invalid_argument.
  void validate() const;
  /// Short stable digest of every field.
  std::string digest() const;
};

class SampleBudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A uniformly random unary-binary tree with exactly `ops` operator nodes,
/// leaves drawn per `cfg`. Trees are uniform over shapes (weighted by the
/// operator weights), not grown recursively.
Expr sample_tree(const SamplerConfig& cfg, int ops, Rng& rng);

struct SampledIntegral {
  Expr raw;       // the tree as drawn
  Expr integral;  // simplified
  int ops = 0;    // operator count of the raw tree
  int attempts = 0;
};

/// Draws k uniformly from the operator range, then resamples trees with that
/// k until the simplified result is non-constant and uses x or y.
SampledIntegral sample_integral_detailed(const SamplerConfig& cfg, Rng& rng);
Expr sample_integral(const SamplerConfig& cfg, Rng& rng);

/// m prescribed integrals plus n - m given equations.
struct SeedSpec {
  std::size_t m = 1;
  std::map<VarId, Expr> prescribed_rhs;  // x_a -> dx_a/dt
  std::vector<Expr> external;            // empty: sample m integrals

  /// The dx/dt = y configuration with one supplied integral.
  static SeedSpec with_x_dot_y(const Expr& integral);
};

enum class RejectReason {
  SingularJb,
  Underdetermined,
  SimplificationBlowup,
  Decoupled,
  ConstantIntegral,
  VerificationInconclusive,
  SampleBudgetExhausted,
};
inline constexpr std::size_t kRejectReasonCount = 7;
const char* to_string(RejectReason r);

struct Rejection {
  RejectReason reason;
  std::string detail;
};

struct InvertOptions {
  std::size_t node_cap = 10000;
};

/// Solves for the unprescribed derivatives by fraction-free elimination.
/// The state variables are [x, y].
std::variant<OdeSystem, Rejection> invert(const std::vector<Expr>& integrals, const SeedSpec& spec,
                                          const InvertOptions& opt = {});

/// False when some dx_i/dt depends on nothing but x_i and t, or is constant.
bool filter_nontrivial(const OdeSystem& sys);

struct PairMeta {
  std::uint64_t seed = 0;
  std::string sampler_digest;
  Tier tier = Tier::Symbolic;  // Numeric if any integral needed the probe tier
  bool domain_enlarged = false;
  std::vector<ExprStats> integral_stats;
  int attempts = 1;
};

struct IntegralPair {
  OdeSystem system;
  std::vector<Expr> integrals;
  PairMeta meta;
};

/// An emitted integral failed verification: a bug, never a data condition.
class InternalVerificationFailure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct GenerateOptions {
  InvertOptions invert;
  ZeroTestConfig zero_test;
  std::uint64_t step_budget = 4'000'000;  // per attempt; 0 disables
};

/// One attempt: integrals -> invert -> filter -> verify -> assemble.
std::variant<IntegralPair, Rejection> generate_pair(const SeedSpec& spec, const SamplerConfig& cfg, Rng& rng,
                                                    const GenerateOptions& opt = {});

/// Fresh seed spec for the random setting: one sampled integral, one of x, y
/// chosen as prescribed, its equation drawn from the same sampler.
SeedSpec random_seed_spec(const SamplerConfig& cfg, Rng& rng);

using RejectionCounts = std::array<std::uint64_t, kRejectReasonCount>;

struct BatchConfig {
  std::size_t count = 0;
  std::uint64_t master_seed = 0;
  unsigned workers = 1;
  int max_attempts = 500;  // per record
  SamplerConfig sampler;
  GenerateOptions options;
  /// Optional extra acceptance test (e.g. the Hard predicate).
  std::function<bool(const IntegralPair&)> accept;
  /// Seed specs per attempt; defaults to random_seed_spec.
  std::function<SeedSpec(const SamplerConfig&, Rng&)> make_spec;
};

struct BatchResult {
  std::vector<IntegralPair> pairs;  // in record-index order
  RejectionCounts rejections{};
  std::uint64_t predicate_rejections = 0;
  std::size_t exhausted = 0;  // record slots that ran out of attempts
};

/// Record i draws from its own stream derive_seed(master_seed, i), so the
/// output does not depend on the worker count.
BatchResult generate_batch(const BatchConfig& cfg);

class DegenerateDenominator : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// x'' = (A x + B t + C)/(D x + E t + F) as x' = y, y' = ...
struct FamilyParams {
  int a = 0, b = 0, c = 0, d = 0, e = 0, f = 0;
};

OdeSystem sample_family(const FamilyParams& p);
/// Coefficients uniform in -9..9, redrawn while D = E = F = 0.
FamilyParams sample_family_params(Rng& rng);
OdeSystem sample_family(Rng& rng);

}  // namespace firstint
