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

#include "firstint/canonical.hpp"
#include "firstint/expr.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>

namespace firstint {

using Point = std::array<double, kVarCount>;
using Bindings = std::map<VarId, Expr>;

/// Simultaneous substitution; unbound variables are left alone.
Expr substitute(const Expr& e, const Bindings& bindings);

/// IEEE double evaluation. nullopt signals a domain error: log or sqrt out of
/// range, division by zero, a negative base under a non-integer power, or
/// any non-finite intermediate.
std::optional<double> eval_numeric(const Expr& e, const Point& p);
std::optional<double> eval_numeric(const canon::CExpr& e, const Point& p);

/// Rule-based simplification to canonical form: exact constant folding,
/// identity/annihilator removal, like-term and like-factor collection,
/// canonical operand order, a small identity table (sin^2 + cos^2 = 1,
/// exp(a) exp(b) = exp(a + b), log(ab) = log a + log b) and detection of
/// expressions that vanish as rational functions of their kernels.
Expr simplify(const Expr& e);

struct Simplified {
  Expr expr;
  bool domain_changed = false;  // a rewrite such as a/a -> 1 fired
};
Simplified simplify_audited(const Expr& e);

/// Canonical form plus the rational-function zero check.
canon::CExpr simplify(const canon::CExpr& c);

struct ZeroTestConfig {
  std::size_t probes = 64;
  double tol = 1e-9;
  std::uint64_t seed = 0x5eedULL;
  double box = 3.0;                  // probe points uniform in [-box, box]^3
  std::size_t resample_factor = 20;  // attempt budget = factor * probes
};

enum class Tier { Symbolic, Numeric };
const char* to_string(Tier t);

struct ZeroTestOutcome {
  enum class Verdict { Zero, NonZero, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  Tier tier = Tier::Symbolic;
  std::size_t probes_ok = 0;
  double worst_residual = 0;  // max |value| / (1 + scale) over the probes

  bool zero() const { return verdict == Verdict::Zero; }
};

/// Two-tier test: symbolic simplification to the literal 0 first, then
/// seeded random probing with rejection-resampling of domain errors.
ZeroTestOutcome zero_test(const canon::CExpr& e, const ZeroTestConfig& cfg);
ZeroTestOutcome zero_test(const Expr& e, const ZeroTestConfig& cfg);

class Inconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws Inconclusive when too few probe points land in the domain.
bool is_identically_zero(const Expr& e, std::size_t probes = 64, double tol = 1e-9, std::uint64_t rng_seed = 0x5eedULL);

}  // namespace firstint
