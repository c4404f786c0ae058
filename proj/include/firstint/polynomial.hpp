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

// Polynomials over opaque kernels (variables, function applications and
// non-integer powers) with exact rational coefficients, and rational normal
// forms built from them. Used for the symbolic zero test and for cancelling
// common factors after symbolic elimination.

#include "firstint/canonical.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace firstint::canon {

/// Raised when an expansion exceeds its term cap or divides by zero.
class PolyOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sorted (kernel, exponent >= 1) pairs.
using Monomial = std::vector<std::pair<CExpr, long>>;

/// Lexicographic order on exponent vectors, kernels ascending by `Less`.
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Poly {
 public:
  using Terms = std::map<Monomial, Rational, MonomialLess>;

  Poly() = default;
  static Poly constant(const Rational& q);
  static Poly kernel(const CExpr& k);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::size_t size() const { return terms_.size(); }
  const Terms& terms() const { return terms_; }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(const Poly& o) const;
  Poly scaled(const Rational& q) const;
  Poly power(long n) const;

  /// Exact quotient when `divisor` divides this polynomial.
  std::optional<Poly> divide_exact(const Poly& divisor) const;

  /// Leading coefficient under MonomialLess.
  const Rational& leading_coefficient() const { return terms_.rbegin()->second; }

  CExpr to_cexpr() const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator<(const Poly& a, const Poly& b);

  /// Term cap for every intermediate result on this thread.
  static std::size_t max_terms();
  static void set_max_terms(std::size_t n);

 private:
  void add_term(const Monomial& m, const Rational& c);
  void check_size() const;
  Terms terms_;
};

/// numerator / product(factor^multiplicity); factors are non-constant and
/// normalized to leading coefficient 1.
struct Fraction {
  Poly numerator;
  std::map<Poly, long> denominator;
};

Fraction to_fraction(const CExpr& c);

/// true: the expression is identically zero as a rational function of its
/// kernels. false: the numerator is a non-zero polynomial (which does not
/// prove the expression non-zero: kernels may be algebraically related).
/// nullopt: expansion hit the term cap.
std::optional<bool> rational_zero(const CExpr& c);

/// Cancels denominator factors that divide the numerator exactly and
/// returns the smaller of the input and the cancelled form.
CExpr cancel(const CExpr& c);

}  // namespace firstint::canon
