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

// Canonical n-ary representation used internally by the simplifier and by
// differentiation. Every CExpr is built through the factory functions below,
// which apply the automatic-simplification rules, so two CExprs are
// structurally equal iff they have the same canonical form.
//
// Shape invariants:
//   Num   exact rational
//   Sym   variable
//   Fn    sin/cos/tan/exp/log of a canonical argument (sqrt is Pow(., 1/2))
//   Pow   base^exponent; exponent is never 0 or 1; integer powers of
//         products are distributed; numeric bases carry a fractional
//         exponent in (0, 1)
//   Mul   coefficient * factors; >= 1 factor, no Num/Mul factors; sorted;
//         never a lone factor with coefficient 1; never coef * (single Add)
//   Add   constant + terms; >= 1 term, no Num/Add terms; sorted; never a
//         lone term with constant 0

#include "firstint/expr.hpp"
#include "firstint/rational.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace firstint::canon {

enum class Kind : std::uint8_t { Num, Sym, Fn, Pow, Mul, Add };
enum class Fn : std::uint8_t { sin, cos, tan, exp, log };

class CExpr {
 public:
  CExpr();  // Num(0)

  Kind kind() const { return node_->kind; }
  bool is(Kind k) const { return kind() == k; }
  bool is_num() const { return kind() == Kind::Num; }
  bool is_num(long v) const { return is_num() && node_->num == v; }
  bool is_zero() const { return is_num(0); }

  /// Num value, Mul coefficient, or Add constant term.
  const Rational& num() const { return node_->num; }
  VarId sym() const { return static_cast<VarId>(node_->tag); }
  Fn fn() const { return static_cast<Fn>(node_->tag); }
  const CExpr& arg() const { return node_->ops[0]; }
  const CExpr& base() const { return node_->ops[0]; }
  const CExpr& exponent() const { return node_->ops[1]; }
  /// Mul factors or Add terms.
  std::span<const CExpr> ops() const { return node_->ops; }

  std::uint64_t hash() const { return node_->hash; }
  std::size_t size() const { return node_->size; }
  VarSet variables() const { return VarSet::from_bits(node_->vars); }
  bool depends_on(VarId v) const { return variables().contains(v); }

  friend bool operator==(const CExpr& a, const CExpr& b);
  friend bool operator!=(const CExpr& a, const CExpr& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind = Kind::Num;
    std::uint8_t tag = 0;
    std::uint8_t vars = 0;
    std::size_t size = 1;
    std::uint64_t hash = 0;
    Rational num;
    std::vector<CExpr> ops;
  };
  explicit CExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static CExpr make(Kind k, std::uint8_t tag, Rational num, std::vector<CExpr> ops);

  std::shared_ptr<const Node> node_;

  friend CExpr num(Rational);
  friend CExpr sym(VarId);
  friend CExpr raw_fn(Fn, CExpr);
  friend CExpr raw_pow(CExpr, CExpr);
  friend CExpr raw_mul(Rational, std::vector<CExpr>);
  friend CExpr raw_add(Rational, std::vector<CExpr>);
};

/// Total structural order (kind, then contents); used for canonical sorting.
int compare(const CExpr& a, const CExpr& b);
struct Less {
  bool operator()(const CExpr& a, const CExpr& b) const { return compare(a, b) < 0; }
};

CExpr num(Rational q);
inline CExpr num(long v) { return num(Rational(v)); }
CExpr sym(VarId v);

CExpr add(std::vector<CExpr> operands);
CExpr mul(std::vector<CExpr> operands);
CExpr pow(const CExpr& base, const CExpr& exponent);
CExpr fn(Fn f, const CExpr& arg);

inline CExpr add(const CExpr& a, const CExpr& b) { return add(std::vector<CExpr>{a, b}); }
inline CExpr mul(const CExpr& a, const CExpr& b) { return mul(std::vector<CExpr>{a, b}); }
CExpr neg(const CExpr& a);
CExpr sub(const CExpr& a, const CExpr& b);
CExpr div(const CExpr& a, const CExpr& b);
CExpr sqrt(const CExpr& a);

// Unchecked node constructors; callers guarantee the shape invariants.
CExpr raw_fn(Fn f, CExpr arg);
CExpr raw_pow(CExpr base, CExpr exponent);
CExpr raw_mul(Rational coef, std::vector<CExpr> factors);
CExpr raw_add(Rational constant, std::vector<CExpr> terms);

/// Splits c*M into (c, M); for non-Mul inputs the coefficient is 1.
std::pair<Rational, CExpr> split_coefficient(const CExpr& term);
/// Splits b^e into (b, e); for non-Pow inputs the exponent is 1.
std::pair<CExpr, CExpr> split_power(const CExpr& factor);

CExpr from_expr(const Expr& e);
Expr to_expr(const CExpr& c);

/// Exact partial derivative, in canonical form.
CExpr diff(const CExpr& c, VarId v);

/// Simultaneous substitution of variables.
CExpr substitute(const CExpr& c, const std::array<std::optional<CExpr>, kVarCount>& bindings);

/// Counts rewrites that change the natural domain of an expression
/// (a/a -> 1, 0*f -> 0, log(ab) -> log a + log b, ...), on this thread.
class DomainAudit {
 public:
  DomainAudit();
  ~DomainAudit();
  DomainAudit(const DomainAudit&) = delete;
  DomainAudit& operator=(const DomainAudit&) = delete;
  bool fired() const;

 private:
  std::uint64_t start_;
};

void note_domain_change();

}  // namespace firstint::canon
