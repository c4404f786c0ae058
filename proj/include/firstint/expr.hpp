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

#include "firstint/rational.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace firstint {

enum class VarId : std::uint8_t { x = 0, y = 1, t = 2 };
inline constexpr std::size_t kVarCount = 3;

std::string_view name(VarId v);
std::optional<VarId> var_from_name(std::string_view s);

/// Small bitset over VarId.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr VarSet(std::initializer_list<VarId> vars) {
    for (VarId v : vars) insert(v);
  }
  static constexpr VarSet all() { return VarSet{VarId::x, VarId::y, VarId::t}; }

  constexpr void insert(VarId v) { bits_ |= bit(v); }
  constexpr bool contains(VarId v) const { return (bits_ & bit(v)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const {
    return static_cast<std::size_t>(((bits_ >> 0) & 1) + ((bits_ >> 1) & 1) + ((bits_ >> 2) & 1));
  }
  constexpr bool subset_of(VarSet other) const { return (bits_ & ~other.bits_) == 0; }
  constexpr VarSet operator|(VarSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr VarSet operator&(VarSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr bool operator==(const VarSet&) const = default;
  constexpr std::uint8_t bits() const { return bits_; }
  static constexpr VarSet from_bits(std::uint8_t b) {
    VarSet s;
    s.bits_ = b;
    return s;
  }

 private:
  static constexpr std::uint8_t bit(VarId v) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(v)); }
  std::uint8_t bits_ = 0;
};

/// "{x,y}" style rendering, in VarId order.
std::string to_string(VarSet s);

enum class UnaryOp : std::uint8_t { sin, cos, tan, exp, log, sqrt, neg };
enum class BinaryOp : std::uint8_t { add, sub, mul, div, pow };

std::string_view token_of(UnaryOp op);   // "neg" has no Polish token; returns "neg"
std::string_view token_of(BinaryOp op);

/// Immutable symbolic expression tree. Copies share structure.
///
/// The factories keep two normalizations so that the Polish printer and
/// parser are exact inverses: `neg` of a constant folds into the constant,
/// and `sub(0, e)` becomes `neg(e)`.
class Expr {
 public:
  enum class Kind : std::uint8_t { Const, Var, Unary, Binary };

  Expr();  // Const(0)

  static Expr constant(Rational value);
  static Expr integer(long value);
  static Expr variable(VarId v);
  static Expr unary(UnaryOp op, Expr child);
  static Expr binary(BinaryOp op, Expr left, Expr right);

  Kind kind() const { return node_->kind; }
  bool is_const() const { return kind() == Kind::Const; }
  bool is_var() const { return kind() == Kind::Var; }
  bool is_zero() const { return is_const() && sgn(*node_->value) == 0; }

  const Rational& value() const { return *node_->value; }
  VarId var() const { return static_cast<VarId>(node_->op); }
  UnaryOp unary_op() const { return static_cast<UnaryOp>(node_->op); }
  BinaryOp binary_op() const { return static_cast<BinaryOp>(node_->op); }
  const Expr& child() const { return *node_->left; }
  const Expr& left() const { return *node_->left; }
  const Expr& right() const { return *node_->right; }

  std::size_t node_count() const { return node_->nodes; }
  std::size_t depth() const { return node_->depth; }
  std::uint64_t hash() const { return node_->hash; }
  VarSet variables() const { return VarSet::from_bits(node_->vars); }

  friend bool operator==(const Expr& a, const Expr& b);
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

 private:
  struct Node {
    Kind kind;
    std::uint8_t op = 0;
    std::uint8_t vars = 0;
    std::size_t nodes = 1;
    std::size_t depth = 1;
    std::uint64_t hash = 0;
    std::optional<Rational> value;
    std::unique_ptr<Expr> left;
    std::unique_ptr<Expr> right;
  };
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

// Tree-building helpers; no simplification happens here.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, const Expr& exponent);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr tan(const Expr& a);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sqrt(const Expr& a);

namespace vars {
inline const Expr& x() {
  static const Expr e = Expr::variable(VarId::x);
  return e;
}
inline const Expr& y() {
  static const Expr e = Expr::variable(VarId::y);
  return e;
}
inline const Expr& t() {
  static const Expr e = Expr::variable(VarId::t);
  return e;
}
}  // namespace vars

inline Expr num(long v) { return Expr::integer(v); }
Expr num(long p, long q);

struct ExprStats {
  std::size_t operator_count = 0;  // internal nodes, neg excluded
  VarSet variables;
  std::size_t depth = 0;
  bool has_t = false;
  bool has_nonlinear_op = false;  // div, pow with exponent other than 0/1, or a unary function
};

ExprStats stats(const Expr& e);

}  // namespace firstint
