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

#include "firstint/expr.hpp"

#include <algorithm>
#include <functional>

namespace firstint {

std::string_view name(VarId v) {
  switch (v) {
    case VarId::x: return "x";
    case VarId::y: return "y";
    case VarId::t: return "t";
  }
  return "?";
}

std::optional<VarId> var_from_name(std::string_view s) {
  if (s == "x") return VarId::x;
  if (s == "y") return VarId::y;
  if (s == "t") return VarId::t;
  return std::nullopt;
}

std::string to_string(VarSet s) {
  std::string out = "{";
  for (VarId v : {VarId::x, VarId::y, VarId::t}) {
    if (!s.contains(v)) continue;
    if (out.size() > 1) out += ",";
    out += name(v);
  }
  return out + "}";
}

std::string_view token_of(UnaryOp op) {
  switch (op) {
    case UnaryOp::sin: return "sin";
    case UnaryOp::cos: return "cos";
    case UnaryOp::tan: return "tan";
    case UnaryOp::exp: return "exp";
    case UnaryOp::log: return "log";
    case UnaryOp::sqrt: return "sqrt";
    case UnaryOp::neg: return "neg";
  }
  return "?";
}

std::string_view token_of(BinaryOp op) {
  switch (op) {
    case BinaryOp::add: return "+";
    case BinaryOp::sub: return "-";
    case BinaryOp::mul: return "*";
    case BinaryOp::div: return "/";
    case BinaryOp::pow: return "^";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t mix(std::uint64_t h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffu;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t hash_string(std::uint64_t h, const std::string& s) {
  for (unsigned char c : s) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

}  // namespace

Expr::Expr() : Expr(constant(Rational(0))) {}

Expr Expr::constant(Rational value) {
  value.canonicalize();
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->hash = hash_string(mix(kFnvOffset, 1), to_string(value));
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr Expr::integer(long value) { return constant(Rational(value)); }

Expr Expr::variable(VarId v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->op = static_cast<std::uint8_t>(v);
  n->vars = VarSet{v}.bits();
  n->hash = mix(mix(kFnvOffset, 2), n->op);
  return Expr(std::move(n));
}

Expr Expr::unary(UnaryOp op, Expr child) {
  if (op == UnaryOp::neg && child.is_const()) return constant(-child.value());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Unary;
  n->op = static_cast<std::uint8_t>(op);
  n->vars = child.node_->vars;
  n->nodes = child.node_count() + 1;
  n->depth = child.depth() + 1;
  n->hash = mix(mix(mix(kFnvOffset, 3), n->op), child.hash());
  n->left = std::make_unique<Expr>(std::move(child));
  return Expr(std::move(n));
}

Expr Expr::binary(BinaryOp op, Expr left, Expr right) {
  if (op == BinaryOp::sub && left.is_zero()) return unary(UnaryOp::neg, std::move(right));
  auto n = std::make_shared<Node>();
  n->kind = Kind::Binary;
  n->op = static_cast<std::uint8_t>(op);
  n->vars = static_cast<std::uint8_t>(left.node_->vars | right.node_->vars);
  n->nodes = left.node_count() + right.node_count() + 1;
  n->depth = std::max(left.depth(), right.depth()) + 1;
  n->hash = mix(mix(mix(mix(kFnvOffset, 4), n->op), left.hash()), right.hash());
  n->left = std::make_unique<Expr>(std::move(left));
  n->right = std::make_unique<Expr>(std::move(right));
  return Expr(std::move(n));
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash() || a.kind() != b.kind() || a.node_count() != b.node_count()) return false;
  switch (a.kind()) {
    case Expr::Kind::Const: return a.value() == b.value();
    case Expr::Kind::Var: return a.var() == b.var();
    case Expr::Kind::Unary: return a.unary_op() == b.unary_op() && a.child() == b.child();
    case Expr::Kind::Binary:
      return a.binary_op() == b.binary_op() && a.left() == b.left() && a.right() == b.right();
  }
  return false;
}

Expr num(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return Expr::constant(r);
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(BinaryOp::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(UnaryOp::neg, a); }
Expr pow(const Expr& base, const Expr& exponent) { return Expr::binary(BinaryOp::pow, base, exponent); }
Expr sin(const Expr& a) { return Expr::unary(UnaryOp::sin, a); }
Expr cos(const Expr& a) { return Expr::unary(UnaryOp::cos, a); }
Expr tan(const Expr& a) { return Expr::unary(UnaryOp::tan, a); }
Expr exp(const Expr& a) { return Expr::unary(UnaryOp::exp, a); }
Expr log(const Expr& a) { return Expr::unary(UnaryOp::log, a); }
Expr sqrt(const Expr& a) { return Expr::unary(UnaryOp::sqrt, a); }

ExprStats stats(const Expr& e) {
  ExprStats s;
  s.variables = e.variables();
  s.depth = e.depth();
  s.has_t = s.variables.contains(VarId::t);
  std::function<void(const Expr&)> walk = [&](const Expr& n) {
    switch (n.kind()) {
      case Expr::Kind::Const:
      case Expr::Kind::Var:
        return;
      case Expr::Kind::Unary:
        if (n.unary_op() != UnaryOp::neg) {
          ++s.operator_count;
          s.has_nonlinear_op = true;
        }
        walk(n.child());
        return;
      case Expr::Kind::Binary:
        ++s.operator_count;
        if (n.binary_op() == BinaryOp::div) s.has_nonlinear_op = true;
        if (n.binary_op() == BinaryOp::pow) {
          const Expr& ex = n.right();
          bool trivial = ex.is_const() && (ex.value() == 0 || ex.value() == 1);
          if (!trivial) s.has_nonlinear_op = true;
        }
        walk(n.left());
        walk(n.right());
        return;
    }
  };
  walk(e);
  return s;
}

}  // namespace firstint
