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

#include "firstint/notation.hpp"

#include <cctype>

namespace firstint {

TokenSeq tokenize(std::string_view text) {
  TokenSeq out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string join(const TokenSeq& tokens) {
  std::string out;
  for (const auto& tok : tokens) {
    if (!out.empty()) out += ' ';
    out += tok;
  }
  return out;
}

namespace {

std::optional<BinaryOp> binary_from_token(std::string_view tok) {
  if (tok == "+") return BinaryOp::add;
  if (tok == "-") return BinaryOp::sub;
  if (tok == "*") return BinaryOp::mul;
  if (tok == "/") return BinaryOp::div;
  if (tok == "^") return BinaryOp::pow;
  return std::nullopt;
}

std::optional<UnaryOp> unary_from_token(std::string_view tok) {
  if (tok == "sin") return UnaryOp::sin;
  if (tok == "cos") return UnaryOp::cos;
  if (tok == "tan") return UnaryOp::tan;
  if (tok == "exp") return UnaryOp::exp;
  if (tok == "log") return UnaryOp::log;
  if (tok == "sqrt") return UnaryOp::sqrt;
  return std::nullopt;
}

}  // namespace

TokenClass classify_token(std::string_view token, VarSet vocab) {
  if (binary_from_token(token)) return TokenClass::BinaryOperator;
  if (unary_from_token(token)) return TokenClass::UnaryOperator;
  if (auto v = var_from_name(token)) return vocab.contains(*v) ? TokenClass::Variable : TokenClass::Unknown;
  if (parse_rational(token)) return TokenClass::Number;
  return TokenClass::Unknown;
}

long arity_balance(const TokenSeq& tokens) {
  long operands = 0, binaries = 0;
  for (const auto& tok : tokens) {
    switch (classify_token(tok)) {
      case TokenClass::Variable:
      case TokenClass::Number:
      case TokenClass::Unknown:
        ++operands;
        break;
      case TokenClass::BinaryOperator:
        ++binaries;
        break;
      case TokenClass::UnaryOperator:
        break;
    }
  }
  return operands - binaries - 1;
}

ParseError ParseError::unbalanced(long imbalance) {
  return ParseError(Kind::UnbalancedArity, imbalance, {},
                    "unbalanced prefix expression (imbalance " + std::to_string(imbalance) + ")");
}

ParseError ParseError::unknown(std::string token) {
  std::string what = "unknown token '" + token + "'";
  return ParseError(Kind::UnknownToken, 0, std::move(token), what);
}

namespace {

struct MissingOperand {};

class PrefixReader {
 public:
  PrefixReader(const TokenSeq& tokens, VarSet vocab) : tokens_(tokens), vocab_(vocab) {}

  Expr read() {
    if (pos_ >= tokens_.size()) throw MissingOperand{};
    const std::string& tok = tokens_[pos_++];
    if (auto op = binary_from_token(tok)) {
      Expr lhs = read();
      Expr rhs = read();
      return Expr::binary(*op, std::move(lhs), std::move(rhs));
    }
    if (auto op = unary_from_token(tok)) return Expr::unary(*op, read());
    if (auto v = var_from_name(tok); v && vocab_.contains(*v)) return Expr::variable(*v);
    if (auto q = parse_rational(tok)) return Expr::constant(*q);
    throw ParseError::unknown(tok);
  }

  std::size_t position() const { return pos_; }

 private:
  const TokenSeq& tokens_;
  VarSet vocab_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_polish(const TokenSeq& tokens, VarSet vocab) {
  for (const auto& tok : tokens)
    if (classify_token(tok, vocab) == TokenClass::Unknown) throw ParseError::unknown(tok);

  long balance = arity_balance(tokens);
  PrefixReader reader(tokens, vocab);
  Expr result;
  try {
    result = reader.read();
  } catch (const MissingOperand&) {
    throw ParseError::unbalanced(balance != 0 ? balance : -1);
  }
  if (reader.position() != tokens.size()) {
    long residue = static_cast<long>(tokens.size() - reader.position());
    throw ParseError::unbalanced(balance != 0 ? balance : residue);
  }
  return result;
}

Expr parse_polish(std::string_view text, VarSet vocab) { return parse_polish(tokenize(text), vocab); }

namespace {

void emit(const Expr& e, TokenSeq& out) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      out.push_back(to_string(e.value()));
      return;
    case Expr::Kind::Var:
      out.emplace_back(name(e.var()));
      return;
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::neg) {
        out.emplace_back("-");
        out.emplace_back("0");
      } else {
        out.emplace_back(token_of(e.unary_op()));
      }
      emit(e.child(), out);
      return;
    case Expr::Kind::Binary:
      out.emplace_back(token_of(e.binary_op()));
      emit(e.left(), out);
      emit(e.right(), out);
      return;
  }
}

}  // namespace

TokenSeq print_polish(const Expr& e) {
  TokenSeq out;
  out.reserve(e.node_count() + 1);
  emit(e, out);
  return out;
}

std::string polish_string(const Expr& e) { return join(print_polish(e)); }

// ---- infix -----------------------------------------------------------------

namespace {

constexpr int kSum = 10;
constexpr int kNeg = 15;
constexpr int kProduct = 20;
constexpr int kPower = 30;
constexpr int kAtom = 100;

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: {
      const Rational& q = e.value();
      if (q < 0) return kNeg;
      return is_integer(q) ? kAtom : kProduct;
    }
    case Expr::Kind::Var: return kAtom;
    case Expr::Kind::Unary: return e.unary_op() == UnaryOp::neg ? kNeg : kAtom;
    case Expr::Kind::Binary:
      switch (e.binary_op()) {
        case BinaryOp::add:
        case BinaryOp::sub: return kSum;
        case BinaryOp::mul:
        case BinaryOp::div: return kProduct;
        case BinaryOp::pow: return kPower;
      }
  }
  return kAtom;
}

std::string infix(const Expr& e);

std::string wrap(const Expr& e, bool parens) {
  std::string s = infix(e);
  return parens ? "(" + s + ")" : s;
}

std::string infix(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const: return to_string(e.value());
    case Expr::Kind::Var: return std::string(name(e.var()));
    case Expr::Kind::Unary:
      if (e.unary_op() == UnaryOp::neg) return "-" + wrap(e.child(), precedence(e.child()) <= kNeg);
      return std::string(token_of(e.unary_op())) + "(" + infix(e.child()) + ")";
    case Expr::Kind::Binary: {
      const BinaryOp op = e.binary_op();
      const int p = precedence(e);
      const int pl = precedence(e.left());
      const int pr = precedence(e.right());
      if (op == BinaryOp::pow) return wrap(e.left(), pl <= kPower) + "^" + wrap(e.right(), pr != kAtom);
      bool non_assoc = op == BinaryOp::sub || op == BinaryOp::div;
      bool left_parens = pl < p;
      bool right_parens = pr < p || pr == kNeg || (non_assoc && pr == p);
      std::string sep = op == BinaryOp::add   ? " + "
                        : op == BinaryOp::sub ? " - "
                        : op == BinaryOp::mul ? "*"
                                              : "/";
      return wrap(e.left(), left_parens) + sep + wrap(e.right(), right_parens);
    }
  }
  return {};
}

}  // namespace

std::string print_infix(const Expr& e) { return infix(e); }

}  // namespace firstint
