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

#include "firstint/expr.hpp"

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace firstint {

/// Raw Polish-notation tokens; may be syntactically invalid.
using TokenSeq = std::vector<std::string>;

/// Splits on ASCII whitespace.
TokenSeq tokenize(std::string_view text);
std::string join(const TokenSeq& tokens);

enum class TokenClass { BinaryOperator, UnaryOperator, Variable, Number, Unknown };

/// Classifies one token against the operator table and the variable vocabulary.
TokenClass classify_token(std::string_view token, VarSet vocab = VarSet::all());

/// Operand count minus binary-operator count minus one; zero is necessary
/// (not sufficient) for a well-formed prefix expression.
long arity_balance(const TokenSeq& tokens);

class ParseError : public std::runtime_error {
 public:
  enum class Kind { UnbalancedArity, UnknownToken };

  static ParseError unbalanced(long imbalance);
  static ParseError unknown(std::string token);

  Kind kind() const { return kind_; }
  /// Positive: surplus operands (trailing residue). Negative: missing operands.
  long imbalance() const { return imbalance_; }
  const std::string& token() const { return token_; }

 private:
  ParseError(Kind k, long imbalance, std::string token, const std::string& what)
      : std::runtime_error(what), kind_(k), imbalance_(imbalance), token_(std::move(token)) {}
  Kind kind_;
  long imbalance_ = 0;
  std::string token_;
};

/// Parses a complete prefix expression. Every token must be consumed.
/// "- 0 e" is read as the negation of e.
Expr parse_polish(const TokenSeq& tokens, VarSet vocab = VarSet::all());
Expr parse_polish(std::string_view text, VarSet vocab = VarSet::all());

TokenSeq print_polish(const Expr& e);
std::string polish_string(const Expr& e);

/// Conventional infix rendering with minimal parentheses, e.g. "log(x - y)/t".
std::string print_infix(const Expr& e);

}  // namespace firstint
