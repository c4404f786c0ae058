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
#include "firstint/simplify.hpp"

#include <stdexcept>
#include <vector>

namespace firstint {

class UnknownVariable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// dx_i/dt = rhs_i for each state variable x_i.
struct OdeSystem {
  std::vector<VarId> state_vars;
  std::vector<Expr> rhs;

  OdeSystem() = default;
  /// Throws std::invalid_argument on a length mismatch, a repeated variable,
  /// or t used as a state variable.
  OdeSystem(std::vector<VarId> vars, std::vector<Expr> rhs);

  /// The usual planar system over [x, y].
  static OdeSystem planar(Expr f, Expr g);

  std::size_t size() const { return state_vars.size(); }
  VarSet state_set() const;
};

Expr partial_derivative(const Expr& e, VarId v);

/// simplify(dV/dt + sum_i dV/dx_i * rhs_i). Throws UnknownVariable when V
/// uses a variable that is neither a state variable nor t.
Expr total_derivative(const Expr& v, const OdeSystem& sys);
canon::CExpr total_derivative(const canon::CExpr& v, const OdeSystem& sys);

struct JacobianBlocks {
  std::vector<std::vector<Expr>> ja;  // m x (n - m)
  std::vector<std::vector<Expr>> jb;  // m x m
  std::vector<Expr> dv_dt;            // length m
};

/// Throws DimensionMismatch unless (xa, xb) partitions the state variables
/// and xb.size() == vs.size().
JacobianBlocks jacobian_blocks(const std::vector<Expr>& vs, const std::vector<VarId>& xa,
                               const std::vector<VarId>& xb, const OdeSystem& sys);
/// Same, with the state variables taken to be xa followed by xb.
JacobianBlocks jacobian_blocks(const std::vector<Expr>& vs, const std::vector<VarId>& xa,
                               const std::vector<VarId>& xb);

struct Verification {
  bool verdict = false;
  Tier tier = Tier::Symbolic;
  Expr witness;           // simplified dV/dt
  bool constant = false;  // rejected by the non-constancy screen
};

/// V is a first integral when dV/dt vanishes identically and V passes the
/// non-constancy screen: simplify(V) is not a constant, V uses at least one
/// state variable, and some partial derivative dV/dx_i is not identically
/// zero. Throws Inconclusive when the zero tests cannot decide.
Verification verify_first_integral(const Expr& v, const OdeSystem& sys, const ZeroTestConfig& cfg = {});

}  // namespace firstint
