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

#include "firstint/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace firstint {

OdeSystem::OdeSystem(std::vector<VarId> vars, std::vector<Expr> r) : state_vars(std::move(vars)), rhs(std::move(r)) {
  if (state_vars.size() != rhs.size())
    throw std::invalid_argument("OdeSystem: " + std::to_string(state_vars.size()) + " state variables but " +
                                std::to_string(rhs.size()) + " right-hand sides");
  VarSet seen;
  for (VarId v : state_vars) {
    if (v == VarId::t) throw std::invalid_argument("OdeSystem: t cannot be a state variable");
    if (seen.contains(v)) throw std::invalid_argument("OdeSystem: repeated state variable");
    seen.insert(v);
  }
}

OdeSystem OdeSystem::planar(Expr f, Expr g) { return OdeSystem({VarId::x, VarId::y}, {std::move(f), std::move(g)}); }

VarSet OdeSystem::state_set() const {
  VarSet s;
  for (VarId v : state_vars) s.insert(v);
  return s;
}

Expr partial_derivative(const Expr& e, VarId v) {
  return canon::to_expr(simplify(canon::diff(canon::from_expr(e), v)));
}

namespace {

void check_variables(VarSet used, const OdeSystem& sys) {
  VarSet allowed = sys.state_set();
  allowed.insert(VarId::t);
  if (!used.subset_of(allowed))
    throw UnknownVariable("variables " + to_string(used) + " not covered by state variables " +
                          to_string(sys.state_set()) + " and t");
}

}  // namespace

canon::CExpr total_derivative(const canon::CExpr& v, const OdeSystem& sys) {
  check_variables(v.variables(), sys);
  std::vector<canon::CExpr> parts;
  parts.push_back(canon::diff(v, VarId::t));
  for (std::size_t i = 0; i < sys.size(); ++i) {
    canon::CExpr d = canon::diff(v, sys.state_vars[i]);
    if (d.is_zero()) continue;
    parts.push_back(canon::mul(d, canon::from_expr(sys.rhs[i])));
  }
  return simplify(canon::add(std::move(parts)));
}

Expr total_derivative(const Expr& v, const OdeSystem& sys) {
  return canon::to_expr(total_derivative(canon::from_expr(v), sys));
}

JacobianBlocks jacobian_blocks(const std::vector<Expr>& vs, const std::vector<VarId>& xa, const std::vector<VarId>& xb,
                               const OdeSystem& sys) {
  if (xb.size() != vs.size())
    throw DimensionMismatch("jacobian_blocks: " + std::to_string(vs.size()) + " integrals but " +
                            std::to_string(xb.size()) + " solved variables");
  VarSet cover;
  for (VarId v : xa) cover.insert(v);
  for (VarId v : xb) cover.insert(v);
  if (xa.size() + xb.size() != sys.size() || !(cover == sys.state_set()))
    throw DimensionMismatch("jacobian_blocks: partition does not cover the state variables exactly");

  JacobianBlocks out;
  for (const Expr& v : vs) {
    canon::CExpr c = canon::from_expr(v);
    auto d = [&](VarId w) { return canon::to_expr(simplify(canon::diff(c, w))); };
    std::vector<Expr> row_a, row_b;
    for (VarId w : xa) row_a.push_back(d(w));
    for (VarId w : xb) row_b.push_back(d(w));
    out.ja.push_back(std::move(row_a));
    out.jb.push_back(std::move(row_b));
    out.dv_dt.push_back(d(VarId::t));
  }
  return out;
}

JacobianBlocks jacobian_blocks(const std::vector<Expr>& vs, const std::vector<VarId>& xa,
                               const std::vector<VarId>& xb) {
  std::vector<VarId> vars = xa;
  vars.insert(vars.end(), xb.begin(), xb.end());
  VarSet seen;
  for (VarId v : vars) {
    if (v == VarId::t || seen.contains(v)) throw DimensionMismatch("jacobian_blocks: invalid partition");
    seen.insert(v);
  }
  return jacobian_blocks(vs, xa, xb, OdeSystem(vars, std::vector<Expr>(vars.size())));
}

namespace {

// Locally constant V (all state partials vanish) is rejected even when its
// values differ between components of the domain, e.g. x/sqrt(x^2).
bool nonconstant(const canon::CExpr& v, const OdeSystem& sys, const ZeroTestConfig& cfg) {
  bool inconclusive = false;
  for (VarId w : sys.state_vars) {
    if (!v.variables().contains(w)) continue;
    ZeroTestOutcome z = zero_test(canon::diff(v, w), cfg);
    if (z.verdict == ZeroTestOutcome::Verdict::NonZero) return true;
    if (z.verdict == ZeroTestOutcome::Verdict::Inconclusive) inconclusive = true;
  }
  if (inconclusive) throw Inconclusive("non-constancy screen: gradient undecided");
  return false;
}

}  // namespace

Verification verify_first_integral(const Expr& v, const OdeSystem& sys, const ZeroTestConfig& cfg) {
  canon::CExpr c = canon::from_expr(v);
  canon::CExpr dv = total_derivative(c, sys);
  Verification out;
  out.witness = canon::to_expr(dv);

  canon::CExpr s = simplify(c);
  if (s.is_num() || (s.variables() & sys.state_set()).empty()) {
    out.constant = true;
    return out;
  }
  if (!nonconstant(s, sys, cfg)) {
    out.constant = true;
    out.tier = Tier::Numeric;
    return out;
  }
  ZeroTestOutcome z = zero_test(dv, cfg);
  if (z.verdict == ZeroTestOutcome::Verdict::Inconclusive)
    throw Inconclusive("zero test inconclusive: " + std::to_string(z.probes_ok) + " probe points in domain");
  out.verdict = z.zero();
  out.tier = z.tier;
  return out;
}

}  // namespace firstint
