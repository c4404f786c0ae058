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

#include "firstint/budget.hpp"

namespace firstint {

namespace {
thread_local Budget* active_budget = nullptr;
}

Budget Budget::steps(std::uint64_t max_steps) {
  Budget b;
  b.max_steps_ = max_steps;
  return b;
}

Budget Budget::seconds(double limit) {
  Budget b;
  b.deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(limit));
  return b;
}

void Budget::tick() {
  ++used_;
  if (max_steps_ && used_ > *max_steps_) throw BudgetExceeded{};
  // Reading the clock on every step is measurable; sample it.
  if (deadline_ && (used_ & 0x3ff) == 0 && Clock::now() > *deadline_) throw BudgetExceeded{};
}

ScopedBudget::ScopedBudget(Budget& b) : previous_(active_budget) { active_budget = &b; }

ScopedBudget::~ScopedBudget() { active_budget = previous_; }

void budget_tick() {
  if (active_budget) active_budget->tick();
}

}  // namespace firstint
