// Copyright 2026 The admitsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef ADMITSIM_THEOREMS_H_
#define ADMITSIM_THEOREMS_H_

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "admitsim/population.h"

namespace admitsim {

enum class TheoremId { kQuota = 1, kPlusFactor = 2, kTopPercentage = 3 };

/// "T1", "T2", "T3".
std::string_view to_string(TheoremId id);

/// Strict inequalities are asserted with this margin.
inline constexpr double kStrictMargin = 1e-10;

/// Outcome of checking one theorem on one instance.
///
/// `conclusion_holds` is always evaluated. When some precondition is false
/// the instance is outside the theorem (`covered() == false`) and the
/// conclusion is informational only.
struct TheoremReport {
  TheoremId theorem = TheoremId::kQuota;
  std::map<std::string, bool> preconditions;
  bool conclusion_holds = false;
  std::map<std::string, double> witness;
  std::string note;

  bool covered() const;
  /// Preconditions met and conclusion holds.
  bool passed() const { return covered() && conclusion_holds; }
};

/// Quota-based admission. With eta' from the quota split, the rearranged
/// necessary condition reads sup_q F_rich/F_poor >= eta / eta'. When it
/// fails strictly (lhs < rhs), nonURM applicants in the poor region must
/// face a more competitive bar than URM applicants in the rich region:
/// q_nonURM^poor < q_URM^rich. The converse is not implied and is reported
/// as not covered.
TheoremReport check_theorem1(const Population& pop, const Capacity& g, double eta_quota);

/// Holistic review with plus factors (equal shapes only; unequal shapes
/// raise an unsupported-setting error). Preconditions are q_o below the
/// density crossing and eta_dagger in [q_o / q_tilde, 1). Conclusion:
///   F_rich(q_dagger/eta) - F_rich(q_o) > F_poor(q_dagger/eta) - F_poor(q_o).
TheoremReport check_theorem2(const Population& pop, const Capacity& g, double eta_dagger);

/// Top-percentage plan. The poor region's gain over the default equals the
/// rich region's loss; with equal shapes q_poor / q_rich = theta_poor / theta_rich.
TheoremReport check_theorem3(const Population& pop, const Capacity& g);

}  // namespace admitsim

#endif  // ADMITSIM_THEOREMS_H_
