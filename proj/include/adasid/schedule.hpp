// Copyright 2026 The AdaSID Authors.
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

#ifndef ADASID_SCHEDULE_HPP
#define ADASID_SCHEDULE_HPP

#include <cstdint>
#include <utility>

namespace adasid {

struct ScheduleConfig {
  std::int64_t t_start = 10000;
  std::int64_t t_end = 200000;
  double lambda_col_min = 0.05;
  double lambda_cf_max = 0.25;

  void validate() const;  // throws ConfigError
};

struct ObjectiveWeights {
  double lambda_col = 1.0;
  double lambda_cf = 0.0;
};

/// Normalized progress clip((t - t_start)/(t_end - t_start), 0, 1).
/// t counts optimizer steps.
double progress(std::int64_t t, const ScheduleConfig& config);

/// lambda_col = 1 - (1 - lambda_col_min) * tau; lambda_cf = lambda_cf_max * tau.
ObjectiveWeights objective_weights(double tau, const ScheduleConfig& config);

}  // namespace adasid

#endif  // ADASID_SCHEDULE_HPP
