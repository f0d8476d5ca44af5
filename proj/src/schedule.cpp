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

#include "adasid/schedule.hpp"

#include <algorithm>

#include "adasid/error.hpp"

namespace adasid {

void ScheduleConfig::validate() const {
  if (t_start < 0) throw ConfigError("schedule.t_start must be >= 0");
  if (t_start >= t_end) throw ConfigError("schedule.t_start must be < t_end");
  if (!(lambda_col_min >= 0.0 && lambda_col_min <= 1.0)) {
    throw ConfigError("schedule.lambda_col_min must be in [0, 1]");
  }
  if (!(lambda_cf_max >= 0.0)) {
    throw ConfigError("schedule.lambda_cf_max must be >= 0");
  }
}

double progress(std::int64_t t, const ScheduleConfig& config) {
  if (config.t_start >= config.t_end) {
    throw ConfigError("schedule.t_start must be < t_end");
  }
  const double raw = static_cast<double>(t - config.t_start) /
                     static_cast<double>(config.t_end - config.t_start);
  return std::clamp(raw, 0.0, 1.0);
}

ObjectiveWeights objective_weights(double tau, const ScheduleConfig& config) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw StateError("objective_weights: tau outside [0, 1]");
  }
  ObjectiveWeights w;
  w.lambda_col = 1.0 - (1.0 - config.lambda_col_min) * tau;
  w.lambda_cf = config.lambda_cf_max * tau;
  return w;
}

}  // namespace adasid
