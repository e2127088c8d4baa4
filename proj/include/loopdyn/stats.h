// Copyright 2026 The loopdyn Authors
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

#ifndef LOOPDYN_STATS_H
#define LOOPDYN_STATS_H

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace loopdyn {

struct MeanError {
    double mean = 0.0;
    /// Standard error of the mean (sample standard deviation / sqrt(n)); 0 for n < 2.
    double error = 0.0;
    int64_t n = 0;
};

/// Two-pass mean and standard error, summed in index order.
MeanError mean_and_error(const std::vector<double> &values);

/// Delete-one jackknife of f(mean of the samples). `samples` are per-trajectory values.
MeanError jackknife(const std::vector<double> &samples, const std::function<double(double)> &f);

/// Ordinary least squares y = intercept + slope * x (or y = slope * x).
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_error = 0.0;
    double intercept_error = 0.0;
    /// Half-width of the 95% Student-t confidence interval on the slope.
    double slope_ci95 = 0.0;
    double r_squared = 0.0;
    /// sqrt(mean squared residual).
    double rms_residual = 0.0;
    std::vector<double> residuals;
    int64_t n = 0;
    bool with_intercept = true;
};

/// Throws std::invalid_argument if the sizes differ or there are too few points
/// (3 with intercept, 2 without) or x is constant.
LinearFit fit_linear(const std::vector<double> &x, const std::vector<double> &y, bool with_intercept = true);

/// Two-sided 95% Student-t quantile for `dof` degrees of freedom.
double student_t95(int64_t dof);

}  // namespace loopdyn

#endif
