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

#include "loopdyn/stats.h"

#include <gtest/gtest.h>

#include <cmath>

#include "loopdyn/rng.h"

using namespace loopdyn;

TEST(stats, mean_and_error) {
    auto me = mean_and_error({2, 4, 4, 4, 5, 5, 7, 9});
    EXPECT_DOUBLE_EQ(me.mean, 5.0);
    EXPECT_DOUBLE_EQ(me.error, std::sqrt(32.0 / 7.0 / 8.0));
    EXPECT_EQ(me.n, 8);
    auto one = mean_and_error({3.5});
    EXPECT_EQ(one.mean, 3.5);
    EXPECT_EQ(one.error, 0.0);
    EXPECT_EQ(mean_and_error({}).n, 0);
}

TEST(stats, jackknife_of_linear_function_is_the_standard_error) {
    std::vector<double> x{1.5, -2, 0.25, 8, 3, 3, 1};
    auto plain = mean_and_error(x);
    auto jk = jackknife(x, [](double m) { return 2 * m + 1; });
    EXPECT_NEAR(jk.mean, 2 * plain.mean + 1, 1e-12);
    EXPECT_NEAR(jk.error, 2 * plain.error, 1e-12);
    EXPECT_THROW(jackknife({1.0}, [](double m) { return m; }), std::invalid_argument);
}

TEST(stats, jackknife_of_log_matches_delta_method) {
    Rng rng(3);
    std::vector<double> x(4000);
    for (auto &v : x) {
        v = 2.0 + rng.uniform();
    }
    auto plain = mean_and_error(x);
    auto jk = jackknife(x, [](double m) { return std::log(m); });
    EXPECT_NEAR(jk.mean, std::log(plain.mean), 1e-3);
    EXPECT_NEAR(jk.error, plain.error / plain.mean, 1e-3 * plain.error / plain.mean);
}

TEST(stats, exact_line) {
    auto fit = fit_linear({0, 1, 2, 3, 4}, {1, 3, 5, 7, 9});
    EXPECT_NEAR(fit.slope, 2.0, 1e-12);
    EXPECT_NEAR(fit.intercept, 1.0, 1e-12);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(fit.rms_residual, 0.0, 1e-12);
    EXPECT_EQ(fit.n, 5);
    EXPECT_EQ(fit.residuals.size(), 5u);
}

TEST(stats, textbook_errors) {
    std::vector<double> x{1, 2, 3, 4, 5, 6}, y{1.1, 1.9, 3.2, 3.9, 5.3, 5.8};
    auto fit = fit_linear(x, y);
    double n = 6, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < 6; i++) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < 6; i++) {
        double r = y[i] - intercept - slope * x[i];
        ss += r * r;
    }
    double s2 = ss / (n - 2);
    double sxx_c = sxx - sx * sx / n;
    EXPECT_NEAR(fit.slope, slope, 1e-12);
    EXPECT_NEAR(fit.intercept, intercept, 1e-12);
    EXPECT_NEAR(fit.slope_error, std::sqrt(s2 / sxx_c), 1e-12);
    EXPECT_NEAR(fit.intercept_error, std::sqrt(s2 * (1 / n + sx * sx / n / n / sxx_c)), 1e-12);
    EXPECT_NEAR(fit.slope_ci95, student_t95(4) * fit.slope_error, 1e-12);
}

TEST(stats, through_origin) {
    auto fit = fit_linear({1, 2, 4}, {3, 6, 12}, false);
    EXPECT_NEAR(fit.slope, 3.0, 1e-12);
    EXPECT_EQ(fit.intercept, 0.0);
    EXPECT_FALSE(fit.with_intercept);
    EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
    EXPECT_NO_THROW(fit_linear({1, 2}, {1, 2}, false));
}

TEST(stats, fit_rejects_bad_input) {
    EXPECT_THROW(fit_linear({1, 2}, {1, 2}), std::invalid_argument);
    EXPECT_THROW(fit_linear({1, 2, 3}, {1, 2}), std::invalid_argument);
    EXPECT_THROW(fit_linear({2, 2, 2}, {1, 2, 3}), std::invalid_argument);
    EXPECT_THROW(fit_linear({1}, {1}, false), std::invalid_argument);
}

TEST(stats, student_t) {
    EXPECT_NEAR(student_t95(1), 12.7062, 1e-4);
    EXPECT_NEAR(student_t95(10), 2.2281, 1e-4);
    EXPECT_NEAR(student_t95(100000), 1.95997, 1e-4);
}
