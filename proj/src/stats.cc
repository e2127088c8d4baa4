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

#include <Eigen/Dense>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <stdexcept>

namespace loopdyn {

MeanError mean_and_error(const std::vector<double> &values) {
    MeanError out;
    out.n = static_cast<int64_t>(values.size());
    if (values.empty()) {
        return out;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    out.mean = sum / out.n;
    if (out.n > 1) {
        double ss = 0.0;
        for (double v : values) {
            ss += (v - out.mean) * (v - out.mean);
        }
        out.error = std::sqrt(ss / (out.n - 1) / out.n);
    }
    return out;
}

MeanError jackknife(const std::vector<double> &samples, const std::function<double(double)> &f) {
    const int64_t n = static_cast<int64_t>(samples.size());
    if (n < 2) {
        throw std::invalid_argument("jackknife needs at least 2 samples");
    }
    double total = 0.0;
    for (double v : samples) {
        total += v;
    }
    MeanError out;
    out.n = n;
    out.mean = f(total / n);
    std::vector<double> leave(n);
    double avg = 0.0;
    for (int64_t i = 0; i < n; i++) {
        leave[i] = f((total - samples[i]) / (n - 1));
        avg += leave[i];
    }
    avg /= n;
    double ss = 0.0;
    for (double v : leave) {
        ss += (v - avg) * (v - avg);
    }
    out.error = std::sqrt(ss * (n - 1) / n);
    return out;
}

double student_t95(int64_t dof) {
    if (dof < 1) {
        throw std::invalid_argument("t quantile needs dof >= 1");
    }
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.975);
}

LinearFit fit_linear(const std::vector<double> &x, const std::vector<double> &y, bool with_intercept) {
    const int64_t n = static_cast<int64_t>(x.size());
    const int p = with_intercept ? 2 : 1;
    if (static_cast<int64_t>(y.size()) != n) {
        throw std::invalid_argument("fit_linear: x and y sizes differ");
    }
    if (n < p + 1) {
        throw std::invalid_argument("fit_linear: need at least " + std::to_string(p + 1) + " points, got " +
                                    std::to_string(n));
    }
    Eigen::MatrixXd a(n, p);
    Eigen::VectorXd b(n);
    for (int64_t i = 0; i < n; i++) {
        a(i, 0) = x[i];
        if (with_intercept) {
            a(i, 1) = 1.0;
        }
        b[i] = y[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < p) {
        throw std::invalid_argument("fit_linear: degenerate design (constant x)");
    }
    Eigen::VectorXd coef = qr.solve(b);
    Eigen::VectorXd res = b - a * coef;

    LinearFit fit;
    fit.n = n;
    fit.with_intercept = with_intercept;
    fit.slope = coef[0];
    fit.intercept = with_intercept ? coef[1] : 0.0;
    fit.residuals.assign(res.data(), res.data() + n);
    double sse = res.squaredNorm();
    fit.rms_residual = std::sqrt(sse / n);
    double ybar = with_intercept ? b.mean() : 0.0;
    double sst = (b.array() - ybar).matrix().squaredNorm();
    fit.r_squared = sst > 0 ? 1.0 - sse / sst : 1.0;
    Eigen::MatrixXd cov = (a.transpose() * a).inverse() * (sse / (n - p));
    fit.slope_error = std::sqrt(cov(0, 0));
    fit.intercept_error = with_intercept ? std::sqrt(cov(1, 1)) : 0.0;
    fit.slope_ci95 = student_t95(n - p) * fit.slope_error;
    return fit;
}

}  // namespace loopdyn
