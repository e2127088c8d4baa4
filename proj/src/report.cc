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

#include "loopdyn/report.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace loopdyn {

void CsvTable::append(const TimeSeries &ts) {
    for (size_t t = 0; t < ts.time_sweeps.size(); t++) {
        for (const auto &s : ts.series) {
            rows.push_back({ts.time_sweeps[t], s.observable, s.mean[t], s.error[t], ts.n_trajectories});
        }
    }
}

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc()) {
        throw std::runtime_error("number formatting failed");
    }
    return std::string(buf, end);
}

namespace {

std::string quote_field(const std::string &s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

}  // namespace

void write_csv(std::ostream &out, const CsvTable &table) {
    out << "time_sweeps,observable,mean,stderr,n_traj\n";
    for (const auto &r : table.rows) {
        out << r.time_sweeps << ',' << quote_field(r.observable) << ',' << format_double(r.mean) << ','
            << format_double(r.stderr_of_mean) << ',' << r.n_traj << '\n';
    }
}

void write_report(const Report &report, const std::filesystem::path &dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "report.json", std::ios::binary);
        f << report.json.dump(2) << '\n';
        if (!f) {
            throw std::runtime_error("could not write " + (dir / "report.json").string());
        }
    }
    for (const auto &table : report.tables) {
        auto path = dir / (table.name + ".csv");
        std::ofstream f(path, std::ios::binary);
        write_csv(f, table);
        if (!f) {
            throw std::runtime_error("could not write " + path.string());
        }
    }
}

nlohmann::json to_json(const LinearFit &fit) {
    return {
        {"slope", fit.slope},
        {"intercept", fit.intercept},
        {"slope_stderr", fit.slope_error},
        {"intercept_stderr", fit.intercept_error},
        {"slope_ci95", fit.slope_ci95},
        {"r_squared", fit.r_squared},
        {"rms_residual", fit.rms_residual},
        {"residuals", fit.residuals},
        {"n_points", fit.n},
        {"with_intercept", fit.with_intercept},
    };
}

nlohmann::json to_json(const MeanError &me) {
    return {{"mean", me.mean}, {"stderr", me.error}, {"n", me.n}};
}

}  // namespace loopdyn
