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

#ifndef LOOPDYN_REPORT_H
#define LOOPDYN_REPORT_H

#include <filesystem>
#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "loopdyn/stats.h"
#include "loopdyn/trajectories.h"

namespace loopdyn {

inline constexpr const char *kCodeVersion = "0.1.0";

/// One CSV file: columns time_sweeps, observable, mean, stderr, n_traj.
struct CsvTable {
    struct Row {
        int64_t time_sweeps;
        std::string observable;
        double mean;
        double stderr_of_mean;
        int64_t n_traj;
    };
    std::string name;  // file stem
    std::vector<Row> rows;

    /// Appends every (time, series) pair of `ts`, time-major.
    void append(const TimeSeries &ts);
};

struct Report {
    nlohmann::json json;
    std::vector<CsvTable> tables;
};

/// RFC 4180 output with '\n' line ends and shortest round-trip number formatting.
void write_csv(std::ostream &out, const CsvTable &table);

/// Writes report.json and one <name>.csv per table into `dir` (created if missing).
void write_report(const Report &report, const std::filesystem::path &dir);

/// Shortest decimal string that round-trips to `x`.
std::string format_double(double x);

nlohmann::json to_json(const LinearFit &fit);
nlohmann::json to_json(const MeanError &me);

}  // namespace loopdyn

#endif
