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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace loopdyn;

TEST(report, number_formatting_round_trips) {
    for (double x : {0.0, 1.0, 0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 5e-324}) {
        EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    }
    EXPECT_EQ(format_double(0.1), "0.1");
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(NAN), "nan");
    EXPECT_EQ(format_double(-INFINITY), "-inf");
}

TEST(report, csv_layout) {
    CsvTable t;
    t.name = "x";
    t.rows.push_back({0, "defect_density", 0.5, 0.01, 4});
    t.rows.push_back({10, "odd,\"name\"", 1.0 / 3.0, 0.0, 4});
    std::ostringstream out;
    write_csv(out, t);
    EXPECT_EQ(out.str(),
              "time_sweeps,observable,mean,stderr,n_traj\n"
              "0,defect_density,0.5,0.01,4\n"
              "10,\"odd,\"\"name\"\"\",0.3333333333333333,0,4\n");
}

TEST(report, table_from_time_series) {
    TimeSeries ts;
    ts.time_sweeps = {0, 5};
    ts.series = {{"a", {1, 2}, {0.1, 0.2}}, {"b", {3, 4}, {0.3, 0.4}}};
    ts.n_trajectories = 7;
    CsvTable t;
    t.append(ts);
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.rows[1].observable, "b");
    EXPECT_EQ(t.rows[1].time_sweeps, 0);
    EXPECT_EQ(t.rows[2].mean, 2.0);
    EXPECT_EQ(t.rows[3].n_traj, 7);
}

TEST(report, writes_directory) {
    auto dir = std::filesystem::temp_directory_path() / "loopdyn_report_test";
    std::filesystem::remove_all(dir);
    Report r;
    r.json = {{"b", 1}, {"a", {1.5, 2}}};
    r.tables.push_back({"one", {{1, "x", 2.0, 0.5, 3}}});
    write_report(r, dir / "nested");
    std::ifstream j(dir / "nested" / "report.json");
    std::stringstream js;
    js << j.rdbuf();
    EXPECT_EQ(js.str(), "{\n  \"a\": [\n    1.5,\n    2\n  ],\n  \"b\": 1\n}\n");
    std::ifstream c(dir / "nested" / "one.csv");
    std::stringstream cs;
    cs << c.rdbuf();
    EXPECT_EQ(cs.str(), "time_sweeps,observable,mean,stderr,n_traj\n1,x,2,0.5,3\n");
    std::filesystem::remove_all(dir);
}

TEST(report, fit_json) {
    LinearFit f;
    f.slope = 2;
    f.n = 3;
    auto j = to_json(f);
    EXPECT_EQ(j["slope"], 2.0);
    EXPECT_EQ(j["n_points"], 3);
    EXPECT_TRUE(j.contains("slope_ci95"));
    EXPECT_EQ(to_json(MeanError{1.0, 0.5, 4})["stderr"], 0.5);
}
