// Copyright 2026 The RQML Authors
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rqml/config.hpp"
#include "rqml/experiments.hpp"
#include "rqml/protocol.hpp"

namespace rqml {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal, '.' separator regardless of locale.
std::string format_double(double x);

Json config_json(const ExperimentConfig& cfg);
Json fit_json(const FitResult& fit);
Json session_summary_json(const SessionResult& r);

/// '#'-prefixed key=value lines describing the run that produced a CSV.
std::string csv_preamble(const ExperimentConfig& cfg, std::string_view extra = {});

/// One JSON object per line: a config record, then one record per trial.
std::string trace_jsonl(const ExperimentConfig& cfg, const SessionResult& r);

/// n, P_L, P_S at N_L - 1 and at every step of the EDF.
std::string survival_csv(const ExperimentConfig& cfg, const SurvivalCurve& curve);

void write_file(const std::filesystem::path& path, std::string_view contents);

/// Parses the "# key=value" preamble of a CSV written by this tool.
std::vector<std::pair<std::string, std::string>> read_csv_preamble(std::string_view text);

/// Rows of numeric CSV data (preamble and header skipped). The header names
/// are returned through `columns`.
std::vector<std::vector<double>> read_csv_table(std::string_view text,
                                                std::vector<std::string>& columns);

}  // namespace rqml
