// Copyright 2026 The qchain Authors
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

/**
 * @file
 * Running a scenario document and printing the result. Rows are sorted by
 * their outcome-label tuple and probabilities are written with 12
 * significant digits, so output is byte-stable.
 */

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qchain/scenario.hpp"

namespace qchain {

struct ReportRow {
    std::vector<std::string> outcome;
    /// Aligned with Report::columns.
    std::vector<double> values;
};

struct Report {
    int format_version = kFormatVersion;
    std::string scenario;
    std::string query;
    std::string engine;
    /// Header of the outcome columns (observation names).
    std::vector<std::string> observations;
    std::vector<std::string> columns;
    std::vector<ReportRow> rows;

    std::optional<double> total;
    std::optional<double> max_abs_diff;
    std::optional<bool> consistent;
    std::optional<double> max_off_diagonal;
    std::optional<double> tolerance;
};

struct RunOptions {
    std::optional<EngineSelection> engine;
    std::optional<double> tolerance;
};

/**
 * Executes the document's query. Throws numerical_invariant when the total
 * probability is off by more than the tolerance or, with both engines, when
 * they disagree by more than it.
 */
Report run(const ScenarioDocument &doc, const RunOptions &options = {});

/// Throws numerical_invariant when |sum - 1| > tol.
void check_normalization(const Distribution &dist, double tol);

enum class Format { table, json, csv };

/// Throws schema_error.
Format parse_format(std::string_view text);

std::string emit(const Report &report, Format format);

/// Inverse of emit(..., Format::json).
Report parse_report(std::string_view json_text);

/// Worst |expected - reported| over the expected entries, against the first
/// value column; unknown_label when an expected outcome is missing.
double expectation_deviation(const Report &report, const ExpectSpec &expect);

/// Value rounded to 12 significant digits (what emit prints).
double round12(double x);

} // namespace qchain
