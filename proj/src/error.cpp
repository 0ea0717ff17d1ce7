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

#include "qchain/error.hpp"

namespace qchain {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::syntax_error: return "syntax_error";
    case ErrorCode::schema_error: return "schema_error";
    case ErrorCode::unknown_label: return "unknown_label";
    case ErrorCode::duplicate_label: return "duplicate_label";
    case ErrorCode::non_unitary: return "non_unitary";
    case ErrorCode::invalid_observable: return "invalid_observable";
    case ErrorCode::invalid_state: return "invalid_state";
    case ErrorCode::invalid_event: return "invalid_event";
    case ErrorCode::time_collision: return "time_collision";
    case ErrorCode::unordered_events: return "unordered_events";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::index_out_of_range: return "index_out_of_range";
    case ErrorCode::capacity_exceeded: return "capacity_exceeded";
    case ErrorCode::missing_projector_families: return "missing_projector_families";
    case ErrorCode::unsupported_version: return "unsupported_version";
    case ErrorCode::unknown_builtin: return "unknown_builtin";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::numerical_invariant: return "numerical_invariant";
    }
    return "unknown";
}

int exit_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::capacity_exceeded: return 3;
    case ErrorCode::numerical_invariant: return 4;
    default: return 2;
    }
}

namespace {
std::string compose(ErrorCode code, const std::string &message, const std::string &path) {
    std::string out{to_string(code)};
    out += ": ";
    out += message;
    if (!path.empty()) {
        out += " (at ";
        out += path;
        out += ")";
    }
    return out;
}
} // namespace

Error::Error(ErrorCode code, const std::string &message, std::string path)
    : std::runtime_error(compose(code, message, path)), code_(code), path_(std::move(path)),
      message_(message) {}

} // namespace qchain
