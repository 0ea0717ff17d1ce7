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

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qchain {

/// Machine-readable failure categories shared by the library, the scenario
/// loader and the command line front end.
enum class ErrorCode {
    syntax_error,
    schema_error,
    unknown_label,
    duplicate_label,
    non_unitary,
    invalid_observable,
    invalid_state,
    invalid_event,
    time_collision,
    unordered_events,
    dimension_mismatch,
    index_out_of_range,
    capacity_exceeded,
    missing_projector_families,
    unsupported_version,
    unknown_builtin,
    io_error,
    numerical_invariant,
};

inline constexpr std::array kAllErrorCodes = {
    ErrorCode::syntax_error,       ErrorCode::schema_error,
    ErrorCode::unknown_label,      ErrorCode::duplicate_label,
    ErrorCode::non_unitary,        ErrorCode::invalid_observable,
    ErrorCode::invalid_state,      ErrorCode::invalid_event,
    ErrorCode::time_collision,     ErrorCode::unordered_events,
    ErrorCode::dimension_mismatch, ErrorCode::index_out_of_range,
    ErrorCode::capacity_exceeded,  ErrorCode::missing_projector_families,
    ErrorCode::unsupported_version, ErrorCode::unknown_builtin,
    ErrorCode::io_error,           ErrorCode::numerical_invariant,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit status for a failure of the given category:
/// 2 validation, 3 capacity, 4 numerical invariant.
int exit_status(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message, std::string path = {});

    ErrorCode code() const noexcept { return code_; }
    /// JSON-pointer-like location inside a scenario document, when known.
    const std::string &path() const noexcept { return path_; }
    const std::string &message() const noexcept { return message_; }

  private:
    ErrorCode code_;
    std::string path_;
    std::string message_;
};

} // namespace qchain
