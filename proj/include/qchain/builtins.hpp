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
 * Named built-in scenarios. Without a seed each uses its Hadamard setting;
 * with one, random parameters drawn from it. Documents carry an expect
 * block holding the closed-form values.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qchain/scenario.hpp"

namespace qchain {

/// scenario-a, scenario-b, scenario-c, wigner-friend, interference,
/// interference-registered, reduced.
const std::vector<std::string> &builtin_names();

/// Throws unknown_builtin.
ScenarioDocument builtin_document(const std::string &name, std::optional<std::uint64_t> seed = std::nullopt);

} // namespace qchain
