// Copyright 2026 The CSAS Authors
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

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace csas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitBadArguments = 2;
inline constexpr int kExitInvalidConfig = 3;
inline constexpr int kExitRoundFailure = 4;

/// Environment variable consulted when --out is not given.
inline constexpr const char* kOutDirEnv = "CSAS_OUT_DIR";

// Entry point of the `csas` tool: run, sweep-m, compare-baseline,
// reproduce-paper. Returns the process exit code.
int cli_run(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

/// "10,20,30" or "10,20,...,100" (arithmetic progression from the first two
/// terms). Throws std::invalid_argument on malformed lists.
std::vector<std::size_t> parse_m_list(std::string_view text);

}  // namespace csas
