// Copyright 2026 The qkdmm Authors
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

#ifndef QKDMM_CLI_H
#define QKDMM_CLI_H

#include <iosfwd>
#include <map>
#include <string>

#include "qkdmm/decoy.h"

namespace qkdmm {

enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitAbort = 2,
    kExitViolation = 3,
};

/// Parsed `key = value` lines; `#` starts a comment. Throws
/// std::invalid_argument on malformed or duplicate keys.
std::map<std::string, std::string> parse_config(std::istream& in);

struct DecoyConfig {
    DecoyInputs inputs;
    double q_z = 0.0;
};

/// Builds decoy inputs from a parsed config. Unknown keys and missing
/// required keys are rejected.
DecoyConfig decoy_config_from(const std::map<std::string, std::string>& kv);

/// Entry point of the command-line tool.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qkdmm

#endif
