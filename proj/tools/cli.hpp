// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace skelgen::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kIoError = 2,
    kParseError = 3,
    kNoStructure = 4,
    kOcrFailure = 5,
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args);

}  // namespace skelgen::cli
