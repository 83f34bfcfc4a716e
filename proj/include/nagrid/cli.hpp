// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nagrid {

/// Entry point behind the nagrid binary; split out so tests can drive
/// subcommands in-process. Exit codes: 0 success, 1 usage error,
/// 2 verification failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace nagrid
