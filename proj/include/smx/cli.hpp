#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smx {

/// Exit codes of the command-line driver.
enum ExitCode : int { exit_ok = 0, exit_check_failed = 1, exit_error = 2 };

/// Runs `smx <args...>` (without the program name). Reports go to `out`;
/// errors are written to `err` as {"schema", "error": {"code", "message"}}.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace smx
