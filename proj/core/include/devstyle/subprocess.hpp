#pragma once

#include <string>
#include <vector>

namespace devstyle {

struct CommandResult {
    std::string output;
    int exit_code = -1;
};

/// Quote one argv element for /bin/sh.
std::string shell_quote(const std::string& arg);

/// Run a command through popen and capture stdout. Stderr is left attached to
/// the parent's stderr so git diagnostics stay visible.
CommandResult run_command(const std::vector<std::string>& argv);

/// Like run_command but throws on non-zero exit.
std::string run_command_checked(const std::vector<std::string>& argv);

} // namespace devstyle
