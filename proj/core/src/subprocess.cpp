#include "devstyle/subprocess.hpp"

#include <cstdio>
#include <stdexcept>

namespace devstyle {

std::string shell_quote(const std::string& arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += "'";
    return out;
}

CommandResult run_command(const std::vector<std::string>& argv) {
    if (argv.empty()) throw std::invalid_argument("run_command: empty argv");
    std::string cmd;
    for (const auto& a : argv) {
        if (!cmd.empty()) cmd += ' ';
        cmd += shell_quote(a);
    }
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed for: " + cmd);
    CommandResult result;
    char buf[1 << 16];
    std::size_t n;
    while ((n = ::fread(buf, 1, sizeof(buf), pipe)) > 0) {
        result.output.append(buf, n);
    }
    const int status = ::pclose(pipe);
    result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string run_command_checked(const std::vector<std::string>& argv) {
    CommandResult r = run_command(argv);
    if (r.exit_code != 0) {
        std::string cmd;
        for (const auto& a : argv) {
            if (!cmd.empty()) cmd += ' ';
            cmd += a;
        }
        throw std::runtime_error("command failed (exit " + std::to_string(r.exit_code) +
                                 "): " + cmd);
    }
    return std::move(r.output);
}

} // namespace devstyle
