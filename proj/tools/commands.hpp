#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lse::cli {

// exit statuses
inline constexpr int exit_ok = 0;
inline constexpr int exit_verify_failed = 1;
inline constexpr int exit_bad_input = 2;
inline constexpr int exit_dimension = 3;
inline constexpr int exit_not_converged = 4;

/// Runs one command. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Sets the spdlog level from LSE_LOG (error, info or debug; default error).
void configure_logging();

}  // namespace lse::cli
