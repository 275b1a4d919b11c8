#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "qcomm/error.hpp"

namespace qcomm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;        // check or match-set did not pass
inline constexpr int kExitValidation = 2;  // bad input
inline constexpr int kExitNumerical = 3;   // numerical failure

int exit_code_for(ErrorCode code) noexcept;

/// Runs one command line (without the program name), writing reports to out
/// and diagnostics to err. Never throws.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace qcomm::cli
