#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace responsekit::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitCriteriaFailed = 2;

// Entry point shared by the binary and the tests. args excludes argv[0].
// Human-readable progress goes to `out`; failures print
// {"error": {"code", "message", "field"}} to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace responsekit::cli
