#pragma once

namespace ran::cli {

// Exit codes: 0 success, 1 runtime or solver failure, 2 usage or validation error.
int run(int argc, const char* const* argv);

}  // namespace ran::cli
