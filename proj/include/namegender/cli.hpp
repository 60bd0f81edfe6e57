#pragma once

namespace namegender {

// Entry point behind tools/main.cpp. Exit codes: 0 success (including
// abstentions), 1 runtime/upstream failure, 2 usage or configuration error.
int run_cli(int argc, const char* const* argv);

}  // namespace namegender
