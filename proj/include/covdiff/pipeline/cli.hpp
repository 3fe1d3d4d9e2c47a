#pragma once

namespace covdiff::pipeline {

// Subcommands: gen-data, train, infer, eval, report.
// Exit codes: 0 success, 1 usage error, 2 data error.
int run_cli(int argc, const char* const* argv);

}  // namespace covdiff::pipeline
