#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace shearlet {

// Command-line driver: `<tool> <subcommand> --config <path> [--out <dir>]
// [--seed <u64>] [--threads <k>]`. Returns 0 when every check passes, 1 when
// at least one check fails, 2 on usage or configuration errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace shearlet
