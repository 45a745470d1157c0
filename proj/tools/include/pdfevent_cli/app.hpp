#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pdfevent::cli {

/// Runs one `pdfevent` invocation. `args` excludes the program name.
/// Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pdfevent::cli
