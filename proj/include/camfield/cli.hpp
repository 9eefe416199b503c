#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace camfield {

/// Entry point of the `camfield` tool. `args` excludes the program name.
/// Returns the process exit status; diagnostics go to `err`.
int cli_main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace camfield
