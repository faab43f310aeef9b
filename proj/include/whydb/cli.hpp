#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace whydb::cli {

/// Runs one `whydb` invocation. Returns 0 on success, 1 on domain errors
/// (irreparable instance, failed precondition, oracle mismatch) and 2 on
/// usage or parse errors. Results go to `out`, one-line diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace whydb::cli
