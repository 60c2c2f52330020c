#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace neurosvm::cli {

/// Exit codes: 0 success, 1 usage or validation failure, 2 internal failure.
int run(const std::vector<std::string> &args, std::istream &in, std::ostream &out, std::ostream &err);

}  // namespace neurosvm::cli
