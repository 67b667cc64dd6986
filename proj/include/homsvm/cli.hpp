#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homsvm {

// Entry point shared by the binary and the tests. `args` excludes the
// program name. Exit codes: 0 success (and all verify checks passing),
// 1 at least one verify check failed, 2 usage or I/O error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace homsvm
