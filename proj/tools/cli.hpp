#pragma once

#include <string>
#include <vector>

namespace hawkes_mf::cli {

/// Exit codes: 0 success, 1 a verification verdict failed, 2 usage or
/// configuration error, 3 any other runtime error.
int run(const std::vector<std::string>& args);

} // namespace hawkes_mf::cli
