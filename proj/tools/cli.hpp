#pragma once

#include <iosfwd>

namespace shimura::cli {

// exit status: 0 ok, 1 computational failure, 2 usage error
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shimura::cli
