#pragma once

#include <ostream>

namespace lcstf::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,
    kUsage = 2,
    kConfig = 3,
    kIo = 4,
    kCheckpoint = 5,
};

/// Entry point behind the `lcstf` binary; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lcstf::cli
