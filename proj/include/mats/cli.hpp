#ifndef MATS_CLI_HEADER_FILE
#define MATS_CLI_HEADER_FILE

#include <iosfwd>

namespace mats {
    enum ExitCode : int { kExitOk = 0, kExitConfigError = 1, kExitRuntimeError = 2 };

    /**
     * @brief Entry point of the `mats` tool.
     *
     * Subcommands: run <config>, bench <preset>, validate <problem>, bound.
     * Returns 0 on success, 1 on usage or configuration errors and 2 on
     * runtime failures.
     */
    int cliMain(int argc, const char * const * argv, std::ostream & out, std::ostream & err);
}

#endif
