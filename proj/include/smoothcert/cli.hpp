#pragma once

namespace smoothcert {

/// Command-line entry point. Subcommands: tv | bounds | certify | witness |
/// sweep. Returns 0 on success, 2 on usage or validation errors, 3 when a
/// requested verdict or internal consistency check fails.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace smoothcert
