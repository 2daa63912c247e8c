#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fosr {

/// Entry point of the `fosr` tool. `args` excludes the program name, e.g.
/// {"simulate", "--design", "1", "--out", "data"}. Returns the process exit
/// status, which is nonzero exactly when an error was written to `err`.
///
/// Subcommands: simulate, fit, study. Each accepts `--config file.json`, a flat
/// object whose keys are flag names without dashes; explicit flags win.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default worker count for `study`: $FOSR_WORKERS if set and positive, else 1.
int default_workers();

}  // namespace fosr
