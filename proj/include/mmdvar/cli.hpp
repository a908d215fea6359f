#pragma once

#include <ostream>

namespace mmdvar::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kSelftestFailed = 1,
  kEstimatorError = 2,  // estimator preconditions, bad kernel/bandwidth
  kIngestError = 3,     // unreadable or malformed input files
  kUsageError = 4,      // bad flags or harness configuration
};

/// Runs one command. Results go to `out`; failures produce a single-line
/// JSON diagnostic on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mmdvar::cli
