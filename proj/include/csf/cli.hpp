#pragma once

#include <ostream>

namespace csf::cli {

inline constexpr const char* kSchema = "csf-solitons/1";
/// Default directory for artifacts when --output is absent or relative.
inline constexpr const char* kOutputDirEnv = "CSF_SOLITONS_OUTPUT_DIR";

enum ExitCode { kOk = 0, kInvalidArguments = 2, kSolverFailure = 3, kUnwritableOutput = 4 };

/// Runs one command line. Artifacts without a destination go to `out`; error records
/// (one JSON object per failure) go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace csf::cli
