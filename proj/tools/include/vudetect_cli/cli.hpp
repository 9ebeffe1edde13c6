#pragma once

namespace vudetect::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFindings = 1;  // scan only
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitConfig = 78;

/// Parses arguments, dispatches the subcommand and maps failures to exit codes.
int run(int argc, const char* const* argv);

}  // namespace vudetect::cli
