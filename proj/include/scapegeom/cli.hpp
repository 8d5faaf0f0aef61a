#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scapegeom::cli {

/// Exit codes: 0 success, 1 domain or I/O error, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands: backproject, render, loss, filter, select-keyframes, pipeline, rasterize,
/// interpolate, sample, demo-scene. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scapegeom::cli
