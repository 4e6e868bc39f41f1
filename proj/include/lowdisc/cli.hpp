#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lowdisc::cli {

inline constexpr std::string_view kToolName = "lowdisc";
inline constexpr std::string_view kVersion = "0.1.0";

/// Runs one subcommand (args exclude the program name). CSV goes to `out`
/// unless --out is given; failure records are JSON lines on `err`.
/// Returns 0 on success, 1 when a verification or hypothesis fails, 2 on
/// usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a, used for the configuration hash in report manifests.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace lowdisc::cli
