#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

namespace pmc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;

struct CommandInfo {
  std::string_view name;
  std::string_view summary;
};

const std::vector<CommandInfo>& commands();

/// Output directory: explicit flag, then $PMC_OUTPUT_DIR, then the config's
/// [output] dir, then the working directory.
std::filesystem::path resolve_output_dir(const std::optional<std::filesystem::path>& flag,
                                         const std::optional<std::filesystem::path>& config_dir);

/// Runs one subcommand and maps failures onto exit codes. Diagnostics go to
/// `err`, short summaries to `out`.
int run_command(std::string_view name, const std::filesystem::path& config,
                const std::optional<std::filesystem::path>& output_dir, std::ostream& out,
                std::ostream& err);

}  // namespace pmc::cli
