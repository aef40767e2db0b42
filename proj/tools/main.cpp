#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pmc: cavity magnonics coupling and Purcell-regime analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pmc 0.1.0");

  std::string config;
  std::string output_dir;
  for (const auto& info : pmc::cli::commands()) {
    auto* sub = app.add_subcommand(std::string(info.name), std::string(info.summary));
    sub->add_option("config", config, "INI configuration file")->required();
    sub->add_option("-o,--output-dir", output_dir,
                    "directory for output files (overrides PMC_OUTPUT_DIR and [output] dir)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pmc::cli::kExitConfig;
  }

  const auto* chosen = app.get_subcommands().front();
  std::optional<std::filesystem::path> out;
  if (!output_dir.empty()) out = output_dir;
  return pmc::cli::run_command(chosen->get_name(), config, out, std::cout, std::cerr);
}
