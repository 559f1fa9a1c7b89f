#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vgrof/cli.hpp"

int main(int argc, char** argv) {
  namespace cli = vgrof::cli;
  CLI::App app{"Variable-growth ROF denoising with optimality certificates"};
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  app.add_option("command", command,
                 "denoise | certify | flow | check-conditions | conjugate-table")
      ->required();
  app.add_option("-c,--config", config_path, "key = value configuration file");
  app.add_option("-s,--set", sets, "override a configuration key (key=value)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help() << cli::kUsageText;
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << cli::error_json(cli::kUsage, "usage", e.what()).dump() << "\n" << cli::kUsageText;
    return cli::kUsage;
  }

  if (!cli::known_command(command)) {
    std::cerr << cli::error_json(cli::kUsage, "usage", "unknown command '" + command + "'").dump()
              << "\n"
              << cli::kUsageText;
    return cli::kUsage;
  }

  cli::RunConfig config;
  try {
    config = cli::config_from_map(command, cli::merge_settings(config_path, sets));
  } catch (const std::exception& e) {
    std::cerr << cli::error_json(cli::kUsage, "usage", e.what()).dump() << "\n" << cli::kUsageText;
    return cli::kUsage;
  }
  return cli::run(config, std::cout, std::cerr);
}
