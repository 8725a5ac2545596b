#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "conoshock/config.hpp"
#include "conoshock/errors.hpp"
#include "conoshock/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"conoshock -- conical transonic shock workbench"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  for (const std::string name : {"polar", "background", "linsolve", "solve", "sweep"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "case file")->required();
    sub->add_option("--out", out_dir, "output directory");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string name = app.get_subcommands().front()->get_name();

  try {
    conoshock::CaseConfig cfg = conoshock::parse_case_file(config_path);
    return conoshock::run_subcommand(name, cfg, out_dir);
  } catch (const conoshock::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
