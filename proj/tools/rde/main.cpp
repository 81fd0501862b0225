#include <iostream>

#include "common.hpp"
#include "rde/discrete.hpp"
#include "rde/io.hpp"
#include "rde/optimizer.hpp"

int main(int argc, char** argv) {
  using namespace rde::cli;
  CLI::App app{"Rate-distortion relevance maps for ReLU networks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rde 0.1.0");

  std::vector<Command> commands{add_estimate(app),  add_explain(app),  add_grad_check(app),
                                add_mc_check(app),  add_oracle(app),   add_rd_curve(app),
                                add_render(app)};
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    for (const Command& command : commands) {
      if (command.app->parsed()) return command.run();
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsageError;
  } catch (const rde::io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kUsageError;
  } catch (const rde::NetworkError& e) {
    std::cerr << "network error: " << e.what() << "\n";
    return kUsageError;
  } catch (const rde::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kUsageError;
  } catch (const rde::InstanceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}
