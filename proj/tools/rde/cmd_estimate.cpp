#include <iostream>

#include "common.hpp"
#include "rde/io.hpp"

namespace rde::cli {

Command add_estimate(CLI::App& root) {
  struct Options {
    std::string data;
    std::string mode = "diag";
    std::size_t rank = 30;
    std::string out;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("estimate", "Estimate a Gaussian reference from data");
  app->add_option("data", opts->data, "CSV or IDX data file, one sample per row")->required();
  app->add_option("--mode", opts->mode, "diag or lowrank")->capture_default_str();
  app->add_option("--rank", opts->rank, "factor rank for lowrank mode")->capture_default_str();
  app->add_option("-o,--out", opts->out, "stats file (default stdout)");

  return {app, [opts] {
            EstimateOptions options;
            options.mode = parse_mode(opts->mode);
            options.rank = opts->rank;
            const Matrix data = io::read_data(opts->data);
            const ReferenceEstimate estimate = estimate_reference(data, options);
            if (estimate.rank_reduced) {
              std::cerr << "warning: rank reduced from " << estimate.requested_rank << " to "
                        << estimate.rank << "\n";
            }
            emit(opts->out, io::reference_to_json(estimate));
            return int{kSuccess};
          }};
}

}  // namespace rde::cli
