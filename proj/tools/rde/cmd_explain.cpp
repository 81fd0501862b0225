#include <optional>

#include "common.hpp"
#include "rde/io.hpp"
#include "rde/optimizer.hpp"
#include "rde/parallel.hpp"

namespace rde::cli {

Command add_explain(CLI::App& root) {
  struct Options {
    std::string network;
    std::string stats;
    std::string input;
    std::string rows = "0";
    std::optional<double> lambda;
    std::string mode;
    std::string config;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    std::string out;
    std::string map_csv;
    std::string trace;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("explain", "Optimize a relevance map for one or more inputs");
  app->add_option("network", opts->network, "network JSON")->required();
  app->add_option("stats", opts->stats, "reference stats JSON")->required();
  app->add_option("input", opts->input, "CSV or IDX data file")->required();
  app->add_option("--rows", opts->rows, "0-based rows to explain, comma-separated or 'all'")
      ->capture_default_str();
  app->add_option("--lambda", opts->lambda, "sparsity weight (default depends on input size)");
  app->add_option("--mode", opts->mode, "diag or lowrank (default: native mode of the stats)");
  app->add_option("--config", opts->config, "optimizer config JSON");
  app->add_option("--seed", opts->seed, "accepted for interface symmetry; the optimizer is deterministic");
  app->add_option("--threads", opts->threads, "worker threads across rows")->capture_default_str();
  app->add_option("-o,--out", opts->out, "map JSON (default stdout)");
  app->add_option("--map-csv", opts->map_csv, "map as index,value CSV");
  app->add_option("--trace", opts->trace, "per-iteration trace CSV");

  return {app, [opts] {
            const NeuralNetwork net = load_network_file(opts->network);
            const GaussianReference ref = io::read_reference(opts->stats);
            const Matrix data = io::read_data(opts->input);
            if (static_cast<std::size_t>(data.cols()) != net.input_dim()) {
              throw UsageError("input has " + std::to_string(data.cols()) + " columns, network expects " +
                               std::to_string(net.input_dim()));
            }
            if (ref.dim() != net.input_dim()) {
              throw UsageError("stats dimension " + std::to_string(ref.dim()) +
                               " does not match network input " + std::to_string(net.input_dim()));
            }
            const auto rows = parse_rows(opts->rows, static_cast<std::size_t>(data.rows()));
            if (rows.size() > 1 && (opts->out.empty() || opts->out == "-")) {
              throw UsageError("--out is required when explaining several rows");
            }

            OptimizerConfig config;
            config.lambda = default_lambda(net.input_dim());
            config.mode = ref.native_mode();
            if (!opts->config.empty()) config = io::read_optimizer_config(opts->config, config);
            if (opts->lambda) config.lambda = *opts->lambda;
            if (!opts->mode.empty()) config.mode = parse_mode(opts->mode);
            config.validate();

            std::vector<std::optional<OptimizerResult>> results(rows.size());
            parallel_for(rows.size(), opts->threads, [&](std::size_t i) {
              results[i] = optimize(net, ref, matrix_row(data, rows[i]), config);
            });

            for (std::size_t i = 0; i < rows.size(); ++i) {
              const OptimizerResult& r = *results[i];
              const Vector& s = r.scores.values();
              emit(opts->out.empty() ? opts->out : indexed_path(opts->out, rows[i], rows.size()).string(),
                   io::relevance_json(s, config.lambda, r.final_objective, r.trace));
              if (!opts->map_csv.empty()) {
                io::write_text(indexed_path(opts->map_csv, rows[i], rows.size()), io::relevance_csv(s));
              }
              if (!opts->trace.empty()) {
                io::write_text(indexed_path(opts->trace, rows[i], rows.size()), io::trace_csv(r.trace));
              }
            }
            return int{kSuccess};
          }};
}

}  // namespace rde::cli
