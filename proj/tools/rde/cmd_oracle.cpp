#include <nlohmann/json.hpp>

#include "common.hpp"
#include "rde/discrete.hpp"
#include "rde/io.hpp"

namespace rde::cli {

Command add_oracle(CLI::App& root) {
  struct Options {
    std::string truth_table;
    std::string network;
    double threshold = 0.5;
    std::string x;
    std::string delta = "1";
    std::string epsilons;
    std::size_t max_d = 16;
    std::string out;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("oracle", "Exact minimal relevant set for a Boolean classifier");
  auto* tt = app->add_option("--truth-table", opts->truth_table, "truth-table file");
  auto* nn = app->add_option("--network", opts->network, "network JSON, thresholded to {0,1}");
  tt->excludes(nn);
  app->add_option("--threshold", opts->threshold, "network output >= threshold maps to 1")
      ->capture_default_str();
  app->add_option("--x", opts->x, "input bits, comma-separated, component 0 first")->required();
  app->add_option("--delta", opts->delta, "relevance level as a fraction, e.g. 3/4")->capture_default_str();
  app->add_option("--epsilons", opts->epsilons, "distortion budgets for the exact rate-distortion table");
  app->add_option("--max-d", opts->max_d, "largest accepted input dimension")->capture_default_str();
  app->add_option("-o,--out", opts->out, "report JSON (default stdout)");

  return {app, [opts] {
            if (opts->truth_table.empty() == opts->network.empty()) {
              throw UsageError("give exactly one of --truth-table or --network");
            }
            const BooleanClassifier phi =
                opts->truth_table.empty()
                    ? BooleanClassifier::from_network(load_network_file(opts->network), opts->threshold)
                    : io::read_truth_table(opts->truth_table);

            BitVector x;
            for (double v : parse_list(opts->x)) {
              if (v != 0.0 && v != 1.0) throw UsageError("--x entries must be 0 or 1");
              x.push_back(static_cast<std::uint8_t>(v));
            }
            if (x.size() != phi.dim()) {
              throw UsageError("--x has " + std::to_string(x.size()) + " bits, classifier expects " +
                               std::to_string(phi.dim()));
            }
            Rational delta;
            try {
              delta = Rational::parse(opts->delta);
            } catch (const std::invalid_argument& e) {
              throw UsageError(std::string("--delta: ") + e.what());
            }

            const DiscreteSolution sol = min_relevant_input(phi, x, delta, opts->max_d);
            nlohmann::ordered_json report;
            report["check"] = "oracle";
            report["dim"] = phi.dim();
            report["delta"] = delta.to_string();
            report["k_star"] = sol.min_size;
            report["witness"] = sol.witness;
            report["probability"] = sol.achieved_probability.to_string();
            if (!opts->epsilons.empty()) {
              auto table = nlohmann::ordered_json::array();
              for (const ExactRatePoint& p : exact_rate_distortion(phi, x, parse_list(opts->epsilons), opts->max_d)) {
                nlohmann::ordered_json row;
                row["epsilon"] = nlohmann::ordered_json::parse(io::format_double(p.epsilon));
                row["rate"] = p.rate;
                row["distortion"] = p.distortion.to_string();
                row["witness"] = p.witness;
                table.push_back(row);
              }
              report["rate_distortion"] = table;
            }
            emit(opts->out, report.dump(2) + "\n");
            return int{kSuccess};
          }};
}

}  // namespace rde::cli
