#include <nlohmann/json.hpp>

#include "common.hpp"
#include "rde/io.hpp"
#include "rde/ordering.hpp"

namespace rde::cli {

Command add_rd_curve(CLI::App& root) {
  struct Options {
    std::string network;
    std::string stats;
    std::string input;
    std::string rows = "0";
    std::vector<std::string> maps;
    bool random_ordering = false;
    std::size_t rates = 64;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    bool clamp = false;
    std::size_t threads = 1;
    std::string out;
    std::string report;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("rd-curve", "Evaluate a relevance ordering by its rate-distortion curve");
  app->add_option("network", opts->network, "network JSON")->required();
  app->add_option("stats", opts->stats, "reference stats JSON")->required();
  app->add_option("input", opts->input, "CSV or IDX data file")->required();
  app->add_option("--rows", opts->rows, "0-based rows, comma-separated or 'all'")->capture_default_str();
  auto* maps = app->add_option("--maps", opts->maps, "one relevance map per row (CSV or JSON)")->delimiter(',');
  auto* rnd = app->add_flag("--random-ordering", opts->random_ordering, "use uniformly random orderings");
  maps->excludes(rnd);
  app->add_option("--rates", opts->rates, "number of uniformly spaced rates in [0,1]")->capture_default_str();
  app->add_option("--samples", opts->samples, "noise samples per rate (default depends on input size)");
  app->add_option("--seed", opts->seed)->capture_default_str();
  app->add_flag("--clamp", opts->clamp, "clip reference samples to [0,1]");
  app->add_option("--threads", opts->threads, "worker threads across rows")->capture_default_str();
  app->add_option("-o,--out", opts->out, "curve CSV")->required();
  app->add_option("--report", opts->report, "summary JSON (default stdout)");

  return {app, [opts] {
            if (opts->maps.empty() == !opts->random_ordering) {
              throw UsageError("give --maps or --random-ordering");
            }
            if (opts->rates < 2) throw UsageError("--rates must be at least 2");
            const NeuralNetwork net = load_network_file(opts->network);
            const GaussianReference ref = io::read_reference(opts->stats);
            const Matrix data = io::read_data(opts->input);
            const std::size_t d = net.input_dim();
            if (ref.dim() != d || static_cast<std::size_t>(data.cols()) != d) {
              throw UsageError("network, stats and input dimensions disagree");
            }
            const auto rows = parse_rows(opts->rows, static_cast<std::size_t>(data.rows()));
            std::vector<Vector> images;
            std::vector<Vector> maps;
            for (std::size_t r : rows) images.push_back(matrix_row(data, r));
            if (opts->random_ordering) {
              // Equal scores make every ordering a uniform random permutation.
              maps.assign(rows.size(), Vector::Zero(static_cast<Eigen::Index>(d)));
            } else {
              if (opts->maps.size() != rows.size()) {
                throw UsageError(std::to_string(opts->maps.size()) + " maps given for " +
                                 std::to_string(rows.size()) + " rows");
              }
              for (const std::string& path : opts->maps) maps.push_back(io::read_relevance_map(path, d));
            }

            OrderingOptions options;
            options.rates = uniform_rates(opts->rates);
            options.samples = opts->samples == 0 ? default_samples(d) : opts->samples;
            options.seed = opts->seed;
            options.clamp = opts->clamp;
            const RateDistortionCurve curve = evaluate_batch(net, ref, images, maps, options, opts->threads);
            io::write_text(opts->out, io::curve_csv(curve));

            nlohmann::ordered_json report;
            report["check"] = "rd-curve";
            report["images"] = curve.images_averaged;
            report["samples"] = curve.samples_per_point;
            report["rates"] = curve.points.size();
            report["auc"] = nlohmann::ordered_json::parse(io::format_double(trapezoid_auc(curve)));
            report["final_distortion"] =
                nlohmann::ordered_json::parse(io::format_double(curve.points.back().distortion));
            emit(opts->report, report.dump(2) + "\n");
            return int{kSuccess};
          }};
}

}  // namespace rde::cli
