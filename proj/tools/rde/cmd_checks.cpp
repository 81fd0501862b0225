#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include <nlohmann/json.hpp>

#include "common.hpp"
#include "rde/adf.hpp"
#include "rde/io.hpp"
#include "rde/mc.hpp"
#include "rde/optimizer.hpp"
#include "rde/parallel.hpp"
#include "rde/random.hpp"
#include "rde/synthetic.hpp"

namespace rde::cli {
namespace {

struct Instance {
  NeuralNetwork net;
  GaussianReference ref;
  Vector x;
  Vector s;
};

// Inputs shared by grad-check and mc-check: either files or random instances.
struct Source {
  std::string network;
  std::string stats;
  std::string input;
  std::string rows = "0";
  std::size_t count = 0;
  std::string mode;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string out;
};

void add_source_options(CLI::App* app, Source& src) {
  app->add_option("--network", src.network, "network JSON (omit for random instances)");
  app->add_option("--stats", src.stats, "reference stats JSON");
  app->add_option("--input", src.input, "CSV or IDX data file");
  app->add_option("--rows", src.rows, "0-based rows, comma-separated or 'all'")->capture_default_str();
  app->add_option("--instances", src.count, "number of instances");
  app->add_option("--mode", src.mode, "diag or lowrank");
  app->add_option("--seed", src.seed)->capture_default_str();
  app->add_option("--threads", src.threads)->capture_default_str();
  app->add_option("-o,--out", src.out, "report JSON (default stdout)");
}

Vector random_scores(std::size_t dim, std::uint64_t seed, double lo, double hi) {
  return synthetic::uniform_vector(dim, seed, lo, hi);
}

// Random ReLU network with `depth` hidden layers and widths in [2, 16].
NeuralNetwork random_relu_net(std::size_t dim, std::size_t depth, std::uint64_t seed) {
  SplitMix64 gen(stream_seed(seed, 0));
  std::uniform_int_distribution<std::size_t> width(2, 16);
  synthetic::RandomNetworkSpec spec;
  spec.input_dim = dim;
  for (std::size_t i = 0; i < depth; ++i) spec.hidden.push_back(width(gen));
  spec.outputs = 1;
  spec.weight_scale = 1.5;
  spec.bias_scale = 0.3;
  return synthetic::random_network(spec, stream_seed(seed, 1));
}

GaussianReference random_reference(std::size_t dim, CovarianceMode mode, std::uint64_t seed) {
  if (mode == CovarianceMode::kLowRank) {
    return synthetic::random_low_rank_reference(dim, std::max<std::size_t>(1, dim / 2), seed);
  }
  return synthetic::random_diagonal_reference(dim, seed);
}

// Builds `count` instances with scores drawn from U[lo, hi]. In file mode the
// instances cycle through the selected rows, each with its own score draw.
std::vector<Instance> make_instances(const Source& src, std::size_t count, std::size_t depth,
                                     CovarianceMode ref_mode, double lo, double hi) {
  std::vector<Instance> out;
  if (src.network.empty()) {
    if (!src.stats.empty() || !src.input.empty()) {
      throw UsageError("--stats and --input require --network");
    }
    SplitMix64 gen(stream_seed(src.seed, 100));
    std::uniform_int_distribution<std::size_t> dim_dist(2, 10);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t seed = stream_seed(src.seed, i);
      const std::size_t dim = dim_dist(gen);
      out.push_back({random_relu_net(dim, depth, seed), random_reference(dim, ref_mode, stream_seed(seed, 2)),
                     synthetic::uniform_vector(dim, stream_seed(seed, 3)),
                     random_scores(dim, stream_seed(seed, 4), lo, hi)});
    }
    return out;
  }
  if (src.stats.empty() || src.input.empty()) {
    throw UsageError("--network needs --stats and --input");
  }
  const NeuralNetwork net = load_network_file(src.network);
  const GaussianReference ref = io::read_reference(src.stats);
  const Matrix data = io::read_data(src.input);
  if (ref.dim() != net.input_dim() || static_cast<std::size_t>(data.cols()) != net.input_dim()) {
    throw UsageError("network, stats and input dimensions disagree");
  }
  const auto rows = parse_rows(src.rows, static_cast<std::size_t>(data.rows()));
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({net, ref, matrix_row(data, rows[i % rows.size()]),
                   random_scores(net.input_dim(), stream_seed(src.seed, i), lo, hi)});
  }
  return out;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

using json = nlohmann::ordered_json;

json number(double v) { return json::parse(io::format_double(v)); }

}  // namespace

Command add_grad_check(CLI::App& root) {
  struct Options {
    Source src;
    double h = 1e-5;
    double tolerance = 1e-4;
    double lambda = 0.0;
    std::size_t max_coords = 64;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("grad-check", "Compare the analytic gradient with central differences");
  add_source_options(app, opts->src);
  app->add_option("--fd-step", opts->h, "finite-difference step")->capture_default_str();
  app->add_option("--tolerance", opts->tolerance, "maximum relative error")->capture_default_str();
  app->add_option("--lambda", opts->lambda, "sparsity weight added to the objective")->capture_default_str();
  app->add_option("--max-coords", opts->max_coords, "coordinates checked per instance")->capture_default_str();

  return {app, [opts] {
            const Source& src = opts->src;
            if (!(opts->h > 0.0) || opts->h >= 0.05) throw UsageError("--fd-step must lie in (0, 0.05)");
            const std::size_t count = src.count == 0 ? 10 : src.count;
            const CovarianceMode mode = src.mode.empty() ? CovarianceMode::kDiagonal : parse_mode(src.mode);
            // Scores stay well inside the box so s ± h never touches a bound.
            const double margin = std::max(0.05, 2.0 * opts->h);
            const auto instances = make_instances(src, count, 2, mode, margin, 1.0 - margin);

            std::vector<double> worst(instances.size(), 0.0);
            std::vector<std::size_t> checked(instances.size(), 0);
            parallel_for(instances.size(), src.threads, [&](std::size_t k) {
              const Instance& in = instances[k];
              const RelevanceScores s(in.s);
              const Vector g = gradient(in.net, in.ref, in.x, s, opts->lambda, mode);
              const std::size_t d = in.s.size();
              std::vector<std::size_t> coords(d);
              for (std::size_t i = 0; i < d; ++i) coords[i] = i;
              SplitMix64 gen(stream_seed(src.seed, 1000 + k));
              std::shuffle(coords.begin(), coords.end(), gen);
              coords.resize(std::min(d, opts->max_coords));
              for (std::size_t i : coords) {
                const auto e = static_cast<Eigen::Index>(i);
                Vector plus = in.s, minus = in.s;
                plus(e) += opts->h;
                minus(e) -= opts->h;
                const double fp = objective(in.net, in.ref, in.x, RelevanceScores(plus), opts->lambda, mode).value;
                const double fm = objective(in.net, in.ref, in.x, RelevanceScores(minus), opts->lambda, mode).value;
                const double fd = (fp - fm) / (2.0 * opts->h);
                const double rel = std::abs(g(e) - fd) / std::max({std::abs(fd), std::abs(g(e)), 1e-6});
                worst[k] = std::max(worst[k], rel);
              }
              checked[k] = coords.size();
            });

            double max_rel = 0.0;
            std::size_t total = 0;
            json per = json::array();
            for (std::size_t k = 0; k < instances.size(); ++k) {
              max_rel = std::max(max_rel, worst[k]);
              total += checked[k];
              per.push_back({{"dim", instances[k].s.size()}, {"coordinates", checked[k]},
                             {"max_rel_err", number(worst[k])}});
            }
            const bool pass = max_rel < opts->tolerance;
            json report;
            report["check"] = "grad-check";
            report["mode"] = mode_name(mode);
            report["h"] = number(opts->h);
            report["instances"] = per;
            report["coordinates_checked"] = total;
            report["max_rel_err"] = number(max_rel);
            report["tolerance"] = number(opts->tolerance);
            report["pass"] = pass;
            emit(src.out, report.dump(2) + "\n");
            return int{pass ? kSuccess : kValidationFailure};
          }};
}

Command add_mc_check(CLI::App& root) {
  struct Options {
    Source src;
    std::size_t samples = 100000;
    std::size_t depth = 3;
    std::optional<double> tolerance;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("mc-check", "Compare ADF distortion with a Monte-Carlo estimate");
  add_source_options(app, opts->src);
  app->add_option("--samples", opts->samples, "Monte-Carlo samples per instance")->capture_default_str();
  app->add_option("--depth", opts->depth, "hidden ReLU layers of random networks")->capture_default_str();
  app->add_option("--tolerance", opts->tolerance,
                  "fail when the median relative error exceeds this (default: report only)");

  return {app, [opts] {
            const Source& src = opts->src;
            if (opts->samples < 2) throw UsageError("--samples must be at least 2");
            const std::size_t count = src.count == 0 ? 20 : src.count;
            const CovarianceMode mode = src.mode.empty() ? CovarianceMode::kDiagonal : parse_mode(src.mode);
            const auto instances = make_instances(src, count, opts->depth, mode, 0.0, 1.0);

            std::vector<DistortionReport> adf(instances.size());
            std::vector<McEstimate> mc(instances.size());
            parallel_for(instances.size(), src.threads, [&](std::size_t k) {
              const Instance& in = instances[k];
              const RelevanceScores s(in.s);
              adf[k] = adf_distortion(in.net, in.ref, in.x, s, mode);
              mc[k] = mc_distortion(in.net, in.ref, in.x, s, opts->samples, stream_seed(src.seed, 5000 + k));
            });

            json per = json::array();
            std::vector<double> rel_errs;
            for (std::size_t k = 0; k < instances.size(); ++k) {
              const double diff = adf[k].total - mc[k].estimate;
              const double rel = mc[k].estimate != 0.0 ? std::abs(diff) / std::abs(mc[k].estimate)
                                                       : std::abs(diff);
              rel_errs.push_back(rel);
              json item;
              item["dim"] = instances[k].s.size();
              item["adf"] = number(adf[k].total);
              item["mc"] = number(mc[k].estimate);
              item["mc_stderr"] = number(mc[k].standard_error);
              item["rel_err"] = number(rel);
              item["z"] = number(mc[k].standard_error > 0.0 ? diff / mc[k].standard_error : 0.0);
              per.push_back(item);
            }
            const double med = median(rel_errs);
            const bool pass = !opts->tolerance || med <= *opts->tolerance;
            json report;
            report["check"] = "mc-check";
            report["mode"] = mode_name(mode);
            report["samples"] = opts->samples;
            report["instances"] = per;
            report["median_rel_err"] = number(med);
            report["max_rel_err"] = number(*std::max_element(rel_errs.begin(), rel_errs.end()));
            if (opts->tolerance) report["tolerance"] = number(*opts->tolerance);
            report["pass"] = pass;
            emit(src.out, report.dump(2) + "\n");
            return int{pass ? kSuccess : kValidationFailure};
          }};
}

}  // namespace rde::cli
