#include "common.hpp"
#include "rde/io.hpp"

namespace rde::cli {

Command add_render(CLI::App& root) {
  struct Options {
    std::string map;
    std::size_t width = 0;
    std::size_t height = 0;
    std::string out;
  };
  auto opts = std::make_shared<Options>();
  CLI::App* app = root.add_subcommand("render", "Render a relevance map as an 8-bit PGM");
  app->add_option("map", opts->map, "relevance map (CSV or JSON)")->required();
  app->add_option("--width", opts->width)->required();
  app->add_option("--height", opts->height)->required();
  app->add_option("-o,--out", opts->out, "PGM file")->required();

  return {app, [opts] {
            const std::size_t pixels = opts->width * opts->height;
            if (pixels == 0) throw UsageError("width and height must be positive");
            const Vector s = io::read_relevance_map(opts->map, pixels);
            io::write_text(opts->out, io::render_pgm(s, opts->width, opts->height));
            return int{kSuccess};
          }};
}

}  // namespace rde::cli
