#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rde/network.hpp"
#include "rde/reference.hpp"

namespace rde::cli {

enum ExitCode : int { kSuccess = 0, kValidationFailure = 1, kUsageError = 2 };

/// Raised for bad flag combinations discovered after parsing.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Command {
  CLI::App* app = nullptr;
  std::function<int()> run;
};

Command add_estimate(CLI::App& root);
Command add_explain(CLI::App& root);
Command add_grad_check(CLI::App& root);
Command add_mc_check(CLI::App& root);
Command add_oracle(CLI::App& root);
Command add_rd_curve(CLI::App& root);
Command add_render(CLI::App& root);

CovarianceMode parse_mode(const std::string& text);
std::string mode_name(CovarianceMode mode);

/// "all", or a comma-separated list of 0-based row indices.
std::vector<std::size_t> parse_rows(const std::string& text, std::size_t available);
std::vector<double> parse_list(const std::string& text);

/// Output path for item `index` of `count`: unchanged for a single item,
/// otherwise ".<index>" is inserted before the extension.
std::filesystem::path indexed_path(const std::filesystem::path& base, std::size_t index,
                                   std::size_t count);

/// Writes `text` to `path`, or to stdout when path is empty or "-".
void emit(const std::string& path, const std::string& text);

Vector matrix_row(const Matrix& m, std::size_t row);

}  // namespace rde::cli
