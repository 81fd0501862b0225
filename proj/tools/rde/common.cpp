#include "common.hpp"

#include <charconv>
#include <iostream>

#include "rde/io.hpp"

namespace rde::cli {

CovarianceMode parse_mode(const std::string& text) {
  if (text == "diag") return CovarianceMode::kDiagonal;
  if (text == "lowrank") return CovarianceMode::kLowRank;
  throw UsageError("mode must be diag or lowrank, got '" + text + "'");
}

std::string mode_name(CovarianceMode mode) {
  return mode == CovarianceMode::kDiagonal ? "diag" : "lowrank";
}

std::vector<std::size_t> parse_rows(const std::string& text, std::size_t available) {
  std::vector<std::size_t> rows;
  if (text == "all") {
    for (std::size_t i = 0; i < available; ++i) rows.push_back(i);
    return rows;
  }
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("bad row index '" + item + "'");
    }
    if (value >= available) {
      throw UsageError("row " + std::to_string(value) + " out of range (" + std::to_string(available) +
                       " rows)");
    }
    rows.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return rows;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string item = text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (ec != std::errc() || ptr != item.data() + item.size()) {
      throw UsageError("bad number '" + item + "'");
    }
    out.push_back(value);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::filesystem::path indexed_path(const std::filesystem::path& base, std::size_t index,
                                   std::size_t count) {
  if (count <= 1) return base;
  std::filesystem::path out = base;
  out.replace_filename(base.stem().string() + "." + std::to_string(index) + base.extension().string());
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    io::write_text(path, text);
  }
}

Vector matrix_row(const Matrix& m, std::size_t row) {
  return m.row(static_cast<Eigen::Index>(row)).transpose();
}

}  // namespace rde::cli
