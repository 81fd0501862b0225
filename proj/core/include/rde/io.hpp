#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "rde/discrete.hpp"
#include "rde/optimizer.hpp"
#include "rde/ordering.hpp"
#include "rde/reference.hpp"

namespace rde::io {

/// Malformed input file; the message names the path and, where known, the
/// 1-based line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what);
  ParseError(const std::filesystem::path& path, const std::string& what);
};

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

std::string read_text(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: truncate, write, close.
void write_text(const std::filesystem::path& path, const std::string& text);

/// One vector per row, comma separated. A first line that fails to parse as
/// numbers is treated as a header and skipped. All rows must have equal length.
Matrix read_csv_matrix(const std::filesystem::path& path);
std::string csv_matrix(const Matrix& m);

/// IDX layout: two zero bytes, a type code, the number of dimensions, then
/// big-endian 32-bit sizes followed by big-endian data. The first dimension
/// indexes samples; the rest are flattened row-major. Unsigned byte data is
/// scaled by 1/255.
Matrix read_idx(const std::filesystem::path& path);
/// Writes a 2-D float64 (type 0x0E) IDX file.
void write_idx(const std::filesystem::path& path, const Matrix& m);

/// CSV or IDX chosen by extension (.csv vs anything else is sniffed by magic).
Matrix read_data(const std::filesystem::path& path);

// Reference statistics JSON.
std::string reference_to_json(const ReferenceEstimate& estimate);
std::string reference_to_json(const GaussianReference& ref);
GaussianReference reference_from_json(const std::string& text, const std::filesystem::path& origin);
GaussianReference read_reference(const std::filesystem::path& path);

// Relevance maps: CSV "index,value" with 0-based indices, or the JSON output
// of `explain` (the "s" array).
std::string relevance_csv(const Vector& s);
Vector read_relevance_map(const std::filesystem::path& path, std::size_t expected_dim = 0);

std::string distortion_to_json_text(const DistortionReport& report);
std::string relevance_json(const Vector& s, double lambda, const ObjectiveValue& objective,
                           const OptimizerTrace& trace);
std::string trace_csv(const OptimizerTrace& trace);

std::string curve_csv(const RateDistortionCurve& curve);

/// 8-bit binary PGM; [min, max] of `values` maps linearly to [0, 255], a
/// constant map renders as mid gray (128).
std::string render_pgm(const Vector& values, std::size_t width, std::size_t height);

/// Truth-table file: first line d, second line 2^d characters '0'/'1'.
BooleanClassifier read_truth_table(const std::filesystem::path& path);
std::string truth_table_text(const BooleanClassifier& phi);

OptimizerConfig read_optimizer_config(const std::filesystem::path& path,
                                      OptimizerConfig base = {});

}  // namespace rde::io
