#include "rde/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rde::io {

using nlohmann::json;

ParseError::ParseError(const std::filesystem::path& path, std::size_t line, const std::string& what)
    : std::runtime_error(path.string() + ":" + std::to_string(line) + ": " + what) {}

ParseError::ParseError(const std::filesystem::path& path, const std::string& what)
    : std::runtime_error(path.string() + ": " + what) {}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, "cannot open file");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

// -- CSV ---------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view field, double& out) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size();
}

bool parse_row(std::string_view line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    double v = 0.0;
    if (!parse_number(field, v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) return true;
    start = comma + 1;
  }
}

// Rows of a numeric CSV as (line number, values).
std::vector<std::pair<std::size_t, std::vector<double>>> read_csv_rows(
    const std::filesystem::path& path) {
  const std::string text = read_text(path);
  std::vector<std::pair<std::size_t, std::vector<double>>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++number;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (!parse_row(view, values)) {
      if (rows.empty() && number == 1) continue;  // header
      throw ParseError(path, number, "expected comma-separated numbers");
    }
    for (double v : values) {
      if (!std::isfinite(v)) throw ParseError(path, number, "non-finite value");
    }
    rows.emplace_back(number, values);
  }
  return rows;
}

}  // namespace

Matrix read_csv_matrix(const std::filesystem::path& path) {
  const auto rows = read_csv_rows(path);
  if (rows.empty()) throw ParseError(path, "no data rows");
  const std::size_t width = rows.front().second.size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& [line, values] = rows[r];
    if (values.size() != width) {
      throw ParseError(path, line,
                       "row has " + std::to_string(values.size()) + " values, expected " +
                           std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[c];
    }
  }
  return m;
}

std::string csv_matrix(const Matrix& m) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      out += format_double(m(r, c));
    }
    out += '\n';
  }
  return out;
}

// -- IDX ---------------------------------------------------------------------

namespace {

std::uint32_t read_be32(const unsigned char* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) |
         std::uint32_t{p[3]};
}

template <typename T>
T read_be(const unsigned char* p) {
  std::array<unsigned char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = p[sizeof(T) - 1 - i];
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

}  // namespace

Matrix read_idx(const std::filesystem::path& path) {
  const std::string raw = read_text(path);
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());
  if (raw.size() < 4 || bytes[0] != 0 || bytes[1] != 0) throw ParseError(path, "bad IDX magic");
  const unsigned type = bytes[2];
  const unsigned ndim = bytes[3];
  if (ndim == 0) throw ParseError(path, "IDX file has zero dimensions");
  if (raw.size() < 4 + 4 * std::size_t{ndim}) throw ParseError(path, "truncated IDX header");

  std::size_t rows = read_be32(bytes + 4);
  std::size_t cols = 1;
  for (unsigned k = 1; k < ndim; ++k) cols *= read_be32(bytes + 4 + 4 * k);

  std::size_t width = 0;
  switch (type) {
    case 0x08:
    case 0x09: width = 1; break;
    case 0x0B: width = 2; break;
    case 0x0C:
    case 0x0D: width = 4; break;
    case 0x0E: width = 8; break;
    default: throw ParseError(path, "unsupported IDX type code " + std::to_string(type));
  }
  const std::size_t offset = 4 + 4 * std::size_t{ndim};
  if (raw.size() != offset + rows * cols * width) {
    throw ParseError(path, "IDX payload size does not match header dimensions");
  }

  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  const unsigned char* p = bytes + offset;
  for (std::size_t i = 0; i < rows * cols; ++i, p += width) {
    double v = 0.0;
    switch (type) {
      case 0x08: v = static_cast<double>(*p) / 255.0; break;
      case 0x09: v = static_cast<double>(static_cast<std::int8_t>(*p)); break;
      case 0x0B: v = static_cast<double>(read_be<std::int16_t>(p)); break;
      case 0x0C: v = static_cast<double>(read_be<std::int32_t>(p)); break;
      case 0x0D: v = static_cast<double>(read_be<float>(p)); break;
      case 0x0E: v = read_be<double>(p); break;
    }
    if (!std::isfinite(v)) throw ParseError(path, "non-finite IDX value at element " + std::to_string(i));
    m(static_cast<Eigen::Index>(i / cols), static_cast<Eigen::Index>(i % cols)) = v;
  }
  return m;
}

void write_idx(const std::filesystem::path& path, const Matrix& m) {
  std::string out;
  out.push_back('\0');
  out.push_back('\0');
  out.push_back(static_cast<char>(0x0E));
  out.push_back(static_cast<char>(2));
  auto put32 = [&](std::uint32_t v) {
    for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<char>((v >> shift) & 0xFF));
  };
  put32(static_cast<std::uint32_t>(m.rows()));
  put32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = m(r, c);
      std::array<unsigned char, 8> bytes{};
      std::memcpy(bytes.data(), &v, 8);
      for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>(bytes[static_cast<std::size_t>(i)]));
    }
  }
  write_text(path, out);
}

Matrix read_data(const std::filesystem::path& path) {
  if (path.extension() == ".csv" || path.extension() == ".txt") return read_csv_matrix(path);
  std::ifstream in(path, std::ios::binary);
  char head[2] = {1, 1};
  in.read(head, 2);
  if (in && head[0] == 0 && head[1] == 0) return read_idx(path);
  return read_csv_matrix(path);
}

// -- reference statistics ----------------------------------------------------

namespace {

json vector_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

json reference_json_object(const GaussianReference& ref) {
  json doc;
  doc["mean"] = vector_json(ref.mean());
  if (ref.native_mode() == CovarianceMode::kDiagonal) {
    doc["cov"] = {{"type", "diag"}, {"var", vector_json(ref.variances())}};
  } else {
    const Matrix& q = std::get<LowRankCovariance>(ref.covariance()).factor;
    json rows = json::array();
    for (Eigen::Index r = 0; r < q.rows(); ++r) rows.push_back(vector_json(q.row(r).transpose()));
    doc["cov"] = {{"type", "lowrank"}, {"factor", std::move(rows)}, {"rank", q.cols()}};
  }
  return doc;
}

Vector json_vector(const json& arr, const std::filesystem::path& origin, const char* what) {
  if (!arr.is_array()) throw ParseError(origin, std::string(what) + " must be an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw ParseError(origin, std::string(what) + " must hold numbers");
    v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
  }
  return v;
}

}  // namespace

std::string reference_to_json(const GaussianReference& ref) {
  return reference_json_object(ref).dump() + "\n";
}

std::string reference_to_json(const ReferenceEstimate& estimate) {
  json doc = reference_json_object(estimate.reference);
  if (estimate.reference.native_mode() == CovarianceMode::kLowRank) {
    doc["cov"]["requested_rank"] = estimate.requested_rank;
    doc["cov"]["rank_reduced"] = estimate.rank_reduced;
  }
  return doc.dump() + "\n";
}

GaussianReference reference_from_json(const std::string& text, const std::filesystem::path& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(origin, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("mean") || !doc.contains("cov")) {
    throw ParseError(origin, "expected keys \"mean\" and \"cov\"");
  }
  Vector mean = json_vector(doc["mean"], origin, "mean");
  const json& cov = doc["cov"];
  const std::string type = cov.value("type", "");
  try {
    if (type == "diag") {
      return GaussianReference(std::move(mean),
                               DiagonalCovariance{json_vector(cov.at("var"), origin, "var")});
    }
    if (type == "lowrank") {
      const json& rows = cov.at("factor");
      if (!rows.is_array() || rows.empty()) throw ParseError(origin, "factor must be a non-empty array");
      const std::size_t r = rows[0].size();
      Matrix q(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(r));
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const Vector row = json_vector(rows[i], origin, "factor row");
        if (static_cast<std::size_t>(row.size()) != r) throw ParseError(origin, "ragged factor rows");
        q.row(static_cast<Eigen::Index>(i)) = row.transpose();
      }
      return GaussianReference(std::move(mean), LowRankCovariance{std::move(q)});
    }
  } catch (const DimensionError& e) {
    throw ParseError(origin, e.what());
  } catch (const json::exception& e) {
    throw ParseError(origin, e.what());
  }
  throw ParseError(origin, "cov.type must be \"diag\" or \"lowrank\"");
}

GaussianReference read_reference(const std::filesystem::path& path) {
  return reference_from_json(read_text(path), path);
}

// -- relevance maps and reports ----------------------------------------------

std::string relevance_csv(const Vector& s) {
  std::string out = "index,value\n";
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    out += std::to_string(i) + "," + format_double(s(i)) + "\n";
  }
  return out;
}

Vector read_relevance_map(const std::filesystem::path& path, std::size_t expected_dim) {
  Vector s;
  if (path.extension() == ".json") {
    json doc;
    try {
      doc = json::parse(read_text(path));
    } catch (const json::exception& e) {
      throw ParseError(path, std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("s")) throw ParseError(path, "expected key \"s\"");
    s = json_vector(doc["s"], path, "s");
  } else {
    const auto rows = read_csv_rows(path);
    std::size_t dim = expected_dim;
    for (const auto& [line, values] : rows) {
      if (values.size() != 2) throw ParseError(path, line, "expected index,value");
      if (values[0] < 0 || values[0] != std::floor(values[0])) {
        throw ParseError(path, line, "index must be a non-negative integer");
      }
      dim = std::max(dim, static_cast<std::size_t>(values[0]) + 1);
    }
    s = Vector::Zero(static_cast<Eigen::Index>(dim));
    std::vector<bool> seen(dim, false);
    for (const auto& [line, values] : rows) {
      const auto idx = static_cast<std::size_t>(values[0]);
      if (seen[idx]) throw ParseError(path, line, "duplicate index " + std::to_string(idx));
      seen[idx] = true;
      s(static_cast<Eigen::Index>(idx)) = values[1];
    }
    for (std::size_t i = 0; i < dim; ++i) {
      if (!seen[i]) throw ParseError(path, "missing index " + std::to_string(i));
    }
  }
  if (expected_dim != 0 && static_cast<std::size_t>(s.size()) != expected_dim) {
    throw ParseError(path, "relevance map has " + std::to_string(s.size()) +
                               " entries, expected " + std::to_string(expected_dim));
  }
  return s;
}

namespace {

json distortion_json(const DistortionReport& report) {
  return {{"bias_term", report.bias_term},
          {"variance_term", report.variance_term},
          {"total", report.total},
          {"output_mean", report.output_mean},
          {"output_variance", report.output_variance},
          {"reference_output", report.reference_output}};
}

const char* termination_name(Termination t) {
  return t == Termination::kRelTol ? "rel_tol" : "max_iters";
}

}  // namespace

std::string distortion_to_json_text(const DistortionReport& report) {
  return distortion_json(report).dump();
}

std::string relevance_json(const Vector& s, double lambda, const ObjectiveValue& objective,
                           const OptimizerTrace& trace) {
  json doc = {{"s", vector_json(s)},
              {"lambda", lambda},
              {"objective", objective.value},
              {"distortion", distortion_json(objective.distortion)},
              {"iterations", trace.iterations.size()},
              {"termination", termination_name(trace.termination)}};
  return doc.dump() + "\n";
}

std::string trace_csv(const OptimizerTrace& trace) {
  std::string out = "iteration,objective,distortion,l1,step_size,backtracks\n";
  for (const IterationRecord& r : trace.iterations) {
    out += std::to_string(r.iteration) + "," + format_double(r.objective) + "," +
           format_double(r.distortion) + "," + format_double(r.l1) + "," +
           format_double(r.step_size) + "," + std::to_string(r.backtracks) + "\n";
  }
  return out;
}

std::string curve_csv(const RateDistortionCurve& curve) {
  std::string out = "rate,distortion,stderr\n";
  for (const CurvePoint& p : curve.points) {
    out += format_double(p.rate) + "," + format_double(p.distortion) + "," +
           format_double(p.standard_error) + "\n";
  }
  return out;
}

std::string render_pgm(const Vector& values, std::size_t width, std::size_t height) {
  if (width == 0 || height == 0 || static_cast<std::size_t>(values.size()) != width * height) {
    throw DimensionError("render: map has " + std::to_string(values.size()) + " entries, expected " +
                         std::to_string(width) + "x" + std::to_string(height));
  }
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double level = hi > lo ? std::round((values(i) - lo) / (hi - lo) * 255.0) : 128.0;
    out.push_back(static_cast<char>(static_cast<unsigned char>(level)));
  }
  return out;
}

// -- truth tables ------------------------------------------------------------

BooleanClassifier read_truth_table(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string first;
  std::string second;
  if (!std::getline(in, first)) throw ParseError(path, 1, "missing dimension line");
  std::size_t dim = 0;
  const std::string_view dim_text = trim(first);
  const auto [ptr, ec] = std::from_chars(dim_text.data(), dim_text.data() + dim_text.size(), dim);
  if (ec != std::errc() || ptr != dim_text.data() + dim_text.size()) {
    throw ParseError(path, 1, "expected the input dimension");
  }
  if (!std::getline(in, second)) throw ParseError(path, 2, "missing truth-table line");
  const std::string_view bits_text = trim(second);
  std::vector<std::uint8_t> bits;
  bits.reserve(bits_text.size());
  for (char c : bits_text) {
    if (c != '0' && c != '1') throw ParseError(path, 2, "truth table must contain only 0 and 1");
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  try {
    return BooleanClassifier::from_truth_table(dim, std::move(bits));
  } catch (const std::invalid_argument& e) {
    throw ParseError(path, 2, e.what());
  }
}

std::string truth_table_text(const BooleanClassifier& phi) {
  const BooleanClassifier table = phi.materialize();
  std::string out = std::to_string(phi.dim()) + "\n";
  for (std::uint8_t b : table.truth_table()) out.push_back(static_cast<char>('0' + b));
  out.push_back('\n');
  return out;
}

// -- optimizer config --------------------------------------------------------

OptimizerConfig read_optimizer_config(const std::filesystem::path& path, OptimizerConfig base) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw ParseError(path, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(path, "config must be a JSON object");
  try {
    if (doc.contains("lambda")) base.lambda = doc["lambda"].get<double>();
    if (doc.contains("momentum")) base.momentum = doc["momentum"].get<double>();
    if (doc.contains("init_value")) base.init_value = doc["init_value"].get<double>();
    if (doc.contains("max_iters")) base.max_iters = doc["max_iters"].get<std::size_t>();
    if (doc.contains("rel_tol")) base.rel_tol = doc["rel_tol"].get<double>();
    if (doc.contains("tol_window")) base.tol_window = doc["tol_window"].get<std::size_t>();
    if (doc.contains("mode")) {
      const std::string mode = doc["mode"].get<std::string>();
      if (mode == "diag") {
        base.mode = CovarianceMode::kDiagonal;
      } else if (mode == "lowrank") {
        base.mode = CovarianceMode::kLowRank;
      } else {
        throw ParseError(path, "mode must be \"diag\" or \"lowrank\"");
      }
    }
    if (doc.contains("armijo")) {
      const json& a = doc["armijo"];
      if (a.contains("initial_step")) base.armijo.initial_step = a["initial_step"].get<double>();
      if (a.contains("shrink")) base.armijo.shrink = a["shrink"].get<double>();
      if (a.contains("sufficient_decrease")) {
        base.armijo.sufficient_decrease = a["sufficient_decrease"].get<double>();
      }
      if (a.contains("max_backtracks")) base.armijo.max_backtracks = a["max_backtracks"].get<std::size_t>();
    }
  } catch (const json::exception& e) {
    throw ParseError(path, e.what());
  }
  return base;
}

}  // namespace rde::io
