#include "paretofolio/csv_io.hpp"

#include "paretofolio/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace paretofolio::csv {

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (!lines.empty() && lines.front().starts_with("\xEF\xBB\xBF")) {
    lines.front().erase(0, 3);
  }
  return lines;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string number(double value) {
  if (std::isnan(value)) return "";
  return fmt::format("{}", value);
}

namespace {

template <typename Frame>
std::string matrix_csv(const Frame& frame, const Eigen::MatrixXd& values) {
  std::string out = "date";
  for (const auto& t : frame.tickers) out += "," + t;
  out += "\n";
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    out += frame.dates[static_cast<std::size_t>(r)].to_string();
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      out += ",";
      out += number(values(r, c));
    }
    out += "\n";
  }
  return out;
}

}  // namespace

void write_prices(const std::filesystem::path& path, const PriceFrame& frame) {
  write_file(path, matrix_csv(frame, frame.prices));
}

void write_returns(const std::filesystem::path& path, const ReturnsFrame& frame) {
  write_file(path, matrix_csv(frame, frame.returns));
}

ReturnsFrame read_returns(const std::filesystem::path& path) {
  // Same layout as a price file; reuse the strict loader and relabel.
  const PriceFrame raw = load_prices(path);
  ReturnsFrame out;
  out.dates = raw.dates;
  out.tickers = raw.tickers;
  out.returns = raw.prices;
  if (!out.returns.allFinite()) {
    throw Error(ErrorCode::MalformedRow, path.string() + ": returns file has missing cells");
  }
  return out;
}

void write_weights(const std::filesystem::path& path, const NamedWeights& weights) {
  std::string out = "ticker,weight\n";
  for (std::size_t i = 0; i < weights.tickers.size(); ++i) {
    out += weights.tickers[i] + "," + number(weights.weights(static_cast<Eigen::Index>(i))) + "\n";
  }
  write_file(path, out);
}

NamedWeights read_weights(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  NamedWeights result;
  std::vector<double> values;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    if (trim(lines[n]).empty()) continue;
    const auto fields = split(lines[n]);
    const auto value = fields.size() == 2 ? parse_double(fields[1]) : std::nullopt;
    if (!value || !std::isfinite(*value)) {
      throw Error(ErrorCode::MalformedRow,
                  fmt::format("{}:{}: expected ticker,weight", path.string(), n + 1));
    }
    result.tickers.emplace_back(trim(fields[0]));
    values.push_back(*value);
  }
  if (values.empty()) throw Error(ErrorCode::EmptyFrame, path.string() + ": no weights");
  result.weights = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return result;
}

}  // namespace paretofolio::csv
