#pragma once

#include "paretofolio/market_data.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace paretofolio::csv {

std::vector<std::string> split(std::string_view line, char sep = ',');
std::string_view trim(std::string_view text);
std::optional<double> parse_double(std::string_view text);

/// Reads a whole text file; throws FileNotFound.
std::vector<std::string> read_lines(const std::filesystem::path& path);
/// Writes `content`, creating parent directories; throws IoError.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Shortest representation that round-trips.
std::string number(double value);

void write_prices(const std::filesystem::path& path, const PriceFrame& frame);
void write_returns(const std::filesystem::path& path, const ReturnsFrame& frame);
ReturnsFrame read_returns(const std::filesystem::path& path);

struct NamedWeights {
  std::vector<std::string> tickers;
  Eigen::VectorXd weights;
};

/// `ticker,weight` with a header row.
void write_weights(const std::filesystem::path& path, const NamedWeights& weights);
NamedWeights read_weights(const std::filesystem::path& path);

}  // namespace paretofolio::csv
