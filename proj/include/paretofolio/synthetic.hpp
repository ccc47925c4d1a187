#pragma once

#include "paretofolio/market_data.hpp"

#include <cstdint>
#include <vector>

namespace paretofolio {

/// One-factor market: r_i = beta_i r_m + e_i with Gaussian factor and
/// idiosyncratic terms. The first `planted` assets get a high beta and a
/// small idiosyncratic volatility, which makes them the high-Sharpe subset.
struct SyntheticMarketSpec {
  int assets = 14;
  int planted = 4;
  int days = 1752;
  Date start{2015, 1, 2};
  double market_drift = 0.0006;
  double market_vol = 0.01;
  double planted_beta = 1.6;
  double planted_idio_vol = 0.004;
  double other_beta_low = 0.3;
  double other_beta_high = 1.2;
  double other_idio_vol_low = 0.015;
  double other_idio_vol_high = 0.025;
  std::uint64_t seed = 2024;
  std::string market_column = "MKT";
};

struct SyntheticMarket {
  PriceFrame prices;  // market column first, then A01, A02, ...
  std::vector<double> betas;
  std::vector<double> idio_vols;
};

/// Weekday calendar from `start`.
std::vector<Date> business_days(Date start, int count);

SyntheticMarket generate_market(const SyntheticMarketSpec& spec);

}  // namespace paretofolio
