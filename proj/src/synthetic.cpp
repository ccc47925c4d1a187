#include "paretofolio/synthetic.hpp"

#include "paretofolio/rng.hpp"

#include <fmt/format.h>

namespace paretofolio {

namespace {

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
  return kDays[m - 1] + (m == 2 && leap ? 1 : 0);
}

// 0 = Monday (Zeller-style, via days from civil).
int weekday(const Date& d) {
  int y = d.year;
  const int m = d.month;
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const int yoe = y - era * 400;
  const int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
  const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  const long days = static_cast<long>(era) * 146097 + doe - 719468;
  return static_cast<int>(((days % 7) + 7 + 3) % 7);
}

Date next_day(Date d) {
  if (++d.day > days_in_month(d.year, d.month)) {
    d.day = 1;
    if (++d.month > 12) {
      d.month = 1;
      ++d.year;
    }
  }
  return d;
}

}  // namespace

std::vector<Date> business_days(Date start, int count) {
  std::vector<Date> out;
  for (Date d = start; static_cast<int>(out.size()) < count; d = next_day(d)) {
    if (weekday(d) < 5) out.push_back(d);
  }
  return out;
}

SyntheticMarket generate_market(const SyntheticMarketSpec& spec) {
  Rng rng(spec.seed);
  SyntheticMarket out;
  for (int i = 0; i < spec.assets; ++i) {
    const bool planted = i < spec.planted;
    const double u = spec.assets > spec.planted + 1
                         ? static_cast<double>(i - spec.planted) / (spec.assets - spec.planted - 1)
                         : 0.0;
    out.betas.push_back(planted ? spec.planted_beta
                                : spec.other_beta_low + u * (spec.other_beta_high - spec.other_beta_low));
    out.idio_vols.push_back(planted ? spec.planted_idio_vol
                                    : spec.other_idio_vol_low + rng.uniform() * (spec.other_idio_vol_high - spec.other_idio_vol_low));
  }

  PriceFrame& frame = out.prices;
  frame.dates = business_days(spec.start, spec.days);
  frame.tickers.push_back(spec.market_column);
  for (int i = 0; i < spec.assets; ++i) frame.tickers.push_back(fmt::format("A{:02d}", i + 1));
  frame.prices.resize(spec.days, spec.assets + 1);
  frame.prices.row(0).setConstant(100.0);
  for (int t = 1; t < spec.days; ++t) {
    const double rm = spec.market_drift + spec.market_vol * rng.normal();
    frame.prices(t, 0) = frame.prices(t - 1, 0) * (1.0 + rm);
    for (int i = 0; i < spec.assets; ++i) {
      const double r = out.betas[static_cast<std::size_t>(i)] * rm +
                       out.idio_vols[static_cast<std::size_t>(i)] * rng.normal();
      frame.prices(t, i + 1) = frame.prices(t - 1, i + 1) * (1.0 + r);
    }
  }
  return out;
}

}  // namespace paretofolio
