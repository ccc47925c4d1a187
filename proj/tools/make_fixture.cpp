// Writes the synthetic price panel used by the example config and tests.
#include "paretofolio/csv_io.hpp"
#include "paretofolio/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

int main(int argc, char** argv) {
  CLI::App app{"synthetic one-factor price panel"};
  paretofolio::SyntheticMarketSpec spec;
  std::string out = "data/fixture_prices.csv";
  app.add_option("--out", out);
  app.add_option("--seed", spec.seed);
  app.add_option("--assets", spec.assets);
  app.add_option("--days", spec.days);
  CLI11_PARSE(app, argc, argv);

  const auto market = paretofolio::generate_market(spec);
  paretofolio::csv::write_prices(out, market.prices);
  for (std::size_t i = 0; i < market.betas.size(); ++i) {
    fmt::print("{} beta {:.3f} idio {:.4f}\n", market.prices.tickers[i + 1], market.betas[i], market.idio_vols[i]);
  }
  return 0;
}
