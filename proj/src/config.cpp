#include "paretofolio/config.hpp"

#include "paretofolio/csv_io.hpp"
#include "paretofolio/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <functional>

namespace paretofolio {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, std::string_view expected) {
  throw Error(ErrorCode::InvalidConfig, fmt::format("config: {} = '{}' is not {}", key, value, expected));
}

double as_double(const std::string& key, const std::string& value) {
  const auto v = csv::parse_double(value);
  if (!v) bad_value(key, value, "a number");
  return *v;
}

template <typename Int>
Int as_integer(const std::string& key, const std::string& value) {
  const auto text = csv::trim(value);
  Int out{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_value(key, value, "an integer");
  return out;
}

bool as_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  bad_value(key, value, "a boolean");
}

std::optional<Date> as_date(const std::string& key, const std::string& value) {
  if (value.empty() || value == "none") return std::nullopt;
  const auto d = Date::parse(value);
  if (!d) bad_value(key, value, "a YYYY-MM-DD date");
  return d;
}

std::vector<Eigen::Vector2d> as_points(const std::string& key, const std::string& value) {
  std::vector<Eigen::Vector2d> points;
  for (const auto& item : csv::split(value, ';')) {
    const auto xy = csv::split(item, ',');
    if (xy.size() != 2) bad_value(key, value, "a list like '0,0;0.5,0.1'");
    points.emplace_back(as_double(key, xy[0]), as_double(key, xy[1]));
  }
  return points;
}

}  // namespace

KeyValues parse_key_values(const std::string& text, const std::string& origin) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line(text.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = csv::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, fmt::format("{}:{}: expected key = value", origin, line_no));
    }
    out[std::string(csv::trim(line.substr(0, eq)))] = std::string(csv::trim(line.substr(eq + 1)));
  }
  return out;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::string text;
  for (const auto& line : csv::read_lines(path)) text += line + "\n";
  return parse_key_values(text, path.string());
}

CostSpec ExperimentConfig::cost_spec(Eigen::Index n) const {
  CostSpec spec = CostSpec::uniform(n, trade_rate, borrow_rate);
  spec.gamma = gamma;
  spec.gamma_t = gamma_t;
  spec.gamma_h = gamma_h;
  spec.l_max = l_max;
  spec.mode = weight_mode;
  spec.validate(n);
  return spec;
}

ExperimentConfig apply_key_values(ExperimentConfig c, const KeyValues& values, const std::filesystem::path& base_dir) {
  using Setter = std::function<void(const std::string&, const std::string&)>;
  auto path_of = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  };
  const std::map<std::string, Setter> setters = {
      {"data.prices", [&](auto&, auto& v) { c.prices_path = path_of(v); }},
      {"data.market_column", [&](auto&, auto& v) { c.market_column = v; }},
      {"data.dedup", [&](auto& k, auto& v) { c.dedup = as_bool(k, v); }},
      {"data.train_end", [&](auto& k, auto& v) { c.train_end = as_date(k, v); }},
      {"data.periods_per_year", [&](auto& k, auto& v) { c.periods_per_year = as_double(k, v); }},
      {"universe.k", [&](auto& k, auto& v) { c.universe_k = as_integer<std::size_t>(k, v); }},
      {"noise.mean", [&](auto& k, auto& v) { c.noise.mean = as_double(k, v); }},
      {"noise.std_dev", [&](auto& k, auto& v) { c.noise.std_dev = as_double(k, v); }},
      {"noise.seed", [&](auto& k, auto& v) { c.noise.seed = as_integer<std::uint64_t>(k, v); }},
      {"noise.target",
       [&](auto& k, auto& v) {
         if (v == "returns") c.noise.target = NoiseTarget::Returns;
         else if (v == "prices") c.noise.target = NoiseTarget::Prices;
         else bad_value(k, v, "returns|prices");
       }},
      {"market.rf_annual", [&](auto& k, auto& v) { c.rf_annual = as_double(k, v); }},
      {"shrinkage.target",
       [&](auto& k, auto& v) {
         if (v == "identity") c.shrinkage.target = ShrinkageTarget::ScaledIdentity;
         else if (v == "constant_correlation") c.shrinkage.target = ShrinkageTarget::ConstantCorrelation;
         else bad_value(k, v, "identity|constant_correlation");
       }},
      {"shrinkage.alpha",
       [&](auto& k, auto& v) {
         if (v == "auto") c.shrinkage.alpha_override.reset();
         else c.shrinkage.alpha_override = as_double(k, v);
       }},
      {"cost.gamma", [&](auto& k, auto& v) { c.gamma = as_double(k, v); }},
      {"cost.gamma_t", [&](auto& k, auto& v) { c.gamma_t = as_double(k, v); }},
      {"cost.gamma_h", [&](auto& k, auto& v) { c.gamma_h = as_double(k, v); }},
      {"cost.trade_rate", [&](auto& k, auto& v) { c.trade_rate = as_double(k, v); }},
      {"cost.borrow_rate", [&](auto& k, auto& v) { c.borrow_rate = as_double(k, v); }},
      {"cost.l_max", [&](auto& k, auto& v) { c.l_max = as_double(k, v); }},
      {"cost.mode",
       [&](auto& k, auto& v) {
         if (v == "simplex") c.weight_mode = WeightMode::Simplex;
         else if (v == "leveraged") c.weight_mode = WeightMode::Leveraged;
         else bad_value(k, v, "simplex|leveraged");
       }},
      {"evolve.pop_size", [&](auto& k, auto& v) { c.run.pop_size = as_integer<int>(k, v); }},
      {"evolve.generations", [&](auto& k, auto& v) { c.run.generations = as_integer<int>(k, v); }},
      {"evolve.runs", [&](auto& k, auto& v) { c.run.runs = as_integer<int>(k, v); }},
      {"evolve.seed", [&](auto& k, auto& v) { c.run.seed = as_integer<std::uint64_t>(k, v); }},
      {"evolve.algorithm",
       [&](auto& k, auto& v) {
         const auto a = parse_algorithm(v);
         if (!a) bad_value(k, v, "nsga2|rnsga2|nsga3|unsga3");
         c.run.algorithm = *a;
       }},
      {"evolve.eta_c", [&](auto& k, auto& v) { c.run.eta_c = as_double(k, v); }},
      {"evolve.prob_c", [&](auto& k, auto& v) { c.run.prob_c = as_double(k, v); }},
      {"evolve.eta_m", [&](auto& k, auto& v) { c.run.eta_m = as_double(k, v); }},
      {"evolve.prob_m",
       [&](auto& k, auto& v) { c.run.prob_m = v == "auto" ? 0.0 : as_double(k, v); }},
      {"evolve.partitions", [&](auto& k, auto& v) { c.run.partitions = as_integer<int>(k, v); }},
      {"rnsga2.ref_points", [&](auto& k, auto& v) { c.run.ref_points.points = as_points(k, v); }},
      {"rnsga2.epsilon", [&](auto& k, auto& v) { c.run.ref_points.epsilon = as_double(k, v); }},
      {"surrogate.enabled", [&](auto& k, auto& v) { c.surrogate = as_bool(k, v); }},
      {"surrogate.alpha", [&](auto& k, auto& v) { c.surrogate_config.alpha = as_integer<int>(k, v); }},
      {"surrogate.beta", [&](auto& k, auto& v) { c.surrogate_config.beta = as_integer<int>(k, v); }},
      {"surrogate.n_max_doe", [&](auto& k, auto& v) { c.surrogate_config.n_max_doe = as_integer<int>(k, v); }},
      {"surrogate.n_max_infills",
       [&](auto& k, auto& v) { c.surrogate_config.n_max_infills = as_integer<int>(k, v); }},
      {"surrogate.seed", [&](auto& k, auto& v) { c.surrogate_config.seed = as_integer<std::uint64_t>(k, v); }},
      {"hv.ref_x", [&](auto& k, auto& v) { c.hv.ref_point(0) = as_double(k, v); }},
      {"hv.ref_y", [&](auto& k, auto& v) { c.hv.ref_point(1) = as_double(k, v); }},
      {"hv.bounds",
       [&](auto& k, auto& v) {
         if (v == "auto") {
           c.hv.bounds.reset();
           return;
         }
         const auto parts = csv::split(v, ',');
         if (parts.size() != 4) bad_value(k, v, "'auto' or ideal_risk,ideal_neg_return,nadir_risk,nadir_neg_return");
         ObjectiveBounds b;
         b.ideal = {as_double(k, parts[0]), as_double(k, parts[1])};
         b.nadir = {as_double(k, parts[2]), as_double(k, parts[3])};
         c.hv.bounds = b;
       }},
      {"report.risk_axis",
       [&](auto& k, auto& v) {
         if (v == "variance") c.risk_axis = RiskAxis::Variance;
         else if (v == "volatility") c.risk_axis = RiskAxis::Volatility;
         else bad_value(k, v, "variance|volatility");
       }},
      {"backtest.start", [&](auto& k, auto& v) { c.backtest_start = as_date(k, v); }},
      {"backtest.end", [&](auto& k, auto& v) { c.backtest_end = as_date(k, v); }},
      {"backtest.rebalance_every", [&](auto& k, auto& v) { c.rebalance_every = as_integer<int>(k, v); }},
      {"backtest.gamma_l2", [&](auto& k, auto& v) { c.gamma_l2 = as_double(k, v); }},
      {"output.dir", [&](auto&, auto& v) { c.output_dir = v; }},
      {"runtime.threads", [&](auto& k, auto& v) { c.threads = as_integer<unsigned>(k, v); }},
  };
  for (const auto& [key, value] : values) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw Error(ErrorCode::InvalidConfig, "config: unknown key '" + key + "'");
    it->second(key, value);
  }
  if (c.noise.std_dev < 0) throw Error(ErrorCode::InvalidConfig, "config: noise.std_dev must be >= 0");
  if (c.universe_k < 1) throw Error(ErrorCode::InvalidConfig, "config: universe.k must be >= 1");
  if (!(c.periods_per_year > 0)) throw Error(ErrorCode::InvalidConfig, "config: data.periods_per_year must be > 0");
  if (c.rebalance_every < 0) throw Error(ErrorCode::InvalidConfig, "config: backtest.rebalance_every must be >= 0");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, const KeyValues& overrides) {
  ExperimentConfig config;
  if (!path.empty()) config = apply_key_values(config, read_key_values(path), path.parent_path());
  return apply_key_values(config, overrides);
}

}  // namespace paretofolio
