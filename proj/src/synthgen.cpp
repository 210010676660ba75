#include "ejet/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include "ejet/errors.hpp"
#include "ejet/rng.hpp"

#include "json.hpp"

namespace ejet {

namespace {

void check_config(const GeneratorConfig& cfg) {
  if (cfg.speeds.empty() || cfg.voltages.empty() || cfg.flows.empty())
    throw DataError("generator: grid lists must be non-empty");
  if (cfg.noise_sigma < 0.0)
    throw DataError("generator: noise_sigma must be >= 0");
  if (cfg.n < 1) throw DataError("generator: n must be >= 1");
}

PrintSample make_sample(double speed, double voltage, double flow,
                        const GeneratorConfig& cfg, SplitMix64& rng) {
  PrintSample s;
  s.x = {speed, voltage, flow};
  const double mu = resistance_model(speed, voltage, flow, cfg);
  const double r = mu + cfg.noise_sigma * rng.next_gaussian();
  s.resistance = std::max(1.0, r);
  s.label = (*s.resistance >= cfg.threshold) ? 0 : 1;
  return s;
}

}  // namespace

double resistance_model(double speed, double voltage, double flow,
                        const GeneratorConfig& cfg) {
  return cfg.base_resistance + cfg.speed_coeff * std::max(0.0, speed - 500.0) +
         cfg.flow_coeff * std::max(0.0, 15.0 - flow) +
         cfg.voltage_coeff * std::abs(voltage - 2.5);
}

Dataset generate(const GeneratorConfig& cfg) {
  check_config(cfg);
  SplitMix64 rng(cfg.seed);
  Dataset ds;
  ds.samples.reserve(static_cast<std::size_t>(cfg.n));
  for (int i = 0; i < cfg.n; ++i) {
    const double speed = cfg.speeds[rng.next_below(cfg.speeds.size())];
    const double voltage = cfg.voltages[rng.next_below(cfg.voltages.size())];
    const double flow = cfg.flows[rng.next_below(cfg.flows.size())];
    ds.samples.push_back(make_sample(speed, voltage, flow, cfg, rng));
  }
  return ds;
}

Dataset generate_full_grid(const GeneratorConfig& cfg) {
  check_config(cfg);
  SplitMix64 rng(cfg.seed);
  Dataset ds;
  ds.samples.reserve(cfg.speeds.size() * cfg.voltages.size() *
                     cfg.flows.size());
  for (double speed : cfg.speeds)
    for (double voltage : cfg.voltages)
      for (double flow : cfg.flows)
        ds.samples.push_back(make_sample(speed, voltage, flow, cfg, rng));
  return ds;
}

std::string generator_config_to_json(const GeneratorConfig& cfg) {
  nlohmann::json j{{"speeds", cfg.speeds},
                   {"voltages", cfg.voltages},
                   {"flows", cfg.flows},
                   {"base_resistance", cfg.base_resistance},
                   {"speed_coeff", cfg.speed_coeff},
                   {"flow_coeff", cfg.flow_coeff},
                   {"voltage_coeff", cfg.voltage_coeff},
                   {"noise_sigma", cfg.noise_sigma},
                   {"threshold", cfg.threshold},
                   {"n", cfg.n},
                   {"seed", cfg.seed}};
  return j.dump(2) + "\n";
}

GeneratorConfig generator_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("generator config: bad JSON: ") + e.what());
  }
  GeneratorConfig cfg;
  try {
    if (j.contains("speeds")) cfg.speeds = j["speeds"].get<std::vector<double>>();
    if (j.contains("voltages"))
      cfg.voltages = j["voltages"].get<std::vector<double>>();
    if (j.contains("flows")) cfg.flows = j["flows"].get<std::vector<double>>();
    if (j.contains("base_resistance")) cfg.base_resistance = j["base_resistance"];
    if (j.contains("speed_coeff")) cfg.speed_coeff = j["speed_coeff"];
    if (j.contains("flow_coeff")) cfg.flow_coeff = j["flow_coeff"];
    if (j.contains("voltage_coeff")) cfg.voltage_coeff = j["voltage_coeff"];
    if (j.contains("noise_sigma")) cfg.noise_sigma = j["noise_sigma"];
    if (j.contains("threshold")) cfg.threshold = j["threshold"];
    if (j.contains("n")) cfg.n = j["n"];
    if (j.contains("seed")) cfg.seed = j["seed"];
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("generator config: bad field: ") + e.what());
  }
  check_config(cfg);
  return cfg;
}

}  // namespace ejet
