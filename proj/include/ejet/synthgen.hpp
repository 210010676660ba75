#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ejet/dataset.hpp"

namespace ejet {

// Synthetic e-jet dataset generator. The mean-resistance surface is
// calibrated to the measured anchors (35 ohm/sqr baseline, ~215 at
// 700 mm/min) with a hinge above 500 mm/min, a linear penalty for low ink
// flow, and a weak mid-grid voltage optimum, so nozzle speed dominates,
// flow comes second, and voltage matters least.
struct GeneratorConfig {
  std::vector<double> speeds{300.0, 500.0, 700.0};       // mm/min
  std::vector<double> voltages{1.0, 2.0, 3.0, 4.0};      // kV
  std::vector<double> flows{15.0, 12.0, 10.0, 9.0, 6.0, 3.0};  // ul/min
  double base_resistance = 35.0;  // ohm/sqr
  double speed_coeff = 0.9;       // ohm per mm/min above 500
  double flow_coeff = 6.0;        // ohm per ul/min below 15
  double voltage_coeff = 8.0;     // ohm per kV away from 2.5
  double noise_sigma = 15.0;      // ohm/sqr
  double threshold = 100.0;       // ohm/sqr class cut
  int n = 240;
  std::uint64_t seed = 0;
};

// Noise-free mean sheet resistance for one parameter triple.
double resistance_model(double speed, double voltage, double flow,
                        const GeneratorConfig& cfg);

// n samples drawn uniformly (with replacement) from the parameter grid;
// resistance = max(1, model + N(0, sigma)); labels from the threshold rule.
// Deterministic per seed.
Dataset generate(const GeneratorConfig& cfg);

// One sample per grid cell, speeds-major order; same noise/label rules.
Dataset generate_full_grid(const GeneratorConfig& cfg);

std::string generator_config_to_json(const GeneratorConfig& cfg);
GeneratorConfig generator_config_from_json(const std::string& text);

}  // namespace ejet
