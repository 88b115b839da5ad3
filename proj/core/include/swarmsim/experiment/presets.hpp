#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "swarmsim/scenario/config.hpp"
#include "swarmsim/scenario/population.hpp"

namespace swarmsim {

enum class Scale { kDesk, kPaper };

// Throws std::invalid_argument for anything but "desk" or "paper".
Scale parse_scale(std::string_view name);

// Default scenario at the given scale: 200 nodes, 64 MiB, 10x compression
// for desk; 2000 nodes, 1 GiB, uncompressed for paper.
ScenarioConfig base_config(Scale scale);

struct SweepPoint {
  // Swept values, in column order, e.g. {{"reservation", "0.75"}}.
  std::vector<std::pair<std::string, std::string>> keys;
  ScenarioConfig config;

  // Filename-safe point label, e.g. "reservation=0.75".
  std::string label() const;
};

struct ExperimentPreset {
  std::string name;
  std::string description;
  std::vector<SweepPoint> points;
};

class UnknownPreset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> preset_names();

// Throws UnknownPreset.
ExperimentPreset make_preset(std::string_view name, Scale scale);

// The scaling benchmark: one 512 Kbit/s seed and n symmetric 56 Kbit/s
// leeches that all join at time 0, sharing a 100 MB file.
ScenarioConfig bench_config(std::size_t nodes);
std::vector<NodeSpec> bench_population(const ScenarioConfig& cfg);

}  // namespace swarmsim
