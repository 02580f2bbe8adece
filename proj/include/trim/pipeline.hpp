#ifndef TRIM_PIPELINE_HPP
#define TRIM_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "trim/alias.hpp"
#include "trim/infer.hpp"
#include "trim/instrument.hpp"

namespace trim {

struct Preset {
  std::string name;
  TrimConfig config;
};

/// trim_LB, trim_B, trim_NDB, trim_L, trim, trim_ND.
const std::vector<Preset>& presets();
std::optional<TrimConfig> presetConfig(const std::string& name);

struct TrimReport {
  std::size_t assumes = 0;
  std::size_t nonTrivial = 0;
  double millis = 0;
  std::vector<InsertedAssume> details;

  std::string text() const;
  /// One `key = value` per line; details as `assume.N.*` keys.
  std::string structured() const;
};

struct TrimResult {
  Program program;
  TrimReport report;
  SplitProgram split;
  InferenceResult inference;
};

TrimResult trimProgram(const Program& p, const TrimConfig& cfg, EmitMode mode = EmitMode::Assume);

}  // namespace trim

#endif  // TRIM_PIPELINE_HPP
