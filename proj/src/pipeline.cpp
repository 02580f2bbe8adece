#include "trim/pipeline.hpp"

#include <chrono>
#include <cstdio>

namespace trim {

namespace {

TrimConfig make(std::optional<std::size_t> mc, QeMode qe, bool conditionals) {
  TrimConfig c;
  c.maxConjuncts = mc;
  c.qe = qe;
  c.placement = PlacementStrategy{false, true, conditionals};
  return c;
}

std::string formatMillis(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = {
      {"trim_LB", make(4, QeMode::Full, false)},
      {"trim_B", make(4, QeMode::Full, true)},
      {"trim_NDB", make(4, QeMode::Nondet, true)},
      {"trim_L", make(std::nullopt, QeMode::Full, false)},
      {"trim", make(std::nullopt, QeMode::Full, true)},
      {"trim_ND", make(std::nullopt, QeMode::Nondet, true)},
  };
  return table;
}

std::optional<TrimConfig> presetConfig(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p.config;
  return std::nullopt;
}

std::string TrimReport::text() const {
  std::string out = "assumes: " + std::to_string(assumes) + "\n";
  out += "non-trivial: " + std::to_string(nonTrivial) + "\n";
  out += "time-ms: " + formatMillis(millis) + "\n";
  for (const auto& a : details) {
    out += "  " + a.proc + ":" + std::to_string(a.span.line) + ":" + std::to_string(a.span.column) +
           ": assume " + toString(a.condition.closed()) + "\n";
  }
  return out;
}

std::string TrimReport::structured() const {
  std::string out;
  out += "assumes = " + std::to_string(assumes) + "\n";
  out += "non_trivial = " + std::to_string(nonTrivial) + "\n";
  out += "time_ms = " + formatMillis(millis) + "\n";
  for (std::size_t i = 0; i < details.size(); ++i) {
    const auto& a = details[i];
    std::string k = "assume." + std::to_string(i) + ".";
    out += k + "proc = " + a.proc + "\n";
    out += k + "line = " + std::to_string(a.span.line) + "\n";
    out += k + "column = " + std::to_string(a.span.column) + "\n";
    out += k + "formula = " + toString(a.condition.closed()) + "\n";
    out += k + "safety = " + toString(a.safety) + "\n";
  }
  return out;
}

TrimResult trimProgram(const Program& p, const TrimConfig& cfg, EmitMode mode) {
  auto start = std::chrono::steady_clock::now();
  TrimResult r;
  r.split = splitProcedures(p);
  AliasOracle oracle = AliasOracle::build(r.split.program);
  r.inference = inferProgram(r.split.program, oracle, InferenceOptions{cfg.intMode});
  InstrumentResult ins = instrument(r.split, r.inference.annotated, cfg, mode);
  r.program = std::move(ins.program);
  r.report.details = std::move(ins.inserted);
  r.report.assumes = r.report.details.size();
  for (const auto& a : r.report.details)
    if (!a.trivial()) ++r.report.nonTrivial;
  r.report.millis =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace trim
