#ifndef MEDSTREAM_REPORT_HPP
#define MEDSTREAM_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include "medstream/engine.hpp"
#include "medstream/mediation.hpp"

namespace medstream {

enum class ReportFormat { kText, kCsv, kJson };

// Everything a report renders: per-mediator estimates, the four tests, both
// confidence intervals, selection flags, the effect decomposition and stream
// metadata. Building one is a pure read of the stream state.
struct MediationReport {
  ModelKind model = ModelKind::kLinear;
  long long n_obs = 0;
  long long n_batches = 0;
  double lambda_n = 0.0;
  double delta = 0.05;
  CoefficientSummary summary;
  std::vector<MediatorTestResult> tests;
  SelectionSets selection;
  EffectDecomposition effects;
};

MediationReport build_report(const StreamState& state,
                             std::optional<double> delta_override = {},
                             std::optional<std::pair<double, double>> contrast_override = {});

std::string render_report(const MediationReport& report, ReportFormat format);

}  // namespace medstream

#endif  // MEDSTREAM_REPORT_HPP
