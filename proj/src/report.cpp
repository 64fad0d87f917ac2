#include "medstream/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "medstream/errors.hpp"

namespace medstream {

namespace {

// p-values at the storage floor were clamped; render them as an interval.
std::string format_p(double p) {
  if (p <= 1e-300) return "<1e-300";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", p);
  return buf;
}

std::string format_num(double v, const char* fmt = "%.6g") {
  char buf[40];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

bool in_set(const std::vector<int>& set, int index) {
  return std::find(set.begin(), set.end(), index) != set.end();
}

std::string render_text(const MediationReport& r) {
  std::ostringstream out;
  out << "model: " << (r.model == ModelKind::kLinear ? "linear" : "logistic")
      << "  batches: " << r.n_batches << "  observations: " << r.n_obs
      << "  lambda_N: " << format_num(r.lambda_n) << "  delta: " << r.delta << "\n";
  if (r.summary.degenerate_fit) {
    out << "warning: degenerate fit, some residual variances are zero\n";
  }
  out << "direct effect coefficient: " << format_num(r.summary.gamma) << " (se "
      << format_num(r.summary.gamma_se) << ")\n\n";

  out << "mediator   estimate      se            p_sobel     p_asobel    p_js        p_ajs     "
         "  selected\n";
  for (const auto& t : r.tests) {
    char line[256];
    std::snprintf(line, sizeof(line), "M%-8d %-13.5g %-13.5g %-11s %-11s %-11s %-11s %c%c%c%c\n",
                  t.index, t.product, t.se_product, format_p(t.p_sobel).c_str(),
                  format_p(t.p_asobel).c_str(), format_p(t.p_js).c_str(),
                  format_p(t.p_ajs).c_str(), in_set(r.selection.sobel, t.index) ? 'S' : '-',
                  in_set(r.selection.asobel, t.index) ? 'A' : '-',
                  in_set(r.selection.js, t.index) ? 'J' : '-',
                  in_set(r.selection.ajs, t.index) ? 'a' : '-');
    out << line;
    out << "           ci_sobel  [" << format_num(t.ci_sobel.lo) << ", "
        << format_num(t.ci_sobel.hi) << "]   ci_asobel [" << format_num(t.ci_asobel.lo) << ", "
        << format_num(t.ci_asobel.hi) << "]\n";
  }

  out << "\neffects for contrast (" << r.effects.contrast.first << " vs "
      << r.effects.contrast.second << ")";
  if (r.effects.scale == EffectScale::kLogOdds) {
    out << " on the log odds-ratio scale:\n";
    out << "  log NDE = " << format_num(r.effects.nde) << "  (OR "
        << format_num(std::exp(r.effects.nde)) << ")\n";
    out << "  log NIE = " << format_num(r.effects.nie) << "  (OR "
        << format_num(std::exp(r.effects.nie)) << ")\n";
    out << "  log TE  = " << format_num(r.effects.te) << "  (OR "
        << format_num(std::exp(r.effects.te)) << ")\n";
  } else {
    out << ":\n";
    out << "  NDE = " << format_num(r.effects.nde) << "\n";
    out << "  NIE = " << format_num(r.effects.nie) << "\n";
    out << "  TE  = " << format_num(r.effects.te) << "\n";
  }
  return out.str();
}

std::string render_csv(const MediationReport& r) {
  std::ostringstream out;
  // Metadata travels in '#' comment lines so the table itself stays a plain
  // one-header CSV.
  out << "# model=" << (r.model == ModelKind::kLinear ? "linear" : "logistic")
      << " batches=" << r.n_batches << " observations=" << r.n_obs
      << " lambda_n=" << format_num(r.lambda_n, "%.12g") << " delta=" << r.delta << "\n";
  out << "# gamma=" << format_num(r.summary.gamma, "%.12g")
      << " gamma_se=" << format_num(r.summary.gamma_se, "%.12g") << "\n";
  out << "# nde=" << format_num(r.effects.nde, "%.12g")
      << " nie=" << format_num(r.effects.nie, "%.12g")
      << " te=" << format_num(r.effects.te, "%.12g")
      << " scale=" << (r.effects.scale == EffectScale::kLogOdds ? "log-odds" : "linear") << "\n";
  out << "mediator,alpha,alpha_se,beta,beta_se,product,se_product,t_sobel,t_alpha,t_beta,regime,"
         "p_sobel,p_asobel,p_js,p_ajs,ci_sobel_lo,ci_sobel_hi,ci_asobel_lo,ci_asobel_hi,"
         "sel_sobel,sel_asobel,sel_js,sel_ajs\n";
  for (const auto& t : r.tests) {
    const int j = t.index - 1;
    out << t.index << ',' << format_num(r.summary.alpha[j], "%.12g") << ','
        << format_num(r.summary.alpha_se[j], "%.12g") << ','
        << format_num(r.summary.beta[j], "%.12g") << ','
        << format_num(r.summary.beta_se[j], "%.12g") << ',' << format_num(t.product, "%.12g")
        << ',' << format_num(t.se_product, "%.12g") << ',' << format_num(t.t_sobel, "%.12g")
        << ',' << format_num(t.t_alpha, "%.12g") << ',' << format_num(t.t_beta, "%.12g") << ','
        << (t.regime == TestRegime::kLargeStat ? "large" : "small") << ','
        << format_num(t.p_sobel, "%.12g") << ',' << format_num(t.p_asobel, "%.12g") << ','
        << format_num(t.p_js, "%.12g") << ',' << format_num(t.p_ajs, "%.12g") << ','
        << format_num(t.ci_sobel.lo, "%.12g") << ',' << format_num(t.ci_sobel.hi, "%.12g") << ','
        << format_num(t.ci_asobel.lo, "%.12g") << ',' << format_num(t.ci_asobel.hi, "%.12g")
        << ',' << in_set(r.selection.sobel, t.index) << ',' << in_set(r.selection.asobel, t.index)
        << ',' << in_set(r.selection.js, t.index) << ',' << in_set(r.selection.ajs, t.index)
        << "\n";
  }
  return out.str();
}

std::string render_json(const MediationReport& r) {
  nlohmann::json j;
  j["model"] = r.model == ModelKind::kLinear ? "linear" : "logistic";
  j["batches"] = r.n_batches;
  j["observations"] = r.n_obs;
  j["lambda_n"] = r.lambda_n;
  j["delta"] = r.delta;
  j["degenerate_fit"] = r.summary.degenerate_fit;
  j["gamma"] = r.summary.gamma;
  j["gamma_se"] = r.summary.gamma_se;

  j["mediators"] = nlohmann::json::array();
  for (const auto& t : r.tests) {
    const int idx = t.index - 1;
    nlohmann::json m;
    m["index"] = t.index;
    m["alpha"] = r.summary.alpha[idx];
    m["alpha_se"] = r.summary.alpha_se[idx];
    m["beta"] = r.summary.beta[idx];
    m["beta_se"] = r.summary.beta_se[idx];
    m["product"] = t.product;
    m["se_product"] = t.se_product;
    m["t_sobel"] = t.t_sobel;
    m["t_alpha"] = t.t_alpha;
    m["t_beta"] = t.t_beta;
    m["regime"] = t.regime == TestRegime::kLargeStat ? "large" : "small";
    m["p_sobel"] = t.p_sobel;
    m["p_asobel"] = t.p_asobel;
    m["p_js"] = t.p_js;
    m["p_ajs"] = t.p_ajs;
    m["ci_sobel"] = {t.ci_sobel.lo, t.ci_sobel.hi};
    m["ci_asobel"] = {t.ci_asobel.lo, t.ci_asobel.hi};
    m["selected"] = {{"sobel", in_set(r.selection.sobel, t.index)},
                     {"asobel", in_set(r.selection.asobel, t.index)},
                     {"js", in_set(r.selection.js, t.index)},
                     {"ajs", in_set(r.selection.ajs, t.index)}};
    j["mediators"].push_back(std::move(m));
  }

  j["selection"] = {{"sobel", r.selection.sobel},
                    {"asobel", r.selection.asobel},
                    {"js", r.selection.js},
                    {"ajs", r.selection.ajs}};

  nlohmann::json effects;
  effects["scale"] = r.effects.scale == EffectScale::kLogOdds ? "log-odds" : "linear";
  effects["contrast"] = {r.effects.contrast.first, r.effects.contrast.second};
  effects["nde"] = r.effects.nde;
  effects["nie"] = r.effects.nie;
  effects["te"] = r.effects.te;
  effects["contributions"] = std::vector<double>(
      r.effects.contributions.data(),
      r.effects.contributions.data() + r.effects.contributions.size());
  if (r.effects.scale == EffectScale::kLogOdds) {
    effects["nde_or"] = std::exp(r.effects.nde);
    effects["nie_or"] = std::exp(r.effects.nie);
    effects["te_or"] = std::exp(r.effects.te);
  }
  j["effects"] = std::move(effects);
  return j.dump(2) + "\n";
}

}  // namespace

MediationReport build_report(const StreamState& state, std::optional<double> delta_override,
                             std::optional<std::pair<double, double>> contrast_override) {
  MediationReport report;
  report.model = state.config.model;
  report.n_obs = state.n_obs();
  report.n_batches = state.batch_count();
  report.delta = delta_override.value_or(state.config.delta);

  TestConfig cfg;
  cfg.delta = report.delta;
  cfg.contrast = contrast_override.value_or(state.config.contrast);

  report.summary = summarize_stream(state);
  report.lambda_n = regime_threshold(report.n_obs);
  report.tests = test_all_mediators(report.summary, cfg);
  report.selection = select_mediators(report.tests, cfg);
  report.effects = decompose_effects(
      report.summary, cfg,
      report.model == ModelKind::kLinear ? EffectScale::kLinear : EffectScale::kLogOdds);
  return report;
}

std::string render_report(const MediationReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kText: return render_text(report);
    case ReportFormat::kCsv: return render_csv(report);
    case ReportFormat::kJson: return render_json(report);
  }
  throw InputError("unknown report format");
}

}  // namespace medstream
