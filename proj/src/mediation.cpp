#include "medstream/mediation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "medstream/errors.hpp"
#include "medstream/normal.hpp"

namespace medstream {

namespace {

// p-values live in (0, 1]; values that underflow double precision are clamped
// so downstream consumers never see an exact zero.
constexpr double kMinP = 1e-300;

double clamp_p(double p) { return std::min(1.0, std::max(p, kMinP)); }

}  // namespace

double regime_threshold(long long n_obs) {
  if (n_obs < 2) throw InputError("regime threshold needs at least 2 observations");
  const double n = static_cast<double>(n_obs);
  return std::sqrt(n) / std::log(n);
}

MediatorTestResult test_mediator(const CoefficientSummary& summary, int index,
                                 const TestConfig& cfg) {
  const int p = static_cast<int>(summary.alpha.size());
  if (index < 1 || index > p) {
    std::ostringstream msg;
    msg << "mediator index " << index << " out of range 1.." << p;
    throw InputError(msg.str());
  }
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) {
    throw InputError("significance level must lie in (0,1)");
  }

  const int j = index - 1;
  const double alpha = summary.alpha[j];
  const double beta = summary.beta[j];
  const double se_alpha = summary.alpha_se[j];
  const double se_beta = summary.beta_se[j];
  if (!(se_alpha > 0.0) || !(se_beta > 0.0)) {
    std::ostringstream msg;
    msg << "mediator " << index << " has a zero standard error; inference is degenerate";
    throw DegenerateInferenceError(msg.str());
  }

  MediatorTestResult r;
  r.index = index;
  r.product = alpha * beta;
  r.se_product = std::hypot(alpha * se_beta, beta * se_alpha);
  r.t_alpha = alpha / se_alpha;
  r.t_beta = beta / se_beta;
  // With alpha = beta = 0 the product statistic degenerates to 0/0; the
  // continuous limit is 0.
  r.t_sobel = r.se_product > 0.0 ? r.product / r.se_product : 0.0;

  const double lambda = regime_threshold(summary.n_obs);
  const bool large = std::max(std::fabs(r.t_alpha), std::fabs(r.t_beta)) >= lambda;
  r.regime = large ? TestRegime::kLargeStat : TestRegime::kSmallStat;

  r.p_sobel = clamp_p(normal_two_sided_p(r.t_sobel));
  // Under the double null the product statistic concentrates as N(0, 1/4);
  // its CDF at t equals the standard normal at 2t.
  r.p_asobel = large ? r.p_sobel : clamp_p(normal_two_sided_p(2.0 * r.t_sobel));

  const double p_alpha = clamp_p(normal_two_sided_p(r.t_alpha));
  const double p_beta = clamp_p(normal_two_sided_p(r.t_beta));
  r.p_js = std::max(p_alpha, p_beta);
  r.p_ajs = large ? r.p_js : clamp_p(r.p_js * r.p_js);

  const double z = normal_quantile(1.0 - cfg.delta / 2.0);
  const double half_width = z * r.se_product;
  r.ci_sobel = {r.product - half_width, r.product + half_width};
  // The N(0,1/4) quantile is exactly half the standard normal one.
  const double adj_half_width = (large ? 1.0 : 0.5) * half_width;
  r.ci_asobel = {r.product - adj_half_width, r.product + adj_half_width};
  return r;
}

std::vector<MediatorTestResult> test_all_mediators(const CoefficientSummary& summary,
                                                   const TestConfig& cfg) {
  std::vector<MediatorTestResult> results;
  results.reserve(summary.alpha.size());
  for (int index = 1; index <= static_cast<int>(summary.alpha.size()); ++index) {
    results.push_back(test_mediator(summary, index, cfg));
  }
  return results;
}

SelectionSets select_mediators(const std::vector<MediatorTestResult>& results,
                               const TestConfig& cfg) {
  if (results.empty()) throw InputError("no test results to select from");
  const double cutoff = cfg.delta / static_cast<double>(results.size());
  SelectionSets sets;
  for (const auto& r : results) {
    if (r.p_sobel < cutoff) sets.sobel.push_back(r.index);
    if (r.p_asobel < cutoff) sets.asobel.push_back(r.index);
    if (r.p_js < cutoff) sets.js.push_back(r.index);
    if (r.p_ajs < cutoff) sets.ajs.push_back(r.index);
  }
  return sets;
}

EffectDecomposition decompose_effects(const CoefficientSummary& summary, const TestConfig& cfg,
                                      EffectScale scale) {
  const auto [x, x_star] = cfg.contrast;
  if (x == x_star) throw InputError("degenerate contrast: the two exposure levels are equal");

  const double d = x - x_star;
  EffectDecomposition effects;
  effects.scale = scale;
  effects.contrast = cfg.contrast;
  effects.contributions = (summary.alpha.array() * summary.beta.array() * d).matrix();
  effects.nde = summary.gamma * d;
  effects.nie = effects.contributions.sum();
  effects.te = effects.nde + effects.nie;
  return effects;
}

}  // namespace medstream
