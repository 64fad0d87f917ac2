#ifndef MEDSTREAM_MEDIATION_HPP
#define MEDSTREAM_MEDIATION_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "medstream/linear.hpp"

namespace medstream {

struct TestConfig {
  double delta = 0.05;                        // significance level
  std::pair<double, double> contrast = {1.0, 0.0};  // exposure pair (x, x*)
};

// Which reference distribution the adjusted tests use. The boundary statistic
// sqrt(N)/log(N) separates the regimes; ties count as the large regime.
enum class TestRegime { kLargeStat, kSmallStat };

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double v) const { return lo <= v && v <= hi; }
};

struct MediatorTestResult {
  int index = 0;  // 1-based mediator index, matching report labels
  double product = 0.0;     // alpha_j * beta_j
  double se_product = 0.0;  // delta-method standard error of the product
  double t_sobel = 0.0;
  double t_alpha = 0.0;
  double t_beta = 0.0;
  TestRegime regime = TestRegime::kLargeStat;
  double p_sobel = 1.0;
  double p_asobel = 1.0;
  double p_js = 1.0;
  double p_ajs = 1.0;
  Interval ci_sobel;
  Interval ci_asobel;
};

// Index sets (1-based) passing the Bonferroni-corrected cutoff delta/p.
struct SelectionSets {
  std::vector<int> sobel, asobel, js, ajs;
};

enum class EffectScale { kLinear, kLogOdds };

// Direct/indirect/total effect decomposition for an exposure contrast. On the
// log odds-ratio scale the same numbers are the logs of the multiplicative
// effects, so te == nde + nie holds exactly on both scales.
struct EffectDecomposition {
  EffectScale scale = EffectScale::kLinear;
  double nde = 0.0;
  double nie = 0.0;
  double te = 0.0;
  Eigen::VectorXd contributions;  // per-mediator product * (x - x*)
  std::pair<double, double> contrast = {1.0, 0.0};
};

// sqrt(N)/log(N): the cutoff against which the component statistics are
// compared to pick the adjusted tests' reference distribution (natural log).
double regime_threshold(long long n_obs);

// Runs all four tests for mediator `index` (1-based). Smallest reportable
// p-value is 1e-300; anything below is clamped and rendered as "<1e-300".
MediatorTestResult test_mediator(const CoefficientSummary& summary, int index,
                                 const TestConfig& cfg);

std::vector<MediatorTestResult> test_all_mediators(const CoefficientSummary& summary,
                                                   const TestConfig& cfg);

SelectionSets select_mediators(const std::vector<MediatorTestResult>& results,
                               const TestConfig& cfg);

EffectDecomposition decompose_effects(const CoefficientSummary& summary, const TestConfig& cfg,
                                      EffectScale scale);

}  // namespace medstream

#endif  // MEDSTREAM_MEDIATION_HPP
