#ifndef MEDSTREAM_LOGISTIC_HPP
#define MEDSTREAM_LOGISTIC_HPP

#include <Eigen/Dense>

#include "medstream/linear.hpp"
#include "medstream/types.hpp"

namespace medstream {

struct NewtonSettings {
  // Convergence tolerance on the estimating equation, measured on the score
  // scaled by the total observation count (the equation grows linearly in N).
  double tol = 1e-10;
  int max_iter = 50;
  bool step_halving = true;
};

// Renewable state of the logistic outcome regression. The intercept column is
// mandatory, so the coefficient layout is [intercept, exposure, M_1..M_p,
// Z_1..Z_q]. `info` accumulates each batch's observed information evaluated
// at that batch's final estimate.
struct LogisticOutcomeState {
  ModelDims dims;  // outcome_intercept forced on
  Eigen::VectorXd coef;
  Eigen::MatrixXd info;
  long long n_obs = 0;
  long long n_batches = 0;
  NewtonSettings newton;

  int cols() const { return dims.outcome_cols(ModelKind::kLogistic); }
};

LogisticOutcomeState init_logistic_outcome(const ModelDims& dims,
                                           const NewtonSettings& newton = {});

// Score W'(y - p(coef)) of one batch.
Eigen::VectorXd logistic_score(const Eigen::MatrixXd& w, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& coef);

// Observed information W' diag(p(1-p)) W of one batch.
Eigen::MatrixXd logistic_information(const Eigen::MatrixXd& w, const Eigen::VectorXd& coef);

// Advances the stream by one batch: solves
//   info_prev (coef_prev - g) + score_batch(g) = 0
// by Newton iteration warm-started at coef_prev, with step halving as the
// safeguard. On the first batch this reduces to the batch maximum-likelihood
// fit. Throws ConvergenceError / SeparationError on failure, leaving the
// state untouched.
void update_logistic_outcome(LogisticOutcomeState& state, const BatchData& batch);

// Standard errors come from the inverse accumulated information; the mediator
// side is the shared linear machinery.
CoefficientSummary summarize_logistic(const LogisticOutcomeState& outcome,
                                      const MediatorState& mediators);

}  // namespace medstream

#endif  // MEDSTREAM_LOGISTIC_HPP
