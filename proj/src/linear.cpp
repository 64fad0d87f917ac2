#include "medstream/linear.hpp"

#include <algorithm>
#include <cmath>

#include "medstream/errors.hpp"
#include "medstream/spd.hpp"

namespace medstream {

namespace {

// A residual sum of squares this far below the accumulated squared norm is
// pure cancellation noise: the fit is saturated and the variance is zero.
double snap_rss(double rss, double total) {
  if (rss <= 1e-12 * std::max(total, 1.0)) return 0.0;
  return rss;
}

}  // namespace

LinearOutcomeState init_linear_outcome(const ModelDims& dims) {
  dims.validate();
  LinearOutcomeState state;
  state.dims = dims;
  const int d = state.cols();
  state.coef = Eigen::VectorXd::Zero(d);
  state.info = Eigen::MatrixXd::Zero(d, d);
  return state;
}

MediatorState init_mediators(const ModelDims& dims) {
  dims.validate();
  MediatorState state;
  state.dims = dims;
  const int d = state.cols();
  state.info = Eigen::MatrixXd::Zero(d, d);
  state.coef = Eigen::MatrixXd::Zero(d, dims.n_mediators);
  state.ww_sum = Eigen::VectorXd::Zero(dims.n_mediators);
  state.resid_var = Eigen::VectorXd::Zero(dims.n_mediators);
  return state;
}

std::pair<LinearOutcomeState, MediatorState> init_linear(const ModelDims& dims) {
  return {init_linear_outcome(dims), init_mediators(dims)};
}

void update_linear_outcome(LinearOutcomeState& state, const BatchData& batch) {
  validate_batch(state.dims, ModelKind::kLinear, batch);

  const Eigen::MatrixXd updated_info =
      state.info + batch.w.transpose() * batch.w;  // J_prev + W'W, symmetric by construction
  const Eigen::VectorXd rhs = state.info * state.coef + batch.w.transpose() * batch.y;

  SpdSolver solver(updated_info, "outcome design");
  state.coef = solver.solve(rhs);
  state.info = updated_info;
  state.yy_sum += batch.y.squaredNorm();
  state.n_obs += batch.rows();
  state.n_batches += 1;

  if (state.resid_var_ready()) {
    // Accumulated Y'Y minus the model quadratic is the full-data residual sum
    // of squares.
    const double rss =
        snap_rss(std::max(state.yy_sum - state.coef.dot(state.info * state.coef), 0.0),
                 state.yy_sum);
    state.resid_var = rss / static_cast<double>(state.n_obs - state.cols());
  } else {
    state.resid_var = 0.0;
  }
}

void update_mediators(MediatorState& state, const BatchData& batch) {
  // The batch shapes were already checked against the outcome model by the
  // caller for mixed streams; re-check the mediator-side pieces here.
  const Eigen::Index n = batch.rows();
  if (n < 1) throw InputError("batch is empty");
  if (batch.s.rows() != n || batch.m.rows() != n) throw InputError("batch row counts disagree");
  if (batch.s.cols() != state.cols()) throw InputError("mediator design width mismatch");
  if (batch.m.cols() != state.dims.n_mediators) throw InputError("mediator matrix width mismatch");
  if (!batch.s.allFinite() || !batch.m.allFinite()) {
    throw InputError("batch contains non-finite values");
  }

  const Eigen::MatrixXd updated_info = state.info + batch.s.transpose() * batch.s;
  // One factorization serves all p mediator regressions.
  const Eigen::MatrixXd rhs = state.info * state.coef + batch.s.transpose() * batch.m;

  SpdSolver solver(updated_info, "mediator design");
  state.coef = solver.solve(rhs);
  state.info = updated_info;
  state.ww_sum += batch.m.colwise().squaredNorm().transpose();
  state.n_obs += n;
  state.n_batches += 1;

  if (state.resid_var_ready()) {
    const double dof = static_cast<double>(state.n_obs - state.cols());
    for (int j = 0; j < state.dims.n_mediators; ++j) {
      const double rss = snap_rss(
          std::max(state.ww_sum[j] - state.coef.col(j).dot(state.info * state.coef.col(j)), 0.0),
          state.ww_sum[j]);
      state.resid_var[j] = rss / dof;
    }
  } else {
    state.resid_var.setZero();
  }
}

CoefficientSummary summarize_linear(const LinearOutcomeState& outcome,
                                    const MediatorState& mediators) {
  if (outcome.n_obs != mediators.n_obs || outcome.n_batches != mediators.n_batches) {
    throw InputError("outcome and mediator states come from different streams");
  }
  if (outcome.n_batches == 0) throw NotReadyError("no batches have been processed");
  if (!outcome.resid_var_ready() || !mediators.resid_var_ready()) {
    throw NotReadyError("stream has too few observations for standard errors");
  }

  const ModelDims& dims = outcome.dims;
  const int p = dims.n_mediators;

  SpdSolver outcome_solver(outcome.info, "outcome design");
  const Eigen::VectorXd outcome_inv_diag = outcome_solver.inverse_diagonal();
  SpdSolver mediator_solver(mediators.info, "mediator design");
  const Eigen::VectorXd mediator_inv_diag = mediator_solver.inverse_diagonal();

  CoefficientSummary summary;
  summary.n_obs = outcome.n_obs;
  summary.alpha.resize(p);
  summary.alpha_se.resize(p);
  summary.beta.resize(p);
  summary.beta_se.resize(p);

  const int exposure = dims.exposure_col(ModelKind::kLinear);
  summary.gamma = outcome.coef[exposure];
  summary.gamma_se = std::sqrt(outcome.resid_var * outcome_inv_diag[exposure]);

  const int med_exposure = dims.mediator_exposure_col();
  for (int j = 0; j < p; ++j) {
    const int col = dims.mediator_col(ModelKind::kLinear, j);
    summary.beta[j] = outcome.coef[col];
    summary.beta_se[j] = std::sqrt(outcome.resid_var * outcome_inv_diag[col]);
    summary.alpha[j] = mediators.coef(med_exposure, j);
    summary.alpha_se[j] = std::sqrt(mediators.resid_var[j] * mediator_inv_diag[med_exposure]);
  }

  summary.degenerate_fit =
      outcome.resid_var == 0.0 || (mediators.resid_var.array() == 0.0).any();
  return summary;
}

}  // namespace medstream
