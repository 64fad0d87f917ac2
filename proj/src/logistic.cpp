#include "medstream/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "medstream/errors.hpp"
#include "medstream/spd.hpp"

namespace medstream {

namespace {

// Linear predictors beyond this magnitude mean the fitted probabilities have
// saturated to machine 0/1: the classic signature of separation.
constexpr double kSeparationGuard = 250.0;

double sigmoid(double eta) {
  if (eta >= 0.0) {
    return 1.0 / (1.0 + std::exp(-eta));
  }
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

Eigen::VectorXd fitted_probs(const Eigen::MatrixXd& w, const Eigen::VectorXd& coef) {
  Eigen::VectorXd eta = w * coef;
  if (eta.lpNorm<Eigen::Infinity>() > kSeparationGuard) {
    throw SeparationError(
        "linear predictor diverged; the batch appears to be separable");
  }
  return eta.unaryExpr([](double e) { return sigmoid(e); });
}

}  // namespace

LogisticOutcomeState init_logistic_outcome(const ModelDims& dims, const NewtonSettings& newton) {
  dims.validate();
  if (!(newton.tol > 0.0)) throw ConfigError("Newton tolerance must be positive");
  if (newton.max_iter < 1) throw ConfigError("Newton iteration cap must be at least 1");

  LogisticOutcomeState state;
  state.dims = dims;
  state.dims.outcome_intercept = true;  // the logistic outcome model always has one
  state.newton = newton;
  const int d = state.cols();
  state.coef = Eigen::VectorXd::Zero(d);
  state.info = Eigen::MatrixXd::Zero(d, d);
  return state;
}

Eigen::VectorXd logistic_score(const Eigen::MatrixXd& w, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& coef) {
  return w.transpose() * (y - fitted_probs(w, coef));
}

Eigen::MatrixXd logistic_information(const Eigen::MatrixXd& w, const Eigen::VectorXd& coef) {
  const Eigen::VectorXd probs = fitted_probs(w, coef);
  const Eigen::ArrayXd weights = probs.array() * (1.0 - probs.array());
  return w.transpose() * (w.array().colwise() * weights).matrix();
}

void update_logistic_outcome(LogisticOutcomeState& state, const BatchData& batch) {
  validate_batch(state.dims, ModelKind::kLogistic, batch);

  const Eigen::MatrixXd& prev_info = state.info;
  const Eigen::VectorXd prev_coef = state.coef;
  const double scale = std::max<double>(1.0, static_cast<double>(state.n_obs + batch.rows()));
  const double tol = state.newton.tol * scale;

  auto equation = [&](const Eigen::VectorXd& g) -> Eigen::VectorXd {
    return prev_info * (prev_coef - g) + logistic_score(batch.w, batch.y, g);
  };

  Eigen::VectorXd coef = prev_coef;
  Eigen::VectorXd residual = equation(coef);
  double norm = residual.lpNorm<Eigen::Infinity>();
  bool converged = norm <= tol;

  for (int iter = 0; iter < state.newton.max_iter && !converged; ++iter) {
    const Eigen::MatrixXd jacobian = prev_info + logistic_information(batch.w, coef);
    SpdSolver solver(jacobian, "outcome design");
    const Eigen::VectorXd step = solver.solve(residual);

    double step_scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 10; ++halving) {
      const Eigen::VectorXd trial = coef + step_scale * step;
      const Eigen::VectorXd trial_residual = equation(trial);
      const double trial_norm = trial_residual.lpNorm<Eigen::Infinity>();
      if (!state.newton.step_halving || trial_norm < norm) {
        coef = trial;
        residual = trial_residual;
        norm = trial_norm;
        accepted = true;
        break;
      }
      step_scale *= 0.5;
    }
    if (!accepted) {
      std::ostringstream msg;
      msg << "estimating-equation norm failed to decrease after step halving (residual "
          << norm << ")";
      throw ConvergenceError(msg.str(), norm);
    }
    converged = norm <= tol;
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "Newton iteration did not converge within " << state.newton.max_iter
        << " steps (residual " << norm << ")";
    throw ConvergenceError(msg.str(), norm);
  }

  // Accumulate the batch information at the accepted estimate, matching the
  // definition used for the variance of the renewable estimator.
  state.info = prev_info + logistic_information(batch.w, coef);
  state.coef = coef;
  state.n_obs += batch.rows();
  state.n_batches += 1;
}

CoefficientSummary summarize_logistic(const LogisticOutcomeState& outcome,
                                      const MediatorState& mediators) {
  if (outcome.n_obs != mediators.n_obs || outcome.n_batches != mediators.n_batches) {
    throw InputError("outcome and mediator states come from different streams");
  }
  if (outcome.n_batches == 0) throw NotReadyError("no batches have been processed");
  if (outcome.n_obs <= outcome.cols() || !mediators.resid_var_ready()) {
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

  const int exposure = dims.exposure_col(ModelKind::kLogistic);
  summary.gamma = outcome.coef[exposure];
  summary.gamma_se = std::sqrt(outcome_inv_diag[exposure]);

  const int med_exposure = dims.mediator_exposure_col();
  for (int j = 0; j < p; ++j) {
    const int col = dims.mediator_col(ModelKind::kLogistic, j);
    summary.beta[j] = outcome.coef[col];
    summary.beta_se[j] = std::sqrt(outcome_inv_diag[col]);
    summary.alpha[j] = mediators.coef(med_exposure, j);
    summary.alpha_se[j] = std::sqrt(mediators.resid_var[j] * mediator_inv_diag[med_exposure]);
  }

  summary.degenerate_fit = (mediators.resid_var.array() == 0.0).any();
  return summary;
}

}  // namespace medstream
