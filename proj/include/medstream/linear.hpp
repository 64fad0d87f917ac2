#ifndef MEDSTREAM_LINEAR_HPP
#define MEDSTREAM_LINEAR_HPP

#include <Eigen/Dense>
#include <utility>

#include "medstream/types.hpp"

namespace medstream {

// Renewable state of the linear outcome regression. Holds only constant-size
// summaries: the accumulated cross-product matrix, the current coefficient
// estimate, and the accumulated squared norm of the outcomes. Raw batches are
// never retained, so memory is O(d^2) regardless of how much data has passed.
struct LinearOutcomeState {
  ModelDims dims;
  Eigen::VectorXd coef;   // renewable coefficient estimate
  Eigen::MatrixXd info;   // accumulated W'W over all batches seen so far
  double yy_sum = 0.0;    // accumulated Y'Y; makes the residual variance renewable
  double resid_var = 0.0; // residual mean square, valid once resid_var_ready()
  long long n_obs = 0;
  long long n_batches = 0;

  int cols() const { return dims.outcome_cols(ModelKind::kLinear); }
  bool resid_var_ready() const { return n_obs > cols(); }
};

// Renewable state of the p mediator regressions. They share one design
// matrix, so a single accumulated S'S and a single factorization per batch
// serve every mediator.
struct MediatorState {
  ModelDims dims;
  Eigen::MatrixXd info;       // accumulated S'S
  Eigen::MatrixXd coef;       // mediator_cols x p; column j fits mediator j
  Eigen::VectorXd ww_sum;     // accumulated squared norm of each mediator column
  Eigen::VectorXd resid_var;  // per-mediator residual mean squares
  long long n_obs = 0;
  long long n_batches = 0;

  int cols() const { return dims.mediator_cols(); }
  bool resid_var_ready() const { return n_obs > cols(); }
};

// Point estimates and standard errors extracted from the renewable states:
// everything the mediation tests consume.
struct CoefficientSummary {
  Eigen::VectorXd alpha;     // exposure -> mediator coefficients
  Eigen::VectorXd alpha_se;
  Eigen::VectorXd beta;      // mediator -> outcome coefficients
  Eigen::VectorXd beta_se;
  double gamma = 0.0;        // direct-effect coefficient of the exposure
  double gamma_se = 0.0;
  long long n_obs = 0;
  // True when some residual variance collapsed to zero (saturated fit); the
  // corresponding standard errors are reported as 0.
  bool degenerate_fit = false;
};

LinearOutcomeState init_linear_outcome(const ModelDims& dims);
MediatorState init_mediators(const ModelDims& dims);
std::pair<LinearOutcomeState, MediatorState> init_linear(const ModelDims& dims);

// Folds one batch into the outcome state. The coefficient update solves
//   (info_prev + W'W) coef_new = info_prev * coef_prev + W'Y
// as a symmetric positive-definite system; the residual variance renews from
// the accumulated Y'Y without touching historical data.
void update_linear_outcome(LinearOutcomeState& state, const BatchData& batch);

// Same recursion for every mediator regression, sharing one factorization of
// (info_prev + S'S). The carried quadratic term of the per-mediator residual
// variance must use the previous-step coefficients for the recursion to
// telescope to the full-data residual sum of squares; accumulating each
// mediator's squared norm evaluates exactly that telescoped form.
void update_mediators(MediatorState& state, const BatchData& batch);

// Pure read; throws NotReadyError until both states are identifiable.
CoefficientSummary summarize_linear(const LinearOutcomeState& outcome,
                                    const MediatorState& mediators);

}  // namespace medstream

#endif  // MEDSTREAM_LINEAR_HPP
