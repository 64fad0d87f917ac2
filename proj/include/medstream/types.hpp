#ifndef MEDSTREAM_TYPES_HPP
#define MEDSTREAM_TYPES_HPP

#include <Eigen/Dense>

namespace medstream {

enum class ModelKind { kLinear, kLogistic };

// Column layout shared by every batch of a stream. Fixed when the stream is
// initialized and immutable afterwards.
//
// Outcome design:  [1 if intercept] X  M_1..M_p  Z_1..Z_q
// Mediator design: [1 if intercept] X  Z_1..Z_q
// The logistic outcome model always carries an intercept column.
struct ModelDims {
  int n_mediators = 0;    // p >= 1
  int n_confounders = 0;  // q >= 0
  bool outcome_intercept = false;
  bool mediator_intercept = false;

  void validate() const;

  bool has_outcome_intercept(ModelKind model) const {
    return model == ModelKind::kLogistic || outcome_intercept;
  }
  int outcome_cols(ModelKind model) const {
    return (has_outcome_intercept(model) ? 1 : 0) + 1 + n_mediators + n_confounders;
  }
  int mediator_cols() const { return (mediator_intercept ? 1 : 0) + 1 + n_confounders; }

  // Positions inside the outcome design.
  int exposure_col(ModelKind model) const { return has_outcome_intercept(model) ? 1 : 0; }
  int mediator_col(ModelKind model, int j) const { return exposure_col(model) + 1 + j; }

  // Position of the exposure inside the mediator design.
  int mediator_exposure_col() const { return mediator_intercept ? 1 : 0; }
};

// One batch of a data stream: outcome vector plus the design matrices for the
// outcome regression and the p mediator regressions. Raw batches are never
// retained after their update is applied.
struct BatchData {
  Eigen::VectorXd y;  // length n; real for linear models, {0,1} for logistic
  Eigen::MatrixXd w;  // n x outcome_cols
  Eigen::MatrixXd s;  // n x mediator_cols
  Eigen::MatrixXd m;  // n x p, mediator values (targets of the mediator fits)

  Eigen::Index rows() const { return y.size(); }
};

// Builds a consistent BatchData from raw columns.
BatchData assemble_batch(const ModelDims& dims, ModelKind model,
                         const Eigen::VectorXd& x, const Eigen::MatrixXd& m,
                         const Eigen::MatrixXd& z, const Eigen::VectorXd& y);

// Shape/finiteness checks; verifies y is 0/1 for logistic models.
void validate_batch(const ModelDims& dims, ModelKind model, const BatchData& batch);

}  // namespace medstream

#endif  // MEDSTREAM_TYPES_HPP
