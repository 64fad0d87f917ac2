#include "medstream/types.hpp"

#include <sstream>

#include "medstream/errors.hpp"

namespace medstream {

void ModelDims::validate() const {
  if (n_mediators < 1) throw ConfigError("model requires at least one mediator (p >= 1)");
  if (n_confounders < 0) throw ConfigError("confounder count must be non-negative");
}

BatchData assemble_batch(const ModelDims& dims, ModelKind model,
                         const Eigen::VectorXd& x, const Eigen::MatrixXd& m,
                         const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
  dims.validate();
  const Eigen::Index n = x.size();
  if (y.size() != n || m.rows() != n || (dims.n_confounders > 0 && z.rows() != n)) {
    throw InputError("assemble_batch: column lengths disagree");
  }
  if (m.cols() != dims.n_mediators) throw InputError("assemble_batch: mediator count mismatch");
  if (z.cols() != dims.n_confounders) throw InputError("assemble_batch: confounder count mismatch");

  BatchData batch;
  batch.y = y;
  batch.m = m;

  batch.w.resize(n, dims.outcome_cols(model));
  Eigen::Index c = 0;
  if (dims.has_outcome_intercept(model)) batch.w.col(c++).setOnes();
  batch.w.col(c++) = x;
  batch.w.middleCols(c, dims.n_mediators) = m;
  c += dims.n_mediators;
  if (dims.n_confounders > 0) batch.w.middleCols(c, dims.n_confounders) = z;

  batch.s.resize(n, dims.mediator_cols());
  c = 0;
  if (dims.mediator_intercept) batch.s.col(c++).setOnes();
  batch.s.col(c++) = x;
  if (dims.n_confounders > 0) batch.s.middleCols(c, dims.n_confounders) = z;

  validate_batch(dims, model, batch);
  return batch;
}

void validate_batch(const ModelDims& dims, ModelKind model, const BatchData& batch) {
  const Eigen::Index n = batch.rows();
  if (n < 1) throw InputError("batch is empty");
  if (batch.w.rows() != n || batch.s.rows() != n || batch.m.rows() != n) {
    throw InputError("batch row counts disagree");
  }
  if (batch.w.cols() != dims.outcome_cols(model)) {
    std::ostringstream msg;
    msg << "outcome design has " << batch.w.cols() << " columns, expected "
        << dims.outcome_cols(model);
    throw InputError(msg.str());
  }
  if (batch.s.cols() != dims.mediator_cols()) {
    std::ostringstream msg;
    msg << "mediator design has " << batch.s.cols() << " columns, expected "
        << dims.mediator_cols();
    throw InputError(msg.str());
  }
  if (batch.m.cols() != dims.n_mediators) throw InputError("mediator matrix width mismatch");
  if (!batch.y.allFinite() || !batch.w.allFinite() || !batch.s.allFinite() ||
      !batch.m.allFinite()) {
    throw InputError("batch contains non-finite values");
  }
  if (model == ModelKind::kLogistic) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (batch.y[i] != 0.0 && batch.y[i] != 1.0) {
        std::ostringstream msg;
        msg << "logistic outcome must be 0 or 1, found " << batch.y[i] << " at row " << (i + 1);
        throw InputError(msg.str());
      }
    }
  }
}

}  // namespace medstream
