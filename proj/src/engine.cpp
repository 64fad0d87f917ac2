#include "medstream/engine.hpp"

#include <cmath>
#include <sstream>

#include "medstream/errors.hpp"

namespace medstream {

void StreamConfig::validate() const {
  dims.validate();
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0,1)");
  if (standardize) {
    const Eigen::Index want = 1 + dims.n_mediators + dims.n_confounders;
    if (standardize->mean.size() != want || standardize->scale.size() != want) {
      throw ConfigError("standardization vectors must cover the 1+p+q data columns");
    }
    if (!(standardize->scale.array() > 0.0).all()) {
      throw ConfigError("standardization scales must be positive");
    }
  }
}

long long StreamState::batch_count() const {
  return std::visit([](const auto& s) { return s.n_batches; }, outcome);
}

long long StreamState::n_obs() const {
  return std::visit([](const auto& s) { return s.n_obs; }, outcome);
}

StreamState init_stream(const StreamConfig& config) {
  config.validate();
  StreamState state;
  state.config = config;
  if (config.model == ModelKind::kLogistic) {
    state.outcome = init_logistic_outcome(config.dims);
    // Keep the stored dims consistent with the forced intercept.
    state.config.dims = std::get<LogisticOutcomeState>(state.outcome).dims;
  } else {
    state.outcome = init_linear_outcome(config.dims);
  }
  state.mediators = init_mediators(state.config.dims);
  return state;
}

BatchData prepare_batch(const StreamConfig& config, const RawBatch& raw) {
  const Eigen::Index n = raw.rows();
  if (n < 1) throw InputError("batch is empty");
  if (raw.x.size() != n || raw.m.rows() != n ||
      (config.dims.n_confounders > 0 && raw.z.rows() != n)) {
    throw InputError("batch column lengths disagree");
  }

  Eigen::VectorXd x = raw.x;
  Eigen::MatrixXd m = raw.m;
  Eigen::MatrixXd z = raw.z;
  if (config.standardize) {
    const auto& std_params = *config.standardize;
    Eigen::Index c = 0;
    x = (x.array() - std_params.mean[c]) / std_params.scale[c];
    ++c;
    for (Eigen::Index j = 0; j < m.cols(); ++j, ++c) {
      m.col(j) = (m.col(j).array() - std_params.mean[c]) / std_params.scale[c];
    }
    for (Eigen::Index j = 0; j < z.cols(); ++j, ++c) {
      z.col(j) = (z.col(j).array() - std_params.mean[c]) / std_params.scale[c];
    }
  }
  return assemble_batch(config.dims, config.model, x, m, z, raw.y);
}

namespace {

Standardization from_first_batch(const RawBatch& raw) {
  const Eigen::Index cols = 1 + raw.m.cols() + raw.z.cols();
  const double n = static_cast<double>(raw.rows());
  Standardization std_params;
  std_params.mean.resize(cols);
  std_params.scale.resize(cols);

  auto column_stats = [&](const Eigen::VectorXd& col, Eigen::Index slot) {
    const double mean = col.mean();
    double sd = 0.0;
    if (raw.rows() > 1) {
      sd = std::sqrt((col.array() - mean).square().sum() / (n - 1.0));
    }
    std_params.mean[slot] = mean;
    // A constant column cannot be scaled; leave it untouched.
    std_params.scale[slot] = sd > 0.0 ? sd : 1.0;
  };

  Eigen::Index c = 0;
  column_stats(raw.x, c++);
  for (Eigen::Index j = 0; j < raw.m.cols(); ++j) column_stats(raw.m.col(j), c++);
  for (Eigen::Index j = 0; j < raw.z.cols(); ++j) column_stats(raw.z.col(j), c++);
  return std_params;
}

}  // namespace

std::optional<std::string> update_stream(StreamState& state, const RawBatch& raw,
                                         std::optional<long long> expected_index) {
  const long long next_index = state.batch_count() + 1;
  if (expected_index && *expected_index != next_index) {
    std::ostringstream msg;
    msg << "stream already holds " << state.batch_count() << " batch(es); batch index "
        << *expected_index << " is not the next one (" << next_index << ")";
    throw InputError(msg.str());
  }

  std::optional<std::string> warning;
  StreamConfig config = state.config;
  if (config.standardize_from_first_batch && !config.standardize) {
    config.standardize = from_first_batch(raw);
    config.standardize_from_first_batch = false;
    warning =
        "standardization parameters were estimated from the first batch and are now frozen "
        "for the rest of the stream";
  }

  // Update copies and commit only on success, so a failed batch leaves the
  // stream exactly as it was (including a would-be standardization freeze).
  const BatchData batch = prepare_batch(config, raw);
  auto outcome = state.outcome;
  auto mediators = state.mediators;
  if (auto* linear = std::get_if<LinearOutcomeState>(&outcome)) {
    update_linear_outcome(*linear, batch);
  } else {
    update_logistic_outcome(std::get<LogisticOutcomeState>(outcome), batch);
  }
  update_mediators(mediators, batch);

  state.config = std::move(config);
  state.outcome = std::move(outcome);
  state.mediators = std::move(mediators);
  return warning;
}

CoefficientSummary summarize_stream(const StreamState& state) {
  if (const auto* linear = std::get_if<LinearOutcomeState>(&state.outcome)) {
    return summarize_linear(*linear, state.mediators);
  }
  return summarize_logistic(std::get<LogisticOutcomeState>(state.outcome), state.mediators);
}

}  // namespace medstream
