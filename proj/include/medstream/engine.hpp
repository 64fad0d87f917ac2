#ifndef MEDSTREAM_ENGINE_HPP
#define MEDSTREAM_ENGINE_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "medstream/linear.hpp"
#include "medstream/logistic.hpp"
#include "medstream/types.hpp"

namespace medstream {

// Optional per-column centering/scaling of the X, M_1..M_p, Z_1..Z_q columns
// (in that order). Parameters are fixed at initialization, or frozen from the
// first batch when requested; they never change mid-stream because that would
// silently change the model between batches.
struct Standardization {
  Eigen::VectorXd mean;   // length 1+p+q
  Eigen::VectorXd scale;  // same length, strictly positive
};

struct StreamConfig {
  ModelKind model = ModelKind::kLinear;
  ModelDims dims;
  double delta = 0.05;
  std::pair<double, double> contrast = {1.0, 0.0};
  std::optional<Standardization> standardize;
  bool standardize_from_first_batch = false;

  void validate() const;
};

// Raw parsed columns of one batch, before standardization and design assembly.
struct RawBatch {
  Eigen::VectorXd x, y;
  Eigen::MatrixXd m, z;
  Eigen::Index rows() const { return y.size(); }
};

// Everything one stream carries between updates. Value type: copyable,
// movable, serializable, transferable across threads between operations.
// One stream has one writer; reads of a snapshot are freely concurrent.
struct StreamState {
  StreamConfig config;
  std::variant<LinearOutcomeState, LogisticOutcomeState> outcome;
  MediatorState mediators;

  long long batch_count() const;
  long long n_obs() const;
};

StreamState init_stream(const StreamConfig& config);

// Standardizes (if configured) and assembles the design matrices.
BatchData prepare_batch(const StreamConfig& config, const RawBatch& raw);

// Applies one batch to both regressions. `expected_index` (1-based) guards
// against re-sending a batch: it must equal batch_count()+1 when given.
// Returns a warning message when standardization parameters were just frozen
// from this first batch.
std::optional<std::string> update_stream(StreamState& state, const RawBatch& raw,
                                         std::optional<long long> expected_index = {});

// Extracts the coefficient summary from whichever model the stream runs.
CoefficientSummary summarize_stream(const StreamState& state);

}  // namespace medstream

#endif  // MEDSTREAM_ENGINE_HPP
