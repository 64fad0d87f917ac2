#ifndef MEDSTREAM_SIMULATE_HPP
#define MEDSTREAM_SIMULATE_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "medstream/rng.hpp"
#include "medstream/types.hpp"

namespace medstream {

enum class ExposureLaw {
  kGaussianVar2,   // centered normal with variance 2
  kBernoulliHalf,  // Bernoulli(0.5)
};

// One Monte Carlo design: true coefficients, exposure law, mediator error
// covariance and stream size. Designs 1-8 ship as builtins; n_total and the
// batch split are runtime choices.
struct CaseSpec {
  int case_id = 0;
  ModelKind model = ModelKind::kLinear;
  ExposureLaw exposure = ExposureLaw::kGaussianVar2;
  double exposure_var = 2.0;  // variance of a Gaussian exposure
  Eigen::VectorXd alpha;  // length p, exposure -> mediator
  Eigen::VectorXd beta;   // length p, mediator -> outcome
  double gamma = 0.0;
  Eigen::VectorXd theta;  // length q, confounder -> outcome
  Eigen::MatrixXd eta;    // q x p, column j: confounder -> mediator j
  double mediator_corr = 0.15;  // error covariance is mediator_corr^|i-j|
  long long n_total = 0;

  int n_mediators() const { return static_cast<int>(alpha.size()); }
  int n_confounders() const { return static_cast<int>(theta.size()); }
  Eigen::VectorXd true_products() const;
  std::vector<int> active_indices() const;  // 1-based, alpha_j * beta_j != 0
  std::vector<int> null_indices() const;
  // Simulated streams fit the generating model exactly: no intercepts except
  // the mandatory logistic outcome intercept.
  ModelDims dims() const;
  void validate() const;
};

// The eight builtin designs (1,2,5,6 linear; 3,4,7,8 logistic).
CaseSpec builtin_case(int case_id);

// Raw simulated columns before batching.
struct SimDataset {
  Eigen::VectorXd x;
  Eigen::MatrixXd z;  // n x q
  Eigen::MatrixXd m;  // n x p
  Eigen::VectorXd y;
};

// Draws one dataset of spec.n_total rows. Mediator errors are jointly normal,
// formed from iid draws through the Cholesky factor of the covariance.
SimDataset draw_dataset(const CaseSpec& spec, RngStream& rng);

// Splits a dataset into n_batches equal batches (n_total must be divisible).
std::vector<BatchData> split_batches(const CaseSpec& spec, const SimDataset& data,
                                     int n_batches);

// Convenience: deterministic stream for (spec, seed).
std::vector<BatchData> generate_case(const CaseSpec& spec, int n_batches, std::uint64_t seed);

enum class TestMethod { kSobel, kASobel, kJS, kAJS };
const char* method_name(TestMethod m);

struct RunConfig {
  std::vector<int> batch_counts;  // each must divide n_total
  int reps = 500;
  double delta = 0.05;
  std::uint64_t seed = 1;
  int threads = 1;
  bool include_full_data = true;  // adds the single-batch reference column
  std::vector<TestMethod> methods = {TestMethod::kSobel, TestMethod::kASobel, TestMethod::kJS,
                                     TestMethod::kAJS};
};

struct TargetMetrics {
  int index = 0;  // 1-based mediator index
  double true_product = 0.0;
  double bias = 0.0;
  std::optional<double> sse;  // sample sd of the estimates; absent for reps < 2
  double ase = 0.0;           // mean of the delta-method standard errors
  double cp_sobel = 0.0;
  double cp_asobel = 0.0;
};

struct MethodMetrics {
  TestMethod method = TestMethod::kSobel;
  std::optional<double> fwer;   // absent when the design has no null mediator
  std::optional<double> power;  // absent when the design has no active mediator
};

struct BatchCountMetrics {
  int n_batches = 0;
  int completed_reps = 0;
  std::vector<TargetMetrics> targets;
  std::vector<MethodMetrics> methods;
  double mean_cpu_seconds = 0.0;  // estimation + testing only
};

struct ReplicationFailure {
  int rep = 0;
  std::string message;
};

struct MetricTable {
  int case_id = 0;
  ModelKind model = ModelKind::kLinear;
  long long n_total = 0;
  int reps = 0;
  std::uint64_t seed = 0;
  double delta = 0.05;
  std::vector<BatchCountMetrics> rows;
  std::vector<ReplicationFailure> failures;
};

// Streams every replication through the renewable pipeline at each requested
// batch count (plus the full-data reference) and aggregates the table
// metrics. Replications run on `threads` workers; each one draws its own
// substream, so results do not depend on scheduling. The same draws are
// reused across batch counts within a replication.
MetricTable run_replications(const CaseSpec& spec, const RunConfig& run);

// Long-format CSV (one metric per row).
std::string metric_table_csv(const MetricTable& table);

// Human-readable summary.
std::string metric_table_text(const MetricTable& table);

}  // namespace medstream

#endif  // MEDSTREAM_SIMULATE_HPP
