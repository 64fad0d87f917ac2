#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "medstream/errors.hpp"
#include "medstream/logistic.hpp"
#include "support/oracles.hpp"

using namespace medstream;

namespace {

double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  const double scale = std::max(want.lpNorm<Eigen::Infinity>(), 1e-30);
  return (got - want).lpNorm<Eigen::Infinity>() / scale;
}

// Bernoulli outcomes on top of the shared Gaussian design machinery.
oracle::LinearInstance random_logistic_instance(std::mt19937_64& gen, int n, int p, int q,
                                                double coef_scale = 1.0) {
  auto inst = oracle::random_linear_instance(gen, n, p, q, false, false);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    double eta = -0.2 + 0.4 * inst.x[i];
    for (int j = 0; j < p; ++j) eta += 0.3 * inst.m(i, j);
    for (int c = 0; c < q; ++c) eta += 0.25 * inst.z(i, c);
    eta *= coef_scale;
    const double prob = eta >= 0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
    inst.y[i] = unit(gen) < prob ? 1.0 : 0.0;
  }
  return inst;
}

}  // namespace

TEST_CASE("initialization forces the intercept and zeroes the state") {
  auto state = init_logistic_outcome(ModelDims{5, 2, false, false});
  CHECK(state.cols() == 9);
  CHECK(state.coef.size() == 9);
  CHECK(state.coef.isZero(0.0));
  CHECK(state.info.isZero(0.0));
  CHECK(state.dims.outcome_intercept);

  // intercept + exposure + 2 mediators + 1 confounder
  CHECK(init_logistic_outcome(ModelDims{2, 1, false, false}).cols() == 5);
  CHECK_THROWS_AS(init_logistic_outcome(ModelDims{0, 0, false, false}), ConfigError);
  NewtonSettings bad;
  bad.tol = 0.0;
  CHECK_THROWS_AS(init_logistic_outcome(ModelDims{1, 0, false, false}, bad), ConfigError);
}

TEST_CASE("first batch equals the maximum-likelihood fit") {
  std::mt19937_64 gen(201);
  auto inst = random_logistic_instance(gen, 600, 2, 1);
  auto batch = oracle::slice_batch(inst, ModelKind::kLogistic, 0, 600);

  auto state = init_logistic_outcome(inst.dims);
  update_logistic_outcome(state, batch);

  const auto mle = oracle::logistic_irls(batch.w, batch.y);
  CHECK(rel_err(state.coef, mle.coef) < 1e-8);

  // the stored information matches the observed information at the estimate
  CHECK((state.info - mle.info).lpNorm<Eigen::Infinity>() <
        1e-6 * mle.info.lpNorm<Eigen::Infinity>());
}

TEST_CASE("the accepted estimate is a root of the incremental equation") {
  std::mt19937_64 gen(202);
  auto inst = random_logistic_instance(gen, 900, 3, 2);

  auto state = init_logistic_outcome(inst.dims);
  int offset = 0;
  for (int rows : {300, 300, 300}) {
    const Eigen::MatrixXd info_prev = state.info;
    const Eigen::VectorXd coef_prev = state.coef;
    auto batch = oracle::slice_batch(inst, ModelKind::kLogistic, offset, rows);
    update_logistic_outcome(state, batch);

    const Eigen::VectorXd residual =
        info_prev * (coef_prev - state.coef) + logistic_score(batch.w, batch.y, state.coef);
    CHECK(residual.lpNorm<Eigen::Infinity>() <=
          state.newton.tol * static_cast<double>(state.n_obs));
    offset += rows;
  }
}

TEST_CASE("two-batch estimate stays close to the full-data fit") {
  std::mt19937_64 gen(777);
  auto inst = random_logistic_instance(gen, 200, 1, 0, 1.5);

  auto state = init_logistic_outcome(inst.dims);
  update_logistic_outcome(state, oracle::slice_batch(inst, ModelKind::kLogistic, 0, 100));
  update_logistic_outcome(state, oracle::slice_batch(inst, ModelKind::kLogistic, 100, 100));

  auto full = oracle::slice_batch(inst, ModelKind::kLogistic, 0, 200);
  const auto mle = oracle::logistic_irls(full.w, full.y);
  CHECK((state.coef - mle.coef).lpNorm<Eigen::Infinity>() <=
        0.05 * mle.coef.lpNorm<Eigen::Infinity>());
}

TEST_CASE("information increments are positive semidefinite") {
  std::mt19937_64 gen(204);
  auto inst = random_logistic_instance(gen, 500, 2, 1);

  auto state = init_logistic_outcome(inst.dims);
  Eigen::MatrixXd previous = state.info;
  int offset = 0;
  for (int rows : {200, 150, 150}) {
    update_logistic_outcome(state, oracle::slice_batch(inst, ModelKind::kLogistic, offset, rows));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(state.info - previous,
                                                        Eigen::EigenvaluesOnly);
    CHECK(eigs.eigenvalues().minCoeff() > -1e-9 * state.info.lpNorm<Eigen::Infinity>());
    previous = state.info;
    offset += rows;
  }
}

TEST_CASE("summary standard errors come from the inverse information") {
  std::mt19937_64 gen(205);
  const int p = 2, q = 1;
  auto inst = random_logistic_instance(gen, 700, p, q);
  auto batch = oracle::slice_batch(inst, ModelKind::kLogistic, 0, 700);

  auto state = init_logistic_outcome(inst.dims);
  update_logistic_outcome(state, batch);
  auto med = init_mediators(state.dims);
  update_mediators(med, batch);

  const auto summary = summarize_logistic(state, med);

  // classical observed-information standard errors of the single-batch fit
  const auto mle = oracle::logistic_irls(batch.w, batch.y);
  for (int j = 0; j < p; ++j) {
    const int col = state.dims.mediator_col(ModelKind::kLogistic, j);
    CHECK(summary.beta[j] == doctest::Approx(mle.coef[col]).epsilon(1e-8));
    CHECK(summary.beta_se[j] == doctest::Approx(mle.se[col]).epsilon(1e-6));
  }
  CHECK(summary.gamma == doctest::Approx(mle.coef[1]).epsilon(1e-8));

  // brute-force inverse of the accumulated information agrees with the
  // solver-extracted diagonal
  const Eigen::VectorXd brute = state.info.fullPivLu().inverse().diagonal();
  for (int c = 0; c < state.cols(); ++c) {
    CHECK(brute[c] > 0.0);
  }
  CHECK(summary.beta_se[0] ==
        doctest::Approx(std::sqrt(brute[state.dims.mediator_col(ModelKind::kLogistic, 0)]))
            .epsilon(1e-10));

  // alpha side is the shared linear machinery
  const auto alpha_fit = oracle::ols_fit(batch.s, batch.m.col(0));
  CHECK(summary.alpha[0] == doctest::Approx(alpha_fit.coef[0]).epsilon(1e-10));
  CHECK(summary.alpha_se[0] == doctest::Approx(alpha_fit.se[0]).epsilon(1e-10));
}

TEST_CASE("rejects non-binary outcomes") {
  ModelDims dims{1, 0, false, false};
  Eigen::VectorXd x(4), y(4);
  Eigen::MatrixXd m(4, 1), z(4, 0);
  x << 1, -1, 0.5, 2;
  m << 0.2, -0.3, 0.4, 0.1;
  y << 0, 1, 2, 0;  // 2 is not a valid outcome
  CHECK_THROWS_AS(assemble_batch(dims, ModelKind::kLogistic, x, m, z, y), InputError);
}

TEST_CASE("separated data raise a numerical error and leave the state intact") {
  // outcome is a deterministic threshold of x: the likelihood has no maximum
  const int n = 80;
  ModelDims dims{1, 0, false, false};
  std::mt19937_64 gen(206);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x(n), y(n);
  Eigen::MatrixXd m(n, 1), z(n, 0);
  for (int i = 0; i < n; ++i) {
    x[i] = normal(gen) + (i % 2 == 0 ? 2.0 : -2.0);
    m(i, 0) = 0.1 * normal(gen);
    y[i] = x[i] > 0 ? 1.0 : 0.0;
  }
  auto batch = assemble_batch(dims, ModelKind::kLogistic, x, m, z, y);

  auto state = init_logistic_outcome(dims);
  CHECK_THROWS_AS(update_logistic_outcome(state, batch), NumericalError);
  CHECK(state.n_batches == 0);
  CHECK(state.coef.isZero(0.0));
}
