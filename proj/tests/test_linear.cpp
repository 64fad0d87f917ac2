#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "medstream/errors.hpp"
#include "medstream/linear.hpp"
#include "support/oracles.hpp"

using namespace medstream;

namespace {

double rel_err(const Eigen::VectorXd& got, const Eigen::VectorXd& want) {
  const double scale = std::max(want.lpNorm<Eigen::Infinity>(), 1e-30);
  return (got - want).lpNorm<Eigen::Infinity>() / scale;
}

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-30);
}

}  // namespace

TEST_CASE("initialization zeroes every accumulator") {
  ModelDims dims{5, 2, false, false};
  auto [out, med] = init_linear(dims);
  CHECK(out.coef.size() == 8);
  CHECK(out.info.rows() == 8);
  CHECK(out.info.cols() == 8);
  CHECK(out.coef.isZero(0.0));
  CHECK(out.info.isZero(0.0));
  CHECK(out.resid_var == 0.0);
  CHECK(out.n_obs == 0);
  CHECK(med.info.isZero(0.0));
  CHECK(med.coef.isZero(0.0));

  auto tiny = init_linear_outcome(ModelDims{1, 0, false, false});
  CHECK(tiny.coef.size() == 2);

  ModelDims with_icpt{2, 1, true, true};
  CHECK(with_icpt.outcome_cols(ModelKind::kLinear) == 5);
  CHECK(with_icpt.mediator_cols() == 3);

  CHECK_THROWS_AS(init_linear_outcome(ModelDims{0, 2, false, false}), ConfigError);
}

TEST_CASE("first batch reduces to ordinary least squares") {
  std::mt19937_64 gen(101);
  auto inst = oracle::random_linear_instance(gen, 60, 3, 2, false, false);
  auto batch = oracle::slice_batch(inst, ModelKind::kLinear, 0, 60);

  auto out = init_linear_outcome(inst.dims);
  update_linear_outcome(out, batch);

  const auto fit = oracle::ols_fit(batch.w, batch.y);
  CHECK(rel_err(out.coef, fit.coef) < 1e-12);
  CHECK(rel_err(out.resid_var, fit.resid_var) < 1e-12);
  CHECK(out.n_obs == 60);
  CHECK(out.n_batches == 1);
}

TEST_CASE("two batches match the concatenated one-pass fit") {
  std::mt19937_64 gen(102);
  auto inst = oracle::random_linear_instance(gen, 150, 4, 1, true, false);

  auto out = init_linear_outcome(inst.dims);
  update_linear_outcome(out, oracle::slice_batch(inst, ModelKind::kLinear, 0, 70));
  update_linear_outcome(out, oracle::slice_batch(inst, ModelKind::kLinear, 70, 80));

  auto full = oracle::slice_batch(inst, ModelKind::kLinear, 0, 150);
  const auto fit = oracle::ols_fit(full.w, full.y);
  CHECK(rel_err(out.coef, fit.coef) < 1e-10);
  CHECK(rel_err(out.resid_var, fit.resid_var) < 1e-10);
}

TEST_CASE("mediator recursion matches per-mediator least squares") {
  std::mt19937_64 gen(103);
  auto inst = oracle::random_linear_instance(gen, 120, 3, 2, false, false);

  auto med = init_mediators(inst.dims);
  auto first = oracle::slice_batch(inst, ModelKind::kLinear, 0, 50);
  update_mediators(med, first);
  for (int j = 0; j < 3; ++j) {
    const auto fit = oracle::ols_fit(first.s, first.m.col(j));
    CHECK(rel_err(Eigen::VectorXd(med.coef.col(j)), fit.coef) < 1e-12);
  }

  update_mediators(med, oracle::slice_batch(inst, ModelKind::kLinear, 50, 70));
  auto full = oracle::slice_batch(inst, ModelKind::kLinear, 0, 120);
  for (int j = 0; j < 3; ++j) {
    const auto fit = oracle::ols_fit(full.s, full.m.col(j));
    CHECK(rel_err(Eigen::VectorXd(med.coef.col(j)), fit.coef) < 1e-10);
    CHECK(rel_err(med.resid_var[j], fit.resid_var) < 1e-10);
  }
}

TEST_CASE("summary equals the full-data summary componentwise") {
  std::mt19937_64 gen(104);
  auto inst = oracle::random_linear_instance(gen, 200, 2, 2, false, false);

  auto [out, med] = init_linear(inst.dims);
  for (auto [offset, rows] : {std::pair{0, 90}, std::pair{90, 110}}) {
    auto batch = oracle::slice_batch(inst, ModelKind::kLinear, offset, rows);
    update_linear_outcome(out, batch);
    update_mediators(med, batch);
  }
  const auto summary = summarize_linear(out, med);

  auto full = oracle::slice_batch(inst, ModelKind::kLinear, 0, 200);
  const auto outcome_fit = oracle::ols_fit(full.w, full.y);
  const int exposure = inst.dims.exposure_col(ModelKind::kLinear);
  CHECK(rel_err(summary.gamma, outcome_fit.coef[exposure]) < 1e-10);
  CHECK(rel_err(summary.gamma_se, outcome_fit.se[exposure]) < 1e-10);
  for (int j = 0; j < 2; ++j) {
    const int col = inst.dims.mediator_col(ModelKind::kLinear, j);
    CHECK(rel_err(summary.beta[j], outcome_fit.coef[col]) < 1e-10);
    CHECK(rel_err(summary.beta_se[j], outcome_fit.se[col]) < 1e-10);
    const auto med_fit = oracle::ols_fit(full.s, full.m.col(j));
    const int xrow = inst.dims.mediator_exposure_col();
    CHECK(rel_err(summary.alpha[j], med_fit.coef[xrow]) < 1e-10);
    CHECK(rel_err(summary.alpha_se[j], med_fit.se[xrow]) < 1e-10);
  }
  CHECK_FALSE(summary.degenerate_fit);
}

TEST_CASE("saturated outcome reports zero standard errors with a warning flag") {
  // y is an exact linear function of (x, m): residual variance collapses to 0
  ModelDims dims{1, 0, false, false};
  Eigen::VectorXd x(4), y(4);
  Eigen::MatrixXd m(4, 1), z(4, 0);
  x << 1.0, 2.0, -1.0, 0.5;
  m << 0.7, -0.4, 1.1, 0.2;
  y = 0.4 * x + 1.3 * m.col(0);

  auto [out, med] = init_linear(dims);
  auto batch = assemble_batch(dims, ModelKind::kLinear, x, m, z, y);
  update_linear_outcome(out, batch);
  update_mediators(med, batch);

  CHECK(out.resid_var == 0.0);
  const auto summary = summarize_linear(out, med);
  CHECK(summary.degenerate_fit);
  CHECK(summary.beta_se[0] == 0.0);
  CHECK(summary.gamma_se == 0.0);
  CHECK(summary.alpha_se[0] > 0.0);  // the mediator fit is noisy, only y is exact
}

TEST_CASE("partition invariance: any split reproduces the one-pass fit") {
  std::mt19937_64 gen(105);
  std::uniform_int_distribution<int> pick_p(1, 5), pick_q(0, 2), pick_k(1, 10);
  std::bernoulli_distribution flag(0.5);

  for (int trial = 0; trial < 12; ++trial) {
    const int p = pick_p(gen);
    const int q = pick_q(gen);
    const bool oi = flag(gen);
    const bool mi = flag(gen);
    const int n = 100 + static_cast<int>(gen() % 400);
    auto inst = oracle::random_linear_instance(gen, n, p, q, oi, mi);

    const int d = std::max(inst.dims.outcome_cols(ModelKind::kLinear), inst.dims.mediator_cols());
    const int k = std::min(pick_k(gen), n / (d + 2));
    const auto chunks = oracle::random_split(gen, n, std::max(1, k), d + 2);

    auto [out, med] = init_linear(inst.dims);
    for (auto [offset, rows] : chunks) {
      auto batch = oracle::slice_batch(inst, ModelKind::kLinear, offset, rows);
      update_linear_outcome(out, batch);
      update_mediators(med, batch);
    }

    auto full = oracle::slice_batch(inst, ModelKind::kLinear, 0, n);
    const auto fit = oracle::ols_fit(full.w, full.y);
    CHECK(rel_err(out.coef, fit.coef) < 1e-10);
    CHECK(rel_err(out.resid_var, fit.resid_var) < 1e-10);
    for (int j = 0; j < p; ++j) {
      const auto med_fit = oracle::ols_fit(full.s, full.m.col(j));
      CHECK(rel_err(Eigen::VectorXd(med.coef.col(j)), med_fit.coef) < 1e-10);
      CHECK(rel_err(med.resid_var[j], med_fit.resid_var) < 1e-10);
    }
  }
}

TEST_CASE("every update satisfies the telescoping cross-product identity") {
  // W'Y of the new batch equals info_new*coef_new - info_old*coef_old
  std::mt19937_64 gen(106);
  auto inst = oracle::random_linear_instance(gen, 250, 3, 1, false, false);
  auto out = init_linear_outcome(inst.dims);

  const auto chunks = oracle::random_split(gen, 250, 5, 10);
  for (auto [offset, rows] : chunks) {
    auto batch = oracle::slice_batch(inst, ModelKind::kLinear, offset, rows);
    const Eigen::VectorXd carried = out.info * out.coef;
    update_linear_outcome(out, batch);
    const Eigen::VectorXd lhs = batch.w.transpose() * batch.y;
    const Eigen::VectorXd rhs = out.info * out.coef - carried;
    CHECK(rel_err(rhs, lhs) < 1e-9);
  }
}

TEST_CASE("information accumulates symmetrically and monotonically") {
  std::mt19937_64 gen(107);
  auto inst = oracle::random_linear_instance(gen, 90, 2, 1, false, false);
  auto out = init_linear_outcome(inst.dims);

  Eigen::MatrixXd previous = out.info;
  for (auto [offset, rows] : {std::pair{0, 30}, std::pair{30, 30}, std::pair{60, 30}}) {
    update_linear_outcome(out, oracle::slice_batch(inst, ModelKind::kLinear, offset, rows));
    CHECK((out.info - out.info.transpose()).lpNorm<Eigen::Infinity>() <
          1e-12 * out.info.lpNorm<Eigen::Infinity>());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigs(out.info - previous,
                                                        Eigen::EigenvaluesOnly);
    CHECK(eigs.eigenvalues().minCoeff() > -1e-9 * out.info.lpNorm<Eigen::Infinity>());
    previous = out.info;
  }
}

TEST_CASE("state size does not grow with the data") {
  std::mt19937_64 gen(108);
  auto inst = oracle::random_linear_instance(gen, 300, 3, 2, false, false);
  auto out = init_linear_outcome(inst.dims);
  auto med = init_mediators(inst.dims);

  update_linear_outcome(out, oracle::slice_batch(inst, ModelKind::kLinear, 0, 30));
  update_mediators(med, oracle::slice_batch(inst, ModelKind::kLinear, 0, 30));
  const auto info_size = out.info.size();
  const auto med_size = med.coef.size();
  for (int b = 1; b < 10; ++b) {
    update_linear_outcome(out, oracle::slice_batch(inst, ModelKind::kLinear, 30 * b, 30));
    update_mediators(med, oracle::slice_batch(inst, ModelKind::kLinear, 30 * b, 30));
  }
  CHECK(out.info.size() == info_size);
  CHECK(out.coef.size() == inst.dims.outcome_cols(ModelKind::kLinear));
  CHECK(med.coef.size() == med_size);
}

TEST_CASE("errors: dimension mismatch and rank deficiency") {
  ModelDims dims{2, 1, false, false};
  auto out = init_linear_outcome(dims);

  std::mt19937_64 gen(109);
  auto other = oracle::random_linear_instance(gen, 40, 3, 1, false, false);
  CHECK_THROWS_AS(update_linear_outcome(out, oracle::slice_batch(other, ModelKind::kLinear, 0, 40)),
                  InputError);

  // duplicated column makes W'W singular
  Eigen::VectorXd x(6), y(6);
  x << 1, 2, 3, 4, 5, 6;
  y << 1, 0, 2, 1, 3, 2;
  Eigen::MatrixXd m(6, 2), z(6, 1);
  m.col(0) = x;
  m.col(1) << 0.3, 1.2, -0.5, 0.8, 0.1, -0.9;
  z.col(0) << 1, -1, 1, -1, 1, -1;
  auto singular = assemble_batch(dims, ModelKind::kLinear, x, m, z, y);
  CHECK_THROWS_AS(update_linear_outcome(out, singular), RankDeficiencyError);
  CHECK(out.n_batches == 0);  // failed update leaves the state untouched

  auto fresh = init_linear_outcome(dims);
  auto med = init_mediators(dims);
  CHECK_THROWS_AS(summarize_linear(fresh, med), NotReadyError);
}
