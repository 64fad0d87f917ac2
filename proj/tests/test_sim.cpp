#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "medstream/errors.hpp"
#include "medstream/simulate.hpp"

using namespace medstream;

TEST_CASE("builtin designs carry the right coefficient patterns") {
  auto case1 = builtin_case(1);
  CHECK(case1.model == ModelKind::kLinear);
  CHECK(case1.n_mediators() == 5);
  CHECK(case1.n_confounders() == 2);
  const Eigen::VectorXd products = case1.true_products();
  CHECK(products[0] == doctest::Approx(0.015));
  CHECK(products[1] == 0.0);
  CHECK(products[2] == 0.0);
  CHECK(products[3] == 0.0);
  CHECK(products[4] == doctest::Approx(0.0375));
  CHECK(case1.active_indices() == std::vector<int>{1, 5});
  CHECK(case1.null_indices() == std::vector<int>{2, 3, 4});

  auto case5 = builtin_case(5);
  CHECK(case5.n_mediators() == 10);
  CHECK(case5.exposure == ExposureLaw::kBernoulliHalf);
  CHECK(case5.active_indices() == std::vector<int>{1, 2, 3});
  CHECK(case5.n_total == 5000);

  auto case7 = builtin_case(7);
  CHECK(case7.model == ModelKind::kLogistic);
  CHECK(case7.active_indices() == std::vector<int>{1, 2, 3});
  // one pure alpha-null and one pure beta-null among the inactive
  CHECK(case7.alpha[3] == 0.0);
  CHECK(case7.beta[3] == doctest::Approx(0.4));
  CHECK(case7.alpha[4] == doctest::Approx(0.3));
  CHECK(case7.beta[4] == 0.0);

  CHECK_THROWS_AS(builtin_case(0), InputError);
  CHECK_THROWS_AS(builtin_case(9), InputError);
}

TEST_CASE("generation is deterministic in the seed") {
  auto spec = builtin_case(1);
  spec.n_total = 600;
  const auto a = generate_case(spec, 3, 42);
  const auto b = generate_case(spec, 3, 42);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].y == b[i].y);
    CHECK(a[i].w == b[i].w);
    CHECK(a[i].s == b[i].s);
    CHECK(a[i].m == b[i].m);
  }
  const auto c = generate_case(spec, 3, 43);
  CHECK(a[0].y != c[0].y);
}

TEST_CASE("generator moments match the design") {
  auto spec = builtin_case(1);  // X gaussian with variance 2
  RngStream rng(7, 0);
  const SimDataset data = draw_dataset(spec, rng);
  const double n = static_cast<double>(spec.n_total);

  const double mean_x = data.x.mean();
  const double var_x = (data.x.array() - mean_x).square().sum() / (n - 1.0);
  CHECK(var_x == doctest::Approx(2.0).epsilon(0.05));

  // recover the mediator errors with the known truth and check their correlation
  const Eigen::MatrixXd errors =
      data.m - data.x * spec.alpha.transpose() - data.z * spec.eta;
  const Eigen::VectorXd e1 = errors.col(0).array() - errors.col(0).mean();
  const Eigen::VectorXd e2 = errors.col(1).array() - errors.col(1).mean();
  const double corr = e1.dot(e2) / std::sqrt(e1.squaredNorm() * e2.squaredNorm());
  CHECK(std::fabs(corr - 0.15) < 0.02);

  auto bern = builtin_case(5);
  RngStream rng5(7, 0);
  const SimDataset data5 = draw_dataset(bern, rng5);
  for (int i = 0; i < bern.n_total; ++i) {
    CHECK((data5.x[i] == 0.0 || data5.x[i] == 1.0));
  }
  CHECK(std::fabs(data5.x.mean() - 0.5) < 0.02);
}

TEST_CASE("batch sizes stay as uniform as the arithmetic allows") {
  auto spec = builtin_case(1);
  spec.n_total = 100;
  const auto batches = generate_case(spec, 7, 1);
  REQUIRE(batches.size() == 7);
  Eigen::Index total = 0, smallest = 1000, largest = 0;
  for (const auto& b : batches) {
    total += b.rows();
    smallest = std::min(smallest, b.rows());
    largest = std::max(largest, b.rows());
  }
  CHECK(total == 100);
  CHECK(largest - smallest <= 1);

  CHECK_THROWS_AS(generate_case(spec, 101, 1), InputError);
  RunConfig run;
  run.batch_counts = {101};
  run.reps = 1;
  CHECK_THROWS_AS(run_replications(spec, run), InputError);
}

TEST_CASE("one replication reports bias but no spread") {
  auto spec = builtin_case(5);
  spec.n_total = 1000;
  RunConfig run;
  run.batch_counts = {2};
  run.reps = 1;
  run.seed = 11;
  run.include_full_data = false;

  const auto table = run_replications(spec, run);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].completed_reps == 1);
  for (const auto& t : table.rows[0].targets) {
    CHECK_FALSE(t.sse.has_value());  // undefined with a single draw
    CHECK(std::isfinite(t.bias));
  }
}

TEST_CASE("linear metrics are invariant to the batch split") {
  auto spec = builtin_case(5);
  spec.n_total = 1200;
  RunConfig run;
  run.batch_counts = {2, 6};
  run.reps = 5;
  run.seed = 3;
  run.include_full_data = true;

  const auto table = run_replications(spec, run);
  REQUIRE(table.rows.size() == 3);  // k=2, k=6, and the full-data pass
  CHECK(table.failures.empty());
  const auto& a = table.rows[0];
  const auto& b = table.rows[1];
  const auto& full = table.rows[2];
  for (std::size_t j = 0; j < a.targets.size(); ++j) {
    CHECK(a.targets[j].bias == doctest::Approx(b.targets[j].bias).epsilon(1e-10));
    CHECK(a.targets[j].bias == doctest::Approx(full.targets[j].bias).epsilon(1e-10));
    CHECK(a.targets[j].ase == doctest::Approx(full.targets[j].ase).epsilon(1e-10));
    CHECK(*a.targets[j].sse == doctest::Approx(*full.targets[j].sse).epsilon(1e-10));
    CHECK(a.targets[j].cp_sobel == full.targets[j].cp_sobel);
    CHECK(a.targets[j].cp_asobel == full.targets[j].cp_asobel);
  }
  for (std::size_t m = 0; m < a.methods.size(); ++m) {
    CHECK(*a.methods[m].fwer == *full.methods[m].fwer);
    CHECK(*a.methods[m].power == *full.methods[m].power);
  }
}

TEST_CASE("adjusted tests never lose power to their base tests") {
  auto spec = builtin_case(6);
  spec.n_total = 2000;
  RunConfig run;
  run.batch_counts = {4};
  run.reps = 20;
  run.seed = 9;
  run.include_full_data = false;

  const auto table = run_replications(spec, run);
  REQUIRE(table.rows.size() == 1);
  const auto& methods = table.rows[0].methods;
  REQUIRE(methods.size() == 4);
  const double power_sobel = *methods[0].power;
  const double power_asobel = *methods[1].power;
  const double power_js = *methods[2].power;
  const double power_ajs = *methods[3].power;
  CHECK(power_asobel >= power_sobel);
  CHECK(power_ajs >= power_js);
}

TEST_CASE("logistic power and FWER stay close to full data across splits") {
  auto spec = builtin_case(7);
  RunConfig run;
  run.batch_counts = {5, 15};
  run.reps = 500;
  run.seed = 31;
  run.threads = 4;
  run.include_full_data = true;

  const auto table = run_replications(spec, run);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.failures.empty());
  const auto& full = table.rows[2];
  for (std::size_t ki = 0; ki < 2; ++ki) {
    const auto& row = table.rows[ki];
    for (std::size_t m = 0; m < row.methods.size(); ++m) {
      CHECK(std::fabs(*row.methods[m].fwer - *full.methods[m].fwer) <= 0.02);
      CHECK(std::fabs(*row.methods[m].power - *full.methods[m].power) <= 0.02);
    }
  }
}

TEST_CASE("parallel replication matches the single-threaded run") {
  auto spec = builtin_case(5);
  spec.n_total = 1000;
  RunConfig run;
  run.batch_counts = {2};
  run.reps = 8;
  run.seed = 21;
  run.include_full_data = false;

  const auto serial = run_replications(spec, run);
  run.threads = 4;
  const auto parallel = run_replications(spec, run);
  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (std::size_t j = 0; j < serial.rows[0].targets.size(); ++j) {
    CHECK(serial.rows[0].targets[j].bias == parallel.rows[0].targets[j].bias);
    CHECK(serial.rows[0].targets[j].ase == parallel.rows[0].targets[j].ase);
  }
}

TEST_CASE("csv rendering is long-format and complete") {
  auto spec = builtin_case(5);
  spec.n_total = 1000;
  RunConfig run;
  run.batch_counts = {2};
  run.reps = 2;
  run.seed = 5;
  run.include_full_data = false;

  const auto table = run_replications(spec, run);
  const std::string csv = metric_table_csv(table);
  CHECK(csv.find("case,model,n_total,n_batches,reps,completed,seed,delta,metric,target,value") !=
        std::string::npos);
  CHECK(csv.find("bias,1,") != std::string::npos);
  CHECK(csv.find("fwer_ajs") != std::string::npos);
  CHECK(csv.find("power_sobel") != std::string::npos);
  CHECK(csv.find("cpu_seconds") != std::string::npos);
}
