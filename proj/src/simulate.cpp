#include "medstream/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "medstream/errors.hpp"
#include "medstream/linear.hpp"
#include "medstream/logistic.hpp"
#include "medstream/mediation.hpp"

namespace medstream {

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

Eigen::VectorXd CaseSpec::true_products() const {
  return (alpha.array() * beta.array()).matrix();
}

std::vector<int> CaseSpec::active_indices() const {
  std::vector<int> active;
  const Eigen::VectorXd products = true_products();
  for (int j = 0; j < n_mediators(); ++j) {
    if (products[j] != 0.0) active.push_back(j + 1);
  }
  return active;
}

std::vector<int> CaseSpec::null_indices() const {
  std::vector<int> nulls;
  const Eigen::VectorXd products = true_products();
  for (int j = 0; j < n_mediators(); ++j) {
    if (products[j] == 0.0) nulls.push_back(j + 1);
  }
  return nulls;
}

ModelDims CaseSpec::dims() const {
  // Fitted models carry intercepts even though the generators have none: the
  // Bernoulli exposure designs are not mean-zero, and an uncentered fit
  // inflates every test statistic.
  ModelDims d;
  d.n_mediators = n_mediators();
  d.n_confounders = n_confounders();
  d.outcome_intercept = true;
  d.mediator_intercept = true;
  return d;
}

void CaseSpec::validate() const {
  if (alpha.size() != beta.size() || alpha.size() < 1) {
    throw ConfigError("case: alpha and beta must have equal, positive length");
  }
  if (eta.rows() != theta.size() || eta.cols() != alpha.size()) {
    throw ConfigError("case: eta must be q x p");
  }
  if (n_total < 1) throw ConfigError("case: n_total must be positive");
  if (!(exposure_var > 0.0)) throw ConfigError("case: exposure variance must be positive");
  if (!(mediator_corr > -1.0 && mediator_corr < 1.0)) {
    throw ConfigError("case: mediator error correlation must lie in (-1,1)");
  }
}

CaseSpec builtin_case(int case_id) {
  CaseSpec spec;
  spec.case_id = case_id;
  spec.gamma = 0.5;
  spec.theta = vec({0.5, 0.5});
  spec.mediator_corr = 0.15;

  switch (case_id) {
    case 1:
    case 2:
      spec.model = ModelKind::kLinear;
      spec.exposure = case_id == 1 ? ExposureLaw::kGaussianVar2 : ExposureLaw::kBernoulliHalf;
      spec.beta = vec({0.15, 0.25, 0.0, 0.0, 0.15});
      spec.alpha = vec({0.1, 0.0, 0.0, 0.35, 0.25});
      spec.n_total = 30000;
      break;
    case 3:
    case 4:
      spec.model = ModelKind::kLogistic;
      spec.exposure = case_id == 3 ? ExposureLaw::kGaussianVar2 : ExposureLaw::kBernoulliHalf;
      spec.beta = vec({0.0, 0.2, 0.0, 0.3, 0.25});
      spec.alpha = vec({0.0, 0.25, 0.3, 0.0, 0.3});
      spec.n_total = 30000;
      break;
    case 5:
      spec.model = ModelKind::kLinear;
      spec.exposure = ExposureLaw::kBernoulliHalf;
      spec.beta = vec({0.15, 0.15, 0.08, 0.0, 0.35, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.alpha = vec({0.1, 0.1, 0.1, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.n_total = 5000;
      break;
    case 6:
      spec.model = ModelKind::kLinear;
      spec.exposure = ExposureLaw::kGaussianVar2;
      spec.alpha = vec({0.06, 0.055, 0.06, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.beta = vec({0.05, 0.06, 0.05, 0.0, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.n_total = 5000;
      break;
    case 7:
      spec.model = ModelKind::kLogistic;
      spec.exposure = ExposureLaw::kBernoulliHalf;
      spec.beta = vec({0.125, 0.1, 0.1, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.alpha = vec({0.2, 0.25, 0.25, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.n_total = 5000;
      break;
    case 8:
      spec.model = ModelKind::kLogistic;
      spec.exposure = ExposureLaw::kGaussianVar2;
      spec.alpha = vec({0.055, 0.06, 0.07, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.beta = vec({0.125, 0.115, 0.105, 0.4, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
      spec.n_total = 5000;
      break;
    default:
      throw InputError("unknown simulation case (expected 1..8)");
  }

  spec.eta = Eigen::MatrixXd::Constant(2, spec.alpha.size(), 0.3);
  spec.validate();
  return spec;
}

SimDataset draw_dataset(const CaseSpec& spec, RngStream& rng) {
  spec.validate();
  const Eigen::Index n = spec.n_total;
  const int p = spec.n_mediators();
  const int q = spec.n_confounders();

  SimDataset data;

  // Draw order is fixed (exposure, confounders, mediator noise, outcome
  // noise) so a seed pins the whole stream.
  data.x.resize(n);
  if (spec.exposure == ExposureLaw::kGaussianVar2) {
    const double sd = std::sqrt(spec.exposure_var);
    for (Eigen::Index i = 0; i < n; ++i) data.x[i] = sd * rng.normal();
  } else {
    for (Eigen::Index i = 0; i < n; ++i) data.x[i] = rng.bernoulli(0.5);
  }

  data.z.resize(n, q);
  for (int c = 0; c < q; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) data.z(i, c) = rng.normal();
  }

  Eigen::MatrixXd noise(n, p);
  for (int c = 0; c < p; ++c) {
    for (Eigen::Index i = 0; i < n; ++i) noise(i, c) = rng.normal();
  }
  Eigen::MatrixXd cov(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) cov(i, j) = std::pow(spec.mediator_corr, std::abs(i - j));
  }
  const Eigen::MatrixXd chol = cov.llt().matrixL();
  data.m = data.x * spec.alpha.transpose() + data.z * spec.eta + noise * chol.transpose();

  Eigen::VectorXd linear_part = spec.gamma * data.x + data.m * spec.beta + data.z * spec.theta;
  data.y.resize(n);
  if (spec.model == ModelKind::kLinear) {
    for (Eigen::Index i = 0; i < n; ++i) data.y[i] = linear_part[i] + rng.normal();
  } else {
    for (Eigen::Index i = 0; i < n; ++i) data.y[i] = rng.bernoulli(sigmoid(linear_part[i]));
  }
  return data;
}

std::vector<BatchData> split_batches(const CaseSpec& spec, const SimDataset& data,
                                     int n_batches) {
  if (n_batches < 1) throw InputError("batch count must be positive");
  const Eigen::Index n = data.x.size();
  if (n_batches > n) {
    std::ostringstream msg;
    msg << "cannot split " << n << " rows into " << n_batches << " non-empty batches";
    throw InputError(msg.str());
  }
  // Batch sizes are as uniform as the arithmetic allows: when n_batches does
  // not divide n, the first n % n_batches batches carry one extra row.
  const Eigen::Index base = n / n_batches;
  const Eigen::Index extra = n % n_batches;
  const ModelDims dims = spec.dims();

  std::vector<BatchData> batches;
  batches.reserve(n_batches);
  Eigen::Index start = 0;
  for (int b = 0; b < n_batches; ++b) {
    const Eigen::Index size = base + (b < extra ? 1 : 0);
    batches.push_back(assemble_batch(dims, spec.model, data.x.segment(start, size),
                                     data.m.middleRows(start, size),
                                     data.z.middleRows(start, size),
                                     data.y.segment(start, size)));
    start += size;
  }
  return batches;
}

std::vector<BatchData> generate_case(const CaseSpec& spec, int n_batches, std::uint64_t seed) {
  RngStream rng(seed, 0);
  const SimDataset data = draw_dataset(spec, rng);
  return split_batches(spec, data, n_batches);
}

const char* method_name(TestMethod m) {
  switch (m) {
    case TestMethod::kSobel: return "sobel";
    case TestMethod::kASobel: return "asobel";
    case TestMethod::kJS: return "js";
    case TestMethod::kAJS: return "ajs";
  }
  return "?";
}

namespace {

struct KRecord {
  Eigen::VectorXd estimate;       // product estimates, length p
  Eigen::VectorXd se;             // delta-method standard errors
  std::vector<char> cover_sobel;  // CI covers the true product
  std::vector<char> cover_asobel;
  std::array<std::vector<char>, 4> selected;  // per method, per mediator
  double seconds = 0.0;
};

struct RepRecord {
  std::vector<KRecord> per_k;
  bool ok = false;
  std::string error;
};

KRecord run_one_stream(const CaseSpec& spec, const std::vector<BatchData>& batches,
                       double delta, const Eigen::VectorXd& true_products) {
  const int p = spec.n_mediators();
  const ModelDims dims = spec.dims();
  const TestConfig cfg{delta, {1.0, 0.0}};

  const auto start = std::chrono::steady_clock::now();

  CoefficientSummary summary;
  MediatorState med = init_mediators(dims);
  if (spec.model == ModelKind::kLinear) {
    LinearOutcomeState out = init_linear_outcome(dims);
    for (const auto& batch : batches) {
      update_linear_outcome(out, batch);
      update_mediators(med, batch);
    }
    summary = summarize_linear(out, med);
  } else {
    LogisticOutcomeState out = init_logistic_outcome(dims);
    for (const auto& batch : batches) {
      update_logistic_outcome(out, batch);
      update_mediators(med, batch);
    }
    summary = summarize_logistic(out, med);
  }

  const std::vector<MediatorTestResult> results = test_all_mediators(summary, cfg);
  const double cutoff = cfg.delta / p;

  KRecord record;
  record.estimate.resize(p);
  record.se.resize(p);
  record.cover_sobel.resize(p);
  record.cover_asobel.resize(p);
  for (auto& sel : record.selected) sel.assign(p, 0);
  for (int j = 0; j < p; ++j) {
    const MediatorTestResult& r = results[j];
    record.estimate[j] = r.product;
    record.se[j] = r.se_product;
    record.cover_sobel[j] = r.ci_sobel.contains(true_products[j]);
    record.cover_asobel[j] = r.ci_asobel.contains(true_products[j]);
    record.selected[0][j] = r.p_sobel < cutoff;
    record.selected[1][j] = r.p_asobel < cutoff;
    record.selected[2][j] = r.p_js < cutoff;
    record.selected[3][j] = r.p_ajs < cutoff;
  }

  const auto stop = std::chrono::steady_clock::now();
  record.seconds = std::chrono::duration<double>(stop - start).count();
  return record;
}

int method_slot(TestMethod m) { return static_cast<int>(m); }

}  // namespace

MetricTable run_replications(const CaseSpec& spec, const RunConfig& run) {
  spec.validate();
  if (run.reps < 1) throw InputError("replication count must be positive");
  if (!(run.delta > 0.0 && run.delta < 1.0)) throw InputError("delta must lie in (0,1)");

  std::vector<int> batch_counts = run.batch_counts;
  if (run.include_full_data &&
      std::find(batch_counts.begin(), batch_counts.end(), 1) == batch_counts.end()) {
    batch_counts.push_back(1);
  }
  if (batch_counts.empty()) throw InputError("no batch counts requested");
  for (int k : batch_counts) {
    if (k < 1 || k > spec.n_total) {
      std::ostringstream msg;
      msg << "batch count " << k << " is not feasible for n_total " << spec.n_total;
      throw InputError(msg.str());
    }
  }

  const Eigen::VectorXd true_products = spec.true_products();
  std::vector<RepRecord> records(run.reps);

  auto worker = [&](std::atomic<int>& next) {
    for (int rep = next.fetch_add(1); rep < run.reps; rep = next.fetch_add(1)) {
      RepRecord& record = records[rep];
      try {
        RngStream rng(run.seed, static_cast<std::uint64_t>(rep));
        const SimDataset data = draw_dataset(spec, rng);
        record.per_k.reserve(batch_counts.size());
        for (int k : batch_counts) {
          // Batch assembly happens outside the timed section: the harness
          // measures estimation and testing, not data generation.
          const std::vector<BatchData> batches = split_batches(spec, data, k);
          record.per_k.push_back(run_one_stream(spec, batches, run.delta, true_products));
        }
        record.ok = true;
      } catch (const std::exception& e) {
        record.ok = false;
        record.error = e.what();
        record.per_k.clear();
      }
    }
  };

  const int threads = std::max(1, run.threads);
  if (threads == 1) {
    std::atomic<int> next{0};
    worker(next);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back([&] { worker(next); });
    for (auto& t : pool) t.join();
  }

  MetricTable table;
  table.case_id = spec.case_id;
  table.model = spec.model;
  table.n_total = spec.n_total;
  table.reps = run.reps;
  table.seed = run.seed;
  table.delta = run.delta;

  for (int rep = 0; rep < run.reps; ++rep) {
    if (!records[rep].ok) table.failures.push_back({rep, records[rep].error});
  }

  const int p = spec.n_mediators();
  const std::vector<int> active = spec.active_indices();
  const std::vector<int> nulls = spec.null_indices();

  for (std::size_t ki = 0; ki < batch_counts.size(); ++ki) {
    BatchCountMetrics row;
    row.n_batches = batch_counts[ki];

    int completed = 0;
    Eigen::VectorXd est_sum = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd se_sum = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd cover_s = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd cover_a = Eigen::VectorXd::Zero(p);
    std::array<double, 4> any_null_selected{};
    std::array<double, 4> active_fraction_sum{};
    double seconds = 0.0;
    std::vector<Eigen::VectorXd> estimates;
    estimates.reserve(run.reps);

    for (int rep = 0; rep < run.reps; ++rep) {
      if (!records[rep].ok) continue;
      const KRecord& k_record = records[rep].per_k[ki];
      ++completed;
      est_sum += k_record.estimate;
      se_sum += k_record.se;
      estimates.push_back(k_record.estimate);
      for (int j = 0; j < p; ++j) {
        cover_s[j] += k_record.cover_sobel[j];
        cover_a[j] += k_record.cover_asobel[j];
      }
      for (int m = 0; m < 4; ++m) {
        bool any_null = false;
        int active_hits = 0;
        for (int idx : nulls) any_null = any_null || k_record.selected[m][idx - 1];
        for (int idx : active) active_hits += k_record.selected[m][idx - 1];
        any_null_selected[m] += any_null ? 1.0 : 0.0;
        if (!active.empty()) {
          active_fraction_sum[m] += static_cast<double>(active_hits) / active.size();
        }
      }
      seconds += k_record.seconds;
    }

    row.completed_reps = completed;
    if (completed > 0) {
      const double n = completed;
      row.mean_cpu_seconds = seconds / n;
      for (int j = 0; j < p; ++j) {
        TargetMetrics target;
        target.index = j + 1;
        target.true_product = true_products[j];
        const double mean = est_sum[j] / n;
        target.bias = mean - true_products[j];
        if (completed >= 2) {
          double ss = 0.0;
          for (const auto& est : estimates) ss += (est[j] - mean) * (est[j] - mean);
          target.sse = std::sqrt(ss / (n - 1.0));
        }
        target.ase = se_sum[j] / n;
        target.cp_sobel = cover_s[j] / n;
        target.cp_asobel = cover_a[j] / n;
        row.targets.push_back(target);
      }
      for (TestMethod m : run.methods) {
        MethodMetrics mm;
        mm.method = m;
        if (!nulls.empty()) mm.fwer = any_null_selected[method_slot(m)] / n;
        if (!active.empty()) mm.power = active_fraction_sum[method_slot(m)] / n;
        row.methods.push_back(mm);
      }
    }
    table.rows.push_back(std::move(row));
  }

  return table;
}

std::string metric_table_csv(const MetricTable& table) {
  std::ostringstream out;
  out << "case,model,n_total,n_batches,reps,completed,seed,delta,metric,target,value\n";
  const char* model = table.model == ModelKind::kLinear ? "linear" : "logistic";
  auto prefix = [&](const BatchCountMetrics& row) {
    out << table.case_id << ',' << model << ',' << table.n_total << ',' << row.n_batches << ','
        << table.reps << ',' << row.completed_reps << ',' << table.seed << ',' << table.delta
        << ',';
  };
  for (const auto& row : table.rows) {
    for (const auto& t : row.targets) {
      prefix(row);
      out << "bias," << t.index << ',' << format_value(t.bias) << '\n';
      prefix(row);
      out << "sse," << t.index << ',' << (t.sse ? format_value(*t.sse) : "") << '\n';
      prefix(row);
      out << "ase," << t.index << ',' << format_value(t.ase) << '\n';
      prefix(row);
      out << "cp_sobel," << t.index << ',' << format_value(t.cp_sobel) << '\n';
      prefix(row);
      out << "cp_asobel," << t.index << ',' << format_value(t.cp_asobel) << '\n';
    }
    for (const auto& m : row.methods) {
      prefix(row);
      out << "fwer_" << method_name(m.method) << ",," << (m.fwer ? format_value(*m.fwer) : "")
          << '\n';
      prefix(row);
      out << "power_" << method_name(m.method) << ",," << (m.power ? format_value(*m.power) : "")
          << '\n';
    }
    prefix(row);
    out << "cpu_seconds,," << format_value(row.mean_cpu_seconds) << '\n';
  }
  return out.str();
}

std::string metric_table_text(const MetricTable& table) {
  std::ostringstream out;
  out << "case " << table.case_id << " ("
      << (table.model == ModelKind::kLinear ? "linear" : "logistic") << "), N="
      << table.n_total << ", reps=" << table.reps << ", seed=" << table.seed
      << ", delta=" << table.delta << "\n";
  if (!table.failures.empty()) {
    out << table.failures.size() << " replication(s) failed; metrics cover the rest\n";
  }
  for (const auto& row : table.rows) {
    out << "-- k=" << row.n_batches << " (completed " << row.completed_reps << ")"
        << "  mean cpu " << format_value(row.mean_cpu_seconds) << " s\n";
    out << "   target      bias          sse           ase        cp_sobel  cp_asobel\n";
    for (const auto& t : row.targets) {
      char line[160];
      std::snprintf(line, sizeof(line), "   M%-6d %12.4e %12s %12.4e   %7.4f   %7.4f\n",
                    t.index, t.bias, t.sse ? format_value(*t.sse).c_str() : "-", t.ase,
                    t.cp_sobel, t.cp_asobel);
      out << line;
    }
    for (const auto& m : row.methods) {
      out << "   " << method_name(m.method) << ": fwer="
          << (m.fwer ? format_value(*m.fwer) : "-") << " power="
          << (m.power ? format_value(*m.power) : "-") << "\n";
    }
  }
  return out.str();
}

}  // namespace medstream
