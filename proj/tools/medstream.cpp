// Command-line front end for the streaming mediation engine.
//
// Exit codes: 0 ok, 2 input/parse, 3 not ready, 4 numerical, 5 integrity.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "medstream/checkpoint.hpp"
#include "medstream/csv.hpp"
#include "medstream/engine.hpp"
#include "medstream/errors.hpp"
#include "medstream/report.hpp"
#include "medstream/simulate.hpp"

namespace {

using medstream::InputError;

std::pair<double, double> parse_contrast(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw InputError("contrast must be two comma-separated numbers, e.g. 1,0");
  }
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw InputError("contrast must be two comma-separated numbers, e.g. 1,0");
  }
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      values.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw InputError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw InputError(std::string(what) + ": empty list");
  return values;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InputError("cannot write output file: " + out_path);
  out << text;
}

int run(int argc, char** argv) {
  CLI::App app{"Streaming mediation analysis with renewable estimation"};
  app.require_subcommand(1);

  // ---- init ----------------------------------------------------------
  auto* init = app.add_subcommand("init", "Create an empty stream state file");
  std::string init_model = "linear";
  int init_p = 0, init_q = 0;
  bool intercept = true;
  double init_delta = 0.05;
  std::string init_contrast = "1,0";
  std::string means_text, scales_text;
  bool standardize_first = false;
  std::string init_state;
  init->add_option("--model", init_model, "linear or logistic")
      ->check(CLI::IsMember({"linear", "logistic"}));
  init->add_option("--p", init_p, "number of mediators")->required();
  init->add_option("--q", init_q, "number of confounders")->required();
  init->add_flag("--intercept,!--no-intercept", intercept,
                 "fit intercepts (default on; the logistic outcome always has one)");
  init->add_option("--delta", init_delta, "significance level (default 0.05)");
  init->add_option("--contrast", init_contrast, "exposure contrast x,x* (default 1,0)");
  init->add_option("--standardize-means", means_text,
                   "comma list of centers for X,M1..Mp,Z1..Zq");
  init->add_option("--standardize-scales", scales_text,
                   "comma list of scales for X,M1..Mp,Z1..Zq");
  init->add_flag("--standardize-from-first-batch", standardize_first,
                 "freeze standardization parameters from the first batch");
  init->add_option("--state", init_state, "state file to create")->required();

  // ---- update --------------------------------------------------------
  auto* update = app.add_subcommand("update", "Fold one CSV batch into a stream");
  std::string update_state, update_batch;
  long long update_index = 0;
  update->add_option("--state", update_state, "state file")->required();
  update->add_option("--batch", update_batch, "batch CSV file")->required();
  update->add_option("--index", update_index,
                     "1-based index this batch should have; rejects re-sent batches");

  // ---- report --------------------------------------------------------
  auto* report = app.add_subcommand("report", "Render estimates, tests and effects");
  std::string report_state, report_format = "text", report_contrast, report_out;
  double report_delta = -1.0;
  report->add_option("--state", report_state, "state file")->required();
  report->add_option("--delta", report_delta, "override the configured significance level");
  report->add_option("--contrast", report_contrast, "override the configured contrast x,x*");
  report->add_option("--format", report_format, "text, csv or json")
      ->check(CLI::IsMember({"text", "csv", "json"}));
  report->add_option("--out", report_out, "write to a file instead of stdout");

  // ---- simulate ------------------------------------------------------
  auto* simulate = app.add_subcommand("simulate", "Run Monte Carlo replications of a design");
  int sim_case = 0;
  long long sim_n_total = 0;
  std::string sim_batches;
  int sim_reps = 500;
  std::uint64_t sim_seed = 1;
  double sim_delta = 0.05;
  std::string sim_out;
  int sim_parallel = 1;
  double sim_exposure_var = 0.0;
  simulate->add_option("--case", sim_case, "design 1..8")->required();
  simulate->add_option("--n-total", sim_n_total, "total stream size (default per design)");
  simulate->add_option("--exposure-var", sim_exposure_var,
                       "variance of a Gaussian exposure (default 2)");
  simulate->add_option("--batches", sim_batches, "comma list of batch counts, e.g. 5,10,15")
      ->required();
  simulate->add_option("--reps", sim_reps, "replications (default 500)");
  simulate->add_option("--seed", sim_seed, "master seed (default 1)");
  simulate->add_option("--delta", sim_delta, "significance level (default 0.05)");
  simulate->add_option("--out", sim_out, "write the metric table CSV here");
  simulate->add_option("--parallel", sim_parallel, "worker threads (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return medstream::kExitInput;
  }

  if (init->parsed()) {
    medstream::StreamConfig config;
    config.model =
        init_model == "logistic" ? medstream::ModelKind::kLogistic : medstream::ModelKind::kLinear;
    config.dims.n_mediators = init_p;
    config.dims.n_confounders = init_q;
    config.dims.outcome_intercept = intercept;
    config.dims.mediator_intercept = intercept;
    config.delta = init_delta;
    config.contrast = parse_contrast(init_contrast);
    if (!means_text.empty() || !scales_text.empty()) {
      if (means_text.empty() || scales_text.empty()) {
        throw InputError("--standardize-means and --standardize-scales go together");
      }
      const std::vector<double> means = parse_double_list(means_text, "standardize-means");
      const std::vector<double> scales = parse_double_list(scales_text, "standardize-scales");
      medstream::Standardization std_params;
      std_params.mean = Eigen::Map<const Eigen::VectorXd>(means.data(), means.size());
      std_params.scale = Eigen::Map<const Eigen::VectorXd>(scales.data(), scales.size());
      config.standardize = std::move(std_params);
    }
    config.standardize_from_first_batch = standardize_first;

    const medstream::StreamState state = medstream::init_stream(config);
    medstream::save_checkpoint(state, init_state);
    std::cout << "initialized " << init_model << " stream (p=" << init_p << ", q=" << init_q
              << ") at " << init_state << "\n";
    return medstream::kExitOk;
  }

  if (update->parsed()) {
    medstream::StreamState state = medstream::load_checkpoint(update_state);
    const medstream::RawBatch raw = medstream::parse_batch_csv_file(
        update_batch, state.config.dims, state.config.model);
    std::optional<long long> expected;
    if (update->count("--index") > 0) expected = update_index;
    if (auto warning = medstream::update_stream(state, raw, expected)) {
      std::cerr << "warning: " << *warning << "\n";
    }
    medstream::save_checkpoint(state, update_state);
    std::cout << "batch " << state.batch_count() << " applied (" << raw.rows()
              << " rows, N=" << state.n_obs() << ")\n";
    return medstream::kExitOk;
  }

  if (report->parsed()) {
    const medstream::StreamState state = medstream::load_checkpoint(report_state);
    std::optional<double> delta_override;
    if (report->count("--delta") > 0) delta_override = report_delta;
    std::optional<std::pair<double, double>> contrast_override;
    if (!report_contrast.empty()) contrast_override = parse_contrast(report_contrast);

    const medstream::MediationReport rep =
        medstream::build_report(state, delta_override, contrast_override);
    medstream::ReportFormat format = medstream::ReportFormat::kText;
    if (report_format == "csv") format = medstream::ReportFormat::kCsv;
    if (report_format == "json") format = medstream::ReportFormat::kJson;
    write_output(medstream::render_report(rep, format), report_out);
    return medstream::kExitOk;
  }

  // simulate
  medstream::CaseSpec spec = medstream::builtin_case(sim_case);
  if (simulate->count("--n-total") > 0) spec.n_total = sim_n_total;
  if (simulate->count("--exposure-var") > 0) spec.exposure_var = sim_exposure_var;
  medstream::RunConfig run_config;
  const std::vector<double> ks = parse_double_list(sim_batches, "batches");
  for (double k : ks) run_config.batch_counts.push_back(static_cast<int>(k));
  run_config.reps = sim_reps;
  run_config.seed = sim_seed;
  run_config.delta = sim_delta;
  run_config.threads = sim_parallel;

  const medstream::MetricTable table = medstream::run_replications(spec, run_config);
  std::cout << medstream::metric_table_text(table);
  if (!sim_out.empty()) {
    std::ofstream out(sim_out);
    if (!out) throw InputError("cannot write output file: " + sim_out);
    out << medstream::metric_table_csv(table);
    std::cout << "metric table written to " << sim_out << "\n";
  }
  if (!table.failures.empty()) {
    for (const auto& f : table.failures) {
      std::cerr << "replication " << f.rep << " failed: " << f.message << "\n";
    }
    return medstream::kExitNumerical;
  }
  return medstream::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const medstream::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return medstream::kExitInput;
  }
}
