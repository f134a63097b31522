// bagvar: bagged predictions with bootstrap variance estimates.

#include "bagvar/anova.hpp"
#include "bagvar/bagging.hpp"
#include "bagvar/csv.hpp"
#include "bagvar/error.hpp"
#include "bagvar/generators.hpp"
#include "bagvar/learners.hpp"
#include "bagvar/parallel.hpp"
#include "bagvar/reports.hpp"
#include "bagvar/study.hpp"
#include "bagvar/variance.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace bagvar;

namespace {

struct LearnerOptions {
  std::string kind = "tree";
  std::size_t mtry = 0;
  std::size_t min_leaf = 1;
  std::size_t max_leaves = 0;
  std::size_t max_degree = 6;

  LearnerSpec spec() const {
    LearnerSpec s;
    s.kind = parse_learner_kind(kind);
    s.mtry = mtry;
    s.min_leaf = min_leaf;
    s.max_leaves = max_leaves;
    s.max_degree = max_degree;
    return s;
  }
};

void add_learner_options(CLI::App* cmd, LearnerOptions& o) {
  cmd->add_option("--learner", o.kind, "tree, poly or mean")->capture_default_str();
  cmd->add_option("--mtry", o.mtry, "features tried per split (0 = all)")->capture_default_str();
  cmd->add_option("--min-leaf", o.min_leaf, "minimum weight per leaf")->capture_default_str();
  cmd->add_option("--max-leaves", o.max_leaves, "leaf cap (0 = none)")->capture_default_str();
  cmd->add_option("--max-degree", o.max_degree, "polynomial degree cap")->capture_default_str();
}

std::vector<Method> parse_methods(const std::vector<std::string>& names) {
  if (names.empty()) throw ConfigError("estimator set is empty");
  std::vector<Method> out;
  for (const auto& name : names) {
    const Method m = parse_method(name);
    if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
  }
  return out;
}

void require_b(std::size_t b) {
  if (b < 2) throw ConfigError("B must be at least 2");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("output path not writable: " + path);
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir);
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("not a number list: '" + text + "'");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string data;
  std::string response;
  std::string weight;
  LearnerOptions learner;
  std::size_t replicates = 1000;
  std::size_t m_sub = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> estimators = {"IJ_U"};
  std::string out_dir = "bagvar_run";
};

RunManifest manifest_for(const TrainArgs& a, const Dataset& data) {
  RunManifest m;
  m.dataset = fs::absolute(a.data).lexically_normal().string();
  if (!a.response.empty()) m.response = a.response;
  if (!a.weight.empty()) m.weight = a.weight;
  m.learner = a.learner.spec();
  m.plan.n = data.rows();
  m.plan.replicates = a.replicates;
  m.plan.m_sub = a.m_sub;
  m.plan.seed = a.seed;
  m.methods = parse_methods(a.estimators);
  m.feature_names = data.feature_names();
  return m;
}

Dataset load_for(const RunManifest& m) {
  CsvSchema schema;
  schema.response = m.response;
  schema.weight = m.weight;
  return load_csv(m.dataset, schema);
}

int run_train(const TrainArgs& a) {
  require_b(a.replicates);
  CsvSchema schema;
  if (!a.response.empty()) schema.response = a.response;
  if (!a.weight.empty()) schema.weight = a.weight;
  const Dataset data = load_csv(a.data, schema);
  const RunManifest manifest = manifest_for(a, data);
  ensure_dir(a.out_dir);

  const auto learner = make_learner(manifest.learner);
  const BaggedRun run = bag_predict(data, *learner, manifest.plan, training_queries(data));
  const std::string dir = (fs::path(a.out_dir) / "").string();
  export_trace(dir + "trace_", run.trace);
  {
    auto out = open_out(dir + "train_predictions.csv");
    write_prediction_records(out, make_prediction_records(run, manifest.methods));
  }
  write_manifest(dir + "manifest.json", manifest);

  std::cout << "n=" << data.rows() << " p=" << data.features() << " B=" << manifest.plan.replicates
            << " learner=" << manifest.learner.describe();
  try {
    std::cout << " oob_mse=" << format_double(oob_error(run.trace, data));
  } catch (const EstimationError&) {
    std::cout << " oob_mse=nan";
  }
  std::cout << "\n";
  return 0;
}

struct PredictArgs {
  std::string manifest;
  std::string queries;
  std::string out = "predictions.csv";
  std::vector<std::string> estimators;
  std::optional<double> z;
  std::string trace_prefix;
};

int run_predict(const PredictArgs& a) {
  RunManifest m = read_manifest(a.manifest);
  if (!a.estimators.empty()) m.methods = parse_methods(a.estimators);
  require_b(m.plan.replicates);
  if (a.z && !(*a.z > 0.0)) throw ConfigError("--z must be positive");
  const Dataset data = load_for(m);
  if (data.rows() != m.plan.n) throw DataError("dataset row count differs from the manifest");
  if (data.feature_names() != m.feature_names) throw DataError("dataset columns differ from the manifest");
  const QueryMatrix queries = load_queries_csv(a.queries, m.feature_names);

  const auto learner = make_learner(m.learner);
  const BaggedRun run = bag_predict(data, *learner, m.plan, queries);
  auto out = open_out(a.out);
  write_prediction_records(out, make_prediction_records(run, m.methods), a.z);
  if (!a.trace_prefix.empty()) export_trace(a.trace_prefix, run.trace);
  return 0;
}

struct SimulateArgs {
  std::string generator = "cosine";
  std::size_t n = 50;
  std::size_t p = 0;
  std::optional<double> noise_sd;
  LearnerOptions learner;
  std::size_t replicates = 200;
  std::size_t n_test = 50;
  std::size_t n_reps = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> estimators = {"IJ_U", "J_U", "AVG"};
  std::string out = "study.csv";
  std::string summary = "study.json";
};

int run_simulate(const SimulateArgs& a) {
  require_b(a.replicates);
  StudyConfig c;
  c.generator.kind = parse_generator_kind(a.generator);
  c.generator.n = a.n;
  c.generator.p = a.p;
  c.generator.noise_sd = a.noise_sd;
  c.learner = a.learner.spec();
  c.replicates = a.replicates;
  c.n_test = a.n_test;
  c.n_reps = a.n_reps;
  c.seed = a.seed;
  c.methods = parse_methods(a.estimators);
  const StudyReport report = run_table_study(c);
  auto out = open_out(a.out);
  write_study_csv(out, report);
  write_text_file(a.summary, study_summary_json(report));
  if (report.degenerate) std::cerr << "warning: ground-truth variance is zero at every test point\n";
  if (!report.truth_mc_ok) std::cerr << "warning: Monte Carlo share of ground truth is above 5%\n";
  return 0;
}

struct RatioArgs {
  std::string data;
  std::string response;
  std::string generator = "cosine";
  std::size_t n = 50;
  std::string query = "0.5,0.5";
  LearnerOptions learner;
  std::vector<std::size_t> b_grid = {25, 50, 100, 200, 500};
  std::size_t draws = 200;
  std::size_t reference = 50000;
  std::uint64_t seed = 1;
  std::string out = "ratio.csv";
  std::string summary = "ratio.json";
};

int run_ratio(const RatioArgs& a) {
  Dataset data;
  if (!a.data.empty()) {
    CsvSchema schema;
    if (!a.response.empty()) schema.response = a.response;
    data = load_csv(a.data, schema);
  } else {
    GeneratorSpec spec;
    spec.kind = parse_generator_kind(a.generator);
    spec.n = a.n;
    spec.seed = a.seed;
    data = generate(spec);
  }
  const std::vector<double> query = parse_doubles(a.query);
  if (query.size() != data.features()) throw ConfigError("--query needs one value per feature");
  RatioConfig c;
  c.b_grid = a.b_grid;
  c.n_draws = a.draws;
  c.reference_replicates = a.reference;
  c.seed = a.seed;
  const auto learner = make_learner(a.learner.spec());
  const RatioExperiment e = run_mc_ratio_experiment(data, *learner, query, c);
  auto out = open_out(a.out);
  write_ratio_csv(out, e);
  write_text_file(a.summary, ratio_summary_json(e));
  return 0;
}

struct SpikeArgs {
  std::size_t n = 500;
  std::size_t replicates = 500;
  std::size_t n_reps = 100;
  double step = 0.01;
  double noise_sd = 0.5;
  double z = 1.96;
  LearnerOptions learner;
  std::uint64_t seed = 1;
  std::string out = "spike.csv";
  std::string summary = "spike.json";
};

int run_spike(const SpikeArgs& a) {
  require_b(a.replicates);
  if (!(a.step > 0.0 && a.step <= 0.5)) throw ConfigError("--step must be in (0, 0.5]");
  SpikeConfig c;
  c.n = a.n;
  c.replicates = a.replicates;
  c.n_reps = a.n_reps;
  c.noise_sd = a.noise_sd;
  c.learner = a.learner.spec();
  c.seed = a.seed;
  const auto points = static_cast<std::size_t>(std::llround(1.0 / a.step));
  for (std::size_t k = 0; k <= points; ++k) c.grid.push_back(std::min(1.0, static_cast<double>(k) * a.step));
  const SpikeProfile profile = run_spike_study(c);
  auto out = open_out(a.out);
  write_spike_csv(out, profile);
  write_text_file(a.summary, spike_summary_json(profile, {kStepJumps.begin(), kStepJumps.end()}, a.z));
  return 0;
}

struct AnovaArgs {
  std::string support = "0,1";
  std::string probabilities = "0.5,0.5";
  std::size_t n = 4;
  std::string learner = "max";
  std::string query = "0";
  std::string out;
};

int run_anova(const AnovaArgs& a) {
  DiscreteDistribution dist{parse_doubles(a.support), parse_doubles(a.probabilities)};
  std::unique_ptr<Learner> learner;
  if (a.learner == "max") {
    learner = make_max_response_learner();
  } else {
    LearnerSpec spec;
    spec.kind = parse_learner_kind(a.learner);
    learner = make_learner(spec);
  }
  const AnovaOracle oracle = anova_oracle(dist, a.n, *learner, parse_doubles(a.query));
  const std::string text = anova_json(oracle);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(a.out, text);
  }
  return 0;
}

void print_error(std::string_view code, std::string message) {
  for (auto& c : message) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  std::cerr << "error code=" << code << " message=\"" << message << "\"\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bagged predictions with bootstrap variance estimates"};
  app.set_config("--config", "", "TOML or INI file with option values");
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (overrides BAGVAR_THREADS)");

  TrainArgs train;
  auto* cmd_train = app.add_subcommand("train", "bag a learner on a CSV file and export the trace");
  cmd_train->add_option("--data", train.data, "training CSV")->required();
  cmd_train->add_option("--response", train.response, "response column (default: last)");
  cmd_train->add_option("--weight", train.weight, "observation weight column");
  add_learner_options(cmd_train, train.learner);
  cmd_train->add_option("-B,--replicates", train.replicates, "bootstrap replicates")->capture_default_str();
  cmd_train->add_option("--m-sub", train.m_sub, "resample size (0 = n)")->capture_default_str();
  cmd_train->add_option("--seed", train.seed)->capture_default_str();
  cmd_train->add_option("--estimators", train.estimators, "IJ, J, IJ_U, J_U, AVG")->delimiter(',');
  cmd_train->add_option("--out-dir", train.out_dir)->capture_default_str();

  PredictArgs predict;
  auto* cmd_predict = app.add_subcommand("predict", "predictions with standard errors for a query file");
  cmd_predict->add_option("--manifest", predict.manifest, "manifest.json written by train")->required();
  cmd_predict->add_option("--queries", predict.queries, "query CSV with the training feature columns")
      ->required();
  cmd_predict->add_option("--out", predict.out)->capture_default_str();
  cmd_predict->add_option("--estimators", predict.estimators, "override the manifest's estimators")
      ->delimiter(',');
  cmd_predict->add_option("--z", predict.z, "add Gaussian interval columns prediction +/- z*se");
  cmd_predict->add_option("--trace-prefix", predict.trace_prefix, "also export the query trace");

  SimulateArgs sim;
  auto* cmd_sim = app.add_subcommand("simulate", "bias/variance/MSE study of the variance estimators");
  cmd_sim->add_option("--generator", sim.generator, "cosine, xor, and, step, circle")->capture_default_str();
  cmd_sim->add_option("--n", sim.n)->capture_default_str();
  cmd_sim->add_option("--p", sim.p, "feature count (0 = generator default)")->capture_default_str();
  cmd_sim->add_option("--noise-sd", sim.noise_sd);
  add_learner_options(cmd_sim, sim.learner);
  cmd_sim->add_option("-B,--replicates", sim.replicates)->capture_default_str();
  cmd_sim->add_option("--n-test", sim.n_test)->capture_default_str();
  cmd_sim->add_option("--n-reps", sim.n_reps)->capture_default_str();
  cmd_sim->add_option("--seed", sim.seed)->capture_default_str();
  cmd_sim->add_option("--estimators", sim.estimators)->delimiter(',');
  cmd_sim->add_option("--out", sim.out)->capture_default_str();
  cmd_sim->add_option("--summary", sim.summary)->capture_default_str();

  RatioArgs ratio;
  auto* cmd_ratio = app.add_subcommand("mc-ratio", "Monte Carlo bias and variance of J relative to IJ");
  cmd_ratio->add_option("--data", ratio.data, "CSV dataset (default: generated)");
  cmd_ratio->add_option("--response", ratio.response);
  cmd_ratio->add_option("--generator", ratio.generator)->capture_default_str();
  cmd_ratio->add_option("--n", ratio.n)->capture_default_str();
  cmd_ratio->add_option("--query", ratio.query, "comma-separated query point")->capture_default_str();
  add_learner_options(cmd_ratio, ratio.learner);
  cmd_ratio->add_option("--b-grid", ratio.b_grid)->delimiter(',');
  cmd_ratio->add_option("--draws", ratio.draws)->capture_default_str();
  cmd_ratio->add_option("--reference-b", ratio.reference)->capture_default_str();
  cmd_ratio->add_option("--seed", ratio.seed)->capture_default_str();
  cmd_ratio->add_option("--out", ratio.out)->capture_default_str();
  cmd_ratio->add_option("--summary", ratio.summary)->capture_default_str();

  SpikeArgs spike;
  spike.learner.max_leaves = 5;
  auto* cmd_spike = app.add_subcommand("spike", "variance profile of bagged trees on a step function");
  cmd_spike->add_option("--n", spike.n)->capture_default_str();
  cmd_spike->add_option("-B,--replicates", spike.replicates)->capture_default_str();
  cmd_spike->add_option("--n-reps", spike.n_reps)->capture_default_str();
  cmd_spike->add_option("--step", spike.step, "grid spacing on [0, 1]")->capture_default_str();
  cmd_spike->add_option("--noise-sd", spike.noise_sd)->capture_default_str();
  cmd_spike->add_option("--z", spike.z, "band width in standard errors")->capture_default_str();
  add_learner_options(cmd_spike, spike.learner);
  cmd_spike->add_option("--seed", spike.seed)->capture_default_str();
  cmd_spike->add_option("--out", spike.out)->capture_default_str();
  cmd_spike->add_option("--summary", spike.summary)->capture_default_str();

  AnovaArgs anova;
  auto* cmd_anova = app.add_subcommand("anova-oracle", "exact variance decomposition on a discrete problem");
  cmd_anova->add_option("--support", anova.support)->capture_default_str();
  cmd_anova->add_option("--probabilities", anova.probabilities)->capture_default_str();
  cmd_anova->add_option("--n", anova.n)->capture_default_str();
  cmd_anova->add_option("--learner", anova.learner, "max, mean, tree or poly")->capture_default_str();
  cmd_anova->add_option("--query", anova.query)->capture_default_str();
  cmd_anova->add_option("--out", anova.out, "JSON output (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(to_string(ErrorCode::config), e.what());
    return static_cast<int>(ErrorCode::config);
  }

  try {
    if (threads > 0) set_thread_count(threads);
    if (*cmd_train) return run_train(train);
    if (*cmd_predict) return run_predict(predict);
    if (*cmd_sim) return run_simulate(sim);
    if (*cmd_ratio) return run_ratio(ratio);
    if (*cmd_spike) return run_spike(spike);
    if (*cmd_anova) return run_anova(anova);
  } catch (const Error& e) {
    print_error(to_string(e.code()), e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    print_error("INTERNAL_ERROR", e.what());
    return 1;
  }
  return 0;
}
