#include "bagvar/reports.hpp"

#include "bagvar/csv.hpp"
#include "bagvar/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace bagvar {

using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

json num_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

}  // namespace

void write_text_file(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

void write_counts_csv(std::ostream& out, const CountMatrix& counts) {
  for (std::size_t i = 0; i < counts.observations(); ++i) out << (i ? "," : "") << "n_" << i;
  out << '\n';
  for (std::size_t b = 0; b < counts.replicates(); ++b) {
    for (std::size_t i = 0; i < counts.observations(); ++i) out << (i ? "," : "") << counts(b, i);
    out << '\n';
  }
}

void write_predictions_csv(std::ostream& out, const Matrix& predictions) {
  for (Eigen::Index k = 0; k < predictions.cols(); ++k) out << (k ? "," : "") << "t_" << k;
  out << '\n';
  for (Eigen::Index b = 0; b < predictions.rows(); ++b) {
    for (Eigen::Index k = 0; k < predictions.cols(); ++k) out << (k ? "," : "") << num(predictions(b, k));
    out << '\n';
  }
}

void export_trace(const std::string& prefix, const ResampleTrace& trace) {
  {
    auto out = open_out(prefix + "counts.csv");
    write_counts_csv(out, trace.counts);
  }
  auto out = open_out(prefix + "predictions.csv");
  write_predictions_csv(out, trace.predictions);
}

std::vector<PredictionRecord> make_prediction_records(const BaggedRun& run, const std::vector<Method>& methods) {
  if (methods.empty()) throw ConfigError("no estimators selected");
  const TraceEstimates est = estimate_all(run.trace);
  std::vector<PredictionRecord> records;
  for (std::size_t k = 0; k < run.prediction.size(); ++k) {
    const auto q = static_cast<Eigen::Index>(k);
    PredictionRecord rec;
    rec.query_id = k;
    rec.prediction = run.prediction[k];
    rec.v_hat = est.v_hat(q);
    rec.replicates = run.trace.replicates();
    for (Method m : methods) {
      MethodColumn col;
      col.method = m;
      col.raw = est.raw(m)(q);
      col.truncated = col.raw < 0.0;
      col.standard_error = std::sqrt(std::max(col.raw, 0.0));
      rec.methods.push_back(col);
    }
    const double first = std::max(rec.methods.front().raw, 0.0);
    rec.rho_hat = rec.v_hat > 0.0 ? first / rec.v_hat : std::nan("");
    records.push_back(std::move(rec));
  }
  return records;
}

void write_prediction_records(std::ostream& out, const std::vector<PredictionRecord>& records,
                              std::optional<double> z) {
  if (records.empty()) return;
  out << "query_id,prediction,v_hat,rho_hat,B";
  for (const auto& col : records.front().methods) {
    const auto name = to_string(col.method);
    out << ",se_" << name << ",var_raw_" << name << ",truncated_" << name;
  }
  if (z) {
    for (const auto& col : records.front().methods) {
      const auto name = to_string(col.method);
      out << ",ci_lower_" << name << ",ci_upper_" << name;
    }
  }
  out << '\n';
  for (const auto& rec : records) {
    out << rec.query_id << ',' << num(rec.prediction) << ',' << num(rec.v_hat) << ',' << num(rec.rho_hat) << ','
        << rec.replicates;
    for (const auto& col : rec.methods) {
      out << ',' << num(col.standard_error) << ',' << num(col.raw) << ',' << (col.truncated ? 1 : 0);
    }
    if (z) {
      for (const auto& col : rec.methods) {
        out << ',' << num(rec.prediction - *z * col.standard_error) << ','
            << num(rec.prediction + *z * col.standard_error);
      }
    }
    out << '\n';
  }
}

std::string manifest_to_json(const RunManifest& m) {
  json j;
  j["format"] = "bagvar-manifest";
  j["version"] = 1;
  j["dataset"] = m.dataset;
  j["response"] = m.response ? json(*m.response) : json(nullptr);
  j["weight"] = m.weight ? json(*m.weight) : json(nullptr);
  j["learner"] = {{"kind", std::string(to_string(m.learner.kind))},
                  {"mtry", m.learner.mtry},
                  {"min_leaf", m.learner.min_leaf},
                  {"max_leaves", m.learner.max_leaves},
                  {"max_degree", m.learner.max_degree}};
  // seed as a string: JSON readers commonly lose precision above 2^53
  j["plan"] = {{"n", m.plan.n},
               {"B", m.plan.replicates},
               {"m_sub", m.plan.m_sub},
               {"seed", std::to_string(m.plan.seed)}};
  json methods = json::array();
  for (Method method : m.methods) methods.push_back(std::string(to_string(method)));
  j["estimators"] = methods;
  j["features"] = m.feature_names;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.value("format", std::string()) != "bagvar-manifest") throw ConfigError("not a bagvar manifest");
    RunManifest m;
    m.dataset = j.at("dataset").get<std::string>();
    if (!j.at("response").is_null()) m.response = j.at("response").get<std::string>();
    if (!j.at("weight").is_null()) m.weight = j.at("weight").get<std::string>();
    const json& l = j.at("learner");
    m.learner.kind = parse_learner_kind(l.at("kind").get<std::string>());
    m.learner.mtry = l.at("mtry").get<std::size_t>();
    m.learner.min_leaf = l.at("min_leaf").get<std::size_t>();
    m.learner.max_leaves = l.at("max_leaves").get<std::size_t>();
    m.learner.max_degree = l.at("max_degree").get<std::size_t>();
    const json& p = j.at("plan");
    m.plan.n = p.at("n").get<std::size_t>();
    m.plan.replicates = p.at("B").get<std::size_t>();
    m.plan.m_sub = p.at("m_sub").get<std::size_t>();
    m.plan.seed = std::stoull(p.at("seed").get<std::string>());
    for (const auto& s : j.at("estimators")) m.methods.push_back(parse_method(s.get<std::string>()));
    m.feature_names = j.at("features").get<std::vector<std::string>>();
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
  write_text_file(path, manifest_to_json(manifest));
}

RunManifest read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return manifest_from_json(ss.str());
}

void write_study_csv(std::ostream& out, const StudyReport& r) {
  out << "generator,estimator,n,p,B,n_test,n_reps,bias,bias_hw,variance,variance_hw,mse,mse_hw\n";
  for (const auto& c : r.cells) {
    out << r.generator << ',' << to_string(c.method) << ',' << r.n << ',' << r.p << ',' << r.replicates << ','
        << r.n_test << ',' << r.n_reps << ',' << num(c.bias) << ',' << num(c.bias_half_width) << ','
        << num(c.variance) << ',' << num(c.variance_half_width) << ',' << num(c.mse) << ','
        << num(c.mse_half_width) << '\n';
  }
}

std::string study_summary_json(const StudyReport& r) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    cells.push_back({{"estimator", std::string(to_string(c.method))},
                     {"bias", num_json(c.bias)},
                     {"bias_half_width", num_json(c.bias_half_width)},
                     {"variance", num_json(c.variance)},
                     {"variance_half_width", num_json(c.variance_half_width)},
                     {"mse", num_json(c.mse)},
                     {"mse_half_width", num_json(c.mse_half_width)}});
  }
  json j = {{"generator", r.generator},
            {"n", r.n},
            {"p", r.p},
            {"B", r.replicates},
            {"n_test", r.n_test},
            {"n_reps", r.n_reps},
            {"mean_truth", num_json(r.mean_truth)},
            {"mean_v_hat", num_json(r.mean_v_hat)},
            {"truth_mc_share", num_json(r.truth_mc_share)},
            {"truth_mc_ok", r.truth_mc_ok},
            {"degenerate_truth", r.degenerate},
            {"cells", cells}};
  return j.dump(2) + "\n";
}

void write_ratio_csv(std::ostream& out, const RatioExperiment& e) {
  out << "B,bias_ij,bias_j,bias_ij_se,bias_j_se,var_ij,var_j,bias_ratio,var_ratio,"
         "predicted_bias_ij,predicted_bias_j,predicted_var_ij,predicted_var_j,predicted_bias_ratio,"
         "predicted_var_ratio\n";
  for (const auto& p : e.points) {
    out << p.replicates << ',' << num(p.bias_ij) << ',' << num(p.bias_j) << ',' << num(p.bias_ij_se) << ','
        << num(p.bias_j_se) << ',' << num(p.var_ij) << ',' << num(p.var_j) << ',' << num(p.empirical_bias_ratio)
        << ',' << num(p.empirical_var_ratio) << ',' << num(p.predicted_bias_ij) << ','
        << num(p.predicted_bias_j) << ',' << num(p.predicted_var_ij) << ',' << num(p.predicted_var_j) << ','
        << num(p.predicted_bias_ratio) << ',' << num(p.predicted_var_ratio) << '\n';
  }
}

std::string ratio_summary_json(const RatioExperiment& e) {
  json points = json::array();
  for (const auto& p : e.points) {
    points.push_back({{"B", p.replicates},
                      {"bias_ratio", num_json(p.empirical_bias_ratio)},
                      {"var_ratio", num_json(p.empirical_var_ratio)},
                      {"predicted_bias_ratio", num_json(p.predicted_bias_ratio)},
                      {"predicted_var_ratio", num_json(p.predicted_var_ratio)}});
  }
  json j = {{"n", e.n},
            {"v_hat", num_json(e.v_hat)},
            {"ij_reference", num_json(e.ij_ref)},
            {"j_reference", num_json(e.j_ref)},
            {"points", points}};
  return j.dump(2) + "\n";
}

void write_spike_csv(std::ostream& out, const SpikeProfile& p) {
  out << "x,mean_estimate,estimate_se,truth,truth_se,mean_prediction\n";
  for (std::size_t k = 0; k < p.grid.size(); ++k) {
    out << num(p.grid[k]) << ',' << num(p.mean_estimate[k]) << ',' << num(p.estimate_se[k]) << ','
        << num(p.truth[k]) << ',' << num(p.truth_se[k]) << ',' << num(p.mean_prediction[k]) << '\n';
  }
}

std::string spike_summary_json(const SpikeProfile& p, const std::vector<double>& jumps, double z) {
  json maxima = json::array();
  const auto peaks = local_maxima(p.mean_estimate);
  for (std::size_t k = 0; k < peaks.size() && k < jumps.size(); ++k) maxima.push_back(p.grid[peaks[k]]);
  json j = {{"grid_points", p.grid.size()},
            {"jumps", jumps},
            {"largest_maxima", maxima},
            {"band_z", z},
            {"fraction_within_bands", fraction_within_bands(p, z)}};
  return j.dump(2) + "\n";
}

std::string anova_json(const AnovaOracle& o) {
  json j = {{"n", o.n},
            {"terms", o.terms},
            {"mean", o.mean},
            {"total_variance", o.total_variance},
            {"sum_terms", o.sum_terms},
            {"expected_jackknife", o.expected_jackknife},
            {"expected_ij", o.expected_ij},
            {"expected_average", o.expected_average},
            {"first_order_shortfall", o.first_order_shortfall},
            {"jackknife_identity_gap", o.jackknife_identity_gap}};
  return j.dump(2) + "\n";
}

}  // namespace bagvar
