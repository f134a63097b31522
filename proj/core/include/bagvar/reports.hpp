#pragma once

#include "bagvar/anova.hpp"
#include "bagvar/bagging.hpp"
#include "bagvar/bootstrap.hpp"
#include "bagvar/learners.hpp"
#include "bagvar/study.hpp"
#include "bagvar/variance.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bagvar {

// ---------------------------------------------------------------------------
// Trace export

void write_counts_csv(std::ostream& out, const CountMatrix& counts);
void write_predictions_csv(std::ostream& out, const Matrix& predictions);
/// Writes <prefix>counts.csv and <prefix>predictions.csv.
void export_trace(const std::string& prefix, const ResampleTrace& trace);

// ---------------------------------------------------------------------------
// Prediction records

struct MethodColumn {
  Method method = Method::ij_unbiased;
  double raw = 0.0;
  double standard_error = 0.0;  ///< sqrt(max(raw, 0))
  bool truncated = false;       ///< raw < 0
};

struct PredictionRecord {
  std::size_t query_id = 0;
  double prediction = 0.0;
  double v_hat = 0.0;
  double rho_hat = 0.0;  ///< first method's value over v_hat; NaN when v_hat is 0
  std::size_t replicates = 0;
  std::vector<MethodColumn> methods;
};

/// One record per query. ConfigError for an empty method list.
std::vector<PredictionRecord> make_prediction_records(const BaggedRun& run, const std::vector<Method>& methods);

/// Header: query_id,prediction,v_hat,rho_hat,B, then se_M,var_raw_M,truncated_M
/// per method, then ci_lower_M,ci_upper_M per method when z is given.
void write_prediction_records(std::ostream& out, const std::vector<PredictionRecord>& records,
                              std::optional<double> z = std::nullopt);

// ---------------------------------------------------------------------------
// Reproducibility manifest

struct RunManifest {
  std::string dataset;
  std::optional<std::string> response;
  std::optional<std::string> weight;
  LearnerSpec learner;
  ResamplePlan plan;
  std::vector<Method> methods;
  std::vector<std::string> feature_names;
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

// ---------------------------------------------------------------------------
// Simulation reports

void write_study_csv(std::ostream& out, const StudyReport& report);
std::string study_summary_json(const StudyReport& report);

void write_ratio_csv(std::ostream& out, const RatioExperiment& experiment);
std::string ratio_summary_json(const RatioExperiment& experiment);

void write_spike_csv(std::ostream& out, const SpikeProfile& profile);
std::string spike_summary_json(const SpikeProfile& profile, const std::vector<double>& jumps, double z);

std::string anova_json(const AnovaOracle& oracle);

/// Writes `text` to `path`, DataError on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace bagvar
