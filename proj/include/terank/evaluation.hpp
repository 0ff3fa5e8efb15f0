#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "terank/scoring.hpp"

namespace terank {

// ---------------------------------------------------------------------------
// Ground-truth fine-tuning accuracies.

struct TruthRecord {
  std::string model;
  std::string dataset;
  std::string regime;  // vanilla | lbft | lft | synthetic
  std::string pool;    // supervised | self_supervised
  double accuracy = 0.0;  // percent
};

class TruthTable {
 public:
  TruthTable() = default;
  explicit TruthTable(std::vector<TruthRecord> records);

  /// Validates and appends; throws DuplicateKeyError / AccuracyRangeError.
  void add(TruthRecord record);

  std::optional<double> accuracy(std::string_view model, std::string_view dataset, std::string_view regime,
                                 std::string_view pool) const;

  const std::vector<TruthRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }

 private:
  std::vector<TruthRecord> records_;
};

/// CSV with header model,dataset,regime,pool,accuracy.
TruthTable load_truth(const std::filesystem::path& path);
TruthTable parse_truth(std::istream& in, const std::string& source = "<stream>");
void save_truth(const TruthTable& table, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Weighted Kendall tau.

enum class TauWeighting {
  truth_ranks,  // weights from the ground-truth ranking only
  symmetric,    // mean of the truth-rank and score-rank weighted values
};

std::string_view to_string(TauWeighting w);
TauWeighting parse_weighting(std::string_view text);

/// Descending ordinal ranks: rank 0 is the largest value; equal values are
/// ranked by position.
std::vector<int> descending_ranks(std::span<const double> values);

/// Hyperbolic pair weight w_ij = 1/(1+r_i) + 1/(1+r_j), pair agreement
/// sgn(truth_i - truth_j) * sgn(score_i - score_j) with sgn(0) = 0.
double weighted_kendall_tau(std::span<const double> truth, std::span<const double> scores,
                            TauWeighting weighting = TauWeighting::symmetric);

// ---------------------------------------------------------------------------
// Ranking reports.

struct ModelRanking {
  std::string id;
  double score = 0.0;
  double accuracy = 0.0;
  int pred_rank = 0;
  int truth_rank = 0;
};

struct RankingReport {
  std::string metric;
  std::string dataset;
  std::string regime;
  std::string pool;
  std::string perturb_mode;
  std::string weighting = "symmetric";
  double tau_w = 0.0;
  std::vector<ModelRanking> models;
  double wall_time_s = 0.0;
};

/// All records must share one metric and one perturbation mode.
RankingReport rank_and_report(const std::vector<ScoreRecord>& scores, const TruthTable& truth,
                              const std::string& dataset, const std::string& regime, const std::string& pool,
                              TauWeighting weighting = TauWeighting::symmetric);

nlohmann::ordered_json report_to_json(const RankingReport& report);
RankingReport report_from_json(const nlohmann::json& j);

/// score,accuracy,model rows for regression plots.
std::string report_plot_csv(const RankingReport& report);

struct ImprovementRow {
  std::string metric;
  std::size_t pairs = 0;
  double mean_before = 0.0;
  double mean_after = 0.0;
  double improvement_pct = 0.0;  // (after - before) / |before| * 100
};

/// Pairs reports by (metric, dataset) and averages tau_w per metric.
std::vector<ImprovementRow> improvement_summary(const std::vector<RankingReport>& before,
                                                const std::vector<RankingReport>& after);

}  // namespace terank
