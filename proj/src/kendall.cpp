#include <algorithm>
#include <cmath>
#include <numeric>

#include "terank/errors.hpp"
#include "terank/evaluation.hpp"

namespace terank {

namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

double weighted_by_ranks(std::span<const double> truth, std::span<const double> scores, const std::vector<int>& ranks) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = i + 1; j < truth.size(); ++j) {
      const double w = 1.0 / (1.0 + ranks[i]) + 1.0 / (1.0 + ranks[j]);
      num += w * sgn(truth[i] - truth[j]) * sgn(scores[i] - scores[j]);
      den += w;
    }
  }
  return num / den;
}

}  // namespace

std::string_view to_string(TauWeighting w) { return w == TauWeighting::symmetric ? "symmetric" : "truth_ranks"; }

TauWeighting parse_weighting(std::string_view text) {
  if (text == "symmetric") return TauWeighting::symmetric;
  if (text == "truth_ranks") return TauWeighting::truth_ranks;
  throw UsageError("unknown tau weighting '" + std::string(text) + "'");
}

std::vector<int> descending_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<int> ranks(values.size());
  for (std::size_t r = 0; r < order.size(); ++r) ranks[order[r]] = static_cast<int>(r);
  return ranks;
}

double weighted_kendall_tau(std::span<const double> truth, std::span<const double> scores, TauWeighting weighting) {
  if (truth.size() != scores.size()) throw DimensionMismatchError("truth and score vectors differ in length");
  if (truth.size() < 2) throw DataError("weighted Kendall tau needs at least 2 items");
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::isnan(truth[i]) || std::isnan(scores[i])) throw DataError("NaN in weighted Kendall tau input");
  }
  const double by_truth = weighted_by_ranks(truth, scores, descending_ranks(truth));
  if (weighting == TauWeighting::truth_ranks) return by_truth;
  return 0.5 * (by_truth + weighted_by_ranks(truth, scores, descending_ranks(scores)));
}

}  // namespace terank
