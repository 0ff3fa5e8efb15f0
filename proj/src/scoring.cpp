#include "terank/scoring.hpp"

#include <chrono>

#include "terank/errors.hpp"

namespace terank {

std::string_view to_string(MetricId id) {
  switch (id) {
    case MetricId::logme: return "logme";
    case MetricId::gbc: return "gbc";
    case MetricId::nleep: return "nleep";
    case MetricId::lda: return "lda";
  }
  return "?";
}

MetricId parse_metric(std::string_view text) {
  if (text == "logme") return MetricId::logme;
  if (text == "gbc") return MetricId::gbc;
  if (text == "nleep") return MetricId::nleep;
  if (text == "lda") return MetricId::lda;
  throw UsageError("unknown metric '" + std::string(text) + "'");
}

double score_metric(const EmbeddingSet& set, MetricId metric, const MetricOptions& opts, std::uint64_t seed,
                    Diagnostics* diag) {
  switch (metric) {
    case MetricId::logme: return score_logme(set);
    case MetricId::gbc: return score_gbc(set);
    case MetricId::nleep: return score_nleep(set, opts.nleep_components, seed, diag);
    case MetricId::lda: return score_lda(set, opts.lda);
  }
  throw UsageError("unknown metric");
}

ScoreRecord score_model(const EmbeddingSet& raw, MetricId metric, const PerturbConfig& perturb,
                        const PcaTarget& pca_target, std::uint64_t seed, const MetricOptions& opts,
                        Diagnostics* diag) {
  const auto start = std::chrono::steady_clock::now();
  const EmbeddingSet perturbed = sa_perturb(raw, pca_target, perturb, diag);
  ScoreRecord rec;
  rec.model_id = raw.model_id();
  rec.dataset_id = raw.dataset_id();
  rec.metric = metric;
  rec.mode = perturb.mode;
  rec.score = score_metric(perturbed, metric, opts, seed, diag);
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace terank
