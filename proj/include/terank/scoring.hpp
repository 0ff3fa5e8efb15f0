#pragma once

#include <cstdint>
#include <string>

#include "terank/metrics.hpp"
#include "terank/perturbation.hpp"
#include "terank/reduction.hpp"

namespace terank {

/// One transferability score T_l for a (model, metric, perturbation) cell.
struct ScoreRecord {
  std::string model_id;
  std::string dataset_id;
  MetricId metric = MetricId::logme;
  PerturbMode mode = PerturbMode::none;
  double score = 0.0;
  double wall_time_s = 0.0;

  bool perturbed() const noexcept { return mode != PerturbMode::none; }
};

/// T_l = metric(sa_perturb(raw, pca_target, perturb)), timed end to end.
ScoreRecord score_model(const EmbeddingSet& raw, MetricId metric, const PerturbConfig& perturb,
                        const PcaTarget& pca_target, std::uint64_t seed, const MetricOptions& opts = {},
                        Diagnostics* diag = nullptr);

/// Per-model seed: base seed XOR model index.
constexpr std::uint64_t model_seed(std::uint64_t base, std::uint64_t model_index) noexcept {
  return base ^ model_index;
}

}  // namespace terank
