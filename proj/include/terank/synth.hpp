#pragma once

#include <cstdint>
#include <vector>

#include "terank/embeddings.hpp"
#include "terank/evaluation.hpp"

namespace terank {

/// C centroids from N(0, rho^2 I), then n points per class from
/// N(centroid, s^2 I), drawn class-major and dimension-minor from one
/// SplitMix64 stream. Features are rounded to float32 so the set survives
/// an EMB1 round trip unchanged.
EmbeddingSet gen_class_gaussians(int classes, int per_class, int dim, double rho, double noise, std::uint64_t seed);

struct ZooConfig {
  int classes = 5;
  int per_class = 300;
  int dim = 16;
  std::vector<double> rho;    // one per model
  std::vector<double> noise;  // one per model
  std::uint64_t seed = 0;
  std::string dataset = "synthetic";

  int models() const noexcept { return static_cast<int>(rho.size()); }
  void validate() const;
};

/// Evenly spaced values from `first` to `last` inclusive.
std::vector<double> linspace(double first, double last, int count);

struct ModelZoo {
  std::vector<EmbeddingSet> models;  // ids model_00, model_01, ...
  TruthTable truth;                  // regime "synthetic", pool "supervised"
};

/// Model m uses seed (base XOR m). Its ground truth is the accuracy (percent)
/// of a nearest-centroid classifier fitted on the model's embeddings and
/// evaluated on a fresh draw of `per_class` points per class continuing the
/// same stream.
ModelZoo gen_model_zoo(const ZooConfig& cfg);

/// Nearest-centroid accuracy in [0, 1] of `test` under centroids of `train`.
double nearest_centroid_accuracy(const EmbeddingSet& train, const EmbeddingSet& test);

}  // namespace terank
