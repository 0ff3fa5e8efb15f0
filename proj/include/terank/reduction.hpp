#pragma once

#include <variant>

#include "terank/embeddings.hpp"

namespace terank {

/// Keep the smallest number of components whose cumulative variance
/// fraction reaches `fraction` (in (0, 1]).
struct EnergyTarget {
  double fraction = 0.8;
};

/// Keep exactly `rank` components, clamped to min(N-1, D).
struct RankTarget {
  int rank = 1;
};

using PcaTarget = std::variant<EnergyTarget, RankTarget>;

inline constexpr double kDefaultPcaEnergy = 0.8;

/// Principal components of a mean-centred feature matrix. Centres but never
/// whitens. Component signs are fixed so that the largest-magnitude entry
/// of each row is positive.
struct PcaModel {
  Vector mean;          // length D
  Matrix components;    // k x D, orthonormal rows
  Vector eigenvalues;   // length k, non-increasing, sample variances (N-1 denominator)
  double energy_retained = 1.0;

  Eigen::Index input_dim() const noexcept { return mean.size(); }
  Eigen::Index rank() const noexcept { return components.rows(); }
};

PcaModel fit_pca(const EmbeddingSet& set, const PcaTarget& target = EnergyTarget{});
PcaModel fit_pca(const Matrix& features, const PcaTarget& target = EnergyTarget{});

EmbeddingSet transform(const PcaModel& model, const EmbeddingSet& set);
Matrix transform(const PcaModel& model, const Matrix& features);

}  // namespace terank
