#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "terank/embeddings.hpp"
#include "terank/reduction.hpp"

namespace terank {

enum class PerturbMode { none, spread_only, attract_only, spread_then_attract };

/// Sign convention for the per-pair attract direction.
///  - toward_other: class u moves along C_v - C_u, i.e. toward v while the
///    centroid gap exceeds sigma * (R_u + R_v) and away from it when closer.
///  - literal_eq3: class u moves along C_u - C_v.
enum class AttractDirection { toward_other, literal_eq3 };

inline constexpr double kDefaultAlpha = 0.005;
inline constexpr double kDefaultSigma = 0.6;

struct PerturbConfig {
  double alpha = kDefaultAlpha;
  double sigma = kDefaultSigma;
  PerturbMode mode = PerturbMode::spread_then_attract;
  AttractDirection attract_direction = AttractDirection::toward_other;

  /// Throws UsageError for negative or non-finite alpha / sigma.
  void validate() const;
};

// CLI spellings: none, spread, attract, sa / toward, literal.
std::string_view to_string(PerturbMode mode);
std::string_view to_string(AttractDirection dir);
PerturbMode parse_perturb_mode(std::string_view text);
AttractDirection parse_attract_direction(std::string_view text);

/// Per-class centroids (rows) and RMS radii, snapshotted from one set.
struct ClassGeometry {
  Matrix centroids;  // C x k
  Vector radii;      // length C
};

/// Non-fatal conditions met while perturbing or scoring.
struct Diagnostics {
  std::vector<std::string> warnings;
};

Vector class_centroid(const Matrix& points);

/// Root-mean-square distance of `points` to `centroid`.
double class_radius(const Matrix& points, const Vector& centroid);

ClassGeometry class_geometry(const EmbeddingSet& set);

/// Moves every point one unit further from its class centroid along the
/// centroid-to-point ray. Points within 1e-12 of their centroid stay put.
EmbeddingSet spread(const EmbeddingSet& set);

/// Translates each class rigidly by alpha * Disp_u, where
/// Disp_u = sum_{v != u} dir(u, v) * (|C_u - C_v| - sigma * (R_u + R_v)).
/// All displacements are computed from the `geometry` snapshot before any
/// class moves. Pairs with coincident centroids contribute nothing and are
/// reported through `diag`.
EmbeddingSet attract(const EmbeddingSet& set, const ClassGeometry& geometry, const PerturbConfig& cfg,
                     Diagnostics* diag = nullptr);

/// PCA reduction followed by spread and/or attract according to cfg.mode.
EmbeddingSet sa_perturb(const EmbeddingSet& raw, const PcaTarget& pca_target, const PerturbConfig& cfg,
                        Diagnostics* diag = nullptr);

/// The perturbation step alone, for sets that are already PCA-reduced.
EmbeddingSet perturb_reduced(const EmbeddingSet& reduced, const PerturbConfig& cfg, Diagnostics* diag = nullptr);

}  // namespace terank
