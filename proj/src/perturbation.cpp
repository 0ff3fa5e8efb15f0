#include "terank/perturbation.hpp"

#include <cmath>

#include "terank/errors.hpp"

namespace terank {

namespace {
constexpr double kDegenerate = 1e-12;
}

void PerturbConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) throw UsageError("--alpha must be a non-negative number");
  if (!std::isfinite(sigma) || sigma < 0.0) throw UsageError("--sigma must be a non-negative number");
}

std::string_view to_string(PerturbMode mode) {
  switch (mode) {
    case PerturbMode::none: return "none";
    case PerturbMode::spread_only: return "spread";
    case PerturbMode::attract_only: return "attract";
    case PerturbMode::spread_then_attract: return "sa";
  }
  return "?";
}

std::string_view to_string(AttractDirection dir) {
  return dir == AttractDirection::toward_other ? "toward" : "literal";
}

PerturbMode parse_perturb_mode(std::string_view text) {
  if (text == "none") return PerturbMode::none;
  if (text == "spread") return PerturbMode::spread_only;
  if (text == "attract") return PerturbMode::attract_only;
  if (text == "sa") return PerturbMode::spread_then_attract;
  throw UsageError("unknown perturbation mode '" + std::string(text) + "'");
}

AttractDirection parse_attract_direction(std::string_view text) {
  if (text == "toward") return AttractDirection::toward_other;
  if (text == "literal") return AttractDirection::literal_eq3;
  throw UsageError("unknown attract direction '" + std::string(text) + "'");
}

Vector class_centroid(const Matrix& points) {
  if (points.rows() == 0) throw DataError("centroid of an empty point set");
  return points.colwise().mean().transpose();
}

double class_radius(const Matrix& points, const Vector& centroid) {
  if (points.rows() == 0) return 0.0;
  const double ss = (points.rowwise() - centroid.transpose()).rowwise().squaredNorm().sum();
  return std::sqrt(ss / static_cast<double>(points.rows()));
}

ClassGeometry class_geometry(const EmbeddingSet& set) {
  const auto parts = partition(set);
  ClassGeometry g;
  g.centroids.resize(set.class_count(), set.dim());
  g.radii.resize(set.class_count());
  for (int c = 0; c < set.class_count(); ++c) {
    const Matrix pts = gather_rows(set.features(), parts.members[c]);
    const Vector centroid = class_centroid(pts);
    g.centroids.row(c) = centroid.transpose();
    g.radii(c) = class_radius(pts, centroid);
  }
  return g;
}

EmbeddingSet spread(const EmbeddingSet& set) {
  const ClassGeometry g = class_geometry(set);
  Matrix out = set.features();
  const auto& labels = set.labels();
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const Vector offset = (out.row(i) - g.centroids.row(labels[i])).transpose();
    const double dist = offset.norm();
    if (dist > kDegenerate) out.row(i) += (offset / dist).transpose();
  }
  return set.with_features(std::move(out));
}

EmbeddingSet attract(const EmbeddingSet& set, const ClassGeometry& geometry, const PerturbConfig& cfg,
                     Diagnostics* diag) {
  const int classes = set.class_count();
  if (geometry.centroids.rows() != classes || geometry.centroids.cols() != set.dim()) {
    throw DimensionMismatchError("class geometry does not match embedding set");
  }
  const double sign = cfg.attract_direction == AttractDirection::toward_other ? -1.0 : 1.0;
  Matrix shift = Matrix::Zero(classes, set.dim());
  for (int u = 0; u < classes; ++u) {
    for (int v = 0; v < classes; ++v) {
      if (u == v) continue;
      const Vector gap = (geometry.centroids.row(u) - geometry.centroids.row(v)).transpose();
      const double dist = gap.norm();
      if (dist < kDegenerate) {
        if (diag != nullptr && u < v) {
          diag->warnings.push_back("classes " + std::to_string(u) + " and " + std::to_string(v) +
                                   " have coincident centroids; pair skipped in attract");
        }
        continue;
      }
      const double excess = dist - cfg.sigma * (geometry.radii(u) + geometry.radii(v));
      shift.row(u) += (sign * excess / dist) * gap.transpose();
    }
  }
  shift *= cfg.alpha;
  Matrix out = set.features();
  const auto& labels = set.labels();
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) += shift.row(labels[i]);
  return set.with_features(std::move(out));
}

EmbeddingSet perturb_reduced(const EmbeddingSet& reduced, const PerturbConfig& cfg, Diagnostics* diag) {
  cfg.validate();
  switch (cfg.mode) {
    case PerturbMode::none:
      return reduced;
    case PerturbMode::spread_only:
      return spread(reduced);
    case PerturbMode::attract_only:
      return attract(reduced, class_geometry(reduced), cfg, diag);
    case PerturbMode::spread_then_attract: {
      EmbeddingSet spread_set = spread(reduced);
      const ClassGeometry g = class_geometry(spread_set);
      return attract(spread_set, g, cfg, diag);
    }
  }
  return reduced;
}

EmbeddingSet sa_perturb(const EmbeddingSet& raw, const PcaTarget& pca_target, const PerturbConfig& cfg,
                        Diagnostics* diag) {
  const PcaModel pca = fit_pca(raw, pca_target);
  return perturb_reduced(transform(pca, raw), cfg, diag);
}

}  // namespace terank
