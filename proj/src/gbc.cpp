#include <cmath>

#include "terank/errors.hpp"
#include "terank/metrics.hpp"

namespace terank {

double bhattacharyya_distance(const Vector& mean_a, const Vector& var_a, const Vector& mean_b, const Vector& var_b) {
  double mahalanobis = 0.0;
  double log_ratio = 0.0;
  for (Eigen::Index d = 0; d < mean_a.size(); ++d) {
    const double pooled = 0.5 * (var_a(d) + var_b(d));
    const double diff = mean_a(d) - mean_b(d);
    mahalanobis += diff * diff / pooled;
    log_ratio += std::log(pooled / std::sqrt(var_a(d) * var_b(d)));
  }
  return 0.125 * mahalanobis + 0.5 * log_ratio;
}

double score_gbc(const EmbeddingSet& set) {
  const auto parts = partition(set);
  const int classes = set.class_count();
  Matrix means(classes, set.dim());
  Matrix vars(classes, set.dim());
  for (int c = 0; c < classes; ++c) {
    if (parts.members[c].size() < 2) {
      throw SingletonClassError("GBC needs at least 2 samples in class " + std::to_string(c), c);
    }
    const Matrix pts = gather_rows(set.features(), parts.members[c]);
    const Eigen::RowVectorXd mu = pts.colwise().mean();
    means.row(c) = mu;
    vars.row(c) = ((pts.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(pts.rows()))
                      .max(kGbcVarianceFloor);
  }
  double score = 0.0;
  for (int u = 0; u < classes; ++u) {
    for (int v = u + 1; v < classes; ++v) {
      const double db = bhattacharyya_distance(means.row(u).transpose(), vars.row(u).transpose(),
                                               means.row(v).transpose(), vars.row(v).transpose());
      score -= std::exp(-db);
    }
  }
  return score;
}

}  // namespace terank
