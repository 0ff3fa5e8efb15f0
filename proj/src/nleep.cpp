#include <algorithm>
#include <cmath>

#include "terank/errors.hpp"
#include "terank/metrics.hpp"

namespace terank {

double score_nleep(const EmbeddingSet& set, std::optional<int> components, std::uint64_t seed, Diagnostics* diag) {
  const int k = components.value_or(set.class_count());
  const GmmModel gmm = fit_gmm(set.features(), k, seed);
  const Matrix& post = gmm.responsibilities;  // N x K
  const auto& labels = set.labels();

  // P(y | v) = sum_{i: y_i = y} p(v | x_i) / sum_i p(v | x_i)
  Matrix joint = Matrix::Zero(set.class_count(), k);
  for (Eigen::Index i = 0; i < post.rows(); ++i) joint.row(labels[i]) += post.row(i);
  const Eigen::RowVectorXd mass = joint.colwise().sum();
  std::vector<int> alive;
  for (int v = 0; v < k; ++v) {
    if (mass(v) < 1e-12) {
      if (diag != nullptr) {
        diag->warnings.push_back("NLEEP: GMM component " + std::to_string(v) + " has negligible responsibility; dropped");
      }
      continue;
    }
    alive.push_back(v);
  }

  double total = 0.0;
  for (Eigen::Index i = 0; i < post.rows(); ++i) {
    double eep = 0.0;
    for (int v : alive) eep += joint(labels[i], v) / mass(v) * post(i, v);
    total += std::log(std::min(eep, 1.0));
  }
  const double score = total / static_cast<double>(post.rows());
  if (!std::isfinite(score)) throw NumericError("NLEEP score is not finite");
  return score;
}

}  // namespace terank
