#include <algorithm>
#include <cmath>

#include "terank/errors.hpp"
#include "terank/metrics.hpp"

namespace terank {

namespace {

// Mean over samples of softmax(scores_i)_{y_i}; `scores` is N x C.
double mean_true_class_probability(const Matrix& scores, const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double top = scores.row(i).maxCoeff();
    const double norm = (scores.row(i).array() - top).exp().sum();
    total += std::exp(scores(i, labels[i]) - top) / norm;
  }
  return total / static_cast<double>(scores.rows());
}

}  // namespace

double lda_prior_score(const EmbeddingSet& set) {
  const auto sizes = set.class_sizes();
  Eigen::RowVectorXd log_prior(set.class_count());
  for (int c = 0; c < set.class_count(); ++c) log_prior(c) = std::log(sizes[c] / static_cast<double>(set.size()));
  return mean_true_class_probability(log_prior.replicate(set.size(), 1), set.labels());
}

double score_lda(const EmbeddingSet& set, const LdaConfig& cfg) {
  if (!(cfg.epsilon_scale > 0.0)) throw UsageError("--lda-eps must be positive");
  const auto parts = partition(set);
  const int classes = set.class_count();
  const Eigen::Index dim = set.dim();
  const Matrix& x = set.features();
  const double n = static_cast<double>(set.size());

  const Eigen::RowVectorXd global_mean = x.colwise().mean();
  Matrix class_means(classes, dim);
  Matrix within = Matrix::Zero(dim, dim);
  Matrix between = Matrix::Zero(dim, dim);
  for (int c = 0; c < classes; ++c) {
    if (parts.members[c].size() < 2) {
      throw SingletonClassError("LDA score needs at least 2 samples in class " + std::to_string(c), c);
    }
    const Matrix pts = gather_rows(x, parts.members[c]);
    const Eigen::RowVectorXd mu = pts.colwise().mean();
    class_means.row(c) = mu;
    const Matrix centred = pts.rowwise() - mu;
    within.noalias() += centred.transpose() * centred;
    const Eigen::RowVectorXd offset = mu - global_mean;
    between.noalias() += static_cast<double>(pts.rows()) * offset.transpose() * offset;
  }
  const double epsilon = cfg.epsilon_scale * within.trace() / static_cast<double>(dim);
  const double ridge = epsilon > 0.0 ? epsilon : cfg.epsilon_scale;
  const Matrix regularized = within + ridge * Matrix::Identity(dim, dim);

  // Eigenvectors of (S_w + eps I)^-1 S_b via the symmetric-definite pencil.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(between, regularized);
  if (eig.info() != Eigen::Success) throw NumericError("LDA generalized eigen-decomposition failed");
  const int default_rank = static_cast<int>(std::min<Eigen::Index>(classes - 1, dim));
  const int rank = std::clamp(cfg.projection_rank.value_or(default_rank), 1, static_cast<int>(dim));
  // Solver returns vectors with u^T (S_w + eps I) u = 1, ascending. Rescale by
  // sqrt(N) so the projected within-class covariance is the identity.
  const Matrix projection = eig.eigenvectors().rightCols(rank).rowwise().reverse() * std::sqrt(n);

  // delta_c = f^T U U^T mu_c - 1/2 mu_c^T U U^T mu_c + log(K_c / K)
  const Matrix projected_means = class_means * projection;  // C x r
  const Matrix projected = x * projection;                   // N x r
  const auto sizes = set.class_sizes();
  Eigen::RowVectorXd bias(classes);
  for (int c = 0; c < classes; ++c) {
    bias(c) = -0.5 * projected_means.row(c).squaredNorm() + std::log(sizes[c] / n);
  }
  const Matrix delta = (projected * projected_means.transpose()).rowwise() + bias;
  const double score = mean_true_class_probability(delta, set.labels());
  if (!std::isfinite(score)) throw NumericError("LDA score is not finite");
  return score;
}

}  // namespace terank
