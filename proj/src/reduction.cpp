#include "terank/reduction.hpp"

#include <algorithm>
#include <cmath>

#include "terank/errors.hpp"

namespace terank {

namespace {

// Flip each row so its largest-magnitude entry is positive.
void fix_signs(Matrix& components) {
  for (Eigen::Index r = 0; r < components.rows(); ++r) {
    Eigen::Index arg = 0;
    components.row(r).cwiseAbs().maxCoeff(&arg);
    if (components(r, arg) < 0.0) components.row(r) *= -1.0;
  }
}

// Extends `basis` (orthonormal rows) with Gram-Schmidt on unit vectors until
// it has `rows` rows. Used when the Gram route runs out of non-null directions.
void complete_basis(Matrix& basis, Eigen::Index filled) {
  const Eigen::Index d = basis.cols();
  for (Eigen::Index e = 0; e < d && filled < basis.rows(); ++e) {
    Vector v = Vector::Unit(d, e);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index r = 0; r < filled; ++r) v -= basis.row(r).dot(v) * basis.row(r).transpose();
    }
    const double norm = v.norm();
    if (norm > 1e-6) {
      basis.row(filled) = (v / norm).transpose();
      ++filled;
    }
  }
}

}  // namespace

PcaModel fit_pca(const Matrix& features, const PcaTarget& target) {
  const Eigen::Index n = features.rows();
  const Eigen::Index d = features.cols();
  if (n < 2) throw DegenerateDataError("PCA needs at least 2 samples");

  PcaModel model;
  model.mean = features.colwise().mean().transpose();
  const Matrix centered = features.rowwise() - model.mean.transpose();
  const double denom = static_cast<double>(n - 1);

  // Eigenpairs sorted descending, expressed as D-dimensional directions.
  Vector values;
  Matrix directions;  // columns
  const Eigen::Index max_rank = std::min(n - 1, d);
  if (d <= n) {
    const Matrix cov = (centered.transpose() * centered) / denom;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericError("covariance eigen-decomposition failed");
    values = eig.eigenvalues().reverse();
    directions = eig.eigenvectors().rowwise().reverse();
  } else {
    const Matrix gram = (centered * centered.transpose()) / denom;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericError("Gram eigen-decomposition failed");
    const Vector gram_values = eig.eigenvalues().reverse();
    const Matrix gram_vectors = eig.eigenvectors().rowwise().reverse();
    values = gram_values.head(max_rank);
    directions.resize(d, max_rank);
    Matrix rows(max_rank, d);
    Eigen::Index filled = 0;
    const double tiny = 1e-12 * std::max(gram_values(0), 0.0);
    for (Eigen::Index i = 0; i < max_rank; ++i) {
      if (gram_values(i) <= tiny || gram_values(i) <= 0.0) break;
      const Vector v = centered.transpose() * gram_vectors.col(i);
      rows.row(filled++) = (v / v.norm()).transpose();
    }
    complete_basis(rows, filled);
    directions = rows.transpose();
  }

  values = values.unaryExpr([](double v) { return v < 0.0 ? 0.0 : v; });
  const double total = centered.squaredNorm() / denom;
  if (!(total > 0.0)) throw DegenerateDataError("zero total variance: all rows identical");

  Eigen::Index k = 0;
  if (const auto* energy = std::get_if<EnergyTarget>(&target)) {
    if (!(energy->fraction > 0.0 && energy->fraction <= 1.0)) {
      throw UsageError("PCA energy target must be in (0, 1]");
    }
    double cumulative = 0.0;
    k = max_rank;
    for (Eigen::Index i = 0; i < max_rank; ++i) {
      cumulative += values(i);
      if (cumulative / total >= energy->fraction - 1e-12) {
        k = i + 1;
        break;
      }
    }
  } else {
    const int rank = std::get<RankTarget>(target).rank;
    if (rank < 1) throw UsageError("PCA rank must be >= 1");
    k = std::min<Eigen::Index>(rank, max_rank);
  }

  model.eigenvalues = values.head(k);
  model.components = directions.leftCols(k).transpose();
  fix_signs(model.components);
  model.energy_retained = std::min(1.0, model.eigenvalues.sum() / total);
  return model;
}

PcaModel fit_pca(const EmbeddingSet& set, const PcaTarget& target) { return fit_pca(set.features(), target); }

Matrix transform(const PcaModel& model, const Matrix& features) {
  if (features.cols() != model.input_dim()) {
    throw DimensionMismatchError("PCA model expects " + std::to_string(model.input_dim()) + " features, got " +
                                 std::to_string(features.cols()));
  }
  return (features.rowwise() - model.mean.transpose()) * model.components.transpose();
}

EmbeddingSet transform(const PcaModel& model, const EmbeddingSet& set) {
  return set.with_features(transform(model, set.features()));
}

}  // namespace terank
