#include <algorithm>
#include <cmath>
#include <numbers>

#include "terank/errors.hpp"
#include "terank/metrics.hpp"

namespace terank {

namespace {

// Spectral view of F used by every evidence evaluation: squared singular
// values and the projection of the target onto the left singular vectors.
struct Spectrum {
  Vector s2;        // r = min(N, D) squared singular values
  Vector z;         // U^T y, length r
  double y2 = 0.0;  // |y|^2
  double n = 0.0;
  double d = 0.0;
};

Spectrum make_spectrum(const Matrix& features, const Vector& target) {
  Eigen::BDCSVD<Matrix> svd(features, Eigen::ComputeThinU);
  Spectrum sp;
  sp.s2 = svd.singularValues().array().square();
  sp.z = svd.matrixU().transpose() * target;
  sp.y2 = target.squaredNorm();
  sp.n = static_cast<double>(features.rows());
  sp.d = static_cast<double>(features.cols());
  return sp;
}

struct Posterior {
  double m2 = 0.0;        // |m|^2
  double residual = 0.0;  // |F m - y|^2
  double gamma = 0.0;     // effective number of parameters
  double logdet = 0.0;    // log |alpha I + beta F^T F|
};

Posterior posterior(const Spectrum& sp, double alpha, double beta) {
  Posterior p;
  const auto r = sp.s2.size();
  for (Eigen::Index i = 0; i < r; ++i) {
    const double denom = alpha + beta * sp.s2(i);
    const double s = std::sqrt(sp.s2(i));
    const double mi = beta * s * sp.z(i) / denom;
    const double ri = alpha * sp.z(i) / denom;
    p.m2 += mi * mi;
    p.residual += ri * ri;
    p.gamma += beta * sp.s2(i) / denom;
    p.logdet += std::log(denom);
  }
  p.residual += std::max(0.0, sp.y2 - sp.z.squaredNorm());
  p.logdet += (sp.d - static_cast<double>(r)) * std::log(alpha);
  return p;
}

double evidence(const Spectrum& sp, double alpha, double beta) {
  const Posterior p = posterior(sp, alpha, beta);
  return 0.5 * sp.n * std::log(beta) + 0.5 * sp.d * std::log(alpha) - 0.5 * sp.n * std::log(2.0 * std::numbers::pi) -
         0.5 * beta * p.residual - 0.5 * alpha * p.m2 - 0.5 * p.logdet;
}

}  // namespace

double log_evidence(const Matrix& features, const Vector& target, double alpha, double beta) {
  return evidence(make_spectrum(features, target), alpha, beta);
}

EvidenceFit maximize_evidence(const Matrix& features, const Vector& target) {
  const Spectrum sp = make_spectrum(features, target);
  EvidenceFit fit;
  fit.trace.push_back(evidence(sp, fit.alpha, fit.beta));
  const double residual_floor = 1e-12 * std::max(sp.y2, 1e-300);
  for (int it = 0; it < 100; ++it) {
    const Posterior p = posterior(sp, fit.alpha, fit.beta);
    // With m = 0 (e.g. all-zero features) the evidence does not depend on alpha.
    const double alpha_new = p.m2 > 1e-300 ? p.gamma / p.m2 : fit.alpha;
    const double beta_new = (sp.n - p.gamma) / std::max(p.residual, residual_floor);
    if (!std::isfinite(alpha_new) || !std::isfinite(beta_new) || alpha_new <= 0.0 || beta_new <= 0.0) {
      throw NumericError("LogME fixed-point iteration diverged");
    }
    const double da = std::abs(alpha_new - fit.alpha) / fit.alpha;
    const double db = std::abs(beta_new - fit.beta) / fit.beta;
    fit.alpha = alpha_new;
    fit.beta = beta_new;
    fit.iterations = it + 1;
    fit.trace.push_back(evidence(sp, fit.alpha, fit.beta));
    if (da < 1e-3 && db < 1e-3) break;
  }
  fit.evidence = fit.trace.back();
  return fit;
}

double score_logme(const EmbeddingSet& set) {
  const Matrix& f = set.features();
  const double n = static_cast<double>(set.size());
  double total = 0.0;
  for (int c = 0; c < set.class_count(); ++c) {
    Vector y(set.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = set.labels()[i] == c ? 1.0 : 0.0;
    total += maximize_evidence(f, y).evidence / n;
  }
  return total / set.class_count();
}

}  // namespace terank
