#include <cmath>
#include <limits>
#include <numbers>

#include "terank/errors.hpp"
#include "terank/metrics.hpp"
#include "terank/random.hpp"

namespace terank {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k-means++: first centre uniform, the rest with probability proportional to
// squared distance from the nearest chosen centre.
Matrix seed_centres(const Matrix& x, int k, RandomStream& rng) {
  const Eigen::Index n = x.rows();
  Matrix centres(k, x.cols());
  centres.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  Vector nearest = (x.rowwise() - centres.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = nearest.sum();
    Eigen::Index pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += nearest(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centres.row(c) = x.row(pick);
    nearest = nearest.cwiseMin((x.rowwise() - centres.row(c)).rowwise().squaredNorm());
  }
  return centres;
}

// E-step. Fills responsibilities and returns the total log-likelihood.
double expectation(const Matrix& x, const GmmModel& m, Matrix& resp) {
  const Eigen::Index n = x.rows();
  const int k = m.components();
  const double log2pi = std::log(2.0 * std::numbers::pi);
  Vector log_norm(k);
  for (int c = 0; c < k; ++c) {
    log_norm(c) = (m.weights(c) > 0.0 ? std::log(m.weights(c)) : kNegInf) -
                  0.5 * (static_cast<double>(x.cols()) * log2pi + m.variances.row(c).array().log().sum());
  }
  const Matrix inv_var = m.variances.cwiseInverse();
  resp.resize(n, k);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = kNegInf;
    for (int c = 0; c < k; ++c) {
      const double maha = ((x.row(i) - m.means.row(c)).array().square() * inv_var.row(c).array()).sum();
      resp(i, c) = log_norm(c) - 0.5 * maha;
      best = std::max(best, resp(i, c));
    }
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      resp(i, c) = std::exp(resp(i, c) - best);
      sum += resp(i, c);
    }
    resp.row(i) /= sum;
    ll += best + std::log(sum);
  }
  return ll;
}

void maximization(const Matrix& x, const Matrix& resp, GmmModel& m) {
  const double n = static_cast<double>(x.rows());
  for (int c = 0; c < m.components(); ++c) {
    const double nk = resp.col(c).sum();
    m.weights(c) = nk / n;
    if (nk <= std::numeric_limits<double>::min()) continue;  // dead component keeps its parameters
    const Eigen::RowVectorXd mu = (resp.col(c).transpose() * x) / nk;
    m.means.row(c) = mu;
    const Eigen::RowVectorXd var = (resp.col(c).transpose() * (x.rowwise() - mu).array().square().matrix()) / nk;
    m.variances.row(c) = var.array().max(kGmmVarianceFloor);
  }
}

}  // namespace

GmmModel fit_gmm(const Matrix& features, int components, std::uint64_t seed) {
  if (components < 1) throw UsageError("GMM needs at least one component");
  if (components > features.rows()) {
    throw DataError("GMM with " + std::to_string(components) + " components needs at least that many samples, got " +
                    std::to_string(features.rows()));
  }
  RandomStream rng(seed);
  GmmModel m;
  m.means = seed_centres(features, components, rng);
  const Eigen::RowVectorXd mu = features.colwise().mean();
  const Eigen::RowVectorXd var =
      ((features.rowwise() - mu).array().square().colwise().sum() / static_cast<double>(features.rows()))
          .max(kGmmVarianceFloor);
  m.variances = var.replicate(components, 1);
  m.weights = Vector::Constant(components, 1.0 / components);

  double ll = expectation(features, m, m.responsibilities);
  m.log_likelihood_trace.push_back(ll);
  for (int it = 0; it < 200; ++it) {
    maximization(features, m.responsibilities, m);
    const double next = expectation(features, m, m.responsibilities);
    m.log_likelihood_trace.push_back(next);
    m.iterations = it + 1;
    const double change = std::abs(next - ll) / std::max(std::abs(ll), 1e-300);
    ll = next;
    if (change < 1e-4) break;
  }
  if (!std::isfinite(ll)) throw NumericError("GMM log-likelihood is not finite");
  return m;
}

}  // namespace terank
