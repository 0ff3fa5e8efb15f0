#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "terank/embeddings.hpp"
#include "terank/perturbation.hpp"

namespace terank {

enum class MetricId { logme, gbc, nleep, lda };

std::string_view to_string(MetricId id);
MetricId parse_metric(std::string_view text);

// ---------------------------------------------------------------------------
// LogME: maximised log evidence of a Bayesian linear model, one-vs-rest.

/// Result of maximising the evidence for one target vector.
struct EvidenceFit {
  double alpha = 1.0;     // prior precision
  double beta = 1.0;      // noise precision
  double evidence = 0.0;  // log evidence at (alpha, beta), not normalised by N
  int iterations = 0;
  std::vector<double> trace;  // evidence at the initial point and after every update
};

/// Log evidence log p(y | F, alpha, beta) of y = F w + noise with
/// w ~ N(0, alpha^-1 I) and noise ~ N(0, beta^-1 I).
double log_evidence(const Matrix& features, const Vector& target, double alpha, double beta);

/// MacKay fixed-point maximisation starting at alpha = beta = 1. Stops when
/// both alpha and beta change by less than 1e-3 relative, or after 100 updates.
EvidenceFit maximize_evidence(const Matrix& features, const Vector& target);

/// Mean over classes of (maximum log evidence) / N with {0,1} one-vs-rest targets.
double score_logme(const EmbeddingSet& set);

// ---------------------------------------------------------------------------
// GBC: negative sum of pairwise Bhattacharyya coefficients.

inline constexpr double kGbcVarianceFloor = 1e-6;

/// Bhattacharyya distance between two diagonal Gaussians.
double bhattacharyya_distance(const Vector& mean_a, const Vector& var_a, const Vector& mean_b, const Vector& var_b);

/// Requires at least two samples per class (SingletonClassError otherwise).
double score_gbc(const EmbeddingSet& set);

// ---------------------------------------------------------------------------
// Diagonal-covariance Gaussian mixture, fitted by EM.

inline constexpr double kGmmVarianceFloor = 1e-6;

struct GmmModel {
  Vector weights;            // K
  Matrix means;              // K x k
  Matrix variances;          // K x k, each >= kGmmVarianceFloor
  Matrix responsibilities;   // N x K, p(component | x_i)
  std::vector<double> log_likelihood_trace;
  int iterations = 0;

  int components() const noexcept { return static_cast<int>(weights.size()); }
};

/// k-means++ seeding from a SplitMix64 stream, then EM until the relative
/// log-likelihood change drops below 1e-4 or 200 iterations.
GmmModel fit_gmm(const Matrix& features, int components, std::uint64_t seed);

/// Log expected empirical prediction with GMM posteriors standing in for
/// source-label predictions. Always <= 0. `components` defaults to C.
double score_nleep(const EmbeddingSet& set, std::optional<int> components, std::uint64_t seed,
                   Diagnostics* diag = nullptr);

// ---------------------------------------------------------------------------
// LDA score: mean posterior of the true class under a discriminant model in
// the top LDA directions.

struct LdaConfig {
  double epsilon_scale = 1e-4;        // ridge as a fraction of trace(S_w) / k
  std::optional<int> projection_rank; // default min(C - 1, k)
};

/// Requires at least two samples per class. Result lies in [0, 1].
double score_lda(const EmbeddingSet& set, const LdaConfig& cfg = {});

/// Score under the labels-only prior: mean of softmax(log(K_c / K))_y.
double lda_prior_score(const EmbeddingSet& set);

// ---------------------------------------------------------------------------

struct MetricOptions {
  std::optional<int> nleep_components;
  LdaConfig lda;
};

/// Dispatches to one of the metrics above on an already-reduced set.
double score_metric(const EmbeddingSet& set, MetricId metric, const MetricOptions& opts, std::uint64_t seed,
                    Diagnostics* diag = nullptr);

}  // namespace terank
