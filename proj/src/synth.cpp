#include "terank/synth.hpp"

#include <algorithm>
#include <cstdio>

#include "terank/errors.hpp"
#include "terank/perturbation.hpp"
#include "terank/random.hpp"

namespace terank {

namespace {

Matrix draw_centroids(RandomStream& rng, int classes, int dim, double rho) {
  Matrix centroids(classes, dim);
  for (int c = 0; c < classes; ++c) {
    for (int d = 0; d < dim; ++d) centroids(c, d) = rng.gaussian(0.0, rho);
  }
  return centroids;
}

Matrix draw_points(RandomStream& rng, const Matrix& centroids, int per_class, double noise) {
  const auto classes = centroids.rows();
  const auto dim = centroids.cols();
  Matrix x(classes * per_class, dim);
  for (Eigen::Index c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      for (Eigen::Index d = 0; d < dim; ++d) x(c * per_class + i, d) = rng.gaussian(centroids(c, d), noise);
    }
  }
  return round_to_float(x);
}

std::vector<int> class_major_labels(int classes, int per_class) {
  std::vector<int> labels(static_cast<std::size_t>(classes) * per_class);
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) labels[static_cast<std::size_t>(c) * per_class + i] = c;
  }
  return labels;
}

void check_params(int classes, int per_class, int dim, double rho, double noise) {
  if (classes < 2 || per_class < 1 || dim < 1) throw UsageError("synthetic set needs C >= 2, n >= 1, D >= 1");
  if (!(rho >= 0.0) || !(noise >= 0.0)) throw UsageError("synthetic rho and noise must be non-negative");
}

}  // namespace

EmbeddingSet gen_class_gaussians(int classes, int per_class, int dim, double rho, double noise, std::uint64_t seed) {
  check_params(classes, per_class, dim, rho, noise);
  RandomStream rng(seed);
  const Matrix centroids = draw_centroids(rng, classes, dim, rho);
  return EmbeddingSet(draw_points(rng, centroids, per_class, noise), class_major_labels(classes, per_class), classes);
}

void ZooConfig::validate() const {
  if (models() < 2) throw UsageError("model zoo needs at least 2 models");
  if (noise.size() != rho.size()) throw UsageError("rho and noise lists must have one entry per model");
  if (classes < 2 || per_class < 2 || dim < 2) throw UsageError("model zoo needs C >= 2, n >= 2, D >= 2");
  for (std::size_t m = 0; m < rho.size(); ++m) {
    if (!(rho[m] > 0.0) || !(noise[m] > 0.0)) throw UsageError("model zoo rho and noise must be positive");
  }
}

std::vector<double> linspace(double first, double last, int count) {
  std::vector<double> out(static_cast<std::size_t>(std::max(count, 0)));
  for (int i = 0; i < count; ++i) out[i] = count == 1 ? first : first + (last - first) * i / (count - 1);
  return out;
}

double nearest_centroid_accuracy(const EmbeddingSet& train, const EmbeddingSet& test) {
  const ClassGeometry g = class_geometry(train);
  int correct = 0;
  for (Eigen::Index i = 0; i < test.size(); ++i) {
    Eigen::Index best = 0;
    (g.centroids.rowwise() - test.features().row(i)).rowwise().squaredNorm().minCoeff(&best);
    if (static_cast<int>(best) == test.labels()[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

ModelZoo gen_model_zoo(const ZooConfig& cfg) {
  cfg.validate();
  ModelZoo zoo;
  for (int m = 0; m < cfg.models(); ++m) {
    char id[32];
    std::snprintf(id, sizeof id, "model_%02d", m);
    RandomStream rng(cfg.seed ^ static_cast<std::uint64_t>(m));
    const Matrix centroids = draw_centroids(rng, cfg.classes, cfg.dim, cfg.rho[m]);
    const auto labels = class_major_labels(cfg.classes, cfg.per_class);
    EmbeddingSet train(draw_points(rng, centroids, cfg.per_class, cfg.noise[m]), labels, cfg.classes, id,
                       cfg.dataset);
    EmbeddingSet test(draw_points(rng, centroids, cfg.per_class, cfg.noise[m]), labels, cfg.classes);
    const double acc = 100.0 * nearest_centroid_accuracy(train, test);
    zoo.truth.add({id, cfg.dataset, "synthetic", "supervised", acc});
    zoo.models.push_back(std::move(train));
  }
  return zoo;
}

}  // namespace terank
