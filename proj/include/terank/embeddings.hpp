#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace terank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A labeled set of feature embeddings: one row per sample, one integer
/// class label per row.
///
/// Features are held in double precision so that downstream geometry
/// (perturbation, metrics) is exact to ~1e-12; EMB1 files store them as
/// float32, and sets loaded from or destined for EMB1 carry values that are
/// exactly representable in float32.
///
/// The set is immutable after construction. The constructor enforces
/// N >= 2, D >= 1, C >= 2, labels in [0, C), every class present and all
/// features finite.
class EmbeddingSet {
 public:
  EmbeddingSet(Matrix features, std::vector<int> labels, int class_count,
               std::string model_id = {}, std::string dataset_id = {},
               std::vector<std::int64_t> original_labels = {});

  const Matrix& features() const noexcept { return features_; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  int class_count() const noexcept { return class_count_; }
  const std::string& model_id() const noexcept { return model_id_; }
  const std::string& dataset_id() const noexcept { return dataset_id_; }

  /// Original label id for each dense class index (identity unless the set
  /// was densified from sparse CSV labels).
  const std::vector<std::int64_t>& original_labels() const noexcept { return original_labels_; }

  Eigen::Index size() const noexcept { return features_.rows(); }
  Eigen::Index dim() const noexcept { return features_.cols(); }

  /// Number of samples per class.
  std::vector<int> class_sizes() const;

  /// Same labels and metadata, different feature matrix (row count must match).
  EmbeddingSet with_features(Matrix features) const;
  EmbeddingSet with_ids(std::string model_id, std::string dataset_id) const;

  bool operator==(const EmbeddingSet& other) const;

 private:
  Matrix features_;
  std::vector<int> labels_;
  int class_count_;
  std::string model_id_;
  std::string dataset_id_;
  std::vector<std::int64_t> original_labels_;
};

/// Row indices grouped by class, in row order.
struct ClassPartition {
  std::vector<std::vector<Eigen::Index>> members;

  int class_count() const noexcept { return static_cast<int>(members.size()); }
};

ClassPartition partition(const EmbeddingSet& set);

/// Gathers the rows of `features` listed in `rows`.
Matrix gather_rows(const Matrix& features, const std::vector<Eigen::Index>& rows);

// EMB1 binary format (little-endian):
//   "EMB1" | u32 N | u32 D | u32 C | u32 reserved=0 | N*D f32 row-major | N u32 labels
inline constexpr char kEmb1Magic[4] = {'E', 'M', 'B', '1'};
inline constexpr std::size_t kEmb1HeaderBytes = 16;

EmbeddingSet load_emb1(const std::filesystem::path& path);
EmbeddingSet read_emb1(const std::vector<unsigned char>& bytes, std::string model_id = {});
void save_emb1(const EmbeddingSet& set, const std::filesystem::path& path);
std::vector<unsigned char> encode_emb1(const EmbeddingSet& set);

/// Loads a CSV with a header row. `label_column` holds integer labels which
/// are densified to [0, C) in ascending order of the original ids; every other
/// column is a numeric feature, in file order.
EmbeddingSet load_csv(const std::filesystem::path& path, const std::string& label_column = "label");

/// Rounds every feature to the nearest float32 value.
Matrix round_to_float(const Matrix& features);

}  // namespace terank
