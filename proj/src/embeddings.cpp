#include "terank/embeddings.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include "terank/errors.hpp"

namespace terank {

namespace {

static_assert(std::endian::native == std::endian::little, "EMB1 I/O assumes a little-endian host");

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xffu));
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

EmbeddingSet::EmbeddingSet(Matrix features, std::vector<int> labels, int class_count,
                           std::string model_id, std::string dataset_id,
                           std::vector<std::int64_t> original_labels)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      class_count_(class_count),
      model_id_(std::move(model_id)),
      dataset_id_(std::move(dataset_id)),
      original_labels_(std::move(original_labels)) {
  const auto n = features_.rows();
  if (n < 2) throw InvalidEmbeddingError("embedding set needs at least 2 samples, got " + std::to_string(n));
  if (features_.cols() < 1) throw InvalidEmbeddingError("embedding set needs at least 1 feature dimension");
  if (class_count_ < 2) throw SingleClassError("embedding set needs at least 2 classes, got " + std::to_string(class_count_));
  if (static_cast<Eigen::Index>(labels_.size()) != n) {
    throw InvalidEmbeddingError("label count " + std::to_string(labels_.size()) + " does not match row count " +
                                std::to_string(n));
  }
  std::vector<int> seen(class_count_, 0);
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const int y = labels_[i];
    if (y < 0 || y >= class_count_) {
      throw LabelOutOfRangeError("label " + std::to_string(y) + " at row " + std::to_string(i) +
                                 " outside [0, " + std::to_string(class_count_) + ")");
    }
    ++seen[y];
  }
  for (int c = 0; c < class_count_; ++c) {
    if (seen[c] == 0) throw InvalidEmbeddingError("class " + std::to_string(c) + " has no samples");
  }
  if (!features_.allFinite()) {
    for (Eigen::Index i = 0; i < features_.rows(); ++i) {
      for (Eigen::Index j = 0; j < features_.cols(); ++j) {
        if (!std::isfinite(features_(i, j))) {
          throw NonFiniteValueError("non-finite feature at row " + std::to_string(i) + ", column " + std::to_string(j));
        }
      }
    }
  }
  if (original_labels_.empty()) {
    original_labels_.resize(class_count_);
    for (int c = 0; c < class_count_; ++c) original_labels_[c] = c;
  } else if (static_cast<int>(original_labels_.size()) != class_count_) {
    throw InvalidEmbeddingError("label map size does not match class count");
  }
}

std::vector<int> EmbeddingSet::class_sizes() const {
  std::vector<int> sizes(class_count_, 0);
  for (int y : labels_) ++sizes[y];
  return sizes;
}

EmbeddingSet EmbeddingSet::with_features(Matrix features) const {
  if (features.rows() != features_.rows()) {
    throw DimensionMismatchError("replacement features have " + std::to_string(features.rows()) + " rows, expected " +
                                 std::to_string(features_.rows()));
  }
  return EmbeddingSet(std::move(features), labels_, class_count_, model_id_, dataset_id_, original_labels_);
}

EmbeddingSet EmbeddingSet::with_ids(std::string model_id, std::string dataset_id) const {
  return EmbeddingSet(features_, labels_, class_count_, std::move(model_id), std::move(dataset_id), original_labels_);
}

bool EmbeddingSet::operator==(const EmbeddingSet& other) const {
  return class_count_ == other.class_count_ && labels_ == other.labels_ && features_.rows() == other.features_.rows() &&
         features_.cols() == other.features_.cols() && features_ == other.features_ &&
         original_labels_ == other.original_labels_;
}

ClassPartition partition(const EmbeddingSet& set) {
  ClassPartition p;
  p.members.resize(set.class_count());
  const auto& labels = set.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) p.members[labels[i]].push_back(static_cast<Eigen::Index>(i));
  return p;
}

Matrix gather_rows(const Matrix& features, const std::vector<Eigen::Index>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
  return out;
}

Matrix round_to_float(const Matrix& features) {
  return features.unaryExpr([](double v) { return static_cast<double>(static_cast<float>(v)); });
}

std::vector<unsigned char> encode_emb1(const EmbeddingSet& set) {
  const auto n = static_cast<std::uint32_t>(set.size());
  const auto d = static_cast<std::uint32_t>(set.dim());
  std::vector<unsigned char> out;
  out.reserve(4 + kEmb1HeaderBytes + 4ull * n * d + 4ull * n);
  out.insert(out.end(), std::begin(kEmb1Magic), std::end(kEmb1Magic));
  put_u32(out, n);
  put_u32(out, d);
  put_u32(out, static_cast<std::uint32_t>(set.class_count()));
  put_u32(out, 0);
  const Matrix& x = set.features();
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x(i, j))));
    }
  }
  for (int y : set.labels()) put_u32(out, static_cast<std::uint32_t>(y));
  return out;
}

EmbeddingSet read_emb1(const std::vector<unsigned char>& bytes, std::string model_id) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kEmb1Magic, 4) != 0) {
    throw BadMagicError("missing EMB1 magic bytes");
  }
  if (bytes.size() < 4 + kEmb1HeaderBytes) throw TruncatedPayloadError("EMB1 header truncated");
  const unsigned char* p = bytes.data() + 4;
  const std::uint32_t n = get_u32(p);
  const std::uint32_t d = get_u32(p + 4);
  const std::uint32_t c = get_u32(p + 8);
  const std::uint64_t expected = 4 + kEmb1HeaderBytes + 4ull * n * d + 4ull * n;
  if (bytes.size() < expected) {
    throw TruncatedPayloadError("EMB1 payload truncated: expected " + std::to_string(expected) + " bytes, got " +
                                std::to_string(bytes.size()));
  }
  if (c > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw InvalidEmbeddingError("EMB1 class count out of range");
  }
  p += kEmb1HeaderBytes;
  Matrix features(n, d);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < d; ++j, p += 4) {
      const float v = std::bit_cast<float>(get_u32(p));
      if (!std::isfinite(v)) {
        throw NonFiniteValueError("non-finite feature at row " + std::to_string(i) + ", column " + std::to_string(j));
      }
      features(i, j) = v;
    }
  }
  std::vector<int> labels(n);
  for (std::uint32_t i = 0; i < n; ++i, p += 4) {
    const std::uint32_t y = get_u32(p);
    if (y >= c) {
      throw LabelOutOfRangeError("label " + std::to_string(y) + " at row " + std::to_string(i) + " >= class count " +
                                 std::to_string(c));
    }
    labels[i] = static_cast<int>(y);
  }
  return EmbeddingSet(std::move(features), std::move(labels), static_cast<int>(c), std::move(model_id));
}

EmbeddingSet load_emb1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_emb1(bytes, path.stem().string());
}

void save_emb1(const EmbeddingSet& set, const std::filesystem::path& path) {
  const auto bytes = encode_emb1(set);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

EmbeddingSet load_csv(const std::filesystem::path& path, const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw InvalidEmbeddingError("CSV " + path.string() + " is empty");
  const auto header = split_csv_line(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw MissingLabelColumnError("CSV " + path.string() + " has no label column '" + label_column + "'");
  }
  const auto label_idx = static_cast<std::size_t>(label_it - header.begin());

  std::vector<std::vector<double>> rows;
  std::vector<std::int64_t> raw_labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw NonNumericCellError("CSV line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> row;
    row.reserve(header.size() - 1);
    for (std::size_t j = 0; j < cells.size(); ++j) {
      const auto& cell = cells[j];
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (j == label_idx) {
        std::int64_t y = 0;
        auto [ptr, ec] = std::from_chars(first, last, y);
        if (ec != std::errc() || ptr != last) {
          throw NonNumericCellError("non-integer label '" + cell + "' on CSV line " + std::to_string(line_no));
        }
        raw_labels.push_back(y);
      } else {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last || cell.empty()) {
          throw NonNumericCellError("non-numeric cell '" + cell + "' in column '" + header[j] + "' on CSV line " +
                                    std::to_string(line_no));
        }
        row.push_back(v);
      }
    }
    rows.push_back(std::move(row));
  }

  std::map<std::int64_t, int> dense;
  for (auto y : raw_labels) dense.emplace(y, 0);
  if (dense.size() < 2 && !rows.empty() && rows.size() >= 2) {
    throw SingleClassError("CSV " + path.string() + " contains a single class");
  }
  std::vector<std::int64_t> original;
  for (auto& [raw, idx] : dense) {
    idx = static_cast<int>(original.size());
    original.push_back(raw);
  }
  Matrix features(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(header.size() - 1));
  std::vector<int> labels(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    labels[i] = dense.at(raw_labels[i]);
  }
  const int classes = static_cast<int>(original.size());
  return EmbeddingSet(std::move(features), std::move(labels), classes, path.stem().string(), {},
                      std::move(original));
}

}  // namespace terank
