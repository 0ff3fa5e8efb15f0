#pragma once

#include <stdexcept>
#include <string>

namespace terank {

/// Base for every failure caused by malformed or inconsistent input data.
/// The CLI maps these to exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Failures of a numerical routine on otherwise valid data (exit code 4).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad flag values or flag combinations (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// EMB1 / CSV ingestion
class BadMagicError : public DataError {
 public:
  using DataError::DataError;
};
class TruncatedPayloadError : public DataError {
 public:
  using DataError::DataError;
};
class LabelOutOfRangeError : public DataError {
 public:
  using DataError::DataError;
};
class NonFiniteValueError : public DataError {
 public:
  using DataError::DataError;
};
class MissingLabelColumnError : public DataError {
 public:
  using DataError::DataError;
};
class NonNumericCellError : public DataError {
 public:
  using DataError::DataError;
};
class SingleClassError : public DataError {
 public:
  using DataError::DataError;
};
class InvalidEmbeddingError : public DataError {
 public:
  using DataError::DataError;
};
class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Numerical preconditions
class DegenerateDataError : public DataError {
 public:
  using DataError::DataError;
};
class DimensionMismatchError : public DataError {
 public:
  using DataError::DataError;
};
class SingletonClassError : public DataError {
 public:
  SingletonClassError(const std::string& what, int class_index)
      : DataError(what), class_index_(class_index) {}
  int class_index() const noexcept { return class_index_; }

 private:
  int class_index_;
};

// Evaluation
class DuplicateKeyError : public DataError {
 public:
  using DataError::DataError;
};
class AccuracyRangeError : public DataError {
 public:
  using DataError::DataError;
};
class MissingModelError : public DataError {
 public:
  MissingModelError(const std::string& what, std::string model)
      : DataError(what), model_(std::move(model)) {}
  const std::string& model() const noexcept { return model_; }

 private:
  std::string model_;
};
class UnpairedReportError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace terank
