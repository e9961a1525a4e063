#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace clicklab {

// Error taxonomy. UsageError maps to exit 2, DataError to exit 3,
// InternalError to exit 4 at the CLI boundary.
enum class ErrorKind {
  MalformedLine,
  FieldParse,
  InvariantViolation,
  GroupingViolation,
  NoRankOnClicked,
  PolicyUnresolved,
  PoolExhausted,
  ZeroVector,
  ShapeMismatch,
  NonFinite,
  DegenerateInput,
  EmptyCorpus,
  DivergenceDetected,
  Io,
  Capacity,
};

const char* to_string(ErrorKind kind);

class DataError : public std::runtime_error {
 public:
  DataError(ErrorKind kind, std::string message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  // Row numbers are 1-based; 0 means "no position available".
  DataError(ErrorKind kind, std::string message, std::uint64_t row)
      : std::runtime_error(std::string(to_string(kind)) + " at row " +
                           std::to_string(row) + ": " + message),
        kind_(kind),
        row_(row) {}

  ErrorKind kind() const { return kind_; }
  std::uint64_t row() const { return row_; }

 private:
  ErrorKind kind_;
  std::uint64_t row_ = 0;
};

class UsageError : public std::runtime_error {
 public:
  explicit UsageError(std::string message) : std::runtime_error(std::move(message)) {}
};

class InternalError : public std::logic_error {
 public:
  explicit InternalError(std::string message) : std::logic_error(std::move(message)) {}
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::FieldParse: return "FieldParse";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::GroupingViolation: return "GroupingViolation";
    case ErrorKind::NoRankOnClicked: return "NoRankOnClicked";
    case ErrorKind::PolicyUnresolved: return "PolicyUnresolved";
    case ErrorKind::PoolExhausted: return "PoolExhausted";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Capacity: return "Capacity";
  }
  return "Unknown";
}

}  // namespace clicklab
