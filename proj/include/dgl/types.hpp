#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dgl {

using Index = std::int64_t;

// Dense storage is row-major throughout so on-disk layout matches memory.
using DenseMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

enum class ErrorCode {
  DeadEndRow,
  NotIrreducible,
  ZeroMean,
  DegenerateAux,
  NotConverged,
  SingularSystem,
  EigensolverFailure,
  EmptyRow,
  NotRegular,
  ShapeMismatch,
  EmptyMask,
  EmptyEdgeSet,
  ParseError,
  InconsistentCounts,
  ClassTooSmall,
  InvalidArgument,
  IoError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, Index index = -1)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const { return code_; }

  // Offending row/node/line when the failure is tied to one, else -1.
  Index index() const { return index_; }

 private:
  ErrorCode code_;
  Index index_;
};

}  // namespace dgl
