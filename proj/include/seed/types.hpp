#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace seed {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Inconsistent or out-of-range configuration and arguments. CLI exit code 1.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Unreadable, unparsable or invalid input data. CLI exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence or degenerate input. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Dense m x n real matrix whose columns are data points. Entries are
/// validated to be finite at construction; m >= 1 and n >= 1.
class DataMatrix {
 public:
  explicit DataMatrix(Matrix values) : mat_(std::move(values)) {
    if (mat_.rows() < 1 || mat_.cols() < 1) {
      throw DataError("DataMatrix: matrix must have at least one row and one column");
    }
    if (!mat_.allFinite()) {
      throw DataError("DataMatrix: non-finite entry (NaN or Inf) rejected");
    }
  }

  Index rows() const { return mat_.rows(); }
  Index cols() const { return mat_.cols(); }
  const Matrix& mat() const { return mat_; }
  auto col(Index i) const { return mat_.col(i); }

 private:
  Matrix mat_;
};

/// Ordered set of distinct column indices; order is selection order.
class ColumnIndexSet {
 public:
  ColumnIndexSet() = default;

  explicit ColumnIndexSet(std::vector<Index> order) {
    for (Index i : order) append(i);
  }

  void append(Index i) {
    if (i < 0) throw InvalidArgument("ColumnIndexSet: negative index");
    if (!members_.insert(i).second) {
      throw InvalidArgument("ColumnIndexSet: duplicate index " + std::to_string(i));
    }
    order_.push_back(i);
  }

  bool contains(Index i) const { return members_.count(i) != 0; }
  Index size() const { return static_cast<Index>(order_.size()); }
  bool empty() const { return order_.empty(); }
  Index operator[](Index pos) const { return order_.at(static_cast<std::size_t>(pos)); }
  const std::vector<Index>& order() const { return order_; }

  auto begin() const { return order_.begin(); }
  auto end() const { return order_.end(); }

  /// Throws unless every index lies in [0, n).
  void check_bounds(Index n) const {
    for (Index i : order_) {
      if (i >= n) throw InvalidArgument("ColumnIndexSet: index " + std::to_string(i) + " out of range for n=" + std::to_string(n));
    }
  }

  /// The columns of X indexed by this set, in selection order.
  Matrix gather(const Matrix& X) const {
    check_bounds(X.cols());
    Matrix out(X.rows(), size());
    for (Index p = 0; p < size(); ++p) out.col(p) = X.col(order_[static_cast<std::size_t>(p)]);
    return out;
  }

 private:
  std::vector<Index> order_;
  std::unordered_set<Index> members_;
};

}  // namespace seed
