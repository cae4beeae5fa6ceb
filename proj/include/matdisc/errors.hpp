#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace matdisc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ZeroColumn : public Error {
 public:
  explicit ZeroColumn(std::size_t column)
      : Error("feature column " + std::to_string(column) + " has zero norm"), column_(column) {}
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class SingularGram : public Error {
 public:
  using Error::Error;
};

class IllConditioned : public Error {
 public:
  using Error::Error;
};

class CorrelationTie : public Error {
 public:
  using Error::Error;
};

class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Carries the last iterate so callers can inspect how far the solver got.
class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, Eigen::VectorXd last)
      : Error(what), last_(std::move(last)) {}
  const Eigen::VectorXd& last_iterate() const { return last_; }

 private:
  Eigen::VectorXd last_;
};

class Diverged : public Error {
 public:
  using Error::Error;
};

class NonFiniteObjective : public Error {
 public:
  NonFiniteObjective(const std::string& what, Eigen::VectorXd w)
      : Error(what), w_(std::move(w)) {}
  const Eigen::VectorXd& point() const { return w_; }

 private:
  Eigen::VectorXd w_;
};

class NonPositiveStretch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : Error("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class EmptySupport : public Error {
 public:
  using Error::Error;
};

class NoQualifyingKnot : public Error {
 public:
  using Error::Error;
};

}  // namespace matdisc
