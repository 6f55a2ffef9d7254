#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace crk {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string position, const std::string& what)
      : Error(position + ": " + what), position_(std::move(position)) {}

  const std::string& position() const noexcept { return position_; }

 private:
  std::string position_;
};

/// Raised when sampled ranks of a symbol differ; carries the offending points.
class NonConstantRank : public Error {
 public:
  NonConstantRank(const std::string& what, int min_rank, int max_rank,
                  std::vector<double> min_witness, std::vector<double> max_witness)
      : Error(what),
        min_rank(min_rank),
        max_rank(max_rank),
        min_witness(std::move(min_witness)),
        max_witness(std::move(max_witness)) {}

  int min_rank;
  int max_rank;
  std::vector<double> min_witness;
  std::vector<double> max_witness;
};

class RankMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateField : public Error {
 public:
  using Error::Error;
};

class NotInIntersection : public Error {
 public:
  using Error::Error;
};

class InvalidExponent : public Error {
 public:
  using Error::Error;
};

}  // namespace crk
