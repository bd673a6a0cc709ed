#ifndef EQUIPROJ_ERRORS_HPP
#define EQUIPROJ_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace equiproj {

/// Bad shapes, mismatched groups, out-of-range indices, non-finite data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Power iteration ran out of iterations.
class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, std::size_t iterations)
      : std::runtime_error(what), iterations_(iterations) {}
  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

class RankDeficiency : public std::runtime_error {
 public:
  RankDeficiency(const std::string& what, std::size_t rank)
      : std::runtime_error(what), rank_(rank) {}
  std::size_t rank() const noexcept { return rank_; }

 private:
  std::size_t rank_;
};

/// A dense solve would exceed the configured dimension cap.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A theoretical inequality that must hold was observed to fail.
class BoundViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, int last_finite_epoch)
      : std::runtime_error(what), last_finite_epoch_(last_finite_epoch) {}
  int last_finite_epoch() const noexcept { return last_finite_epoch_; }

 private:
  int last_finite_epoch_;
};

/// A model evaluation failed inside an empirical-defect sum; carries the
/// (sample, rotation) pair that triggered it.
class EvaluationError : public std::runtime_error {
 public:
  EvaluationError(const std::string& what, std::size_t sample, std::size_t rotation)
      : std::runtime_error(what), sample_(sample), rotation_(rotation) {}
  std::size_t sample() const noexcept { return sample_; }
  std::size_t rotation() const noexcept { return rotation_; }

 private:
  std::size_t sample_;
  std::size_t rotation_;
};

}  // namespace equiproj

#endif  // EQUIPROJ_ERRORS_HPP
