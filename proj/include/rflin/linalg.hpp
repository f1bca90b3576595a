#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "rflin/errors.hpp"

namespace rflin {

// Regularized design matrix Lambda = I + sum_t phi_t phi_t^T together with a
// maintained inverse. The inverse is advanced by the rank-1 inverse-update
// identity on every insert and re-factorized from the full matrix every
// kRefactorInterval updates to keep drift bounded.
class CovarianceAccumulator {
 public:
  static constexpr int kRefactorInterval = 256;
  static constexpr double kNormSlack = 1e-9;

  explicit CovarianceAccumulator(int dim);

  int dim() const { return static_cast<int>(lambda_.rows()); }
  std::int64_t count() const { return count_; }
  std::uint64_t serial() const { return serial_; }

  const Eigen::MatrixXd& matrix() const { return lambda_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }

  // Adds phi phi^T. Requires dim match and ||phi|| <= 1 + kNormSlack.
  void update(const Eigen::Ref<const Eigen::VectorXd>& phi);

  // phi^T Lambda^{-1} phi via the maintained inverse. Never negative.
  double quadratic_form(const Eigen::Ref<const Eigen::VectorXd>& phi) const;

 private:
  void refactor();

  Eigen::MatrixXd lambda_;
  Eigen::MatrixXd inverse_;
  std::int64_t count_ = 0;
  int updates_since_refactor_ = 0;
  std::uint64_t serial_ = 0;
};

// Ridge regression weights against a frozen accumulator, plus enough identity
// to tell which design produced them.
struct RidgeSolution {
  Eigen::VectorXd weights;
  std::uint64_t design_serial = 0;
  std::int64_t design_count = 0;
};

// w = Lambda^{-1} sum_t phi_t y_t for the features already absorbed into the
// accumulator, in insertion order.
RidgeSolution ridge_solve(const CovarianceAccumulator& cov,
                          std::span<const Eigen::VectorXd> features,
                          std::span<const double> targets);

}  // namespace rflin
