#include "rflin/linalg.hpp"

#include <atomic>
#include <string>

namespace rflin {
namespace {

std::uint64_t next_serial() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace

CovarianceAccumulator::CovarianceAccumulator(int dim) : serial_(next_serial()) {
  if (dim < 1) {
    throw DimensionMismatch("accumulator dimension must be >= 1, got " +
                            std::to_string(dim));
  }
  lambda_ = Eigen::MatrixXd::Identity(dim, dim);
  inverse_ = Eigen::MatrixXd::Identity(dim, dim);
}

void CovarianceAccumulator::update(const Eigen::Ref<const Eigen::VectorXd>& phi) {
  if (phi.size() != lambda_.rows()) {
    throw DimensionMismatch("update vector has size " +
                            std::to_string(phi.size()) + ", accumulator is " +
                            std::to_string(lambda_.rows()));
  }
  const double norm = phi.norm();
  if (norm > 1.0 + kNormSlack) {
    throw NormViolation("feature norm " + std::to_string(norm) +
                        " exceeds the unit bound");
  }
  // (A + phi phi^T)^{-1} = A^{-1} - (A^{-1} phi)(A^{-1} phi)^T / (1 + phi^T A^{-1} phi)
  const Eigen::VectorXd v = inverse_ * phi;
  const double denom = 1.0 + phi.dot(v);
  inverse_.noalias() -= (v * v.transpose()) / denom;
  lambda_.noalias() += phi * phi.transpose();
  ++count_;
  if (++updates_since_refactor_ >= kRefactorInterval) refactor();
}

void CovarianceAccumulator::refactor() {
  // Lambda >= I, so the Cholesky factorization always exists.
  inverse_ = lambda_.llt().solve(
      Eigen::MatrixXd::Identity(lambda_.rows(), lambda_.cols()));
  inverse_ = 0.5 * (inverse_ + inverse_.transpose()).eval();
  updates_since_refactor_ = 0;
}

double CovarianceAccumulator::quadratic_form(
    const Eigen::Ref<const Eigen::VectorXd>& phi) const {
  if (phi.size() != lambda_.rows()) {
    throw DimensionMismatch("query vector has size " +
                            std::to_string(phi.size()) + ", accumulator is " +
                            std::to_string(lambda_.rows()));
  }
  const double q = phi.dot(inverse_ * phi);
  return q > 0.0 ? q : 0.0;
}

RidgeSolution ridge_solve(const CovarianceAccumulator& cov,
                          std::span<const Eigen::VectorXd> features,
                          std::span<const double> targets) {
  if (features.size() != targets.size()) {
    throw InvalidInput("ridge_solve got " + std::to_string(features.size()) +
                       " features but " + std::to_string(targets.size()) +
                       " targets");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(cov.dim());
  for (std::size_t t = 0; t < features.size(); ++t) {
    if (features[t].size() != cov.dim()) {
      throw DimensionMismatch("ridge feature " + std::to_string(t) +
                              " has size " + std::to_string(features[t].size()) +
                              ", accumulator is " + std::to_string(cov.dim()));
    }
    rhs.noalias() += features[t] * targets[t];
  }
  RidgeSolution out;
  out.weights = cov.inverse() * rhs;
  out.design_serial = cov.serial();
  out.design_count = cov.count();
  return out;
}

}  // namespace rflin
