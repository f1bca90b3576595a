#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "rflin/linalg.hpp"
#include "rflin/rng.hpp"

using namespace rflin;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Reference implementation used to check the maintained-inverse path: build
// Lambda = I + sum phi phi^T explicitly and solve with a full-pivot LU. Slow
// and allocation-heavy, but has no incremental state to go wrong.
double quadratic_form_reference(const std::vector<VectorXd>& updates,
                                const VectorXd& phi) {
  const int d = static_cast<int>(phi.size());
  MatrixXd lambda = MatrixXd::Identity(d, d);
  for (const VectorXd& u : updates) lambda += u * u.transpose();
  return phi.dot(lambda.fullPivLu().solve(phi));
}

VectorXd ridge_reference(const std::vector<VectorXd>& updates,
                         const std::vector<double>& targets) {
  const int d = static_cast<int>(updates.front().size());
  MatrixXd lambda = MatrixXd::Identity(d, d);
  VectorXd rhs = VectorXd::Zero(d);
  for (size_t i = 0; i < updates.size(); ++i) {
    lambda += updates[i] * updates[i].transpose();
    rhs += updates[i] * targets[i];
  }
  return lambda.fullPivLu().solve(rhs);
}

VectorXd random_unit(int d, RngStream& rng) {
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.gaussian();
  const double n = v.norm();
  if (n < 1e-12) return VectorXd::Unit(d, 0);
  // Random length in (0, 1] so not every vector is exactly on the unit sphere.
  return v / n * (0.25 + 0.75 * rng.uniform());
}

}  // namespace

TEST_CASE("fresh accumulator is the identity") {
  CovarianceAccumulator cov(3);
  CHECK(cov.count() == 0);
  CHECK(cov.matrix().isApprox(MatrixXd::Identity(3, 3)));
  CHECK(cov.inverse().isApprox(MatrixXd::Identity(3, 3)));
}

TEST_CASE("identity design gives quadratic form equal to squared norm") {
  CovarianceAccumulator cov(2);
  VectorXd phi(2);
  phi << 0.6, 0.8;
  // No updates yet, Lambda = I, so the form is phi.phi = 1 for a unit vector.
  CHECK(cov.quadratic_form(phi) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("one-dimensional singleton") {
  CovarianceAccumulator cov(1);
  VectorXd one(1);
  one << 1.0;
  CHECK(cov.quadratic_form(one) == doctest::Approx(1.0).epsilon(1e-12));
  cov.update(one);
  // Lambda = 2, so the form halves.
  CHECK(cov.quadratic_form(one) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("single basis update halves the form along that axis only") {
  CovarianceAccumulator cov(2);
  const VectorXd e1 = VectorXd::Unit(2, 0);
  const VectorXd e2 = VectorXd::Unit(2, 1);
  cov.update(e1);
  CHECK(cov.count() == 1);
  CHECK(cov.quadratic_form(e1) == doctest::Approx(0.5).epsilon(1e-12));
  // Orthogonal direction is untouched.
  CHECK(cov.quadratic_form(e2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("repeated direction decays as 1/(1+n)") {
  CovarianceAccumulator cov(4);
  const VectorXd e1 = VectorXd::Unit(4, 0);
  for (int n = 1; n <= 3; ++n) {
    cov.update(e1);
    CHECK(cov.quadratic_form(e1) ==
          doctest::Approx(1.0 / (1.0 + n)).epsilon(1e-12));
  }
  CHECK(cov.quadratic_form(e1) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("zero vector updates count but not the matrix") {
  CovarianceAccumulator cov(2);
  cov.update(VectorXd::Zero(2));
  CHECK(cov.count() == 1);
  CHECK(cov.matrix().isApprox(MatrixXd::Identity(2, 2)));
}

TEST_CASE("dimension and norm violations are rejected") {
  CHECK_THROWS_AS(CovarianceAccumulator(0), DimensionMismatch);
  CovarianceAccumulator cov(3);
  CHECK_THROWS_AS(cov.update(VectorXd::Zero(2)), DimensionMismatch);
  CHECK_THROWS_AS(cov.quadratic_form(VectorXd::Zero(4)), DimensionMismatch);
  VectorXd big = VectorXd::Zero(3);
  big[0] = 1.0 + 1e-6;
  CHECK_THROWS_AS(cov.update(big), NormViolation);
  // Norms within the documented slack are fine.
  VectorXd edge = VectorXd::Zero(3);
  edge[0] = 1.0 + 1e-10;
  CHECK_NOTHROW(cov.update(edge));
}

TEST_CASE("maintained inverse tracks the reference across refactor boundaries") {
  RngStream rng(101);
  const int d = 6;
  CovarianceAccumulator cov(d);
  std::vector<VectorXd> updates;
  // Long enough to cross the periodic refactorization at least twice.
  const int total = 2 * CovarianceAccumulator::kRefactorInterval + 57;
  for (int t = 0; t < total; ++t) {
    const VectorXd phi = random_unit(d, rng);
    cov.update(phi);
    updates.push_back(phi);
    if (t % 97 == 0 || t == total - 1) {
      const VectorXd probe = random_unit(d, rng);
      const double got = cov.quadratic_form(probe);
      const double want = quadratic_form_reference(updates, probe);
      CHECK(got == doctest::Approx(want).epsilon(1e-8));
    }
  }
}

TEST_CASE("quadratic form is never negative") {
  RngStream rng(102);
  CovarianceAccumulator cov(5);
  for (int t = 0; t < 400; ++t) {
    cov.update(random_unit(5, rng));
    CHECK(cov.quadratic_form(random_unit(5, rng)) >= 0.0);
  }
}

TEST_CASE("adding data never increases the quadratic form") {
  RngStream rng(103);
  const int d = 4;
  CovarianceAccumulator small(d), large(d);
  std::vector<VectorXd> shared;
  for (int t = 0; t < 40; ++t) shared.push_back(random_unit(d, rng));
  for (const VectorXd& phi : shared) {
    small.update(phi);
    large.update(phi);
  }
  // `large` absorbs extra mass on top of the shared prefix.
  for (int t = 0; t < 25; ++t) large.update(random_unit(d, rng));
  for (int t = 0; t < 30; ++t) {
    const VectorXd probe = random_unit(d, rng);
    CHECK(large.quadratic_form(probe) <=
          small.quadratic_form(probe) + 1e-9);
  }
}

TEST_CASE("summed quadratic forms respect the elliptical potential bound") {
  RngStream rng(104);
  const int d = 8;
  const int steps = 10000;
  CovarianceAccumulator cov(d);
  double total = 0.0;
  for (int t = 0; t < steps; ++t) {
    VectorXd phi = random_unit(d, rng);
    // Evaluate before inserting, matching the regret-analysis ordering.
    total += cov.quadratic_form(phi);
    cov.update(phi);
  }
  CHECK(total <= 2.0 * d * std::log(static_cast<double>(steps) + 1.0));
}

TEST_CASE("ridge with no data returns the zero vector") {
  CovarianceAccumulator cov(3);
  const RidgeSolution sol = ridge_solve(cov, {}, {});
  CHECK(sol.weights.size() == 3);
  CHECK(sol.weights.norm() == doctest::Approx(0.0));
  CHECK(sol.design_count == 0);
}

TEST_CASE("scalar ridge shrinks toward zero") {
  CovarianceAccumulator cov(1);
  VectorXd one(1);
  one << 1.0;
  cov.update(one);
  std::vector<VectorXd> xs = {one};
  std::vector<double> ys = {3.0};
  const RidgeSolution sol = ridge_solve(cov, xs, ys);
  // Lambda = 2, rhs = 3, so w = 1.5 rather than the unregularized 3.
  CHECK(sol.weights[0] == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(sol.design_count == 1);
  CHECK(sol.design_serial == cov.serial());
}

TEST_CASE("orthogonal designs solve coordinatewise") {
  CovarianceAccumulator cov(2);
  const VectorXd e1 = VectorXd::Unit(2, 0);
  const VectorXd e2 = VectorXd::Unit(2, 1);
  cov.update(e1);
  cov.update(e2);
  std::vector<VectorXd> xs = {e1, e2};
  std::vector<double> ys = {1.0, 1.0};
  const RidgeSolution sol = ridge_solve(cov, xs, ys);
  CHECK(sol.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.weights[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("ridge matches the full-matrix reference on random data") {
  RngStream rng(105);
  const int d = 5;
  CovarianceAccumulator cov(d);
  std::vector<VectorXd> xs;
  std::vector<double> ys;
  for (int t = 0; t < 300; ++t) {
    xs.push_back(random_unit(d, rng));
    ys.push_back(rng.uniform(-2.0, 2.0));
    cov.update(xs.back());
  }
  const RidgeSolution sol = ridge_solve(cov, xs, ys);
  const VectorXd want = ridge_reference(xs, ys);
  CHECK((sol.weights - want).norm() <= 1e-8 * (1.0 + want.norm()));
}

TEST_CASE("ridge input validation") {
  CovarianceAccumulator cov(2);
  const VectorXd e1 = VectorXd::Unit(2, 0);
  cov.update(e1);
  std::vector<VectorXd> xs = {e1};
  std::vector<double> ys = {1.0, 2.0};
  CHECK_THROWS_AS(ridge_solve(cov, xs, ys), InvalidInput);
  std::vector<VectorXd> wrong_dim = {VectorXd::Zero(3)};
  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(ridge_solve(cov, wrong_dim, one), DimensionMismatch);
}
