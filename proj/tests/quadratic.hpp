#pragma once

// Quadratic test objective shared by the optimizer tests and the acceptance run.

#include <cmath>
#include <span>
#include <utility>

#include <Eigen/Dense>

#include "rrmesh/optimize.hpp"
#include "support.hpp"

namespace test_support {

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// f(x) = x'Ax/2 - b'x with an optional H0 = M^{-1}.
class Quadratic : public rrmesh::Objective {
 public:
  Quadratic(Eigen::MatrixXd a, Eigen::VectorXd b) : a_(std::move(a)), b_(std::move(b)) {}
  std::size_t dimension() const override { return b_.size(); }
  double evaluate(std::span<const double> x, std::span<double> g) override {
    const Eigen::VectorXd xv = to_eigen(x);
    const Eigen::VectorXd gv = a_ * xv - b_;
    std::copy(gv.data(), gv.data() + gv.size(), g.begin());
    return 0.5 * xv.dot(a_ * xv) - b_.dot(xv);
  }
  void set_preconditioner(Eigen::MatrixXd m) { m_ = std::move(m); }
  bool has_preconditioner() const override { return m_.size() > 0; }
  void apply_preconditioner(std::span<const double> q, std::span<double> r) override {
    const Eigen::VectorXd rv = m_.ldlt().solve(to_eigen(q));
    std::copy(rv.data(), rv.data() + rv.size(), r.begin());
  }
  Eigen::VectorXd minimiser() const { return a_.ldlt().solve(b_); }
  const Eigen::MatrixXd& matrix() const { return a_; }

 private:
  Eigen::MatrixXd a_, m_;
  Eigen::VectorXd b_;
};

// Random SPD quadratic with eigenvalues spread geometrically over [1, spread].
inline Quadratic random_quadratic(Rng& rng, int n, double spread) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) q(i, j) = rng.uniform(-1, 1);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
  const Eigen::MatrixXd orth = qr.householderQ();
  Eigen::VectorXd eig(n);
  for (int i = 0; i < n; ++i) eig(i) = std::pow(spread, static_cast<double>(i) / (n - 1));
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b(i) = rng.uniform(-1, 1);
  return Quadratic(orth * eig.asDiagonal() * orth.transpose(), b);
}

}  // namespace test_support
