#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace imin {

/// First/second-moment adaptive gradient steps (Adam).
class Adam {
 public:
  explicit Adam(Eigen::Index size, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad, double lr) {
    ++t_;
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseAbs2();
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    params.array() -= lr * (m_.array() / c1) / ((v_.array() / c2).sqrt() + eps_);
  }

  void reset() {
    m_.setZero();
    v_.setZero();
    t_ = 0;
  }

 private:
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  double beta1_;
  double beta2_;
  double eps_;
  std::uint64_t t_ = 0;
};

}  // namespace imin
