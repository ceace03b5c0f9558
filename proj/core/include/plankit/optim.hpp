#pragma once

#include <Eigen/Core>
#include <cmath>

namespace plankit {

// One row of a training history: step index, loss, learning rate in effect.
struct LossPoint {
  int step = 0;
  double loss = 0.0;
  double lr = 0.0;
};

// Adam with bias correction; betas (0.9, 0.999), epsilon 1e-8.
class Adam {
 public:
  explicit Adam(Eigen::Index size)
      : m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad, double lr) {
    ++t_;
    m_ = kBeta1 * m_ + (1.0 - kBeta1) * grad;
    v_ = kBeta2 * v_ + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    double mc = 1.0 - std::pow(kBeta1, t_);
    double vc = 1.0 - std::pow(kBeta2, t_);
    params -= lr * (m_ / mc).cwiseQuotient(((v_ / vc).cwiseSqrt().array() + kEps).matrix());
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  Eigen::VectorXd m_, v_;
  int t_ = 0;
};

// Scale grad in place so its L2 norm is at most max_norm.
inline void clip_grad_norm(Eigen::VectorXd& grad, double max_norm) {
  double norm = grad.norm();
  if (norm > max_norm && norm > 0.0) grad *= max_norm / norm;
}

}  // namespace plankit
