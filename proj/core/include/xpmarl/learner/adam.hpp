#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace xpmarl {

class Adam {
 public:
  Adam(Eigen::Index size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-5);

  void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

  double learning_rate() const { return lr_; }
  std::int64_t steps() const { return t_; }
  const Eigen::VectorXd& first_moment() const { return m_; }
  const Eigen::VectorXd& second_moment() const { return v_; }
  void restore(std::int64_t steps, Eigen::VectorXd m, Eigen::VectorXd v);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::int64_t t_ = 0;
  Eigen::VectorXd m_, v_;
};

/// Scales `grad` so that its norm is at most `max_norm`; returns the original norm.
double clip_grad_norm(Eigen::VectorXd& grad, double max_norm);

}  // namespace xpmarl
