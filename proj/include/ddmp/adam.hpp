#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ddmp/param.hpp"

namespace ddmp {

// Adam with bias correction. Moment buffers are allocated lazily from the
// parameter list on the first step and shape-checked afterwards.
class Adam {
 public:
  explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999,
                double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(const ParamRefs& params) {
    if (m_.empty()) {
      for (const Param* p : params) {
        m_.push_back(Matrix(p->value.rows(), p->value.cols()));
        v_.push_back(Matrix(p->value.rows(), p->value.cols()));
      }
    }
    if (m_.size() != params.size())
      throw std::invalid_argument("Adam: parameter list changed size");
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      Param& p = *params[i];
      if (!m_[i].same_shape(p.value))
        throw std::invalid_argument("Adam: gradient shape mismatch for " + p.name);
      for (std::size_t k = 0; k < p.value.size(); ++k) {
        const double g = p.grad[k];
        m_[i][k] = beta1_ * m_[i][k] + (1.0 - beta1_) * g;
        v_[i][k] = beta2_ * v_[i][k] + (1.0 - beta2_) * g * g;
        const double mhat = m_[i][k] / c1;
        const double vhat = v_[i][k] / c2;
        p.value[k] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
      }
    }
  }

  long step_count() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace ddmp
