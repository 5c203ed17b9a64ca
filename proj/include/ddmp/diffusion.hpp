#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ddmp/matrix.hpp"
#include "ddmp/net.hpp"
#include "ddmp/rng.hpp"
#include "ddmp/schedule.hpp"

namespace ddmp {

// A noise predictor queried during reverse sampling. Tests inject stubs and
// call counters through the same signature.
using NoisePredictor =
    std::function<Matrix(const Matrix& st, const Matrix& x, const Matrix& prior, int t)>;

// Closed-form forward draw:
//   S_t = sqrt(abar_t) s0 + (1 - sqrt(abar_t)) prior + sqrt(1 - abar_t) noise
inline Matrix forward_sample(const Matrix& s0, const Matrix& prior, int t,
                             const Matrix& noise, const DiffusionSchedule& sched) {
  if (t < 1 || t > sched.T) throw std::out_of_range("forward_sample: t out of range");
  if (!s0.same_shape(prior) || !s0.same_shape(noise))
    throw std::invalid_argument("forward_sample: shape mismatch");
  const double abar = sched.alpha_bar_at(t);
  const double sa = std::sqrt(abar);
  const double sn = std::sqrt(1.0 - abar);
  Matrix st = s0;
  for (std::size_t k = 0; k < st.size(); ++k)
    st[k] = sa * s0[k] + (1.0 - sa) * prior[k] + sn * noise[k];
  return st;
}

// One step of the one-step forward kernel; used by the moment-matching check
// of the closed form against the iterated chain.
inline Matrix forward_step(const Matrix& prev, const Matrix& prior, int t,
                           const Matrix& noise, const DiffusionSchedule& sched) {
  const double a = sched.alpha_at(t);
  const double sa = std::sqrt(a);
  const double sb = std::sqrt(sched.beta_at(t));
  Matrix st = prev;
  for (std::size_t k = 0; k < st.size(); ++k)
    st[k] = sa * prev[k] + (1.0 - sa) * prior[k] + sb * noise[k];
  return st;
}

// Inverts the closed forward form: exact when eps_hat is the true noise.
inline Matrix predict_s0(const Matrix& st, const Matrix& prior, const Matrix& eps_hat,
                         int t, const DiffusionSchedule& sched) {
  if (t < 1 || t > sched.T) throw std::out_of_range("predict_s0: t out of range");
  const double abar = sched.alpha_bar_at(t);
  if (abar <= 0.0) throw std::runtime_error("predict_s0: alpha_bar is not positive");
  const double sa = std::sqrt(abar);
  const double sn = std::sqrt(1.0 - abar);
  Matrix s0 = st;
  for (std::size_t k = 0; k < s0.size(); ++k)
    s0[k] = (st[k] - (1.0 - sa) * prior[k] - sn * eps_hat[k]) / sa;
  return s0;
}

struct PosteriorCoeffs {
  double g0, g1, g2;  // weights of s0_hat, s_t, prior; sum to 1
  double var;         // beta_tilde
};

// Coefficients of q(S_{t-1} | S_t, S_0, prior) for the generalized pair
// (t, t_prev): abar_t and abar_prev are cumulative products at the two
// trajectory points (t_prev = t-1 reproduces the single-step posterior).
inline PosteriorCoeffs posterior_coeffs(double abar_t, double abar_prev) {
  const double a_eff = abar_t / abar_prev;
  const double b_eff = 1.0 - a_eff;
  const double denom = 1.0 - abar_t;
  PosteriorCoeffs c;
  c.g0 = b_eff * std::sqrt(abar_prev) / denom;
  c.g1 = (1.0 - abar_prev) * std::sqrt(a_eff) / denom;
  c.g2 = 1.0 + (std::sqrt(abar_t) - 1.0) * (std::sqrt(a_eff) + std::sqrt(abar_prev)) / denom;
  c.var = (1.0 - abar_prev) / denom * b_eff;
  return c;
}

// One reverse transition from t to t-1.
inline Matrix posterior_step(const Matrix& st, const Matrix& s0_hat, const Matrix& prior,
                             int t, const DiffusionSchedule& sched, const Matrix& noise) {
  if (t < 1 || t > sched.T) throw std::out_of_range("posterior_step: t out of range");
  const PosteriorCoeffs c =
      posterior_coeffs(sched.alpha_bar_at(t), sched.alpha_bar_at(t - 1));
  const double sd = std::sqrt(std::max(c.var, 0.0));
  Matrix prev = st;
  for (std::size_t k = 0; k < prev.size(); ++k)
    prev[k] = c.g0 * s0_hat[k] + c.g1 * st[k] + c.g2 * prior[k] + sd * noise[k];
  return prev;
}

struct SampleOptions {
  double clamp_lo = -1.0;  // S0 estimate clamp during the trajectory
  double clamp_hi = 2.0;
};

// Accelerated reverse sampling over a strictly decreasing timestep
// subsequence ending at 1. Exactly trajectory.size() predictor calls.
inline Matrix sample_reverse(const NoisePredictor& model, const Matrix& x,
                             const Matrix& prior, const DiffusionSchedule& sched,
                             const std::vector<int>& trajectory, Rng& rng,
                             const SampleOptions& opts = {}) {
  if (trajectory.empty()) throw std::invalid_argument("sample_reverse: empty trajectory");
  if (trajectory.back() != 1)
    throw std::invalid_argument("sample_reverse: trajectory must end at 1");
  for (std::size_t i = 1; i < trajectory.size(); ++i)
    if (trajectory[i] >= trajectory[i - 1])
      throw std::invalid_argument("sample_reverse: trajectory must be strictly decreasing");

  Matrix st = prior;
  for (std::size_t k = 0; k < st.size(); ++k) st[k] += rng.gaussian();  // S_T ~ N(prior, I)

  Matrix s0_hat;
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const int t = trajectory[i];
    const Matrix eps_hat = model(st, x, prior, t);
    s0_hat = predict_s0(st, prior, eps_hat, t, sched);
    for (std::size_t k = 0; k < s0_hat.size(); ++k)
      s0_hat[k] = std::min(std::max(s0_hat[k], opts.clamp_lo), opts.clamp_hi);
    const int t_prev = (i + 1 < trajectory.size()) ? trajectory[i + 1] : 0;
    const PosteriorCoeffs c =
        posterior_coeffs(sched.alpha_bar_at(t), sched.alpha_bar_at(t_prev));
    const double sd = (t_prev == 0) ? 0.0 : std::sqrt(std::max(c.var, 0.0));
    Matrix next = st;
    for (std::size_t k = 0; k < st.size(); ++k)
      next[k] = c.g0 * s0_hat[k] + c.g1 * st[k] + c.g2 * prior[k] +
                (sd > 0.0 ? sd * rng.gaussian() : 0.0);
    st = std::move(next);
  }
  return st;
}

struct NoisedBatch {
  Matrix st, eps;
  std::vector<int> ts;
};

// Per item draw t ~ U{1..T} and eps ~ N(0, I), then noise the target labels
// through the closed forward form.
inline NoisedBatch sample_noised_batch(const Matrix& s0, const Matrix& prior,
                                       const DiffusionSchedule& sched, Rng& rng) {
  const std::size_t b = s0.rows(), q = s0.cols();
  if (b == 0) throw std::invalid_argument("sample_noised_batch: empty batch");
  NoisedBatch nb{Matrix(b, q), Matrix(b, q), std::vector<int>(b)};
  for (std::size_t i = 0; i < b; ++i) {
    nb.ts[i] = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(sched.T)));
    const double abar = sched.alpha_bar_at(nb.ts[i]);
    const double sa = std::sqrt(abar), sn = std::sqrt(1.0 - abar);
    for (std::size_t c = 0; c < q; ++c) {
      const double e = rng.gaussian();
      nb.eps(i, c) = e;
      nb.st(i, c) = sa * s0(i, c) + (1.0 - sa) * prior(i, c) + sn * e;
    }
  }
  return nb;
}

// Denoising objective: regress the predicted noise on the drawn noise,
// averaged over the batch, with gradients.
inline double diffusion_loss(NoiseNet& model, const Matrix& x, const Matrix& s0,
                             const Matrix& prior, const DiffusionSchedule& sched, Rng& rng) {
  const NoisedBatch nb = sample_noised_batch(s0, prior, sched, rng);
  return model.loss_and_grad(NoiseNet::Batch{nb.st, x, prior, nb.ts}, nb.eps);
}

}  // namespace ddmp
