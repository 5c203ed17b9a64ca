#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace ddmp {

// Variance schedule and derived quantities, indexed by timestep t = 1..T
// (stored at t-1). alpha_bar(0) is defined as 1.
struct DiffusionSchedule {
  int T = 0;
  std::vector<double> beta;
  std::vector<double> alpha;
  std::vector<double> alpha_bar;
  std::vector<double> beta_tilde;

  double alpha_bar_at(int t) const {  // t in 0..T
    if (t < 0 || t > T) throw std::out_of_range("alpha_bar_at: t out of range");
    return t == 0 ? 1.0 : alpha_bar[t - 1];
  }
  double beta_at(int t) const {
    if (t < 1 || t > T) throw std::out_of_range("beta_at: t out of range");
    return beta[t - 1];
  }
  double alpha_at(int t) const {
    if (t < 1 || t > T) throw std::out_of_range("alpha_at: t out of range");
    return alpha[t - 1];
  }
  double beta_tilde_at(int t) const {
    if (t < 1 || t > T) throw std::out_of_range("beta_tilde_at: t out of range");
    return beta_tilde[t - 1];
  }
};

// Linear beta interpolation between beta_start and beta_end.
inline DiffusionSchedule make_schedule(int T, double beta_start, double beta_end) {
  if (T < 1) throw std::invalid_argument("make_schedule: T must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw std::invalid_argument("make_schedule: need 0 < beta_start <= beta_end < 1");
  DiffusionSchedule s;
  s.T = T;
  s.beta.resize(T);
  s.alpha.resize(T);
  s.alpha_bar.resize(T);
  s.beta_tilde.resize(T);
  double prod = 1.0;
  for (int i = 0; i < T; ++i) {
    const double frac = T == 1 ? 0.0 : static_cast<double>(i) / (T - 1);
    const double prev_bar = prod;  // alpha_bar_{t-1}, with alpha_bar_0 = 1
    s.beta[i] = beta_start + frac * (beta_end - beta_start);
    s.alpha[i] = 1.0 - s.beta[i];
    prod *= s.alpha[i];
    s.alpha_bar[i] = prod;
    s.beta_tilde[i] = (1.0 - prev_bar) / (1.0 - s.alpha_bar[i]) * s.beta[i];
  }
  return s;
}

// Evenly spaced descending timestep subsequence of 1..T, always ending at 1.
inline std::vector<int> make_trajectory(const DiffusionSchedule& sched, int length) {
  if (length < 1) throw std::invalid_argument("make_trajectory: length must be >= 1");
  if (length > sched.T) length = sched.T;
  std::vector<int> traj(length);
  for (int i = 0; i < length; ++i) {
    // length points from T down to 1 inclusive
    const double f = length == 1 ? 0.0 : static_cast<double>(i) / (length - 1);
    traj[i] = static_cast<int>(std::lround(sched.T - f * (sched.T - 1)));
  }
  traj.back() = 1;
  for (std::size_t i = 1; i < traj.size(); ++i)
    if (traj[i] >= traj[i - 1]) traj[i] = traj[i - 1] - 1;
  return traj;
}

}  // namespace ddmp
