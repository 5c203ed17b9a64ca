#pragma once

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddmp/adam.hpp"
#include "ddmp/checkpoint.hpp"
#include "ddmp/data.hpp"
#include "ddmp/diffusion.hpp"
#include "ddmp/disambig.hpp"
#include "ddmp/matrix.hpp"
#include "ddmp/net.hpp"
#include "ddmp/rng.hpp"

namespace ddmp {

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch = 256;
  int timesteps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  int trajectory = 10;
  std::size_t knn = 10;
  double lambda = 0.05;  // inverse-transition regularization blend
  std::uint64_t seed = 0;
  bool use_complementarity = true;  // ablation flag I
  bool use_transition = true;       // ablation flag T
  bool one_hot_targets = false;
  std::size_t update_every = 1;  // S/T refinement cadence in epochs
  double lr = 1e-3;
  std::size_t hidden = 128;
  std::size_t temb = 64;
  std::size_t encoder_hidden = 128;
  std::size_t encoder_epochs = 50;
  std::size_t n_draws = 10;

  void validate() const {
    if (epochs == 0 || batch == 0 || timesteps < 1 || trajectory < 1 || knn == 0 ||
        update_every == 0 || hidden == 0 || temb == 0 || encoder_hidden == 0 ||
        n_draws == 0 || lr <= 0.0)
      throw std::invalid_argument("TrainConfig: all sizes must be positive");
    if (lambda < 0.0 || lambda > 1.0)
      throw std::invalid_argument("TrainConfig: lambda must be in [0, 1]");
  }
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_acc = -1.0;  // -1 when ground truth is unavailable
  double t_drift = 0.0;     // max abs change of the transition matrix
  double wall_time = 0.0;   // seconds
};

// Pre-trains the prior classifier f_phi on uniform-over-candidate targets.
inline PriorNet pretrain_encoder(const PartialDataset& data, const TrainConfig& cfg,
                                 std::vector<double>* loss_log = nullptr) {
  cfg.validate();
  Rng rng(cfg.seed, 0x656e63);
  PriorNet net(data.dim(), data.classes(), cfg.encoder_hidden, rng);
  Adam opt(cfg.lr);
  Matrix targets = data.candidates;
  mask_and_normalize_rows(targets, data.candidates);  // uniform over candidates
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), 0);
  const ParamRefs params = net.params();
  for (std::size_t epoch = 0; epoch < cfg.encoder_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < data.n(); start += cfg.batch) {
      const std::size_t end = std::min(start + cfg.batch, data.n());
      Matrix xb(end - start, data.dim()), tb(end - start, data.classes());
      for (std::size_t r = start; r < end; ++r) {
        for (std::size_t c = 0; c < data.dim(); ++c) xb(r - start, c) = data.X(order[r], c);
        for (std::size_t c = 0; c < data.classes(); ++c)
          tb(r - start, c) = targets(order[r], c);
      }
      zero_grads(params);
      const double loss = net.loss_and_grad(xb, tb);
      if (!std::isfinite(loss))
        throw std::runtime_error("pretrain_encoder: non-finite loss, diverged");
      opt.step(params);
      epoch_loss += loss;
      ++batches;
    }
    if (loss_log) loss_log->push_back(epoch_loss / batches);
  }
  return net;
}

struct TrainResult {
  NoiseNet model;
  LabelState state;
  std::vector<EpochLog> log;
};

inline NoisePredictor wrap_model(const NoiseNet& net) {
  return [&net](const Matrix& st, const Matrix& x, const Matrix& prior, int t) {
    return net.predict(st, x, prior, t);
  };
}

// Denoise every instance once (single reverse draw, shared trajectory).
inline Matrix denoise_all(const NoiseNet& model, const Matrix& x, const Matrix& prior,
                          const DiffusionSchedule& sched, const std::vector<int>& traj,
                          Rng& rng) {
  const std::size_t n = x.rows(), q = prior.cols();
  Matrix out(n, q);
  const NoisePredictor pred = wrap_model(model);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix xi(1, x.cols()), pi(1, q);
    for (std::size_t c = 0; c < x.cols(); ++c) xi[c] = x(i, c);
    for (std::size_t c = 0; c < q; ++c) pi[c] = prior(i, c);
    Rng sub = rng.substream(i);
    const Matrix s0 = sample_reverse(pred, xi, pi, sched, traj, sub);
    for (std::size_t c = 0; c < q; ++c) out(i, c) = s0[c];
  }
  return out;
}

// Algorithm: per epoch run minibatch denoising-loss steps over all
// instances, then denoise every instance, re-estimate the transition
// matrix, and refine the pseudo-clean labels.
inline TrainResult train(const PartialDataset& data, const PriorNet& encoder,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (encoder.classes() != data.classes() || encoder.dim() != data.dim())
    throw std::invalid_argument("train: encoder shape does not match dataset");
  const DiffusionSchedule sched = make_schedule(cfg.timesteps, cfg.beta_start, cfg.beta_end);
  const std::vector<int> traj = make_trajectory(sched, cfg.trajectory);
  Rng rng(cfg.seed, 0x747261696e);

  const Matrix prior = encoder.forward(data.X);

  LabelState state;
  state.epoch = 1;
  if (cfg.use_complementarity) {
    const Matrix p = knn_adjacency(data.X, std::min(cfg.knn, data.n() - 1));
    const Matrix j = jaccard_matrix(data.candidates);
    state.S = init_pseudo_clean(p, j, data.candidates);
  } else {
    state.S = data.candidates;
    mask_and_normalize_rows(state.S, data.candidates);
  }
  state.T_mat = Matrix::identity(data.classes());
  state.S0_tilde = state.S;

  TrainResult result{NoiseNet(NetConfig{data.classes(), data.dim(), cfg.hidden, cfg.temb}, rng),
                     LabelState{}, {}};
  Adam opt(cfg.lr);
  const ParamRefs params = result.model.params();
  std::vector<std::size_t> order(data.n());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    rng.shuffle(order);
    double epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < data.n(); start += cfg.batch) {
      const std::size_t end = std::min(start + cfg.batch, data.n());
      const std::size_t b = end - start;
      Matrix xb(b, data.dim()), s0b(b, data.classes()), pb(b, data.classes());
      for (std::size_t r = 0; r < b; ++r) {
        const std::size_t i = order[start + r];
        for (std::size_t c = 0; c < data.dim(); ++c) xb(r, c) = data.X(i, c);
        for (std::size_t c = 0; c < data.classes(); ++c) {
          pb(r, c) = prior(i, c);
          s0b(r, c) = state.S(i, c);
        }
        if (cfg.one_hot_targets) {
          std::size_t arg = 0;
          for (std::size_t c = 1; c < data.classes(); ++c)
            if (s0b(r, c) > s0b(r, arg)) arg = c;
          for (std::size_t c = 0; c < data.classes(); ++c) s0b(r, c) = c == arg ? 1.0 : 0.0;
        }
      }
      zero_grads(params);
      const double loss = diffusion_loss(result.model, xb, s0b, pb, sched, rng);
      if (!std::isfinite(loss)) throw std::runtime_error("train: non-finite loss, aborting");
      opt.step(params);
      epoch_loss += loss;
      ++batches;
    }

    EpochLog log;
    log.epoch = epoch;
    log.loss = epoch_loss / batches;
    if (epoch % cfg.update_every == 0) {
      Rng sample_rng = rng.substream(1000 + epoch);
      const Matrix s0_tilde = denoise_all(result.model, data.X, prior, sched, traj, sample_rng);
      const Matrix t_prev = state.T_mat;
      state.T_mat = cfg.use_transition ? estimate_transition(state.S, data.candidates)
                                       : Matrix::identity(data.classes());
      for (std::size_t k = 0; k < t_prev.size(); ++k)
        log.t_drift = std::max(log.t_drift, std::fabs(state.T_mat[k] - t_prev[k]));
      state = update_pseudo_clean(state, s0_tilde, data.candidates, cfg.lambda);
    }
    if (data.has_truth()) {
      std::size_t hits = 0;
      for (std::size_t i = 0; i < data.n(); ++i) {
        std::size_t arg = 0;
        for (std::size_t c = 1; c < data.classes(); ++c)
          if (state.S(i, c) > state.S(i, arg)) arg = c;
        if (static_cast<int>(arg) == data.truth[i]) ++hits;
      }
      log.train_acc = static_cast<double>(hits) / data.n();
    }
    log.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    result.log.push_back(log);
  }
  result.state = state;
  return result;
}

struct InferResult {
  Matrix probs;                 // N x Q probability rows
  std::vector<int> predictions;  // argmax, ties to the lowest class index
};

// Averages n_draws reverse samples per instance, keeps the nonnegative part
// and renormalizes to a probability row.
inline InferResult infer_labels(const NoiseNet& model, const PriorNet& encoder,
                                const Matrix& x, const TrainConfig& cfg,
                                std::size_t n_draws, Rng& rng) {
  if (n_draws == 0) throw std::invalid_argument("infer_labels: n_draws must be positive");
  const DiffusionSchedule sched = make_schedule(cfg.timesteps, cfg.beta_start, cfg.beta_end);
  const std::vector<int> traj = make_trajectory(sched, cfg.trajectory);
  const std::size_t n = x.rows(), q = encoder.classes();
  const NoisePredictor pred = wrap_model(model);
  InferResult res;
  res.probs = Matrix(n, q);
  res.predictions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Matrix xi(1, x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) xi[c] = x(i, c);
    const Matrix pi = encoder.forward(xi);
    Matrix acc(1, q);
    for (std::size_t dr = 0; dr < n_draws; ++dr) {
      Rng sub = rng.substream(i * 1315423911ull + dr);
      acc += sample_reverse(pred, xi, pi, sched, traj, sub);
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < q; ++c) {
      if (acc[c] < 0.0) acc[c] = 0.0;
      sum += acc[c];
    }
    for (std::size_t c = 0; c < q; ++c)
      res.probs(i, c) = sum > 0.0 ? acc[c] / sum : 1.0 / q;
    std::size_t arg = 0;
    for (std::size_t c = 1; c < q; ++c)
      if (res.probs(i, c) > res.probs(i, arg)) arg = c;
    res.predictions[i] = static_cast<int>(arg);
  }
  return res;
}

// ---------------------------------------------------------------------------
// Model bundle checkpointing (encoder + noise model + shape/config metadata)
// ---------------------------------------------------------------------------

inline void save_model_bundle(const std::string& path, NoiseNet& model, PriorNet& encoder,
                              const TrainConfig& cfg) {
  Checkpoint ck;
  ck.put_params("", model.params());
  ck.put_params("", model.buffers());
  ck.put_params("", encoder.params());
  const NetConfig& nc = model.config();
  Matrix meta(1, 10);
  meta[0] = static_cast<double>(nc.classes);
  meta[1] = static_cast<double>(nc.dim);
  meta[2] = static_cast<double>(nc.hidden);
  meta[3] = static_cast<double>(nc.temb);
  meta[4] = static_cast<double>(cfg.timesteps);
  meta[5] = cfg.beta_start;
  meta[6] = cfg.beta_end;
  meta[7] = static_cast<double>(cfg.trajectory);
  meta[8] = static_cast<double>(encoder.hidden());
  meta[9] = static_cast<double>(cfg.seed);
  ck.put("meta", meta);
  ck.save(path);
}

struct ModelBundle {
  NoiseNet model;
  PriorNet encoder;
  TrainConfig cfg;
};

inline void save_encoder(const std::string& path, PriorNet& encoder) {
  Checkpoint ck;
  ck.put_params("", encoder.params());
  Matrix meta(1, 3);
  meta[0] = static_cast<double>(encoder.dim());
  meta[1] = static_cast<double>(encoder.classes());
  meta[2] = static_cast<double>(encoder.hidden());
  ck.put("meta_encoder", meta);
  ck.save(path);
}

inline PriorNet load_encoder(const std::string& path) {
  const Checkpoint ck = Checkpoint::load(path);
  const Matrix& meta = ck.get("meta_encoder");
  Rng rng(0);
  PriorNet net(static_cast<std::size_t>(meta[0]), static_cast<std::size_t>(meta[1]),
               static_cast<std::size_t>(meta[2]), rng);
  ck.load_params("", net.params());
  return net;
}

inline ModelBundle load_model_bundle(const std::string& path) {
  const Checkpoint ck = Checkpoint::load(path);
  const Matrix& meta = ck.get("meta");
  if (meta.size() < 10) throw std::runtime_error("model bundle: bad meta tensor");
  NetConfig nc;
  nc.classes = static_cast<std::size_t>(meta[0]);
  nc.dim = static_cast<std::size_t>(meta[1]);
  nc.hidden = static_cast<std::size_t>(meta[2]);
  nc.temb = static_cast<std::size_t>(meta[3]);
  TrainConfig cfg;
  cfg.timesteps = static_cast<int>(meta[4]);
  cfg.beta_start = meta[5];
  cfg.beta_end = meta[6];
  cfg.trajectory = static_cast<int>(meta[7]);
  cfg.hidden = nc.hidden;
  cfg.temb = nc.temb;
  cfg.encoder_hidden = static_cast<std::size_t>(meta[8]);
  cfg.seed = static_cast<std::uint64_t>(meta[9]);
  Rng rng(0);
  ModelBundle b{NoiseNet(nc, rng), PriorNet(nc.dim, nc.classes, cfg.encoder_hidden, rng), cfg};
  ck.load_params("", b.model.params());
  ck.load_params("", b.model.buffers());
  ck.load_params("", b.encoder.params());
  return b;
}

}  // namespace ddmp
