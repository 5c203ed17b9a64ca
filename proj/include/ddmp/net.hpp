#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddmp/matrix.hpp"
#include "ddmp/param.hpp"
#include "ddmp/rng.hpp"

namespace ddmp {

// ---------------------------------------------------------------------------
// Elementwise pieces
// ---------------------------------------------------------------------------

inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }
inline double sigmoid(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline Matrix softplus(const Matrix& m) {
  Matrix r = m;
  for (std::size_t k = 0; k < r.size(); ++k) r[k] = softplus(r[k]);
  return r;
}

// Sinusoidal timestep embedding: entry 2i = sin(t / 10000^(2i/dim)),
// entry 2i+1 = cos of the same angle.
inline Matrix sinusoidal_embed(double t, std::size_t dim) {
  if (dim == 0 || dim % 2 != 0)
    throw std::invalid_argument("sinusoidal_embed: dim must be even and positive");
  if (t < 0) throw std::invalid_argument("sinusoidal_embed: t must be nonnegative");
  Matrix e(1, dim);
  for (std::size_t i = 0; 2 * i < dim; ++i) {
    const double freq = std::pow(10000.0, (2.0 * i) / static_cast<double>(dim));
    e[2 * i] = std::sin(t / freq);
    e[2 * i + 1] = std::cos(t / freq);
  }
  return e;
}

inline void softmax_rows_inplace(Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double* r = m.row(i);
    double mx = r[0];
    for (std::size_t j = 1; j < m.cols(); ++j) mx = std::max(mx, r[j]);
    double sum = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      r[j] = std::exp(r[j] - mx);
      sum += r[j];
    }
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] /= sum;
  }
}

// Scaled dot-product attention without projections: softmax(Q K^T / sqrt(h)) V.
inline Matrix cross_attention(const Matrix& queries, const Matrix& keys, const Matrix& values) {
  if (queries.cols() != keys.cols() || keys.rows() != values.rows())
    throw std::invalid_argument("cross_attention: dimension mismatch");
  Matrix logits = matmul_nt(queries, keys);
  logits *= 1.0 / std::sqrt(static_cast<double>(queries.cols()));
  softmax_rows_inplace(logits);
  return matmul(logits, values);
}

// ---------------------------------------------------------------------------
// Layers with manual backward passes
// ---------------------------------------------------------------------------

// Cross attention with learned query/key/value/output projections.
struct AttentionBlock {
  Param wq, wk, wv, wo;

  struct Cache {
    Matrix qin, kin;   // inputs
    Matrix qm, km, vm; // projected
    Matrix p;          // softmax weights
    Matrix o;          // p * vm
  };

  AttentionBlock() = default;
  AttentionBlock(const std::string& name, std::size_t h)
      : wq(name + ".wq", h, h), wk(name + ".wk", h, h), wv(name + ".wv", h, h),
        wo(name + ".wo", h, h) {}

  void init(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(wq.value.rows()));
    for (Param* p : {&wq, &wk, &wv, &wo})
      for (std::size_t k = 0; k < p->value.size(); ++k) p->value[k] = s * rng.gaussian();
  }

  Matrix forward(const Matrix& qin, const Matrix& kin, Cache& c) const {
    c.qin = qin;
    c.kin = kin;
    c.qm = matmul(qin, wq.value);
    c.km = matmul(kin, wk.value);
    c.vm = matmul(kin, wv.value);
    c.p = matmul_nt(c.qm, c.km);
    c.p *= 1.0 / std::sqrt(static_cast<double>(qin.cols()));
    softmax_rows_inplace(c.p);
    c.o = matmul(c.p, c.vm);
    return matmul(c.o, wo.value);
  }

  // Returns gradients with respect to the two inputs; accumulates into the
  // projection parameters.
  void backward(const Matrix& dout, const Cache& c, Matrix& dqin, Matrix& dkin) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(c.qin.cols()));
    Matrix dO = matmul_nt(dout, wo.value);
    wo.grad += matmul_tn(c.o, dout);
    Matrix dP = matmul_nt(dO, c.vm);
    Matrix dVm = matmul_tn(c.p, dO);
    // softmax rows backward
    Matrix dR(dP.rows(), dP.cols());
    for (std::size_t i = 0; i < dP.rows(); ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < dP.cols(); ++j) dot += dP(i, j) * c.p(i, j);
      for (std::size_t j = 0; j < dP.cols(); ++j)
        dR(i, j) = c.p(i, j) * (dP(i, j) - dot);
    }
    dR *= scale;
    Matrix dQm = matmul(dR, c.km);
    Matrix dKm = matmul_tn(dR, c.qm);
    wq.grad += matmul_tn(c.qin, dQm);
    wk.grad += matmul_tn(c.kin, dKm);
    wv.grad += matmul_tn(c.kin, dVm);
    dqin = matmul_nt(dQm, wq.value);
    dkin = matmul_nt(dKm, wk.value);
    dkin += matmul_nt(dVm, wv.value);
  }

  ParamRefs params() { return {&wq, &wk, &wv, &wo}; }
};

// Batch normalization over rows (per-feature statistics). Running statistics
// are updated only in training mode; inference is a fixed affine map.
struct BatchNorm {
  Param gamma, beta;
  Param run_mean, run_var;  // buffers, not optimized
  double eps = 1e-5;
  double momentum = 0.1;

  struct Cache {
    Matrix xhat;
    std::vector<double> inv_std;
  };

  BatchNorm() = default;
  BatchNorm(const std::string& name, std::size_t h)
      : gamma(name + ".gamma", 1, h), beta(name + ".beta", 1, h),
        run_mean(name + ".run_mean", 1, h), run_var(name + ".run_var", 1, h) {
    gamma.value.fill(1.0);
    run_var.value.fill(1.0);
  }

  Matrix forward(const Matrix& u, bool training, Cache& c) {
    const std::size_t m = u.rows(), h = u.cols();
    Matrix y(m, h);
    c.xhat = Matrix(m, h);
    c.inv_std.assign(h, 0.0);
    for (std::size_t j = 0; j < h; ++j) {
      double mu, var;
      if (training) {
        mu = 0.0;
        for (std::size_t i = 0; i < m; ++i) mu += u(i, j);
        mu /= static_cast<double>(m);
        var = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double d = u(i, j) - mu;
          var += d * d;
        }
        var /= static_cast<double>(m);
        run_mean.value[j] = (1.0 - momentum) * run_mean.value[j] + momentum * mu;
        run_var.value[j] = (1.0 - momentum) * run_var.value[j] + momentum * var;
      } else {
        mu = run_mean.value[j];
        var = run_var.value[j];
      }
      const double inv = 1.0 / std::sqrt(var + eps);
      c.inv_std[j] = inv;
      for (std::size_t i = 0; i < m; ++i) {
        const double xh = (u(i, j) - mu) * inv;
        c.xhat(i, j) = xh;
        y(i, j) = gamma.value[j] * xh + beta.value[j];
      }
    }
    return y;
  }

  // Training-mode backward (propagates through the batch statistics).
  Matrix backward(const Matrix& dy, const Cache& c) {
    const std::size_t m = dy.rows(), h = dy.cols();
    Matrix dx(m, h);
    for (std::size_t j = 0; j < h; ++j) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        sum_dy += dy(i, j);
        sum_dy_xhat += dy(i, j) * c.xhat(i, j);
      }
      gamma.grad[j] += sum_dy_xhat;
      beta.grad[j] += sum_dy;
      const double g = gamma.value[j] * c.inv_std[j] / static_cast<double>(m);
      for (std::size_t i = 0; i < m; ++i)
        dx(i, j) = g * (static_cast<double>(m) * dy(i, j) - sum_dy -
                        c.xhat(i, j) * sum_dy_xhat);
    }
    return dx;
  }

  ParamRefs params() { return {&gamma, &beta}; }
  ParamRefs buffers() { return {&run_mean, &run_var}; }
};

struct Linear {
  Param w, b;

  Linear() = default;
  Linear(const std::string& name, std::size_t in, std::size_t out)
      : w(name + ".w", in, out), b(name + ".b", 1, out) {}

  void init(Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(w.value.rows()));
    for (std::size_t k = 0; k < w.value.size(); ++k) w.value[k] = s * rng.gaussian();
  }

  Matrix forward(const Matrix& x) const {
    Matrix y = matmul(x, w.value);
    for (std::size_t i = 0; i < y.rows(); ++i)
      for (std::size_t j = 0; j < y.cols(); ++j) y(i, j) += b.value[j];
    return y;
  }

  // Accumulates parameter gradients, returns dx.
  Matrix backward(const Matrix& x, const Matrix& dy) {
    w.grad += matmul_tn(x, dy);
    for (std::size_t i = 0; i < dy.rows(); ++i)
      for (std::size_t j = 0; j < dy.cols(); ++j) b.grad[j] += dy(i, j);
    return matmul_nt(dy, w.value);
  }

  ParamRefs params() { return {&w, &b}; }
};

// ---------------------------------------------------------------------------
// Prior classifier f_phi: features -> probability vector over Q classes
// ---------------------------------------------------------------------------

class PriorNet {
 public:
  PriorNet() = default;
  PriorNet(std::size_t dim, std::size_t classes, std::size_t hidden, Rng& rng)
      : l1_("prior.l1", dim, hidden), l2_("prior.l2", hidden, classes) {
    l1_.init(rng);
    l2_.init(rng);
  }

  std::size_t classes() const { return l2_.w.value.cols(); }
  std::size_t dim() const { return l1_.w.value.rows(); }
  std::size_t hidden() const { return l1_.w.value.cols(); }

  Matrix forward(const Matrix& x) const {
    Matrix z = softplus(l1_.forward(x));
    Matrix logits = l2_.forward(z);
    softmax_rows_inplace(logits);
    return logits;
  }

  // Mean cross-entropy against row-stochastic targets; accumulates gradients.
  double loss_and_grad(const Matrix& x, const Matrix& targets) {
    const std::size_t n = x.rows();
    Matrix a = l1_.forward(x);
    Matrix z = softplus(a);
    Matrix probs = l2_.forward(z);
    softmax_rows_inplace(probs);
    double loss = 0.0;
    Matrix dlogits(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i)
      for (std::size_t j = 0; j < probs.cols(); ++j) {
        loss -= targets(i, j) * std::log(std::max(probs(i, j), 1e-300));
        dlogits(i, j) = (probs(i, j) - targets(i, j)) / static_cast<double>(n);
      }
    loss /= static_cast<double>(n);
    if (!std::isfinite(loss)) throw std::runtime_error("PriorNet: non-finite loss");
    Matrix dz = l2_.backward(z, dlogits);
    for (std::size_t k = 0; k < dz.size(); ++k) dz[k] *= sigmoid(a[k]);
    l1_.backward(x, dz);
    return loss;
  }

  ParamRefs params() {
    ParamRefs p = l1_.params();
    for (Param* q : l2_.params()) p.push_back(q);
    return p;
  }

 private:
  Linear l1_, l2_;
};

// ---------------------------------------------------------------------------
// Noise model eps_theta(S_t, x, f_phi(x), t)
// ---------------------------------------------------------------------------

struct NetConfig {
  std::size_t classes = 0;   // Q
  std::size_t dim = 0;       // feature dimension d
  std::size_t hidden = 128;  // token width h
  std::size_t temb = 64;     // time embedding dimension
};

// Per-class token architecture: the instance is projected into Q tokens, the
// noisy label and prior modulate a learned class embedding into Q more
// tokens. An instance-guided and a label-guided cross attention exchange
// information between the two, their outputs fuse by Hadamard product with
// the projected time embedding added, and a feed-forward stack with batch
// normalization and Softplus maps each class token to one noise coordinate.
class NoiseNet {
 public:
  struct Batch {
    const Matrix& st;     // B x Q noisy labels
    const Matrix& x;      // B x d features
    const Matrix& prior;  // B x Q prior f_phi(x)
    const std::vector<int>& t;
  };

  NoiseNet() = default;
  NoiseNet(const NetConfig& cfg, Rng& rng)
      : cfg_(cfg),
        inst_proj_("eps.inst_proj", cfg.dim, cfg.classes * cfg.hidden),
        cls_bias_("eps.cls_bias", cfg.classes, cfg.hidden),
        cls_label_("eps.cls_label", cfg.classes, cfg.hidden),
        cls_prior_("eps.cls_prior", cfg.classes, cfg.hidden),
        attn_inst_("eps.attn_inst", cfg.hidden),
        attn_label_("eps.attn_label", cfg.hidden),
        time_proj_("eps.time_proj", cfg.temb, cfg.hidden),
        ff1_("eps.ff1", cfg.hidden, cfg.hidden),
        ff2_("eps.ff2", cfg.hidden, cfg.hidden),
        bn1_("eps.bn1", cfg.hidden),
        bn2_("eps.bn2", cfg.hidden),
        head_("eps.head", cfg.hidden, 1) {
    if (cfg.temb % 2 != 0) throw std::invalid_argument("NoiseNet: temb must be even");
    inst_proj_.init(rng);
    time_proj_.init(rng);
    ff1_.init(rng);
    ff2_.init(rng);
    head_.init(rng);
    attn_inst_.init(rng);
    attn_label_.init(rng);
    const double s = 1.0 / std::sqrt(static_cast<double>(cfg.hidden));
    for (Param* p : {&cls_bias_, &cls_label_, &cls_prior_})
      for (std::size_t k = 0; k < p->value.size(); ++k) p->value[k] = s * rng.gaussian();
  }

  const NetConfig& config() const { return cfg_; }

  // Inference-mode prediction for one item. Thread-safe for concurrent
  // readers as long as no training step runs.
  Matrix predict(const Matrix& st, const Matrix& x, const Matrix& prior, int t) const {
    std::vector<int> ts{t};
    Fwd f;
    return const_cast<NoiseNet*>(this)->forward(Batch{st, x, prior, ts}, false, f);
  }

  // Mean over the batch of the squared noise-prediction error, with
  // gradients accumulated into every parameter.
  double loss_and_grad(const Batch& batch, const Matrix& target_noise) {
    Fwd f;
    Matrix ehat = forward(batch, true, f);
    if (!ehat.same_shape(target_noise))
      throw std::invalid_argument("NoiseNet: target shape mismatch");
    const double n = static_cast<double>(ehat.rows());
    double loss = 0.0;
    Matrix dehat(ehat.rows(), ehat.cols());
    for (std::size_t k = 0; k < ehat.size(); ++k) {
      const double d = ehat[k] - target_noise[k];
      loss += d * d;
      dehat[k] = 2.0 * d / n;
    }
    loss /= n;
    backward(batch, f, dehat);
    return loss;
  }

  ParamRefs params() {
    ParamRefs p{&inst_proj_.w, &inst_proj_.b, &cls_bias_, &cls_label_, &cls_prior_,
                &time_proj_.w, &time_proj_.b};
    for (Param* q : attn_inst_.params()) p.push_back(q);
    for (Param* q : attn_label_.params()) p.push_back(q);
    for (Param* q : ff1_.params()) p.push_back(q);
    for (Param* q : bn1_.params()) p.push_back(q);
    for (Param* q : ff2_.params()) p.push_back(q);
    for (Param* q : bn2_.params()) p.push_back(q);
    for (Param* q : head_.params()) p.push_back(q);
    return p;
  }

  ParamRefs buffers() {
    ParamRefs b = bn1_.buffers();
    for (Param* q : bn2_.buffers()) b.push_back(q);
    return b;
  }

 private:
  struct Fwd {
    std::vector<Matrix> inst_tok, label_tok, a1, a2, temb, tvec;
    std::vector<AttentionBlock::Cache> c1, c2;
    Matrix hall, u1, v1, z1, u2, v2, z2;
    BatchNorm::Cache bc1, bc2;
  };

  Matrix forward(const Batch& batch, bool training, Fwd& f) {
    const std::size_t b = batch.st.rows(), q = cfg_.classes, h = cfg_.hidden;
    if (batch.st.cols() != q || batch.x.cols() != cfg_.dim || batch.prior.cols() != q ||
        batch.x.rows() != b || batch.prior.rows() != b || batch.t.size() != b)
      throw std::invalid_argument("NoiseNet: inconsistent batch shapes");
    f.inst_tok.resize(b);
    f.label_tok.resize(b);
    f.a1.resize(b);
    f.a2.resize(b);
    f.temb.resize(b);
    f.tvec.resize(b);
    f.c1.resize(b);
    f.c2.resize(b);
    f.hall = Matrix(b * q, h);
    for (std::size_t i = 0; i < b; ++i) {
      Matrix xi(1, cfg_.dim);
      for (std::size_t j = 0; j < cfg_.dim; ++j) xi[j] = batch.x(i, j);
      Matrix flat = inst_proj_.forward(xi);  // 1 x (q*h)
      Matrix inst(q, h);
      for (std::size_t k = 0; k < q * h; ++k) inst[k] = flat[k];
      Matrix lab(q, h);
      for (std::size_t c = 0; c < q; ++c)
        for (std::size_t j = 0; j < h; ++j)
          lab(c, j) = cls_bias_.value(c, j) + batch.st(i, c) * cls_label_.value(c, j) +
                      batch.prior(i, c) * cls_prior_.value(c, j);
      f.inst_tok[i] = std::move(inst);
      f.label_tok[i] = std::move(lab);
      f.a1[i] = attn_inst_.forward(f.inst_tok[i], f.label_tok[i], f.c1[i]);
      f.a2[i] = attn_label_.forward(f.label_tok[i], f.inst_tok[i], f.c2[i]);
      f.temb[i] = sinusoidal_embed(static_cast<double>(batch.t[i]), cfg_.temb);
      f.tvec[i] = time_proj_.forward(f.temb[i]);  // 1 x h
      for (std::size_t c = 0; c < q; ++c)
        for (std::size_t j = 0; j < h; ++j)
          f.hall(i * q + c, j) = f.a1[i](c, j) * f.a2[i](c, j) + f.tvec[i][j];
    }
    if (!f.hall.all_finite())
      throw std::runtime_error("NoiseNet: non-finite activations after attention fusion");
    f.u1 = ff1_.forward(f.hall);
    f.v1 = bn1_.forward(f.u1, training, f.bc1);
    f.z1 = softplus(f.v1);
    f.u2 = ff2_.forward(f.z1);
    f.v2 = bn2_.forward(f.u2, training, f.bc2);
    f.z2 = softplus(f.v2);
    Matrix out_flat = head_.forward(f.z2);  // (b*q) x 1
    Matrix ehat(b, q);
    for (std::size_t k = 0; k < b * q; ++k) ehat[k] = out_flat[k];
    if (!ehat.all_finite())
      throw std::runtime_error("NoiseNet: non-finite activations in feed-forward head");
    return ehat;
  }

  void backward(const Batch& batch, Fwd& f, const Matrix& dehat) {
    const std::size_t b = batch.st.rows(), q = cfg_.classes, h = cfg_.hidden;
    Matrix dout_flat(b * q, 1);
    for (std::size_t k = 0; k < b * q; ++k) dout_flat[k] = dehat[k];
    Matrix dz2 = head_.backward(f.z2, dout_flat);
    for (std::size_t k = 0; k < dz2.size(); ++k) dz2[k] *= sigmoid(f.v2[k]);
    Matrix du2 = bn2_.backward(dz2, f.bc2);
    Matrix dz1 = ff2_.backward(f.z1, du2);
    for (std::size_t k = 0; k < dz1.size(); ++k) dz1[k] *= sigmoid(f.v1[k]);
    Matrix du1 = bn1_.backward(dz1, f.bc1);
    Matrix dhall = ff1_.backward(f.hall, du1);
    for (std::size_t i = 0; i < b; ++i) {
      Matrix dh(q, h), da1(q, h), da2(q, h);
      Matrix dtvec(1, h);
      for (std::size_t c = 0; c < q; ++c)
        for (std::size_t j = 0; j < h; ++j) {
          const double g = dhall(i * q + c, j);
          da1(c, j) = g * f.a2[i](c, j);
          da2(c, j) = g * f.a1[i](c, j);
          dtvec[j] += g;
        }
      time_proj_.backward(f.temb[i], dtvec);
      Matrix dinst1, dlab1, dlab2, dinst2;
      attn_inst_.backward(da1, f.c1[i], dinst1, dlab1);
      attn_label_.backward(da2, f.c2[i], dlab2, dinst2);
      Matrix dinst = dinst1 + dinst2;
      Matrix dlab = dlab1 + dlab2;
      for (std::size_t c = 0; c < q; ++c)
        for (std::size_t j = 0; j < h; ++j) {
          cls_bias_.grad(c, j) += dlab(c, j);
          cls_label_.grad(c, j) += batch.st(i, c) * dlab(c, j);
          cls_prior_.grad(c, j) += batch.prior(i, c) * dlab(c, j);
        }
      Matrix dflat(1, q * h);
      for (std::size_t k = 0; k < q * h; ++k) dflat[k] = dinst[k];
      Matrix xi(1, cfg_.dim);
      for (std::size_t j = 0; j < cfg_.dim; ++j) xi[j] = batch.x(i, j);
      inst_proj_.backward(xi, dflat);
    }
  }

  NetConfig cfg_;
  Linear inst_proj_;
  Param cls_bias_, cls_label_, cls_prior_;
  AttentionBlock attn_inst_, attn_label_;
  Linear time_proj_;
  Linear ff1_, ff2_;
  BatchNorm bn1_, bn2_;
  Linear head_;
};

}  // namespace ddmp
