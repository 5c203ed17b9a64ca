// Acceptance suite: exercises the twelve release gates end to end and
// prints one PASS/FAIL line per criterion. Exits nonzero if any gate fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ddmp/data.hpp"
#include "ddmp/diffusion.hpp"
#include "ddmp/disambig.hpp"
#include "ddmp/metrics.hpp"
#include "ddmp/pipeline.hpp"

using namespace ddmp;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int id, const char* label, bool ok) {
  std::printf("[%s] criterion %2d: %s\n", ok ? "PASS" : "FAIL", id, label);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

void report_skip(int id, const char* label, const char* why) {
  std::printf("[SKIP] criterion %2d: %s (%s)\n", id, label, why);
  std::fflush(stdout);
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// ---------------------------------------------------------------------------
// 1. Forward-process equivalence: closed form vs iterated chain moments.
// ---------------------------------------------------------------------------
void criterion_1() {
  const double t0 = now_seconds();
  const DiffusionSchedule sched = make_schedule(10, 0.05, 0.05);
  Matrix s0(1, 2), prior(1, 2);
  s0[0] = 1.0;
  s0[1] = 0.0;
  prior[0] = 0.7;
  prior[1] = 0.3;
  const std::size_t n = 100000;
  Rng rng(2024);
  double mean_c[2] = {0, 0}, m2_c[2] = {0, 0};
  double mean_i[2] = {0, 0}, m2_i[2] = {0, 0};
  Matrix noise(1, 2);
  for (std::size_t s = 0; s < n; ++s) {
    noise[0] = rng.gaussian();
    noise[1] = rng.gaussian();
    const Matrix closed = forward_sample(s0, prior, sched.T, noise, sched);
    Matrix chain = s0;
    for (int t = 1; t <= sched.T; ++t) {
      noise[0] = rng.gaussian();
      noise[1] = rng.gaussian();
      chain = forward_step(chain, prior, t, noise, sched);
    }
    for (int c = 0; c < 2; ++c) {
      mean_c[c] += closed[c];
      m2_c[c] += closed[c] * closed[c];
      mean_i[c] += chain[c];
      m2_i[c] += chain[c] * chain[c];
    }
  }
  bool ok = true;
  for (int c = 0; c < 2; ++c) {
    mean_c[c] /= n;
    mean_i[c] /= n;
    const double var_c = m2_c[c] / n - mean_c[c] * mean_c[c];
    const double var_i = m2_i[c] / n - mean_i[c] * mean_i[c];
    ok = ok && std::fabs(mean_c[c] - mean_i[c]) < 0.01;
    ok = ok && std::fabs(var_c - var_i) < 0.02;
  }
  ok = ok && (now_seconds() - t0) < 10.0;
  report(1, "forward closed form matches the iterated chain (1e5 samples, < 10 s)", ok);
}

// ---------------------------------------------------------------------------
// 2. Reconstruction identity for 1000 random tuples.
// ---------------------------------------------------------------------------
void criterion_2() {
  const DiffusionSchedule sched = make_schedule(1000, 1e-4, 0.02);
  Rng rng(7);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const std::size_t q = 1 + rng.below(5);
    Matrix s0 = rng.gaussian_matrix(1, q);
    Matrix prior = rng.gaussian_matrix(1, q);
    Matrix eps = rng.gaussian_matrix(1, q);
    const int t = 1 + static_cast<int>(rng.below(1000));
    const Matrix st = forward_sample(s0, prior, t, eps, sched);
    const Matrix rec = predict_s0(st, prior, eps, t, sched);
    for (std::size_t c = 0; c < q; ++c) worst = std::max(worst, std::fabs(rec[c] - s0[c]));
  }
  report(2, "predict_s0 recovers s0 to <= 1e-10 on 1000 random tuples", worst <= 1e-10);
}

// ---------------------------------------------------------------------------
// 3. Posterior correctness: coefficient sum and conditional-Gaussian oracle.
// ---------------------------------------------------------------------------
void criterion_3() {
  bool ok = true;
  const DiffusionSchedule big = make_schedule(1000, 1e-4, 0.02);
  for (int t = 1; t <= big.T; ++t) {
    const PosteriorCoeffs c = posterior_coeffs(big.alpha_bar_at(t), big.alpha_bar_at(t - 1));
    ok = ok && std::fabs(c.g0 + c.g1 + c.g2 - 1.0) <= 1e-12;
  }

  // Q = 1, T = 3: brute-force conditional Gaussian of (S_{t-1}, S_t).
  const DiffusionSchedule sched = make_schedule(3, 0.1, 0.3);
  const double s0 = 0.8, prior = -0.4;
  for (int t = 1; t <= 3; ++t) {
    const double ab_prev = sched.alpha_bar_at(t - 1);
    const double a_t = sched.alpha_at(t), b_t = sched.beta_at(t);
    const double m_prev = std::sqrt(ab_prev) * s0 + (1.0 - std::sqrt(ab_prev)) * prior;
    const double v_prev = 1.0 - ab_prev;
    const double m_t = std::sqrt(a_t) * m_prev + (1.0 - std::sqrt(a_t)) * prior;
    const double v_t = a_t * v_prev + b_t;
    const double cov = std::sqrt(a_t) * v_prev;
    const PosteriorCoeffs c = posterior_coeffs(sched.alpha_bar_at(t), ab_prev);
    for (double st : {-1.0, 0.2, 1.5}) {
      const double oracle_mean = m_prev + cov / v_t * (st - m_t);
      const double oracle_var = v_prev - cov * cov / v_t;
      const double gamma_mean = c.g0 * s0 + c.g1 * st + c.g2 * prior;
      ok = ok && std::fabs(gamma_mean - oracle_mean) <= 1e-8;
      ok = ok && std::fabs(c.var - oracle_var) <= 1e-8;
    }
  }
  report(3, "posterior coefficients sum to 1 and match the Gaussian oracle", ok);
}

// ---------------------------------------------------------------------------
// 4. Finite-difference gradient checks for both networks.
// ---------------------------------------------------------------------------
bool fd_check(const ParamRefs& params, const std::function<double()>& loss_fn) {
  const double h = 1e-5;
  // Relative error against a floored denominator: batch norm annihilates
  // column-constant shifts, making some true gradients exactly zero while
  // the finite difference returns roundoff noise.
  for (Param* p : params) {
    for (std::size_t k = 0; k < p->value.size(); ++k) {
      const double saved = p->value[k];
      p->value[k] = saved + h;
      const double lp = loss_fn();
      p->value[k] = saved - h;
      const double lm = loss_fn();
      p->value[k] = saved;
      const double fd = (lp - lm) / (2.0 * h);
      const double denom = std::max({std::fabs(fd), std::fabs(p->grad[k]), 1e-4});
      if (std::fabs(fd - p->grad[k]) / denom >= 1e-4) {
        std::fprintf(stderr, "  grad mismatch %s[%zu]: analytic %g fd %g\n",
                     p->name.c_str(), k, p->grad[k], fd);
        return false;
      }
    }
  }
  return true;
}

void criterion_4() {
  Rng rng(17);
  bool ok = true;

  {
    PriorNet net(3, 3, 6, rng);
    const Matrix x = rng.gaussian_matrix(4, 3);
    Matrix tgt(4, 3);
    for (std::size_t i = 0; i < 4; ++i) tgt(i, rng.below(3)) = 1.0;
    const ParamRefs params = net.params();
    zero_grads(params);
    net.loss_and_grad(x, tgt);
    ok = ok && fd_check(params, [&] {
           PriorNet probe = net;
           return probe.loss_and_grad(x, tgt);
         });
  }

  {
    NoiseNet net(NetConfig{3, 3, 6, 4}, rng);
    const Matrix x = rng.gaussian_matrix(4, 3);
    const Matrix st = rng.gaussian_matrix(4, 3);
    const Matrix prior = rng.gaussian_matrix(4, 3);
    const Matrix eps = rng.gaussian_matrix(4, 3);
    const std::vector<int> ts{1, 250, 600, 1000};
    const ParamRefs params = net.params();
    zero_grads(params);
    net.loss_and_grad(NoiseNet::Batch{st, x, prior, ts}, eps);
    ok = ok && fd_check(params, [&] {
           NoiseNet probe = net;
           return probe.loss_and_grad(NoiseNet::Batch{st, x, prior, ts}, eps);
         });
  }
  report(4, "finite-difference gradient checks pass for f_phi and eps_theta", ok);
}

// ---------------------------------------------------------------------------
// 5. Transition-matrix oracle.
// ---------------------------------------------------------------------------
void criterion_5() {
  bool ok = true;
  {
    Matrix s(3, 2), cand(3, 2);
    s(0, 0) = 1.0;
    s(1, 1) = 1.0;
    s(2, 0) = 0.5;
    s(2, 1) = 0.5;
    cand(0, 0) = cand(0, 1) = 1.0;
    cand(1, 1) = 1.0;
    cand(2, 0) = cand(2, 1) = 1.0;
    const Matrix t = estimate_transition(s, cand);
    ok = ok && t(0, 0) == 1.0 && t(1, 0) == 1.0 && t(1, 1) == 1.0;
    ok = ok && std::fabs(t(0, 1) - 1.0 / 3.0) <= 1e-15;
  }
  {
    // singleton candidate sets: T must be exactly the identity
    Rng rng(3);
    Matrix s(20, 4), cand(20, 4);
    for (std::size_t i = 0; i < 20; ++i) {
      const std::size_t c = rng.below(4);
      s(i, c) = 1.0;
      cand(i, c) = 1.0;
    }
    const Matrix t = estimate_transition(s, cand);
    const Matrix eye = Matrix::identity(4);
    for (std::size_t k = 0; k < t.size(); ++k) ok = ok && t[k] == eye[k];
  }
  {
    // T_jj = 1 under candidate masking for random masked rows
    Rng rng(5);
    Matrix cand(50, 5);
    for (std::size_t i = 0; i < 50; ++i) {
      cand(i, rng.below(5)) = 1.0;
      for (std::size_t c = 0; c < 5; ++c)
        if (rng.uniform() < 0.4) cand(i, c) = 1.0;
    }
    Matrix s(50, 5);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = rng.uniform();
    mask_and_normalize_rows(s, cand);
    const Matrix t = estimate_transition(s, cand);
    for (std::size_t j = 0; j < 5; ++j) ok = ok && std::fabs(t(j, j) - 1.0) <= 1e-12;
  }
  report(5, "transition-matrix hand case, singleton identity, unit diagonal", ok);
}

// ---------------------------------------------------------------------------
// 6. Generator statistics.
// ---------------------------------------------------------------------------
void criterion_6() {
  const std::size_t n = 10000, q_classes = 10;
  Matrix x(n, 1);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % q_classes);
  bool ok = true;
  {
    const PartialDataset ds = partialize(x, labels, q_classes, 0.3, 99);
    double total = 0.0;
    for (std::size_t k = 0; k < ds.candidates.size(); ++k) total += ds.candidates[k];
    const double se = std::sqrt(9.0 * 0.3 * 0.7 / n);
    ok = ok && std::fabs(total / n - 3.7) <= 3.0 * se;
  }
  for (double q : {0.0, 1.0}) {
    const PartialDataset ds = partialize(x, labels, q_classes, q, 99);
    const double want = q == 0.0 ? 1.0 : static_cast<double>(q_classes);
    for (std::size_t i = 0; i < n && ok; ++i) {
      double count = 0.0;
      for (std::size_t c = 0; c < q_classes; ++c) count += ds.candidates(i, c);
      ok = ok && count == want;
    }
  }
  report(6, "partialize statistics: 3.7 +/- 3 SE at q=0.3; exact sizes at q=0,1", ok);
}

// ---------------------------------------------------------------------------
// 7 & 8. End-to-end synthetic accuracy and ablation direction (shared runs).
// ---------------------------------------------------------------------------
TrainConfig e2e_config(std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.batch = 256;
  cfg.timesteps = 1000;
  cfg.trajectory = 10;
  cfg.knn = 10;
  cfg.hidden = 64;
  cfg.temb = 16;
  cfg.encoder_hidden = 64;
  cfg.encoder_epochs = 30;
  cfg.update_every = 10;
  cfg.n_draws = 10;
  cfg.seed = seed;
  return cfg;
}

double e2e_run(std::uint64_t seed, bool use_i, bool use_t) {
  CleanDataset clean = make_blobs(2000, 4, 8, 6.0, seed);
  standardize_features(clean.X);
  PartialDataset ds = partialize(clean.X, clean.labels, 4, 0.5, seed);
  std::vector<std::size_t> idx(ds.n());
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, 0x73706c69);
  rng.shuffle(idx);
  const std::size_t n_test = ds.n() / 5;
  const PartialDataset test_ds = ds.subset({idx.begin(), idx.begin() + n_test});
  const PartialDataset train_ds = ds.subset({idx.begin() + n_test, idx.end()});
  TrainConfig cfg = e2e_config(seed);
  cfg.use_complementarity = use_i;
  cfg.use_transition = use_t;
  const PriorNet encoder = pretrain_encoder(train_ds, cfg);
  const TrainResult tr = train(train_ds, encoder, cfg);
  Rng erng(seed, 0x6576616c);
  const InferResult inf =
      infer_labels(tr.model, encoder, test_ds.X, cfg, cfg.n_draws, erng);
  return accuracy(inf.predictions, test_ds.truth);
}

void criteria_7_8() {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double mean_full = 0.0, mean_no_i = 0.0, mean_no_t = 0.0, mean_no_it = 0.0;
  double worst_seed_time = 0.0;
  for (std::uint64_t seed : seeds) {
    const double t0 = now_seconds();
    const double full = e2e_run(seed, true, true);
    worst_seed_time = std::max(worst_seed_time, now_seconds() - t0);
    const double no_i = e2e_run(seed, false, true);
    const double no_t = e2e_run(seed, true, false);
    const double no_it = e2e_run(seed, false, false);
    std::fprintf(stderr,
                 "  seed %llu: DDMP %.4f  w/o-I %.4f  w/o-T %.4f  w/o-IT %.4f\n",
                 static_cast<unsigned long long>(seed), full, no_i, no_t, no_it);
    mean_full += full;
    mean_no_i += no_i;
    mean_no_t += no_t;
    mean_no_it += no_it;
  }
  const double n = static_cast<double>(seeds.size());
  mean_full /= n;
  mean_no_i /= n;
  mean_no_t /= n;
  mean_no_it /= n;
  std::printf(
      "  mean accuracy: DDMP %.4f  w/o-I %.4f  w/o-T %.4f  w/o-IT %.4f  (max seed time %.0f s)\n",
      mean_full, mean_no_i, mean_no_t, mean_no_it, worst_seed_time);
  report(7, "synthetic end-to-end mean accuracy >= 0.95 over 5 seeds, < 5 min/seed",
         mean_full >= 0.95 && worst_seed_time < 300.0);
  const bool ordering = mean_full >= mean_no_i && mean_full >= mean_no_t &&
                        mean_no_it <= mean_no_i && mean_no_it <= mean_no_t;
  report(8, "ablation ordering: DDMP >= single ablations, w/o-IT lowest", ordering);
  if (!ordering)
    std::printf(
        "  note: with uniform label-flip noise the true transition matrix is\n"
        "  (1-q)I + q*11^T, whose inverse is an order-preserving per-row affine\n"
        "  shift, so the transition correction cannot change any argmax here and\n"
        "  the w/o-T comparisons resolve to estimation noise (~0.003). The\n"
        "  initialization ablation (DDMP vs w/o-I) shows the real effect.\n");
}

// ---------------------------------------------------------------------------
// 9. Real-data sanity on the Lost dataset, when converted and present.
// ---------------------------------------------------------------------------
void criterion_9() {
  const std::string path = std::string(DDMP_SOURCE_DIR) + "/data/lost.pld";
  if (!fs::exists(path)) {
    report_skip(9, "Lost dataset ten-fold CV >= 0.60",
                "data/lost.pld not present; see README for the conversion recipe");
    return;
  }
  PartialDataset ds = parse_dataset(path);
  standardize_features(ds.X);
  TrainConfig cfg = e2e_config(0);
  const FoldSpec spec = kfold(ds.n(), 10, 0);
  double mean = 0.0;
  for (std::size_t f = 0; f < spec.folds.size(); ++f) {
    std::vector<std::size_t> train_idx;
    for (std::size_t g = 0; g < spec.folds.size(); ++g)
      if (g != f)
        train_idx.insert(train_idx.end(), spec.folds[g].begin(), spec.folds[g].end());
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = f;
    const PartialDataset train_ds = ds.subset(train_idx);
    const PartialDataset test_ds = ds.subset(spec.folds[f]);
    const PriorNet encoder = pretrain_encoder(train_ds, fold_cfg);
    const TrainResult tr = train(train_ds, encoder, fold_cfg);
    Rng erng(fold_cfg.seed, 0x6576616c);
    const InferResult inf =
        infer_labels(tr.model, encoder, test_ds.X, fold_cfg, fold_cfg.n_draws, erng);
    mean += accuracy(inf.predictions, test_ds.truth);
  }
  mean /= spec.folds.size();
  std::fprintf(stderr, "  Lost ten-fold mean accuracy: %.4f\n", mean);
  report(9, "Lost dataset ten-fold CV >= 0.60", mean >= 0.60);
}

// ---------------------------------------------------------------------------
// 10. ECE hand case, constant-confidence invariant, artifact well-formedness.
// ---------------------------------------------------------------------------
bool xml_well_formed(const std::string& body) {
  std::vector<std::string> stack;
  std::size_t pos = 0;
  while ((pos = body.find('<', pos)) != std::string::npos) {
    const std::size_t end = body.find('>', pos);
    if (end == std::string::npos) return false;
    std::string tag = body.substr(pos + 1, end - pos - 1);
    pos = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    const bool closing = tag[0] == '/';
    const bool self_closing = tag.back() == '/';
    if (closing) tag = tag.substr(1);
    std::string name;
    for (char c : tag) {
      if (c == ' ' || c == '\t' || c == '\n') break;
      name.push_back(c);
    }
    if (name.empty()) return false;
    if (closing) {
      if (stack.empty() || stack.back() != name) return false;
      stack.pop_back();
    } else if (!self_closing) {
      stack.push_back(name);
    }
  }
  return stack.empty();
}

void criterion_10() {
  bool ok = true;
  {
    // half at confidence 0.9 all correct, half at 0.6 all wrong -> 0.35
    Matrix p(10, 2);
    std::vector<int> truth(10, 0);
    for (std::size_t i = 0; i < 5; ++i) {
      p(i, 0) = 0.9;
      p(i, 1) = 0.1;
    }
    for (std::size_t i = 5; i < 10; ++i) {
      p(i, 0) = 0.4;
      p(i, 1) = 0.6;
    }
    const auto [e, bins] = ece(p, truth, 10);
    ok = ok && std::fabs(e - 0.35) <= 1e-15;
  }
  {
    // constant confidence: ece = |confidence - accuracy| exactly
    Matrix p(8, 2);
    std::vector<int> truth(8, 0);
    for (std::size_t i = 0; i < 8; ++i) {
      p(i, i < 3 ? 0 : 1) = 0.8;
      p(i, i < 3 ? 1 : 0) = 0.2;
    }
    const auto [e, bins] = ece(p, truth, 10);
    ok = ok && std::fabs(e - std::fabs(0.8 - 3.0 / 8.0)) <= 1e-12;
  }
  {
    Matrix p(6, 2);
    std::vector<int> truth(6, 0);
    Rng rng(2);
    for (std::size_t i = 0; i < 6; ++i) {
      p(i, 0) = 0.5 + 0.4 * rng.uniform();
      p(i, 1) = 1.0 - p(i, 0);
    }
    const EvalReport r = evaluate(p, truth, 10, 2);
    const fs::path dir = fs::temp_directory_path() / "ddmp_acceptance_report";
    emit_report(r, dir.string());
    std::ifstream svg_in(dir / "reliability.svg", std::ios::binary);
    const std::string svg((std::istreambuf_iterator<char>(svg_in)), {});
    ok = ok && xml_well_formed(svg);
    std::ifstream json_in(dir / "report.json");
    nlohmann::json j;
    json_in >> j;
    ok = ok && report_from_json(j).accuracy == r.accuracy;
    std::ifstream csv_in(dir / "reliability.csv");
    std::string line;
    std::size_t rows = 0;
    std::getline(csv_in, line);
    while (std::getline(csv_in, line))
      if (!line.empty()) ++rows;
    ok = ok && rows == 10;
    fs::remove_all(dir);
  }
  report(10, "ECE 0.35 hand case, constant-confidence identity, artifacts valid", ok);
}

// ---------------------------------------------------------------------------
// 11. CLI determinism: byte-identical report.json across two seeded runs.
// ---------------------------------------------------------------------------
int run_cli(const std::string& args) {
  const std::string cmd = std::string(DDMP_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<unreadable:" + path.string() + ">";
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void criterion_11() {
  const fs::path dir = fs::temp_directory_path() / "ddmp_acceptance_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  bool ok = true;
  const std::string data = (dir / "data.pld").string();
  ok = ok && run_cli("synth --n 200 --classes 3 --dim 4 --separation 8 --q 0.3 --seed 11 --out " +
                     data) == 0;
  const std::string fast =
      " --epochs 4 --batch 64 --timesteps 200 --trajectory 5 --knn 5 --hidden 16"
      " --temb 8 --encoder-hidden 32 --encoder-epochs 10 --n-draws 2 --seed 11";
  for (const char* tag : {"a", "b"}) {
    const std::string model = (dir / (std::string("model_") + tag + ".ckpt")).string();
    const std::string out = (dir / (std::string("report_") + tag)).string();
    ok = ok && run_cli("train --data " + data + " --out " + model + " --log " +
                       (dir / "log.jsonl").string() + fast) == 0;
    ok = ok && run_cli("eval --data " + data + " --model " + model + " --out-dir " + out +
                       " --n-draws 2 --seed 11") == 0;
  }
  ok = ok && slurp(dir / "report_a" / "report.json") == slurp(dir / "report_b" / "report.json");
  fs::remove_all(dir);
  report(11, "two seeded synth/train/eval runs give byte-identical report.json", ok);
}

// ---------------------------------------------------------------------------
// 12. Sampler budget: exactly 10 network evaluations for a 10-step trajectory.
// ---------------------------------------------------------------------------
void criterion_12() {
  const DiffusionSchedule sched = make_schedule(1000, 1e-4, 0.02);
  const std::vector<int> traj = make_trajectory(sched, 10);
  std::size_t calls = 0;
  const NoisePredictor counter = [&calls](const Matrix& st, const Matrix&, const Matrix&,
                                          int) {
    ++calls;
    return Matrix(st.rows(), st.cols());
  };
  Matrix x(1, 2), prior(1, 3);
  Rng rng(4);
  sample_reverse(counter, x, prior, sched, traj, rng);
  report(12, "reverse sampling with a 10-step trajectory makes exactly 10 calls",
         traj.size() == 10 && calls == 10);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criteria_7_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  return 1;
}
