// Command-line front end: synthesize datasets, pretrain the prior encoder,
// train the diffusion disambiguation model, evaluate, cross-validate, and
// run the ablation grid.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddmp/data.hpp"
#include "ddmp/metrics.hpp"
#include "ddmp/pipeline.hpp"

namespace {

using namespace ddmp;

struct CommonOpts {
  std::string data_path;
  bool no_standardize = false;
};

PartialDataset load(const CommonOpts& o) {
  PartialDataset ds = parse_dataset(o.data_path);
  if (!o.no_standardize) standardize_features(ds.X);
  return ds;
}

void add_train_flags(CLI::App* cmd, TrainConfig& cfg) {
  cmd->add_option("--epochs", cfg.epochs, "Training epochs");
  cmd->add_option("--batch", cfg.batch, "Minibatch size");
  cmd->add_option("--timesteps", cfg.timesteps, "Diffusion steps T")->check(CLI::PositiveNumber);
  cmd->add_option("--beta-start", cfg.beta_start, "Schedule start variance");
  cmd->add_option("--beta-end", cfg.beta_end, "Schedule end variance");
  cmd->add_option("--trajectory", cfg.trajectory, "Reverse-sampling trajectory length")
      ->check(CLI::PositiveNumber);
  cmd->add_option("-k,--knn", cfg.knn, "Neighbours for the adjacency graph");
  cmd->add_option("--lambda", cfg.lambda, "Inverse-transition regularization")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--lr", cfg.lr, "Adam learning rate");
  cmd->add_option("--hidden", cfg.hidden, "Noise-net token width");
  cmd->add_option("--temb", cfg.temb, "Time embedding dimension");
  cmd->add_option("--encoder-hidden", cfg.encoder_hidden, "Prior classifier hidden width");
  cmd->add_option("--encoder-epochs", cfg.encoder_epochs, "Prior classifier epochs");
  cmd->add_option("--update-every", cfg.update_every, "Label refinement cadence (epochs)");
  cmd->add_option("--n-draws", cfg.n_draws, "Reverse draws per instance at inference");
  cmd->add_flag("--no-complementarity", [&cfg](std::size_t) { cfg.use_complementarity = false; },
                "Disable the P*J pseudo-clean initialization (ablation w/o I)");
  cmd->add_flag("--no-transition", [&cfg](std::size_t) { cfg.use_transition = false; },
                "Disable transition-matrix correction (ablation w/o T)");
  cmd->add_flag("--one-hot", [&cfg](std::size_t) { cfg.one_hot_targets = true; },
                "Train on hard argmax targets instead of soft pseudo-clean rows");
}

void write_train_log(const std::vector<EpochLog>& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write train log: " + path);
  for (const EpochLog& e : log) {
    nlohmann::json j{{"epoch", e.epoch}, {"loss", e.loss}, {"t_drift", e.t_drift},
                     {"wall_time", e.wall_time}};
    if (e.train_acc >= 0.0)
      j["train_acc"] = e.train_acc;
    else
      j["train_acc"] = nullptr;
    out << j.dump() << "\n";
  }
}

nlohmann::json config_json(const TrainConfig& cfg) {
  return nlohmann::json{{"epochs", cfg.epochs},
                        {"batch", cfg.batch},
                        {"timesteps", cfg.timesteps},
                        {"beta_start", cfg.beta_start},
                        {"beta_end", cfg.beta_end},
                        {"trajectory", cfg.trajectory},
                        {"knn", cfg.knn},
                        {"lambda", cfg.lambda},
                        {"seed", cfg.seed},
                        {"use_complementarity", cfg.use_complementarity},
                        {"use_transition", cfg.use_transition},
                        {"one_hot_targets", cfg.one_hot_targets},
                        {"update_every", cfg.update_every},
                        {"lr", cfg.lr},
                        {"hidden", cfg.hidden},
                        {"temb", cfg.temb},
                        {"encoder_hidden", cfg.encoder_hidden},
                        {"encoder_epochs", cfg.encoder_epochs},
                        {"n_draws", cfg.n_draws}};
}

// Train + evaluate one variant on a train/test split; returns test accuracy.
double run_variant(const PartialDataset& train_ds, const PartialDataset& test_ds,
                   const TrainConfig& cfg) {
  PriorNet encoder = pretrain_encoder(train_ds, cfg);
  TrainResult tr = train(train_ds, encoder, cfg);
  Rng rng(cfg.seed, 0x6576616c);
  InferResult inf = infer_labels(tr.model, encoder, test_ds.X, cfg, cfg.n_draws, rng);
  return accuracy(inf.predictions, test_ds.truth);
}

int run(int argc, char** argv) {
  CLI::App app{"Diffusion-based label disambiguation for partial label learning"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; flags override");

  // --- synth ---
  auto* synth = app.add_subcommand("synth", "Generate a partially labeled blob dataset");
  std::size_t sy_n = 2000, sy_q = 4, sy_d = 8;
  double sy_sep = 6.0, sy_flip = 0.5;
  std::uint64_t sy_seed = 0;
  std::string sy_out;
  synth->add_option("--n", sy_n, "Instances")->check(CLI::PositiveNumber);
  synth->add_option("--classes", sy_q, "Classes")->check(CLI::PositiveNumber);
  synth->add_option("--dim", sy_d, "Feature dimension")->check(CLI::PositiveNumber);
  synth->add_option("--separation", sy_sep, "Cluster center separation");
  synth->add_option("--q", sy_flip, "Noise-label inclusion probability")
      ->check(CLI::Range(0.0, 1.0));
  synth->add_option("--seed", sy_seed, "Random seed");
  synth->add_option("--out", sy_out, "Output PLD file")->required();

  // --- pretrain ---
  auto* pretrain = app.add_subcommand("pretrain", "Pre-train the prior classifier f_phi");
  CommonOpts pt_common;
  TrainConfig pt_cfg;
  std::string pt_out;
  pretrain->add_option("--data", pt_common.data_path, "PLD dataset")->required();
  pretrain->add_option("--out", pt_out, "Encoder checkpoint path")->required();
  pretrain->add_option("--seed", pt_cfg.seed, "Random seed");
  pretrain->add_option("--encoder-hidden", pt_cfg.encoder_hidden, "Hidden width");
  pretrain->add_option("--encoder-epochs", pt_cfg.encoder_epochs, "Epochs");
  pretrain->add_option("--batch", pt_cfg.batch, "Minibatch size");
  pretrain->add_option("--lr", pt_cfg.lr, "Adam learning rate");
  pretrain->add_flag("--no-standardize", pt_common.no_standardize,
                     "Skip per-column feature standardization");

  // --- train ---
  auto* traincmd = app.add_subcommand("train", "Train the diffusion disambiguation model");
  CommonOpts tr_common;
  TrainConfig tr_cfg;
  std::string tr_out = "model.ckpt", tr_log = "train_log.jsonl", tr_encoder, tr_dump_dir;
  traincmd->add_option("--data", tr_common.data_path, "PLD dataset")->required();
  traincmd->add_option("--out", tr_out, "Model checkpoint path");
  traincmd->add_option("--log", tr_log, "Training log (JSON lines)");
  traincmd->add_option("--encoder", tr_encoder,
                       "Pre-trained encoder checkpoint (trained in-process when omitted)");
  traincmd->add_option("--seed", tr_cfg.seed, "Random seed");
  traincmd->add_option("--dump-state", tr_dump_dir,
                       "Directory for per-epoch S and T CSV dumps");
  traincmd->add_flag("--no-standardize", tr_common.no_standardize,
                     "Skip per-column feature standardization");
  add_train_flags(traincmd, tr_cfg);

  // --- eval ---
  auto* evalcmd = app.add_subcommand("eval", "Evaluate a trained model on a dataset");
  CommonOpts ev_common;
  std::string ev_model = "model.ckpt", ev_out_dir = ".";
  std::size_t ev_draws = 10, ev_bins = 10;
  std::uint64_t ev_seed = 0;
  bool ev_no_std = false;
  evalcmd->add_option("--data", ev_common.data_path, "PLD dataset with truth")->required();
  evalcmd->add_option("--model", ev_model, "Model checkpoint");
  evalcmd->add_option("--out-dir", ev_out_dir, "Report output directory");
  evalcmd->add_option("--n-draws", ev_draws, "Reverse draws per instance")
      ->check(CLI::PositiveNumber);
  evalcmd->add_option("--bins", ev_bins, "Calibration bins")->check(CLI::PositiveNumber);
  evalcmd->add_option("--seed", ev_seed, "Random seed");
  evalcmd->add_flag("--no-standardize", ev_no_std, "Skip feature standardization");

  // --- xval ---
  auto* xval = app.add_subcommand("xval", "K-fold cross-validation");
  CommonOpts xv_common;
  TrainConfig xv_cfg;
  std::size_t xv_folds = 10, xv_bins = 10;
  std::string xv_out_dir = ".";
  bool xv_no_std = false;
  xval->add_option("--data", xv_common.data_path, "PLD dataset with truth")->required();
  xval->add_option("--folds", xv_folds, "Fold count")->check(CLI::PositiveNumber);
  xval->add_option("--seed", xv_cfg.seed, "Random seed");
  xval->add_option("--out-dir", xv_out_dir, "Report output directory");
  xval->add_option("--bins", xv_bins, "Calibration bins");
  xval->add_flag("--no-standardize", xv_no_std, "Skip feature standardization");
  add_train_flags(xval, xv_cfg);

  // --- ablate ---
  auto* ablate = app.add_subcommand("ablate", "Run the four ablation variants");
  CommonOpts ab_common;
  TrainConfig ab_cfg;
  double ab_test_frac = 0.2;
  bool ab_no_std = false;
  ablate->add_option("--data", ab_common.data_path, "PLD dataset with truth")->required();
  ablate->add_option("--seed", ab_cfg.seed, "Random seed");
  ablate->add_option("--test-frac", ab_test_frac, "Held-out fraction")
      ->check(CLI::Range(0.05, 0.95));
  ablate->add_flag("--no-standardize", ab_no_std, "Skip feature standardization");
  add_train_flags(ablate, ab_cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (synth->parsed()) {
    CleanDataset clean = make_blobs(sy_n, sy_q, sy_d, sy_sep, sy_seed);
    PartialDataset ds = partialize(clean.X, clean.labels, sy_q, sy_flip, sy_seed);
    write_dataset(ds, sy_out);
    std::cout << "wrote " << sy_out << " (" << ds.n() << " x " << ds.dim() << ", Q="
              << ds.classes() << ")\n";
  } else if (pretrain->parsed()) {
    PartialDataset ds = load(pt_common);
    std::vector<double> losses;
    PriorNet enc = pretrain_encoder(ds, pt_cfg, &losses);
    save_encoder(pt_out, enc);
    std::cout << "wrote " << pt_out << " (final loss " << losses.back() << ")\n";
  } else if (traincmd->parsed()) {
    PartialDataset ds = load(tr_common);
    PriorNet enc = tr_encoder.empty() ? pretrain_encoder(ds, tr_cfg) : load_encoder(tr_encoder);
    TrainResult result = train(ds, enc, tr_cfg);
    save_model_bundle(tr_out, result.model, enc, tr_cfg);
    write_train_log(result.log, tr_log);
    if (!tr_dump_dir.empty()) {
      std::filesystem::create_directories(tr_dump_dir);
      const auto dump_csv = [&](const std::string& name, const Matrix& m) {
        std::ofstream out(std::filesystem::path(tr_dump_dir) / name, std::ios::binary);
        for (std::size_t i = 0; i < m.rows(); ++i) {
          for (std::size_t j = 0; j < m.cols(); ++j)
            out << m(i, j) << (j + 1 == m.cols() ? "" : ",");
          out << "\n";
        }
      };
      dump_csv("S_final.csv", result.state.S);
      dump_csv("T_final.csv", result.state.T_mat);
    }
    std::cout << "wrote " << tr_out << " (final loss " << result.log.back().loss << ")\n";
  } else if (evalcmd->parsed()) {
    CommonOpts c = ev_common;
    c.no_standardize = ev_no_std;
    PartialDataset ds = load(c);
    if (!ds.has_truth()) throw std::runtime_error("eval: dataset has no ground truth");
    ModelBundle bundle = load_model_bundle(ev_model);
    Rng rng(ev_seed, 0x6576616c);
    InferResult inf =
        infer_labels(bundle.model, bundle.encoder, ds.X, bundle.cfg, ev_draws, rng);
    EvalReport report = evaluate(inf.probs, ds.truth, ev_bins, ds.classes());
    report.seed = ev_seed;
    report.config_echo = config_json(bundle.cfg);
    report.config_echo["n_draws"] = ev_draws;
    report.config_echo["bins"] = ev_bins;
    emit_report(report, ev_out_dir);
    std::cout << "accuracy " << report.accuracy << "  ece " << report.ece << "\n";
  } else if (xval->parsed()) {
    CommonOpts c = xv_common;
    c.no_standardize = xv_no_std;
    PartialDataset ds = load(c);
    if (!ds.has_truth()) throw std::runtime_error("xval: dataset has no ground truth");
    const FoldSpec spec = kfold(ds.n(), xv_folds, xv_cfg.seed);
    std::vector<double> accs;
    nlohmann::json folds_json = nlohmann::json::array();
    for (std::size_t f = 0; f < spec.folds.size(); ++f) {
      std::vector<std::size_t> train_idx;
      for (std::size_t g = 0; g < spec.folds.size(); ++g)
        if (g != f)
          train_idx.insert(train_idx.end(), spec.folds[g].begin(), spec.folds[g].end());
      TrainConfig fold_cfg = xv_cfg;
      fold_cfg.seed = xv_cfg.seed + f;
      const double acc =
          run_variant(ds.subset(train_idx), ds.subset(spec.folds[f]), fold_cfg);
      accs.push_back(acc);
      folds_json.push_back({{"fold", f}, {"accuracy", acc}});
      std::cout << "fold " << f << ": accuracy " << acc << "\n";
    }
    double mean = 0.0;
    for (double a : accs) mean += a;
    mean /= accs.size();
    double var = 0.0;
    for (double a : accs) var += (a - mean) * (a - mean);
    const double stdev = accs.size() > 1 ? std::sqrt(var / (accs.size() - 1)) : 0.0;
    nlohmann::json out{{"folds", folds_json},
                       {"mean_accuracy", mean},
                       {"std_accuracy", stdev},
                       {"config", config_json(xv_cfg)}};
    std::filesystem::create_directories(xv_out_dir);
    std::ofstream jf(std::filesystem::path(xv_out_dir) / "xval.json", std::ios::binary);
    jf << out.dump(2) << "\n";
    std::printf("mean accuracy %.4f +/- %.4f over %zu folds\n", mean, stdev, accs.size());
  } else if (ablate->parsed()) {
    CommonOpts c = ab_common;
    c.no_standardize = ab_no_std;
    PartialDataset ds = load(c);
    if (!ds.has_truth()) throw std::runtime_error("ablate: dataset has no ground truth");
    std::vector<std::size_t> idx(ds.n());
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(ab_cfg.seed, 0x73706c69);
    rng.shuffle(idx);
    const std::size_t n_test = static_cast<std::size_t>(ds.n() * ab_test_frac);
    const std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + n_test);
    const std::vector<std::size_t> train_idx(idx.begin() + n_test, idx.end());
    const PartialDataset train_ds = ds.subset(train_idx);
    const PartialDataset test_ds = ds.subset(test_idx);
    struct Variant {
      const char* name;
      bool use_i, use_t;
    };
    const Variant variants[] = {{"DDMP", true, true},
                                {"DDMP-w/o-I", false, true},
                                {"DDMP-w/o-T", true, false},
                                {"DDMP-w/o-IT", false, false}};
    std::printf("%-14s %s\n", "variant", "test_accuracy");
    for (const Variant& v : variants) {
      TrainConfig cfg = ab_cfg;
      cfg.use_complementarity = v.use_i;
      cfg.use_transition = v.use_t;
      const double acc = run_variant(train_ds, test_ds, cfg);
      std::printf("%-14s %.4f\n", v.name, acc);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
