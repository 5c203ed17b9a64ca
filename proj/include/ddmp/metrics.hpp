#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddmp/matrix.hpp"

namespace ddmp {

struct ReliabilityBin {
  double mean_confidence = 0.0;
  double empirical_accuracy = 0.0;
  std::size_t count = 0;
};

struct EvalReport {
  double accuracy = 0.0;
  double ece = 0.0;
  std::vector<ReliabilityBin> bins;
  std::vector<double> per_class_accuracy;
  nlohmann::json config_echo;
  std::uint64_t seed = 0;
};

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& truth) {
  if (predictions.size() != truth.size())
    throw std::invalid_argument("accuracy: length mismatch");
  if (predictions.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / predictions.size();
}

// Expected calibration error over equal-width confidence bins on [0, 1].
// Confidence is the row maximum of the probability matrix; empty bins
// contribute nothing.
inline std::pair<double, std::vector<ReliabilityBin>> ece(const Matrix& probs,
                                                          const std::vector<int>& truth,
                                                          std::size_t n_bins) {
  if (n_bins < 1) throw std::invalid_argument("ece: n_bins must be >= 1");
  if (probs.rows() != truth.size()) throw std::invalid_argument("ece: length mismatch");
  const std::size_t n = probs.rows();
  std::vector<double> conf_sum(n_bins, 0.0), acc_sum(n_bins, 0.0);
  std::vector<std::size_t> counts(n_bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double conf = probs(i, 0);
    std::size_t arg = 0;
    for (std::size_t c = 1; c < probs.cols(); ++c)
      if (probs(i, c) > conf) {
        conf = probs(i, c);
        arg = c;
      }
    std::size_t b = static_cast<std::size_t>(conf * n_bins);
    if (b >= n_bins) b = n_bins - 1;  // confidence 1.0 lands in the top bin
    conf_sum[b] += conf;
    acc_sum[b] += (static_cast<int>(arg) == truth[i]) ? 1.0 : 0.0;
    ++counts[b];
  }
  std::vector<ReliabilityBin> bins(n_bins);
  double e = 0.0;
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].count = counts[b];
    if (counts[b] == 0) continue;
    bins[b].mean_confidence = conf_sum[b] / counts[b];
    bins[b].empirical_accuracy = acc_sum[b] / counts[b];
    e += (static_cast<double>(counts[b]) / n) *
         std::fabs(bins[b].empirical_accuracy - bins[b].mean_confidence);
  }
  return {e, bins};
}

inline std::vector<int> argmax_rows(const Matrix& probs) {
  std::vector<int> out(probs.rows());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    std::size_t arg = 0;
    for (std::size_t c = 1; c < probs.cols(); ++c)
      if (probs(i, c) > probs(i, arg)) arg = c;  // ties keep the lowest index
    out[i] = static_cast<int>(arg);
  }
  return out;
}

inline EvalReport evaluate(const Matrix& probs, const std::vector<int>& truth,
                           std::size_t n_bins, std::size_t classes) {
  EvalReport r;
  const std::vector<int> preds = argmax_rows(probs);
  r.accuracy = accuracy(preds, truth);
  auto [e, bins] = ece(probs, truth, n_bins);
  r.ece = e;
  r.bins = std::move(bins);
  r.per_class_accuracy.assign(classes, 0.0);
  std::vector<std::size_t> per_class_n(classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++per_class_n[truth[i]];
    if (preds[i] == truth[i]) r.per_class_accuracy[truth[i]] += 1.0;
  }
  for (std::size_t c = 0; c < classes; ++c)
    if (per_class_n[c] > 0) r.per_class_accuracy[c] /= per_class_n[c];
  return r;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["accuracy"] = r.accuracy;
  j["ece"] = r.ece;
  j["seed"] = r.seed;
  j["per_class_accuracy"] = r.per_class_accuracy;
  j["config"] = r.config_echo;
  j["bins"] = nlohmann::json::array();
  for (const auto& b : r.bins)
    j["bins"].push_back({{"mean_confidence", b.mean_confidence},
                         {"empirical_accuracy", b.empirical_accuracy},
                         {"count", b.count}});
  return j;
}

inline EvalReport report_from_json(const nlohmann::json& j) {
  EvalReport r;
  r.accuracy = j.at("accuracy").get<double>();
  r.ece = j.at("ece").get<double>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.per_class_accuracy = j.at("per_class_accuracy").get<std::vector<double>>();
  r.config_echo = j.at("config");
  for (const auto& b : j.at("bins")) {
    ReliabilityBin rb;
    rb.mean_confidence = b.at("mean_confidence").get<double>();
    rb.empirical_accuracy = b.at("empirical_accuracy").get<double>();
    rb.count = b.at("count").get<std::size_t>();
    r.bins.push_back(rb);
  }
  return r;
}

// Bar chart of per-bin empirical accuracy against confidence, with the
// y = x reference diagonal.
inline std::string reliability_svg(const EvalReport& r) {
  const int w = 480, h = 360, ml = 50, mb = 40, mt = 20, mr = 20;
  const double pw = w - ml - mr, ph = h - mt - mb;
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
    << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  s << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
    << "\" fill=\"white\"/>\n";
  const std::size_t nb = r.bins.size();
  for (std::size_t b = 0; b < nb; ++b) {
    const double bw = pw / nb;
    const double x = ml + b * bw;
    const double bh = ph * r.bins[b].empirical_accuracy;
    s << "  <rect x=\"" << x + 1 << "\" y=\"" << mt + ph - bh << "\" width=\"" << bw - 2
      << "\" height=\"" << bh << "\" fill=\"#4878cf\" stroke=\"#2c4a80\"/>\n";
  }
  s << "  <line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
    << mt << "\" stroke=\"#999999\" stroke-dasharray=\"5,4\"/>\n";
  s << "  <line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
    << mt + ph << "\" stroke=\"black\"/>\n";
  s << "  <line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
    << "\" stroke=\"black\"/>\n";
  s << "  <text x=\"" << ml + pw / 2 << "\" y=\"" << h - 8
    << "\" text-anchor=\"middle\" font-size=\"13\">confidence</text>\n";
  s << "  <text x=\"14\" y=\"" << mt + ph / 2
    << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 14 "
    << mt + ph / 2 << ")\">accuracy</text>\n";
  std::ostringstream ece_label;
  ece_label.precision(4);
  ece_label << "ECE = " << r.ece;
  s << "  <text x=\"" << ml + 8 << "\" y=\"" << mt + 16 << "\" font-size=\"13\">"
    << ece_label.str() << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

// Writes report.json, reliability.csv and reliability.svg into out_dir.
inline void emit_report(const EvalReport& r, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  const auto write_file = [&](const std::string& name, const std::string& body) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("emit_report: cannot write " + path);
    out << body;
    if (!out) throw std::runtime_error("emit_report: write failed for " + path);
  };
  write_file("report.json", report_to_json(r).dump(2) + "\n");
  std::ostringstream csv;
  csv << "bin,mean_confidence,empirical_accuracy,count\n";
  for (std::size_t b = 0; b < r.bins.size(); ++b)
    csv << b << "," << r.bins[b].mean_confidence << "," << r.bins[b].empirical_accuracy
        << "," << r.bins[b].count << "\n";
  write_file("reliability.csv", csv.str());
  write_file("reliability.svg", reliability_svg(r));
}

}  // namespace ddmp
