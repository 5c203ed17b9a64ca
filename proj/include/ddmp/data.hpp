#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddmp/matrix.hpp"
#include "ddmp/rng.hpp"

namespace ddmp {

struct PartialDataset {
  Matrix X;              // N x d features
  Matrix candidates;     // N x Q 0/1 mask, every row nonempty
  std::vector<int> truth;  // empty when unavailable
  std::vector<std::string> names;  // optional class names

  std::size_t n() const { return X.rows(); }
  std::size_t dim() const { return X.cols(); }
  std::size_t classes() const { return candidates.cols(); }
  bool has_truth() const { return !truth.empty(); }

  void validate() const {
    if (candidates.rows() != X.rows())
      throw std::invalid_argument("dataset: feature/candidate row mismatch");
    for (std::size_t i = 0; i < candidates.rows(); ++i) {
      bool any = false;
      for (std::size_t c = 0; c < candidates.cols(); ++c)
        if (candidates(i, c) != 0.0) any = true;
      if (!any)
        throw std::invalid_argument("dataset: empty candidate set at row " +
                                    std::to_string(i));
    }
    if (has_truth()) {
      if (truth.size() != X.rows())
        throw std::invalid_argument("dataset: truth length mismatch");
      for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || static_cast<std::size_t>(truth[i]) >= candidates.cols() ||
            candidates(i, truth[i]) == 0.0)
          throw std::invalid_argument(
              "dataset: truth label not in candidate set at row " + std::to_string(i));
      }
    }
  }

  PartialDataset subset(const std::vector<std::size_t>& idx) const {
    PartialDataset out;
    out.X = Matrix(idx.size(), dim());
    out.candidates = Matrix(idx.size(), classes());
    out.names = names;
    if (has_truth()) out.truth.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
      for (std::size_t c = 0; c < dim(); ++c) out.X(r, c) = X(idx[r], c);
      for (std::size_t c = 0; c < classes(); ++c)
        out.candidates(r, c) = candidates(idx[r], c);
      if (has_truth()) out.truth[r] = truth[idx[r]];
    }
    return out;
  }
};

// Per-column zero-mean unit-variance scaling; constant columns are left
// centered only.
inline void standardize_features(Matrix& x) {
  const std::size_t n = x.rows(), d = x.cols();
  if (n == 0) return;
  for (std::size_t c = 0; c < d; ++c) {
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu += x(i, c);
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dd = x(i, c) - mu;
      var += dd * dd;
    }
    var /= static_cast<double>(n);
    const double inv = var > 1e-12 ? 1.0 / std::sqrt(var) : 1.0;
    for (std::size_t i = 0; i < n; ++i) x(i, c) = (x(i, c) - mu) * inv;
  }
}

namespace detail {
inline std::runtime_error parse_error(const std::string& path, std::size_t line,
                                      const std::string& what) {
  return std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

// Reads the next content line, skipping blanks and '#' comments.
inline bool next_line(std::istream& in, std::string& out, std::size_t& lineno) {
  while (std::getline(in, out)) {
    ++lineno;
    if (!out.empty() && out.back() == '\r') out.pop_back();
    std::size_t p = out.find_first_not_of(" \t");
    if (p == std::string::npos || out[p] == '#') continue;
    return true;
  }
  return false;
}
}  // namespace detail

// PLD text format:
//   line 1: PLD1 N d Q has_truth
//   N feature lines (d floats), N candidate lines (ascending 0-based
//   indices), then N truth lines when has_truth = 1. '#' lines ignored.
inline PartialDataset parse_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  std::size_t lineno = 0;
  std::string line;
  if (!detail::next_line(in, line, lineno))
    throw detail::parse_error(path, lineno, "missing header");
  std::istringstream hs(line);
  std::string magic;
  long n = -1, d = -1, q = -1;
  int has_truth = -1;
  hs >> magic >> n >> d >> q >> has_truth;
  if (magic != "PLD1" || n < 0 || d < 1 || q < 1 || (has_truth != 0 && has_truth != 1))
    throw detail::parse_error(path, lineno, "malformed header, expected 'PLD1 N d Q has_truth'");

  PartialDataset ds;
  ds.X = Matrix(n, d);
  ds.candidates = Matrix(n, q);
  for (long i = 0; i < n; ++i) {
    if (!detail::next_line(in, line, lineno))
      throw detail::parse_error(path, lineno, "missing feature row " + std::to_string(i));
    std::istringstream ls(line);
    for (long c = 0; c < d; ++c)
      if (!(ls >> ds.X(i, c)))
        throw detail::parse_error(path, lineno, "bad feature value in row " + std::to_string(i));
  }
  for (long i = 0; i < n; ++i) {
    if (!detail::next_line(in, line, lineno))
      throw detail::parse_error(path, lineno, "missing candidate row " + std::to_string(i));
    std::istringstream ls(line);
    long idx, prev = -1, count = 0;
    while (ls >> idx) {
      if (idx < 0 || idx >= q)
        throw detail::parse_error(path, lineno, "candidate index out of range in row " +
                                                    std::to_string(i));
      if (idx <= prev)
        throw detail::parse_error(path, lineno, "candidate indices not strictly ascending in row " +
                                                    std::to_string(i));
      ds.candidates(i, idx) = 1.0;
      prev = idx;
      ++count;
    }
    if (count == 0)
      throw detail::parse_error(path, lineno, "empty candidate set in row " + std::to_string(i));
  }
  if (has_truth) {
    ds.truth.resize(n);
    for (long i = 0; i < n; ++i) {
      if (!detail::next_line(in, line, lineno))
        throw detail::parse_error(path, lineno, "missing truth row " + std::to_string(i));
      std::istringstream ls(line);
      if (!(ls >> ds.truth[i]))
        throw detail::parse_error(path, lineno, "bad truth value in row " + std::to_string(i));
      if (ds.truth[i] < 0 || ds.truth[i] >= q)
        throw detail::parse_error(path, lineno, "truth index out of range in row " +
                                                    std::to_string(i));
      if (ds.candidates(i, ds.truth[i]) == 0.0)
        throw detail::parse_error(path, lineno,
                                  "truth label not in candidate set in row " + std::to_string(i));
    }
  }
  ds.validate();
  return ds;
}

inline void write_dataset(const PartialDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream out(path, std::ios::binary);  // LF endings everywhere
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  out << "PLD1 " << ds.n() << " " << ds.dim() << " " << ds.classes() << " "
      << (ds.has_truth() ? 1 : 0) << "\n";
  char buf[40];
  for (std::size_t i = 0; i < ds.n(); ++i) {
    for (std::size_t c = 0; c < ds.dim(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", ds.X(i, c));
      out << buf << (c + 1 == ds.dim() ? "" : " ");
    }
    out << "\n";
  }
  for (std::size_t i = 0; i < ds.n(); ++i) {
    bool first = true;
    for (std::size_t c = 0; c < ds.classes(); ++c)
      if (ds.candidates(i, c) != 0.0) {
        if (!first) out << " ";
        out << c;
        first = false;
      }
    out << "\n";
  }
  if (ds.has_truth())
    for (std::size_t i = 0; i < ds.n(); ++i) out << ds.truth[i] << "\n";
  if (!out) throw std::runtime_error("write failed for dataset file: " + path);
}

// Synthetic partialization: keep the true label and add every other label
// independently with probability q.
inline PartialDataset partialize(const Matrix& x, const std::vector<int>& labels,
                                 std::size_t classes, double q, std::uint64_t seed) {
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("partialize: q must be in [0, 1]");
  PartialDataset ds;
  ds.X = x;
  ds.candidates = Matrix(x.rows(), classes);
  ds.truth = labels;
  Rng rng(seed, 0x70617274);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
      throw std::invalid_argument("partialize: label out of range at row " + std::to_string(i));
    ds.candidates(i, labels[i]) = 1.0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (c == static_cast<std::size_t>(labels[i])) continue;
      if (rng.uniform() < q) ds.candidates(i, c) = 1.0;
    }
  }
  ds.validate();
  return ds;
}

struct CleanDataset {
  Matrix X;
  std::vector<int> labels;
  std::size_t classes = 0;
};

// Class-balanced Gaussian clusters with unit within-class variance. The
// first 2d centers sit on signed coordinate axes at radius separation/sqrt(2),
// which makes every pairwise center distance at least `separation`; further
// classes fall back to random directions at the same radius.
inline CleanDataset make_blobs(std::size_t n, std::size_t classes, std::size_t dim,
                               double separation, std::uint64_t seed) {
  if (classes > n) throw std::invalid_argument("make_blobs: need Q <= N");
  Rng rng(seed, 0x626c6f62);
  Matrix centers(classes, dim);
  const double radius = separation / std::sqrt(2.0);
  for (std::size_t c = 0; c < classes; ++c) {
    if (c < 2 * dim) {
      const double sign = c < dim ? 1.0 : -1.0;
      centers(c, c % dim) = sign * radius;
    } else {
      double norm = 0.0;
      for (std::size_t j = 0; j < dim; ++j) {
        centers(c, j) = rng.gaussian();
        norm += centers(c, j) * centers(c, j);
      }
      norm = std::sqrt(norm);
      for (std::size_t j = 0; j < dim; ++j)
        centers(c, j) = norm > 0 ? centers(c, j) / norm * radius : 0.0;
    }
  }
  CleanDataset ds;
  ds.classes = classes;
  ds.X = Matrix(n, dim);
  ds.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = i % classes;  // class counts differ by at most 1
    ds.labels[i] = static_cast<int>(c);
    for (std::size_t j = 0; j < dim; ++j) ds.X(i, j) = centers(c, j) + rng.gaussian();
  }
  return ds;
}

struct FoldSpec {
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;
};

// Seeded shuffle then contiguous slices; fold sizes differ by at most 1.
inline FoldSpec kfold(std::size_t n, std::size_t folds, std::uint64_t seed) {
  if (folds == 0 || folds > n) throw std::invalid_argument("kfold: need 1 <= folds <= N");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, 0x666f6c64);
  rng.shuffle(idx);
  FoldSpec spec;
  spec.seed = seed;
  spec.folds.resize(folds);
  const std::size_t base = n / folds, extra = n % folds;
  std::size_t pos = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    const std::size_t sz = base + (f < extra ? 1 : 0);
    spec.folds[f].assign(idx.begin() + pos, idx.begin() + pos + sz);
    pos += sz;
  }
  return spec;
}

}  // namespace ddmp
