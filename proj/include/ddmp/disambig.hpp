#pragma once

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <vector>

#include "ddmp/matrix.hpp"

namespace ddmp {

// Candidate sets as an N x Q 0/1 mask.
using CandidateMask = Matrix;

// Current label beliefs: row-stochastic pseudo-clean matrix S supported on
// candidate sets, the last denoised estimate, and the transition-aware
// matrix, advanced once per refinement epoch.
struct LabelState {
  Matrix S;         // N x Q
  Matrix S0_tilde;  // N x Q
  Matrix T_mat;     // Q x Q
  int epoch = 0;
};

// Symmetric k-nearest-neighbour adjacency under Euclidean distance:
// P_ij = 1 iff i is among the k nearest of j or vice versa; zero diagonal.
inline Matrix knn_adjacency(const Matrix& features, std::size_t k) {
  const std::size_t n = features.rows(), d = features.cols();
  if (k >= n) throw std::invalid_argument("knn_adjacency: k must be < N");
  Matrix p(n, n);
  std::vector<std::pair<double, std::size_t>> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        const double diff = features(i, c) - features(j, c);
        s += diff * diff;
      }
      dist[j] = {s, j};
    }
    dist[i].first = std::numeric_limits<double>::infinity();  // exclude self
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = dist[r].second;
      p(i, j) = 1.0;
      p(j, i) = 1.0;
    }
  }
  return p;
}

// Pairwise Jaccard similarity of candidate sets.
inline Matrix jaccard_matrix(const CandidateMask& candidates) {
  const std::size_t n = candidates.rows(), q = candidates.cols();
  std::vector<int> sizes(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < q; ++c) sizes[i] += candidates(i, c) != 0.0 ? 1 : 0;
    if (sizes[i] == 0)
      throw std::invalid_argument("jaccard_matrix: empty candidate set at row " +
                                  std::to_string(i));
  }
  Matrix j(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    j(a, a) = 1.0;
    for (std::size_t b = a + 1; b < n; ++b) {
      int inter = 0;
      for (std::size_t c = 0; c < q; ++c)
        if (candidates(a, c) != 0.0 && candidates(b, c) != 0.0) ++inter;
      const int uni = sizes[a] + sizes[b] - inter;
      j(a, b) = j(b, a) = static_cast<double>(inter) / uni;
    }
  }
  return j;
}

// Zero out mass outside the candidate set and renormalize rows; all-zero
// rows fall back to uniform over the candidates.
inline void mask_and_normalize_rows(Matrix& s, const CandidateMask& candidates) {
  const std::size_t n = s.rows(), q = s.cols();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    int cand = 0;
    for (std::size_t c = 0; c < q; ++c) {
      if (candidates(i, c) == 0.0)
        s(i, c) = 0.0;
      else {
        ++cand;
        if (s(i, c) < 0.0) s(i, c) = 0.0;
        sum += s(i, c);
      }
    }
    if (sum > 0.0) {
      for (std::size_t c = 0; c < q; ++c) s(i, c) /= sum;
    } else {
      for (std::size_t c = 0; c < q; ++c)
        s(i, c) = candidates(i, c) != 0.0 ? 1.0 / cand : 0.0;
    }
  }
}

// Initial pseudo-clean labels from instance/label complementarity:
// raw = (P .* J) Y, candidate-masked and row-normalized.
inline Matrix init_pseudo_clean(const Matrix& p, const Matrix& j,
                                const CandidateMask& candidates) {
  if (!p.same_shape(j) || p.rows() != candidates.rows())
    throw std::invalid_argument("init_pseudo_clean: shape mismatch");
  Matrix s = matmul(hadamard(p, j), candidates);
  mask_and_normalize_rows(s, candidates);
  return s;
}

// T_ij = p(y_i in candidate set | y = y_j), estimated from the current soft
// labels: T_ij = sum_n 1[y_i in S_n] S_nj / sum_n S_nj. Columns with no mass
// default to the corresponding unit vector.
inline Matrix estimate_transition(const Matrix& s, const CandidateMask& candidates) {
  const std::size_t n = s.rows(), q = s.cols();
  if (candidates.rows() != n || candidates.cols() != q)
    throw std::invalid_argument("estimate_transition: shape mismatch");
  Matrix t(q, q);
  std::vector<double> denom(q, 0.0);
  for (std::size_t row = 0; row < n; ++row)
    for (std::size_t j = 0; j < q; ++j) {
      const double w = s(row, j);
      if (w == 0.0) continue;
      denom[j] += w;
      for (std::size_t i = 0; i < q; ++i)
        if (candidates(row, i) != 0.0) t(i, j) += w;
    }
  for (std::size_t j = 0; j < q; ++j) {
    if (denom[j] > 0.0)
      for (std::size_t i = 0; i < q; ++i) t(i, j) /= denom[j];
    else
      t(j, j) = 1.0;
  }
  return t;
}

// Maps ambiguous posteriors back through the regularized inverse transition:
// rows of S0_tilde times (T_reg^{-1})^T with negatives clipped to zero.
// T_reg = (1-lambda) T + lambda I; a numerically singular T_reg falls back
// to the identity with a warning.
inline Matrix apply_inverse_transition(const Matrix& t_mat, const Matrix& s0_tilde,
                                       double lambda = 0.05) {
  const std::size_t q = t_mat.rows();
  if (t_mat.cols() != q || s0_tilde.cols() != q)
    throw std::invalid_argument("apply_inverse_transition: shape mismatch");
  Matrix t_reg = t_mat;
  t_reg *= (1.0 - lambda);
  for (std::size_t i = 0; i < q; ++i) t_reg(i, i) += lambda;
  Matrix inv;
  try {
    inv = inverse(t_reg);
  } catch (const std::runtime_error&) {
    std::cerr << "[ddmp] warning: transition matrix singular after regularization, "
                 "using identity\n";
    inv = Matrix::identity(q);
  }
  Matrix out = matmul_nt(s0_tilde, inv);
  for (std::size_t k = 0; k < out.size(); ++k)
    if (out[k] < 0.0) out[k] = 0.0;
  return out;
}

// Moving-average refinement:
//   S^{e+1} = normalize( (S^e + T^{-1} S0_tilde) .* S^e )
// with candidate masking re-applied before normalization.
inline LabelState update_pseudo_clean(const LabelState& state, const Matrix& s0_tilde,
                                      const CandidateMask& candidates,
                                      double lambda = 0.05) {
  if (!state.S.same_shape(s0_tilde))
    throw std::invalid_argument("update_pseudo_clean: shape mismatch");
  const Matrix corrected = apply_inverse_transition(state.T_mat, s0_tilde, lambda);
  Matrix next = state.S;
  for (std::size_t k = 0; k < next.size(); ++k)
    next[k] = (state.S[k] + corrected[k]) * state.S[k];
  mask_and_normalize_rows(next, candidates);
  LabelState out;
  out.S = std::move(next);
  out.S0_tilde = s0_tilde;
  out.T_mat = state.T_mat;
  out.epoch = state.epoch + 1;
  return out;
}

}  // namespace ddmp
