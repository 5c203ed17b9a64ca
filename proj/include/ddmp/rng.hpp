#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ddmp/matrix.hpp"

namespace ddmp {

// Seeded random stream. Gaussian draws use Box-Muller directly instead of
// std::normal_distribution so the byte stream is identical across standard
// library implementations and independent of distribution-object state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : key_(seed) {
    std::seed_seq seq{seed};
    gen_.seed(seq);
  }

  Rng(std::uint64_t seed, std::uint64_t stream)
      : key_(seed * 0x9e3779b97f4a7c15ull + stream + 1) {
    std::seed_seq seq{seed, stream};
    gen_.seed(seq);
  }

  // Derive an independent substream (e.g. one per fold or per draw).
  Rng substream(std::uint64_t salt) const { return Rng(key_, salt); }

  double uniform() {  // [0, 1)
    return (gen_() >> 11) * (1.0 / 9007199254740992.0);
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    std::uniform_int_distribution<std::uint64_t> d(0, n - 1);
    return d(gen_);
  }

  double gaussian() {
    double u1 = uniform();
    while (u1 <= 1e-300) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  void fill_gaussian(Matrix& m) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = gaussian();
  }

  Matrix gaussian_matrix(std::size_t rows, std::size_t cols) {
    Matrix m(rows, cols);
    fill_gaussian(m);
    return m;
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
  std::uint64_t key_ = 0;
};

}  // namespace ddmp
