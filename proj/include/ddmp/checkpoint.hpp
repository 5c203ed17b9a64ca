#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ddmp/matrix.hpp"
#include "ddmp/param.hpp"

namespace ddmp {

// Flat text checkpoint container, version-tagged.
//
//   DDMPCKPT1 <tensor_count>
//   <name> <rows> <cols>
//   <row-major values, one line>
//   ...
//
// Values are printed with %.17g so a save/load round trip is exact.
class Checkpoint {
 public:
  void put(const std::string& name, const Matrix& m) { tensors_[name] = m; }

  void put_params(const std::string& prefix, const ParamRefs& params) {
    for (const Param* p : params) put(prefix + p->name, p->value);
  }

  bool has(const std::string& name) const { return tensors_.count(name) != 0; }

  const Matrix& get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
      throw std::runtime_error("checkpoint: missing tensor '" + name + "'");
    return it->second;
  }

  void load_params(const std::string& prefix, const ParamRefs& params) const {
    for (Param* p : params) {
      const Matrix& m = get(prefix + p->name);
      if (!m.same_shape(p->value))
        throw std::runtime_error("checkpoint: shape mismatch for '" + prefix + p->name + "'");
      p->value = m;
    }
  }

  double scalar(const std::string& name) const {
    const Matrix& m = get(name);
    if (m.size() != 1) throw std::runtime_error("checkpoint: '" + name + "' is not a scalar");
    return m[0];
  }

  void put_scalar(const std::string& name, double v) {
    Matrix m(1, 1);
    m[0] = v;
    put(name, m);
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("checkpoint: cannot write " + path);
    out << "DDMPCKPT1 " << tensors_.size() << "\n";
    char buf[40];
    for (const auto& [name, m] : tensors_) {
      out << name << " " << m.rows() << " " << m.cols() << "\n";
      for (std::size_t k = 0; k < m.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", m[k]);
        out << buf << (k + 1 == m.size() ? "" : " ");
      }
      out << "\n";
    }
    if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
  }

  static Checkpoint load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    std::string magic;
    std::size_t count = 0;
    in >> magic >> count;
    if (magic != "DDMPCKPT1")
      throw std::runtime_error("checkpoint: bad magic in " + path);
    Checkpoint ck;
    for (std::size_t i = 0; i < count; ++i) {
      std::string name;
      std::size_t rows, cols;
      if (!(in >> name >> rows >> cols))
        throw std::runtime_error("checkpoint: truncated header in " + path);
      Matrix m(rows, cols);
      for (std::size_t k = 0; k < m.size(); ++k)
        if (!(in >> m[k]))
          throw std::runtime_error("checkpoint: truncated values for '" + name + "'");
      ck.tensors_[name] = std::move(m);
    }
    return ck;
  }

  const std::map<std::string, Matrix>& tensors() const { return tensors_; }

 private:
  std::map<std::string, Matrix> tensors_;
};

}  // namespace ddmp
