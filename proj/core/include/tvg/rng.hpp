#pragma once

#include <cstdint>
#include <random>

#include "tvg/grid.hpp"

namespace tvg {

/// Per-chain random stream.
///
/// Engine is std::mt19937_64 seeded with the 64-bit seed. Normals come from
/// std::normal_distribution<double> (Marsaglia polar method in libstdc++, which
/// caches the second variate of each pair), uniforms on [0, 1) from
/// std::uniform_real_distribution<double>. Both algorithms are fixed for a given
/// standard library build, so a seed reproduces a run bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  /// n iid standard normals, drawn in index order.
  Vector normals(Eigen::Index n) {
    Vector z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal();
    return z;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace tvg
