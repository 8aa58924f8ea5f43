#pragma once

#include "zeno/engine.hpp"

#include <random>
#include <string>

namespace zeno::testing {

inline ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Index>(values.size()), static_cast<Index>(values.size()));
  Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

inline ComplexMatrix random_hermitian(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = Complex(g(rng), g(rng));
  return (a + a.adjoint()) / 2.0;
}

inline ComplexMatrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ComplexMatrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

// Model from a dense Hermitian H and an isometry V.
inline ZenoModel dense_model(const ComplexMatrix& h, const ComplexMatrix& v, bool commuting = false) {
  return ZenoModel("dense", hermitian_eig(h), SubspaceProjection(v), commuting);
}

inline ZenoModel scalar_model(double lambda) {
  ComplexMatrix h(1, 1);
  h(0, 0) = lambda;
  return dense_model(h, ComplexMatrix::Identity(1, 1));
}

}  // namespace zeno::testing
