#include "zeno/models.hpp"

#include "zeno/format.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <string>

namespace zeno {

namespace {

// Sort eigenpairs ascending by eigenvalue.
SpectralOperator sorted_spectral(const std::vector<double>& values, const ComplexMatrix& vectors) {
  const auto n = static_cast<Index>(values.size());
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
  RealVector lambdas(n);
  ComplexMatrix u(n, n);
  for (Index i = 0; i < n; ++i) {
    lambdas(i) = values[order[i]];
    u.col(i) = vectors.col(order[i]);
  }
  return SpectralOperator(std::move(lambdas), std::move(u));
}

ComplexMatrix coordinate_isometry(Index n, Window w) {
  ComplexMatrix v = ComplexMatrix::Zero(n, w.last - w.first + 1);
  for (Index j = w.first; j <= w.last; ++j) v(j - 1, j - w.first) = 1.0;
  return v;
}

void require_window(Index n, Window w, std::string_view what) {
  if (w.first < 1 || w.last > n || w.first > w.last)
    throw ValidationError(std::string(what) + ": window must be a sub-range of 1..N");
}

std::string num(double x) { return format_double(x); }

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::random: return "random";
    case ModelKind::commuting: return "commuting";
    case ModelKind::laplacian: return "laplacian";
    case ModelKind::momentum_circle: return "momentum-circle";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "random") return ModelKind::random;
  if (name == "commuting") return ModelKind::commuting;
  if (name == "laplacian") return ModelKind::laplacian;
  if (name == "momentum-circle") return ModelKind::momentum_circle;
  throw ValidationError("unknown model kind: " + std::string(name));
}

ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  ComplexMatrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Index j = 0; j < dim; ++j) {
    const Complex d = r(j, j);
    const double m = std::abs(d);
    if (m > 0.0) q.col(j) *= d / m;
  }
  return q;
}

ZenoModel random_model(Index dim, Index rank, double spectral_radius, std::uint64_t seed) {
  if (rank < 1 || rank > dim) throw ValidationError("random_model: need 1 <= rank <= dim");
  if (!(spectral_radius > 0.0)) throw ValidationError("random_model: spectral_radius must be > 0");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, spectral_radius);
  std::vector<double> lambdas(static_cast<std::size_t>(dim));
  for (auto& l : lambdas) l = uniform(rng);
  const ComplexMatrix u = random_unitary(dim, rng);
  const ComplexMatrix w = random_unitary(dim, rng);
  std::string id = "random-d" + std::to_string(dim) + "-r" + std::to_string(rank) + "-rad" +
                   num(spectral_radius) + "-s" + std::to_string(seed);
  return ZenoModel(std::move(id), sorted_spectral(lambdas, u), SubspaceProjection(w.leftCols(rank)));
}

ZenoModel commuting_model(Index dim, const std::vector<Index>& selected_indices,
                          const std::vector<double>& spectrum, std::uint64_t seed) {
  if (dim < 1) throw ValidationError("commuting_model: dim must be >= 1");
  if (static_cast<Index>(spectrum.size()) != dim)
    throw ValidationError("commuting_model: spectrum must have dim entries");
  if (selected_indices.empty()) throw ValidationError("commuting_model: no indices selected");
  std::set<Index> seen;
  for (Index idx : selected_indices) {
    if (idx < 1 || idx > dim) throw ValidationError("commuting_model: index out of range");
    if (!seen.insert(idx).second) throw ValidationError("commuting_model: duplicate index");
  }
  std::mt19937_64 rng(seed);
  const ComplexMatrix u = random_unitary(dim, rng);
  ComplexMatrix v(dim, static_cast<Index>(selected_indices.size()));
  for (std::size_t j = 0; j < selected_indices.size(); ++j) v.col(static_cast<Index>(j)) = u.col(selected_indices[j] - 1);
  std::string id = "commuting-d" + std::to_string(dim) + "-k" + std::to_string(selected_indices.size()) +
                   "-s" + std::to_string(seed);
  return ZenoModel(std::move(id), sorted_spectral(spectrum, u), SubspaceProjection(std::move(v)),
                   /*commuting=*/true);
}

ZenoModel lattice_laplacian_model(Index n, Window window) {
  if (n < 4) throw ValidationError("lattice_laplacian_model: N must be >= 4");
  require_window(n, window, "lattice_laplacian_model");
  const double denom = static_cast<double>(n + 1);
  RealVector lambdas(n);
  ComplexMatrix u(n, n);
  const double norm = std::sqrt(2.0 / denom);
  for (Index k = 1; k <= n; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k) / denom;
    lambdas(k - 1) = 2.0 - 2.0 * std::cos(theta);
    for (Index j = 1; j <= n; ++j) u(j - 1, k - 1) = norm * std::sin(theta * static_cast<double>(j));
  }
  std::string id = "laplacian-N" + std::to_string(n) + "-w" + std::to_string(window.first) + ".." +
                   std::to_string(window.last);
  return ZenoModel(std::move(id), SpectralOperator(std::move(lambdas), std::move(u)),
                   SubspaceProjection(coordinate_isometry(n, window)));
}

ZenoModel momentum_circle_model(Index n, Window window) {
  if (n < 64 || (n & (n - 1)) != 0) throw ValidationError("momentum_circle_model: N must be a power of two >= 64");
  require_window(n, window, "momentum_circle_model");
  if (window.first <= 1 || window.last >= n)
    throw ValidationError("momentum_circle_model: window must lie strictly inside the chart");

  CircleChart chart;
  chart.points = n;
  chart.grid_step = 2.0 * std::numbers::pi / static_cast<double>(n);
  chart.first = window.first - 1;
  chart.last = window.last - 1;

  RealVector freqs(n);
  ComplexMatrix u(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index c = 0; c < n; ++c) {
    const Index k = c - n / 2;
    freqs(c) = static_cast<double>(k);
    for (Index j = 0; j < n; ++j) {
      // k·x_j = 2π k j / N, reduced mod N in integers to keep the phase exact.
      const Index phase = ((k * j) % n + n) % n;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n);
      u(j, c) = scale * Complex(std::cos(angle), std::sin(angle));
    }
  }
  std::string id = "momentum-circle-N" + std::to_string(n) + "-w" + std::to_string(window.first) + ".." +
                   std::to_string(window.last);
  return ZenoModel(std::move(id), SpectralOperator(std::move(freqs), std::move(u)),
                   SubspaceProjection(coordinate_isometry(n, window)),
                   /*commuting=*/false, /*out_of_assumption=*/true, chart);
}

Window middle_half_window(Index n) { return {n / 4 + 1, 3 * n / 4}; }

ZenoModel build_model(const ModelSpec& spec) {
  switch (spec.kind) {
    case ModelKind::random:
      return random_model(spec.dim, spec.rank, spec.spectral_radius, spec.seed);
    case ModelKind::commuting: {
      std::vector<double> spectrum = spec.spectrum;
      if (spectrum.empty()) {
        if (!(spec.spectral_radius > 0.0)) throw ValidationError("commuting model: spectral_radius must be > 0");
        // Separate stream from the unitary so the spectrum does not perturb it.
        std::mt19937_64 rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
        std::uniform_real_distribution<double> uniform(0.0, spec.spectral_radius);
        spectrum.resize(static_cast<std::size_t>(std::max<Index>(spec.dim, 0)));
        for (auto& s : spectrum) s = uniform(rng);
      }
      return commuting_model(spec.dim, spec.indices, spectrum, spec.seed);
    }
    case ModelKind::laplacian:
      return lattice_laplacian_model(spec.dim, spec.window.value_or(Window{1, spec.dim}));
    case ModelKind::momentum_circle:
      return momentum_circle_model(spec.dim, spec.window.value_or(middle_half_window(spec.dim)));
  }
  throw ValidationError("build_model: unknown kind");
}

}  // namespace zeno
