// Deterministic builders for the model families used by tests and experiments.
//
// Windows and selected indices are 1-based and inclusive, matching the
// experiment config format.

#pragma once

#include "zeno/engine.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

namespace zeno {

enum class ModelKind { random, commuting, laplacian, momentum_circle };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

struct Window {
  Index first = 1;
  Index last = 1;
};

struct ModelSpec {
  ModelKind kind = ModelKind::random;
  Index dim = 0;
  Index rank = 0;                  // random
  std::optional<Window> window;    // laplacian, momentum-circle
  std::vector<Index> indices;      // commuting
  std::vector<double> spectrum;    // commuting; drawn from the seed when empty
  double spectral_radius = 1.0;
  std::uint64_t seed = 0;
};

// Haar-like unitary: QR of a complex Gaussian matrix with the phases of R's
// diagonal folded into Q.
ComplexMatrix random_unitary(Index dim, std::mt19937_64& rng);

ZenoModel random_model(Index dim, Index rank, double spectral_radius, std::uint64_t seed);

ZenoModel commuting_model(Index dim, const std::vector<Index>& selected_indices,
                          const std::vector<double>& spectrum, std::uint64_t seed);

// Dirichlet second difference (2 on the diagonal, −1 off it) with a
// coordinate window; eigenpairs from the closed-form sine basis.
ZenoModel lattice_laplacian_model(Index n, Window window);

// H = −i d/dx on a circle of length 2π sampled at N points: integer
// frequencies in [−N/2, N/2) with plane-wave eigenvectors, so e^{−isH} is an
// exact cyclic shift whenever s is a multiple of 2π/N. Flagged out of
// assumption (H is not non-negative).
ZenoModel momentum_circle_model(Index n, Window window);

// Grid points N/4+1 .. 3N/4.
Window middle_half_window(Index n);

ZenoModel build_model(const ModelSpec& spec);

}  // namespace zeno
