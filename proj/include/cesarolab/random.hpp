#pragma once

#include <cstdint>
#include <random>

#include "cesarolab/common.hpp"

namespace cesarolab {

/// Independent stream per (seed, stream index). Doubles are built from raw
/// 64-bit draws so output is identical across standard libraries.
class Rng {
public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on the closed unit disc.
  Complex unit_disc();

private:
  std::mt19937_64 engine_;
};

/// Random vector with entries uniform in the unit disc on the first
/// `support` coordinates, normalised to unit l^p norm.
ComplexVector random_unit_vector(std::size_t dim, std::size_t support, double p,
                                 Rng& rng);

/// Random matrix with entries uniform in the unit disc.
ComplexMatrix random_disc_matrix(std::size_t dim, Rng& rng);

}  // namespace cesarolab
