#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cesarolab/common.hpp"
#include "cesarolab/operator.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

enum class NormMethod { exact, sampled_lower_bound };

const char* to_string(NormMethod m);

struct NormResult {
  double value = 0.0;
  NormMethod method = NormMethod::exact;
  ComplexVector norming_vector;  // unit in l^p, ||M v||_p == value
  std::size_t iterations = 0;    // power iteration only
};

double vector_pnorm(const ComplexVector& x, NormIndex p);

struct NormOptions {
  double tolerance = 1e-10;
  std::size_t max_iterations = 10000;
  std::size_t samples = 1000;  // sampled lower bound: random unit vectors
  std::uint64_t seed = 0;
};

/// p = 1: max column sum; p = inf: max row sum; p = 2: power iteration on
/// M^* M; anything else: best of `samples` random unit vectors and all basis
/// vectors, flagged sampled_lower_bound.
NormResult operator_pnorm(const ComplexMatrix& m, NormIndex p,
                          const NormOptions& opts = {});
NormResult operator_pnorm(const DenseOperator& m, NormIndex p,
                          const NormOptions& opts = {});

/// Norm of sum_j coeffs[j] T^j for a truncated shift, without forming the
/// matrix. Entry (i, i+j) is coeffs[j] (i+j / i)^beta.
NormResult shift_poly_pnorm(const WeightedShift& shift,
                            std::span<const Complex> coeffs, NormIndex p,
                            const NormOptions& opts = {});

struct ResolventResult {
  NormResult norm;
  double residual = 0.0;  // ||(lambda I - M) R - I||_inf
};

/// ||(lambda I - M)^{-1}||_p. Throws ErrorCode::spectral_point if singular.
ResolventResult resolvent_norm(const ComplexMatrix& m, Complex lambda, NormIndex p,
                               const NormOptions& opts = {});

enum class KreissMode { classic, uniform };

struct KreissGrid {
  std::vector<double> radii;    // |lambda|
  std::size_t angles = 64;      // theta_k = 2 pi k / angles
  std::size_t horizon = 0;      // uniform mode: n = 0..horizon

  static KreissGrid standard(std::size_t angles = 64, std::size_t horizon = 0);
  std::string describe() const;
};

/// classic: (|l|-1) ||(l - M)^{-1}||_p per grid point.
/// uniform: (|l|-1) ||sum_{k<=n} l^{-k-1} M^k||_p per grid point and n.
/// Meta carries "supremum" and the grid index where it is first reached.
/// Large suprema are evidence, not proof.
SeriesReport kreiss_probe(const DenseOperator& m, NormIndex p, const KreissGrid& grid,
                          KreissMode mode, const NormOptions& opts = {});

struct SpectrumEntry {
  Complex eigenvalue;
  double distance_to_circle = 0.0;  // |1 - |lambda||
};

struct SpectrumReport {
  std::vector<SpectrumEntry> eigenvalues;
  std::vector<Complex> on_circle;   // within tolerance of |z| = 1
  bool peripheral_in_one = true;    // sigma(T) cap circle subset {1}
  double tolerance = 1e-8;
};

/// Dense eigensolve, D <= 64.
SpectrumReport spectrum_unit_circle_report(const DenseOperator& m,
                                           double tolerance = 1e-8);

}  // namespace cesarolab
