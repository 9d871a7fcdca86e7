#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cesarolab/common.hpp"
#include "cesarolab/operator.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

/// A^alpha_N(x) = (1/k^{alpha+1}(N)) sum_{j<=N} k^alpha(N-j) ||T^j x||_p for a
/// unit x. The input is normalised first; its original norm is kept.
struct AbsFunctionalValue {
  double alpha = 0.0;
  std::size_t N = 0;
  double p = 1.0;
  double value = 0.0;
  double input_norm = 0.0;
  std::string witness;
};

AbsFunctionalValue abs_cesaro_functional(const LinearOperator& op, double alpha,
                                         std::size_t N, const ComplexVector& x,
                                         NormIndex p, std::string witness = "x");

/// A^alpha_n(x / ||x||_p) for every n = 0..N from a single orbit.
std::vector<double> abs_functional_series(const LinearOperator& op, double alpha,
                                          std::size_t N, const ComplexVector& x,
                                          NormIndex p);

struct ProbeStrategy {
  enum class Kind { basis, random, witness, all };
  Kind kind = Kind::basis;
  std::size_t count = 0;   // random vectors
  std::uint64_t seed = 0;
  std::size_t support = 0; // random vectors: leading coordinates, 0 = largest allowed

  static ProbeStrategy basis() { return {}; }
  static ProbeStrategy random(std::size_t count, std::uint64_t seed);
  static ProbeStrategy parse(const std::string& name, std::size_t count, std::uint64_t seed);
  std::string name() const;
};

/// Per-n maximum of A^alpha_n over the probe set, n = 0..N, with the running
/// supremum over n' <= n. For p = 1 the basis strategy is exact (the functional
/// is a seminorm, so its sup over the l^1 ball sits at some e_k); everything else
/// is a lower bound. Columns: n, sup_at_n, running_sup, argmax_probe,
/// truncation_sensitivity. Shift truncation defaults to 2(N+1).
SeriesReport abs_cesaro_sup_estimate(const LinearOperator& op, double alpha, std::size_t N,
                                     NormIndex p, const ProbeStrategy& strategy);

/// y_{N+1} = (N+1)^{-1/p} (e_1 + ... + e_{N+1}). N must be even.
ComplexVector witness_vector(std::size_t N, NormIndex p, std::size_t dim);

/// Shift with beta = 1/p. Columns: N, value = ||M^alpha(N) y_{N+1}||_p^p,
/// log_term = ln(N/2 + 1), ratio = value / log_term, fit = slope * log_term +
/// intercept from a least-squares fit of value on log_term.
SeriesReport prop21_divergence_series(NormIndex p, double alpha,
                                      const std::vector<std::size_t>& Ns);

struct GrowthFit {
  double exponent = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log residuals
  std::size_t first = 0;
  std::size_t last = 0;
  std::size_t points = 0;
};

/// Least squares of log ||T^n|| on log(n+1) over n in [first, last].
/// Fewer than 8 points or a zero norm in the window -> ErrorCode::domain.
GrowthFit growth_exponent_fit(const OrbitNormTable& table, std::size_t first,
                              std::size_t last);
GrowthFit growth_exponent_fit(const std::vector<double>& values, std::size_t first,
                              std::size_t last);

/// Columns: n, norm, ratio = ||T^n|| / n^alpha for n >= 1.
SeriesReport small_o_ratio_series(const OrbitNormTable& table, double alpha);

}  // namespace cesarolab
