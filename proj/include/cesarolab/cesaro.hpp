#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cesarolab/common.hpp"
#include "cesarolab/kernel.hpp"
#include "cesarolab/norms.hpp"
#include "cesarolab/operator.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

/// Delta^{-alpha} T(n) x = sum_{j<=n} k^alpha(n-j) T^j x.
ComplexVector cesaro_sum_apply(const LinearOperator& op, double alpha, std::size_t n,
                               const ComplexVector& x);

/// M^alpha(n) x = Delta^{-alpha} T(n) x / k^{alpha+1}(n).
ComplexVector cesaro_mean_apply(const LinearOperator& op, double alpha, std::size_t n,
                                const ComplexVector& x);

/// M^alpha(n)x for every n = 0..N from one stored orbit.
std::vector<ComplexVector> cesaro_mean_orbit(const LinearOperator& op, double alpha,
                                             std::size_t N, const ComplexVector& x);

/// Coefficients c_j of M^alpha(n) = sum_j c_j T^j: c_j = k^alpha(n-j)/k^{alpha+1}(n).
std::vector<Complex> mean_coefficients(double alpha, std::size_t n);

ComplexMatrix cesaro_mean_matrix(const LinearOperator& op, double alpha, std::size_t n);

enum class MeanDifferenceMode { diff, times_TminusI, times_TminusI_sq, kt_power };

const char* to_string(MeanDifferenceMode m);
MeanDifferenceMode parse_mean_difference_mode(const std::string& s);

/// Per-n p-norm, n = 0..N, of
///   diff:             M(n+1) - M(n)
///   times_TminusI:    M(n)(T - I)
///   times_TminusI_sq: M(n)(T - I)^2
///   kt_power:         T^n (T - I)
/// Shifts are evaluated on dim D (needs D >= 2(N+1)) and again on 2D; the
/// relative drift goes in column "truncation_sensitivity".
SeriesReport mean_difference_series(const LinearOperator& op, double alpha, std::size_t N,
                                    NormIndex p, MeanDifferenceMode mode,
                                    const NormOptions& opts = {});

/// Residuals ||LHS - RHS||_inf of the mean-difference identities. Both sides
/// are assembled from raw powers T^j; none of them uses the closed recurrence.
///   first:      alpha = 1, M(n+1) - M(n) = (T^{n+1} - M(n+1)) / (n+1)
///   second:     M(n+1) - M(n) = M(n)(T-I) + alpha/(n+1) (I - M(n+1))
///   third:      alpha >= 1, M(n+1) - M(n) = alpha/(n+1) (M^{alpha-1}(n+1) - M(n+1))
///   third_alt:  alpha >= 1, M(n+1) - M(n) = alpha/(n+alpha+1) (M^{alpha-1}(n+1) - M(n))
///   corrected:  M(n+1) - M(n) = a I + b M(n)(T-I) - a M(n), a = alpha/(n+alpha+1),
///               b = (n+1)/(n+alpha+1)
///   printed:    same with +a M(n) as the last term (fails; kept for comparison)
struct IdentityResiduals {
  std::optional<double> first;
  double second = 0.0;
  std::optional<double> third;
  std::optional<double> third_alt;
  double corrected = 0.0;
  double printed = 0.0;
  double scale = 1.0;  // 1 + ||T||_inf^{n+1}
};

IdentityResiduals identity_residuals(const DenseOperator& op, double alpha, std::size_t n);

/// Columns: n, dist_to_last = ||M(n)x - M(N)x||_p, cauchy = ||M(n+1)x - M(n)x||_p
/// (0 on the last row), mean_norm = ||M(n)x||_p.
SeriesReport ergodic_limit_probe(const LinearOperator& op, double alpha,
                                 const ComplexVector& x, std::size_t N, NormIndex p);

}  // namespace cesarolab
