#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace cesarolab {

/// Order alpha >= 0 of a Cesaro kernel. Zero selects the Kronecker delta.
class FractionalOrder {
public:
  explicit FractionalOrder(double alpha);

  double value() const noexcept { return alpha_; }
  bool is_delta() const noexcept { return alpha_ == 0.0; }

private:
  double alpha_;
};

inline constexpr std::size_t kDefaultHorizonCap = std::size_t{1} << 20;

/// k^alpha(0..N), built by the product recurrence
///   k(0) = 1,  k(n+1) = k(n) (n + alpha) / (n + 1)
/// which stays finite long after Gamma(alpha + n) overflows.
class KernelSeq {
public:
  KernelSeq(FractionalOrder alpha, std::vector<double> values);

  FractionalOrder order() const noexcept { return alpha_; }
  double alpha() const noexcept { return alpha_.value(); }
  std::size_t horizon() const noexcept { return values_.size() - 1; }
  double operator[](std::size_t n) const { return values_[n]; }
  std::span<const double> values() const noexcept { return values_; }

private:
  FractionalOrder alpha_;
  std::vector<double> values_;
};

/// Throws ErrorCode::domain when N exceeds kDefaultHorizonCap and
/// `allow_large_horizon` is false.
KernelSeq kernel_seq(FractionalOrder alpha, std::size_t N,
                     bool allow_large_horizon = false);

/// Causal convolution (a*b)(n) = sum_{j<=n} a(n-j) b(j). Equal lengths required.
std::vector<double> kernel_convolve(std::span<const double> a,
                                    std::span<const double> b);
std::vector<double> kernel_convolve(const KernelSeq& a, const KernelSeq& b);

/// k^alpha(n) / k^{alpha+1}(n) = alpha / (n + alpha); equals 1 when alpha = 0
/// and n = 0, 0 when alpha = 0 and n > 0.
double kernel_mean_ratio(double alpha, std::size_t n);

struct KernelBoundRow {
  std::size_t n = 0;
  double value = 0.0;
  double lower = 0.0;  // (n+1)^{alpha-1} / Gamma(alpha)
  double upper = 0.0;  // n^{alpha-1} / Gamma(alpha)
  bool within = false;
  double asymptotic_ratio = 0.0;  // k(n) Gamma(alpha) / n^{alpha-1}
};

struct KernelBoundsReport {
  double alpha = 0.0;
  bool all_within = true;
  std::vector<KernelBoundRow> rows;  // n = 1..N
};

/// Gautschi sandwich for 1 <= n <= N. Domain error unless 0 < alpha <= 1.
KernelBoundsReport kernel_bounds_report(FractionalOrder alpha, std::size_t N);

/// k(n) Gamma(alpha) / n^{alpha-1} for n = 1..N; tends to 1 like O(1/n).
/// Any alpha > 0.
std::vector<double> kernel_asymptotic_ratio(FractionalOrder alpha, std::size_t N);

}  // namespace cesarolab
