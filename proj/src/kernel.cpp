#include "cesarolab/kernel.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "cesarolab/common.hpp"

namespace cesarolab {

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    fail(ErrorCode::domain, "alpha must be a finite non-negative number, got " +
                                std::to_string(alpha));
}

KernelSeq::KernelSeq(FractionalOrder alpha, std::vector<double> values)
    : alpha_(alpha), values_(std::move(values)) {
  if (values_.empty()) fail(ErrorCode::domain, "kernel sequence needs at least one value");
}

KernelSeq kernel_seq(FractionalOrder alpha, std::size_t N, bool allow_large_horizon) {
  if (N > kDefaultHorizonCap && !allow_large_horizon)
    fail(ErrorCode::domain, "horizon " + std::to_string(N) +
                                " exceeds the default cap 2^20; pass the override flag");
  std::vector<double> k(N + 1, 0.0);
  k[0] = 1.0;
  if (alpha.is_delta()) return KernelSeq(alpha, std::move(k));
  const double a = alpha.value();
  for (std::size_t n = 0; n < N; ++n) {
    const double nd = static_cast<double>(n);
    k[n + 1] = k[n] * (nd + a) / (nd + 1.0);
  }
  return KernelSeq(alpha, std::move(k));
}

std::vector<double> kernel_convolve(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorCode::horizon_mismatch,
         "convolution horizons differ: " + std::to_string(a.size()) + " vs " +
             std::to_string(b.size()));
  std::vector<double> out(a.size(), 0.0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    double s = 0.0;
    for (std::size_t j = 0; j <= n; ++j) s += a[n - j] * b[j];
    out[n] = s;
  }
  return out;
}

std::vector<double> kernel_convolve(const KernelSeq& a, const KernelSeq& b) {
  return kernel_convolve(a.values(), b.values());
}

double kernel_mean_ratio(double alpha, std::size_t n) {
  if (alpha == 0.0) return n == 0 ? 1.0 : 0.0;
  return alpha / (static_cast<double>(n) + alpha);
}

KernelBoundsReport kernel_bounds_report(FractionalOrder alpha, std::size_t N) {
  const double a = alpha.value();
  if (!(a > 0.0 && a <= 1.0))
    fail(ErrorCode::domain, "Gautschi bounds need 0 < alpha <= 1, got " + std::to_string(a));
  const KernelSeq k = kernel_seq(alpha, N);
  const double gamma_a = std::tgamma(a);
  KernelBoundsReport report;
  report.alpha = a;
  report.rows.reserve(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const double nd = static_cast<double>(n);
    KernelBoundRow row;
    row.n = n;
    row.value = k[n];
    row.lower = std::pow(nd + 1.0, a - 1.0) / gamma_a;
    row.upper = std::pow(nd, a - 1.0) / gamma_a;
    row.within = row.lower <= row.value && row.value <= row.upper;
    row.asymptotic_ratio = row.value * gamma_a / std::pow(nd, a - 1.0);
    report.all_within = report.all_within && row.within;
    report.rows.push_back(row);
  }
  return report;
}

std::vector<double> kernel_asymptotic_ratio(FractionalOrder alpha, std::size_t N) {
  const double a = alpha.value();
  if (!(a > 0.0)) fail(ErrorCode::domain, "asymptotic ratio needs alpha > 0");
  const KernelSeq k = kernel_seq(alpha, N);
  const double gamma_a = std::tgamma(a);
  std::vector<double> out;
  out.reserve(N);
  for (std::size_t n = 1; n <= N; ++n)
    out.push_back(k[n] * gamma_a / std::pow(static_cast<double>(n), a - 1.0));
  return out;
}

}  // namespace cesarolab
