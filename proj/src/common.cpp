#include "cesarolab/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cesarolab/parallel.hpp"
#include "cesarolab/random.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::horizon_mismatch: return "horizon_mismatch";
    case ErrorCode::truncation_too_small: return "truncation_too_small";
    case ErrorCode::spectral_point: return "spectral_point";
    case ErrorCode::non_convergence: return "non_convergence";
    case ErrorCode::config_parse: return "config_parse";
    case ErrorCode::config_validation: return "config_validation";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

NormIndex::NormIndex(double p) : p_(p) {
  if (!(p >= 1.0))
    fail(ErrorCode::domain, "norm index p must be >= 1, got " + std::to_string(p));
}

bool NormIndex::is_inf() const noexcept { return std::isinf(p_); }

std::string NormIndex::str() const {
  if (is_inf()) return "inf";
  return format_double(p_);
}

NormIndex NormIndex::inf() { return NormIndex(std::numeric_limits<double>::infinity()); }

NormIndex NormIndex::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return inf();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::domain, "cannot parse norm index '" + text + "'");
  }
  if (used != text.size()) fail(ErrorCode::domain, "cannot parse norm index '" + text + "'");
  return NormIndex(v);
}

ComplexVector basis_vector(std::size_t dim, std::size_t k) {
  if (k < 1 || k > dim)
    fail(ErrorCode::domain, "basis index " + std::to_string(k) + " outside 1.." +
                                std::to_string(dim));
  ComplexVector e = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  e(static_cast<Eigen::Index>(k - 1)) = 1.0;
  return e;
}

std::size_t support_extent(const ComplexVector& x) {
  for (Eigen::Index i = x.size(); i > 0; --i)
    if (x(i - 1) != Complex(0.0, 0.0)) return static_cast<std::size_t>(i);
  return 0;
}

namespace {
unsigned g_threads = 1;
}

void set_thread_count(unsigned n) { g_threads = n == 0 ? 1 : n; }
unsigned thread_count() { return g_threads; }

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

Complex Rng::unit_disc() {
  // rejection from the square keeps the draw count data-independent per accept
  for (;;) {
    const double re = 2.0 * uniform() - 1.0;
    const double im = 2.0 * uniform() - 1.0;
    if (re * re + im * im <= 1.0) return {re, im};
  }
}

ComplexVector random_unit_vector(std::size_t dim, std::size_t support, double p, Rng& rng) {
  if (support == 0 || support > dim)
    fail(ErrorCode::domain, "random vector support must be in 1..dim");
  ComplexVector x = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < support; ++i) x(static_cast<Eigen::Index>(i)) = rng.unit_disc();
  double norm = 0.0;
  if (std::isinf(p)) {
    for (std::size_t i = 0; i < support; ++i)
      norm = std::max(norm, std::abs(x(static_cast<Eigen::Index>(i))));
  } else {
    for (std::size_t i = 0; i < support; ++i)
      norm += std::pow(std::abs(x(static_cast<Eigen::Index>(i))), p);
    norm = std::pow(norm, 1.0 / p);
  }
  if (norm == 0.0) return random_unit_vector(dim, support, p, rng);
  return x / norm;
}

ComplexMatrix random_disc_matrix(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = rng.unit_disc();
  return m;
}

}  // namespace cesarolab
