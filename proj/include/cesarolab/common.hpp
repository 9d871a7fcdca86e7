#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cesarolab {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

enum class ErrorCode {
  domain,
  horizon_mismatch,
  truncation_too_small,
  spectral_point,
  non_convergence,
  config_parse,
  config_validation,
  io,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library. `code` is what the CLI writes into
/// the machine-readable error record.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

/// Norm index p in [1, inf]; infinity is std::numeric_limits<double>::infinity().
class NormIndex {
public:
  NormIndex(double p);  // NOLINT: implicit on purpose, p reads naturally as a double

  double value() const noexcept { return p_; }
  bool is_inf() const noexcept;
  std::string str() const;  // "1", "2", "inf", "1.5"

  static NormIndex inf();
  /// Accepts "inf", "infinity" or a decimal number.
  static NormIndex parse(const std::string& text);

private:
  double p_;
};

/// Canonical basis vector e_k, 1-based as on l^p(N).
ComplexVector basis_vector(std::size_t dim, std::size_t k);

/// 1 + index of the last non-zero entry; 0 for the zero vector.
std::size_t support_extent(const ComplexVector& x);

}  // namespace cesarolab
