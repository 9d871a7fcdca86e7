#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <istream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cesarolab/common.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

/// Unilateral weighted backward shift on the first D coordinates of l^p(N):
///   T e_1 = 0,  T e_j = w_j e_{j-1},  w_j = (j / (j-1))^beta,  w_1 := 1.
///
/// span{e_1..e_D} is invariant under T, so powers and polynomials of the
/// truncated operator are exact compressions of the infinite operator. The
/// matrix is never formed unless one of the materialize_* calls asks for it.
class WeightedShift {
public:
  WeightedShift(double beta, std::size_t dim);

  double beta() const noexcept { return beta_; }
  std::size_t dim() const noexcept { return weights_.size(); }
  std::string id() const;

  /// w_j, 1-based.
  double weight(std::size_t j) const;

  /// Product of the weights met moving e_from down `steps` places:
  /// (from / (from - steps))^beta, evaluated in the log domain; 0 when the
  /// vector is annihilated (steps >= from). 1-based `from`.
  double transfer(std::size_t from, std::size_t steps) const {
    if (from < 1 || from > dim()) fail(ErrorCode::domain, "transfer index out of range");
    if (steps >= from) return 0.0;
    if (steps == 0) return 1.0;
    return pow_pos_[from] * pow_neg_[from - steps];
  }

  ComplexVector apply(const ComplexVector& x) const;
  ComplexVector apply_adjoint(const ComplexVector& x) const;

  /// sum_j coeffs[j] T^j x, and its adjoint.
  ComplexVector apply_poly(std::span<const Complex> coeffs,
                           const ComplexVector& x) const;
  ComplexVector apply_poly_adjoint(std::span<const Complex> coeffs,
                                   const ComplexVector& x) const;

  ComplexMatrix materialize() const;
  /// T^n formed column by column through repeated apply().
  ComplexMatrix materialize_power(std::size_t n) const;
  ComplexMatrix materialize_poly(std::span<const Complex> coeffs) const;

  WeightedShift with_dim(std::size_t dim) const { return {beta_, dim}; }

private:
  double beta_;
  std::vector<double> weights_;  // weights_[j-1] = w_j
  std::vector<double> pow_pos_;  // pow_pos_[i] = i^beta, i = 0..D
  std::vector<double> pow_neg_;  // pow_neg_[i] = i^{-beta}
};

WeightedShift build_weighted_shift(double beta, std::size_t dim);

class DenseOperator {
public:
  DenseOperator(ComplexMatrix matrix, std::string id);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const std::string& id() const noexcept { return id_; }

  ComplexVector apply(const ComplexVector& x) const { return matrix_ * x; }

private:
  ComplexMatrix matrix_;
  std::string id_;
};

DenseOperator build_dense(const std::vector<std::vector<Complex>>& entries,
                          std::string id = "dense");
/// [[-1, 2], [0, -1]]
DenseOperator assani();
DenseOperator identity_operator(std::size_t dim);

/// Text format: first line "D", then D rows of D entries "re,im" separated
/// by whitespace.
DenseOperator parse_dense(std::istream& in, std::string id = "dense-file");
DenseOperator load_dense(const std::filesystem::path& path);
void save_dense(const DenseOperator& op, const std::filesystem::path& path);

using LinearOperator = std::variant<WeightedShift, DenseOperator>;

std::size_t dim(const LinearOperator& op);
std::string operator_id(const LinearOperator& op);
ComplexVector apply(const LinearOperator& op, const ComplexVector& x);
ComplexMatrix materialize(const LinearOperator& op);
bool is_shift(const LinearOperator& op);

/// Iterates T^j x for j = 0..N. For a shift, N + support(x) <= D must hold
/// or ErrorCode::truncation_too_small is thrown. `extent[j]` bounds the
/// support of states[j] (entries at and past it are zero).
struct Orbit {
  std::vector<ComplexVector> states;
  std::vector<std::size_t> extent;
};

Orbit orbit_states(const LinearOperator& op, const ComplexVector& x, std::size_t N);

/// Same iteration without storing: visit(j, state, begin, end) sees T^j x, whose
/// entries outside [begin, end) are zero. The state buffer is reused.
void walk_orbit(const LinearOperator& op, const ComplexVector& x, std::size_t N,
                const std::function<void(std::size_t, const ComplexVector&, std::size_t,
                                         std::size_t)>& visit);

/// Throws ErrorCode::truncation_too_small unless N + support(x) <= D.
void check_orbit_exactness(const WeightedShift& shift, const ComplexVector& x,
                           std::size_t N);

/// j -> ||T^j x||_p or ||T^j||_p over j = 0..N.
struct OrbitNormTable {
  std::vector<double> values;
  double p = 1.0;
  std::string operator_id;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::string method = "exact";
  bool operator_norms = false;

  std::size_t horizon() const noexcept { return values.empty() ? 0 : values.size() - 1; }
  SeriesReport to_report(const std::string& name) const;
};

OrbitNormTable orbit(const LinearOperator& op, const ComplexVector& x,
                     std::size_t N, NormIndex p);

/// ||T^n||_p for n = 0..N. Shifts need D >= 2(N+1). Exact for p in {1,2,inf};
/// other p give sampled lower bounds and method "sampled-lower-bound".
OrbitNormTable operator_power_norm_table(const LinearOperator& op, std::size_t N,
                                         NormIndex p, std::uint64_t seed = 0);

/// (n+1)^beta, via exp(beta log(n+1)).
double shift_norm_closed_form(double beta, std::size_t n);

/// c_n = (prod_{k=1}^n w_k)^{-1} = n^{-beta} for n = 1..N. Needs N + 1 <= D.
SeriesReport mixing_criterion_series(const WeightedShift& shift, std::size_t N);

}  // namespace cesarolab
