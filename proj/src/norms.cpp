#include "cesarolab/norms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "cesarolab/parallel.hpp"
#include "cesarolab/random.hpp"

namespace cesarolab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

// Unit vector u with u^* x = ||x||_p, i.e. attaining the dual pairing; used to
// pick the phase of norming vectors.
Complex phase_of(Complex z) {
  const double a = std::abs(z);
  return a == 0.0 ? Complex(1.0, 0.0) : std::conj(z) / a;
}

// Power iteration on G = A^* A for callables apply / apply_adjoint.
template <class Apply, class Adjoint>
NormResult spectral_norm(std::size_t dim, Apply&& apply_op, Adjoint&& apply_adj,
                         const NormOptions& opts) {
  Rng rng(opts.seed, 0x9e3779b97f4a7c15ULL);
  ComplexVector v = random_unit_vector(dim, dim, 2.0, rng);
  NormResult out;
  out.method = NormMethod::exact;
  double previous = -1.0;
  double current = 0.0;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    const ComplexVector w = apply_op(v);
    current = w.squaredNorm();
    if (current == 0.0 && it == 1) {
      // start vector in the kernel; retry from e_k with the largest column
      ComplexVector best = ComplexVector::Zero(idx(dim));
      double best_norm = -1.0;
      for (std::size_t k = 1; k <= dim; ++k) {
        const double nk = apply_op(basis_vector(dim, k)).squaredNorm();
        if (nk > best_norm) {
          best_norm = nk;
          best = basis_vector(dim, k);
        }
      }
      if (best_norm == 0.0) {
        out.value = 0.0;
        out.norming_vector = best;
        out.iterations = it;
        return out;
      }
      v = best;
      continue;
    }
    const ComplexVector z = apply_adj(w);
    const double zn = z.norm();
    if (previous >= 0.0 && std::abs(current - previous) <= opts.tolerance * current) {
      out.value = std::sqrt(current);
      out.norming_vector = v;
      out.iterations = it;
      return out;
    }
    previous = current;
    if (zn == 0.0) break;
    v = z / zn;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << "power iteration did not converge after " << opts.max_iterations
      << " iterations; last Rayleigh quotients " << previous << ", " << current;
  fail(ErrorCode::non_convergence, msg.str());
}

template <class Apply>
NormResult sampled_norm(std::size_t dim, Apply&& apply_op, NormIndex p, const NormOptions& opts,
                        bool include_basis) {
  const std::size_t basis_count = include_basis ? dim : 0;
  const std::size_t total = basis_count + opts.samples;
  std::vector<double> values(total, 0.0);
  parallel_for(total, [&](std::size_t i) {
    ComplexVector x;
    if (i < basis_count) {
      x = basis_vector(dim, i + 1);
    } else {
      Rng rng(opts.seed, i - basis_count);
      x = random_unit_vector(dim, dim, p.value(), rng);
    }
    values[i] = vector_pnorm(apply_op(x), p);
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < total; ++i)
    if (values[i] > values[best]) best = i;
  NormResult out;
  out.method = NormMethod::sampled_lower_bound;
  out.value = total ? values[best] : 0.0;
  if (best < basis_count) {
    out.norming_vector = basis_vector(dim, best + 1);
  } else if (total) {
    Rng rng(opts.seed, best - basis_count);
    out.norming_vector = random_unit_vector(dim, dim, p.value(), rng);
  }
  return out;
}

}  // namespace

const char* to_string(NormMethod m) {
  return m == NormMethod::exact ? "exact" : "sampled-lower-bound";
}

double vector_pnorm(const ComplexVector& x, NormIndex p) {
  if (p.is_inf()) return x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  if (p.value() == 1.0) return x.cwiseAbs().sum();
  if (p.value() == 2.0) return x.norm();
  // scale by the max modulus so large p cannot overflow
  const double m = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) s += std::pow(std::abs(x(i)) / m, p.value());
  return m * std::pow(s, 1.0 / p.value());
}

NormResult operator_pnorm(const ComplexMatrix& m, NormIndex p, const NormOptions& opts) {
  if (m.rows() != m.cols()) fail(ErrorCode::domain, "operator norm needs a square matrix");
  const auto d = static_cast<std::size_t>(m.rows());
  NormResult out;
  if (p.value() == 1.0) {
    Eigen::Index best = 0;
    const Eigen::VectorXd sums = m.cwiseAbs().colwise().sum().transpose();
    for (Eigen::Index j = 1; j < sums.size(); ++j)
      if (sums(j) > sums(best)) best = j;
    out.value = sums(best);
    out.norming_vector = basis_vector(d, static_cast<std::size_t>(best) + 1);
    return out;
  }
  if (p.is_inf()) {
    Eigen::Index best = 0;
    const Eigen::VectorXd sums = m.cwiseAbs().rowwise().sum();
    for (Eigen::Index i = 1; i < sums.size(); ++i)
      if (sums(i) > sums(best)) best = i;
    out.value = sums(best);
    out.norming_vector.resize(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.norming_vector(j) = phase_of(m(best, j));
    return out;
  }
  if (p.value() == 2.0) {
    return spectral_norm(
        d, [&](const ComplexVector& v) -> ComplexVector { return m * v; },
        [&](const ComplexVector& v) -> ComplexVector { return m.adjoint() * v; }, opts);
  }
  return sampled_norm(
      d, [&](const ComplexVector& v) -> ComplexVector { return m * v; }, p, opts, true);
}

NormResult operator_pnorm(const DenseOperator& m, NormIndex p, const NormOptions& opts) {
  return operator_pnorm(m.matrix(), p, opts);
}

NormResult shift_poly_pnorm(const WeightedShift& shift, std::span<const Complex> coeffs,
                            NormIndex p, const NormOptions& opts) {
  const std::size_t d = shift.dim();
  std::vector<std::pair<std::size_t, Complex>> nz;
  for (std::size_t j = 0; j < coeffs.size() && j < d; ++j)
    if (coeffs[j] != Complex(0.0, 0.0)) nz.emplace_back(j, coeffs[j]);
  NormResult out;
  if (nz.empty()) {
    out.value = 0.0;
    out.norming_vector = basis_vector(d, 1);
    return out;
  }
  if (p.value() == 1.0) {
    // column c (1-based) holds c_j (c/(c-j))^beta in row c-j
    std::size_t best_col = 1;
    double best = -1.0;
    for (std::size_t c = 1; c <= d; ++c) {
      double s = 0.0;
      for (const auto& [j, cj] : nz) {
        if (j >= c) break;
        s += std::abs(cj) * shift.transfer(c, j);
      }
      if (s > best) {
        best = s;
        best_col = c;
      }
    }
    out.value = best;
    out.norming_vector = basis_vector(d, best_col);
    return out;
  }
  if (p.is_inf()) {
    // row i holds c_j ((i+j)/i)^beta in column i+j
    std::size_t best_row = 1;
    double best = -1.0;
    for (std::size_t i = 1; i <= d; ++i) {
      double s = 0.0;
      for (const auto& [j, cj] : nz) {
        if (i + j > d) break;
        s += std::abs(cj) * shift.transfer(i + j, j);
      }
      if (s > best) {
        best = s;
        best_row = i;
      }
    }
    out.value = best;
    out.norming_vector = ComplexVector::Constant(idx(d), Complex(1.0, 0.0));
    for (const auto& [j, cj] : nz)
      if (best_row + j <= d) out.norming_vector(idx(best_row + j - 1)) = phase_of(cj);
    return out;
  }
  if (p.value() == 2.0) {
    return spectral_norm(
        d, [&](const ComplexVector& v) { return shift.apply_poly(coeffs, v); },
        [&](const ComplexVector& v) { return shift.apply_poly_adjoint(coeffs, v); }, opts);
  }
  return sampled_norm(
      d, [&](const ComplexVector& v) { return shift.apply_poly(coeffs, v); }, p, opts, true);
}

ResolventResult resolvent_norm(const ComplexMatrix& m, Complex lambda, NormIndex p,
                               const NormOptions& opts) {
  if (m.rows() != m.cols()) fail(ErrorCode::domain, "resolvent needs a square matrix");
  const Eigen::Index d = m.rows();
  const ComplexMatrix a = lambda * ComplexMatrix::Identity(d, d) - m;
  Eigen::FullPivLU<ComplexMatrix> lu(a);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "lambda = (" << lambda.real() << ", " << lambda.imag()
        << ") is a spectral point: lambda I - M is singular";
    fail(ErrorCode::spectral_point, msg.str());
  }
  ComplexMatrix r;
  if (d <= 64) {
    r = lu.inverse();
  } else {
    r.resize(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
      r.col(k) = lu.solve(basis_vector(static_cast<std::size_t>(d), static_cast<std::size_t>(k) + 1));
  }
  ResolventResult out;
  out.norm = operator_pnorm(r, p, opts);
  const double scale = std::max(1.0, operator_pnorm(a, NormIndex::inf()).value *
                                         operator_pnorm(r, NormIndex::inf()).value);
  const ComplexMatrix defect = a * r - ComplexMatrix::Identity(d, d);
  out.residual = defect.cwiseAbs().rowwise().sum().maxCoeff() / scale;
  return out;
}

KreissGrid KreissGrid::standard(std::size_t angles, std::size_t horizon) {
  KreissGrid g;
  for (int e = 1; e <= 6; ++e) g.radii.push_back(1.0 + std::pow(10.0, -e));
  g.angles = angles;
  g.horizon = horizon;
  return g;
}

std::string KreissGrid::describe() const {
  std::string s = "radii=[";
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i) s += ' ';
    s += format_double(radii[i]);
  }
  s += "], angles=" + std::to_string(angles) + ", horizon=" + std::to_string(horizon);
  return s;
}

SeriesReport kreiss_probe(const DenseOperator& op, NormIndex p, const KreissGrid& grid,
                          KreissMode mode, const NormOptions& opts) {
  if (grid.angles == 0 || grid.radii.empty())
    fail(ErrorCode::domain, "Kreiss grid needs at least one radius and one angle");
  for (double r : grid.radii)
    if (!(r > 1.0)) fail(ErrorCode::domain, "Kreiss radii must exceed 1");
  const ComplexMatrix& m = op.matrix();
  const std::size_t points = grid.radii.size() * grid.angles;
  const std::size_t per_point = mode == KreissMode::classic ? 1 : grid.horizon + 1;
  std::vector<double> values(points * per_point, 0.0);
  std::vector<double> residuals(points, 0.0);

  parallel_for(points, [&](std::size_t g) {
    const double r = grid.radii[g / grid.angles];
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(g % grid.angles) /
                         static_cast<double>(grid.angles);
    const Complex lambda = std::polar(r, theta);
    if (mode == KreissMode::classic) {
      const ResolventResult res = resolvent_norm(m, lambda, p, opts);
      values[g] = (r - 1.0) * res.norm.value;
      residuals[g] = res.residual;
      return;
    }
    const Eigen::Index d = m.rows();
    ComplexMatrix term = ComplexMatrix::Identity(d, d) / lambda;  // lambda^{-k-1} M^k
    ComplexMatrix partial = term;
    for (std::size_t n = 0; n <= grid.horizon; ++n) {
      if (n > 0) {
        term = (term * m) / lambda;
        partial += term;
      }
      values[g * per_point + n] = (r - 1.0) * operator_pnorm(partial, p, opts).value;
    }
  });

  SeriesReport rep(mode == KreissMode::classic ? "kreiss_classic" : "kreiss_uniform",
                   mode == KreissMode::classic
                       ? std::vector<std::string>{"point", "radius", "theta", "value", "residual"}
                       : std::vector<std::string>{"point", "radius", "theta", "n", "value"});
  double sup = -1.0;
  std::size_t sup_row = 0;
  for (std::size_t g = 0; g < points; ++g) {
    const double r = grid.radii[g / grid.angles];
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(g % grid.angles) /
                         static_cast<double>(grid.angles);
    for (std::size_t n = 0; n < per_point; ++n) {
      const double v = values[g * per_point + n];
      if (v > sup) {  // strict: first grid index wins ties
        sup = v;
        sup_row = rep.rows.size();
      }
      if (mode == KreissMode::classic)
        rep.add_row({static_cast<double>(g), r, theta, v, residuals[g]});
      else
        rep.add_row({static_cast<double>(g), r, theta, static_cast<double>(n), v});
    }
  }
  rep.set("supremum", sup);
  rep.set("supremum_row", static_cast<std::uint64_t>(sup_row));
  rep.set("grid", grid.describe());
  rep.set("p", p.str());
  rep.set("operator", op.id());
  rep.set("dim", static_cast<std::uint64_t>(op.dim()));
  rep.set("method", p.value() == 1.0 || p.value() == 2.0 || p.is_inf() ? "exact"
                                                                        : "sampled-lower-bound");
  rep.set("note", "grid supremum; evidence about the resolvent condition, not a proof");
  return rep;
}

SpectrumReport spectrum_unit_circle_report(const DenseOperator& op, double tolerance) {
  if (op.dim() > 64)
    fail(ErrorCode::domain, "spectrum report is limited to dim <= 64, got " +
                                std::to_string(op.dim()));
  Eigen::ComplexEigenSolver<ComplexMatrix> solver(op.matrix(), false);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::non_convergence, "eigensolver did not converge for " + op.id());
  std::vector<Complex> eig(solver.eigenvalues().begin(), solver.eigenvalues().end());
  std::sort(eig.begin(), eig.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  SpectrumReport rep;
  rep.tolerance = tolerance;
  for (const Complex& z : eig) {
    const double dist = std::abs(1.0 - std::abs(z));
    rep.eigenvalues.push_back({z, dist});
    if (dist <= tolerance) {
      rep.on_circle.push_back(z);
      if (std::abs(z - 1.0) > tolerance) rep.peripheral_in_one = false;
    }
  }
  return rep;
}

}  // namespace cesarolab
