#include "cesarolab/cesaro.hpp"

#include <algorithm>
#include <cmath>

#include "cesarolab/parallel.hpp"

namespace cesarolab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

double checked_alpha(double alpha) { return FractionalOrder(alpha).value(); }

// Orbit kept as non-zero windows only.
struct Window {
  std::size_t begin = 0;
  ComplexVector values;
};

std::vector<Window> orbit_windows(const LinearOperator& op, const ComplexVector& x,
                                  std::size_t N) {
  std::vector<Window> out(N + 1);
  walk_orbit(op, x, N,
             [&](std::size_t j, const ComplexVector& v, std::size_t begin, std::size_t end) {
               out[j].begin = begin;
               out[j].values = v.segment(idx(begin), idx(end - begin));
             });
  return out;
}

ComplexVector weighted_sum(const std::vector<Window>& orbit, const KernelSeq& k, std::size_t n,
                           std::size_t d) {
  ComplexVector acc = ComplexVector::Zero(idx(d));
  for (std::size_t j = 0; j <= n; ++j) {
    const Window& w = orbit[j];
    if (w.values.size() == 0) continue;
    acc.segment(idx(w.begin), w.values.size()) += k[n - j] * w.values;
  }
  return acc;
}

double inf_norm(const ComplexMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

// Coefficients in T of the expression selected by `mode` at index n.
std::vector<Complex> expression_coefficients(MeanDifferenceMode mode, const KernelSeq& k,
                                             const KernelSeq& k1, std::size_t n) {
  auto mean = [&](std::size_t m) {
    std::vector<Complex> c(m + 1);
    for (std::size_t j = 0; j <= m; ++j) c[j] = k[m - j] / k1[m];
    return c;
  };
  switch (mode) {
    case MeanDifferenceMode::diff: {
      std::vector<Complex> c = mean(n + 1);
      const std::vector<Complex> prev = mean(n);
      for (std::size_t j = 0; j <= n; ++j) c[j] -= prev[j];
      return c;
    }
    case MeanDifferenceMode::times_TminusI: {
      const std::vector<Complex> m = mean(n);
      std::vector<Complex> c(n + 2, 0.0);
      for (std::size_t j = 0; j <= n; ++j) {
        c[j + 1] += m[j];
        c[j] -= m[j];
      }
      return c;
    }
    case MeanDifferenceMode::times_TminusI_sq: {
      const std::vector<Complex> m = mean(n);
      std::vector<Complex> c(n + 3, 0.0);
      for (std::size_t j = 0; j <= n; ++j) {
        c[j + 2] += m[j];
        c[j + 1] -= 2.0 * m[j];
        c[j] += m[j];
      }
      return c;
    }
    case MeanDifferenceMode::kt_power: {
      std::vector<Complex> c(n + 2, 0.0);
      c[n + 1] = 1.0;
      c[n] = -1.0;
      return c;
    }
  }
  return {};
}

}  // namespace

ComplexVector cesaro_sum_apply(const LinearOperator& op, double alpha, std::size_t n,
                               const ComplexVector& x) {
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), n);
  const auto orbit = orbit_windows(op, x, n);
  return weighted_sum(orbit, k, n, dim(op));
}

ComplexVector cesaro_mean_apply(const LinearOperator& op, double alpha, std::size_t n,
                                const ComplexVector& x) {
  const KernelSeq k1 = kernel_seq(FractionalOrder(checked_alpha(alpha) + 1.0), n);
  return cesaro_sum_apply(op, alpha, n, x) / k1[n];
}

std::vector<ComplexVector> cesaro_mean_orbit(const LinearOperator& op, double alpha,
                                             std::size_t N, const ComplexVector& x) {
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), N);
  const KernelSeq k1 = kernel_seq(FractionalOrder(alpha + 1.0), N);
  const auto orbit = orbit_windows(op, x, N);
  const std::size_t d = dim(op);
  std::vector<ComplexVector> means(N + 1);
  parallel_for(N + 1, [&](std::size_t n) { means[n] = weighted_sum(orbit, k, n, d) / k1[n]; });
  return means;
}

std::vector<Complex> mean_coefficients(double alpha, std::size_t n) {
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), n);
  const KernelSeq k1 = kernel_seq(FractionalOrder(alpha + 1.0), n);
  std::vector<Complex> c(n + 1);
  for (std::size_t j = 0; j <= n; ++j) c[j] = k[n - j] / k1[n];
  return c;
}

ComplexMatrix cesaro_mean_matrix(const LinearOperator& op, double alpha, std::size_t n) {
  const std::vector<Complex> c = mean_coefficients(alpha, n);
  if (const auto* s = std::get_if<WeightedShift>(&op)) return s->materialize_poly(c);
  const ComplexMatrix& m = std::get<DenseOperator>(op).matrix();
  const Eigen::Index d = m.rows();
  // Horner: c_0 + T(c_1 + T(c_2 + ...))
  ComplexMatrix acc = c[n] * ComplexMatrix::Identity(d, d);
  for (std::size_t j = n; j-- > 0;) {
    acc = m * acc;
    acc.diagonal().array() += c[j];
  }
  return acc;
}

const char* to_string(MeanDifferenceMode m) {
  switch (m) {
    case MeanDifferenceMode::diff: return "diff";
    case MeanDifferenceMode::times_TminusI: return "times_TminusI";
    case MeanDifferenceMode::times_TminusI_sq: return "times_TminusI_sq";
    case MeanDifferenceMode::kt_power: return "kt_power";
  }
  return "unknown";
}

MeanDifferenceMode parse_mean_difference_mode(const std::string& s) {
  for (auto m : {MeanDifferenceMode::diff, MeanDifferenceMode::times_TminusI,
                 MeanDifferenceMode::times_TminusI_sq, MeanDifferenceMode::kt_power})
    if (s == to_string(m)) return m;
  fail(ErrorCode::domain, "unknown mean-difference mode '" + s + "'");
}

SeriesReport mean_difference_series(const LinearOperator& op, double alpha, std::size_t N,
                                    NormIndex p, MeanDifferenceMode mode,
                                    const NormOptions& opts) {
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), N + 1);
  const KernelSeq k1 = kernel_seq(FractionalOrder(alpha + 1.0), N + 1);
  std::vector<double> values(N + 1, 0.0), drift(N + 1, 0.0);
  bool sampled = false;

  if (const auto* s = std::get_if<WeightedShift>(&op)) {
    if (s->dim() < 2 * (N + 1))
      fail(ErrorCode::truncation_too_small,
           "truncation too small: mean series up to n=" + std::to_string(N) +
               " need dim >= " + std::to_string(2 * (N + 1)) + ", have " +
               std::to_string(s->dim()));
    const WeightedShift doubled = s->with_dim(2 * s->dim());
    std::vector<char> flags(N + 1, 0);
    parallel_for(N + 1, [&](std::size_t n) {
      const auto c = expression_coefficients(mode, k, k1, n);
      const NormResult base = shift_poly_pnorm(*s, c, p, opts);
      const NormResult wide = shift_poly_pnorm(doubled, c, p, opts);
      values[n] = base.value;
      drift[n] = wide.value > 0.0 ? std::abs(wide.value - base.value) / wide.value : 0.0;
      flags[n] = base.method == NormMethod::sampled_lower_bound;
    });
    sampled = std::any_of(flags.begin(), flags.end(), [](char f) { return f != 0; });
  } else {
    const ComplexMatrix& t = std::get<DenseOperator>(op).matrix();
    const Eigen::Index d = t.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(d, d);
    ComplexMatrix sum = id;   // Delta^{-alpha} T(0) = I
    ComplexMatrix power = id; // T^n
    for (std::size_t n = 0; n <= N; ++n) {
      const ComplexMatrix mean = sum / k1[n];
      ComplexMatrix expr;
      ComplexMatrix next_sum = t * sum;
      next_sum.diagonal().array() += k[n + 1];
      switch (mode) {
        case MeanDifferenceMode::diff: expr = next_sum / k1[n + 1] - mean; break;
        case MeanDifferenceMode::times_TminusI: expr = mean * t - mean; break;
        case MeanDifferenceMode::times_TminusI_sq: {
          const ComplexMatrix tm = t - id;
          expr = mean * tm * tm;
          break;
        }
        case MeanDifferenceMode::kt_power: expr = power * t - power; break;
      }
      const NormResult r = operator_pnorm(expr, p, opts);
      values[n] = r.value;
      sampled = sampled || r.method == NormMethod::sampled_lower_bound;
      sum = std::move(next_sum);
      power = power * t;
    }
  }

  SeriesReport rep(std::string("mean_") + to_string(mode),
                   {"n", "value", "truncation_sensitivity"});
  double max_drift = 0.0;
  for (std::size_t n = 0; n <= N; ++n) {
    rep.add_row({static_cast<double>(n), values[n], drift[n]});
    max_drift = std::max(max_drift, drift[n]);
  }
  rep.set("alpha", alpha);
  rep.set("p", p.str());
  rep.set("dim", static_cast<std::uint64_t>(dim(op)));
  rep.set("operator", operator_id(op));
  rep.set("mode", to_string(mode));
  rep.set("method", sampled ? "sampled-lower-bound" : "exact");
  rep.set("truncation_sensitivity", max_drift);
  rep.set("seed", opts.seed);
  return rep;
}

IdentityResiduals identity_residuals(const DenseOperator& op, double alpha, std::size_t n) {
  if (!(alpha > 0.0)) fail(ErrorCode::domain, "identity residuals need alpha > 0");
  const ComplexMatrix& t = op.matrix();
  const Eigen::Index d = t.rows();
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);

  std::vector<ComplexMatrix> powers;
  powers.reserve(n + 2);
  powers.push_back(id);
  for (std::size_t j = 1; j <= n + 1; ++j) powers.push_back(powers.back() * t);

  auto mean_from_powers = [&](double order, std::size_t m) {
    const KernelSeq k = kernel_seq(FractionalOrder(order), m);
    const KernelSeq k1 = kernel_seq(FractionalOrder(order + 1.0), m);
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (std::size_t j = 0; j <= m; ++j) acc += k[m - j] * powers[j];
    return ComplexMatrix(acc / k1[m]);
  };

  const ComplexMatrix m0 = mean_from_powers(alpha, n);
  const ComplexMatrix m1 = mean_from_powers(alpha, n + 1);
  const ComplexMatrix lhs = m1 - m0;
  const double nd = static_cast<double>(n);

  IdentityResiduals out;
  out.scale = 1.0 + std::pow(inf_norm(t), nd + 1.0);
  if (alpha == 1.0) out.first = inf_norm(lhs - (powers[n + 1] - m1) / (nd + 1.0));
  out.second = inf_norm(lhs - (m0 * (t - id) + alpha / (nd + 1.0) * (id - m1)));
  if (alpha >= 1.0) {
    const ComplexMatrix lower = mean_from_powers(alpha - 1.0, n + 1);
    out.third = inf_norm(lhs - alpha / (nd + 1.0) * (lower - m1));
    out.third_alt = inf_norm(lhs - alpha / (nd + alpha + 1.0) * (lower - m0));
  }
  const double a = alpha / (nd + alpha + 1.0);
  const double b = (nd + 1.0) / (nd + alpha + 1.0);
  const ComplexMatrix common = a * id + b * m0 * (t - id);
  out.corrected = inf_norm(lhs - (common - a * m0));
  out.printed = inf_norm(lhs - (common + a * m0));
  return out;
}

SeriesReport ergodic_limit_probe(const LinearOperator& op, double alpha, const ComplexVector& x,
                                 std::size_t N, NormIndex p) {
  const auto means = cesaro_mean_orbit(op, alpha, N, x);
  SeriesReport rep("ergodic_limit", {"n", "dist_to_last", "cauchy", "mean_norm"});
  for (std::size_t n = 0; n <= N; ++n) {
    const double cauchy = n < N ? vector_pnorm(means[n + 1] - means[n], p) : 0.0;
    rep.add_row({static_cast<double>(n), vector_pnorm(means[n] - means[N], p), cauchy,
                 vector_pnorm(means[n], p)});
  }
  rep.set("alpha", alpha);
  rep.set("p", p.str());
  rep.set("dim", static_cast<std::uint64_t>(dim(op)));
  rep.set("operator", operator_id(op));
  rep.set("limit_norm", vector_pnorm(means[N], p));
  return rep;
}

}  // namespace cesarolab
