#include "cesarolab/probes.hpp"

#include <algorithm>
#include <cmath>

#include "cesarolab/cesaro.hpp"
#include "cesarolab/kernel.hpp"
#include "cesarolab/norms.hpp"
#include "cesarolab/parallel.hpp"
#include "cesarolab/random.hpp"

namespace cesarolab {

namespace {

struct Probe {
  std::string label;
  ComplexVector x;
};

// Largest support a probe vector may have so that its orbit up to N stays exact.
std::size_t max_probe_support(const LinearOperator& op, std::size_t N) {
  const std::size_t d = dim(op);
  if (!is_shift(op)) return d;
  if (N + 1 > d)
    fail(ErrorCode::truncation_too_small,
         "truncation too small: horizon " + std::to_string(N) + " leaves no exact probe in dim " +
             std::to_string(d));
  return d - N;
}

std::vector<double> series_from_orbit_norms(const std::vector<double>& orbit_norms,
                                            const KernelSeq& k, const KernelSeq& k1) {
  const std::size_t N = orbit_norms.size() - 1;
  std::size_t last = 0;  // last non-zero orbit norm
  for (std::size_t j = 0; j <= N; ++j)
    if (orbit_norms[j] != 0.0) last = j;
  std::vector<double> out(N + 1);
  for (std::size_t n = 0; n <= N; ++n) {
    double s = 0.0;
    const std::size_t top = std::min(n, last);
    for (std::size_t j = 0; j <= top; ++j) s += k[n - j] * orbit_norms[j];
    out[n] = s / k1[n];
  }
  return out;
}

std::vector<Probe> build_probes(const LinearOperator& op, std::size_t N, NormIndex p,
                                const ProbeStrategy& s) {
  using Kind = ProbeStrategy::Kind;
  const std::size_t d = dim(op);
  const std::size_t limit = max_probe_support(op, N);
  std::vector<Probe> probes;
  if (s.kind == Kind::basis || s.kind == Kind::all)
    for (std::size_t k = 1; k <= limit; ++k)
      probes.push_back({"e_" + std::to_string(k), basis_vector(d, k)});
  if (s.kind == Kind::random || s.kind == Kind::all) {
    const std::size_t support = s.support == 0 ? limit : std::min(s.support, limit);
    for (std::size_t i = 0; i < s.count; ++i) {
      Rng rng(s.seed, i);
      probes.push_back({"random_" + std::to_string(i),
                        random_unit_vector(d, support, p.value(), rng)});
    }
  }
  if (s.kind == Kind::witness || s.kind == Kind::all) {
    for (std::size_t m = 0; m + 1 <= limit; m = m == 0 ? 2 : 2 * m)
      probes.push_back({"y_" + std::to_string(m + 1), witness_vector(m, p, d)});
  }
  if (probes.empty()) fail(ErrorCode::domain, "probe strategy produced no probe vectors");
  return probes;
}

struct SupSeries {
  std::vector<double> sup;
  std::vector<double> running;
  std::vector<std::size_t> argmax;
  std::vector<std::string> labels;
};

SupSeries sup_series(const LinearOperator& op, double alpha, std::size_t N, NormIndex p,
                     const ProbeStrategy& strategy) {
  const auto probes = build_probes(op, N, p, strategy);
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), N);
  const KernelSeq k1 = kernel_seq(FractionalOrder(alpha + 1.0), N);
  std::vector<std::vector<double>> per_probe(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    const double norm = vector_pnorm(probes[i].x, p);
    const OrbitNormTable t = orbit(op, probes[i].x / norm, N, p);
    per_probe[i] = series_from_orbit_norms(t.values, k, k1);
  });
  SupSeries out;
  out.sup.assign(N + 1, -1.0);
  out.running.assign(N + 1, 0.0);
  out.argmax.assign(N + 1, 0);
  for (std::size_t n = 0; n <= N; ++n) {
    for (std::size_t i = 0; i < probes.size(); ++i)
      if (per_probe[i][n] > out.sup[n]) {
        out.sup[n] = per_probe[i][n];
        out.argmax[n] = i;
      }
    out.running[n] = n == 0 ? out.sup[n] : std::max(out.running[n - 1], out.sup[n]);
  }
  for (const auto& pr : probes) out.labels.push_back(pr.label);
  return out;
}

}  // namespace

std::vector<double> abs_functional_series(const LinearOperator& op, double alpha, std::size_t N,
                                          const ComplexVector& x, NormIndex p) {
  const double norm = vector_pnorm(x, p);
  if (norm == 0.0) fail(ErrorCode::domain, "absolute Cesaro functional needs a non-zero vector");
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), N);
  const KernelSeq k1 = kernel_seq(FractionalOrder(alpha + 1.0), N);
  const OrbitNormTable t = orbit(op, x / norm, N, p);
  return series_from_orbit_norms(t.values, k, k1);
}

AbsFunctionalValue abs_cesaro_functional(const LinearOperator& op, double alpha, std::size_t N,
                                         const ComplexVector& x, NormIndex p,
                                         std::string witness) {
  const double norm = vector_pnorm(x, p);
  if (norm == 0.0) fail(ErrorCode::domain, "absolute Cesaro functional needs a non-zero vector");
  const KernelSeq k = kernel_seq(FractionalOrder(alpha), N);
  const KernelSeq k1 = kernel_seq(FractionalOrder(alpha + 1.0), N);
  const OrbitNormTable t = orbit(op, x / norm, N, p);
  double s = 0.0;
  for (std::size_t j = 0; j <= N; ++j) s += k[N - j] * t.values[j];
  AbsFunctionalValue v;
  v.alpha = alpha;
  v.N = N;
  v.p = p.value();
  v.value = s / k1[N];
  v.input_norm = norm;
  v.witness = std::move(witness);
  return v;
}

ProbeStrategy ProbeStrategy::random(std::size_t count, std::uint64_t seed) {
  ProbeStrategy s;
  s.kind = Kind::random;
  s.count = count;
  s.seed = seed;
  return s;
}

ProbeStrategy ProbeStrategy::parse(const std::string& name, std::size_t count,
                                   std::uint64_t seed) {
  ProbeStrategy s;
  s.count = count;
  s.seed = seed;
  if (name == "basis") s.kind = Kind::basis;
  else if (name == "random") s.kind = Kind::random;
  else if (name == "witness") s.kind = Kind::witness;
  else if (name == "all") s.kind = Kind::all;
  else fail(ErrorCode::domain, "unknown probe strategy '" + name + "'");
  if ((s.kind == Kind::random || s.kind == Kind::all) && count == 0)
    fail(ErrorCode::domain, "random probe strategy needs a positive count");
  return s;
}

std::string ProbeStrategy::name() const {
  switch (kind) {
    case Kind::basis: return "basis";
    case Kind::random: return "random";
    case Kind::witness: return "witness";
    case Kind::all: return "all";
  }
  return "unknown";
}

SeriesReport abs_cesaro_sup_estimate(const LinearOperator& op, double alpha, std::size_t N,
                                     NormIndex p, const ProbeStrategy& strategy) {
  if (!(alpha > 0.0)) fail(ErrorCode::domain, "absolute Cesaro probes need alpha > 0");
  const SupSeries base = sup_series(op, alpha, N, p, strategy);
  std::vector<double> drift(N + 1, 0.0);
  if (const auto* s = std::get_if<WeightedShift>(&op)) {
    const SupSeries wide = sup_series(s->with_dim(2 * s->dim()), alpha, N, p, strategy);
    for (std::size_t n = 0; n <= N; ++n)
      drift[n] = wide.running[n] > 0.0
                     ? std::abs(wide.running[n] - base.running[n]) / wide.running[n]
                     : 0.0;
  }
  // A_N(e_k) is non-increasing in k once k > N, so e_1..e_{N+1} must all be probed.
  const bool covers = !is_shift(op) || dim(op) >= 2 * N + 1;
  const bool exact = covers && p.value() == 1.0 &&
                     (strategy.kind == ProbeStrategy::Kind::basis ||
                      strategy.kind == ProbeStrategy::Kind::all);
  SeriesReport rep("abs_sup",
                   {"n", "sup_at_n", "running_sup", "argmax_probe", "truncation_sensitivity"});
  double max_drift = 0.0;
  for (std::size_t n = 0; n <= N; ++n) {
    rep.add_row({static_cast<double>(n), base.sup[n], base.running[n],
                 static_cast<double>(base.argmax[n]), drift[n]});
    max_drift = std::max(max_drift, drift[n]);
  }
  rep.set("alpha", alpha);
  rep.set("p", p.str());
  rep.set("dim", static_cast<std::uint64_t>(dim(op)));
  rep.set("operator", operator_id(op));
  rep.set("strategy", strategy.name());
  rep.set("seed", strategy.seed);
  rep.set("method", exact ? "exact" : "sampled-lower-bound");
  rep.set("probe_count", static_cast<std::uint64_t>(base.labels.size()));
  rep.set("probe_inventory", base.labels.front() + " .. " + base.labels.back());
  rep.set("truncation_sensitivity", max_drift);
  return rep;
}

ComplexVector witness_vector(std::size_t N, NormIndex p, std::size_t dim) {
  if (N % 2 != 0)
    fail(ErrorCode::domain, "witness vector needs an even N, got " + std::to_string(N));
  if (dim < N + 1)
    fail(ErrorCode::truncation_too_small, "witness vector y_" + std::to_string(N + 1) +
                                              " does not fit in dim " + std::to_string(dim));
  const double mass = p.is_inf() ? 1.0 : std::pow(static_cast<double>(N + 1), -1.0 / p.value());
  ComplexVector y = ComplexVector::Zero(static_cast<Eigen::Index>(dim));
  y.head(static_cast<Eigen::Index>(N + 1)).setConstant(mass);
  return y;
}

SeriesReport prop21_divergence_series(NormIndex p, double alpha,
                                      const std::vector<std::size_t>& Ns) {
  if (p.is_inf()) fail(ErrorCode::domain, "the divergence series needs finite p");
  if (Ns.empty()) fail(ErrorCode::domain, "the divergence series needs at least one horizon");
  for (std::size_t N : Ns)
    if (N % 2 != 0 || N == 0)
      fail(ErrorCode::domain, "divergence horizons must be positive and even, got " +
                                  std::to_string(N));
  const std::size_t maxN = *std::max_element(Ns.begin(), Ns.end());
  const WeightedShift shift(1.0 / p.value(), 2 * (maxN + 1));
  std::vector<double> values(Ns.size());
  parallel_for(Ns.size(), [&](std::size_t i) {
    const std::size_t N = Ns[i];
    const ComplexVector mean =
        cesaro_mean_apply(shift, alpha, N, witness_vector(N, p, shift.dim()));
    values[i] = std::pow(vector_pnorm(mean, p), p.value());
  });
  std::vector<double> logs(Ns.size());
  for (std::size_t i = 0; i < Ns.size(); ++i)
    logs[i] = std::log(static_cast<double>(Ns[i]) / 2.0 + 1.0);

  // least squares value ~ slope * log_term + intercept
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    mx += logs[i];
    my += values[i];
  }
  mx /= static_cast<double>(Ns.size());
  my /= static_cast<double>(Ns.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    sxx += (logs[i] - mx) * (logs[i] - mx);
    sxy += (logs[i] - mx) * (values[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  const double intercept = my - slope * mx;

  SeriesReport rep("prop21_divergence", {"N", "value", "log_term", "ratio", "fit"});
  for (std::size_t i = 0; i < Ns.size(); ++i)
    rep.add_row({static_cast<double>(Ns[i]), values[i], logs[i], values[i] / logs[i],
                 slope * logs[i] + intercept});
  rep.set("alpha", alpha);
  rep.set("p", p.str());
  rep.set("beta", 1.0 / p.value());
  rep.set("dim", static_cast<std::uint64_t>(shift.dim()));
  rep.set("operator", shift.id());
  rep.set("log_fit_slope", slope);
  rep.set("log_fit_intercept", intercept);
  rep.set("truncation_sensitivity", 0.0);
  return rep;
}

GrowthFit growth_exponent_fit(const std::vector<double>& values, std::size_t first,
                              std::size_t last) {
  if (last >= values.size() || first > last)
    fail(ErrorCode::domain, "fit window [" + std::to_string(first) + ", " +
                                std::to_string(last) + "] outside the table");
  const std::size_t count = last - first + 1;
  if (count < 8) fail(ErrorCode::domain, "growth fit needs at least 8 points");
  std::vector<double> xs, ys;
  xs.reserve(count);
  ys.reserve(count);
  for (std::size_t n = first; n <= last; ++n) {
    if (!(values[n] > 0.0))
      fail(ErrorCode::domain, "growth fit window contains a non-positive norm at n=" +
                                  std::to_string(n));
    xs.push_back(std::log(static_cast<double>(n) + 1.0));
    ys.push_back(std::log(values[n]));
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(count);
  my /= static_cast<double>(count);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  GrowthFit fit;
  fit.exponent = sxy / sxx;
  fit.intercept = my - fit.exponent * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double e = ys[i] - (fit.intercept + fit.exponent * xs[i]);
    ss += e * e;
  }
  fit.residual = std::sqrt(ss / static_cast<double>(count));
  fit.first = first;
  fit.last = last;
  fit.points = count;
  return fit;
}

GrowthFit growth_exponent_fit(const OrbitNormTable& table, std::size_t first,
                              std::size_t last) {
  return growth_exponent_fit(table.values, first, last);
}

SeriesReport small_o_ratio_series(const OrbitNormTable& table, double alpha) {
  SeriesReport rep("small_o_ratio", {"n", "norm", "ratio"});
  for (std::size_t n = 1; n < table.values.size(); ++n)
    rep.add_row({static_cast<double>(n), table.values[n],
                 table.values[n] / std::pow(static_cast<double>(n), alpha)});
  rep.set("alpha", alpha);
  rep.set("p", std::isinf(table.p) ? std::string("inf") : format_double(table.p));
  rep.set("operator", table.operator_id);
  rep.set("dim", static_cast<std::uint64_t>(table.dim));
  return rep;
}

}  // namespace cesarolab
