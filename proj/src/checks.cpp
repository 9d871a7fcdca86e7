#include "cesarolab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cesarolab/cesaro.hpp"
#include "cesarolab/kernel.hpp"
#include "cesarolab/norms.hpp"
#include "cesarolab/probes.hpp"
#include "cesarolab/random.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

namespace fs = std::filesystem;

namespace {

struct Checker {
  CriterionResult r;
  const CheckOptions& opts;
  CsvStamp stamp;

  Checker(int id, std::string title, const CheckOptions& o) : opts(o) {
    r.id = id;
    r.title = std::move(title);
    r.passed = true;
    stamp.config_hash = fnv1a_hex("check seed=" + std::to_string(o.seed));
    stamp.seed = o.seed;
  }

  void note(const std::string& what) {
    if (r.passed) r.detail = what;
    r.passed = false;
  }
  void le(const std::string& name, double value, double limit) {
    r.measurements.push_back({name, value, limit});
    if (!(value <= limit)) note(name + " = " + format_double(value) + " > " + format_double(limit));
  }
  void ge(const std::string& name, double value, double limit) {
    r.measurements.push_back({name, value, limit});
    if (!(value >= limit)) note(name + " = " + format_double(value) + " < " + format_double(limit));
  }
  void holds(const std::string& name, bool ok) {
    r.measurements.push_back({name, ok ? 1.0 : 0.0, 1.0});
    if (!ok) note(name + " does not hold");
  }
  void emit(const SeriesReport& rep, const std::string& stem) {
    if (!opts.out) return;
    rep.validate();
    write_csv(rep, *opts.out / (stem + ".csv"), stamp);
  }
};

double kernel_ref(double a, std::size_t n) {
  return std::exp(std::lgamma(n + a) - std::lgamma(a) - std::lgamma(n + 1.0));
}

CriterionResult kernel_criterion(const CheckOptions& opts) {
  Checker c(1, "kernel recurrence, semigroup and two-sided bounds", opts);

  double worst = 0.0;
  for (const double a : {0.3, 0.5, 1.0, 1.7, 2.5}) {
    const KernelSeq k = kernel_seq(FractionalOrder(a), 10000);
    for (std::size_t n = 0; n <= 10000; ++n) {
      const double ref = kernel_ref(a, n);
      worst = std::max(worst, std::abs(k[n] - ref) / ref);
    }
  }
  c.le("max_rel_err_vs_lgamma", worst, 1e-10);

  double conv = 0.0;
  for (const auto& [a, b] : {std::pair{0.5, 0.5}, std::pair{0.3, 1.2}}) {
    const auto ab = kernel_convolve(kernel_seq(FractionalOrder(a), 256),
                                    kernel_seq(FractionalOrder(b), 256));
    const KernelSeq sum = kernel_seq(FractionalOrder(a + b), 256);
    for (std::size_t n = 0; n <= 256; ++n) conv = std::max(conv, std::abs(ab[n] - sum[n]));
  }
  c.le("max_semigroup_err", conv, 1e-8);

  SeriesReport rep("kernel-bounds", {"alpha", "all_within", "min_slack_lower", "min_slack_upper"});
  bool all = true;
  for (int i = 1; i <= 10; ++i) {
    const double a = i / 10.0;
    const KernelBoundsReport b = kernel_bounds_report(FractionalOrder(a), 10000);
    double lo = INFINITY, hi = INFINITY;
    for (const auto& row : b.rows) {
      lo = std::min(lo, row.value - row.lower);
      hi = std::min(hi, row.upper - row.value);
    }
    all = all && b.all_within;
    rep.add_row({a, b.all_within ? 1.0 : 0.0, lo, hi});
  }
  c.holds("bounds_hold_n_le_1e4", all);
  c.emit(rep, "c1_kernel_bounds");
  return c.r;
}

CriterionResult shift_norm_criterion(const CheckOptions& opts) {
  Checker c(2, "shift power norms equal (n+1)^beta", opts);
  const double beta = 0.3;
  SeriesReport rep("shift-power-norms", {"n", "p1", "p2", "pinf", "closed_form"});
  double worst = 0.0;
  for (std::size_t n = 0; n <= 200; ++n) {
    const WeightedShift t(beta, 2 * (n + 1));
    const ComplexMatrix m = t.materialize_power(n);
    const double cf = shift_norm_closed_form(beta, n);
    std::vector<double> row = {static_cast<double>(n)};
    for (const NormIndex p : {NormIndex(1.0), NormIndex(2.0), NormIndex::inf()}) {
      const double v = operator_pnorm(m, p).value;
      worst = std::max(worst, std::abs(v - cf) / cf);
      row.push_back(v);
    }
    row.push_back(cf);
    rep.add_row(std::move(row));
  }
  c.le("max_rel_err", worst, 1e-9);
  c.emit(rep, "c2_shift_power_norms");
  return c.r;
}

CriterionResult growth_criterion(const CheckOptions& opts) {
  Checker c(3, "growth exponent fit and small-o ratio", opts);
  std::vector<double> synth(1025);
  for (std::size_t n = 0; n < synth.size(); ++n) synth[n] = std::pow(n + 1.0, 0.35);
  c.le("synthetic_slope_err", std::abs(growth_exponent_fit(synth, 1, 1024).exponent - 0.35), 1e-6);

  const WeightedShift t(0.3, 2 * 1025);
  const OrbitNormTable table = operator_power_norm_table(t, 1024, 1.0);
  const GrowthFit fit = growth_exponent_fit(table, 64, 512);
  c.le("shift_slope_err", std::abs(fit.exponent - 0.3), 5e-3);

  const SeriesReport ratio = small_o_ratio_series(table, 0.5);
  // rows start at n = 1
  const double r64 = ratio.at(63, "ratio");
  const double r1024 = ratio.at(1023, "ratio");
  c.le("ratio_1024_over_64", r1024 / r64, 0.35);
  c.emit(ratio, "c3_small_o_ratio");
  return c.r;
}

CriterionResult plateau_criterion(const CheckOptions& opts) {
  Checker c(4, "absolute (C,alpha) sup plateau for beta < alpha/p", opts);
  const WeightedShift t(0.3, 2 * 1025);
  const SeriesReport rep = abs_cesaro_sup_estimate(t, 0.5, 1024, 1.0, ProbeStrategy::basis());
  c.holds("method_exact", rep.meta.at("method") == "exact");
  const double s128 = rep.at(128, "sup_at_n");
  const double s1024 = rep.at(1024, "sup_at_n");
  c.le("sup_1024_over_sup_128", s1024 / s128, 1.05);
  c.le("sup_1024", s1024, 10.0);
  c.le("sup_128", s128, 10.0);
  c.emit(rep, "c4_abs_sup");
  return c.r;
}

CriterionResult divergence_criterion(const CheckOptions& opts) {
  Checker c(5, "witness series diverges like ln(N/2+1)", opts);
  std::vector<std::size_t> Ns;
  for (int k = 4; k <= 11; ++k) Ns.push_back(std::size_t{1} << k);
  const SeriesReport rep = prop21_divergence_series(2.0, 1.5, Ns);
  const auto v = rep.column("value");
  bool increasing = true;
  for (std::size_t i = 1; i < v.size(); ++i) increasing = increasing && v[i] > v[i - 1];
  c.holds("strictly_increasing", increasing);
  const auto ratio = rep.column("ratio");
  // N = 2^7 .. 2^11 are the last five rows
  const auto lo = std::min_element(ratio.end() - 5, ratio.end());
  const auto hi = std::max_element(ratio.end() - 5, ratio.end());
  c.le("ratio_variation", (*hi - *lo) / *lo, 0.2);
  c.emit(rep, "c5_witness_series");
  return c.r;
}

CriterionResult assani_criterion(const CheckOptions& opts) {
  Checker c(6, "Assani matrix closed forms and resolvent blow-up", opts);
  const DenseOperator a = assani();
  const OrbitNormTable powers = operator_power_norm_table(a, 1000, NormIndex::inf());
  bool exact = true;
  for (std::size_t n = 0; n <= 1000; ++n) exact = exact && powers.values[n] == 2.0 * n + 1.0;
  c.holds("power_norms_equal_2n_plus_1", exact);

  SeriesReport rep("assani-means", {"n", "power_norm", "mean_norm"});
  double worst = 0.0;
  for (std::size_t n = 0; n <= 1000; ++n) {
    const double v = operator_pnorm(cesaro_mean_matrix(a, 1.0, n), NormIndex::inf()).value;
    worst = std::max(worst, std::abs(v - 1.0));
    rep.add_row({static_cast<double>(n), powers.values[n], v});
  }
  c.le("max_mean_norm_dev", worst, 1e-12);
  c.emit(rep, "c6_assani");

  KreissGrid grid;
  grid.radii = {1.0 + 1e-3};
  grid.angles = 2;  // theta in {0, pi}
  const SeriesReport k = kreiss_probe(a, NormIndex::inf(), grid, KreissMode::classic);
  c.ge("kreiss_at_minus_1_001", k.at(1, "value"), 1e3);
  return c.r;
}

CriterionResult identity_criterion(const CheckOptions& opts) {
  Checker c(7, "mean-difference identities on random matrices", opts);
  SeriesReport rep("identity-residuals",
                   {"alpha", "first", "second", "third", "third_alt", "corrected", "printed"});
  double w_first = 0, w_second = 0, w_third = 0, w_alt = 0, w_corr = 0;
  std::vector<DenseOperator> mats;
  for (std::uint64_t i = 0; i < 20; ++i) {
    Rng rng(opts.seed, i);
    mats.emplace_back(random_disc_matrix(8, rng), "random-" + std::to_string(i));
  }
  for (const double alpha : {0.3, 0.4, 0.7, 1.0, 1.6}) {
    double f = 0, s = 0, t = 0, ta = 0, co = 0, pr = 0;
    for (const auto& m : mats)
      for (std::size_t n = 0; n <= 50; ++n) {
        const IdentityResiduals r = identity_residuals(m, alpha, n);
        if (r.first) f = std::max(f, *r.first / r.scale);
        s = std::max(s, r.second / r.scale);
        if (r.third) t = std::max(t, *r.third / r.scale);
        if (r.third_alt) ta = std::max(ta, *r.third_alt / r.scale);
        co = std::max(co, r.corrected / r.scale);
        pr = std::max(pr, r.printed / r.scale);
      }
    rep.add_row({alpha, f, s, t, ta, co, pr});
    w_first = std::max(w_first, f);
    w_second = std::max(w_second, s);
    w_third = std::max(w_third, t);
    w_alt = std::max(w_alt, ta);
    w_corr = std::max(w_corr, co);
  }
  c.le("first_rel", w_first, 1e-12);
  c.le("second_rel", w_second, 1e-12);
  c.le("third_rel", w_third, 1e-12);
  c.le("third_alt_rel", w_alt, 1e-12);
  c.le("corrected_rel", w_corr, 1e-12);

  // t = 2, alpha = 0.5, n = 0: LHS 2/3, printed RHS 4/3
  const DenseOperator scalar(ComplexMatrix::Constant(1, 1, 2.0), "t=2");
  const IdentityResiduals r = identity_residuals(scalar, 0.5, 0);
  c.le("scalar_corrected", r.corrected, 1e-15);
  c.ge("scalar_printed_fails", r.printed, 0.5);
  c.emit(rep, "c7_identities");
  return c.r;
}

CriterionResult stability_criterion(const CheckOptions& opts) {
  Checker c(8, "mean differences decay for the shift", opts);
  const WeightedShift t(0.3, 2 * 513);
  for (const double alpha : {0.5, 1.0}) {
    for (const auto mode : {MeanDifferenceMode::diff, MeanDifferenceMode::times_TminusI}) {
      const SeriesReport rep = mean_difference_series(t, alpha, 512, 1.0, mode);
      const std::string name = std::string(to_string(mode)) + "_a" +
                               (alpha == 1.0 ? std::string("1") : std::string("0.5"));
      const double v32 = rep.at(32, "value");
      const double v512 = rep.at(512, "value");
      c.le(name + "_512_over_32", v512 / v32, 0.1);
      c.emit(rep, "c8_" + name);
    }
  }
  return c.r;
}

CriterionResult ergodic_criterion(const CheckOptions& opts) {
  Checker c(9, "ergodic probe for the shift", opts);
  const double alpha = 0.5;
  const std::size_t N = 1000;
  const WeightedShift t(0.3, 2048);
  const auto means = cesaro_mean_orbit(t, alpha, N, basis_vector(t.dim(), 1));
  double worst = 0.0;
  for (std::size_t n = 0; n <= N; ++n) {
    ComplexVector expected = ComplexVector::Zero(t.dim());
    expected(0) = alpha / (n + alpha);
    worst = std::max(worst, (means[n] - expected).cwiseAbs().maxCoeff());
  }
  c.le("e1_max_err", worst, 1e-12);

  Rng rng(opts.seed, 0);
  const ComplexVector x = random_unit_vector(t.dim(), 32, 2.0, rng);
  const SeriesReport rep = ergodic_limit_probe(t, alpha, x, N, 2.0);
  c.le("cauchy_at_999", rep.at(N - 1, "cauchy"), 1e-3);
  c.emit(rep, "c9_ergodic");
  return c.r;
}

}  // namespace

std::vector<CriterionResult> run_checks(const CheckOptions& opts) {
  if (opts.out) {
    std::error_code ec;
    fs::create_directories(*opts.out, ec);
    if (ec) fail(ErrorCode::io, "cannot create " + opts.out->string() + ": " + ec.message());
  }
  std::vector<CriterionResult> results;
  for (auto* f : {kernel_criterion, shift_norm_criterion, growth_criterion, plateau_criterion,
                  divergence_criterion, assani_criterion, identity_criterion,
                  stability_criterion, ergodic_criterion})
    results.push_back(f(opts));

  if (opts.out) {
    SeriesReport summary("checks", {"criterion", "passed", "measurement", "value", "limit"});
    for (const auto& r : results)
      for (std::size_t i = 0; i < r.measurements.size(); ++i)
        summary.add_row({static_cast<double>(r.id), r.passed ? 1.0 : 0.0,
                         static_cast<double>(i), r.measurements[i].value,
                         r.measurements[i].limit});
    summary.validate();
    write_csv(summary, *opts.out / "checks.csv",
              CsvStamp{fnv1a_hex("check seed=" + std::to_string(opts.seed)), opts.seed});
  }
  return results;
}

std::string format_result(const CriterionResult& r) {
  std::string s = "criterion " + std::to_string(r.id) + (r.passed ? " PASS " : " FAIL ") + r.title;
  for (const auto& m : r.measurements) {
    char buf[96];
    std::snprintf(buf, sizeof buf, " %s=%.6g (limit %.3g)", m.name.c_str(), m.value, m.limit);
    s += buf;
  }
  return s;
}

}  // namespace cesarolab
