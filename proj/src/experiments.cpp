#include "cesarolab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "cesarolab/cesaro.hpp"
#include "cesarolab/kernel.hpp"
#include "cesarolab/norms.hpp"
#include "cesarolab/probes.hpp"
#include "cesarolab/random.hpp"
#include "cesarolab/report.hpp"

namespace cesarolab {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kMaxDenseDim = 256;

[[noreturn]] void invalid(const std::string& field, const std::string& reason) {
  fail(ErrorCode::config_validation, field + ": " + reason);
}

void line_column(const std::string& text, std::size_t byte, std::size_t& line,
                 std::size_t& column) {
  line = 1;
  column = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) invalid(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(field, "must be finite");
  return d;
}

std::size_t get_count(const json& v, const std::string& field) {
  if (!v.is_number_unsigned()) invalid(field, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string get_string(const json& v, const std::string& field) {
  if (!v.is_string()) invalid(field, "expected a string");
  return v.get<std::string>();
}

NormIndex get_norm_index(const json& v, const std::string& field) {
  try {
    if (v.is_string()) return NormIndex::parse(v.get<std::string>());
    return NormIndex(get_number(v, field));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config_validation) throw;
    invalid(field, "p must be a number >= 1 or \"inf\"");
  }
}

std::string tag(double v) {
  if (std::isinf(v)) return "inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

bool needs_random(const std::string& strategy) {
  return strategy == "random" || strategy == "all";
}

struct Context {
  const ExperimentConfig& cfg;
  fs::path out;
  CsvStamp stamp;
  RunResult result;

  void emit(SeriesReport rep, const std::string& stem) {
    rep.validate();
    const fs::path csv = out / (stem + ".csv");
    write_csv(rep, csv, stamp);
    write_meta_json(rep, out / (stem + ".json"));
    result.files.push_back(csv);
  }
  void require(bool ok, const std::string& what) {
    if (!ok) {
      result.invariants_ok = false;
      result.failures.push_back(what);
    }
  }
};

WeightedShift config_shift(const ExperimentConfig& cfg) {
  return WeightedShift(*cfg.op.beta, *cfg.op.dim);
}

DenseOperator as_dense(const LinearOperator& op) {
  if (const auto* d = std::get_if<DenseOperator>(&op)) return *d;
  return DenseOperator(materialize(op), operator_id(op));
}

// ---- experiments ----------------------------------------------------------

void run_kernel_checks(Context& ctx) {
  const std::size_t N = *ctx.cfg.N;
  for (const double a : ctx.cfg.alpha) {
    const FractionalOrder order(a);
    const KernelSeq k = kernel_seq(order, N);
    if (a <= 1.0) {
      const KernelBoundsReport b = kernel_bounds_report(order, N);
      SeriesReport rep("kernel-bounds",
                       {"n", "value", "lower", "upper", "within", "asymptotic_ratio"});
      for (const auto& r : b.rows)
        rep.add_row({static_cast<double>(r.n), r.value, r.lower, r.upper,
                     r.within ? 1.0 : 0.0, r.asymptotic_ratio});
      rep.set("alpha", a);
      rep.set("all_within", b.all_within ? "true" : "false");
      ctx.emit(rep, "kernel_bounds_a" + tag(a));
      ctx.require(b.all_within, "kernel bounds violated at alpha=" + tag(a));
    } else {
      const auto ratio = kernel_asymptotic_ratio(order, N);
      SeriesReport rep("kernel-asymptotics", {"n", "value", "asymptotic_ratio"});
      for (std::size_t n = 1; n <= N; ++n)
        rep.add_row({static_cast<double>(n), k[n], ratio[n - 1]});
      rep.set("alpha", a);
      ctx.emit(rep, "kernel_asymptotics_a" + tag(a));
    }

    // k^a * k^1 = k^{a+1}
    const KernelSeq one = kernel_seq(FractionalOrder(1.0), N);
    const KernelSeq next = kernel_seq(FractionalOrder(a + 1.0), N);
    const auto conv = kernel_convolve(k, one);
    SeriesReport rep("kernel-semigroup", {"n", "convolved", "direct", "rel_err"});
    double worst = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
      const double err = std::abs(conv[n] - next[n]) / std::abs(next[n]);
      worst = std::max(worst, err);
      rep.add_row({static_cast<double>(n), conv[n], next[n], err});
    }
    rep.set("alpha", a);
    rep.set("max_rel_err", worst);
    ctx.emit(rep, "kernel_semigroup_a" + tag(a));
    ctx.require(worst <= 1e-8, "kernel semigroup error " + format_double(worst));
  }
}

void run_shift_growth(Context& ctx) {
  const WeightedShift t = config_shift(ctx.cfg);
  const std::size_t N = *ctx.cfg.N;
  for (const NormIndex& p : ctx.cfg.p) {
    const OrbitNormTable table = operator_power_norm_table(t, N, p, ctx.cfg.seed.value_or(0));
    SeriesReport rep = table.to_report("shift-growth");
    rep.columns.push_back("closed_form");
    double worst = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
      const double c = shift_norm_closed_form(t.beta(), n);
      rep.rows[n].push_back(c);
      worst = std::max(worst, std::abs(table.values[n] - c) / c);
    }
    const std::size_t first = std::max<std::size_t>(1, N / 8);
    if (N + 1 - first >= 8) {
      const GrowthFit fit = growth_exponent_fit(table, first, N);
      rep.set("fit_exponent", fit.exponent);
      rep.set("fit_intercept", fit.intercept);
      rep.set("fit_residual", fit.residual);
      rep.set("fit_window", std::to_string(first) + ".." + std::to_string(N));
    }
    rep.set("beta", t.beta());
    rep.set("max_rel_err_closed_form", worst);
    ctx.emit(rep, "power_norms_p" + p.str());
    if (table.method == "exact")
      ctx.require(worst <= 1e-9, "power norms differ from (n+1)^beta at p=" + p.str());

    for (const double a : ctx.cfg.alpha) {
      SeriesReport ratio = small_o_ratio_series(table, a);
      ratio.set("beta", t.beta());
      ctx.emit(ratio, "small_o_a" + tag(a) + "_p" + p.str());
    }
  }
  ctx.emit(mixing_criterion_series(t, N), "mixing");
}

void run_abs_bound_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const std::size_t N = *cfg.N;
  const ProbeStrategy strategy =
      ProbeStrategy::parse(cfg.strategy, cfg.probe_count, cfg.seed.value_or(0));
  for (const double a : cfg.alpha) {
    for (const NormIndex& p : cfg.p) {
      const double pv = p.is_inf() ? INFINITY : p.value();
      const double inv = p.is_inf() ? 0.0 : 1.0 / pv;
      std::vector<double> betas = {0.5 * a * inv, 0.9 * a * inv, inv, 1.2 * inv};
      if (cfg.op.beta) betas.push_back(*cfg.op.beta);
      std::set<double> seen;
      for (const double beta : betas) {
        if (beta <= 0.0 || !seen.insert(beta).second) continue;
        const WeightedShift t(beta, *cfg.op.dim);
        SeriesReport rep = abs_cesaro_sup_estimate(t, a, N, p, strategy);
        rep.set("beta", beta);
        const char* regime = beta < a * inv   ? "absolutely-bounded"
                             : beta >= inv    ? "not-cesaro-bounded"
                                              : "unclassified";
        rep.set("regime", regime);
        ctx.emit(rep, "abs_sup_a" + tag(a) + "_p" + p.str() + "_b" + tag(beta));
      }
    }
  }
}

void run_prop21(Context& ctx) {
  const std::size_t N = *ctx.cfg.N;
  std::vector<std::size_t> Ns;
  for (std::size_t m = 4; m <= N; m *= 2) Ns.push_back(m);
  if (Ns.empty() || Ns.back() != N) Ns.push_back(N);
  for (const double a : ctx.cfg.alpha)
    for (const NormIndex& p : ctx.cfg.p)
      ctx.emit(prop21_divergence_series(p, a, Ns), "prop21_a" + tag(a) + "_p" + p.str());
}

void run_mean_stability(Context& ctx) {
  const LinearOperator op = build_operator(ctx.cfg);
  const MeanDifferenceMode mode = parse_mean_difference_mode(ctx.cfg.mode);
  NormOptions opts;
  opts.seed = ctx.cfg.seed.value_or(0);
  for (const double a : ctx.cfg.alpha)
    for (const NormIndex& p : ctx.cfg.p)
      ctx.emit(mean_difference_series(op, a, *ctx.cfg.N, p, mode, opts),
               "mean_" + std::string(to_string(mode)) + "_a" + tag(a) + "_p" + p.str());
}

void run_identities(Context& ctx) {
  const DenseOperator op = as_dense(build_operator(ctx.cfg));
  const std::size_t N = *ctx.cfg.N;
  for (const double a : ctx.cfg.alpha) {
    std::vector<std::string> cols = {"n", "scale"};
    if (a == 1.0) cols.push_back("first");
    cols.push_back("second");
    if (a >= 1.0) {
      cols.push_back("third");
      cols.push_back("third_alt");
    }
    cols.push_back("corrected");
    cols.push_back("printed");
    SeriesReport rep("identities", cols);
    bool ok = true;
    for (std::size_t n = 0; n <= N; ++n) {
      const IdentityResiduals r = identity_residuals(op, a, n);
      const double tol = 1e-12 * r.scale;
      std::vector<double> row = {static_cast<double>(n), r.scale};
      if (r.first) {
        row.push_back(*r.first);
        ok = ok && *r.first <= tol;
      }
      row.push_back(r.second);
      if (r.third) {
        row.push_back(*r.third);
        row.push_back(*r.third_alt);
        ok = ok && *r.third <= tol && *r.third_alt <= tol;
      }
      row.push_back(r.corrected);
      row.push_back(r.printed);
      ok = ok && r.second <= tol && r.corrected <= tol;
      rep.add_row(std::move(row));
    }
    rep.set("alpha", a);
    rep.set("operator", op.id());
    rep.set("tolerance", "1e-12 * (1 + ||T||_inf^(n+1))");
    ctx.emit(rep, "identities_a" + tag(a));
    ctx.require(ok, "identity residual above tolerance at alpha=" + tag(a));
  }
}

void write_spectrum(Context& ctx, const DenseOperator& op) {
  const SpectrumReport s = spectrum_unit_circle_report(op);
  json j;
  j["operator"] = op.id();
  j["tolerance"] = s.tolerance;
  j["peripheral_in_one"] = s.peripheral_in_one;
  j["eigenvalues"] = json::array();
  for (const auto& e : s.eigenvalues)
    j["eigenvalues"].push_back({{"re", format_double(e.eigenvalue.real())},
                                {"im", format_double(e.eigenvalue.imag())},
                                {"distance_to_circle", format_double(e.distance_to_circle)}});
  const fs::path path = ctx.out / "spectrum.json";
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot write " + path.string());
  f << j.dump(2) << '\n';
  ctx.result.files.push_back(path);
}

void run_kreiss(Context& ctx) {
  const DenseOperator op = as_dense(build_operator(ctx.cfg));
  NormOptions opts;
  opts.seed = ctx.cfg.seed.value_or(0);
  for (const NormIndex& p : ctx.cfg.p) {
    ctx.emit(kreiss_probe(op, p, KreissGrid::standard(), KreissMode::classic, opts),
             "kreiss_p" + p.str());
    if (ctx.cfg.N)
      ctx.emit(kreiss_probe(op, p, KreissGrid::standard(64, *ctx.cfg.N), KreissMode::uniform,
                            opts),
               "kreiss_uniform_p" + p.str());
  }
  if (op.dim() <= 64) write_spectrum(ctx, op);
}

void run_assani(Context& ctx) {
  const DenseOperator a = assani();
  const std::size_t N = *ctx.cfg.N;
  const OrbitNormTable table = operator_power_norm_table(a, N, NormIndex::inf());
  SeriesReport powers = table.to_report("assani-powers");
  powers.columns.push_back("closed_form");
  bool exact = true;
  for (std::size_t n = 0; n <= N; ++n) {
    const double c = 2.0 * n + 1.0;
    powers.rows[n].push_back(c);
    exact = exact && table.values[n] == c;
  }
  ctx.emit(powers, "assani_powers");
  ctx.require(exact, "||A^n||_inf differs from 2n+1");

  std::vector<double> alphas = {1.0};
  for (const double x : ctx.cfg.alpha)
    if (x != 1.0) alphas.push_back(x);
  for (const double alpha : alphas) {
    SeriesReport means("assani-means", {"n", "value"});
    double worst = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
      const double v = operator_pnorm(cesaro_mean_matrix(a, alpha, n), NormIndex::inf()).value;
      means.add_row({static_cast<double>(n), v});
      worst = std::max(worst, std::abs(v - 1.0));
    }
    means.set("alpha", alpha);
    means.set("p", "inf");
    ctx.emit(means, "assani_means_a" + tag(alpha));
    if (alpha == 1.0) ctx.require(worst <= 1e-12, "||M_A(n)||_inf differs from 1");
  }
  ctx.emit(kreiss_probe(a, NormIndex::inf(), KreissGrid::standard(), KreissMode::classic),
           "assani_kreiss");
  write_spectrum(ctx, a);
}

void run_ergodic(Context& ctx) {
  const LinearOperator op = build_operator(ctx.cfg);
  const std::size_t N = *ctx.cfg.N;
  const std::size_t d = dim(op);
  if (is_shift(op) && N >= d)
    fail(ErrorCode::truncation_too_small, "ergodic probe needs dim > N");
  const std::size_t support = is_shift(op) ? std::min<std::size_t>(32, d - N) : d;
  for (const double a : ctx.cfg.alpha) {
    for (const NormIndex& p : ctx.cfg.p) {
      SeriesReport e1 = ergodic_limit_probe(op, a, basis_vector(d, 1), N, p);
      e1.set("x", "e_1");
      ctx.emit(e1, "ergodic_e1_a" + tag(a) + "_p" + p.str());
      Rng rng(*ctx.cfg.seed, 0);
      const ComplexVector x =
          random_unit_vector(d, support, p.is_inf() ? INFINITY : p.value(), rng);
      SeriesReport rx = ergodic_limit_probe(op, a, x, N, p);
      rx.set("x", "random");
      rx.set("support", static_cast<std::uint64_t>(support));
      rx.set("seed", *ctx.cfg.seed);
      ctx.emit(rx, "ergodic_random_a" + tag(a) + "_p" + p.str());
    }
  }
}

// ---- registry -------------------------------------------------------------

struct Entry {
  ExperimentInfo info;
  std::function<void(Context&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> e = {
      {{"kernel-checks",
        "kernel k^alpha(n): two-sided power bounds, asymptotic ratio, k^a * k^1 = k^(a+1)"},
       run_kernel_checks},
      {{"shift-growth",
        "weighted backward shift: ||T^n||_p against (n+1)^beta, growth fit, n^-alpha ratio"},
       run_shift_growth},
      {{"abs-bound-sweep",
        "absolute (C,alpha) functional sup over beta in {0.5a/p, 0.9a/p, 1/p, 1.2/p}"},
       run_abs_bound_sweep},
      {{"prop21",
        "shift with beta = 1/p: ||M(N) y_(N+1)||_p^p against ln(N/2+1), no (C,alpha) bound"},
       run_prop21},
      {{"mean-stability",
        "||M(n+1)-M(n)||, ||M(n)(T-I)||, ||M(n)(T-I)^2|| or ||T^n(T-I)|| per n"},
       run_mean_stability},
      {{"identities", "residuals of the mean-difference identities from raw powers"},
       run_identities},
      {{"kreiss", "(|l|-1)||(l-T)^-1|| and uniform partial sums on a grid, spectrum on |z|=1"},
       run_kreiss},
      {{"assani",
        "A = [[-1,2],[0,-1]]: ||A^n|| = 2n+1, ||M_A(n)|| = 1, resolvent blow-up near -1"},
       run_assani},
      {{"ergodic", "strong convergence of M(n)x for x = e_1 and a seeded random x"},
       run_ergodic},
  };
  return e;
}

const Entry* find_entry(const std::string& name) {
  for (const auto& e : entries())
    if (e.info.name == name) return &e;
  return nullptr;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : entries()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

std::string ExperimentConfig::canonical() const {
  json j;
  j["experiment"] = experiment;
  j["family"] = op.family;
  if (op.beta) j["beta"] = format_double(*op.beta);
  if (op.dim) j["dim"] = *op.dim;
  if (!op.matrix_file.empty()) j["matrix_file"] = op.matrix_file;
  j["alpha"] = json::array();
  for (const double a : alpha) j["alpha"].push_back(format_double(a));
  j["p"] = json::array();
  for (const NormIndex& q : p) j["p"].push_back(q.str());
  if (N) j["N"] = *N;
  j["strategy"] = strategy;
  j["probe_count"] = probe_count;
  if (seed) j["seed"] = *seed;
  j["mode"] = mode;
  return j.dump();
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(canonical()); }

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 0, column = 0;
    line_column(text, e.byte, line, column);
    fail(ErrorCode::config_parse, "parse error at line " + std::to_string(line) +
                                      ", column " + std::to_string(column));
  }
  if (!j.is_object()) fail(ErrorCode::config_parse, "config must be a JSON object");

  ExperimentConfig cfg;
  bool have_experiment = false, have_family = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "experiment") {
      cfg.experiment = get_string(v, key);
      have_experiment = true;
    } else if (key == "family") {
      cfg.op.family = get_string(v, key);
      have_family = true;
    } else if (key == "beta") {
      cfg.op.beta = get_number(v, key);
      if (*cfg.op.beta <= 0.0) invalid(key, "beta must be positive");
    } else if (key == "dim") {
      cfg.op.dim = get_count(v, key);
      if (*cfg.op.dim == 0) invalid(key, "dim must be at least 1");
    } else if (key == "matrix_file") {
      cfg.op.matrix_file = get_string(v, key);
    } else if (key == "alpha") {
      if (!v.is_array() || v.empty()) invalid(key, "expected a non-empty array of numbers");
      for (const auto& a : v) {
        const double x = get_number(a, key);
        if (x <= 0.0) invalid(key, "alpha must be positive");
        cfg.alpha.push_back(x);
      }
    } else if (key == "p") {
      if (!v.is_array() || v.empty()) invalid(key, "expected a non-empty array");
      for (const auto& q : v) cfg.p.push_back(get_norm_index(q, key));
    } else if (key == "N") {
      cfg.N = get_count(v, key);
    } else if (key == "strategy") {
      cfg.strategy = get_string(v, key);
      if (cfg.strategy != "basis" && cfg.strategy != "random" && cfg.strategy != "witness" &&
          cfg.strategy != "all")
        invalid(key, "expected basis, random, witness or all");
    } else if (key == "probe_count") {
      cfg.probe_count = get_count(v, key);
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) invalid(key, "expected an unsigned 64-bit integer");
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "mode") {
      cfg.mode = get_string(v, key);
      try {
        parse_mean_difference_mode(cfg.mode);
      } catch (const Error&) {
        invalid(key, "expected diff, times_TminusI, times_TminusI_sq or kt_power");
      }
    } else if (key == "output_dir") {
      cfg.output_dir = get_string(v, key);
    } else {
      invalid(key, "unknown key");
    }
  }
  if (!have_experiment) invalid("experiment", "missing");
  if (!have_family) invalid("family", "missing");
  return cfg;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorCode::io, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  const std::string& x = cfg.experiment;
  if (!find_entry(x)) invalid("experiment", "unknown experiment '" + x + "'");

  const std::string& fam = cfg.op.family;
  if (fam != "shift" && fam != "assani" && fam != "dense-file")
    invalid("family", "expected shift, assani or dense-file");
  if (fam == "shift") {
    // prop21 and the sweep pick beta themselves; the kernel checks use no operator
    const bool own_beta = x == "prop21" || x == "abs-bound-sweep" || x == "kernel-checks";
    const bool own_dim = x == "prop21" || x == "kernel-checks";
    if (!own_beta && !cfg.op.beta) invalid("beta", "required for family shift");
    if (!own_dim && !cfg.op.dim) invalid("dim", "required for family shift");
    if (x == "kernel-checks" && (cfg.op.beta || cfg.op.dim))
      invalid("beta", "kernel-checks uses no operator parameters");
  } else {
    if (cfg.op.beta) invalid("beta", "only valid for family shift");
    if (cfg.op.dim) invalid("dim", "only valid for family shift");
  }
  if (fam == "dense-file" && cfg.op.matrix_file.empty())
    invalid("matrix_file", "required for family dense-file");
  if (fam != "dense-file" && !cfg.op.matrix_file.empty())
    invalid("matrix_file", "only valid for family dense-file");

  const bool uses_alpha = x != "shift-growth" && x != "kreiss" && x != "assani";
  const bool uses_p = x != "kernel-checks" && x != "identities" && x != "assani";
  if (uses_alpha && cfg.alpha.empty()) invalid("alpha", "required for " + x);
  if (uses_p && cfg.p.empty()) invalid("p", "required for " + x);
  if (!uses_p && !cfg.p.empty()) invalid("p", "not used by " + x);
  if (x == "kreiss" && !cfg.alpha.empty()) invalid("alpha", "not used by kreiss");
  if (x != "kreiss" && !cfg.N) invalid("N", "required for " + x);

  if (x == "kernel-checks" || x == "shift-growth" || x == "abs-bound-sweep" || x == "prop21") {
    if (fam != "shift" && x != "kernel-checks") invalid("family", x + " needs family shift");
  }
  if (x == "assani" && fam != "assani") invalid("family", "assani needs family assani");
  if (x == "kernel-checks" && *cfg.N > kDefaultHorizonCap)
    invalid("N", "above the kernel horizon cap");
  if (x == "prop21") {
    if (cfg.op.beta) invalid("beta", "prop21 fixes beta = 1/p");
    if (cfg.op.dim) invalid("dim", "prop21 fixes dim = 2(N+1)");
    if (*cfg.N < 4 || *cfg.N % 2 != 0) invalid("N", "prop21 needs an even N >= 4");
    for (const NormIndex& q : cfg.p)
      if (q.is_inf()) invalid("p", "prop21 needs finite p");
  }
  if (x == "abs-bound-sweep") {
    for (const NormIndex& q : cfg.p)
      if (q.is_inf()) invalid("p", "abs-bound-sweep needs finite p");
  }
  if (x == "abs-bound-sweep" && *cfg.op.dim <= *cfg.N)
    invalid("dim", "must exceed N so that some probe orbit stays exact");
  if (x == "mean-stability" || x == "shift-growth") {
    if (fam == "shift" && *cfg.op.dim < 2 * (*cfg.N + 1))
      invalid("dim", "must be at least 2(N+1) = " + std::to_string(2 * (*cfg.N + 1)));
  }
  if ((x == "identities" || x == "kreiss") && fam == "shift" && *cfg.op.dim > kMaxDenseDim)
    invalid("dim", x + " materializes the shift; dim must be <= " +
                       std::to_string(kMaxDenseDim));
  if (x == "ergodic") {
    if (!cfg.seed) invalid("seed", "required: ergodic draws a random vector");
    if (fam == "shift" && *cfg.op.dim <= *cfg.N) invalid("dim", "must exceed N");
  }
  if (x == "abs-bound-sweep") {
    if (needs_random(cfg.strategy)) {
      if (!cfg.seed) invalid("seed", "required for strategy " + cfg.strategy);
      if (cfg.probe_count == 0) invalid("probe_count", "must be positive for " + cfg.strategy);
    }
  } else if (cfg.strategy != "basis" || cfg.probe_count != 0) {
    invalid("strategy", "only used by abs-bound-sweep");
  }
  if (x != "mean-stability" && cfg.mode != "diff") invalid("mode", "only used by mean-stability");
}

LinearOperator build_operator(const ExperimentConfig& cfg) {
  if (cfg.op.family == "shift") return config_shift(cfg);
  if (cfg.op.family == "assani") return assani();
  DenseOperator d = load_dense(cfg.op.matrix_file);
  if (d.dim() > kMaxDenseDim)
    fail(ErrorCode::config_validation,
         "matrix_file: dimension above " + std::to_string(kMaxDenseDim));
  return d;
}

RunResult run_experiment(const ExperimentConfig& cfg, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::io, "cannot create " + out_dir.string() + ": " + ec.message());

  Context ctx{cfg, out_dir, CsvStamp{cfg.hash(), cfg.seed.value_or(0)}, {}};
  try {
    validate_config(cfg);
    find_entry(cfg.experiment)->run(ctx);
  } catch (const Error& e) {
    json j;
    j["error"] = to_string(e.code());
    j["message"] = e.what();
    j["experiment"] = cfg.experiment;
    j["config"] = cfg.hash();
    std::ofstream f(out_dir / "error.json", std::ios::binary);
    f << j.dump(2) << '\n';
    throw;
  }
  return ctx.result;
}

}  // namespace cesarolab
