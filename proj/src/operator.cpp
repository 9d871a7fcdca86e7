#include "cesarolab/operator.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cesarolab/norms.hpp"

namespace cesarolab {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string beta_tag(double beta) { return format_double(beta); }

}  // namespace

WeightedShift::WeightedShift(double beta, std::size_t dim) : beta_(beta) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    fail(ErrorCode::domain, "beta must be positive");
  if (dim < 2) fail(ErrorCode::domain, "shift dimension must be at least 2");
  weights_.resize(dim);
  pow_pos_.resize(dim + 1);
  pow_neg_.resize(dim + 1);
  pow_pos_[0] = 0.0;
  pow_neg_[0] = 0.0;
  for (std::size_t i = 1; i <= dim; ++i) {
    const double l = std::log(static_cast<double>(i));
    pow_pos_[i] = std::exp(beta * l);
    pow_neg_[i] = std::exp(-beta * l);
  }
  weights_[0] = 1.0;
  for (std::size_t j = 2; j <= dim; ++j)
    weights_[j - 1] = std::pow(static_cast<double>(j) / static_cast<double>(j - 1), beta);
}

std::string WeightedShift::id() const {
  return "shift(beta=" + beta_tag(beta_) + ",dim=" + std::to_string(dim()) + ")";
}

double WeightedShift::weight(std::size_t j) const {
  if (j < 1 || j > dim()) fail(ErrorCode::domain, "weight index out of range");
  return weights_[j - 1];
}

ComplexVector WeightedShift::apply(const ComplexVector& x) const {
  const std::size_t d = dim();
  if (static_cast<std::size_t>(x.size()) != d)
    fail(ErrorCode::domain, "vector dimension does not match the shift");
  ComplexVector y = ComplexVector::Zero(idx(d));
  for (std::size_t i = 0; i + 1 < d; ++i) y(idx(i)) = weights_[i + 1] * x(idx(i + 1));
  return y;
}

ComplexVector WeightedShift::apply_adjoint(const ComplexVector& x) const {
  const std::size_t d = dim();
  if (static_cast<std::size_t>(x.size()) != d)
    fail(ErrorCode::domain, "vector dimension does not match the shift");
  ComplexVector y = ComplexVector::Zero(idx(d));
  for (std::size_t i = 0; i + 1 < d; ++i) y(idx(i + 1)) = weights_[i + 1] * x(idx(i));
  return y;
}

ComplexVector WeightedShift::apply_poly(std::span<const Complex> coeffs,
                                        const ComplexVector& x) const {
  const std::size_t d = dim();
  if (static_cast<std::size_t>(x.size()) != d)
    fail(ErrorCode::domain, "vector dimension does not match the shift");
  ComplexVector y = ComplexVector::Zero(idx(d));
  for (std::size_t j = 0; j < coeffs.size() && j < d; ++j) {
    if (coeffs[j] == Complex(0.0, 0.0)) continue;
    // 1-based: y_i += c_j ((i+j)/i)^beta x_{i+j}
    for (std::size_t i = 1; i + j <= d; ++i)
      y(idx(i - 1)) += coeffs[j] * (pow_pos_[i + j] * pow_neg_[i]) * x(idx(i + j - 1));
  }
  return y;
}

ComplexVector WeightedShift::apply_poly_adjoint(std::span<const Complex> coeffs,
                                                const ComplexVector& x) const {
  const std::size_t d = dim();
  if (static_cast<std::size_t>(x.size()) != d)
    fail(ErrorCode::domain, "vector dimension does not match the shift");
  ComplexVector y = ComplexVector::Zero(idx(d));
  for (std::size_t j = 0; j < coeffs.size() && j < d; ++j) {
    if (coeffs[j] == Complex(0.0, 0.0)) continue;
    const Complex c = std::conj(coeffs[j]);
    for (std::size_t i = 1; i + j <= d; ++i)
      y(idx(i + j - 1)) += c * (pow_pos_[i + j] * pow_neg_[i]) * x(idx(i - 1));
  }
  return y;
}

ComplexMatrix WeightedShift::materialize() const {
  const std::size_t d = dim();
  ComplexMatrix m = ComplexMatrix::Zero(idx(d), idx(d));
  for (std::size_t j = 2; j <= d; ++j) m(idx(j - 2), idx(j - 1)) = weights_[j - 1];
  return m;
}

ComplexMatrix WeightedShift::materialize_power(std::size_t n) const {
  const std::size_t d = dim();
  ComplexMatrix m = ComplexMatrix::Zero(idx(d), idx(d));
  for (std::size_t col = 1; col <= d; ++col) {
    if (n >= col) continue;
    double value = 1.0;
    std::size_t pos = col;
    for (std::size_t step = 0; step < n; ++step) {
      value *= weights_[pos - 1];
      --pos;
    }
    m(idx(pos - 1), idx(col - 1)) = value;
  }
  return m;
}

ComplexMatrix WeightedShift::materialize_poly(std::span<const Complex> coeffs) const {
  const std::size_t d = dim();
  ComplexMatrix m = ComplexMatrix::Zero(idx(d), idx(d));
  for (std::size_t j = 0; j < coeffs.size() && j < d; ++j)
    for (std::size_t i = 1; i + j <= d; ++i)
      m(idx(i - 1), idx(i + j - 1)) = coeffs[j] * (pow_pos_[i + j] * pow_neg_[i]);
  return m;
}

WeightedShift build_weighted_shift(double beta, std::size_t dim) { return {beta, dim}; }

DenseOperator::DenseOperator(ComplexMatrix matrix, std::string id)
    : matrix_(std::move(matrix)), id_(std::move(id)) {
  if (matrix_.rows() != matrix_.cols())
    fail(ErrorCode::domain, "operator matrix is not square (" + std::to_string(matrix_.rows()) +
                                "x" + std::to_string(matrix_.cols()) + ")");
  if (matrix_.rows() < 1) fail(ErrorCode::domain, "operator matrix is empty");
  if (!matrix_.allFinite()) fail(ErrorCode::domain, "operator matrix has non-finite entries");
}

DenseOperator build_dense(const std::vector<std::vector<Complex>>& entries, std::string id) {
  const std::size_t d = entries.size();
  if (d == 0) fail(ErrorCode::domain, "operator matrix is empty");
  ComplexMatrix m(idx(d), idx(d));
  for (std::size_t i = 0; i < d; ++i) {
    if (entries[i].size() != d)
      fail(ErrorCode::domain, "operator matrix is not square: row " + std::to_string(i + 1) +
                                  " has " + std::to_string(entries[i].size()) + " entries");
    for (std::size_t j = 0; j < d; ++j) m(idx(i), idx(j)) = entries[i][j];
  }
  return DenseOperator(std::move(m), std::move(id));
}

DenseOperator assani() {
  ComplexMatrix m(2, 2);
  m << -1.0, 2.0, 0.0, -1.0;
  return DenseOperator(std::move(m), "assani");
}

DenseOperator identity_operator(std::size_t dim) {
  return DenseOperator(ComplexMatrix::Identity(idx(dim), idx(dim)),
                       "identity(dim=" + std::to_string(dim) + ")");
}

DenseOperator parse_dense(std::istream& in, std::string id) {
  std::string token;
  if (!(in >> token)) fail(ErrorCode::domain, "matrix file is empty");
  std::size_t d = 0;
  try {
    std::size_t used = 0;
    d = std::stoul(token, &used);
    if (used != token.size()) throw std::invalid_argument(token);
  } catch (const std::exception&) {
    fail(ErrorCode::domain, "matrix file: first line must be the dimension, got '" + token + "'");
  }
  if (d == 0) fail(ErrorCode::domain, "matrix file: dimension must be positive");
  ComplexMatrix m(idx(d), idx(d));
  for (std::size_t k = 0; k < d * d; ++k) {
    if (!(in >> token))
      fail(ErrorCode::domain, "matrix file: expected " + std::to_string(d * d) +
                                  " entries, found " + std::to_string(k) + " (non-square)");
    const auto comma = token.find(',');
    if (comma == std::string::npos)
      fail(ErrorCode::domain, "matrix file: entry '" + token + "' is not 're,im'");
    try {
      std::size_t u1 = 0, u2 = 0;
      const std::string re_s = token.substr(0, comma), im_s = token.substr(comma + 1);
      const double re = std::stod(re_s, &u1);
      const double im = std::stod(im_s, &u2);
      if (u1 != re_s.size() || u2 != im_s.size()) throw std::invalid_argument(token);
      m(idx(k / d), idx(k % d)) = Complex(re, im);
    } catch (const std::exception&) {
      fail(ErrorCode::domain, "matrix file: cannot parse entry '" + token + "'");
    }
  }
  if (in >> token)
    fail(ErrorCode::domain, "matrix file: trailing entries after " + std::to_string(d * d) +
                                " values (non-square)");
  return DenseOperator(std::move(m), std::move(id));
}

DenseOperator load_dense(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::io, "cannot open matrix file '" + path.string() + "'");
  return parse_dense(f, "dense-file(" + path.filename().string() + ")");
}

void save_dense(const DenseOperator& op, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) fail(ErrorCode::io, "cannot open '" + path.string() + "' for writing");
  const auto& m = op.matrix();
  f << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) f << ' ';
      f << format_double(m(i, j).real()) << ',' << format_double(m(i, j).imag());
    }
    f << '\n';
  }
  if (!f) fail(ErrorCode::io, "write failed for '" + path.string() + "'");
}

std::size_t dim(const LinearOperator& op) {
  return std::visit([](const auto& o) { return o.dim(); }, op);
}

std::string operator_id(const LinearOperator& op) {
  return std::visit([](const auto& o) { return std::string(o.id()); }, op);
}

ComplexVector apply(const LinearOperator& op, const ComplexVector& x) {
  if (static_cast<std::size_t>(x.size()) != dim(op))
    fail(ErrorCode::domain, "vector dimension " + std::to_string(x.size()) +
                                " does not match operator dimension " +
                                std::to_string(dim(op)));
  return std::visit([&](const auto& o) -> ComplexVector { return o.apply(x); }, op);
}

ComplexMatrix materialize(const LinearOperator& op) {
  if (const auto* s = std::get_if<WeightedShift>(&op)) return s->materialize();
  return std::get<DenseOperator>(op).matrix();
}

bool is_shift(const LinearOperator& op) { return std::holds_alternative<WeightedShift>(op); }

void check_orbit_exactness(const WeightedShift& shift, const ComplexVector& x, std::size_t N) {
  const std::size_t support = support_extent(x);
  if (N + support > shift.dim())
    fail(ErrorCode::truncation_too_small,
         "truncation too small: horizon " + std::to_string(N) + " + support " +
             std::to_string(support) + " exceeds dimension " + std::to_string(shift.dim()));
}

void walk_orbit(const LinearOperator& op, const ComplexVector& x, std::size_t N,
                const std::function<void(std::size_t, const ComplexVector&, std::size_t,
                                         std::size_t)>& visit) {
  const std::size_t d = dim(op);
  if (static_cast<std::size_t>(x.size()) != d)
    fail(ErrorCode::domain, "vector dimension " + std::to_string(x.size()) +
                                " does not match operator dimension " + std::to_string(d));
  if (const auto* s = std::get_if<WeightedShift>(&op)) {
    check_orbit_exactness(*s, x, N);
    ComplexVector state = x;
    std::size_t end = support_extent(x);
    std::size_t begin = 0;
    while (begin < end && state(idx(begin)) == Complex(0.0, 0.0)) ++begin;
    if (begin == end) begin = end = 0;
    visit(0, state, begin, end);
    for (std::size_t j = 1; j <= N; ++j) {
      if (end == 0) {
        visit(j, state, 0, 0);
        continue;
      }
      // in place: x_i <- w_{i+1} x_{i+1} (1-based), only across the window
      const std::size_t lo = begin == 0 ? 0 : begin - 1;
      for (std::size_t i = lo; i + 1 < end; ++i)
        state(idx(i)) = s->weight(i + 2) * state(idx(i + 1));
      state(idx(end - 1)) = 0.0;
      begin = lo;
      end -= 1;
      if (begin >= end) begin = end = 0;
      visit(j, state, begin, end);
    }
    return;
  }
  const auto& m = std::get<DenseOperator>(op).matrix();
  ComplexVector state = x;
  ComplexVector next(state.size());
  visit(0, state, 0, d);
  for (std::size_t j = 1; j <= N; ++j) {
    next.noalias() = m * state;
    state.swap(next);
    visit(j, state, 0, d);
  }
}

Orbit orbit_states(const LinearOperator& op, const ComplexVector& x, std::size_t N) {
  Orbit out;
  out.states.reserve(N + 1);
  out.extent.reserve(N + 1);
  walk_orbit(op, x, N, [&](std::size_t, const ComplexVector& v, std::size_t, std::size_t end) {
    out.states.push_back(v);
    out.extent.push_back(end);
  });
  return out;
}

SeriesReport OrbitNormTable::to_report(const std::string& name) const {
  SeriesReport r(name, {"n", "value"});
  for (std::size_t j = 0; j < values.size(); ++j)
    r.add_row({static_cast<double>(j), values[j]});
  r.set("p", std::isinf(p) ? std::string("inf") : format_double(p));
  r.set("operator", operator_id);
  r.set("dim", static_cast<std::uint64_t>(dim));
  r.set("seed", seed);
  r.set("method", method);
  r.set("kind", operator_norms ? "operator_power_norms" : "orbit_norms");
  return r;
}

OrbitNormTable orbit(const LinearOperator& op, const ComplexVector& x, std::size_t N,
                     NormIndex p) {
  OrbitNormTable t;
  t.p = p.value();
  t.operator_id = operator_id(op);
  t.dim = dim(op);
  t.values.resize(N + 1);
  walk_orbit(op, x, N,
             [&](std::size_t j, const ComplexVector& v, std::size_t begin, std::size_t end) {
               t.values[j] = end > begin ? vector_pnorm(v.segment(idx(begin), idx(end - begin)), p)
                                         : 0.0;
             });
  return t;
}

OrbitNormTable operator_power_norm_table(const LinearOperator& op, std::size_t N, NormIndex p,
                                         std::uint64_t seed) {
  OrbitNormTable t;
  t.p = p.value();
  t.operator_id = operator_id(op);
  t.dim = dim(op);
  t.seed = seed;
  t.operator_norms = true;
  t.values.resize(N + 1);
  NormOptions opts;
  opts.seed = seed;
  bool sampled = false;
  if (const auto* s = std::get_if<WeightedShift>(&op)) {
    if (s->dim() < 2 * (N + 1))
      fail(ErrorCode::truncation_too_small,
           "truncation too small: power norms up to n=" + std::to_string(N) +
               " need dim >= " + std::to_string(2 * (N + 1)) + ", have " +
               std::to_string(s->dim()));
    for (std::size_t n = 0; n <= N; ++n) {
      std::vector<Complex> coeffs(n + 1, 0.0);
      coeffs[n] = 1.0;
      const NormResult r = shift_poly_pnorm(*s, coeffs, p, opts);
      t.values[n] = r.value;
      sampled = sampled || r.method == NormMethod::sampled_lower_bound;
    }
  } else {
    const auto& m = std::get<DenseOperator>(op).matrix();
    ComplexMatrix power = ComplexMatrix::Identity(m.rows(), m.cols());
    for (std::size_t n = 0; n <= N; ++n) {
      const NormResult r = operator_pnorm(power, p, opts);
      t.values[n] = r.value;
      sampled = sampled || r.method == NormMethod::sampled_lower_bound;
      if (n < N) power = m * power;
    }
  }
  t.method = sampled ? "sampled-lower-bound" : "exact";
  return t;
}

double shift_norm_closed_form(double beta, std::size_t n) {
  if (!(beta > 0.0)) fail(ErrorCode::domain, "beta must be positive");
  return std::exp(beta * std::log(static_cast<double>(n) + 1.0));
}

SeriesReport mixing_criterion_series(const WeightedShift& shift, std::size_t N) {
  if (N + 1 > shift.dim())
    fail(ErrorCode::truncation_too_small,
         "mixing series horizon " + std::to_string(N) + " exceeds dimension " +
             std::to_string(shift.dim()));
  SeriesReport r("mixing_criterion", {"n", "value", "closed_form"});
  double product = 1.0;
  for (std::size_t n = 1; n <= N; ++n) {
    product *= shift.weight(n);
    r.add_row({static_cast<double>(n), 1.0 / product,
               std::exp(-shift.beta() * std::log(static_cast<double>(n)))});
  }
  r.set("operator", shift.id());
  r.set("beta", shift.beta());
  r.set("dim", static_cast<std::uint64_t>(shift.dim()));
  return r;
}

}  // namespace cesarolab
