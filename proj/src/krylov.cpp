#include "pareto_tracer/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "pareto_tracer/kernels.hpp"

namespace pareto_tracer {

void LinearOperator::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != dim_ || out.size() != dim_)
    throw std::invalid_argument("LinearOperator::apply: dimension mismatch");
  apply_(in, out);
  if (!all_finite(out)) throw NumericalError("linear operator produced a non-finite value");
}

Vector LinearOperator::operator()(std::span<const double> in) const {
  Vector out(dim_);
  apply(in, out);
  return out;
}

LinearOperator LinearOperator::from_dense(DenseMatrix matrix) {
  if (matrix.rows() != matrix.cols()) throw std::invalid_argument("from_dense: matrix must be square");
  const std::size_t n = matrix.rows();
  return LinearOperator(n, [m = std::move(matrix)](std::span<const double> in, std::span<double> out) {
    for (std::size_t i = 0; i < m.rows(); ++i) out[i] = kernels::dot(m.row(i), in);
  });
}

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw ConfigError("solver tol must be > 0");
  if (max_iter < 1) throw ConfigError("solver max_iter must be >= 1");
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kCg: return "CG";
    case SolverKind::kCr: return "MINRES";
    case SolverKind::kMinres: return "MINRES-LANCZOS";
  }
  return "?";
}

SolverKind solver_kind_from_string(const std::string& raw) {
  std::string s = raw;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "cg") return SolverKind::kCg;
  if (s == "minres" || s == "cr") return SolverKind::kCr;
  if (s == "lanczos" || s == "minres-lanczos" || s == "minres_lanczos") return SolverKind::kMinres;
  throw ConfigError("unknown solver '" + raw + "' (expected cg, minres, cr or minres-lanczos)");
}

namespace {

void check_inputs(const LinearOperator& op, std::span<const double> b, const SolverConfig& config) {
  config.validate();
  if (op.dim() != b.size()) throw std::invalid_argument("solver: operator and rhs dimensions differ");
}

class Recorder {
 public:
  explicit Recorder(const SolverConfig& config) {
    if (config.record_residuals) report_.residual_history.emplace();
  }
  void iteration(double residual_norm) {
    ++report_.iterations_used;
    report_.final_residual_norm = residual_norm;
    if (report_.residual_history) report_.residual_history->push_back(residual_norm);
  }
  void matvec() { ++report_.matvec_count; }
  SolveReport finish(double tol) {
    report_.converged = report_.final_residual_norm <= tol;
    return report_;
  }
  SolveReport& report() { return report_; }

 private:
  SolveReport report_;
};

}  // namespace

SolveResult cg_solve(const LinearOperator& op, std::span<const double> b, const SolverConfig& config) {
  check_inputs(op, b, config);
  const std::size_t n = b.size();
  Recorder rec(config);

  Vector v(n, 0.0);
  Vector r(b.begin(), b.end());
  Vector p = r;
  Vector hp(n);
  double rr = kernels::dot(r, r);
  rec.report().final_residual_norm = std::sqrt(rr);

  int i = 0;
  while (i < config.max_iter && std::sqrt(rr) > config.tol) {
    op.apply(p, hp);
    rec.matvec();
    const double php = kernels::dot(p, hp);
    if (php == 0.0 || !std::isfinite(php)) {
      throw SolverBreakdown("CG breakdown: p'Hp = 0", v, rec.finish(config.tol));
    }
    const double alpha = rr / php;
    kernels::axpy(alpha, p, v);
    kernels::axpy(-alpha, hp, r);
    const double rr_next = kernels::dot(r, r);
    const double beta = rr_next / rr;
    kernels::lincomb(1.0, r, beta, p, p);
    rr = rr_next;
    ++i;
    rec.iteration(std::sqrt(rr));
  }
  return {std::move(v), rec.finish(config.tol)};
}

SolveResult cr_solve(const LinearOperator& op, std::span<const double> b, const SolverConfig& config) {
  check_inputs(op, b, config);
  const std::size_t n = b.size();
  Recorder rec(config);

  Vector v(n, 0.0);
  Vector r(b.begin(), b.end());
  double rnorm = kernels::norm2(r);
  rec.report().final_residual_norm = rnorm;
  if (rnorm <= config.tol) return {std::move(v), rec.finish(config.tol)};

  Vector p = r;
  Vector hr(n);
  op.apply(r, hr);
  rec.matvec();
  Vector hp = hr;
  double rhr = kernels::dot(hr, r);

  int i = 0;
  while (i < config.max_iter && rnorm > config.tol) {
    const double hphp = kernels::dot(hp, hp);
    if (rhr == 0.0 || hphp == 0.0 || !std::isfinite(rhr) || !std::isfinite(hphp)) {
      throw SolverBreakdown("CR breakdown: (Hr)'r = 0 or Hp = 0", v, rec.finish(config.tol));
    }
    const double alpha = rhr / hphp;
    kernels::axpy(alpha, p, v);
    kernels::axpy(-alpha, hp, r);
    rnorm = kernels::norm2(r);
    ++i;
    rec.iteration(rnorm);
    if (i >= config.max_iter || rnorm <= config.tol) break;

    op.apply(r, hr);
    rec.matvec();
    const double rhr_next = kernels::dot(hr, r);
    const double beta = rhr_next / rhr;
    kernels::lincomb(1.0, r, beta, p, p);
    kernels::lincomb(1.0, hr, beta, hp, hp);
    rhr = rhr_next;
  }
  return {std::move(v), rec.finish(config.tol)};
}

// Paige-Saunders MINRES without preconditioning. Only the two latest Lanczos
// vectors (r1, r2) and three search directions are kept.
SolveResult minres_solve(const LinearOperator& op, std::span<const double> b,
                         const SolverConfig& config) {
  check_inputs(op, b, config);
  const std::size_t n = b.size();
  Recorder rec(config);

  Vector x(n, 0.0);
  const double beta1 = kernels::norm2(b);
  rec.report().final_residual_norm = beta1;
  if (beta1 <= config.tol) return {std::move(x), rec.finish(config.tol)};

  Vector r1(b.begin(), b.end());
  Vector r2 = r1;
  Vector y = r1;
  Vector v(n), w(n, 0.0), w1(n, 0.0), w2(n, 0.0);

  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
  double phibar = beta1, cs = -1.0, sn = 0.0;

  for (int itn = 1; itn <= config.max_iter; ++itn) {
    for (std::size_t k = 0; k < n; ++k) v[k] = y[k] / beta;
    op.apply(v, y);
    rec.matvec();
    if (itn >= 2) kernels::axpy(-beta / oldb, r1, y);
    const double alfa = kernels::dot(v, y);
    kernels::axpy(-alfa / beta, r2, y);
    r1.swap(r2);
    r2 = y;
    oldb = beta;
    beta = kernels::norm2(r2);

    // Apply the previous rotation, then build the new one.
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::hypot(gbar, beta);
    if (gamma == 0.0 || !std::isfinite(gamma)) {
      throw SolverBreakdown("MINRES breakdown: singular tridiagonal system", x, rec.finish(config.tol));
    }
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;

    w1.swap(w2);
    w2.swap(w);
    for (std::size_t k = 0; k < n; ++k) w[k] = (v[k] - oldeps * w1[k] - delta * w2[k]) / gamma;
    kernels::axpy(phi, w, x);

    const double resid = std::abs(phibar);
    rec.iteration(resid);
    if (resid <= config.tol) break;
    if (beta == 0.0) {
      // Invariant Krylov subspace: the least-squares solution is exact there.
      throw SolverBreakdown("MINRES breakdown: Lanczos terminated with nonzero residual", x,
                            rec.finish(config.tol));
    }
  }
  return {std::move(x), rec.finish(config.tol)};
}

SolveResult solve(SolverKind kind, const LinearOperator& op, std::span<const double> b,
                  const SolverConfig& config) {
  switch (kind) {
    case SolverKind::kCg: return cg_solve(op, b, config);
    case SolverKind::kCr: return cr_solve(op, b, config);
    case SolverKind::kMinres: return minres_solve(op, b, config);
  }
  throw std::invalid_argument("unknown solver kind");
}

Vector dense_solve_oracle(const DenseMatrix& matrix, std::span<const double> b) {
  const std::size_t n = matrix.rows();
  if (matrix.cols() != n || b.size() != n) throw std::invalid_argument("dense_solve_oracle: shape mismatch");
  if (n > 500) throw std::invalid_argument("dense_solve_oracle: n must be <= 500");

  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = matrix(i, j);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) throw NumericalError("dense_solve_oracle: matrix is singular");

  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd x = lu.solve(rhs);
  return Vector(x.data(), x.data() + n);
}

}  // namespace pareto_tracer
