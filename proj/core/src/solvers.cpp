#include "packsell/solvers.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include "packsell/errors.hpp"

namespace packsell {

std::string_view to_string(SolverKind s) noexcept {
  switch (s) {
    case SolverKind::pcg: return "pcg";
    case SolverKind::fcg: return "fcg";
    case SolverKind::iocg: return "iocg";
  }
  return "unknown";
}

std::string_view to_string(Preconditioner p) noexcept {
  return p == Preconditioner::jacobi ? "jacobi" : "identity";
}

SolverKind parse_solver(std::string_view name) {
  if (name == "pcg") return SolverKind::pcg;
  if (name == "fcg") return SolverKind::fcg;
  if (name == "iocg") return SolverKind::iocg;
  throw Error("unknown solver '" + std::string(name) + "'");
}

Preconditioner parse_preconditioner(std::string_view name) {
  if (name == "identity" || name == "none") return Preconditioner::identity;
  if (name == "jacobi") return Preconditioner::jacobi;
  throw Error("unknown preconditioner '" + std::string(name) + "'");
}

void SolveConfig::validate() const {
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (max_outer == 0) throw Error("max_outer must be at least 1");
  if (solver == SolverKind::iocg && m_in == 0) throw Error("m_in must be at least 1");
  if (inner_precision == Precision::real16) throw Error("inner precision must be real32 or real64");
}

namespace {

using clock_type = std::chrono::steady_clock;

template <class A, class B>
double dot(std::span<const A> a, std::span<const B> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

template <class T>
double norm2(std::span<const T> v) {
  return std::sqrt(dot<T, T>(v, v));
}

template <class T>
std::span<const T> cspan(const std::vector<T>& v) {
  return {v.data(), v.size()};
}

std::vector<double> inverse_diagonal(const CsrMatrix& a) {
  std::vector<double> d = diagonal(a);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] == 0.0) throw Error("jacobi preconditioner: zero diagonal in row " + std::to_string(i));
    d[i] = 1.0 / d[i];
  }
  return d;
}

double true_relres(const CsrMatrix& a, std::span<const double> b, std::span<const double> x) {
  const std::vector<double> ax = csr_spmv<double>(a, x);
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double r = b[i] - ax[i];
    s += r * r;
  }
  return std::sqrt(s) / norm2<double>(b);
}

void check_dims(const SpmvBackend& a, const CsrMatrix& source, std::span<const double> b) {
  if (a.rows() != a.cols()) throw DimensionError("solver: matrix must be square");
  if (source.rows() != a.rows() || source.cols() != a.cols()) throw DimensionError("solver: backend/source mismatch");
  if (b.size() != a.rows()) throw DimensionError("solver: right-hand side length mismatch");
}

/// Fills the bookkeeping shared by all outer loops. Returns true when the
/// right-hand side is zero and the solve is already finished.
bool start_report(SolveReport& report, std::span<const double> b) {
  report.solution.assign(b.size(), 0.0);
  report.residual_history.clear();
  if (norm2<double>(b) == 0.0) {
    report.converged = true;
    report.status = "converged";
    report.residual_history.push_back(0.0);
    return true;
  }
  report.residual_history.push_back(1.0);
  return false;
}

void finish_report(SolveReport& report, const CsrMatrix& source, std::span<const double> b, const SolveConfig& cfg,
                   bool recurred_converged, clock_type::time_point t0) {
  report.final_true_relres = true_relres(source, b, report.solution);
  if (recurred_converged) {
    if (report.final_true_relres < kTrueResidualSlack * cfg.tol) {
      report.converged = true;
      report.status = "converged";
    } else {
      report.converged = false;
      report.status = "true_residual_too_large";
    }
  }
  report.elapsed = std::chrono::duration<double>(clock_type::now() - t0).count();
}

/// Exactly m iterations of PCG on A z = r from z = 0, vectors in T. Stops
/// early only on breakdown or an exactly zero residual.
template <class T>
struct InnerPcg {
  const SpmvBackend& a;
  const std::vector<double>* inv_diag;  // null for identity
  std::size_t m;

  std::vector<T> r, w, p, q, z, jd;

  InnerPcg(const SpmvBackend& backend, const std::vector<double>* inverse_diag, std::size_t iterations)
      : a(backend), inv_diag(inverse_diag), m(iterations) {
    const std::size_t n = backend.rows();
    r.resize(n);
    w.resize(n);
    p.resize(n);
    q.resize(n);
    z.resize(n);
    if (inv_diag) {
      jd.resize(n);
      for (std::size_t i = 0; i < n; ++i) jd[i] = static_cast<T>((*inv_diag)[i]);
    }
  }

  void precondition() {
    if (inv_diag) {
      for (std::size_t i = 0; i < r.size(); ++i) w[i] = jd[i] * r[i];
    } else {
      w = r;
    }
  }

  /// Returns {iterations done, breakdown}.
  std::pair<std::size_t, bool> run(std::span<const double> rhs, std::span<double> out) {
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = static_cast<T>(rhs[i]);
      z[i] = T(0);
    }
    double rho_old = 0.0;
    std::size_t k = 0;
    bool breakdown = false;
    for (; k < m; ++k) {
      precondition();
      const double rho = dot<T, T>(r, w);
      if (rho == 0.0) break;
      if (!std::isfinite(rho)) {
        breakdown = true;
        break;
      }
      if (k == 0) {
        p = w;
      } else {
        const T beta = static_cast<T>(rho / rho_old);
        for (std::size_t i = 0; i < n; ++i) p[i] = w[i] + beta * p[i];
      }
      a.apply(cspan(p), std::span<T>(q));
      const double pq = dot<T, T>(p, q);
      if (!(pq > 0.0) || !std::isfinite(pq)) {
        breakdown = true;
        break;
      }
      const T alpha = static_cast<T>(rho / pq);
      for (std::size_t i = 0; i < n; ++i) {
        z[i] = z[i] + alpha * p[i];
        r[i] = r[i] - alpha * q[i];
      }
      rho_old = rho;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(z[i]);
    return {k, breakdown};
  }
};

}  // namespace

SolveReport pcg(const SpmvBackend& a, const CsrMatrix& source, std::span<const double> b, const SolveConfig& cfg) {
  cfg.validate();
  check_dims(a, source, b);
  const auto t0 = clock_type::now();
  SolveReport report;
  if (start_report(report, b)) {
    report.elapsed = std::chrono::duration<double>(clock_type::now() - t0).count();
    return report;
  }

  const std::size_t n = b.size();
  std::vector<double> inv_diag;
  if (cfg.preconditioner == Preconditioner::jacobi) inv_diag = inverse_diagonal(source);
  const double bnorm = norm2<double>(b);

  std::vector<double>& x = report.solution;
  std::vector<double> r(b.begin(), b.end()), z(n), p(n), q(n);
  double rho_old = 0.0;
  bool done = false;
  report.status = "max_iterations";
  for (std::size_t k = 0; k < cfg.max_outer; ++k) {
    if (inv_diag.empty()) {
      z = r;
    } else {
      for (std::size_t i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    }
    const double rho = dot<double, double>(r, z);
    if (k == 0) {
      p = z;
    } else {
      const double beta = rho / rho_old;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    a.apply(cspan(p), std::span<double>(q));
    const double pq = dot<double, double>(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      report.status = "breakdown";
      break;
    }
    const double alpha = rho / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    rho_old = rho;
    ++report.outer_iters;
    const double relres = norm2<double>(r) / bnorm;
    report.residual_history.push_back(relres);
    if (relres < cfg.tol) {
      done = true;
      break;
    }
  }
  finish_report(report, source, b, cfg, done, t0);
  return report;
}

SolveReport fcg(const SpmvBackend& a, const CsrMatrix& source, std::span<const double> b, const SolveConfig& cfg,
                const FlexiblePreconditioner& precond) {
  cfg.validate();
  check_dims(a, source, b);
  const auto t0 = clock_type::now();
  SolveReport report;
  if (start_report(report, b)) {
    report.elapsed = std::chrono::duration<double>(clock_type::now() - t0).count();
    return report;
  }

  const std::size_t n = b.size();
  const double bnorm = norm2<double>(b);
  std::vector<double>& x = report.solution;
  std::vector<double> r(b.begin(), b.end()), r_prev(n), z(n), p(n), q(n);
  double zr_prev = 0.0;
  bool done = false;
  report.status = "max_iterations";
  for (std::size_t k = 0; k < cfg.max_outer; ++k) {
    precond(k, cspan(r), std::span<double>(z));
    if (k == 0) {
      p = z;
    } else {
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += z[i] * (r[i] - r_prev[i]);
      const double beta = num / zr_prev;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    a.apply(cspan(p), std::span<double>(q));
    const double pq = dot<double, double>(p, q);
    if (!(pq > 0.0) || !std::isfinite(pq)) {
      report.status = "breakdown";
      break;
    }
    const double alpha = dot<double, double>(p, r) / pq;
    zr_prev = dot<double, double>(z, r);
    r_prev = r;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    ++report.outer_iters;
    const double relres = norm2<double>(r) / bnorm;
    report.residual_history.push_back(relres);
    if (relres < cfg.tol) {
      done = true;
      break;
    }
    if (zr_prev == 0.0 || !std::isfinite(zr_prev)) {
      report.status = "breakdown";
      break;
    }
  }
  finish_report(report, source, b, cfg, done, t0);
  return report;
}

SolveReport iocg(const CsrMatrix& a, std::span<const double> b, const SolveConfig& cfg) {
  cfg.validate();
  const CsrBackend outer(a, Precision::real64);
  const std::unique_ptr<SpmvBackend> inner_a = make_backend(cfg.a_backend, a, cfg.backend_options);
  std::vector<double> inv_diag;
  if (cfg.preconditioner == Preconditioner::jacobi) inv_diag = inverse_diagonal(a);
  const std::vector<double>* jd = inv_diag.empty() ? nullptr : &inv_diag;

  std::size_t inner_total = 0;
  std::size_t breakdowns = 0;
  auto run = [&](auto& inner) {
    const FlexiblePreconditioner precond = [&](std::size_t, std::span<const double> r, std::span<double> z) {
      const auto [iters, broke] = inner.run(r, z);
      inner_total += iters;
      if (broke) ++breakdowns;
    };
    return fcg(outer, a, b, cfg, precond);
  };

  SolveReport report;
  if (cfg.inner_precision == Precision::real64) {
    InnerPcg<double> inner(*inner_a, jd, cfg.m_in);
    report = run(inner);
  } else {
    InnerPcg<float> inner(*inner_a, jd, cfg.m_in);
    report = run(inner);
  }
  report.total_inner_iters = inner_total;
  report.inner_breakdowns = breakdowns;
  return report;
}

SolveReport solve(const CsrMatrix& a, std::span<const double> b, const SolveConfig& cfg) {
  cfg.validate();
  if (cfg.solver == SolverKind::iocg) return iocg(a, b, cfg);
  const std::unique_ptr<SpmvBackend> backend = make_backend(cfg.a_backend, a, cfg.backend_options);
  if (cfg.solver == SolverKind::pcg) return pcg(*backend, a, b, cfg);

  std::vector<double> inv_diag;
  if (cfg.preconditioner == Preconditioner::jacobi) inv_diag = inverse_diagonal(a);
  const FlexiblePreconditioner precond = [&](std::size_t, std::span<const double> r, std::span<double> z) {
    if (inv_diag.empty()) {
      std::copy(r.begin(), r.end(), z.begin());
    } else {
      for (std::size_t i = 0; i < r.size(); ++i) z[i] = inv_diag[i] * r[i];
    }
  };
  return fcg(*backend, a, b, cfg, precond);
}

RhsAndGuess make_rhs_and_x0(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  RhsAndGuess out;
  out.b.resize(n);
  for (double& v : out.b) v = static_cast<double>(gen() >> 11) * 0x1p-53;
  out.x0.assign(n, 0.0);
  return out;
}

}  // namespace packsell
