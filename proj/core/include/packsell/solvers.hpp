#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "packsell/backend.hpp"
#include "packsell/matrix.hpp"

namespace packsell {

enum class SolverKind { pcg, fcg, iocg };
enum class Preconditioner { identity, jacobi };

std::string_view to_string(SolverKind s) noexcept;
std::string_view to_string(Preconditioner p) noexcept;
SolverKind parse_solver(std::string_view name);
Preconditioner parse_preconditioner(std::string_view name);

struct SolveConfig {
  SolverKind solver = SolverKind::pcg;
  double tol = 1e-9;
  std::size_t max_outer = 10000;
  /// Fixed number of inner PCG iterations per outer step (iocg only).
  std::size_t m_in = 50;
  /// real32 or real64.
  Precision inner_precision = Precision::real32;
  /// Backend for A inside the inner solve (iocg) or for the whole solve
  /// (pcg, fcg). See make_backend for the accepted names.
  std::string a_backend = "csr64";
  BackendOptions backend_options{};
  Preconditioner preconditioner = Preconditioner::identity;

  /// Throws Error on tol <= 0, max_outer == 0, m_in == 0 for iocg or an
  /// unsupported inner precision.
  void validate() const;
};

struct SolveReport {
  bool converged = false;
  /// "converged", "max_iterations", "breakdown" or "true_residual_too_large".
  std::string status;
  std::size_t outer_iters = 0;
  std::size_t total_inner_iters = 0;
  std::size_t inner_breakdowns = 0;
  /// Recurred ||r||/||b|| starting with the initial residual.
  std::vector<double> residual_history;
  /// ||b - A x||/||b|| against the unquantised matrix, in double.
  double final_true_relres = 0.0;
  double elapsed = 0.0;  // seconds
  std::vector<double> solution;
};

/// A converged run must also have a true residual below this multiple of tol.
inline constexpr double kTrueResidualSlack = 10.0;

/// z = P_k(r). The iteration index lets the operator change between steps.
using FlexiblePreconditioner = std::function<void(std::size_t k, std::span<const double> r, std::span<double> z)>;

/// Preconditioned CG in double with A applied through `a`. `source` is the
/// unquantised matrix for the true-residual audit and the Jacobi diagonal.
SolveReport pcg(const SpmvBackend& a, const CsrMatrix& source, std::span<const double> b, const SolveConfig& cfg);

/// Flexible CG with a one-vector truncated Polak-Ribiere beta.
SolveReport fcg(const SpmvBackend& a, const CsrMatrix& source, std::span<const double> b, const SolveConfig& cfg,
                const FlexiblePreconditioner& precond);

/// Outer FCG in double; each step runs cfg.m_in PCG iterations on A z = r
/// from z = 0 in cfg.inner_precision with A applied through cfg.a_backend.
SolveReport iocg(const CsrMatrix& a, std::span<const double> b, const SolveConfig& cfg);

/// Dispatches on cfg.solver, building the backends it needs.
SolveReport solve(const CsrMatrix& a, std::span<const double> b, const SolveConfig& cfg);

struct RhsAndGuess {
  std::vector<double> b;
  std::vector<double> x0;
};

/// b uniform on [0, 1) from mt19937_64(seed) using the top 53 bits of each
/// draw; x0 = 0.
RhsAndGuess make_rhs_and_x0(std::size_t n, std::uint64_t seed);

}  // namespace packsell
