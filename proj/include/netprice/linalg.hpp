#pragma once
//
// Exact linear algebra on rational matrices.
//
// Everything here is fraction-exact: Gaussian elimination with
// first-nonzero partial pivoting, matrix inversion, and the spectral
// gate used by the sweep. The gate never computes an eigenvalue.
// For an entrywise-nonnegative M it decides rho(M) < 1 through the
// M-matrix characterization:
//
//     rho(M) < 1   iff   (I - M) is invertible and (I - M)^{-1} >= 0.
//
// (For nonnegative M, rho(M) < 1 makes I - M a nonsingular M-matrix,
// whose inverse is the convergent Neumann series sum_k M^k >= 0;
// conversely inverse-positivity of I - M forces the series to converge.)

#include <string>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/rational.hpp"

namespace netprice {

inline RatMat identity_matrix(int n) {
  RatMat I(n, RatVec(n, Rat(0)));
  for (int i = 0; i < n; ++i) I[i][i] = Rat(1);
  return I;
}

inline RatVec mat_vec(const RatMat& A, const RatVec& x) {
  RatVec out(A.size(), Rat(0));
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) out[i] += A[i][j] * x[j];
  return out;
}

// Rows and columns of M restricted to the given index sets (in order).
inline RatMat submatrix(const RatMat& M, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
  RatMat out(rows.size(), RatVec(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out[r][c] = M[rows[r]][cols[c]];
  return out;
}

namespace detail {
inline void require_square(const RatMat& A, const char* who) {
  for (const RatVec& row : A)
    if (row.size() != A.size())
      throw std::invalid_argument(std::string(who) + ": matrix is not square");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Solve A x = rhs exactly. Pivot selection: first row (from the top of the
// unreduced block) with a nonzero entry in the current column; no magnitude
// heuristics are needed with exact arithmetic. Throws SingularMatrixError
// when no pivot exists (singular A).
// ---------------------------------------------------------------------------
inline RatVec solve_linear(RatMat A, RatVec rhs) {
  detail::require_square(A, "solve_linear");
  const int n = static_cast<int>(A.size());
  if (static_cast<int>(rhs.size()) != n)
    throw std::invalid_argument("solve_linear: rhs size mismatch");

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!A[r][col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0)
      throw SingularMatrixError("no pivot in column " + std::to_string(col + 1));
    std::swap(A[col], A[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (int r = col + 1; r < n; ++r) {
      if (A[r][col].is_zero()) continue;
      Rat f = A[r][col] / A[col][col];
      A[r][col] = Rat(0);
      for (int c = col + 1; c < n; ++c) A[r][c] -= f * A[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  RatVec x(n, Rat(0));
  for (int r = n - 1; r >= 0; --r) {
    Rat acc = rhs[r];
    for (int c = r + 1; c < n; ++c) acc -= A[r][c] * x[c];
    x[r] = acc / A[r][r];
  }
  return x;
}

// Exact inverse via Gauss-Jordan on [A | I]. Throws SingularMatrixError.
inline RatMat invert(RatMat A) {
  detail::require_square(A, "invert");
  const int n = static_cast<int>(A.size());
  RatMat inv = identity_matrix(n);

  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int r = col; r < n; ++r)
      if (!A[r][col].is_zero()) {
        pivot = r;
        break;
      }
    if (pivot < 0)
      throw SingularMatrixError("no pivot in column " + std::to_string(col + 1));
    std::swap(A[col], A[pivot]);
    std::swap(inv[col], inv[pivot]);
    Rat d = A[col][col];
    for (int c = 0; c < n; ++c) {
      A[col][c] /= d;
      inv[col][c] /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col || A[r][col].is_zero()) continue;
      Rat f = A[r][col];
      for (int c = 0; c < n; ++c) {
        A[r][c] -= f * A[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Spectral gate. Input must be entrywise nonnegative (NonNegativityViolated
// otherwise). Returns whether rho(M) < 1, decided exactly as described in
// the header comment. The empty matrix gates true.
// ---------------------------------------------------------------------------
inline bool spectral_radius_below_one(const RatMat& M) {
  detail::require_square(M, "spectral_radius_below_one");
  const int n = static_cast<int>(M.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (M[i][j].sign() < 0)
        throw ValidationError(ErrCode::NonNegativityViolated,
                              "matrix entry (" + std::to_string(i + 1) + ", " +
                                  std::to_string(j + 1) + ") is " +
                                  M[i][j].to_string());
  if (n == 0) return true;

  RatMat ImM = identity_matrix(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) ImM[i][j] -= M[i][j];

  RatMat inv;
  try {
    inv = invert(std::move(ImM));
  } catch (const SingularMatrixError&) {
    return false;  // 1 is an eigenvalue of M
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (inv[i][j].sign() < 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Strict diagonal dominance of an instance: every row sum of the normalized
// influence matrix L is below one. This is the regime in which the whole
// line sweep runs gate-clean (every principal submatrix of L inherits row
// sums < 1 and therefore has spectral radius < 1).
// ---------------------------------------------------------------------------
inline bool is_strictly_diag_dominant(const Instance& inst) {
  validate_instance(inst, /*require_nonneg_influence=*/true);
  NormalizedInfluence norm = normalize(inst);
  for (int i = 0; i < inst.n; ++i) {
    Rat row_sum(0);
    for (int j = 0; j < inst.n; ++j) row_sum += norm.L[i][j];
    if (!(row_sum < Rat(1))) return false;
  }
  return true;
}

}  // namespace netprice
