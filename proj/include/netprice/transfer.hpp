#pragma once
//
// The transfer operator and its fixed-point iteration.
//
// For prices p (uniform or per-agent) the transfer operator maps a
// probability vector q to
//
//     f(q)_i = med{ 0, 1, g_i(q) },
//     g_i(q) = (b_i - p_i + sum_j T[j][i] q_j) / (b_i - a_i),
//
// and equilibria are exactly its fixed points. With nonnegative influence
// f is monotone, so iterating from the all-zeros (resp. all-ones) vector
// converges to the least (resp. greatest) equilibrium -- the pessimistic
// and optimistic selections. This module is deliberately agnostic about
// the sign of T: it is the only part of the library that accepts negative
// influence (used by the hardness gadget checks), where monotonicity and
// hence convergence guarantees do not apply.
//
// iterate_fixed_point runs on an integer common-denominator representation
// (one shared denominator, numerators as GMP integers) so that thousands
// of exact iterations stay cheap; the per-step rational normalization a
// naive mpq loop would pay is deferred and batched.

#include <utility>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/rational.hpp"

namespace netprice {

// ---------------------------------------------------------------------------
// Uniform or per-agent price assignment.
// ---------------------------------------------------------------------------
class PriceAssignment {
 public:
  static PriceAssignment uniform(Rat p) {
    PriceAssignment out;
    out.uniform_ = true;
    out.p_ = std::move(p);
    return out;
  }
  static PriceAssignment per_agent(RatVec p) {
    PriceAssignment out;
    out.uniform_ = false;
    out.per_ = std::move(p);
    return out;
  }

  bool is_uniform() const { return uniform_; }
  const Rat& at(int i) const { return uniform_ ? p_ : per_.at(i); }
  void check_size(int n) const {
    if (!uniform_ && static_cast<int>(per_.size()) != n)
      throw std::invalid_argument("per-agent price vector size mismatch");
  }

 private:
  bool uniform_ = true;
  Rat p_;
  RatVec per_;
};

namespace detail {
inline void check_prob_vec(const ProbVec& q, int n, const char* who) {
  if (static_cast<int>(q.size()) != n)
    throw std::invalid_argument(std::string(who) + ": vector size mismatch");
  for (const Rat& v : q)
    if (v.sign() < 0 || v > Rat(1))
      throw std::invalid_argument(std::string(who) +
                                  ": entries must lie in [0, 1]");
}
}  // namespace detail

// Raw pre-median values g_i(q).
inline RatVec g_value(const Instance& inst, const PriceAssignment& prices,
                      const ProbVec& q) {
  validate_instance(inst, /*require_nonneg_influence=*/false);
  prices.check_size(inst.n);
  detail::check_prob_vec(q, inst.n, "g_value");
  RatVec out(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    Rat acc = inst.b[i] - prices.at(i);
    for (int j = 0; j < inst.n; ++j)
      if (!inst.T[j][i].is_zero()) acc += inst.T[j][i] * q[j];
    out[i] = acc / (inst.b[i] - inst.a[i]);
  }
  return out;
}

// One application of the transfer operator: clamp g to [0, 1].
inline ProbVec transfer(const Instance& inst, const PriceAssignment& prices,
                        const ProbVec& q) {
  RatVec g = g_value(inst, prices, q);
  for (Rat& v : g) {
    if (v.sign() < 0)
      v = Rat(0);
    else if (v > Rat(1))
      v = Rat(1);
  }
  return g;
}

inline bool is_equilibrium_exact(const Instance& inst,
                                 const PriceAssignment& prices,
                                 const ProbVec& q) {
  ProbVec image = transfer(inst, prices, q);
  for (int i = 0; i < inst.n; ++i)
    if (image[i] != q[i]) return false;
  return true;
}

// Strict per-coordinate tolerance: |q_i - f(q)_i| < eps for every i.
inline bool is_eps_approx_equilibrium(const Instance& inst,
                                      const PriceAssignment& prices,
                                      const ProbVec& q, const Rat& eps) {
  if (!(eps > Rat(0)))
    throw std::invalid_argument("approximation tolerance must be positive");
  ProbVec image = transfer(inst, prices, q);
  for (int i = 0; i < inst.n; ++i)
    if (!(rat_abs(image[i] - q[i]) < eps)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Fixed-point iteration
// ---------------------------------------------------------------------------
struct IterationResult {
  ProbVec q;
  bool converged = false;
  long iterations = 0;  // number of transfer applications performed
};

// Iterates the transfer operator from `start`, stopping once the max-norm
// change of one step is <= tol (tol = 0 demands an exact fixed point) or
// after max_iters applications. Exact throughout.
inline IterationResult iterate_fixed_point(const Instance& inst,
                                           const PriceAssignment& prices,
                                           const ProbVec& start,
                                           long max_iters, const Rat& tol) {
  validate_instance(inst, /*require_nonneg_influence=*/false);
  prices.check_size(inst.n);
  detail::check_prob_vec(start, inst.n, "iterate_fixed_point");
  if (max_iters < 0) throw std::invalid_argument("max_iters must be >= 0");
  if (tol.sign() < 0) throw std::invalid_argument("tolerance must be >= 0");

  const int n = inst.n;

  // Integer form of one step. With beta_i = (b_i - p_i)/(b_i - a_i) and
  // C_{ij} = T[j][i]/(b_i - a_i), one application is
  //     q' = clamp(beta + C q, 0, 1).
  // Represent q = v / D (shared denominator). Let S = lcm of all the
  // beta/C denominators, Bint_i = beta_i * S, Cint_{ij} = C_{ij} * S
  // (all integers). Then
  //     q'_i = clamp(Bint_i * D + sum_j Cint_{ij} v_j, 0, S*D) / (S*D),
  // i.e. one step is integer-only and multiplies the denominator by S.
  RatVec beta(n);
  RatMat C(n, RatVec(n));
  mpz_class S(1);
  for (int i = 0; i < n; ++i) {
    Rat width = inst.b[i] - inst.a[i];
    beta[i] = (inst.b[i] - prices.at(i)) / width;
    mpz_lcm(S.get_mpz_t(), S.get_mpz_t(), beta[i].den().get_mpz_t());
    for (int j = 0; j < n; ++j) {
      C[i][j] = inst.T[j][i] / width;
      if (!C[i][j].is_zero())
        mpz_lcm(S.get_mpz_t(), S.get_mpz_t(), C[i][j].den().get_mpz_t());
    }
  }
  std::vector<mpz_class> Bint(n);
  std::vector<std::vector<mpz_class>> Cint(n, std::vector<mpz_class>(n));
  for (int i = 0; i < n; ++i) {
    Bint[i] = beta[i].num() * (S / beta[i].den());
    for (int j = 0; j < n; ++j)
      Cint[i][j] = C[i][j].num() * (S / C[i][j].den());
  }

  // Shared-denominator form of the start vector.
  mpz_class D(1);
  for (const Rat& v : start) mpz_lcm(D.get_mpz_t(), D.get_mpz_t(), v.den().get_mpz_t());
  std::vector<mpz_class> v(n);
  for (int i = 0; i < n; ++i) v[i] = start[i].num() * (D / start[i].den());

  const mpz_class tol_num = tol.num();
  const mpz_class tol_den = tol.den();

  bool converged = false;
  long iters = 0;
  std::vector<mpz_class> next(n);
  while (iters < max_iters) {
    mpz_class Dnext = S * D;
    for (int i = 0; i < n; ++i) {
      mpz_class acc = Bint[i] * D;
      for (int j = 0; j < n; ++j)
        if (Cint[i][j] != 0) acc += Cint[i][j] * v[j];
      if (acc < 0)
        acc = 0;
      else if (acc > Dnext)
        acc = Dnext;
      next[i] = std::move(acc);
    }
    ++iters;

    // Max-norm change: |next_i/Dnext - v_i/D| = |next_i - S v_i| / Dnext.
    bool small = true;
    for (int i = 0; i < n && small; ++i) {
      mpz_class diff = next[i] - S * v[i];
      if (diff < 0) diff = -diff;
      small = (diff * tol_den <= tol_num * Dnext);
    }
    v.swap(next);
    D = std::move(Dnext);
    if (small) {
      converged = true;
      break;
    }

    // Periodically collapse the shared denominator so well-behaved orbits
    // (e.g. dyadic ones) do not drag an ever-growing D behind them.
    if ((iters & 31) == 0) {
      mpz_class g = D;
      for (int i = 0; i < n && g != 1; ++i)
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[i].get_mpz_t());
      if (g > 1) {
        D /= g;
        for (int i = 0; i < n; ++i) v[i] /= g;
      }
    }
  }

  IterationResult out;
  out.converged = converged;
  out.iterations = iters;
  out.q.resize(n);
  for (int i = 0; i < n; ++i) out.q[i] = Rat(v[i], D);
  return out;
}

}  // namespace netprice
