#pragma once
//
// Exact equilibrium line sweep.
//
// Computes the pessimistic (least) or optimistic (greatest) equilibrium for
// EVERY price at once, as a piecewise-linear function of a price parameter,
// entirely in rational arithmetic. Optional per-agent offsets delta shift
// agent i's effective price to p + delta_i, which is how per-group price
// vectors are reduced to a one-dimensional sweep.
//
// Pessimistic direction (the optimistic one mirrors it exactly):
//
//   Start at p1 = max_i (b_i - delta_i), where nobody buys, with every
//   agent in region Z (pinned at 0). Walk the price DOWN. Between events
//   the equilibrium is affine in p: with L[i][j] = T[j][i]/(b_i - a_i),
//   y_i = 1/(b_i - a_i), and W the set of interior agents, the working
//   block moves along
//
//       l_W = (I - L_WW)^{-1} y_W,       l_i = y_i + (L l_W)_i otherwise,
//
//   i.e. q_W(p_t - e) = q_W(p_t) + e * l_W while Z stays 0 and O stays 1.
//   The next event is the smallest e at which either a Z agent's value
//   reaches 0 (it becomes interior) or a W agent's reaches 1 (it pins).
//   Every event strictly grows some agent's region Z -> W -> O, so there
//   are at most 2n events and at most 2n+1 pieces.
//
//   The solve above is legitimate only while rho(L_WW) < 1, checked by the
//   exact spectral gate (no eigenvalues; see linalg.hpp). When the gate
//   fails, the equilibrium JUMPS at p_t: the fixed-point set degenerates
//   along a direction u >= 0 supported on the smallest gate-failing prefix
//   W2 = W1 + {w} of W (ascending agent order; singleton prefixes always
//   pass because diag L = 0, so |W2| >= 2):
//
//       u_W1 = (I - L_{W1 W1})^{-1} L_{W1, w},   u_w = 1,  u = 0 elsewhere.
//
//   The pivot agent k minimizes (1 - q_i)/u_i over the support of u
//   (smallest index on ties): the first agent to hit 1 along +u. Directly
//   below p_t agent k locks at 1 together with everything already in O.
//   The locked purchases are constant influence, so the remaining agents
//   face a smaller instance whose intervals absorb that influence
//   ([a_i, b_i] + sum of locked T[j][i]); the sweep recurses on it and the
//   sub-solution is spliced in for prices strictly below p_t.
//
// Optimistic direction: start at p1 = min_i (a_i + sum_j T[j][i] - delta_i)
// with everyone in O (all buy at and below p1), walk the price UP; events
// move O -> W (value falls to 1) and W -> Z (value falls to 0); the pivot
// locks its agent at 0 (k minimizes q_i/u_i) and the sub-instance simply
// drops the locked agents (their influence contributes nothing).
//
// Influence must be nonnegative here; instances with negative edges are
// rejected up front (NegativeInfluence) and are only usable through the
// transfer module's iteration and verification entry points.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/linalg.hpp"
#include "netprice/piecewise.hpp"
#include "netprice/rational.hpp"

namespace netprice {

// Snapshot of the sweep at one event price.
struct SweepState {
  int t = 0;            // event counter
  Rat p_t;              // current event price
  ProbVec q_t;          // equilibrium at p_t (after boundary moves)
  Partition partition;  // Z / W / O regions after boundary moves
  RatVec x;             // x_i = (b_i - p_t - delta_i) / (b_i - a_i)
  RatVec y;             // y_i = 1 / (b_i - a_i)
  RatVec delta;         // per-agent price offsets
};

// Evidence for a jump event: the smallest gate-failing prefix W2 = W1+{w}
// of the working set, the degenerate direction u, and the locked agent k.
struct PivotCertificate {
  std::vector<int> W1;
  int w = -1;
  RatVec u;   // full length; zero outside W1 and w, u[w] = 1
  int k = -1;
  std::vector<int> W2() const {
    std::vector<int> v = W1;
    v.push_back(w);
    return v;
  }
};

inline PivotCertificate find_pivot(const SweepState& st, const RatMat& L,
                                   Side side = Side::Pessimistic) {
  const int n = static_cast<int>(st.q_t.size());
  std::vector<int> W = st.partition.members(Region::W);
  if (static_cast<int>(W.size()) < 2)
    throw InternalInvariantViolation(
        "pivot requested with fewer than two working agents");

  for (std::size_t take = 2; take <= W.size(); ++take) {
    std::vector<int> prefix(W.begin(), W.begin() + take);
    if (spectral_radius_below_one(submatrix(L, prefix, prefix))) continue;

    std::vector<int> W1(prefix.begin(), prefix.end() - 1);
    const int w = prefix.back();

    RatMat A = identity_matrix(static_cast<int>(W1.size()));
    for (std::size_t r = 0; r < W1.size(); ++r)
      for (std::size_t c = 0; c < W1.size(); ++c) A[r][c] -= L[W1[r]][W1[c]];
    RatVec rhs;
    rhs.reserve(W1.size());
    for (int i : W1) rhs.push_back(L[i][w]);
    RatVec uW1 = solve_linear(std::move(A), std::move(rhs));  // W1 passed the gate

    PivotCertificate cert;
    cert.W1 = W1;
    cert.w = w;
    cert.u.assign(n, Rat(0));
    for (std::size_t r = 0; r < W1.size(); ++r) cert.u[W1[r]] = uW1[r];
    cert.u[w] = Rat(1);
    for (int i : prefix)
      if (cert.u[i].sign() < 0)
        throw InternalInvariantViolation("pivot direction has negative entry");

    std::optional<Rat> best;
    for (int i : prefix) {
      if (cert.u[i].is_zero()) continue;
      Rat ratio = (side == Side::Pessimistic)
                      ? (Rat(1) - st.q_t[i]) / cert.u[i]
                      : st.q_t[i] / cert.u[i];
      if (!best || ratio < *best) {  // strict: ties keep the smallest index
        best = ratio;
        cert.k = i;
      }
    }
    if (cert.k < 0)
      throw InternalInvariantViolation("pivot direction vanished");
    return cert;
  }
  throw InternalInvariantViolation("no gate-failing prefix found");
}

// ---------------------------------------------------------------------------
// Sub-instance restriction: keep the agents in `kept` (ascending). The kept
// agents' intervals absorb the influence of `absorbed_sources` (agents locked
// at 1); influence among kept agents is retained, everything else dropped.
// ---------------------------------------------------------------------------
struct SubInstance {
  Instance inst;
  std::vector<int> kept;  // kept[r] = original index of sub-agent r
};

inline SubInstance restrict_instance(const Instance& inst,
                                     const std::vector<int>& kept,
                                     const std::vector<int>& absorbed_sources) {
  SubInstance out;
  out.kept = kept;
  const int m = static_cast<int>(kept.size());
  out.inst.n = m;
  out.inst.a.resize(m);
  out.inst.b.resize(m);
  out.inst.T.assign(m, RatVec(m));
  for (int r = 0; r < m; ++r) {
    const int i = kept[r];
    Rat shift(0);
    for (int j : absorbed_sources) shift += inst.T[j][i];
    out.inst.a[r] = inst.a[i] + shift;
    out.inst.b[r] = inst.b[i] + shift;
    for (int c = 0; c < m; ++c) out.inst.T[r][c] = inst.T[kept[r]][kept[c]];
  }
  return out;
}

// Public form used by the pessimistic pivot: lock `locked_at_one`, shift the
// rest. Returns the reduced instance plus the index mapping.
inline SubInstance build_subproblem(const Instance& inst,
                                    const std::vector<int>& locked_at_one) {
  validate_instance(inst, /*require_nonneg_influence=*/true);
  if (locked_at_one.empty())
    throw std::invalid_argument("build_subproblem: empty locked set");
  std::vector<bool> is_locked(inst.n, false);
  for (int i : locked_at_one) {
    if (i < 0 || i >= inst.n)
      throw std::invalid_argument("build_subproblem: agent index out of range");
    if (is_locked[i])
      throw std::invalid_argument("build_subproblem: duplicate locked agent");
    is_locked[i] = true;
  }
  std::vector<int> kept;
  for (int i = 0; i < inst.n; ++i)
    if (!is_locked[i]) kept.push_back(i);
  if (kept.empty())
    throw std::invalid_argument("build_subproblem: no agents remain");
  return restrict_instance(inst, kept, locked_at_one);
}

namespace detail {

struct EngineOut {
  // Event prices in sweep order (descending for the pessimistic direction,
  // ascending for the optimistic one); maps[j] governs prices between
  // evts[j] and evts[j+1].
  std::vector<Rat> evts;
  std::vector<AffineMap> maps;
  bool pivot_taken = false;
};

inline EngineOut run_sweep(const Instance& inst, const RatVec& delta,
                           Side side);

// Splice a recursively computed sub-solution into the parent event list.
// `sub` covers the kept agents; locked agents hold `locked_value`. For the
// pessimistic side the sub-solution applies strictly below `cutoff`; for
// the optimistic side strictly above. The terminal tail (all-ones below /
// all-zeros above) is left implicit, matching the parent representation.
inline void splice_sub(std::vector<Rat>& evts, std::vector<AffineMap>& maps,
                       const EngineOut& sub, const std::vector<int>& kept,
                       int full_n, const Rat& locked_value, const Rat& cutoff,
                       Side side) {
  const int m = static_cast<int>(kept.size());
  auto scatter = [&](const AffineMap& small) {
    AffineMap full;
    full.c0.assign(full_n, locked_value);
    full.c1.assign(full_n, Rat(0));
    for (int r = 0; r < m; ++r) {
      full.c0[kept[r]] = small.c0[r];
      full.c1[kept[r]] = small.c1[r];
    }
    return full;
  };
  const AffineMap zeros = AffineMap::constant(ProbVec(m, Rat(0)));
  const AffineMap ones = AffineMap::constant(ProbVec(m, Rat(1)));

  if (side == Side::Pessimistic) {
    // Sub pieces top-down: [evts[0], +inf) zeros, interiors, (-inf, last) ones.
    // Retain the part of each piece below the cutoff.
    if (sub.evts.front() < cutoff) {
      maps.push_back(scatter(zeros));
      evts.push_back(sub.evts.front());
    }
    for (std::size_t j = 0; j < sub.maps.size(); ++j) {
      const Rat& lo = sub.evts[j + 1];
      if (!(lo < cutoff)) continue;
      maps.push_back(scatter(sub.maps[j]));
      evts.push_back(lo);
    }
    // The all-ones tail scatters to all-ones (locked agents already hold 1),
    // which the parent's implicit tail covers below the last event pushed.
  } else {
    // Sub pieces bottom-up: (-inf, evts[0]] ones, interiors, (evts.back(), +inf) zeros.
    if (sub.evts.front() > cutoff) {
      maps.push_back(scatter(ones));
      evts.push_back(sub.evts.front());
    }
    for (std::size_t j = 0; j < sub.maps.size(); ++j) {
      const Rat& hi = sub.evts[j + 1];
      if (!(hi > cutoff)) continue;
      maps.push_back(scatter(sub.maps[j]));
      evts.push_back(hi);
    }
    // The all-zeros tail scatters to all-zeros (locked agents hold 0).
  }
}

inline EngineOut run_sweep(const Instance& inst, const RatVec& delta,
                           Side side) {
  validate_instance(inst, /*require_nonneg_influence=*/true);
  const int n = inst.n;
  if (static_cast<int>(delta.size()) != n)
    throw std::invalid_argument("offset vector size mismatch");
  const bool pess = (side == Side::Pessimistic);
  const NormalizedInfluence norm = normalize(inst);
  const RatMat& L = norm.L;
  const RatVec& y = norm.y;

  EngineOut out;
  Partition part;
  part.region.assign(n, pess ? Region::Z : Region::O);
  ProbVec q(n, pess ? Rat(0) : Rat(1));

  // Start price: the exact threshold beyond which the trivial tail holds.
  Rat p;
  for (int i = 0; i < n; ++i) {
    Rat cand = inst.b[i] - delta[i];
    if (!pess) {
      cand = inst.a[i] - delta[i];
      for (int j = 0; j < n; ++j) cand += inst.T[j][i];
    }
    if (i == 0)
      p = cand;
    else
      p = pess ? rat_max(p, cand) : rat_min(p, cand);
  }
  out.evts.push_back(p);

  for (int round = 0;; ++round) {
    if (round > 2 * n + 1)
      throw InternalInvariantViolation("sweep failed to terminate");

    // Exact values at the current event price.
    RatVec vals(n);
    for (int i = 0; i < n; ++i) {
      Rat acc = (inst.b[i] - p - delta[i]) * y[i];
      for (int j = 0; j < n; ++j)
        if (!L[i][j].is_zero()) acc += L[i][j] * q[j];
      vals[i] = acc;
    }
    for (int i = 0; i < n; ++i) {
      bool ok = true;
      switch (part.region[i]) {
        case Region::Z: ok = vals[i].sign() <= 0; break;
        case Region::W: ok = vals[i].sign() >= 0 && vals[i] <= Rat(1); break;
        case Region::O: ok = vals[i] >= Rat(1); break;
      }
      if (!ok)
        throw InternalInvariantViolation("region value out of range at event");
    }

    // Boundary moves at the event price.
    for (int i = 0; i < n; ++i) {
      if (pess) {
        if (part.region[i] == Region::Z && vals[i].is_zero())
          part.region[i] = Region::W;
        else if (part.region[i] == Region::W && vals[i] == Rat(1)) {
          part.region[i] = Region::O;
          q[i] = Rat(1);
        }
      } else {
        if (part.region[i] == Region::O && vals[i] == Rat(1))
          part.region[i] = Region::W;
        else if (part.region[i] == Region::W && vals[i].is_zero()) {
          part.region[i] = Region::Z;
          q[i] = Rat(0);
        }
      }
    }

    // Terminal tail reached: all-ones below (pess) / all-zeros above (opt).
    if (part.all(pess ? Region::O : Region::Z)) break;

    const std::vector<int> W = part.members(Region::W);

    // Spectral gate; on failure the equilibrium jumps here and the tail
    // comes from a reduced instance.
    if (!spectral_radius_below_one(submatrix(L, W, W))) {
      out.pivot_taken = true;

      SweepState st;
      st.t = round;
      st.p_t = p;
      st.q_t = q;
      st.partition = part;
      st.y = y;
      st.delta = delta;
      st.x.resize(n);
      for (int i = 0; i < n; ++i) st.x[i] = (inst.b[i] - p - delta[i]) * y[i];
      PivotCertificate cert = find_pivot(st, L, side);

      part.region[cert.k] = pess ? Region::O : Region::Z;
      q[cert.k] = pess ? Rat(1) : Rat(0);

      const std::vector<int> locked =
          part.members(pess ? Region::O : Region::Z);
      std::vector<int> kept;
      for (int i = 0; i < n; ++i)
        if (part.region[i] != (pess ? Region::O : Region::Z)) kept.push_back(i);
      if (kept.empty()) break;  // everyone pinned: terminal tail starts here

      // Locked-at-one purchases shift the remaining intervals; locked-at-zero
      // agents simply disappear.
      SubInstance sub = restrict_instance(
          inst, kept, pess ? locked : std::vector<int>{});
      RatVec sub_delta;
      sub_delta.reserve(kept.size());
      for (int i : kept) sub_delta.push_back(delta[i]);

      EngineOut tail = run_sweep(sub.inst, sub_delta, side);
      out.pivot_taken |= tail.pivot_taken;
      splice_sub(out.evts, out.maps, tail, kept, n, pess ? Rat(1) : Rat(0), p,
                 side);
      return out;
    }

    // Direction of motion for one unit of price progress.
    RatVec lW;
    {
      RatMat A = identity_matrix(static_cast<int>(W.size()));
      for (std::size_t r = 0; r < W.size(); ++r)
        for (std::size_t c = 0; c < W.size(); ++c) A[r][c] -= L[W[r]][W[c]];
      RatVec rhs;
      rhs.reserve(W.size());
      for (int i : W) rhs.push_back(y[i]);
      lW = solve_linear(std::move(A), std::move(rhs));
    }
    RatVec l(n);
    {
      std::vector<bool> inW(n, false);
      for (std::size_t r = 0; r < W.size(); ++r) inW[W[r]] = true;
      std::vector<int> posOf(n, -1);
      for (std::size_t r = 0; r < W.size(); ++r) posOf[W[r]] = static_cast<int>(r);
      for (int i = 0; i < n; ++i) {
        if (inW[i]) {
          l[i] = lW[posOf[i]];
        } else {
          Rat acc = y[i];
          for (std::size_t r = 0; r < W.size(); ++r)
            if (!L[i][W[r]].is_zero()) acc += L[i][W[r]] * lW[r];
          l[i] = acc;
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      const bool moving = pess ? part.region[i] != Region::O
                               : part.region[i] != Region::Z;
      if (moving && !(l[i] > Rat(0)))
        throw InternalInvariantViolation("motion direction not positive");
    }

    // Step length to the next boundary contact.
    std::optional<Rat> eps;
    for (int i = 0; i < n; ++i) {
      std::optional<Rat> cand;
      if (pess) {
        if (part.region[i] == Region::Z)
          cand = (Rat(0) - vals[i]) / l[i];
        else if (part.region[i] == Region::W)
          cand = (Rat(1) - vals[i]) / l[i];
      } else {
        if (part.region[i] == Region::O)
          cand = (vals[i] - Rat(1)) / l[i];
        else if (part.region[i] == Region::W)
          cand = vals[i] / l[i];
      }
      if (cand && (!eps || *cand < *eps)) eps = *cand;
    }
    if (!eps)
      throw InternalInvariantViolation("no step-length candidates");
    if (!(*eps > Rat(0)))
      throw InternalInvariantViolation("step length not positive");

    // The piece between this event and the next: q(p') = c0 + c1 p' with
    // c0 = q + p*l and c1 = -l on W (identical algebra in both directions).
    AffineMap piece;
    piece.c0.assign(n, Rat(0));
    piece.c1.assign(n, Rat(0));
    for (int i = 0; i < n; ++i) {
      switch (part.region[i]) {
        case Region::Z: break;
        case Region::O: piece.c0[i] = Rat(1); break;
        case Region::W:
          piece.c0[i] = q[i] + p * l[i];
          piece.c1[i] = -l[i];
          break;
      }
    }
    out.maps.push_back(std::move(piece));

    for (int i : W) q[i] = pess ? q[i] + *eps * l[i] : q[i] - *eps * l[i];
    p = pess ? p - *eps : p + *eps;
    out.evts.push_back(p);
  }
  return out;
}

inline PiecewiseEquilibrium assemble_pwl(Side side, int n, EngineOut&& eo) {
  if (side == Side::Optimistic) {
    std::reverse(eo.evts.begin(), eo.evts.end());
    std::reverse(eo.maps.begin(), eo.maps.end());
  }
  PiecewiseEquilibrium pwl;
  pwl.side = side;
  pwl.n = n;
  pwl.breaks = std::move(eo.evts);
  pwl.mids = std::move(eo.maps);

  // Defensive merges: identical adjacent pieces, and constant pieces that
  // merely extend the implicit tails. The sweep does not normally produce
  // either, but splicing must stay canonical no matter what.
  const AffineMap zeros = AffineMap::constant(ProbVec(n, Rat(0)));
  const AffineMap ones = AffineMap::constant(ProbVec(n, Rat(1)));
  while (!pwl.mids.empty() && pwl.mids.front() == zeros) {
    pwl.breaks.erase(pwl.breaks.begin());
    pwl.mids.erase(pwl.mids.begin());
  }
  while (!pwl.mids.empty() && pwl.mids.back() == ones) {
    pwl.breaks.pop_back();
    pwl.mids.pop_back();
  }
  for (std::size_t j = 0; j + 1 < pwl.mids.size();) {
    if (pwl.mids[j] == pwl.mids[j + 1]) {
      pwl.mids.erase(pwl.mids.begin() + j + 1);
      pwl.breaks.erase(pwl.breaks.begin() + j + 1);
    } else {
      ++j;
    }
  }
  pwl.check_well_formed();
  return pwl;
}

}  // namespace detail

struct SweepResult {
  PiecewiseEquilibrium pwl;
  bool pivot_taken = false;  // whether any jump/locking event occurred
};

inline SweepResult sweep_with_diagnostics(const Instance& inst, Side side,
                                          const RatVec& delta = {}) {
  RatVec d = delta.empty() ? RatVec(inst.n, Rat(0)) : delta;
  detail::EngineOut eo = detail::run_sweep(inst, d, side);
  SweepResult out;
  out.pivot_taken = eo.pivot_taken;
  out.pwl = detail::assemble_pwl(side, inst.n, std::move(eo));
  return out;
}

inline PiecewiseEquilibrium pessimistic_sweep(const Instance& inst,
                                              const RatVec& delta = {}) {
  return sweep_with_diagnostics(inst, Side::Pessimistic, delta).pwl;
}

inline PiecewiseEquilibrium optimistic_sweep(const Instance& inst,
                                             const RatVec& delta = {}) {
  return sweep_with_diagnostics(inst, Side::Optimistic, delta).pwl;
}

// ---------------------------------------------------------------------------
// Per-group price vectors: reduce to a sweep with offsets
// delta_i = prices[group[i]] - min(prices) and evaluate at min(prices).
// ---------------------------------------------------------------------------
inline ProbVec equilibrium_at_price_vector(const GroupedInstance& ginst,
                                           const RatVec& prices, Side side) {
  validate_grouped(ginst, /*require_nonneg_influence=*/true);
  if (static_cast<int>(prices.size()) != ginst.k)
    throw std::invalid_argument("price vector size must match group count");
  Rat pmin = prices.front();
  for (const Rat& p : prices) pmin = rat_min(pmin, p);
  RatVec delta(ginst.inst.n);
  for (int i = 0; i < ginst.inst.n; ++i)
    delta[i] = prices[ginst.group[i]] - pmin;
  PiecewiseEquilibrium pwl = sweep_with_diagnostics(ginst.inst, side, delta).pwl;
  return pwl.evaluate(pmin);
}

}  // namespace netprice
