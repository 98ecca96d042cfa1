#pragma once
//
// Revenue curves and price optimization over exact equilibria.
//
// On each piece of a piecewise-linear equilibrium the revenue
//     R(p) = sum_i w_i * (p + delta_i) * q_i(p)
// is an exact quadratic A p^2 + B p + C, so optima are found in closed
// form: segment endpoints plus the vertex -B/(2A). Endpoints excluded by
// the side convention become supremum candidates (attained = false, value
// taken as the one-sided limit); attained candidates beat unattained ones
// at equal revenue, and smaller prices break remaining ties.
//
// Families:
//   * optimal_uniform_price -- one price for everybody (weights 1, no
//     offsets), maximized over p > 0.
//   * optimal_shifted       -- per-group prices base + x*1; the sweep runs
//     with offsets base_g - min(base) and x + min(base) is optimized.
//   * optimal_scaled        -- per-group prices xi * base; equivalent to a
//     uniform sweep of the instance rescaled by each receiver's base price.
//   * fptas                 -- (1 - eps)-approximate per-group pricing on a
//     geometric grid, exact arithmetic end to end.
//   * grid_bruteforce_opt   -- exhaustive reference over a uniform grid,
//     organized by price-difference classes so each class costs one sweep.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/piecewise.hpp"
#include "netprice/rational.hpp"
#include "netprice/sweep.hpp"
#include "netprice/transfer.hpp"

namespace netprice {

// ---------------------------------------------------------------------------
// Revenue curve
// ---------------------------------------------------------------------------
struct RevenueSegment {
  std::optional<Rat> lo, hi;  // interval of the underlying piece
  Rat A, B, C;                // revenue = A p^2 + B p + C on the piece
};

struct RevenueCurve {
  Side side = Side::Pessimistic;
  std::vector<RevenueSegment> segments;  // top-down, matching pwl.segments()
};

// weights / delta may be empty (all-ones / all-zeros).
inline RevenueCurve revenue_curve(const PiecewiseEquilibrium& pwl,
                                  const RatVec& weights, const RatVec& delta) {
  const int n = pwl.n;
  if (!weights.empty() && static_cast<int>(weights.size()) != n)
    throw std::invalid_argument("revenue weights size mismatch");
  if (!delta.empty() && static_cast<int>(delta.size()) != n)
    throw std::invalid_argument("revenue offsets size mismatch");
  auto wt = [&](int i) { return weights.empty() ? Rat(1) : weights[i]; };
  auto dl = [&](int i) { return delta.empty() ? Rat(0) : delta[i]; };

  RevenueCurve curve;
  curve.side = pwl.side;
  for (const AffineSegment& seg : pwl.segments()) {
    RevenueSegment rs;
    rs.lo = seg.lo;
    rs.hi = seg.hi;
    rs.A = Rat(0);
    rs.B = Rat(0);
    rs.C = Rat(0);
    for (int i = 0; i < n; ++i) {
      rs.A += wt(i) * seg.map.c1[i];
      rs.B += wt(i) * (seg.map.c0[i] + dl(i) * seg.map.c1[i]);
      rs.C += wt(i) * dl(i) * seg.map.c0[i];
    }
    curve.segments.push_back(std::move(rs));
  }
  return curve;
}

inline Rat revenue_at(const PiecewiseEquilibrium& pwl, const RatVec& delta,
                      const Rat& p) {
  if (!delta.empty() && static_cast<int>(delta.size()) != pwl.n)
    throw std::invalid_argument("revenue offsets size mismatch");
  ProbVec q = pwl.evaluate(p);
  Rat out(0);
  for (int i = 0; i < pwl.n; ++i)
    out += (delta.empty() ? p : p + delta[i]) * q[i];
  return out;
}

// ---------------------------------------------------------------------------
// Exact maximization of a revenue curve over p > 0.
// ---------------------------------------------------------------------------
namespace detail {

struct RevCandidate {
  Rat price;
  Rat value;
  bool attained = true;
};

// Higher value wins; attained beats unattained; smaller price last.
inline bool better_candidate(const RevCandidate& a, const RevCandidate& b) {
  if (a.value != b.value) return a.value > b.value;
  if (a.attained != b.attained) return a.attained;
  return a.price < b.price;
}

inline Rat quad_at(const RevenueSegment& s, const Rat& p) {
  return (s.A * p + s.B) * p + s.C;
}

// Collect the optimum candidates of one curve segment clipped to p > 0.
inline void segment_candidates(const RevenueSegment& s, Side side,
                               std::vector<RevCandidate>& out) {
  // Effective interval (jlo, jhi) with inclusion flags after the p > 0 clip.
  Rat jlo(0);
  bool lo_inc = false;
  if (s.lo && *s.lo > Rat(0)) {
    jlo = *s.lo;
    lo_inc = (side == Side::Pessimistic);  // [lo, hi) vs (lo, hi]
  }
  const bool has_hi = s.hi.has_value();
  Rat jhi;
  bool hi_inc = false;
  if (has_hi) {
    jhi = *s.hi;
    hi_inc = (side == Side::Optimistic);
    if (!(jlo < jhi)) {
      if (jlo == jhi && lo_inc && hi_inc)
        out.push_back({jlo, quad_at(s, jlo), true});
      return;  // empty after clipping
    }
  } else if (!s.A.is_zero() || !s.B.is_zero()) {
    // Only the all-zeros tail is unbounded above; its revenue is constant.
    throw InternalInvariantViolation("unbounded non-constant revenue piece");
  }

  out.push_back({jlo, quad_at(s, jlo), lo_inc});
  if (has_hi) out.push_back({jhi, quad_at(s, jhi), hi_inc});
  if (s.A.sign() < 0) {
    Rat v = -s.B / (Rat(2) * s.A);
    if (jlo < v && (!has_hi || v < jhi))
      out.push_back({v, quad_at(s, v), true});
  }
  if (s.A.is_zero() && s.B.is_zero() && !lo_inc) {
    // Constant piece whose included points are all interior: make sure an
    // attained candidate exists.
    Rat pt = has_hi ? (jlo + jhi) / Rat(2) : jlo + Rat(1);
    out.push_back({pt, s.C, true});
  }
}

inline RevCandidate maximize_curve(const RevenueCurve& curve) {
  std::vector<RevCandidate> cands;
  for (const RevenueSegment& s : curve.segments)
    segment_candidates(s, curve.side, cands);
  if (cands.empty())
    throw InternalInvariantViolation("revenue curve produced no candidates");
  RevCandidate best = cands.front();
  for (std::size_t i = 1; i < cands.size(); ++i)
    if (better_candidate(cands[i], best)) best = cands[i];
  return best;
}

inline RatVec group_deltas_to_agents(const GroupedInstance& ginst,
                                     const RatVec& group_delta) {
  RatVec out(ginst.inst.n);
  for (int i = 0; i < ginst.inst.n; ++i) out[i] = group_delta[ginst.group[i]];
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Uniform pricing
// ---------------------------------------------------------------------------
inline PricingOutcome optimal_uniform_price(const PiecewiseEquilibrium& pwl) {
  detail::RevCandidate best =
      detail::maximize_curve(revenue_curve(pwl, {}, {}));
  return PricingOutcome{{best.price}, best.value, best.attained};
}

// ---------------------------------------------------------------------------
// Shifted family: group prices base + x * 1 over x > -min(base) such that
// the cheapest group's price stays positive.
// ---------------------------------------------------------------------------
inline PricingOutcome optimal_shifted(const GroupedInstance& ginst,
                                      const RatVec& base) {
  validate_grouped(ginst, /*require_nonneg_influence=*/true);
  if (static_cast<int>(base.size()) != ginst.k)
    throw std::invalid_argument("base price vector size must match group count");
  Rat m = base.front();
  for (const Rat& v : base) m = rat_min(m, v);
  RatVec group_delta(ginst.k);
  for (int g = 0; g < ginst.k; ++g) group_delta[g] = base[g] - m;
  RatVec delta = detail::group_deltas_to_agents(ginst, group_delta);

  PiecewiseEquilibrium pwl = pessimistic_sweep(ginst.inst, delta);
  detail::RevCandidate best =
      detail::maximize_curve(revenue_curve(pwl, {}, delta));

  PricingOutcome out;
  out.prices.resize(ginst.k);
  for (int g = 0; g < ginst.k; ++g) out.prices[g] = best.price + group_delta[g];
  out.revenue = best.value;
  out.attained = best.attained;
  return out;
}

// ---------------------------------------------------------------------------
// Scaled family: group prices xi * base over xi > 0, base strictly positive.
// Rescaling values and influence by each receiver's base price turns this
// into a uniform sweep in xi.
// ---------------------------------------------------------------------------
inline PricingOutcome optimal_scaled(const GroupedInstance& ginst,
                                     const RatVec& base) {
  validate_grouped(ginst, /*require_nonneg_influence=*/true);
  if (static_cast<int>(base.size()) != ginst.k)
    throw std::invalid_argument("base price vector size must match group count");
  for (const Rat& v : base)
    if (!(v > Rat(0)))
      throw ValidationError(ErrCode::ZeroBasePrice,
                            "scaled family requires strictly positive base "
                            "prices, got " + v.to_string());

  const int n = ginst.inst.n;
  Instance scaled = ginst.inst;
  RatVec weights(n);
  for (int i = 0; i < n; ++i) {
    const Rat& beta = base[ginst.group[i]];
    weights[i] = beta;
    scaled.a[i] /= beta;
    scaled.b[i] /= beta;
    for (int j = 0; j < n; ++j) scaled.T[j][i] /= beta;
  }

  PiecewiseEquilibrium pwl = pessimistic_sweep(scaled);
  detail::RevCandidate best =
      detail::maximize_curve(revenue_curve(pwl, weights, {}));

  PricingOutcome out;
  out.prices.resize(ginst.k);
  for (int g = 0; g < ginst.k; ++g) out.prices[g] = best.price * base[g];
  out.revenue = best.value;
  out.attained = best.attained;
  return out;
}

// ---------------------------------------------------------------------------
// Geometric-grid approximation scheme
// ---------------------------------------------------------------------------
struct FptasInfo {
  RatVec group_opt;    // R_g: per-group optimum with the others priced at 0
  Rat upper_bound;     // R = sum_g R_g (revenue upper bound)
  Rat p_min;           // eps * R / (2 k n)
  Rat p_cap;           // grid must reach this price: max(R, choke price)
  long levels = 0;     // smallest J with p_min (1+eps)^J >= p_cap
  long grid_per_group = 0;  // J + 2 (levels plus p_min itself plus 0)
};

// (1 - eps)-approximation of the optimal per-group price vector under the
// pessimistic selection. Grid per coordinate: {0} and p_min (1+eps)^j for
// j = 0..J, where p_min = eps R / (2 k n) and J is the smallest integer
// whose grid value reaches every price that could possibly be optimal.
// The revenue bound R alone is not such a cap: a lone agent on [0,1] earns
// R = 1/4 at price 1/2 > R. Above the choke price max_i (b_i + column sum
// of influence into i) nobody buys at any profile, so optimal prices never
// need to exceed max(R, choke); with that cap the classic round-down
// argument applies and the (1-eps) guarantee holds. When R >= choke the
// grid is exactly the textbook one with J = ceil(log_{1+eps}(2kn/eps)).
// Every vector of the product grid is evaluated exactly.
inline PricingOutcome fptas(const GroupedInstance& ginst, const Rat& eps,
                            FptasInfo* info = nullptr) {
  validate_grouped(ginst, /*require_nonneg_influence=*/true);
  if (!(eps > Rat(0)) || !(eps < Rat(1)))
    throw ValidationError(ErrCode::EpsOutOfRange,
                          "eps must lie strictly between 0 and 1, got " +
                              eps.to_string());
  const int n = ginst.inst.n;
  const int k = ginst.k;

  // Per-group upper bounds: price every other group at 0 (they then buy
  // with probability one, since lower endpoints are nonnegative) and take
  // the group's own uniform optimum on the shifted sub-instance.
  FptasInfo local;
  FptasInfo& fi = info ? *info : local;
  fi.group_opt.assign(k, Rat(0));
  fi.upper_bound = Rat(0);
  for (int g = 0; g < k; ++g) {
    std::vector<int> kept, others;
    for (int i = 0; i < n; ++i)
      (ginst.group[i] == g ? kept : others).push_back(i);
    if (kept.empty()) continue;
    SubInstance sub = restrict_instance(ginst.inst, kept, others);
    fi.group_opt[g] =
        optimal_uniform_price(pessimistic_sweep(sub.inst)).revenue;
    fi.upper_bound += fi.group_opt[g];
  }
  if (!(fi.upper_bound > Rat(0)))
    throw InternalInvariantViolation("revenue upper bound not positive");

  fi.p_min = eps * fi.upper_bound / Rat(2 * k * n);
  fi.p_cap = fi.upper_bound;
  for (int i = 0; i < n; ++i) {
    Rat choke = ginst.inst.b[i];
    for (int j = 0; j < n; ++j) choke += ginst.inst.T[j][i];
    fi.p_cap = rat_max(fi.p_cap, choke);
  }
  const Rat growth = Rat(1) + eps;
  Rat pw = fi.p_min;
  long J = 0;
  while (pw < fi.p_cap) {
    pw *= growth;
    ++J;
  }
  fi.levels = J;
  fi.grid_per_group = J + 2;

  RatVec grid;
  grid.reserve(J + 2);
  grid.push_back(Rat(0));
  Rat val = fi.p_min;
  for (long j = 0; j <= J; ++j) {
    grid.push_back(val);
    val *= growth;
  }

  // Exhaustive product-grid scan in lexicographic order; strict improvement
  // keeps the lexicographically smallest maximizer.
  std::vector<std::size_t> idx(k, 0);
  RatVec prices(k, Rat(0));
  std::optional<PricingOutcome> best;
  for (;;) {
    for (int g = 0; g < k; ++g) prices[g] = grid[idx[g]];
    ProbVec q = equilibrium_at_price_vector(ginst, prices, Side::Pessimistic);
    Rat rev(0);
    for (int i = 0; i < n; ++i) rev += prices[ginst.group[i]] * q[i];
    if (!best || rev > best->revenue) best = PricingOutcome{prices, rev, true};

    int pos = k - 1;
    while (pos >= 0 && idx[pos] + 1 == grid.size()) {
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++idx[pos];
  }
  return *best;
}

// ---------------------------------------------------------------------------
// Exhaustive uniform-grid reference
// ---------------------------------------------------------------------------
namespace detail {

struct RatVecLess {
  bool operator()(const RatVec& a, const RatVec& b) const {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (b[i] < a[i]) return false;
    }
    return a.size() < b.size();
  }
};

// Does the half-open/closed segment of the given side contain t?
inline bool segment_contains(const RevenueSegment& s, Side side, const Rat& t) {
  if (s.lo) {
    if (side == Side::Pessimistic ? t < *s.lo : t <= *s.lo) return false;
  }
  if (s.hi) {
    if (side == Side::Pessimistic ? t >= *s.hi : t > *s.hi) return false;
  }
  return true;
}

inline Rat curve_value_at(const RevenueCurve& curve, const Rat& t) {
  for (const RevenueSegment& s : curve.segments)
    if (segment_contains(s, curve.side, t)) return quad_at(s, t);
  throw InternalInvariantViolation("curve has a gap");
}

}  // namespace detail

// Exhaustive search over the product grid {lo, lo+step, ...} ∩ [lo, hi] in
// every group coordinate, under the pessimistic selection. Grids sharing a
// price-difference class share one sweep; within a class the per-segment
// quadratic optimum over the grid is taken in closed form, so the cost is
// per-class, not per-point. Ties prefer the lexicographically smallest
// price vector. Refuses grids with more than `candidate_cap` vectors.
inline PricingOutcome grid_bruteforce_opt(const GroupedInstance& ginst,
                                          const Rat& lo, const Rat& hi,
                                          const Rat& step,
                                          long long candidate_cap =
                                              100'000'000LL) {
  validate_grouped(ginst, /*require_nonneg_influence=*/true);
  if (!(step > Rat(0))) throw std::invalid_argument("grid step must be positive");
  if (lo.sign() < 0) throw std::invalid_argument("grid prices must be >= 0");
  if (hi < lo) throw std::invalid_argument("empty grid range");
  const int k = ginst.k;

  const mpz_class M = rat_floor((hi - lo) / step);  // indices 0..M per axis
  {
    mpz_class count;
    mpz_class points = M + 1;
    mpz_pow_ui(count.get_mpz_t(), points.get_mpz_t(),
               static_cast<unsigned long>(k));
    if (count > mpz_class(std::to_string(candidate_cap)))
      throw ValidationError(ErrCode::GridTooLarge,
                            "grid has " + count.get_str() +
                                " candidate vectors (cap " +
                                std::to_string(candidate_cap) + ")");
  }
  const long Ml = static_cast<long>(M.get_si());

  std::optional<PricingOutcome> best;
  auto consider = [&](const Rat& rev, const RatVec& prices) {
    if (!best || rev > best->revenue ||
        (rev == best->revenue &&
         detail::RatVecLess{}(prices, best->prices))) {
      best = PricingOutcome{prices, rev, true};
    }
  };

  // One price-difference class: group offsets `gdelta` (min zero), base
  // parameter t = lo + m*step for m in [0, m_cap]. Scans each curve piece
  // once and evaluates only the closed-form optima.
  auto scan_class = [&](const RatVec& gdelta, long m_cap) {
    RatVec delta = detail::group_deltas_to_agents(ginst, gdelta);
    PiecewiseEquilibrium pwl = pessimistic_sweep(ginst.inst, delta);
    RevenueCurve curve = revenue_curve(pwl, {}, delta);
    RatVec prices(k);
    auto consider_m = [&](long m) {
      Rat t = lo + Rat(m) * step;
      for (int g = 0; g < k; ++g) prices[g] = t + gdelta[g];
      consider(detail::curve_value_at(curve, t), prices);
    };
    for (const RevenueSegment& s : curve.segments) {
      // Integer index range of grid points inside this piece.
      long mlo = 0, mhi = m_cap;
      if (s.lo) {
        Rat x = (*s.lo - lo) / step;
        mpz_class c = rat_ceil(x);
        if (curve.side == Side::Optimistic && Rat(c) == x) c += 1;  // open lo
        if (c > mlo) mlo = static_cast<long>(c.get_si());
      }
      if (s.hi) {
        Rat x = (*s.hi - lo) / step;
        mpz_class f = rat_floor(x);
        if (curve.side == Side::Pessimistic && Rat(f) == x) f -= 1;  // open hi
        if (f < mhi) mhi = static_cast<long>(f.get_si());
      }
      if (mlo > mhi) continue;
      consider_m(mlo);
      if (mhi != mlo) consider_m(mhi);
      if (s.A.sign() < 0) {
        Rat vtx = -s.B / (Rat(2) * s.A);
        mpz_class mv = rat_floor((vtx - lo) / step);
        for (int off = 0; off <= 1; ++off) {
          mpz_class cand = mv + off;
          long m = cand.get_si();
          if (m > mlo && m < mhi) consider_m(m);
        }
      }
    }
  };

  if (k <= 2) {
    if (k == 1) {
      scan_class({Rat(0)}, Ml);
    } else {
      for (long d = -Ml; d <= Ml; ++d) {
        RatVec gdelta(2, Rat(0));
        if (d >= 0)
          gdelta[1] = Rat(d) * step;
        else
          gdelta[0] = Rat(-d) * step;
        scan_class(gdelta, Ml - (d < 0 ? -d : d));
      }
    }
  } else {
    // General case: odometer with one sweep per price-difference class.
    std::map<RatVec, RevenueCurve, detail::RatVecLess> curves;
    std::vector<long> idx(k, 0);
    RatVec prices(k), gdelta(k);
    for (;;) {
      Rat t = lo + Rat(idx[0]) * step;
      for (int g = 0; g < k; ++g) {
        prices[g] = lo + Rat(idx[g]) * step;
        t = rat_min(t, prices[g]);
      }
      for (int g = 0; g < k; ++g) gdelta[g] = prices[g] - t;
      auto it = curves.find(gdelta);
      if (it == curves.end()) {
        RatVec delta = detail::group_deltas_to_agents(ginst, gdelta);
        PiecewiseEquilibrium pwl = pessimistic_sweep(ginst.inst, delta);
        it = curves.emplace(gdelta, revenue_curve(pwl, {}, delta)).first;
      }
      consider(detail::curve_value_at(it->second, t), prices);

      int pos = k - 1;
      while (pos >= 0 && idx[pos] == Ml) {
        idx[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
      ++idx[pos];
    }
  }
  if (!best) throw InternalInvariantViolation("empty grid scan");
  return *best;
}

}  // namespace netprice
