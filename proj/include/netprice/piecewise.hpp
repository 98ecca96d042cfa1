#pragma once
//
// Piecewise-linear equilibrium functions of the price.
//
// Both extremal equilibrium selections are piecewise linear in the price
// with at most 2n+1 pieces. We store the interior pieces explicitly and
// the two unbounded tails implicitly:
//
//   breaks:  strictly descending threshold prices t_0 > t_1 > ... > t_m
//   mids[j]: affine map q(p) = c0 + c1 * p governing prices between
//            t_{j+1} and t_j
//   above t_0 the function is identically all-zeros (prices too high for
//   anyone); below t_m it is identically all-ones.
//
// Side conventions at the thresholds:
//   * pessimistic (least equilibrium)  -- right-continuous; piece j covers
//     [t_{j+1}, t_j), the zero tail covers [t_0, +inf), the one tail
//     covers (-inf, t_m).
//   * optimistic (greatest equilibrium) -- left-continuous; piece j covers
//     (t_{j+1}, t_j], the zero tail covers (t_0, +inf), the one tail
//     covers (-inf, t_m].
//
// Every c1 is entrywise <= 0: buying probabilities never increase with
// the price.

#include <optional>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/rational.hpp"

namespace netprice {

enum class Side { Pessimistic, Optimistic };

inline const char* to_string(Side s) {
  return s == Side::Pessimistic ? "pessimistic" : "optimistic";
}

struct AffineMap {
  RatVec c0, c1;  // q(p) = c0 + c1 * p, coordinatewise

  ProbVec eval(const Rat& p) const {
    ProbVec out(c0.size());
    for (std::size_t i = 0; i < c0.size(); ++i) out[i] = c0[i] + c1[i] * p;
    return out;
  }
  bool operator==(const AffineMap& o) const { return c0 == o.c0 && c1 == o.c1; }

  static AffineMap constant(const ProbVec& q) {
    return AffineMap{q, RatVec(q.size(), Rat(0))};
  }
};

// One materialized piece; absent bounds are the unbounded directions.
// Endpoint inclusion follows the side conventions above.
struct AffineSegment {
  std::optional<Rat> lo, hi;
  AffineMap map;
};

class PiecewiseEquilibrium {
 public:
  Side side = Side::Pessimistic;
  int n = 0;
  std::vector<Rat> breaks;     // strictly descending, size >= 1
  std::vector<AffineMap> mids; // size breaks.size() - 1

  // Highest threshold: at and above it (pessimistic) or strictly above it
  // (optimistic) nobody buys.
  const Rat& p_first() const { return breaks.front(); }
  const Rat& p_last() const { return breaks.back(); }
  std::size_t segment_count() const { return mids.size() + 2; }

  ProbVec evaluate(const Rat& p) const {
    const bool pess = (side == Side::Pessimistic);
    if (pess ? p >= breaks.front() : p > breaks.front())
      return ProbVec(n, Rat(0));
    if (pess ? p < breaks.back() : p <= breaks.back())
      return ProbVec(n, Rat(1));
    // Find the last threshold strictly above p (pessimistic: >=-exclusive,
    // optimistic: >-exclusive); its piece contains p.
    int lo = 0, hi = static_cast<int>(breaks.size()) - 1, ans = 0;
    while (lo <= hi) {
      int mid = (lo + hi) / 2;
      bool above = pess ? breaks[mid] > p : breaks[mid] >= p;
      if (above) {
        ans = mid;
        lo = mid + 1;
      } else {
        hi = mid - 1;
      }
    }
    return mids[ans].eval(p);
  }

  std::vector<AffineSegment> segments() const {
    std::vector<AffineSegment> out;
    out.reserve(mids.size() + 2);
    out.push_back({breaks.front(), std::nullopt,
                   AffineMap::constant(ProbVec(n, Rat(0)))});
    for (std::size_t j = 0; j < mids.size(); ++j)
      out.push_back({breaks[j + 1], breaks[j], mids[j]});
    out.push_back({std::nullopt, breaks.back(),
                   AffineMap::constant(ProbVec(n, Rat(1)))});
    return out;
  }

  // Limits at threshold index idx from the price side above / below.
  ProbVec value_above(int idx) const {
    if (idx == 0) return ProbVec(n, Rat(0));
    return mids[idx - 1].eval(breaks[idx]);
  }
  ProbVec value_below(int idx) const {
    if (idx == static_cast<int>(breaks.size()) - 1) return ProbVec(n, Rat(1));
    return mids[idx].eval(breaks[idx]);
  }
  bool has_jump_at(int idx) const { return value_above(idx) != value_below(idx); }

  // Structural sanity; used by tests and asserted after construction.
  void check_well_formed() const {
    if (n < 1 || breaks.empty() || mids.size() + 1 != breaks.size())
      throw InternalInvariantViolation("piecewise shape inconsistent");
    for (std::size_t j = 0; j + 1 < breaks.size(); ++j)
      if (!(breaks[j] > breaks[j + 1]))
        throw InternalInvariantViolation("thresholds not strictly descending");
    for (const AffineMap& m : mids) {
      if (static_cast<int>(m.c0.size()) != n ||
          static_cast<int>(m.c1.size()) != n)
        throw InternalInvariantViolation("piece dimension mismatch");
      for (const Rat& c : m.c1)
        if (c.sign() > 0)
          throw InternalInvariantViolation("piece increases with price");
    }
    // Piece values stay within [0, 1] across their closed hull.
    for (std::size_t j = 0; j < mids.size(); ++j) {
      for (const Rat& p : {breaks[j + 1], breaks[j]}) {
        ProbVec v = mids[j].eval(p);
        for (const Rat& q : v)
          if (q.sign() < 0 || q > Rat(1))
            throw InternalInvariantViolation("piece leaves [0, 1]");
      }
    }
  }
};

inline ProbVec evaluate(const PiecewiseEquilibrium& pwl, const Rat& p) {
  return pwl.evaluate(p);
}

}  // namespace netprice
