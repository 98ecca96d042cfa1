#pragma once
//
// Core problem data: a social-network pricing instance.
//
// An instance has n agents. Agent i privately values the product uniformly
// on the interval [a_i, b_i), and a purchase by agent j adds T[j][i] to
// agent i's effective value (T[j][i] is the influence FROM j ON i; the
// diagonal is zero). At per-agent prices p_i, a buying-probability vector
// q is an equilibrium when, for every agent,
//
//     q_i = med{ 0, 1, (b_i - p_i + sum_j T[j][i] q_j) / (b_i - a_i) }.
//
// Normalized form used by the solver: L[i][j] = T[j][i] / (b_i - a_i)
// (rows of L are receivers) and y_i = 1 / (b_i - a_i). Keeping every row
// sum of L strictly below one ("strict diagonal dominance") guarantees a
// contraction; the sweep also handles the general nonnegative case.

#include <string>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/rational.hpp"

namespace netprice {

struct Instance {
  int n = 0;
  RatVec a;   // interval lower endpoints, size n
  RatVec b;   // interval upper endpoints, size n; a[i] < b[i]
  RatMat T;   // T[j][i] = influence of agent j's purchase on agent i
};

using ProbVec = RatVec;

// ---------------------------------------------------------------------------
// Structures: which agents certainly skip (0), certainly buy (1), or are
// interior (*) in an equilibrium vector.
// ---------------------------------------------------------------------------
enum class Mark : unsigned char { Zero, Star, One };
using Structure = std::vector<Mark>;

inline Structure structure_of(const ProbVec& q) {
  Structure s;
  s.reserve(q.size());
  for (const Rat& v : q) {
    if (v.sign() < 0 || v > Rat(1))
      throw std::invalid_argument("structure_of: entry outside [0, 1]");
    if (v.is_zero())
      s.push_back(Mark::Zero);
    else if (v == Rat(1))
      s.push_back(Mark::One);
    else
      s.push_back(Mark::Star);
  }
  return s;
}

inline std::string structure_string(const Structure& s) {
  std::string out;
  out.reserve(s.size());
  for (Mark m : s)
    out += (m == Mark::Zero ? '0' : (m == Mark::One ? '1' : '*'));
  return out;
}

// ---------------------------------------------------------------------------
// Working partition maintained by the sweep: Z (pinned at 0), W (interior,
// moving), O (pinned at 1).
// ---------------------------------------------------------------------------
enum class Region : unsigned char { Z, W, O };

struct Partition {
  std::vector<Region> region;  // size n

  std::vector<int> members(Region r) const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(region.size()); ++i)
      if (region[i] == r) out.push_back(i);
    return out;
  }
  int count(Region r) const {
    int c = 0;
    for (Region x : region) c += (x == r);
    return c;
  }
  bool all(Region r) const { return count(r) == static_cast<int>(region.size()); }
};

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------
inline void validate_instance(const Instance& inst,
                              bool require_nonneg_influence) {
  const int n = inst.n;
  if (n < 1) throw std::invalid_argument("instance must have at least one agent");
  if (static_cast<int>(inst.a.size()) != n ||
      static_cast<int>(inst.b.size()) != n ||
      static_cast<int>(inst.T.size()) != n)
    throw std::invalid_argument("instance arrays disagree with agent count");
  for (int j = 0; j < n; ++j)
    if (static_cast<int>(inst.T[j].size()) != n)
      throw std::invalid_argument("influence matrix is not square");

  for (int i = 0; i < n; ++i) {
    if (inst.a[i].sign() < 0)
      throw ValidationError(ErrCode::NegativeLowerBound,
                            "agent " + std::to_string(i + 1) +
                                " has lower endpoint " + inst.a[i].to_string());
    if (!(inst.a[i] < inst.b[i]))
      throw ValidationError(ErrCode::DegenerateInterval,
                            "agent " + std::to_string(i + 1) + " has interval [" +
                                inst.a[i].to_string() + ", " +
                                inst.b[i].to_string() + ")");
  }
  for (int j = 0; j < n; ++j) {
    if (!inst.T[j][j].is_zero())
      throw ValidationError(ErrCode::SelfLoop,
                            "agent " + std::to_string(j + 1) +
                                " influences itself");
    if (require_nonneg_influence) {
      for (int i = 0; i < n; ++i)
        if (inst.T[j][i].sign() < 0)
          throw ValidationError(ErrCode::NegativeInfluence,
                                "influence " + std::to_string(j + 1) + " -> " +
                                    std::to_string(i + 1) + " is " +
                                    inst.T[j][i].to_string());
    }
  }
}

// ---------------------------------------------------------------------------
// Normalized influence
// ---------------------------------------------------------------------------
struct NormalizedInfluence {
  RatMat L;   // L[i][j] = T[j][i] / (b_i - a_i); receiver-major
  RatVec y;   // y[i] = 1 / (b_i - a_i)
};

inline NormalizedInfluence normalize(const Instance& inst) {
  const int n = inst.n;
  NormalizedInfluence out;
  out.L.assign(n, RatVec(n));
  out.y.assign(n, Rat(0));
  for (int i = 0; i < n; ++i) {
    Rat width = inst.b[i] - inst.a[i];
    out.y[i] = Rat(1) / width;
    for (int j = 0; j < n; ++j) out.L[i][j] = inst.T[j][i] / width;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic utility of agent i under a 0/1 decision profile, with a
// realized value v_i for agent i: buyers pay p and collect influence from
// the other buyers; non-buyers get zero.
// ---------------------------------------------------------------------------
inline Rat agent_utility(const std::vector<int>& decisions, int i,
                         const Rat& v_i, const Rat& p, const Instance& inst) {
  if (static_cast<int>(decisions.size()) != inst.n)
    throw std::invalid_argument("decision profile size mismatch");
  if (i < 0 || i >= inst.n) throw std::invalid_argument("agent index out of range");
  for (int d : decisions)
    if (d != 0 && d != 1)
      throw std::invalid_argument("decision profile entries must be 0 or 1");
  if (decisions[i] == 0) return Rat(0);
  Rat u = v_i - p;
  for (int j = 0; j < inst.n; ++j)
    if (decisions[j] == 1) u += inst.T[j][i];
  return u;
}

// ---------------------------------------------------------------------------
// Group structure for discriminative pricing: agents are partitioned into
// k price groups; a price vector assigns one price per group.
// ---------------------------------------------------------------------------
struct GroupedInstance {
  Instance inst;
  int k = 1;
  std::vector<int> group;  // group[i] in [0, k), size n
};

inline void validate_grouped(const GroupedInstance& g,
                             bool require_nonneg_influence) {
  validate_instance(g.inst, require_nonneg_influence);
  if (g.k < 1) throw std::invalid_argument("group count must be >= 1");
  if (static_cast<int>(g.group.size()) != g.inst.n)
    throw std::invalid_argument("group assignment size mismatch");
  for (int gi : g.group)
    if (gi < 0 || gi >= g.k)
      throw std::invalid_argument("group id out of range");
}

inline GroupedInstance as_grouped(const Instance& inst) {
  GroupedInstance g;
  g.inst = inst;
  g.k = 1;
  g.group.assign(inst.n, 0);
  return g;
}

// ---------------------------------------------------------------------------
// Outcome of a pricing optimization. `prices` holds one entry for a uniform
// price or k entries for per-group prices. When the optimum is a supremum
// approached from the left rather than an achieved maximum (a revenue jump
// at the segment boundary), `attained` is false and `revenue` reports the
// left limit at the stated price.
// ---------------------------------------------------------------------------
struct PricingOutcome {
  RatVec prices;
  Rat revenue;
  bool attained = true;
};

}  // namespace netprice
