#pragma once
//
// Named instance families, random instances, and the two-player-game
// gadget with strategy extraction.
//
//   * gen_counterexample(n) -- the chain whose best-response iteration at
//     p = 1 needs exponentially many steps: intervals [0,2],[0,1],...,[0,1],
//     T[i][i+1] = 1/2 along the chain and a mutually reinforcing pair
//     T[n-1][n] = T[n][n-1] = 1 at the end. After n-2+2k iterations from 0
//     the last two coordinates equal exactly k / 2^(n-1).
//   * gen_jump() -- two unit-interval agents with influence 2 both ways;
//     the pessimistic equilibrium drops from (1,1) to (0,0) at p = 1.
//   * gen_expstruct(n) -- two price groups (odd vs even agents) realizing
//     at least 2^(n/2) distinct purchase structures across the price plane.
//     Values are powers of two; agent i wants exactly v_i = 2^(ceil(i/2)-1),
//     realized as the interval [v_i - d, v_i + d] with d = 2^-20 because
//     degenerate intervals are rejected by validation. Influences follow a
//     parity rule: agent j pushes weight v_j onto every earlier agent i of
//     opposite parity, except its own pair partner (so pairs stay
//     independent and each contributes a free structure bit).
//   * gen_random(...) -- seeded random instances over eighth-integer grids,
//     optionally rescaled to strict diagonal dominance.
//   * gen_ppad(game, delta) -- the gadget translating a two-player game
//     into a pricing instance at p = 1/2 whose approximate equilibria
//     encode approximate Nash equilibria. Uses negative influences, so it
//     is rejected by the sweep and usable only with the fixed-point
//     machinery. extract_bimatrix reads mixed strategies back out of a
//     purchase vector.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/rational.hpp"

namespace netprice {

// ---------------------------------------------------------------------------
// Named families
// ---------------------------------------------------------------------------
inline Instance gen_counterexample(int n) {
  if (n < 3) throw std::invalid_argument("gen_counterexample requires n >= 3");
  Instance inst;
  inst.n = n;
  inst.a.assign(n, Rat(0));
  inst.b.assign(n, Rat(1));
  inst.b[0] = Rat(2);
  inst.T.assign(n, RatVec(n, Rat(0)));
  for (int i = 0; i + 1 <= n - 2; ++i) inst.T[i][i + 1] = Rat(1, 2);
  inst.T[n - 2][n - 1] = Rat(1);
  inst.T[n - 1][n - 2] = Rat(1);
  return inst;
}

inline Instance gen_jump() {
  Instance inst;
  inst.n = 2;
  inst.a = {Rat(0), Rat(0)};
  inst.b = {Rat(1), Rat(1)};
  inst.T = {{Rat(0), Rat(2)}, {Rat(2), Rat(0)}};
  return inst;
}

// v_i = 2^(ceil(i/2) - 1) for 1-based i: 1, 1, 2, 2, 4, 4, ...
inline Rat expstruct_value(int i_one_based) {
  mpz_class v = 1;
  mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(),
               static_cast<mp_bitcnt_t>((i_one_based + 1) / 2 - 1));
  return Rat(v);
}

inline GroupedInstance gen_expstruct(int n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("gen_expstruct requires an even n >= 2");
  const Rat d(1, 1 << 20);
  GroupedInstance g;
  g.inst.n = n;
  g.k = 2;
  g.group.resize(n);
  g.inst.a.resize(n);
  g.inst.b.resize(n);
  g.inst.T.assign(n, RatVec(n, Rat(0)));
  for (int i = 1; i <= n; ++i) {
    Rat v = expstruct_value(i);
    g.inst.a[i - 1] = v - d;
    g.inst.b[i - 1] = v + d;
    g.group[i - 1] = (i % 2 == 1) ? 0 : 1;  // odd agents vs even agents
  }
  for (int j = 1; j <= n; ++j) {
    for (int i = 1; i < j; ++i) {
      bool opposite_parity = ((j - i) % 2 == 1);
      bool pair_partner = (j % 2 == 0 && i == j - 1);
      if (opposite_parity && !pair_partner)
        g.inst.T[j - 1][i - 1] = expstruct_value(j);
    }
  }
  return g;
}

// Deterministic seeded instance on eighth-integer grids: endpoints
// 0 <= a < b <= 10, edge weights in {1/8, ..., 2}. With
// enforce_diag_dominant every row sum of the normalized influence matrix
// is rescaled down to 9/10 when it exceeds that, making the instance
// strictly diagonally dominant by construction.
inline Instance gen_random(int n, double edge_density, std::uint64_t seed,
                           bool enforce_diag_dominant) {
  if (n < 1) throw std::invalid_argument("gen_random requires n >= 1");
  if (!(edge_density >= 0.0 && edge_density <= 1.0))
    throw std::invalid_argument("edge density must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  Instance inst;
  inst.n = n;
  inst.a.resize(n);
  inst.b.resize(n);
  inst.T.assign(n, RatVec(n, Rat(0)));
  for (int i = 0; i < n; ++i) {
    long a8 = static_cast<long>(rng() % 80);       // a in {0, ..., 79/8}
    long w8 = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(80 - a8));
    inst.a[i] = Rat(a8, 8);
    inst.b[i] = Rat(a8 + w8, 8);
  }
  const std::uint64_t threshold =
      static_cast<std::uint64_t>(edge_density * 1048576.0 + 0.5);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i == j) continue;
      bool present = (rng() % 1048576) < threshold;
      if (present) inst.T[j][i] = Rat(1 + static_cast<long>(rng() % 16), 8);
    }
  }
  if (enforce_diag_dominant) {
    const Rat cap(9, 10);
    for (int i = 0; i < n; ++i) {
      Rat row(0);
      for (int j = 0; j < n; ++j) row += inst.T[j][i];
      Rat width = inst.b[i] - inst.a[i];
      if (row > cap * width) {
        Rat scale = cap * width / row;
        for (int j = 0; j < n; ++j) inst.T[j][i] *= scale;
      }
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Two-player-game gadget
// ---------------------------------------------------------------------------
struct BimatrixGame {
  int n = 0;        // strategies per player
  RatMat A, B;      // A[i][j]: row player's payoff for (i, j); B: column's
};

inline void validate_bimatrix(const BimatrixGame& game) {
  if (game.n < 1)
    throw ValidationError(ErrCode::MalformedGame, "need at least 1 strategy");
  auto check = [&](const RatMat& M, const char* name) {
    if (static_cast<int>(M.size()) != game.n)
      throw ValidationError(ErrCode::MalformedGame,
                            std::string(name) + " is not n x n");
    for (const RatVec& row : M) {
      if (static_cast<int>(row.size()) != game.n)
        throw ValidationError(ErrCode::MalformedGame,
                              std::string(name) + " is not n x n");
      for (const Rat& v : row)
        if (rat_abs(v) > Rat(1))
          throw ValidationError(ErrCode::MalformedGame,
                                std::string(name) + " entry " + v.to_string() +
                                    " outside [-1, 1]");
    }
  };
  check(game.A, "payoff matrix A");
  check(game.B, "payoff matrix B");
}

// Agent layout of the gadget, 0-based agent indices; i, j are 1-based
// strategy indices as in the construction.
struct PpadRoles {
  int game_n = 0;
  Rat delta;
  int x(int i) const { return i - 1; }
  int y(int i) const { return game_n + i - 1; }
  int u(int i, int j) const { return 2 * game_n + (i - 1) * game_n + (j - 1); }
  int v(int i, int j) const {
    return 2 * game_n + game_n * game_n + (i - 1) * game_n + (j - 1);
  }
  int agents() const { return 2 * game_n + 2 * game_n * game_n; }
};

struct PpadGadget {
  Instance inst;
  PpadRoles roles;
};

// Gadget at price 1/2: strategy agents X_i, Y_i on [0,1]; comparison agents
// U_{i,j}, V_{i,j} on [1/2-d, 1/2-d+d^2]. U_{i,j} aggregates how much the
// row player gains by switching strategy i -> j against y (payoff rows of A
// differenced), and suppresses X_i through influence -1; symmetrically for
// V and the column player. The negative edges put this outside the
// nonnegative-influence world: only the fixed-point iteration accepts it.
inline PpadGadget gen_ppad(const BimatrixGame& game, const Rat& delta) {
  validate_bimatrix(game);
  if (!(delta > Rat(0)) || !(delta < Rat(1, 2)))
    throw ValidationError(ErrCode::DeltaOutOfRange,
                          "delta must lie strictly between 0 and 1/2, got " +
                              delta.to_string());
  const int n = game.n;
  PpadGadget gg;
  gg.roles.game_n = n;
  gg.roles.delta = delta;
  const int m = gg.roles.agents();
  gg.inst.n = m;
  gg.inst.a.assign(m, Rat(0));
  gg.inst.b.assign(m, Rat(1));
  gg.inst.T.assign(m, RatVec(m, Rat(0)));

  const Rat ulo = Rat(1, 2) - delta;
  const Rat uhi = ulo + delta * delta;
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      gg.inst.a[gg.roles.u(i, j)] = ulo;
      gg.inst.b[gg.roles.u(i, j)] = uhi;
      gg.inst.a[gg.roles.v(i, j)] = ulo;
      gg.inst.b[gg.roles.v(i, j)] = uhi;
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      const int uij = gg.roles.u(i, j);
      const int vij = gg.roles.v(i, j);
      for (int k = 1; k <= n; ++k) {
        Rat wa = game.A[j - 1][k - 1] - game.A[i - 1][k - 1];
        if (!wa.is_zero()) gg.inst.T[gg.roles.y(k)][uij] = wa;
        Rat wb = game.B[j - 1][k - 1] - game.B[i - 1][k - 1];
        if (!wb.is_zero()) gg.inst.T[gg.roles.x(k)][vij] = wb;
      }
      gg.inst.T[uij][gg.roles.x(i)] = Rat(-1);
      gg.inst.T[vij][gg.roles.y(i)] = Rat(-1);
    }
  }
  return gg;
}

inline Rat ppad_price() { return Rat(1, 2); }

// ---------------------------------------------------------------------------
// Strategy extraction
// ---------------------------------------------------------------------------
struct ExtractedStrategies {
  RatVec x, y;  // probability simplices (zeros when degenerate)
  bool degenerate_x = false;
  bool degenerate_y = false;
};

// Threshold each strategy block at delta and L1-normalize. A block whose
// entries all sit at or below delta cannot be normalized; it is returned as
// zeros with the degenerate flag raised.
inline ExtractedStrategies extract_bimatrix(const ProbVec& q,
                                            const PpadRoles& roles,
                                            const Rat& delta) {
  if (static_cast<int>(q.size()) != roles.agents())
    throw std::invalid_argument("purchase vector size does not match gadget");
  const int n = roles.game_n;
  ExtractedStrategies out;
  auto block = [&](auto index_of, RatVec& dst, bool& degenerate) {
    dst.assign(n, Rat(0));
    Rat norm(0);
    for (int i = 1; i <= n; ++i) {
      const Rat& qi = q[index_of(i)];
      if (qi > delta) {
        dst[i - 1] = qi;
        norm += qi;
      }
    }
    if (norm.is_zero()) {
      degenerate = true;
      dst.assign(n, Rat(0));
    } else {
      for (Rat& v : dst) v /= norm;
    }
  };
  block([&](int i) { return roles.x(i); }, out.x, out.degenerate_x);
  block([&](int i) { return roles.y(i); }, out.y, out.degenerate_y);
  return out;
}

}  // namespace netprice
