#pragma once
//
// Instance file format, deterministic serialization, and parsing helpers.
//
// File format (version 1):
//
//     # comment
//     netprice v1
//     agents <n>
//     groups <k>                (optional, default 1)
//     agent <i> <g> <a> <b>     (1-based agent index, 1-based group id,
//                                rational interval endpoints a < b)
//     edge <j> <i> <w>          (influence FROM j ON i: T[j][i] = w)
//
// Rationals are written as `int`, `int/int`, or exact decimals. Unlisted
// edges are zero. Serialization is canonical -- header, `agents`, `groups`,
// agent lines in ascending order, nonzero edges in (j, i) order -- so
// parse(serialize(x)) == x byte for byte on canonical files, and output is
// bit-identical across runs.
//
// Equilibria serialize as segment lists, top price down, with explicit
// `jump at <p>` markers between segments whose closures disagree;
// machine-readable output is JSON with every rational rendered exactly.

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/instances.hpp"
#include "netprice/piecewise.hpp"
#include "netprice/pricing.hpp"
#include "netprice/rational.hpp"
#include "netprice/transfer.hpp"

namespace netprice {

enum class Format { Text, Json };

using OrderedJson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------
namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] inline void syntax_error(int lineno, const std::string& what) {
  throw ValidationError(ErrCode::SyntaxError,
                        "line " + std::to_string(lineno) + ": " + what);
}

inline Rat parse_rat_or_die(const std::string& tok, int lineno) {
  try {
    return Rat::parse(tok);
  } catch (const std::invalid_argument&) {
    syntax_error(lineno, "not a rational: '" + tok + "'");
  } catch (const std::domain_error&) {
    syntax_error(lineno, "zero denominator: '" + tok + "'");
  }
}

inline long parse_int_or_die(const std::string& tok, int lineno) {
  Rat r = parse_rat_or_die(tok, lineno);
  if (!r.is_integer()) syntax_error(lineno, "not an integer: '" + tok + "'");
  if (!r.num().fits_slong_p()) syntax_error(lineno, "integer out of range");
  return r.num().get_si();
}

}  // namespace detail

inline GroupedInstance parse_instance(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  bool saw_header = false, saw_agents = false, saw_groups = false;
  GroupedInstance g;
  g.k = 1;
  std::vector<bool> agent_seen;
  std::vector<std::vector<bool>> edge_seen;
  int last_lineno = 0;

  while (std::getline(in, line)) {
    ++lineno;
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    last_lineno = lineno;

    if (!saw_header) {
      if (tok.size() != 2 || tok[0] != "netprice" || tok[1] != "v1")
        detail::syntax_error(lineno, "expected 'netprice v1' header");
      saw_header = true;
      continue;
    }
    if (tok[0] == "agents") {
      if (saw_agents) detail::syntax_error(lineno, "duplicate 'agents' line");
      if (tok.size() != 2) detail::syntax_error(lineno, "usage: agents <n>");
      long n = detail::parse_int_or_die(tok[1], lineno);
      if (n < 1) detail::syntax_error(lineno, "agent count must be >= 1");
      saw_agents = true;
      g.inst.n = static_cast<int>(n);
      g.inst.a.assign(g.inst.n, Rat(0));
      g.inst.b.assign(g.inst.n, Rat(1));
      g.inst.T.assign(g.inst.n, RatVec(g.inst.n, Rat(0)));
      g.group.assign(g.inst.n, 0);
      agent_seen.assign(g.inst.n, false);
      edge_seen.assign(g.inst.n, std::vector<bool>(g.inst.n, false));
      continue;
    }
    if (!saw_agents)
      detail::syntax_error(lineno, "'agents <n>' must precede '" + tok[0] + "'");

    if (tok[0] == "groups") {
      if (saw_groups) detail::syntax_error(lineno, "duplicate 'groups' line");
      if (tok.size() != 2) detail::syntax_error(lineno, "usage: groups <k>");
      long k = detail::parse_int_or_die(tok[1], lineno);
      if (k < 1) detail::syntax_error(lineno, "group count must be >= 1");
      saw_groups = true;
      g.k = static_cast<int>(k);
      continue;
    }
    if (tok[0] == "agent") {
      if (tok.size() != 5)
        detail::syntax_error(lineno, "usage: agent <i> <group> <a> <b>");
      long i = detail::parse_int_or_die(tok[1], lineno);
      if (i < 1 || i > g.inst.n)
        throw ValidationError(ErrCode::UnknownAgentRef,
                              "line " + std::to_string(lineno) + ": agent " +
                                  std::to_string(i) + " out of range 1.." +
                                  std::to_string(g.inst.n));
      if (agent_seen[i - 1])
        throw ValidationError(ErrCode::DuplicateAgent,
                              "line " + std::to_string(lineno) + ": agent " +
                                  std::to_string(i) + " declared twice");
      long grp = detail::parse_int_or_die(tok[2], lineno);
      if (grp < 1 || grp > g.k)
        detail::syntax_error(lineno, "group " + std::to_string(grp) +
                                         " out of range 1.." +
                                         std::to_string(g.k));
      agent_seen[i - 1] = true;
      g.group[i - 1] = static_cast<int>(grp - 1);
      g.inst.a[i - 1] = detail::parse_rat_or_die(tok[3], lineno);
      g.inst.b[i - 1] = detail::parse_rat_or_die(tok[4], lineno);
      continue;
    }
    if (tok[0] == "edge") {
      if (tok.size() != 4)
        detail::syntax_error(lineno, "usage: edge <from> <to> <weight>");
      long j = detail::parse_int_or_die(tok[1], lineno);
      long i = detail::parse_int_or_die(tok[2], lineno);
      for (long idx : {j, i})
        if (idx < 1 || idx > g.inst.n)
          throw ValidationError(ErrCode::UnknownAgentRef,
                                "line " + std::to_string(lineno) + ": agent " +
                                    std::to_string(idx) + " out of range 1.." +
                                    std::to_string(g.inst.n));
      if (edge_seen[j - 1][i - 1])
        throw ValidationError(ErrCode::DuplicateEdge,
                              "line " + std::to_string(lineno) + ": edge " +
                                  std::to_string(j) + " -> " +
                                  std::to_string(i) + " declared twice");
      edge_seen[j - 1][i - 1] = true;
      g.inst.T[j - 1][i - 1] = detail::parse_rat_or_die(tok[3], lineno);
      continue;
    }
    detail::syntax_error(lineno, "unknown directive '" + tok[0] + "'");
  }

  if (!saw_header)
    detail::syntax_error(lineno == 0 ? 1 : lineno, "missing 'netprice v1' header");
  if (!saw_agents)
    detail::syntax_error(last_lineno == 0 ? 1 : last_lineno,
                         "missing 'agents <n>' line");
  for (int i = 0; i < g.inst.n; ++i)
    if (!agent_seen[i])
      detail::syntax_error(last_lineno,
                           "agent " + std::to_string(i + 1) + " never declared");

  // Negative influences are representable (the game gadget uses them);
  // structural validity is still enforced here.
  validate_instance(g.inst, /*require_nonneg_influence=*/false);
  validate_grouped(g, /*require_nonneg_influence=*/false);
  return g;
}

// ---------------------------------------------------------------------------
// Canonical instance serialization
// ---------------------------------------------------------------------------
inline std::string serialize_instance(const GroupedInstance& g,
                                      const std::string& comment = "") {
  std::ostringstream out;
  if (!comment.empty()) {
    std::istringstream lines(comment);
    std::string l;
    while (std::getline(lines, l)) out << "# " << l << "\n";
  }
  out << "netprice v1\n";
  out << "agents " << g.inst.n << "\n";
  out << "groups " << g.k << "\n";
  for (int i = 0; i < g.inst.n; ++i)
    out << "agent " << (i + 1) << " " << (g.group[i] + 1) << " "
        << g.inst.a[i].to_string() << " " << g.inst.b[i].to_string() << "\n";
  for (int j = 0; j < g.inst.n; ++j)
    for (int i = 0; i < g.inst.n; ++i)
      if (!g.inst.T[j][i].is_zero())
        out << "edge " << (j + 1) << " " << (i + 1) << " "
            << g.inst.T[j][i].to_string() << "\n";
  return out.str();
}

inline std::string serialize_instance(const Instance& inst,
                                      const std::string& comment = "") {
  return serialize_instance(as_grouped(inst), comment);
}

// ---------------------------------------------------------------------------
// Result serialization
// ---------------------------------------------------------------------------
namespace detail {

inline std::string rat_list(const RatVec& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += v[i].to_string();
  }
  out += "]";
  return out;
}

// Human rendering of c0 + c1 * p, e.g. "2 - 1/2 p", "p", "1".
inline std::string affine_str(const Rat& c0, const Rat& c1) {
  if (c1.is_zero()) return c0.to_string();
  std::string pterm = rat_abs(c1) == Rat(1) ? "p" : rat_abs(c1).to_string() + " p";
  if (c0.is_zero()) return (c1.sign() < 0 ? "-" : "") + pterm;
  return c0.to_string() + (c1.sign() < 0 ? " - " : " + ") + pterm;
}

inline char structure_char(const Rat& c0, const Rat& c1) {
  if (c1.is_zero() && c0.is_zero()) return '0';
  if (c1.is_zero() && c0 == Rat(1)) return '1';
  return '*';
}

inline std::string interval_str(const AffineSegment& seg, Side side) {
  std::string lo = seg.lo ? seg.lo->to_string() : "-inf";
  std::string hi = seg.hi ? seg.hi->to_string() : "inf";
  char open = (side == Side::Pessimistic) ? '[' : '(';
  char close = (side == Side::Pessimistic) ? ')' : ']';
  if (!seg.lo) open = '(';
  if (!seg.hi) close = ')';
  return std::string(1, open) + lo + ", " + hi + std::string(1, close);
}

inline OrderedJson rat_json(const Rat& r) { return OrderedJson(r.to_string()); }

inline OrderedJson ratvec_json(const RatVec& v) {
  OrderedJson arr = OrderedJson::array();
  for (const Rat& r : v) arr.push_back(rat_json(r));
  return arr;
}

}  // namespace detail

inline std::string serialize_probvec(const ProbVec& q, Format fmt = Format::Text) {
  if (fmt == Format::Text) return "q = " + detail::rat_list(q) + "\n";
  OrderedJson doc;
  doc["q"] = detail::ratvec_json(q);
  return doc.dump(2) + "\n";
}

// Accepts the text-mode serialization (optionally with the "q =" prefix) or
// a bare comma/space separated list of rationals.
inline ProbVec parse_probvec(const std::string& text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  for (char c : text) {
    if (c == '[' || c == ']' || c == ',' || c == '=') {
      cleaned += ' ';
    } else {
      cleaned += c;
    }
  }
  std::istringstream iss(cleaned);
  std::string tok;
  ProbVec q;
  while (iss >> tok) {
    if (tok == "q") continue;
    try {
      q.push_back(Rat::parse(tok));
    } catch (const std::exception&) {
      throw ValidationError(ErrCode::SyntaxError,
                            "not a rational in probability vector: '" + tok +
                                "'");
    }
  }
  if (q.empty())
    throw ValidationError(ErrCode::SyntaxError, "empty probability vector");
  return q;
}

inline std::string serialize_equilibrium(const PiecewiseEquilibrium& pwl,
                                         Format fmt = Format::Text) {
  std::vector<AffineSegment> segs = pwl.segments();
  if (fmt == Format::Text) {
    std::ostringstream out;
    out << "equilibrium " << to_string(pwl.side) << " agents=" << pwl.n
        << " segments=" << segs.size() << "\n";
    for (std::size_t s = 0; s < segs.size(); ++s) {
      if (s > 0) {
        // A marker between segments whose one-sided values disagree.
        int brk = static_cast<int>(s) - 1;
        if (pwl.has_jump_at(brk))
          out << "jump at " << pwl.breaks[brk].to_string() << "\n";
      }
      out << "segment " << detail::interval_str(segs[s], pwl.side) << " q = [";
      std::string structure;
      for (int i = 0; i < pwl.n; ++i) {
        if (i) out << ", ";
        out << detail::affine_str(segs[s].map.c0[i], segs[s].map.c1[i]);
        structure += detail::structure_char(segs[s].map.c0[i], segs[s].map.c1[i]);
      }
      out << "] structure = " << structure << "\n";
    }
    return out.str();
  }
  OrderedJson doc;
  doc["side"] = to_string(pwl.side);
  doc["agents"] = pwl.n;
  doc["breakpoints"] = detail::ratvec_json(pwl.breaks);
  OrderedJson jsegs = OrderedJson::array();
  for (const AffineSegment& seg : segs) {
    OrderedJson js;
    js["lo"] = seg.lo ? detail::rat_json(*seg.lo) : OrderedJson(nullptr);
    js["hi"] = seg.hi ? detail::rat_json(*seg.hi) : OrderedJson(nullptr);
    js["c0"] = detail::ratvec_json(seg.map.c0);
    js["c1"] = detail::ratvec_json(seg.map.c1);
    std::string structure;
    for (int i = 0; i < pwl.n; ++i)
      structure += detail::structure_char(seg.map.c0[i], seg.map.c1[i]);
    js["structure"] = structure;
    jsegs.push_back(js);
  }
  doc["segments"] = jsegs;
  OrderedJson jjumps = OrderedJson::array();
  for (std::size_t j = 0; j < pwl.breaks.size(); ++j)
    if (pwl.has_jump_at(static_cast<int>(j)))
      jjumps.push_back(detail::rat_json(pwl.breaks[j]));
  doc["jumps"] = jjumps;
  return doc.dump(2) + "\n";
}

inline std::string serialize_outcome(const PricingOutcome& oc,
                                     Format fmt = Format::Text) {
  if (fmt == Format::Text) {
    std::ostringstream out;
    if (oc.prices.size() == 1) {
      out << "price = " << oc.prices[0].to_string() << "\n";
    } else {
      out << "prices = " << detail::rat_list(oc.prices) << "\n";
    }
    out << "revenue = " << oc.revenue.to_string() << "\n";
    out << (oc.attained ? "attained: yes"
                        : "attained: no (supremum at left limit)")
        << "\n";
    return out.str();
  }
  OrderedJson doc;
  doc["prices"] = detail::ratvec_json(oc.prices);
  doc["revenue"] = detail::rat_json(oc.revenue);
  doc["attained"] = oc.attained;
  return doc.dump(2) + "\n";
}

inline std::string serialize_iteration(const IterationResult& res,
                                       Format fmt = Format::Text) {
  if (fmt == Format::Text) {
    std::ostringstream out;
    out << "q = " << detail::rat_list(res.q) << "\n";
    out << "converged: " << (res.converged ? "yes" : "no") << "\n";
    out << "iterations = " << res.iterations << "\n";
    return out.str();
  }
  OrderedJson doc;
  doc["q"] = detail::ratvec_json(res.q);
  doc["converged"] = res.converged;
  doc["iterations"] = res.iterations;
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Two-player game files
// ---------------------------------------------------------------------------
// Format:
//     bimatrix v1
//     n <n>
//     A <n rationals>     (one line per row)
//     ...
//     B <n rationals>
//     ...
inline BimatrixGame parse_bimatrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  BimatrixGame game;
  int rows_a = 0, rows_b = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string::size_type hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok = detail::split_ws(line);
    if (tok.empty()) continue;
    if (!saw_header) {
      if (tok.size() != 2 || tok[0] != "bimatrix" || tok[1] != "v1")
        detail::syntax_error(lineno, "expected 'bimatrix v1' header");
      saw_header = true;
      continue;
    }
    if (tok[0] == "n") {
      if (tok.size() != 2) detail::syntax_error(lineno, "usage: n <count>");
      long n = detail::parse_int_or_die(tok[1], lineno);
      if (n < 1) detail::syntax_error(lineno, "strategy count must be >= 1");
      game.n = static_cast<int>(n);
      continue;
    }
    if (tok[0] == "A" || tok[0] == "B") {
      if (game.n == 0)
        detail::syntax_error(lineno, "'n <count>' must precede matrix rows");
      if (static_cast<int>(tok.size()) != game.n + 1)
        detail::syntax_error(lineno, "matrix row needs exactly " +
                                         std::to_string(game.n) + " entries");
      RatVec row(game.n);
      for (int c = 0; c < game.n; ++c)
        row[c] = detail::parse_rat_or_die(tok[c + 1], lineno);
      if (tok[0] == "A") {
        game.A.push_back(std::move(row));
        ++rows_a;
      } else {
        game.B.push_back(std::move(row));
        ++rows_b;
      }
      continue;
    }
    detail::syntax_error(lineno, "unknown directive '" + tok[0] + "'");
  }
  if (!saw_header) detail::syntax_error(1, "missing 'bimatrix v1' header");
  if (game.n == 0 || rows_a != game.n || rows_b != game.n)
    throw ValidationError(ErrCode::MalformedGame,
                          "expected n, then n rows of A and n rows of B");
  validate_bimatrix(game);
  return game;
}

}  // namespace netprice
