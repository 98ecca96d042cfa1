// netprice: exact equilibria and revenue optimization for social-network
// pricing instances, from the command line.
//
//   solve     piecewise-linear equilibrium as a function of price
//   eval      equilibrium vector at one price (or per-group price vector)
//   optimize  exact optimum for the uniform / shifted / scaled families
//   fptas     (1-eps)-approximate per-group prices on a geometric grid
//   verify    check a candidate vector (exactly, or within eps)
//   oracle    plain fixed-point iteration, exact rational arithmetic
//   gen       built-in instance families
//
// Exit codes: 0 success, 2 invalid input or validation failure, 3 internal
// invariant violation (a bug in the solver, not in the input).

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "netprice/errors.hpp"
#include "netprice/instance.hpp"
#include "netprice/instances.hpp"
#include "netprice/io.hpp"
#include "netprice/pricing.hpp"
#include "netprice/sweep.hpp"
#include "netprice/transfer.hpp"

namespace {

using namespace netprice;

std::string read_input(const std::string& path) {
  if (path == "-") {
    std::ostringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << text;
}

RatVec parse_rat_list(const std::string& csv, const char* what) {
  RatVec out;
  std::string tok;
  std::istringstream iss(csv);
  while (std::getline(iss, tok, ',')) {
    // trim whitespace
    std::size_t b = tok.find_first_not_of(" \t");
    std::size_t e = tok.find_last_not_of(" \t");
    if (b == std::string::npos)
      throw std::invalid_argument(std::string("empty entry in ") + what);
    out.push_back(Rat::parse(tok.substr(b, e - b + 1)));
  }
  if (out.empty())
    throw std::invalid_argument(std::string("empty list for ") + what);
  return out;
}

// Group price vector -> per-agent price assignment.
RatVec agent_prices(const GroupedInstance& g, const RatVec& group_prices) {
  if (static_cast<int>(group_prices.size()) != g.k)
    throw std::invalid_argument("expected exactly " + std::to_string(g.k) +
                                " group prices, got " +
                                std::to_string(group_prices.size()));
  RatVec out(g.inst.n);
  for (int i = 0; i < g.inst.n; ++i) out[i] = group_prices[g.group[i]];
  return out;
}

// Resolve the --price / --prices pair into one per-group vector.
RatVec resolve_prices(const GroupedInstance& g, const std::string& price,
                      const std::string& prices) {
  if (price.empty() == prices.empty())
    throw std::invalid_argument("give exactly one of --price or --prices");
  if (!price.empty()) return RatVec(g.k, Rat::parse(price));
  return parse_rat_list(prices, "--prices");
}

Side parse_side(const std::string& s) {
  if (s == "pess" || s == "pessimistic") return Side::Pessimistic;
  if (s == "opt" || s == "optimistic") return Side::Optimistic;
  throw std::invalid_argument("side must be 'pess' or 'opt'");
}

struct Options {
  bool json = false;
  std::string in;
  std::string side = "pess";
  std::string offsets;
  std::string price, prices;
  std::string family;
  std::string base;
  std::string eps;
  std::string qfile;
  std::string start = "zero";
  long max_iters = 10000;
  std::string tol = "1/1000000000";
  int n = 4;
  double density = 0.5;
  std::uint64_t seed = 1;
  bool diag_dominant = false;
  std::string delta = "1/100";
  std::string game;
  std::string out;
};

Format fmt_of(const Options& o) { return o.json ? Format::Json : Format::Text; }

int cmd_solve(const Options& o) {
  GroupedInstance g = parse_instance(read_input(o.in));
  RatVec delta;
  if (!o.offsets.empty()) {
    RatVec group_offsets = parse_rat_list(o.offsets, "--offsets");
    if (static_cast<int>(group_offsets.size()) != g.k)
      throw std::invalid_argument("expected exactly " + std::to_string(g.k) +
                                  " group offsets");
    delta = agent_prices(g, group_offsets);
  }
  PiecewiseEquilibrium pwl = parse_side(o.side) == Side::Pessimistic
                                 ? pessimistic_sweep(g.inst, delta)
                                 : optimistic_sweep(g.inst, delta);
  std::cout << serialize_equilibrium(pwl, fmt_of(o));
  return 0;
}

int cmd_eval(const Options& o) {
  GroupedInstance g = parse_instance(read_input(o.in));
  RatVec group_prices = resolve_prices(g, o.price, o.prices);
  ProbVec q = equilibrium_at_price_vector(g, group_prices, parse_side(o.side));
  std::cout << serialize_probvec(q, fmt_of(o));
  return 0;
}

int cmd_optimize(const Options& o) {
  GroupedInstance g = parse_instance(read_input(o.in));
  PricingOutcome oc;
  if (o.family == "uniform") {
    if (!o.base.empty())
      throw std::invalid_argument("--base applies only to shift/scale");
    oc = optimal_uniform_price(pessimistic_sweep(g.inst));
  } else if (o.family == "shift" || o.family == "scale") {
    if (o.base.empty())
      throw std::invalid_argument("--family " + o.family + " requires --base");
    RatVec base = parse_rat_list(o.base, "--base");
    if (static_cast<int>(base.size()) != g.k)
      throw std::invalid_argument("expected exactly " + std::to_string(g.k) +
                                  " base prices");
    oc = (o.family == "shift") ? optimal_shifted(g, base)
                               : optimal_scaled(g, base);
  } else {
    throw std::invalid_argument("family must be uniform, shift, or scale");
  }
  std::cout << serialize_outcome(oc, fmt_of(o));
  return 0;
}

int cmd_fptas(const Options& o) {
  GroupedInstance g = parse_instance(read_input(o.in));
  if (o.eps.empty()) throw std::invalid_argument("fptas requires --eps");
  FptasInfo info;
  PricingOutcome oc = fptas(g, Rat::parse(o.eps), &info);
  if (fmt_of(o) == Format::Text) {
    std::cout << serialize_outcome(oc, Format::Text);
    std::cout << "upper_bound = " << info.upper_bound.to_string() << "\n";
    std::cout << "grid_per_group = " << info.grid_per_group << "\n";
  } else {
    OrderedJson doc;
    doc["prices"] = OrderedJson::array();
    for (const Rat& p : oc.prices) doc["prices"].push_back(p.to_string());
    doc["revenue"] = oc.revenue.to_string();
    doc["attained"] = oc.attained;
    doc["upper_bound"] = info.upper_bound.to_string();
    doc["grid_per_group"] = info.grid_per_group;
    std::cout << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_verify(const Options& o) {
  GroupedInstance g = parse_instance(read_input(o.in));
  RatVec group_prices = resolve_prices(g, o.price, o.prices);
  PriceAssignment pa = PriceAssignment::per_agent(agent_prices(g, group_prices));
  if (o.qfile.empty()) throw std::invalid_argument("verify requires --q FILE");
  ProbVec q = parse_probvec(read_input(o.qfile));
  if (static_cast<int>(q.size()) != g.inst.n)
    throw std::invalid_argument("candidate vector has " +
                                std::to_string(q.size()) + " entries, expected " +
                                std::to_string(g.inst.n));
  bool ok;
  if (o.eps.empty()) {
    ok = is_equilibrium_exact(g.inst, pa, q);
  } else {
    ok = is_eps_approx_equilibrium(g.inst, pa, q, Rat::parse(o.eps));
  }
  if (fmt_of(o) == Format::Text) {
    if (o.eps.empty()) {
      std::cout << "equilibrium: " << (ok ? "yes" : "no") << "\n";
    } else {
      std::cout << "approx equilibrium (eps = " << o.eps
                << "): " << (ok ? "yes" : "no") << "\n";
    }
  } else {
    OrderedJson doc;
    doc["equilibrium"] = ok;
    if (!o.eps.empty()) doc["eps"] = o.eps;
    std::cout << doc.dump(2) << "\n";
  }
  return 0;
}

int cmd_oracle(const Options& o) {
  GroupedInstance g = parse_instance(read_input(o.in));
  RatVec group_prices = resolve_prices(g, o.price, o.prices);
  PriceAssignment pa = PriceAssignment::per_agent(agent_prices(g, group_prices));
  ProbVec start(g.inst.n, Rat(0));
  if (o.start == "one") {
    start.assign(g.inst.n, Rat(1));
  } else if (o.start != "zero") {
    throw std::invalid_argument("--start must be 'zero' or 'one'");
  }
  IterationResult res =
      iterate_fixed_point(g.inst, pa, start, o.max_iters, Rat::parse(o.tol));
  std::cout << serialize_iteration(res, fmt_of(o));
  return 0;
}

int cmd_gen(const Options& o) {
  std::string text;
  if (o.family == "counterexample") {
    text = serialize_instance(gen_counterexample(o.n));
  } else if (o.family == "jump") {
    text = serialize_instance(gen_jump());
  } else if (o.family == "expstruct") {
    text = serialize_instance(gen_expstruct(o.n));
  } else if (o.family == "random") {
    text = serialize_instance(
        gen_random(o.n, o.density, o.seed, o.diag_dominant));
  } else if (o.family == "ppad") {
    if (o.game.empty())
      throw std::invalid_argument("--family ppad requires --game FILE");
    BimatrixGame game = parse_bimatrix(read_input(o.game));
    PpadGadget gg = gen_ppad(game, Rat::parse(o.delta));
    std::ostringstream note;
    note << "price gadget for a " << game.n << "x" << game.n
         << " two-player game at price 1/2, delta = "
         << gg.roles.delta.to_string() << "\n";
    note << "agent layout (1-based, i,j in 1.." << game.n << "):\n";
    note << "  X_i = i; Y_i = n+i; U_{i,j} = 2n+(i-1)n+j; "
            "V_{i,j} = 2n+n^2+(i-1)n+j";
    text = serialize_instance(gg.inst, note.str());
  } else {
    throw std::invalid_argument(
        "family must be counterexample, jump, expstruct, random, or ppad");
  }
  write_output(o.out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  CLI::App app{
      "exact equilibria and revenue optimization for social-network pricing"};
  app.require_subcommand(1);
  app.add_flag("--json", o.json, "machine-readable JSON output");

  auto add_in = [&](CLI::App* cmd) {
    cmd->add_option("--in", o.in, "instance file ('-' for stdin)")->required();
  };
  auto add_side = [&](CLI::App* cmd) {
    cmd->add_option("--side", o.side, "pess (default) or opt");
  };
  auto add_price = [&](CLI::App* cmd) {
    cmd->add_option("--price", o.price, "one price shared by every group");
    cmd->add_option("--prices", o.prices, "comma-separated per-group prices");
  };

  CLI::App* solve = app.add_subcommand("solve", "equilibrium as a function of price");
  add_in(solve);
  add_side(solve);
  solve->add_option("--offsets", o.offsets,
                    "comma-separated per-group price offsets");

  CLI::App* eval = app.add_subcommand("eval", "equilibrium at a price");
  add_in(eval);
  add_side(eval);
  add_price(eval);

  CLI::App* optimize = app.add_subcommand("optimize", "exact optimal pricing");
  add_in(optimize);
  optimize->add_option("--family", o.family, "uniform | shift | scale")
      ->required();
  optimize->add_option("--base", o.base, "comma-separated per-group base prices");

  CLI::App* fp = app.add_subcommand("fptas", "approximate per-group pricing");
  add_in(fp);
  fp->add_option("--eps", o.eps, "accuracy parameter in (0, 1)")->required();

  CLI::App* verify = app.add_subcommand("verify", "check a candidate vector");
  add_in(verify);
  add_price(verify);
  verify->add_option("--q", o.qfile, "file holding the candidate vector")
      ->required();
  verify->add_option("--eps", o.eps, "accept within eps instead of exactly");

  CLI::App* oracle = app.add_subcommand("oracle", "fixed-point iteration");
  add_in(oracle);
  add_price(oracle);
  oracle->add_option("--start", o.start, "zero (default) or one");
  oracle->add_option("--max-iters", o.max_iters, "iteration budget");
  oracle->add_option("--tol", o.tol, "stopping tolerance (0 = exact)");

  CLI::App* gen = app.add_subcommand("gen", "built-in instance families");
  gen->add_option("--family", o.family,
                  "counterexample | jump | expstruct | random | ppad")
      ->required();
  gen->add_option("--n", o.n, "agent count (family dependent)");
  gen->add_option("--density", o.density, "edge density in [0,1] (random)");
  gen->add_option("--seed", o.seed, "random seed");
  gen->add_flag("--diag-dominant", o.diag_dominant,
                "rescale to strict diagonal dominance (random)");
  gen->add_option("--delta", o.delta, "gadget delta in (0, 1/2) (ppad)");
  gen->add_option("--game", o.game, "two-player game file (ppad)");
  gen->add_option("--out", o.out, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) return cmd_solve(o);
    if (eval->parsed()) return cmd_eval(o);
    if (optimize->parsed()) return cmd_optimize(o);
    if (fp->parsed()) return cmd_fptas(o);
    if (verify->parsed()) return cmd_verify(o);
    if (oracle->parsed()) return cmd_oracle(o);
    if (gen->parsed()) return cmd_gen(o);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const InternalInvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const SingularMatrixError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    // Bad flags, malformed numbers, wrong list lengths: caller errors.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
