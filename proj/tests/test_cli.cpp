// End-to-end tests of the command-line binary: subcommand flows, exit
// codes, and byte equality between CLI output and the library calls the
// binary wraps. The binary path arrives in the NETPRICE_BIN environment
// variable (set by the build for ctest runs).

#include <catch2/catch_amalgamated.hpp>

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "netprice/instances.hpp"
#include "netprice/io.hpp"
#include "netprice/pricing.hpp"
#include "netprice/sweep.hpp"
#include "netprice/transfer.hpp"

using namespace netprice;

namespace {

const std::string& bin() {
  static std::string path = [] {
    const char* env = std::getenv("NETPRICE_BIN");
    REQUIRE(env != nullptr);  // set NETPRICE_BIN to the CLI binary
    return std::string(env);
  }();
  return path;
}

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr combined
};

Run run(const std::string& args) {
  Run r;
  std::string cmd = bin() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::filesystem::path& tmpdir() {
  static std::filesystem::path dir = [] {
    std::filesystem::path d = std::filesystem::temp_directory_path() /
                              ("netprice_cli_" + std::to_string(getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string file(const std::string& name, const std::string& text) {
  std::filesystem::path p = tmpdir() / name;
  std::ofstream out(p);
  out << text;
  out.close();
  return p.string();
}

// Two-group version of the mutual-influence pair: one agent per group.
GroupedInstance grouped_jump() {
  GroupedInstance g = as_grouped(gen_jump());
  g.k = 2;
  g.group = {0, 1};
  return g;
}

const std::string& jump_file() {
  static std::string path = file("jump.np", serialize_instance(gen_jump()));
  return path;
}

const std::string& jump2_file() {
  static std::string path = file("jump2.np", serialize_instance(grouped_jump()));
  return path;
}

const std::string& solo_file() {
  static std::string path = file("solo.np",
                                 "netprice v1\n"
                                 "agents 1\n"
                                 "agent 1 1 0 1\n");
  return path;
}

const std::string& pennies_file() {
  static std::string path = file("pennies.game",
                                 "bimatrix v1\n"
                                 "n 2\n"
                                 "A 1 -1\n"
                                 "A -1 1\n"
                                 "B -1 1\n"
                                 "B 1 -1\n");
  return path;
}

}  // namespace

TEST_CASE("gen writes canonical instance files for every family") {
  // Without --out the file goes to stdout.
  Run jump = run("gen --family jump");
  CHECK(jump.code == 0);
  CHECK(jump.out == serialize_instance(gen_jump()));

  std::string c10 = (tmpdir() / "c10.np").string();
  Run cex = run("gen --family counterexample --n 10 --out " + c10);
  REQUIRE(cex.code == 0);
  std::ifstream in(c10);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  GroupedInstance parsed = parse_instance(text);
  Instance expect = gen_counterexample(10);
  CHECK(parsed.inst.a == expect.a);
  CHECK(parsed.inst.b == expect.b);
  CHECK(parsed.inst.T == expect.T);

  Run es = run("gen --family expstruct --n 4");
  REQUIRE(es.code == 0);
  GroupedInstance es_parsed = parse_instance(es.out);
  GroupedInstance es_expect = gen_expstruct(4);
  CHECK(es_parsed.k == 2);
  CHECK(es_parsed.group == es_expect.group);
  CHECK(es_parsed.inst.T == es_expect.inst.T);

  Run rnd = run("gen --family random --n 6 --density 0.7 --seed 42 "
                "--diag-dominant");
  REQUIRE(rnd.code == 0);
  GroupedInstance rnd_parsed = parse_instance(rnd.out);
  Instance rnd_expect = gen_random(6, 0.7, 42, true);
  CHECK(rnd_parsed.inst.a == rnd_expect.a);
  CHECK(rnd_parsed.inst.T == rnd_expect.T);

  Run ppad = run("gen --family ppad --game " + pennies_file() +
                 " --delta 1/100");
  REQUIRE(ppad.code == 0);
  GroupedInstance gadget = parse_instance(ppad.out);
  BimatrixGame mp = parse_bimatrix(
      "bimatrix v1\nn 2\nA 1 -1\nA -1 1\nB -1 1\nB 1 -1\n");
  PpadGadget expect_gg = gen_ppad(mp, Rat(1, 100));
  CHECK(gadget.inst.T == expect_gg.inst.T);
  CHECK(gadget.inst.a == expect_gg.inst.a);
  CHECK(gadget.inst.b == expect_gg.inst.b);

  CHECK(run("gen --family nope").code == 2);
  CHECK(run("gen --family ppad --delta 1/100").code == 2);
  CHECK(run("gen --family counterexample --n 2").code == 2);
  CHECK(run("gen --family expstruct --n 3").code == 2);
}

TEST_CASE("solve prints the piecewise curve, honoring side and offsets") {
  Run pess = run("solve --in " + jump_file());
  CHECK(pess.code == 0);
  CHECK(pess.out == serialize_equilibrium(pessimistic_sweep(gen_jump())));

  Run opt = run("solve --in " + jump_file() + " --side opt");
  CHECK(opt.code == 0);
  CHECK(opt.out == serialize_equilibrium(optimistic_sweep(gen_jump())));

  Run shifted = run("solve --in " + jump2_file() + " --offsets 0,1");
  CHECK(shifted.code == 0);
  CHECK(shifted.out ==
        serialize_equilibrium(pessimistic_sweep(gen_jump(), {Rat(0), Rat(1)})));

  // One offset per group, no more.
  CHECK(run("solve --in " + jump2_file() + " --offsets 0,1,2").code == 2);
  // The game gadget's negative influences are rejected by the sweep.
  Run gadget = run("gen --family ppad --game " + pennies_file() +
                   " --delta 1/100 --out " + (tmpdir() / "gadget.np").string());
  REQUIRE(gadget.code == 0);
  Run reject = run("solve --in " + (tmpdir() / "gadget.np").string());
  CHECK(reject.code == 2);
  CHECK(reject.out.find("error:") != std::string::npos);
}

TEST_CASE("eval returns exact vectors at uniform and per-group prices") {
  CHECK(run("eval --in " + jump_file() + " --price 1").out == "q = [0, 0]\n");
  CHECK(run("eval --in " + jump_file() + " --price 999/1000").out ==
        "q = [1, 1]\n");
  CHECK(run("eval --in " + jump_file() + " --price 2 --side opt").out ==
        "q = [1, 1]\n");

  Run grouped = run("eval --in " + jump2_file() + " --prices 0,2");
  CHECK(grouped.code == 0);
  CHECK(grouped.out == "q = [1, 1]\n");

  // Reading the instance from stdin via '-'.
  Run piped = run("eval --in - --price 1 < " + jump_file());
  CHECK(piped.code == 0);
  CHECK(piped.out == "q = [0, 0]\n");

  Run json = run("--json eval --in " + jump_file() + " --price 1");
  CHECK(json.code == 0);
  auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["q"] == nlohmann::json::array({"0", "0"}));

  CHECK(run("eval --in " + jump_file() + " --price 1 --prices 1,1").code == 2);
  CHECK(run("eval --in " + jump_file()).code == 2);
  CHECK(run("eval --in " + jump2_file() + " --prices 1").code == 2);
  CHECK(run("eval --in " + jump_file() + " --price 1 --side sideways").code ==
        2);
}

TEST_CASE("optimize reports exact optima for the three price families") {
  Run uniform = run("optimize --in " + jump_file() + " --family uniform");
  CHECK(uniform.code == 0);
  CHECK(uniform.out ==
        "price = 1\n"
        "revenue = 2\n"
        "attained: no (supremum at left limit)\n");

  Run solo = run("optimize --in " + solo_file() + " --family uniform");
  CHECK(solo.code == 0);
  CHECK(solo.out ==
        "price = 1/2\n"
        "revenue = 1/4\n"
        "attained: yes\n");

  GroupedInstance j2 = grouped_jump();
  Run shift = run("optimize --in " + jump2_file() + " --family shift --base 0,0");
  CHECK(shift.code == 0);
  CHECK(shift.out == serialize_outcome(optimal_shifted(j2, {Rat(0), Rat(0)})));

  Run scale = run("optimize --in " + jump2_file() +
                  " --family scale --base 1,1");
  CHECK(scale.code == 0);
  CHECK(scale.out == serialize_outcome(optimal_scaled(j2, {Rat(1), Rat(1)})));

  CHECK(run("optimize --in " + jump_file() + " --family uniform --base 1")
            .code == 2);
  CHECK(run("optimize --in " + jump2_file() + " --family shift").code == 2);
  CHECK(run("optimize --in " + jump2_file() + " --family bogus").code == 2);
  CHECK(run("optimize --in " + jump2_file() + " --family shift --base 1")
            .code == 2);
  // Scaling schedules need strictly positive base prices.
  Run zero_base =
      run("optimize --in " + jump2_file() + " --family scale --base 0,1");
  CHECK(zero_base.code == 2);
  CHECK(zero_base.out.find("error:") != std::string::npos);
}

TEST_CASE("fptas prints the approximate optimum with its grid facts") {
  GroupedInstance j2 = grouped_jump();
  FptasInfo info;
  PricingOutcome lib = fptas(j2, Rat(1, 10), &info);

  Run text = run("fptas --in " + jump2_file() + " --eps 1/10");
  CHECK(text.code == 0);
  CHECK(text.out == serialize_outcome(lib) +
                        "upper_bound = " + info.upper_bound.to_string() +
                        "\n" +
                        "grid_per_group = " + std::to_string(info.grid_per_group) +
                        "\n");
  CHECK(text.out.find("upper_bound = 4\n") != std::string::npos);
  CHECK(text.out.find("grid_per_group = 48\n") != std::string::npos);

  Run json = run("--json fptas --in " + jump2_file() + " --eps 1/10");
  CHECK(json.code == 0);
  auto doc = nlohmann::json::parse(json.out);
  CHECK(doc["prices"].size() == 2);
  CHECK(doc["upper_bound"] == "4");
  CHECK(doc["grid_per_group"] == 48);
  CHECK(Rat::parse(doc["revenue"].get<std::string>()) >= Rat(9, 5));

  CHECK(run("fptas --in " + jump2_file() + " --eps 1").code == 2);
  CHECK(run("fptas --in " + jump2_file() + " --eps 0").code == 2);
  CHECK(run("fptas --in " + jump2_file()).code == 2);
}

TEST_CASE("verify checks candidate vectors exactly or within eps") {
  std::string zeros = file("zeros.q", "q = [0, 0]\n");
  std::string half = file("half.q", "q = [1/2, 0]\n");

  Run yes = run("verify --in " + jump_file() + " --price 1 --q " + zeros);
  CHECK(yes.code == 0);
  CHECK(yes.out == "equilibrium: yes\n");

  Run no = run("verify --in " + jump_file() + " --price 1 --q " + half);
  CHECK(no.code == 0);
  CHECK(no.out == "equilibrium: no\n");

  // (1/2, 0) maps to (0, 1): off by 1 in the second coordinate, so it fails
  // at eps = 1/10 but passes at eps = 2.
  Run tight =
      run("verify --in " + jump_file() + " --price 1 --q " + half +
          " --eps 1/10");
  CHECK(tight.code == 0);
  CHECK(tight.out == "approx equilibrium (eps = 1/10): no\n");
  Run loose = run("verify --in " + jump_file() + " --price 1 --q " + half +
                  " --eps 2");
  CHECK(loose.code == 0);
  CHECK(loose.out == "approx equilibrium (eps = 2): yes\n");

  Run grouped =
      run("verify --in " + jump2_file() + " --prices 1,1 --q " + zeros);
  CHECK(grouped.code == 0);
  CHECK(grouped.out == "equilibrium: yes\n");

  Run json =
      run("--json verify --in " + jump_file() + " --price 1 --q " + zeros);
  CHECK(json.code == 0);
  CHECK(nlohmann::json::parse(json.out)["equilibrium"] == true);

  std::string short_q = file("short.q", "q = [0]\n");
  CHECK(run("verify --in " + jump_file() + " --price 1 --q " + short_q).code ==
        2);
  CHECK(run("verify --in " + jump_file() + " --price 1").code == 2);
}

TEST_CASE("oracle output matches the library iteration byte for byte") {
  std::string c4 = file("c4.np", serialize_instance(gen_counterexample(4)));
  Instance inst = gen_counterexample(4);
  PriceAssignment p1 = PriceAssignment::uniform(Rat(1));

  Run brief = run("oracle --in " + c4 + " --price 1 --max-iters 6 --tol 0");
  CHECK(brief.code == 0);
  CHECK(brief.out ==
        serialize_iteration(
            iterate_fixed_point(inst, p1, ProbVec(4, Rat(0)), 6, Rat(0))));

  Run from_one = run("oracle --in " + c4 + " --price 1 --start one");
  CHECK(from_one.code == 0);
  CHECK(from_one.out ==
        serialize_iteration(iterate_fixed_point(
            inst, p1, ProbVec(4, Rat(1)), 10000, Rat(1, 1000000000))));

  Run json =
      run("--json oracle --in " + c4 + " --price 1 --max-iters 6 --tol 0");
  CHECK(json.code == 0);
  CHECK(json.out ==
        serialize_iteration(
            iterate_fixed_point(inst, p1, ProbVec(4, Rat(0)), 6, Rat(0)),
            Format::Json));

  // The iteration accepts the negative-influence gadget the sweep rejects.
  std::string gadget = (tmpdir() / "gadget_oracle.np").string();
  REQUIRE(run("gen --family ppad --game " + pennies_file() +
              " --delta 1/100 --out " + gadget)
              .code == 0);
  Run iter = run("oracle --in " + gadget + " --price 1/2 --max-iters 50");
  CHECK(iter.code == 0);
  CHECK(iter.out.find("q = [") != std::string::npos);

  CHECK(run("oracle --in " + c4 + " --price 1 --start maybe").code == 2);
  CHECK(run("oracle --in " + c4 + " --price 1 --tol x").code == 2);
}

TEST_CASE("exit codes separate user errors from successes") {
  CHECK(run("eval --in " + (tmpdir() / "missing.np").string() + " --price 1")
            .code == 2);
  std::string bad = file("bad.np", "netprice v7\n");
  Run malformed = run("solve --in " + bad);
  CHECK(malformed.code == 2);
  CHECK(malformed.out.find("error:") != std::string::npos);

  CHECK(run("frobnicate --in " + jump_file()).code == 2);
  CHECK(run("").code == 2);           // a subcommand is required
  CHECK(run("solve").code == 2);      // --in is required
  CHECK(run("--help").code == 0);
  CHECK(run("--help").out.find("solve") != std::string::npos);
}
