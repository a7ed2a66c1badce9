#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>

#include "mlc/cli.hpp"
#include "mlc/io.hpp"
#include "mlc/linear.hpp"
#include "oracle_support.hpp"

using namespace mlc;
using namespace mlc::testing;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> const& args) {
  std::ostringstream out;
  std::ostringstream err;
  int const code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

/// Scratch directory removed at scope exit.
struct TempDir {
  std::filesystem::path path;
  TempDir() {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("mlc_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(std::string const& name, std::string const& text = {}) const {
    auto const p = (path / name).string();
    if (!text.empty()) {
      write_text_file(p, text);
    }
    return p;
  }
};

/// Register i of the result holds digit phi[i] (0-based) of the input.
Transformation digit_map(unsigned q, std::vector<unsigned> const& phi) {
  auto const n = static_cast<unsigned>(phi.size());
  Context const ctx(q, n);
  std::vector<StateIndex> image(ctx.size());
  for (StateIndex s = 0; s < ctx.size(); ++s) {
    auto const d = brute_digits(s, q, n);
    std::vector<unsigned> e(n);
    for (unsigned i = 0; i < n; ++i) {
      e[i] = d[phi[i]];
    }
    image[s] = brute_index(e, q);
  }
  return Transformation(ctx, image);
}

std::size_t count_lines(std::string const& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("synth on the swap table") {
  TempDir dir;
  auto const target = dir.file("swap.txt", write_function(digit_map(2, {1, 0})));
  auto const r = run({"synth", target});
  CHECK(r.code == exit_ok);
  CHECK(r.err.find("length 3 <= 2n-1 = 3") != std::string::npos);
  CHECK(r.err.find("verification: passed") != std::string::npos);
  CHECK(count_lines(r.out) == 4);
  auto const p = read_program(r.out);
  CHECK(p.length() == 3);
  CHECK(brute_verify(p, digit_map(2, {1, 0})));
}

TEST_CASE("synth on variable maps") {
  // (1 2)(3 4): registers 1,2 and 3,4 trade values.
  auto const target = digit_map(2, {1, 0, 3, 2});
  auto const vm = run({"synth", "(1 2)(3 4)", "--n", "4", "--method", "varmap"});
  CHECK(vm.code == exit_ok);
  auto const p = read_program(vm.out);
  CHECK(p.length() == 6);
  CHECK(p.memory_cells() == 0);
  CHECK(brute_verify(p, target));

  auto const mem = run({"synth", "(1 2)(3 4)", "--n", "4", "--method", "memory"});
  CHECK(mem.code == exit_ok);
  auto const pm = read_program(mem.out);
  CHECK(pm.length() == 5);
  CHECK(pm.memory_cells() == 1);
  CHECK(mem.out.starts_with("program q=2 n=4 m=1\n"));
  CHECK(brute_verify(pm, target));

  // Auto picks the variable-map synthesizer for cycle notation.
  CHECK(run({"synth", "(1 2)(3 4)", "--n", "4"}).out == vm.out);

  auto const bb = run({"synth", "(1 2)", "--n", "2", "--method", "blackbox"});
  CHECK(bb.code == exit_invalid_input);
  CHECK(bb.err.find("moves alone") != std::string::npos);
  CHECK(bb.out.empty());

  CHECK(run({"synth", "(1 2)", "--method", "varmap"}).code == exit_invalid_input);
}

TEST_CASE("verify: cyclic shift program over three symbols") {
  TempDir dir;
  auto const prog = dir.file("shift.prog",
                             "program q=3 n=3 m=0\n"
                             "lin 1: 1 1 1\n"
                             "lin 3: 1 2 2\n"
                             "lin 2: 1 2 2\n"
                             "lin 1: 1 2 2\n");
  auto const target = dir.file("shift.txt", write_function(digit_map(3, {1, 2, 0})));
  auto const r = run({"verify", prog, target});
  CHECK(r.code == exit_ok);
  CHECK(r.out.starts_with("pass: 4 steps"));
  // The reverse rotation is a different map.
  auto const other = dir.file("back.txt", write_function(digit_map(3, {2, 0, 1})));
  CHECK(run({"verify", prog, other}).code == exit_verification_failed);
  // A variable map target works too.
  CHECK(run({"verify", prog, "2 3 1", "--q", "3"}).code == exit_ok);
}

TEST_CASE("verify: moves-only program for a non-bijective variable map") {
  TempDir dir;
  auto const prog = dir.file("bb.prog");
  auto const s = run({"synth", "2 1 4 3 5 5", "--method", "blackbox", "--out", prog});
  REQUIRE(s.code == exit_ok);
  CHECK(s.out.find("length 7") != std::string::npos);
  auto const target = dir.file("fphi.txt", write_function(digit_map(2, {1, 0, 3, 2, 4, 4})));
  auto const r = run({"verify", prog, target});
  CHECK(r.code == exit_ok);
  CHECK(r.out.starts_with("pass: 7 steps"));
  auto const text = read_text_file(prog);
  CHECK(text.find("lin") == std::string::npos);
  CHECK(text.find("upd") == std::string::npos);
}

TEST_CASE("verify: a truncated program fails with counterexamples") {
  TempDir dir;
  auto const target = dir.file("swap.txt", write_function(digit_map(2, {1, 0})));
  auto const full = run({"synth", target});
  REQUIRE(full.code == exit_ok);
  auto text = full.out;
  text.erase(text.rfind("upd"));
  auto const prog = dir.file("short.prog", text);
  auto const r = run({"verify", prog, target});
  CHECK(r.code == exit_verification_failed);
  CHECK(r.out.find("FAIL") != std::string::npos);
  CHECK(r.out.find("input ") != std::string::npos);

  auto const wide = dir.file("wide.txt", write_function(digit_map(2, {1, 0, 2})));
  CHECK(run({"verify", prog, wide}).code == exit_invalid_input);
}

TEST_CASE("complexity, census and count") {
  TempDir dir;
  auto const target = dir.file("swap.txt", write_function(digit_map(2, {1, 0})));
  auto const c = run({"complexity", target});
  CHECK(c.code == exit_ok);
  CHECK(c.out.starts_with("L = 3\n"));
  auto const cm = run({"complexity", target, "--memory", "1"});
  CHECK(cm.code == exit_ok);
  CHECK(cm.out.starts_with("L(f|1) = 3\n"));

  auto const cen = run({"census", "--q", "2", "--n", "3", "--perm"});
  CHECK(cen.code == exit_ok);
  CHECK(cen.out.find("max 5\n") != std::string::npos);
  CHECK(cen.out.find("total 40320\n") != std::string::npos);
  auto const csv = run({"census", "--q", "2", "--n", "2", "--format", "csv"});
  CHECK(csv.code == exit_ok);
  CHECK(csv.out.starts_with("L,count\n0,1\n"));
  CHECK(run({"census", "--q", "2", "--n", "2", "--linear"}).out.find("max 3") != std::string::npos);

  CHECK(run({"count", "--q", "2", "--n", "2", "--perm"}).out == "7\n");
  CHECK(run({"count", "--q", "2", "--n", "2"}).out == "31\n");
}

TEST_CASE("infeasible requests are refused with exit code 3") {
  std::mt19937_64 rng(9);
  TempDir dir;
  auto const big = dir.file("big.txt", write_function(random_permutation(Context(2, 4), rng)));
  auto const r = run({"complexity", big});
  CHECK(r.code == exit_infeasible);
  CHECK(r.err.find("--max-depth") != std::string::npos);
  auto const bracket = run({"complexity", big, "--max-depth", "2"});
  CHECK(bracket.code == exit_ok);
  CHECK(bracket.out.starts_with("L "));

  auto const cen = run({"census", "--q", "2", "--n", "4", "--perm"});
  CHECK(cen.code == exit_infeasible);
  CHECK(cen.err.find("permutation BFS") != std::string::npos);
}

TEST_CASE("invalid input gives exit code 2") {
  TempDir dir;
  CHECK(run({"synth", "no/such/file.txt"}).code == exit_invalid_input);
  CHECK(run({"synth", "(1 2)"}).code == exit_invalid_input);
  CHECK(run({"bogus"}).code == exit_invalid_input);
  CHECK(run({}).code == exit_invalid_input);
  CHECK(run({"synth", "(1 2)", "--n", "2", "--method", "nope"}).code == exit_invalid_input);
  auto const bad = dir.file("bad.txt", "function q=2 n=2\n0 0\n0 1\n");
  auto const r = run({"synth", bad});
  CHECK(r.code == exit_invalid_input);
  CHECK(r.err.find("line") != std::string::npos);
  auto const perm_on_map = dir.file("const.txt", "function q=2 n=1\n0\n0\n");
  CHECK(run({"synth", perm_on_map, "--method", "perm"}).code == exit_invalid_input);
  CHECK(run({"synth", perm_on_map, "--method", "linear"}).code == exit_invalid_input);
  CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("linear and binary commands write verified programs") {
  TempDir dir;
  std::mt19937_64 rng(10);
  for (unsigned q : {2u, 3u, 4u}) {
    auto const m = random_nonsingular(Field(q), 3, rng);
    auto const mfile = dir.file("m" + std::to_string(q) + ".txt", write_matrix(m));
    auto const r = run({"linear", mfile});
    CHECK(r.code == exit_ok);
    auto const p = read_program(r.out);
    CHECK(p.length() <= 5);
    CHECK(brute_verify(p, linear_transformation(m)));
    CHECK(run({"synth", mfile}).out == r.out);
  }
  auto const m4 = random_nonsingular(Field(2), 4, rng);
  auto const r4 = run({"linear", dir.file("m4.txt", write_matrix(m4)), "--memory", "2"});
  CHECK(r4.code == exit_ok);
  auto const p4 = read_program(r4.out);
  CHECK(p4.length() <= 6);
  CHECK(p4.memory_cells() == 2);
  CHECK(brute_verify(p4, linear_transformation(m4)));

  for (int trial = 0; trial < 10; ++trial) {
    auto const f = random_transformation(Context(2, 3), rng);
    auto const file = dir.file("b.txt", write_function(f));
    auto const r = run({"binary", file});
    CHECK(r.code == exit_ok);
    CHECK(brute_verify(read_program(r.out), f));
  }
}

TEST_CASE("every method writes a verified program, byte-identical across runs") {
  TempDir dir;
  std::mt19937_64 rng(11);
  auto const perm = random_permutation(Context(2, 4), rng);
  auto const map = random_transformation(Context(3, 2), rng);
  auto const pfile = dir.file("perm.txt", write_function(perm));
  auto const mfile = dir.file("map.txt", write_function(map));
  struct Case {
    std::string file;
    Transformation const* f;
    std::string method;
  };
  for (auto const& c : std::vector<Case>{{pfile, &perm, "auto"},
                                         {pfile, &perm, "perm"},
                                         {pfile, &perm, "general"},
                                         {pfile, &perm, "gray"},
                                         {pfile, &perm, "memory"},
                                         {pfile, &perm, "binary"},
                                         {mfile, &map, "auto"},
                                         {mfile, &map, "general"},
                                         {mfile, &map, "gray"},
                                         {mfile, &map, "memory"}}) {
    CAPTURE(c.method);
    auto const out = dir.file("out.prog");
    auto const a = run({"synth", c.file, "--method", c.method, "--out", out});
    REQUIRE(a.code == exit_ok);
    auto const first = read_text_file(out);
    CHECK(brute_verify(read_program(first), *c.f));
    auto const b = run({"synth", c.file, "--method", c.method, "--format", "tables"});
    CHECK(b.code == exit_ok);
    CHECK(brute_verify(read_program(b.out), *c.f));
    CHECK(run({"synth", c.file, "--method", c.method}).out ==
          run({"synth", c.file, "--method", c.method}).out);
    CHECK(run({"synth", c.file, "--method", c.method}).out == first);
  }
}
