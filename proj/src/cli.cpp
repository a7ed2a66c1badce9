#include "mlc/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <optional>
#include <sstream>

#include "mlc/io.hpp"
#include "mlc/linear.hpp"
#include "mlc/memory.hpp"
#include "mlc/oracle.hpp"
#include "mlc/synth_general.hpp"
#include "mlc/varmap.hpp"

namespace mlc {

namespace {

/// A synthesis target as given on the command line.
struct Input {
  enum class Kind { table, matrix, varmap };
  Kind kind = Kind::table;
  std::optional<Transformation> table;
  std::optional<MatrixGF> matrix;
  std::optional<VarMap> varmap;
  unsigned q = 2;

  /// The map on A^n, tabulated.
  Transformation transformation() const {
    switch (kind) {
      case Kind::table:
        return *table;
      case Kind::matrix:
        return linear_transformation(*matrix);
      case Kind::varmap:
        return varmap->transformation(Context(q, varmap->n()));
    }
    fail(ErrorKind::invalid_input, "unknown input kind");
  }
};

bool looks_like_varmap(std::string const& text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), [](char c) {
           return std::isdigit(static_cast<unsigned char>(c)) || std::isspace(static_cast<unsigned char>(c)) ||
                  c == '(' || c == ')' || c == ',';
         });
}

/// A function or matrix file, or a variable map in cycle or image notation.
Input load_input(std::string const& arg, std::optional<unsigned> q, std::optional<unsigned> n) {
  Input in;
  std::error_code ec;
  if (std::filesystem::is_regular_file(arg, ec)) {
    auto const text = read_text_file(arg);
    auto const kind = detect_kind(text);
    if (kind == FileKind::function) {
      in.kind = Input::Kind::table;
      in.table = read_function(text).f;
      in.q = in.table->context().q();
    } else if (kind == FileKind::matrix) {
      in.kind = Input::Kind::matrix;
      in.matrix = read_matrix(text);
      in.q = in.matrix->field().q();
    } else {
      fail(ErrorKind::invalid_input, arg + ": expected a function or matrix file");
    }
    require(!q || *q == in.q, ErrorKind::invalid_input, "--q disagrees with " + arg);
    unsigned const file_n = in.table ? in.table->context().n() : static_cast<unsigned>(in.matrix->rows());
    require(!n || *n == file_n, ErrorKind::invalid_input, "--n disagrees with " + arg);
    return in;
  }
  require(looks_like_varmap(arg), ErrorKind::invalid_input,
          "no such file, and not a variable map: " + arg);
  bool const cycles = arg.find('(') != std::string::npos;
  require(!cycles || n.has_value(), ErrorKind::invalid_input, "cycle notation needs --n");
  in.kind = Input::Kind::varmap;
  in.varmap = VarMap::parse(arg, n);
  require(!n || *n == in.varmap->n(), ErrorKind::invalid_input, "--n disagrees with the map");
  in.q = q.value_or(2);
  require(in.q >= 2, ErrorKind::invalid_input, "need q >= 2");
  return in;
}

std::string join_digits(std::vector<Symbol> const& d) {
  std::ostringstream out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    out << (i ? " " : "") << d[i];
  }
  return out.str();
}

struct Synthesis {
  Program program;
  std::string method;
  /// "<= 2n-1 = 3" style text, empty when no bound is stated.
  std::string bound;
  std::optional<LinearProgram> linear;
};

std::string formula(std::string const& name, std::size_t value, std::string const& rel = "<=") {
  return rel + " " + name + " = " + std::to_string(value);
}

Synthesis synthesize(Input const& in, std::string method, unsigned memory) {
  using Kind = Input::Kind;
  if (method == "auto") {
    if (memory > 0) {
      method = "memory";
    } else if (in.kind == Kind::varmap) {
      method = "varmap";
    } else if (in.kind == Kind::matrix) {
      method = "linear";
    } else {
      method = in.table->is_permutation() ? "perm" : "general";
    }
  }
  require(memory == 0 || method == "memory" || method == "linear", ErrorKind::invalid_input,
          "method " + method + " does not use scratch cells; use --method memory");

  if (method == "varmap" || method == "blackbox") {
    require(in.kind == Kind::varmap, ErrorKind::invalid_input,
            "method " + method + " needs a variable map such as \"(1 2)(3 4)\"");
    auto const& v = *in.varmap;
    unsigned const n = v.n();
    if (method == "varmap") {
      return {synth_varmap(v, in.q), method, "(optimal)", {}};
    }
    if (v.is_permutation() && !v.is_identity()) {
      fail(ErrorKind::not_computable_blackbox,
           "a non-identity permutation of variables cannot be computed by moves alone: "
           "the first move overwrites a value that is still needed and nothing else holds it "
           "(use --method varmap or --method memory)");
    }
    auto const an = analyze(v);
    return {synth_varmap_blackbox(v, in.q), method,
            formula("n-F+D", n - an.fixed_count() + an.detached_count(), "="), {}};
  }

  if (method == "linear") {
    require(in.kind == Kind::matrix, ErrorKind::invalid_input,
            "method linear needs a matrix file");
    require(in.matrix->is_nonsingular(), ErrorKind::invalid_input,
            "method linear needs a nonsingular matrix");
    unsigned const n = static_cast<unsigned>(in.matrix->rows());
    if (memory > 0) {
      auto lp = synth_linear_memory(*in.matrix);
      std::string bound = n % 2 == 0 ? formula("3n/2", 3 * n / 2) : "";
      return {to_program(lp), "linear-memory", bound, lp};
    }
    auto lp = synth_linear(*in.matrix);
    return {to_program(lp), method, formula("2n-1", 2 * n - 1), lp};
  }

  if (method == "memory") {
    if (in.kind == Kind::varmap) {
      auto const an = analyze(*in.varmap);
      return {synth_varmap_mem(*in.varmap, in.q), method,
              formula("n-F+1", in.varmap->n() - an.fixed_count() + 1), {}};
    }
    if (in.kind == Kind::matrix && in.matrix->is_nonsingular()) {
      unsigned const n = static_cast<unsigned>(in.matrix->rows());
      auto lp = synth_linear_memory(*in.matrix);
      std::string bound = n % 2 == 0 ? formula("3n/2", 3 * n / 2) : "";
      return {to_program(lp), "linear-memory", bound, lp};
    }
    auto const f = in.transformation();
    unsigned const n = f.context().n();
    if (f.is_permutation() && n % 2 == 0) {
      return {synth_perm_mem(f), method, formula("3n/2", 3 * n / 2), {}};
    }
    return {synth_any_mem(f), method, formula("2n-1", 2 * n - 1), {}};
  }

  auto const f = in.transformation();
  unsigned const n = f.context().n();
  if (method == "perm") {
    require(f.is_permutation(), ErrorKind::invalid_input,
            "method perm needs a bijective table; use --method general");
    return {synth_permutation(f), method, formula("2n-1", 2 * n - 1), {}};
  }
  if (method == "general") {
    return {synth_transformation(f), method, formula("4n-3", 4 * n - 3), {}};
  }
  if (method == "gray") {
    return {synth_generator_factorization(f), method, "", {}};
  }
  if (method == "binary") {
    require(f.context().q() == 2, ErrorKind::invalid_input, "method binary needs q = 2");
    return {synth_binary(f), method, "", {}};
  }
  fail(ErrorKind::invalid_input, "unknown method " + method);
}

/// Exhaustive check of a synthesized program against its input.
bool check(Input const& in, Synthesis const& s, std::string& how) {
  if (in.kind == Input::Kind::varmap) {
    how = "variable-map check";
    return verify_varmap(s.program, *in.varmap);
  }
  if (s.linear) {
    bool ok = verify_linear(*s.linear, *in.matrix);
    how = "matrix product";
    if (s.program.context().size() <= (StateIndex{1} << 20)) {
      ok = ok && verify(s.program, linear_transformation(*in.matrix));
      how += " and exhaustive";
    }
    return ok;
  }
  how = "exhaustive";
  return verify(s.program, in.transformation());
}

int cmd_synth(std::string const& input, std::optional<unsigned> q, std::optional<unsigned> n,
              unsigned memory, std::string const& method, std::string const& out_path,
              std::string const& format, std::ostream& out, std::ostream& err) {
  auto const in = load_input(input, q, n);
  auto const s = synthesize(in, method, memory);
  std::string how;
  bool const ok = check(in, s, how);
  std::ostream& report = out_path.empty() ? err : out;
  report << "method: " << s.method << '\n';
  report << "length " << s.program.length() << (s.bound.empty() ? "" : " " + s.bound) << '\n';
  report << "memory cells: " << s.program.memory_cells() << '\n';
  report << "verification: " << (ok ? "passed" : "FAILED") << " (" << how << ")\n";
  if (!ok) {
    return exit_verification_failed;
  }
  auto const text = write_program(s.program, format == "tables");
  if (out_path.empty()) {
    out << text;
  } else {
    write_text_file(out_path, text);
    report << "wrote " << out_path << '\n';
  }
  return exit_ok;
}

int cmd_verify(std::string const& program_path, std::string const& target,
               std::optional<unsigned> q, std::optional<unsigned> n, std::ostream& out) {
  auto const p = read_program(read_text_file(program_path));
  auto const in = load_input(target, q ? q : std::optional(p.context().q()),
                             n ? n : std::optional(p.outputs()));
  auto const f = in.transformation();
  Context const& ctx = f.context();
  require(ctx.q() == p.context().q() && ctx.n() == p.outputs(), ErrorKind::invalid_input,
          "program works on q=" + std::to_string(p.context().q()) + " n=" +
              std::to_string(p.outputs()) + " but the target has q=" + std::to_string(ctx.q()) +
              " n=" + std::to_string(ctx.n()));
  auto const bad = counterexamples(p, f, 10);
  if (bad.empty()) {
    out << "pass: " << p.length() << " steps, " << p.memory_cells() << " memory cells, all "
        << p.context().size() << " register states checked\n";
    return exit_ok;
  }
  out << "FAIL: counterexamples (at most 10 shown)\n";
  for (StateIndex s : bad) {
    out << "  input " << join_digits(ctx.digits(s)) << ": expected " << join_digits(ctx.digits(f(s)))
        << ", got " << join_digits(ctx.digits(eval_program(p, s) % ctx.size()))
        << " with zero scratch\n";
  }
  return exit_verification_failed;
}

std::uint64_t capped_power(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (r > cap / base) {
      return cap + 1;
    }
    r *= base;
  }
  return r;
}

/// Exact search finishes quickly without a depth cap.
bool exact_is_cheap(Transformation const& f, unsigned memory) {
  StateIndex const size = f.context().size();
  if (memory > 0) {
    return capped_power(f.context().q(), f.context().n() + memory, 8) <= 8;
  }
  if (f.is_permutation()) {
    std::uint64_t fact = 1;
    for (StateIndex k = 2; k <= size && fact <= 1'000'000; ++k) {
      fact *= k;
    }
    return fact <= 1'000'000;
  }
  return capped_power(size, size, 1u << 20) <= (1u << 20);
}

void feasibility_table(std::ostream& err) {
  err << "exact search without --max-depth is limited to:\n"
         "  permutations      q^n <= 9            (permutation BFS, at most 10^6 maps)\n"
         "  other maps        (q^n)^(q^n) <= 2^20 (monoid BFS)\n"
         "  with --memory m   q^(n+m) <= 8\n"
         "  censuses          10^6 permutations, 2^20 maps, 10^6 matrices\n"
         "pass --max-depth to run a bounded search and report a bracket\n";
}

int cmd_complexity(std::string const& target, std::optional<unsigned> q, std::optional<unsigned> n,
                   unsigned memory, std::optional<unsigned> max_depth, std::ostream& out,
                   std::ostream& err) {
  auto const f = load_input(target, q, n).transformation();
  if (!max_depth && !exact_is_cheap(f, memory)) {
    err << "refused: exact complexity is too expensive for this size\n";
    feasibility_table(err);
    return exit_infeasible;
  }
  SearchLimits limits;
  if (max_depth) {
    limits.max_depth = *max_depth;
  }
  auto const r = memory == 0 ? exact_complexity(f, limits) : memory_complexity(f, memory, limits);
  std::string const name = memory == 0 ? "L" : "L(f|" + std::to_string(memory) + ")";
  if (r.exact) {
    out << name << " = " << *r.exact << '\n';
  } else {
    out << name << " in [" << r.lower << ", " << r.upper << "]\n";
  }
  out << "method: " << r.method << '\n';
  out << "explored: " << r.explored << '\n';
  return exit_ok;
}

int cmd_census(unsigned q, unsigned n, bool perm, bool linear, std::string const& format,
               std::ostream& out) {
  auto const h = linear ? linear_census(q, n) : census(q, n, perm);
  if (format == "csv") {
    out << "L,count\n";
    for (auto [d, c] : h) {
      out << d << ',' << c << '\n';
    }
    return exit_ok;
  }
  std::uint64_t total = 0;
  for (auto [d, c] : h) {
    out << "L = " << d << ": " << c << '\n';
    total += c;
  }
  out << "total " << total << '\n';
  out << "max " << histogram_max(h) << '\n';
  return exit_ok;
}

int cmd_count(unsigned q, unsigned n, bool perm, bool linear, std::ostream& out) {
  if (linear) {
    out << linear_generator_count(q, n) << '\n';
  } else {
    out << count_instructions(q, n, perm ? InstructionKind::permutation : InstructionKind::all)
        << '\n';
  }
  return exit_ok;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::infeasible ? exit_infeasible : exit_invalid_input;
}

}  // namespace

int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Synthesize and check in-place register programs"};
  app.require_subcommand(1);

  std::string input;
  std::string second;
  std::optional<unsigned> q;
  std::optional<unsigned> n;
  unsigned memory = 0;
  std::string method = "auto";
  std::optional<unsigned> max_depth;
  std::string out_path;
  std::string format;
  bool perm = false;
  bool linear = false;

  auto add_shape = [&](CLI::App* cmd) {
    cmd->add_option("--q", q, "Alphabet size")->check(CLI::Range(2u, 1u << 16));
    cmd->add_option("--n", n, "Register count")->check(CLI::Range(1u, 64u));
  };
  auto const methods = std::vector<std::string>{"auto",    "perm",     "general",
                                                "gray",    "varmap",   "blackbox",
                                                "linear",  "memory",   "binary"};

  auto* synth = app.add_subcommand("synth", "Write a verified program for a target");
  synth->add_option("input", input, "Function file, matrix file, or variable map")->required();
  add_shape(synth);
  synth->add_option("--memory", memory, "Scratch cells (selects a memory method)");
  synth->add_option("--method", method, "Synthesizer")->check(CLI::IsMember(methods));
  synth->add_option("--out", out_path, "Program file to write");
  synth->add_option("--format", format, "program (short forms) or tables")
      ->check(CLI::IsMember({"program", "tables"}));

  auto* lin = app.add_subcommand("linear", "Synthesize from a matrix file");
  lin->add_option("input", input, "Matrix file")->required();
  lin->add_option("--memory", memory, "Use scratch cells when nonzero");
  lin->add_option("--out", out_path, "Program file to write");
  lin->add_option("--format", format)->check(CLI::IsMember({"program", "tables"}));

  auto* bin = app.add_subcommand("binary", "Synthesize from binary instructions only");
  bin->add_option("input", input, "Function file over q = 2")->required();
  bin->add_option("--out", out_path, "Program file to write");
  bin->add_option("--format", format)->check(CLI::IsMember({"program", "tables"}));

  auto* ver = app.add_subcommand("verify", "Check a program against a target");
  ver->add_option("program", input, "Program file")->required();
  ver->add_option("target", second, "Function file, matrix file, or variable map")->required();
  add_shape(ver);

  auto* cx = app.add_subcommand("complexity", "Exact L(f), or a bracket");
  cx->add_option("input", input, "Function file, matrix file, or variable map")->required();
  add_shape(cx);
  cx->add_option("--memory", memory, "Scratch cells");
  cx->add_option("--max-depth", max_depth, "Depth cap for large searches");

  auto* cen = app.add_subcommand("census", "Distribution of L over all maps of a kind");
  cen->add_option("--q", q)->required()->check(CLI::Range(2u, 1u << 16));
  cen->add_option("--n", n)->required()->check(CLI::Range(1u, 64u));
  cen->add_flag("--perm", perm, "Permutations only");
  cen->add_flag("--linear", linear, "GL(n, q) under linear instructions");
  cen->add_option("--format", format, "text or csv")->check(CLI::IsMember({"text", "csv"}));

  auto* cnt = app.add_subcommand("count", "Number of distinct instructions");
  cnt->add_option("--q", q)->required()->check(CLI::Range(2u, 1u << 16));
  cnt->add_option("--n", n)->required()->check(CLI::Range(1u, 64u));
  cnt->add_flag("--perm", perm, "Permutation instructions only");
  cnt->add_flag("--linear", linear, "Invertible linear instructions");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (CLI::ParseError const& e) {
    int const code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_invalid_input;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(input, q, n, memory, method, out_path, format, out, err);
    }
    if (lin->parsed()) {
      return cmd_synth(input, std::nullopt, std::nullopt, memory, "linear", out_path, format, out,
                       err);
    }
    if (bin->parsed()) {
      return cmd_synth(input, std::nullopt, std::nullopt, 0, "binary", out_path, format, out, err);
    }
    if (ver->parsed()) {
      return cmd_verify(input, second, q, n, out);
    }
    if (cx->parsed()) {
      return cmd_complexity(input, q, n, memory, max_depth, out, err);
    }
    if (cen->parsed()) {
      require(!(perm && linear), ErrorKind::invalid_input, "choose --perm or --linear");
      return cmd_census(*q, *n, perm, linear, format, out);
    }
    if (cnt->parsed()) {
      require(!(perm && linear), ErrorKind::invalid_input, "choose --perm or --linear");
      return cmd_count(*q, *n, perm, linear, out);
    }
  } catch (Error const& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    if (e.kind() == ErrorKind::infeasible) {
      feasibility_table(err);
    }
    return exit_code_for(e.kind());
  }
  return exit_invalid_input;
}

}  // namespace mlc
