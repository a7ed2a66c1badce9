#include "mlc/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace mlc {

namespace {

struct Line {
  std::size_t number = 0;
  std::vector<std::string> words;
};

/// Non-empty lines split on whitespace, comments removed. ':' and '+' become separate words.
std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t number = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t const end = std::min(text.find('\n', pos), text.size());
    std::string raw(text.substr(pos, end - pos));
    pos = end + 1;
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) {
      raw.erase(hash);
    }
    std::string spaced;
    for (char c : raw) {
      if (c == ':' || c == '+') {
        spaced += ' ';
        spaced += c;
        spaced += ' ';
      } else {
        spaced += c;
      }
    }
    std::istringstream in(spaced);
    Line line{number, {}};
    for (std::string w; in >> w;) {
      line.words.push_back(std::move(w));
    }
    if (!line.words.empty()) {
      out.push_back(std::move(line));
    }
  }
  return out;
}

[[noreturn]] void bad(Line const& line, std::string const& what) {
  fail(ErrorKind::invalid_input, "line " + std::to_string(line.number) + ": " + what);
}

std::uint64_t number(Line const& line, std::string const& word) {
  std::uint64_t v = 0;
  auto const [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
  if (ec != std::errc{} || ptr != word.data() + word.size()) {
    bad(line, "expected a number, got '" + word + "'");
  }
  return v;
}

unsigned small_number(Line const& line, std::string const& word) {
  auto const v = number(line, word);
  if (v > 1'000'000) {
    bad(line, "value out of range: " + word);
  }
  return static_cast<unsigned>(v);
}

/// "<kind> key=value ...": the values by key.
std::map<std::string, unsigned> header(Line const& line, std::string_view kind) {
  if (line.words.front() != kind) {
    bad(line, "expected a '" + std::string(kind) + "' header");
  }
  std::map<std::string, unsigned> out;
  for (std::size_t i = 1; i < line.words.size(); ++i) {
    auto const& w = line.words[i];
    auto const eq = w.find('=');
    if (eq == std::string::npos) {
      bad(line, "expected key=value, got '" + w + "'");
    }
    out[w.substr(0, eq)] = small_number(line, w.substr(eq + 1));
  }
  return out;
}

unsigned field(Line const& line, std::map<std::string, unsigned> const& h, std::string const& key,
               std::optional<unsigned> fallback = std::nullopt) {
  if (auto it = h.find(key); it != h.end()) {
    return it->second;
  }
  if (!fallback) {
    bad(line, "header is missing " + key + "=");
  }
  return *fallback;
}

Context header_context(Line const& line, unsigned q, unsigned n) {
  if (q < 2 || n < 1) {
    bad(line, "need q >= 2 and n >= 1");
  }
  return Context(q, n);
}

void join(std::ostringstream& out, auto const& values) {
  bool first = true;
  for (auto v : values) {
    if (!first) {
      out << ' ';
    }
    out << v;
    first = false;
  }
}

/// Register number "<i>" in 1..n.
unsigned register_at(Line const& line, std::size_t word, unsigned n) {
  if (word >= line.words.size()) {
    bad(line, "missing register number");
  }
  auto const i = small_number(line, line.words[word]);
  if (i < 1 || i > n) {
    bad(line, "register " + line.words[word] + " outside 1.." + std::to_string(n));
  }
  return i - 1;
}

Instruction parse_step(Line const& line, Context const& ctx) {
  auto const& w = line.words;
  auto const& op = w.front();
  if (op == "mov") {
    if (w.size() != 3) {
      bad(line, "expected 'mov <i> <j>'");
    }
    return Instruction::move(ctx, register_at(line, 1, ctx.n()), register_at(line, 2, ctx.n()));
  }
  if (op != "upd" && op != "lin") {
    bad(line, "unknown instruction '" + op + "'");
  }
  unsigned const target = register_at(line, 1, ctx.n());
  if (w.size() < 3 || w[2] != ":") {
    bad(line, "expected ':' after the register number");
  }
  std::vector<Symbol> values;
  std::optional<Symbol> constant;
  for (std::size_t k = 3; k < w.size(); ++k) {
    if (w[k] == "+") {
      if (op != "lin" || constant || k + 2 != w.size()) {
        bad(line, "misplaced '+'");
      }
      constant = small_number(line, w[k + 1]);
      break;
    }
    values.push_back(small_number(line, w[k]));
  }
  for (Symbol v : values) {
    if (v >= ctx.q()) {
      bad(line, "symbol " + std::to_string(v) + " outside the alphabet");
    }
  }
  if (constant && *constant >= ctx.q()) {
    bad(line, "constant outside the alphabet");
  }
  if (op == "lin") {
    if (values.size() != ctx.n()) {
      bad(line, "expected " + std::to_string(ctx.n()) + " coefficients");
    }
    return Instruction::linear(ctx, target, std::move(values), constant.value_or(0));
  }
  if (values.size() != ctx.size()) {
    bad(line, "expected " + std::to_string(ctx.size()) + " table values");
  }
  return Instruction::from_table(ctx, target, std::move(values));
}

}  // namespace

std::optional<FileKind> detect_kind(std::string_view text) {
  auto const lines = tokenize(text);
  if (lines.empty()) {
    return std::nullopt;
  }
  auto const& first = lines.front().words.front();
  if (first == "function") {
    return FileKind::function;
  }
  if (first == "program") {
    return FileKind::program;
  }
  if (first == "matrix") {
    return FileKind::matrix;
  }
  return std::nullopt;
}

std::string write_function(Transformation const& f, unsigned memory_cells) {
  Context const& ctx = f.context();
  std::ostringstream out;
  out << "function q=" << ctx.q() << " n=" << ctx.n();
  if (memory_cells > 0) {
    out << " m=" << memory_cells;
  }
  out << '\n';
  for (StateIndex s = 0; s < ctx.size(); ++s) {
    join(out, ctx.digits(f(s)));
    out << '\n';
  }
  return out.str();
}

FunctionFile read_function(std::string_view text) {
  auto const lines = tokenize(text);
  require(!lines.empty(), ErrorKind::invalid_input, "empty function file");
  auto const h = header(lines.front(), "function");
  Context const ctx =
      header_context(lines.front(), field(lines.front(), h, "q"), field(lines.front(), h, "n"));
  std::size_t const size = ctx.table_size();
  if (lines.size() - 1 != size) {
    bad(lines.back(), "expected " + std::to_string(size) + " image lines, found " +
                          std::to_string(lines.size() - 1));
  }
  std::vector<StateIndex> image(size);
  for (std::size_t s = 0; s < size; ++s) {
    auto const& line = lines[s + 1];
    if (line.words.size() != ctx.n()) {
      bad(line, "expected " + std::to_string(ctx.n()) + " digits");
    }
    std::vector<Symbol> digits;
    for (auto const& w : line.words) {
      auto const d = small_number(line, w);
      if (d >= ctx.q()) {
        bad(line, "digit " + w + " outside the alphabet");
      }
      digits.push_back(d);
    }
    image[s] = ctx.index(digits);
  }
  return {Transformation(ctx, std::move(image)), field(lines.front(), h, "m", 0)};
}

std::string write_program(Program const& p, bool tables_only) {
  Context const& ctx = p.context();
  std::ostringstream out;
  out << "program q=" << ctx.q() << " n=" << p.outputs() << " m=" << p.memory_cells() << '\n';
  for (auto const& step : p.steps()) {
    unsigned const i = step.target() + 1;
    if (auto const* mv = step.move_form(); mv && !tables_only) {
      out << "mov " << i << ' ' << mv->source + 1 << '\n';
    } else if (auto const* lin = step.linear_form(); lin && !tables_only) {
      out << "lin " << i << ": ";
      join(out, lin->coeffs);
      if (lin->constant != 0) {
        out << " + " << lin->constant;
      }
      out << '\n';
    } else {
      out << "upd " << i << ": ";
      join(out, step.table());
      out << '\n';
    }
  }
  return out.str();
}

Program read_program(std::string_view text) {
  auto const lines = tokenize(text);
  require(!lines.empty(), ErrorKind::invalid_input, "empty program file");
  auto const& top = lines.front();
  auto const h = header(top, "program");
  unsigned const n = field(top, h, "n");
  unsigned const m = field(top, h, "m", 0);
  Context const ctx = header_context(top, field(top, h, "q"), n + m);
  Program p(ctx, m, StepPolicy::keep_runs);
  for (std::size_t k = 1; k < lines.size(); ++k) {
    try {
      p.push_back(parse_step(lines[k], ctx));
    } catch (Error const& e) {
      if (e.kind() != ErrorKind::invalid_input || std::string_view(e.what()).starts_with("line")) {
        throw;
      }
      bad(lines[k], e.what());
    }
  }
  return p;
}

std::string write_matrix(MatrixGF const& m) {
  require(m.rows() == m.cols(), ErrorKind::invalid_input, "matrix files hold square matrices");
  std::ostringstream out;
  out << "matrix q=" << m.field().q() << " n=" << m.rows() << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    join(out, m.row(r));
    out << '\n';
  }
  return out.str();
}

MatrixGF read_matrix(std::string_view text) {
  auto const lines = tokenize(text);
  require(!lines.empty(), ErrorKind::invalid_input, "empty matrix file");
  auto const& top = lines.front();
  auto const h = header(top, "matrix");
  unsigned const q = field(top, h, "q");
  unsigned const n = field(top, h, "n");
  if (n < 1) {
    bad(top, "need n >= 1");
  }
  Field const gf(q);
  if (lines.size() - 1 != n) {
    bad(lines.back(), "expected " + std::to_string(n) + " rows");
  }
  std::vector<std::vector<Element>> rows;
  for (std::size_t r = 0; r < n; ++r) {
    auto const& line = lines[r + 1];
    if (line.words.size() != n) {
      bad(line, "expected " + std::to_string(n) + " entries");
    }
    std::vector<Element> row;
    for (auto const& w : line.words) {
      auto const v = small_number(line, w);
      if (v >= q) {
        bad(line, "entry " + w + " outside GF(" + std::to_string(q) + ")");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return MatrixGF(gf, rows);
}

std::string read_text_file(std::string const& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::invalid_input, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(std::string const& path, std::string const& text) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::invalid_input, "cannot write " + path);
  out << text;
  require(out.good(), ErrorKind::invalid_input, "write failed: " + path);
}

}  // namespace mlc
