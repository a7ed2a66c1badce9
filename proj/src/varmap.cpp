#include "mlc/varmap.hpp"

#include <algorithm>
#include <cctype>
#include <queue>
#include <sstream>

namespace mlc {

namespace {

std::vector<unsigned> read_numbers(std::string_view text) {
  std::vector<unsigned> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (std::isdigit(static_cast<unsigned char>(text[i]))) {
      unsigned long value = 0;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
        value = value * 10 + static_cast<unsigned long>(text[i] - '0');
        require(value < (1ul << 20), ErrorKind::invalid_input, "vertex number too large");
        ++i;
      }
      out.push_back(static_cast<unsigned>(value));
    } else {
      char const c = text[i];
      require(std::isspace(static_cast<unsigned char>(c)) || c == ',', ErrorKind::invalid_input,
              std::string("unexpected character '") + c + "' in variable map");
      ++i;
    }
  }
  return out;
}

}  // namespace

VarMap::VarMap(std::vector<unsigned> phi) : phi_(std::move(phi)) {
  require(!phi_.empty(), ErrorKind::invalid_input, "variable map needs n >= 1");
  for (unsigned v : phi_) {
    require(v < phi_.size(), ErrorKind::invalid_input, "variable map value out of range");
  }
}

VarMap VarMap::parse_image(std::string_view text) {
  auto values = read_numbers(text);
  for (auto& v : values) {
    require(v >= 1, ErrorKind::invalid_input, "vertices are numbered from 1");
    --v;
  }
  return VarMap(std::move(values));
}

VarMap VarMap::parse_cycles(std::string_view text, unsigned n) {
  require(n >= 1, ErrorKind::invalid_input, "cycle notation needs n >= 1");
  std::vector<unsigned> phi(n);
  for (unsigned i = 0; i < n; ++i) {
    phi[i] = i;
  }
  std::vector<bool> listed(n, false);
  std::size_t pos = 0;
  while (pos < text.size()) {
    char const c = text[pos];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
      continue;
    }
    require(c == '(', ErrorKind::invalid_input, "cycle notation expects '('");
    std::size_t const close = text.find(')', pos);
    require(close != std::string_view::npos, ErrorKind::invalid_input, "unclosed cycle");
    auto const members = read_numbers(text.substr(pos + 1, close - pos - 1));
    for (std::size_t k = 0; k < members.size(); ++k) {
      unsigned const a = members[k];
      unsigned const b = members[(k + 1) % members.size()];
      require(a >= 1 && a <= n && b >= 1 && b <= n, ErrorKind::invalid_input,
              "cycle vertex outside 1..n");
      require(!listed[a - 1], ErrorKind::invalid_input, "vertex listed twice in cycle notation");
      listed[a - 1] = true;
      phi[a - 1] = b - 1;
    }
    pos = close + 1;
  }
  return VarMap(std::move(phi));
}

VarMap VarMap::parse(std::string_view text, std::optional<unsigned> n) {
  if (text.find('(') != std::string_view::npos) {
    require(n.has_value(), ErrorKind::invalid_input, "cycle notation needs an explicit n");
    return parse_cycles(text, *n);
  }
  VarMap v = parse_image(text);
  require(!n || *n == v.n(), ErrorKind::invalid_input, "image length does not match n");
  return v;
}

bool VarMap::is_permutation() const {
  std::vector<bool> hit(phi_.size(), false);
  for (unsigned v : phi_) {
    if (hit[v]) {
      return false;
    }
    hit[v] = true;
  }
  return true;
}

bool VarMap::is_identity() const {
  for (unsigned i = 0; i < phi_.size(); ++i) {
    if (phi_[i] != i) {
      return false;
    }
  }
  return true;
}

StateIndex VarMap::apply(Context const& ctx, StateIndex s) const {
  require(ctx.n() >= n(), ErrorKind::invalid_input, "context narrower than the variable map");
  StateIndex out = s;
  for (unsigned i = 0; i < n(); ++i) {
    out = ctx.with_digit(out, i, ctx.digit(s, phi_[i]));
  }
  return out;
}

Transformation VarMap::transformation(Context const& ctx) const {
  require(ctx.n() == n(), ErrorKind::invalid_input, "context width must equal n");
  return Transformation::from_function(ctx, [&](StateIndex s) { return apply(ctx, s); });
}

std::string VarMap::to_string() const {
  std::ostringstream out;
  for (unsigned i = 0; i < phi_.size(); ++i) {
    out << (i ? " " : "") << phi_[i] + 1;
  }
  return out.str();
}

unsigned VarMapAnalysis::detached_count() const {
  return static_cast<unsigned>(
      std::count_if(cycles.begin(), cycles.end(), [](VarCycle const& c) { return c.detached; }));
}

VarMapAnalysis analyze(VarMap const& v) {
  unsigned const n = v.n();
  VarMapAnalysis out;
  out.is_permutation = v.is_permutation();

  // A vertex lies on a cycle iff iterating phi n times from it returns to it.
  std::vector<bool> recurrent(n, false);
  for (unsigned i = 0; i < n; ++i) {
    unsigned j = i;
    for (unsigned k = 0; k < n; ++k) {
      j = v[j];
      if (j == i) {
        recurrent[i] = true;
        break;
      }
    }
  }
  std::vector<bool> seen(n, false);
  std::vector<int> cycle_of(n, -1);
  for (unsigned i = 0; i < n; ++i) {
    if (!recurrent[i] || seen[i]) {
      continue;
    }
    if (v[i] == i) {
      seen[i] = true;
      out.fixed_points.push_back(i);
      continue;
    }
    VarCycle cycle;
    for (unsigned j = i; !seen[j]; j = v[j]) {
      seen[j] = true;
      cycle_of[j] = static_cast<int>(out.cycles.size());
      cycle.members.push_back(j);
    }
    out.cycles.push_back(std::move(cycle));
  }
  for (auto& cycle : out.cycles) {
    cycle.entry = cycle.members.front();
    cycle.attachment = n;
  }
  // Smallest entry member first, then smallest attaching vertex for it.
  for (unsigned j = 0; j < n; ++j) {
    if (recurrent[j] || cycle_of[v[j]] < 0) {
      continue;
    }
    auto& cycle = out.cycles[static_cast<std::size_t>(cycle_of[v[j]])];
    if (cycle.detached || v[j] < cycle.entry) {
      cycle.entry = v[j];
      cycle.attachment = j;
    }
    cycle.detached = false;
  }

  // Kahn order on acyclic vertices: j before phi(j), smallest ready vertex first.
  std::vector<unsigned> indegree(n, 0);
  for (unsigned j = 0; j < n; ++j) {
    if (!recurrent[j] && !recurrent[v[j]]) {
      ++indegree[v[j]];
    }
  }
  std::priority_queue<unsigned, std::vector<unsigned>, std::greater<>> ready;
  for (unsigned j = 0; j < n; ++j) {
    if (!recurrent[j] && indegree[j] == 0) {
      ready.push(j);
    }
  }
  while (!ready.empty()) {
    unsigned const j = ready.top();
    ready.pop();
    out.acyclic.push_back(j);
    if (!recurrent[v[j]] && --indegree[v[j]] == 0) {
      ready.push(v[j]);
    }
  }
  return out;
}

namespace {

Symbol minus_one(Context const& ctx) { return ctx.q() - 1; }

/// Members of a cycle rotated to start at `start`.
std::vector<unsigned> rotated(VarCycle const& c, unsigned start) {
  auto members = c.members;
  auto const it = std::find(members.begin(), members.end(), start);
  std::rotate(members.begin(), it, members.end());
  return members;
}

/// y_{c_0} <- sum, then y_{c_k} <- y_{c_0} - sum_{j>0} y_{c_j} for k = l-1 .. 0.
void append_cycle_shift(Context const& ctx, std::vector<unsigned> const& c, Program& p) {
  std::vector<Symbol> sum(ctx.n(), 0);
  for (unsigned j : c) {
    sum[j] = 1;
  }
  p.push_back(Instruction::linear(ctx, c.front(), sum));
  std::vector<Symbol> diff(ctx.n(), 0);
  for (unsigned j : c) {
    diff[j] = minus_one(ctx);
  }
  diff[c.front()] = 1;
  for (std::size_t k = c.size(); k-- > 0;) {
    p.push_back(Instruction::linear(ctx, c[k], diff));
  }
}

/// y_{c_0} <- y_{c_1}, ..., y_{c_{l-2}} <- y_{c_{l-1}}.
void append_rotation_moves(Context const& ctx, std::vector<unsigned> const& c, Program& p) {
  for (std::size_t k = 0; k + 1 < c.size(); ++k) {
    p.push_back(Instruction::move(ctx, c[k], c[k + 1]));
  }
}

/// Register that will hold x_{phi(a)} once every cycle is done.
unsigned source_after_cycles(VarMap const& v, VarMapAnalysis const& an, unsigned a) {
  unsigned const target = v[a];
  for (auto const& cycle : an.cycles) {
    auto const& m = cycle.members;
    auto const it = std::find(m.begin(), m.end(), target);
    if (it != m.end()) {
      return it == m.begin() ? m.back() : *(it - 1);
    }
  }
  return target;
}

}  // namespace

Program synth_cyclic_shift(Context const& ctx) {
  require(ctx.n() >= 2, ErrorKind::invalid_input, "cyclic shift needs n >= 2");
  std::vector<unsigned> members(ctx.n());
  for (unsigned i = 0; i < ctx.n(); ++i) {
    members[i] = i;
  }
  Program p(ctx);
  append_cycle_shift(ctx, members, p);
  return p;
}

Program synth_varmap(VarMap const& v, unsigned q) {
  Context const ctx(q, v.n());
  auto const an = analyze(v);
  Program p(ctx);
  if (an.is_permutation) {
    for (auto const& cycle : an.cycles) {
      append_cycle_shift(ctx, cycle.members, p);
    }
    return p;
  }
  auto const& a = an.acyclic;
  if (an.detached_count() == 0) {
    for (unsigned j : a) {
      p.push_back(Instruction::move(ctx, j, v[j]));
    }
    for (auto const& cycle : an.cycles) {
      auto const c = rotated(cycle, cycle.entry);
      append_rotation_moves(ctx, c, p);
      p.push_back(Instruction::move(ctx, c.back(), cycle.attachment));
    }
    return p;
  }
  // The last acyclic register carries the sum of one member per cycle.
  unsigned const temp = a.back();
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    p.push_back(Instruction::move(ctx, a[k], v[a[k]]));
  }
  std::vector<Symbol> sum(ctx.n(), 0);
  for (auto const& cycle : an.cycles) {
    sum[cycle.members.front()] = 1;
  }
  p.push_back(Instruction::linear(ctx, temp, sum));
  for (std::size_t c = 0; c < an.cycles.size(); ++c) {
    auto const& m = an.cycles[c].members;
    append_rotation_moves(ctx, m, p);
    std::vector<Symbol> rest(ctx.n(), 0);
    rest[temp] = 1;
    for (std::size_t b = 0; b < an.cycles.size(); ++b) {
      if (b < c) {
        rest[an.cycles[b].members.back()] = minus_one(ctx);
      } else if (b > c) {
        rest[an.cycles[b].members.front()] = minus_one(ctx);
      }
    }
    p.push_back(Instruction::linear(ctx, m.back(), rest));
  }
  p.push_back(Instruction::move(ctx, temp, source_after_cycles(v, an, temp)));
  return p;
}

Program synth_varmap_blackbox(VarMap const& v, unsigned q) {
  Context const ctx(q, v.n());
  Program p(ctx);
  if (v.is_identity()) {
    return p;
  }
  if (v.is_permutation()) {
    fail(ErrorKind::not_computable_blackbox,
         "a non-identity permutation of variables cannot be computed by moves alone without "
         "memory: the first move destroys a value no other register holds");
  }
  auto const an = analyze(v);
  auto const& a = an.acyclic;
  unsigned const temp = a.back();
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    p.push_back(Instruction::move(ctx, a[k], v[a[k]]));
  }
  for (auto const& cycle : an.cycles) {
    if (!cycle.detached) {
      continue;
    }
    auto const& m = cycle.members;
    p.push_back(Instruction::move(ctx, temp, m.front()));
    append_rotation_moves(ctx, m, p);
    p.push_back(Instruction::move(ctx, m.back(), temp));
  }
  p.push_back(Instruction::move(ctx, temp, v[temp]));
  for (auto const& cycle : an.cycles) {
    if (cycle.detached) {
      continue;
    }
    auto const c = rotated(cycle, cycle.entry);
    append_rotation_moves(ctx, c, p);
    p.push_back(Instruction::move(ctx, c.back(), cycle.attachment));
  }
  return p;
}

VarMapComplexity varmap_complexity(VarMap const& v) {
  auto const an = analyze(v);
  unsigned const n = v.n();
  unsigned const f = an.fixed_count();
  unsigned const d = an.detached_count();
  VarMapComplexity out;
  if (an.is_permutation) {
    out.memoryless = n - f + d;
    out.onecell = v.is_identity() ? 0 : n - f + 1;
    if (v.is_identity()) {
      out.blackbox = 0;
    }
    return out;
  }
  out.memoryless = d > 0 ? n - f + 1 : n - f;
  out.blackbox = n - f + d;
  out.onecell = out.memoryless;
  return out;
}

bool verify_varmap(Program const& p, VarMap const& v, std::size_t samples, std::uint64_t seed) {
  require(p.outputs() == v.n(), ErrorKind::invalid_input, "program width does not match n");
  Context const out = p.output_context();
  if (p.context().size() <= 4096) {
    return verify(p, v.transformation(out));
  }
  return verify_sampled(p, [&](StateIndex s) { return v.apply(out, s); }, samples, seed);
}

}  // namespace mlc
