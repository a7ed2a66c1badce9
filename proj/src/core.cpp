#include "mlc/core.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

namespace mlc {

char const* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::not_expressible: return "not-expressible";
    case ErrorKind::not_computable_blackbox: return "not-computable-blackbox";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::infeasible: return "infeasible";
  }
  return "unknown";
}

// ---------------------------------------------------------------- Context

Context::Context(unsigned q, unsigned n) : q_(q), n_(n) {
  require(q >= 2, ErrorKind::invalid_input, "alphabet size must be at least 2");
  require(n >= 1, ErrorKind::invalid_input, "register count must be at least 1");
  powers_.reserve(n + 1);
  powers_.push_back(1);
  constexpr StateIndex limit = StateIndex{1} << 62;
  for (unsigned i = 0; i < n; ++i) {
    require(powers_.back() <= limit / q, ErrorKind::invalid_input,
            "q^n exceeds the supported index range");
    powers_.push_back(powers_.back() * q);
  }
}

std::vector<Symbol> Context::digits(StateIndex s) const {
  std::vector<Symbol> out(n_);
  for (unsigned i = 0; i < n_; ++i) {
    out[i] = static_cast<Symbol>(s % q_);
    s /= q_;
  }
  return out;
}

StateIndex Context::index(std::span<Symbol const> digits) const {
  require(digits.size() == n_, ErrorKind::invalid_input, "digit tuple has the wrong length");
  StateIndex s = 0;
  for (unsigned i = 0; i < n_; ++i) {
    require(digits[i] < q_, ErrorKind::invalid_input, "digit out of range");
    s += StateIndex{digits[i]} * powers_[i];
  }
  return s;
}

std::size_t Context::table_size() const {
  require(size() <= kMaxTableSize, ErrorKind::infeasible,
          "state space too large to tabulate (q^n = " + std::to_string(size()) + ")");
  return static_cast<std::size_t>(size());
}

StateIndex state_index(std::span<Symbol const> digits, Context const& ctx) {
  return ctx.index(digits);
}

std::vector<Symbol> index_digits(StateIndex s, Context const& ctx) {
  require(s < ctx.size(), ErrorKind::invalid_input, "state index out of range");
  return ctx.digits(s);
}

// ---------------------------------------------------------- Transformation

Transformation::Transformation(Context ctx, std::vector<StateIndex> image)
    : ctx_(std::move(ctx)), image_(std::move(image)) {
  require(image_.size() == ctx_.table_size(), ErrorKind::invalid_input,
          "image table length must be q^n");
  for (StateIndex v : image_) {
    require(v < ctx_.size(), ErrorKind::invalid_input, "image entry out of range");
  }
}

Transformation Transformation::identity(Context const& ctx) {
  std::vector<StateIndex> image(ctx.table_size());
  std::iota(image.begin(), image.end(), StateIndex{0});
  return Transformation(ctx, std::move(image));
}

Transformation Transformation::from_function(Context const& ctx,
                                             std::function<StateIndex(StateIndex)> const& fn) {
  std::vector<StateIndex> image(ctx.table_size());
  for (StateIndex s = 0; s < image.size(); ++s) {
    image[s] = fn(s);
  }
  return Transformation(ctx, std::move(image));
}

Transformation Transformation::from_coordinates(Context const& ctx,
                                                std::vector<CoordinateTable> const& coords) {
  require(coords.size() == ctx.n(), ErrorKind::invalid_input, "need one table per coordinate");
  std::size_t const size = ctx.table_size();
  std::vector<StateIndex> image(size, 0);
  for (unsigned i = 0; i < ctx.n(); ++i) {
    require(coords[i].size() == size, ErrorKind::invalid_input, "coordinate table length");
    for (std::size_t s = 0; s < size; ++s) {
      require(coords[i][s] < ctx.q(), ErrorKind::invalid_input, "coordinate value out of range");
      image[s] += StateIndex{coords[i][s]} * ctx.power(i);
    }
  }
  return Transformation(ctx, std::move(image));
}

CoordinateTable Transformation::coordinate(unsigned i) const {
  CoordinateTable out(image_.size());
  for (std::size_t s = 0; s < image_.size(); ++s) {
    out[s] = ctx_.digit(image_[s], i);
  }
  return out;
}

std::size_t Transformation::rank() const {
  std::vector<bool> seen(image_.size(), false);
  std::size_t count = 0;
  for (StateIndex v : image_) {
    if (!seen[v]) {
      seen[v] = true;
      ++count;
    }
  }
  return count;
}

bool Transformation::is_permutation() const { return rank() == image_.size(); }

bool Transformation::is_identity() const {
  for (StateIndex s = 0; s < image_.size(); ++s) {
    if (image_[s] != s) {
      return false;
    }
  }
  return true;
}

Transformation Transformation::inverse() const {
  require(is_permutation(), ErrorKind::invalid_input, "only permutations have inverses");
  std::vector<StateIndex> inv(image_.size());
  for (StateIndex s = 0; s < image_.size(); ++s) {
    inv[image_[s]] = s;
  }
  return Transformation(ctx_, std::move(inv));
}

Transformation compose(Transformation const& outer, Transformation const& inner) {
  require(outer.context() == inner.context(), ErrorKind::invalid_input, "context mismatch");
  std::vector<StateIndex> image(inner.image().size());
  for (std::size_t s = 0; s < image.size(); ++s) {
    image[s] = outer(inner(s));
  }
  return Transformation(inner.context(), std::move(image));
}

// ------------------------------------------------------------- Instruction

namespace {

LinearForm as_linear(Context const& ctx, MoveForm const& m) {
  LinearForm form;
  form.coeffs.assign(ctx.n(), 0);
  form.coeffs[m.source] = 1;
  return form;
}

}  // namespace

Instruction Instruction::from_table(Context const& ctx, unsigned target, CoordinateTable table) {
  require(target < ctx.n(), ErrorKind::invalid_input, "target coordinate out of range");
  require(table.size() == ctx.table_size(), ErrorKind::invalid_input,
          "instruction table length must be q^n");
  for (Symbol v : table) {
    require(v < ctx.q(), ErrorKind::invalid_input, "instruction value out of range");
  }
  return Instruction(ctx, target, std::move(table));
}

Instruction Instruction::linear(Context const& ctx, unsigned target, std::vector<Symbol> coeffs,
                                Symbol constant) {
  require(target < ctx.n(), ErrorKind::invalid_input, "target coordinate out of range");
  require(coeffs.size() == ctx.n(), ErrorKind::invalid_input, "need one coefficient per register");
  for (Symbol& c : coeffs) {
    c %= ctx.q();
  }
  return Instruction(ctx, target, LinearForm{std::move(coeffs), constant % ctx.q()});
}

Instruction Instruction::move(Context const& ctx, unsigned target, unsigned source) {
  require(target < ctx.n() && source < ctx.n(), ErrorKind::invalid_input,
          "move coordinate out of range");
  return Instruction(ctx, target, MoveForm{source});
}

Instruction Instruction::from_function(Context const& ctx, unsigned target,
                                       std::function<Symbol(StateIndex)> const& fn) {
  CoordinateTable table(ctx.table_size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    table[s] = fn(s);
  }
  return from_table(ctx, target, std::move(table));
}

Symbol Instruction::value(StateIndex s) const {
  if (auto const* table = std::get_if<CoordinateTable>(&body_)) {
    return (*table)[s];
  }
  if (auto const* m = std::get_if<MoveForm>(&body_)) {
    return ctx_.digit(s, m->source);
  }
  auto const& lin = std::get<LinearForm>(body_);
  std::uint64_t acc = lin.constant;
  for (unsigned j = 0; j < ctx_.n(); ++j) {
    if (lin.coeffs[j] != 0) {
      acc += std::uint64_t{lin.coeffs[j]} * (s % ctx_.q());
    }
    s /= ctx_.q();
  }
  return static_cast<Symbol>(acc % ctx_.q());
}

CoordinateTable Instruction::table() const {
  if (auto const* table = std::get_if<CoordinateTable>(&body_)) {
    return *table;
  }
  CoordinateTable out(ctx_.table_size());
  for (std::size_t s = 0; s < out.size(); ++s) {
    out[s] = value(s);
  }
  return out;
}

Transformation Instruction::transformation() const {
  return Transformation::from_function(ctx_, [this](StateIndex s) { return apply(s); });
}

bool Instruction::is_identity() const {
  if (auto const* m = std::get_if<MoveForm>(&body_)) {
    return m->source == target_;
  }
  if (auto const* lin = std::get_if<LinearForm>(&body_)) {
    if (lin->constant != 0) {
      return false;
    }
    for (unsigned j = 0; j < ctx_.n(); ++j) {
      if (lin->coeffs[j] != (j == target_ ? 1u : 0u)) {
        return false;
      }
    }
    return true;
  }
  auto const& table = std::get<CoordinateTable>(body_);
  for (std::size_t s = 0; s < table.size(); ++s) {
    if (table[s] != ctx_.digit(s, target_)) {
      return false;
    }
  }
  return true;
}

bool Instruction::is_permutation_instruction() const {
  if (auto const* m = std::get_if<MoveForm>(&body_)) {
    return m->source == target_;
  }
  if (auto const* lin = std::get_if<LinearForm>(&body_)) {
    return std::gcd(lin->coeffs[target_], ctx_.q()) == 1;
  }
  std::size_t const size = ctx_.table_size();
  std::vector<bool> hit(ctx_.q());
  for (StateIndex s = 0; s < size; ++s) {
    if (ctx_.digit(s, target_) != 0) {
      continue;
    }
    std::fill(hit.begin(), hit.end(), false);
    for (Symbol v = 0; v < ctx_.q(); ++v) {
      Symbol const out = value(ctx_.with_digit(s, target_, v));
      if (hit[out]) {
        return false;
      }
      hit[out] = true;
    }
  }
  return true;
}

std::vector<unsigned> Instruction::support() const {
  std::vector<unsigned> out;
  if (auto const* m = std::get_if<MoveForm>(&body_)) {
    out.push_back(m->source);
    return out;
  }
  if (auto const* lin = std::get_if<LinearForm>(&body_)) {
    for (unsigned j = 0; j < ctx_.n(); ++j) {
      if (lin->coeffs[j] != 0) {
        out.push_back(j);
      }
    }
    return out;
  }
  std::size_t const size = ctx_.table_size();
  for (unsigned j = 0; j < ctx_.n(); ++j) {
    for (StateIndex s = 0; s < size; ++s) {
      StateIndex const t = ctx_.with_digit(s, j, (ctx_.digit(s, j) + 1) % ctx_.q());
      if (value(s) != value(t)) {
        out.push_back(j);
        break;
      }
    }
  }
  return out;
}

Instruction Instruction::then(Instruction const& next) const {
  require(ctx_ == next.ctx_ && target_ == next.target_, ErrorKind::invalid_input,
          "only updates of the same coordinate can be merged");
  bool const first_linear = !std::holds_alternative<CoordinateTable>(body_);
  bool const second_linear = !std::holds_alternative<CoordinateTable>(next.body_);
  if (first_linear && second_linear) {
    auto to_linear = [this](Body const& b) {
      if (auto const* m = std::get_if<MoveForm>(&b)) {
        return as_linear(ctx_, *m);
      }
      return std::get<LinearForm>(b);
    };
    LinearForm const a = to_linear(body_);
    LinearForm const b = to_linear(next.body_);
    std::uint64_t const q = ctx_.q();
    std::uint64_t const bt = b.coeffs[target_];
    std::vector<Symbol> coeffs(ctx_.n());
    for (unsigned j = 0; j < ctx_.n(); ++j) {
      std::uint64_t c = bt * a.coeffs[j];
      if (j != target_) {
        c += b.coeffs[j];
      }
      coeffs[j] = static_cast<Symbol>(c % q);
    }
    auto const constant = static_cast<Symbol>((bt * a.constant + b.constant) % q);
    return linear(ctx_, target_, std::move(coeffs), constant);
  }
  CoordinateTable table(ctx_.table_size());
  for (std::size_t s = 0; s < table.size(); ++s) {
    table[s] = next.value(apply(s));
  }
  return from_table(ctx_, target_, std::move(table));
}

Instruction Instruction::widened(unsigned extra) const {
  Context const wide = ctx_.widened(extra);
  if (auto const* m = std::get_if<MoveForm>(&body_)) {
    return move(wide, target_, m->source);
  }
  if (auto const* lin = std::get_if<LinearForm>(&body_)) {
    std::vector<Symbol> coeffs = lin->coeffs;
    coeffs.resize(wide.n(), 0);
    return linear(wide, target_, std::move(coeffs), lin->constant);
  }
  auto const& table = std::get<CoordinateTable>(body_);
  StateIndex const narrow = ctx_.size();
  return from_function(wide, target_, [&](StateIndex s) { return table[s % narrow]; });
}

bool Instruction::operator==(Instruction const& other) const {
  if (ctx_ != other.ctx_ || target_ != other.target_) {
    return false;
  }
  if (body_ == other.body_) {
    return true;
  }
  return table() == other.table();
}

// ----------------------------------------------------------------- Program

Program::Program(Context ctx, unsigned memory_cells, StepPolicy policy)
    : ctx_(std::move(ctx)), memory_cells_(memory_cells), policy_(policy) {
  require(memory_cells < ctx_.n(), ErrorKind::invalid_input,
          "program needs at least one output register");
}

void Program::push_back(Instruction const& instr) {
  require(instr.context() == ctx_, ErrorKind::invalid_input, "instruction context mismatch");
  if (instr.is_identity()) {
    return;
  }
  if (policy_ == StepPolicy::normal_form && !steps_.empty() &&
      steps_.back().target() == instr.target()) {
    Instruction merged = steps_.back().then(instr);
    steps_.pop_back();
    if (!merged.is_identity()) {
      steps_.push_back(std::move(merged));
    }
    return;
  }
  steps_.push_back(instr);
}

void Program::append(Program const& other) {
  require(other.ctx_ == ctx_, ErrorKind::invalid_input, "program context mismatch");
  for (auto const& step : other.steps_) {
    push_back(step);
  }
}

bool Program::is_normal_form() const {
  for (std::size_t k = 0; k < steps_.size(); ++k) {
    if (steps_[k].is_identity()) {
      return false;
    }
    if (k > 0 && steps_[k - 1].target() == steps_[k].target()) {
      return false;
    }
  }
  return true;
}

StateIndex eval_program(Program const& p, StateIndex s) {
  require(s < p.context().size(), ErrorKind::invalid_input, "state outside the program context");
  for (auto const& step : p.steps()) {
    s = step.apply(s);
  }
  return s;
}

Transformation full_transformation(Program const& p) {
  return Transformation::from_function(p.context(),
                                       [&](StateIndex s) { return eval_program(p, s); });
}

Transformation program_transformation(Program const& p) {
  Context const out = p.output_context();
  StateIndex const size = out.size();
  return Transformation::from_function(out,
                                       [&](StateIndex s) { return eval_program(p, s) % size; });
}

std::vector<Transformation> prefix_transformations(Program const& p) {
  std::vector<Transformation> out;
  Transformation current = Transformation::identity(p.context());
  for (auto const& step : p.steps()) {
    std::vector<StateIndex> image(current.image().begin(), current.image().end());
    for (auto& v : image) {
      v = step.apply(v);
    }
    current = Transformation(p.context(), std::move(image));
    out.push_back(current);
  }
  return out;
}

std::vector<StateIndex> counterexamples(Program const& p, Transformation const& f,
                                        std::size_t limit) {
  require(f.context() == p.output_context(), ErrorKind::invalid_input,
          "target context does not match program outputs");
  StateIndex const outputs = f.context().size();
  std::size_t const size = p.context().table_size();
  std::vector<StateIndex> bad;
  std::vector<bool> reported(f.image().size(), false);
  for (StateIndex s = 0; s < size && bad.size() < limit; ++s) {
    StateIndex const x = s % outputs;
    if (reported[x]) {
      continue;
    }
    if (eval_program(p, s) % outputs != f(x)) {
      reported[x] = true;
      bad.push_back(x);
    }
  }
  return bad;
}

bool verify(Program const& p, Transformation const& f) {
  return counterexamples(p, f, 1).empty();
}

bool verify_sampled(Program const& p, std::function<StateIndex(StateIndex)> const& f,
                    std::size_t samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  StateIndex const outputs = p.output_context().size();
  std::uniform_int_distribution<StateIndex> pick(0, p.context().size() - 1);
  for (std::size_t k = 0; k < samples; ++k) {
    StateIndex const s = pick(rng);
    if (eval_program(p, s) % outputs != f(s % outputs)) {
      return false;
    }
  }
  return true;
}

// -------------------------------------------------------------- domination

bool dominates(Transformation const& g, Transformation const& f) {
  require(g.context() == f.context(), ErrorKind::invalid_input, "context mismatch");
  std::vector<StateIndex> seen(g.image().size(), g.image().size());
  for (StateIndex x = 0; x < g.image().size(); ++x) {
    StateIndex& slot = seen[g(x)];
    if (slot == g.image().size()) {
      slot = f(x);
    } else if (slot != f(x)) {
      return false;
    }
  }
  return true;
}

bool dominates(Transformation const& g, CoordinateTable const& f) {
  require(f.size() == g.image().size(), ErrorKind::invalid_input, "table length mismatch");
  constexpr Symbol unset = ~Symbol{0};
  std::vector<Symbol> seen(g.image().size(), unset);
  for (StateIndex x = 0; x < g.image().size(); ++x) {
    Symbol& slot = seen[g(x)];
    if (slot == unset) {
      slot = f[x];
    } else if (slot != f[x]) {
      return false;
    }
  }
  return true;
}

CoordinateTable express_through(Transformation const& current, CoordinateTable const& target,
                                unsigned coord) {
  Context const& ctx = current.context();
  require(target.size() == current.image().size(), ErrorKind::invalid_input,
          "target table length mismatch");
  require(coord < ctx.n(), ErrorKind::invalid_input, "coordinate out of range");
  constexpr Symbol unset = ~Symbol{0};
  CoordinateTable h(target.size(), unset);
  for (StateIndex x = 0; x < target.size(); ++x) {
    Symbol& slot = h[current(x)];
    if (slot == unset) {
      slot = target[x];
    } else if (slot != target[x]) {
      fail(ErrorKind::not_expressible,
           "target coordinate function is not a function of the current registers");
    }
  }
  for (StateIndex y = 0; y < h.size(); ++y) {
    if (h[y] == unset) {
      h[y] = ctx.digit(y, coord);
    }
  }
  return h;
}

bool is_balanced(Context const& ctx, std::span<StateIndex const> values, unsigned k) {
  require(k <= ctx.n(), ErrorKind::invalid_input, "codomain wider than domain");
  require(values.size() == ctx.table_size(), ErrorKind::invalid_input, "table length mismatch");
  StateIndex const fibers = ctx.power(k);
  StateIndex const fiber_size = ctx.power(ctx.n() - k);
  std::vector<StateIndex> count(fibers, 0);
  for (StateIndex v : values) {
    if (v >= fibers) {
      return false;
    }
    ++count[v];
  }
  return std::all_of(count.begin(), count.end(), [&](StateIndex c) { return c == fiber_size; });
}

Program compile_chain(Context const& ctx, unsigned memory_cells, std::vector<ChainStep> const& steps,
                      StepPolicy policy) {
  Program program(ctx, memory_cells, policy);
  std::vector<StateIndex> image(ctx.table_size());
  std::iota(image.begin(), image.end(), StateIndex{0});
  for (auto const& step : steps) {
    Transformation const current(ctx, image);
    program.push_back(
        Instruction::from_table(ctx, step.coord, express_through(current, step.target, step.coord)));
    for (StateIndex x = 0; x < image.size(); ++x) {
      image[x] = ctx.with_digit(image[x], step.coord, step.target[x]);
    }
  }
  return program;
}

Program drop_dead_scratch(Program const& p) {
  std::vector<Instruction> steps = p.steps();
  unsigned const outputs = p.outputs();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      unsigned const reg = steps[k].target();
      if (reg < outputs) {
        continue;
      }
      bool read = false;
      for (std::size_t l = k + 1; l < steps.size(); ++l) {
        auto const support = steps[l].support();
        if (std::find(support.begin(), support.end(), reg) != support.end()) {
          read = true;
          break;
        }
        if (steps[l].target() == reg) {
          break;
        }
      }
      if (!read) {
        steps.erase(steps.begin() + static_cast<std::ptrdiff_t>(k));
        changed = true;
        break;
      }
    }
  }
  Program out(p.context(), p.memory_cells(), p.policy());
  for (auto const& step : steps) {
    out.push_back(step);
  }
  return out;
}

Program widen(Program const& p, unsigned extra) {
  Program out(p.context().widened(extra), p.memory_cells() + extra, p.policy());
  for (auto const& step : p.steps()) {
    out.push_back(step.widened(extra));
  }
  return out;
}

}  // namespace mlc
