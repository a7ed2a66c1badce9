#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "mlc/error.hpp"

namespace mlc {

using Symbol = std::uint32_t;
using StateIndex = std::uint64_t;

/// Values of one coordinate function, indexed by state.
using CoordinateTable = std::vector<Symbol>;

/// Largest state count for which tables are materialized.
inline constexpr StateIndex kMaxTableSize = StateIndex{1} << 26;

/// Alphabet size q and register count n. Coordinates are 0-based here;
/// coordinate 0 is the least significant digit of a state index.
class Context {
public:
  Context(unsigned q, unsigned n);

  unsigned q() const noexcept { return q_; }
  unsigned n() const noexcept { return n_; }

  /// q^n.
  StateIndex size() const noexcept { return powers_.back(); }
  /// q^i for 0 <= i <= n.
  StateIndex power(unsigned i) const { return powers_.at(i); }

  Symbol digit(StateIndex s, unsigned i) const noexcept {
    return static_cast<Symbol>((s / powers_[i]) % q_);
  }
  StateIndex with_digit(StateIndex s, unsigned i, Symbol v) const noexcept {
    return s - StateIndex{digit(s, i)} * powers_[i] + StateIndex{v} * powers_[i];
  }

  std::vector<Symbol> digits(StateIndex s) const;
  StateIndex index(std::span<Symbol const> digits) const;

  /// size() as a table length; throws when tables would be too large.
  std::size_t table_size() const;

  /// Same alphabet, `extra` more registers.
  Context widened(unsigned extra) const { return Context(q_, n_ + extra); }

  bool operator==(Context const&) const = default;

private:
  unsigned q_;
  unsigned n_;
  std::vector<StateIndex> powers_;
};

/// Lexicographic index sum a_i q^i of a digit tuple.
StateIndex state_index(std::span<Symbol const> digits, Context const& ctx);
std::vector<Symbol> index_digits(StateIndex s, Context const& ctx);

/// A total map A^n -> A^n stored as its image table.
class Transformation {
public:
  Transformation(Context ctx, std::vector<StateIndex> image);

  static Transformation identity(Context const& ctx);
  static Transformation from_function(Context const& ctx,
                                      std::function<StateIndex(StateIndex)> const& fn);
  /// Builds f from its coordinate functions f_1..f_n.
  static Transformation from_coordinates(Context const& ctx,
                                         std::vector<CoordinateTable> const& coords);

  Context const& context() const noexcept { return ctx_; }
  StateIndex operator()(StateIndex s) const { return image_[s]; }
  std::span<StateIndex const> image() const noexcept { return image_; }

  CoordinateTable coordinate(unsigned i) const;
  Symbol coordinate_value(StateIndex s, unsigned i) const { return ctx_.digit(image_[s], i); }

  std::size_t rank() const;
  bool is_permutation() const;
  bool is_identity() const;
  Transformation inverse() const;

  bool operator==(Transformation const&) const = default;

private:
  Context ctx_;
  std::vector<StateIndex> image_;
};

/// outer o inner.
Transformation compose(Transformation const& outer, Transformation const& inner);

/// y_target <- sum_j coeffs[j] y_j + constant, all mod q.
struct LinearForm {
  std::vector<Symbol> coeffs;
  Symbol constant = 0;
  bool operator==(LinearForm const&) const = default;
};

/// y_target <- y_source.
struct MoveForm {
  unsigned source = 0;
  bool operator==(MoveForm const&) const = default;
};

/// A transformation with at most one nontrivial coordinate function.
class Instruction {
public:
  using Body = std::variant<CoordinateTable, LinearForm, MoveForm>;

  static Instruction from_table(Context const& ctx, unsigned target, CoordinateTable table);
  static Instruction linear(Context const& ctx, unsigned target, std::vector<Symbol> coeffs,
                            Symbol constant = 0);
  static Instruction move(Context const& ctx, unsigned target, unsigned source);
  static Instruction from_function(Context const& ctx, unsigned target,
                                   std::function<Symbol(StateIndex)> const& fn);

  Context const& context() const noexcept { return ctx_; }
  unsigned target() const noexcept { return target_; }
  Body const& body() const noexcept { return body_; }
  LinearForm const* linear_form() const { return std::get_if<LinearForm>(&body_); }
  MoveForm const* move_form() const { return std::get_if<MoveForm>(&body_); }

  /// g_target evaluated on a register state.
  Symbol value(StateIndex s) const;
  StateIndex apply(StateIndex s) const { return ctx_.with_digit(s, target_, value(s)); }

  CoordinateTable table() const;
  Transformation transformation() const;

  bool is_identity() const;
  /// Bijective in the target digit for every fixing of the other digits.
  bool is_permutation_instruction() const;
  /// Coordinates the update actually reads.
  std::vector<unsigned> support() const;

  /// next o *this; both must update the same coordinate.
  Instruction then(Instruction const& next) const;

  /// Same update on a wider register file; the new registers are not read.
  Instruction widened(unsigned extra) const;

  bool operator==(Instruction const& other) const;

private:
  Instruction(Context ctx, unsigned target, Body body)
      : ctx_(std::move(ctx)), target_(target), body_(std::move(body)) {}

  Context ctx_;
  unsigned target_;
  Body body_;
};

enum class StepPolicy {
  /// Merge consecutive updates of one coordinate, drop identities.
  normal_form,
  /// Only drop identities. Used where merging would break a per-step property.
  keep_runs,
};

/// Straight-line sequence of instructions on n outputs plus m scratch registers.
class Program {
public:
  Program(Context ctx, unsigned memory_cells = 0, StepPolicy policy = StepPolicy::normal_form);

  Context const& context() const noexcept { return ctx_; }
  Context output_context() const { return Context(ctx_.q(), outputs()); }
  unsigned outputs() const noexcept { return ctx_.n() - memory_cells_; }
  unsigned memory_cells() const noexcept { return memory_cells_; }
  StepPolicy policy() const noexcept { return policy_; }

  std::size_t length() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  std::vector<Instruction> const& steps() const noexcept { return steps_; }

  void push_back(Instruction const& instr);
  void append(Program const& other);

  bool is_normal_form() const;

private:
  Context ctx_;
  unsigned memory_cells_;
  StepPolicy policy_;
  std::vector<Instruction> steps_;
};

StateIndex eval_program(Program const& p, StateIndex s);

/// Map on the full register file (outputs and scratch).
Transformation full_transformation(Program const& p);

/// Map on the outputs with all scratch registers starting at zero.
Transformation program_transformation(Program const& p);

/// Transformations after each step, over the full register file.
std::vector<Transformation> prefix_transformations(Program const& p);

/// Output states that disagree with f for some scratch initialization, at most `limit`.
std::vector<StateIndex> counterexamples(Program const& p, Transformation const& f,
                                        std::size_t limit = 10);

/// Checks p against f for every input and every scratch initialization.
bool verify(Program const& p, Transformation const& f);

/// Checks p on `samples` random inputs; for contexts too large to tabulate.
bool verify_sampled(Program const& p, std::function<StateIndex(StateIndex)> const& f,
                    std::size_t samples, std::uint64_t seed);

/// g(x) = g(x') implies f(x) = f(x').
bool dominates(Transformation const& g, Transformation const& f);
bool dominates(Transformation const& g, CoordinateTable const& f);

/// Table h with h(current(x)) = target(x); unreachable register states keep
/// the target coordinate's value.
CoordinateTable express_through(Transformation const& current, CoordinateTable const& target,
                                unsigned coord);

/// Every fiber of `values` (each value in [0, q^k)) has size q^(n-k).
bool is_balanced(Context const& ctx, std::span<StateIndex const> values, unsigned k);

/// One scheduled update: register `coord` must end up holding target(x).
struct ChainStep {
  unsigned coord;
  CoordinateTable target;
};

/// Turns a schedule of intermediate values into instructions via express_through.
/// Targets are indexed by the full input (outputs and scratch).
Program compile_chain(Context const& ctx, unsigned memory_cells, std::vector<ChainStep> const& steps,
                      StepPolicy policy = StepPolicy::normal_form);

/// Removes scratch writes that no later step reads before the next write.
Program drop_dead_scratch(Program const& p);

/// Copy of p on a register file with `extra` more scratch cells.
Program widen(Program const& p, unsigned extra);

}  // namespace mlc
