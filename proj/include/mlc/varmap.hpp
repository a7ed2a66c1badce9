#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mlc/core.hpp"

namespace mlc {

/// phi : [n] -> [n], stored 0-based. f^phi(x)_i = x_{phi(i)}.
class VarMap {
public:
  explicit VarMap(std::vector<unsigned> phi);

  /// One-line image form, 1-based: "2 1 4 3".
  static VarMap parse_image(std::string_view text);
  /// Cycle notation, 1-based, "(1 2)(3 4)"; unlisted vertices are fixed.
  static VarMap parse_cycles(std::string_view text, unsigned n);
  /// Either form; cycle notation when the text contains '('.
  static VarMap parse(std::string_view text, std::optional<unsigned> n);

  unsigned n() const noexcept { return static_cast<unsigned>(phi_.size()); }
  unsigned operator[](unsigned i) const { return phi_.at(i); }
  std::vector<unsigned> const& image() const noexcept { return phi_; }

  bool is_permutation() const;
  bool is_identity() const;

  /// Moves digits: register i of the result holds digit phi(i) of s.
  StateIndex apply(Context const& ctx, StateIndex s) const;
  Transformation transformation(Context const& ctx) const;

  /// 1-based image form.
  std::string to_string() const;

  bool operator==(VarMap const&) const = default;

private:
  std::vector<unsigned> phi_;
};

struct VarCycle {
  /// Members in phi order starting from the smallest vertex.
  std::vector<unsigned> members;
  bool detached = true;
  /// Smallest member with a preimage outside the cycle (attached cycles only).
  unsigned entry = 0;
  /// Smallest vertex outside the cycle mapping to `entry` (attached cycles only).
  unsigned attachment = 0;
};

struct VarMapAnalysis {
  std::vector<unsigned> fixed_points;
  std::vector<VarCycle> cycles;
  /// Vertices on no cycle, each listed before its image.
  std::vector<unsigned> acyclic;
  bool is_permutation = false;

  unsigned fixed_count() const noexcept { return static_cast<unsigned>(fixed_points.size()); }
  unsigned detached_count() const;
};

VarMapAnalysis analyze(VarMap const& v);

/// n+1 linear steps for (x_2, ..., x_n, x_1): y_1, y_n, y_{n-1}, ..., y_1.
Program synth_cyclic_shift(Context const& ctx);

/// Memoryless program of exactly the optimal length, using mod-q combinations and moves.
Program synth_varmap(VarMap const& v, unsigned q);

/// Moves only; n - F + D steps. Throws not_computable_blackbox on a non-identity permutation.
Program synth_varmap_blackbox(VarMap const& v, unsigned q);

struct VarMapComplexity {
  unsigned memoryless = 0;
  std::optional<unsigned> blackbox;
  unsigned onecell = 0;
};

VarMapComplexity varmap_complexity(VarMap const& v);

/// Exhaustive for at most 4096 register states (all scratch values included),
/// otherwise `samples` random inputs.
bool verify_varmap(Program const& p, VarMap const& v, std::size_t samples = 10000,
                   std::uint64_t seed = 1);

}  // namespace mlc
