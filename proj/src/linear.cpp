#include "mlc/linear.hpp"

#include <algorithm>
#include <deque>
#include <optional>
#include <stdexcept>
#include <unordered_set>

namespace mlc {

MatrixGF instruction_matrix(Field const& field, LinearInstruction const& instr) {
  MatrixGF s = MatrixGF::identity(field, instr.coeffs.size());
  s.set_row(instr.target, instr.coeffs);
  return s;
}

MatrixGF linear_program_matrix(LinearProgram const& p) {
  MatrixGF current = MatrixGF::identity(p.field, p.width());
  for (auto const& step : p.steps) {
    require(step.coeffs.size() == p.width() && step.target < p.width(), ErrorKind::invalid_input,
            "instruction does not fit the register file");
    current.set_row(step.target, times(step.coeffs, current));
  }
  return current;
}

bool verify_linear(LinearProgram const& p, MatrixGF const& m) {
  if (m.rows() != p.outputs || m.cols() != p.outputs || !(m.field() == p.field)) {
    return false;
  }
  MatrixGF const full = linear_program_matrix(p);
  for (unsigned r = 0; r < p.outputs; ++r) {
    for (unsigned c = 0; c < p.width(); ++c) {
      Element const want = c < p.outputs ? m(r, c) : 0;
      if (full(r, c) != want) {
        return false;
      }
    }
  }
  return true;
}

Transformation linear_transformation(MatrixGF const& m) {
  require(m.rows() == m.cols(), ErrorKind::invalid_input, "matrix must be square");
  Field const& f = m.field();
  Context const ctx(f.q(), static_cast<unsigned>(m.rows()));
  return Transformation::from_function(ctx, [&](StateIndex s) {
    auto const x = ctx.digits(s);
    std::vector<Symbol> y(ctx.n(), 0);
    for (unsigned r = 0; r < ctx.n(); ++r) {
      Element acc = 0;
      for (unsigned c = 0; c < ctx.n(); ++c) {
        acc = f.add(acc, f.mul(m(r, c), x[c]));
      }
      y[r] = acc;
    }
    return ctx.index(y);
  });
}

Program to_program(LinearProgram const& p) {
  Context const ctx(p.field.q(), p.width());
  Program out(ctx, p.memory_cells, StepPolicy::keep_runs);
  for (auto const& step : p.steps) {
    if (p.field.is_prime()) {
      out.push_back(Instruction::linear(ctx, step.target,
                                        std::vector<Symbol>(step.coeffs.begin(), step.coeffs.end())));
      continue;
    }
    Field const& f = p.field;
    out.push_back(Instruction::from_function(ctx, step.target, [&](StateIndex s) {
      Element acc = 0;
      for (unsigned j = 0; j < ctx.n(); ++j) {
        acc = f.add(acc, f.mul(step.coeffs[j], ctx.digit(s, j)));
      }
      return acc;
    }));
  }
  return out;
}

namespace {

RowVector unit_row(std::size_t n, std::size_t i) {
  RowVector e(n, 0);
  e[i] = 1;
  return e;
}

/// Some a with a * rows = target, free variables zero.
std::optional<RowVector> solve_combination(MatrixGF const& rows, RowVector const& target) {
  Field const& f = rows.field();
  std::size_t const r = rows.rows();
  std::size_t const c = rows.cols();
  // Augmented system rows^T a = target^T: c equations in r unknowns.
  std::vector<RowVector> eq(c, RowVector(r + 1, 0));
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = 0; j < r; ++j) {
      eq[i][j] = rows(j, i);
    }
    eq[i][r] = target[i];
  }
  std::vector<std::size_t> pivot_col;
  std::size_t rank = 0;
  for (std::size_t j = 0; j < r && rank < c; ++j) {
    std::size_t p = rank;
    while (p < c && eq[p][j] == 0) {
      ++p;
    }
    if (p == c) {
      continue;
    }
    std::swap(eq[p], eq[rank]);
    Element const s = f.inv(eq[rank][j]);
    for (auto& v : eq[rank]) {
      v = f.mul(v, s);
    }
    for (std::size_t i = 0; i < c; ++i) {
      Element const factor = eq[i][j];
      if (i == rank || factor == 0) {
        continue;
      }
      for (std::size_t k = 0; k <= r; ++k) {
        eq[i][k] = f.sub(eq[i][k], f.mul(factor, eq[rank][k]));
      }
    }
    pivot_col.push_back(j);
    ++rank;
  }
  for (std::size_t i = rank; i < c; ++i) {
    if (eq[i][r] != 0) {
      return std::nullopt;
    }
  }
  RowVector a(r, 0);
  for (std::size_t i = 0; i < rank; ++i) {
    a[pivot_col[i]] = eq[i][r];
  }
  return a;
}

struct RowUpdate {
  unsigned row;
  RowVector target;  // over the full input, width entries
};

/// Realizes the schedule; consecutive updates of one row collapse and
/// no-op updates vanish.
LinearProgram compile_rows(Field const& field, unsigned outputs, unsigned cells,
                           std::vector<RowUpdate> const& schedule) {
  unsigned const width = outputs + cells;
  LinearProgram out{field, outputs, cells, {}};
  MatrixGF current = MatrixGF::identity(field, width);
  std::vector<MatrixGF> before;
  for (auto const& u : schedule) {
    if (!out.steps.empty() && out.steps.back().target == u.row) {
      current = before.back();
      before.pop_back();
      out.steps.pop_back();
    }
    if (current.row(u.row) == u.target) {
      continue;
    }
    auto a = solve_combination(current, u.target);
    if (!a) {
      throw std::logic_error("scheduled row is outside the register span");
    }
    before.push_back(current);
    out.steps.push_back({u.row, *a});
    current.set_row(u.row, u.target);
  }
  return out;
}

/// Removes scratch writes not read before the next write to the same cell.
LinearProgram drop_dead_scratch(LinearProgram p) {
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < p.steps.size(); ++s) {
      unsigned const t = p.steps[s].target;
      if (t < p.outputs) {
        continue;
      }
      bool live = false;
      for (std::size_t k = s + 1; k < p.steps.size(); ++k) {
        if (p.steps[k].coeffs[t] != 0) {
          live = true;
          break;
        }
        if (p.steps[k].target == t) {
          break;
        }
      }
      if (!live) {
        p.steps.erase(p.steps.begin() + static_cast<std::ptrdiff_t>(s));
        changed = true;
        break;
      }
    }
  }
  return p;
}

RowVector padded(RowVector v, std::size_t width) {
  v.resize(width, 0);
  return v;
}

void require_nonsingular(MatrixGF const& m) {
  require(m.rows() == m.cols(), ErrorKind::invalid_input, "matrix must be square");
  require(m.is_nonsingular(), ErrorKind::unsupported, "matrix is singular");
}

}  // namespace

RowVector find_helper_row(MatrixGF const& m, std::vector<RowVector> const& helpers) {
  Field const& f = m.field();
  std::size_t const n = m.rows();
  std::size_t const k = helpers.size();
  require(k < n, ErrorKind::invalid_input, "too many helper rows");
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    total *= f.q();
  }
  std::vector<RowVector> units = helpers;
  std::vector<RowVector> targets = helpers;
  units.emplace_back();
  targets.emplace_back();
  for (std::size_t i = k + 1; i < n; ++i) {
    units.push_back(unit_row(n, i));
    targets.push_back(m.row(i));
  }
  for (std::uint64_t code = 0; code < total; ++code) {
    RowVector v(n, 0);
    std::uint64_t rest = code;
    for (std::size_t j = n; j-- > 0;) {
      v[j] = static_cast<Element>(rest % f.q());
      rest /= f.q();
    }
    units[k] = v;
    targets[k] = v;
    if (MatrixGF(f, units).is_nonsingular() && MatrixGF(f, targets).is_nonsingular()) {
      return v;
    }
  }
  throw std::logic_error("no helper row exists");
}

LinearProgram synth_linear(MatrixGF const& m) {
  require_nonsingular(m);
  auto const n = static_cast<unsigned>(m.rows());
  std::vector<RowUpdate> schedule;
  std::vector<RowVector> helpers;
  for (unsigned k = 0; k + 1 < n; ++k) {
    helpers.push_back(find_helper_row(m, helpers));
    schedule.push_back({k, helpers.back()});
  }
  for (unsigned k = n; k-- > 0;) {
    schedule.push_back({k, m.row(k)});
  }
  return compile_rows(m.field(), n, 0, schedule);
}

BigInt count_increasing(unsigned q, unsigned n) {
  BigInt out = 1;
  for (unsigned i = 0; i < n; ++i) {
    out *= q - 1;
  }
  for (unsigned i = 0; i < n * (n - 1); ++i) {
    out *= q;
  }
  return out;
}

std::uint64_t count_increasing_brute(Field const& field, unsigned n) {
  std::uint64_t total = 1;
  for (unsigned i = 0; i < n * n; ++i) {
    total *= field.q();
    require(total <= (std::uint64_t{1} << 26), ErrorKind::unsupported,
            "too many matrices to enumerate");
  }
  std::uint64_t count = 0;
  for (std::uint64_t key = 0; key < total; ++key) {
    MatrixGF const m = matrix_from_key(field, n, key);
    bool ok = true;
    MatrixGF running = MatrixGF::identity(field, n);
    for (unsigned k = 0; k < n && ok; ++k) {
      running.set_row(k, m.row(k));
      ok = running.is_nonsingular();
    }
    count += ok ? 1 : 0;
  }
  return count;
}

ScaledDecomposition scale_decompose(MatrixGF const& m) {
  require(m.rows() == m.cols(), ErrorKind::invalid_input, "matrix must be square");
  Field const& f = m.field();
  ScaledDecomposition d{m, RowVector(m.rows(), 1), 0};
  for (std::size_t r = 0; r < m.rows(); ++r) {
    RowVector row = m.row(r);
    auto lead = std::find_if(row.begin(), row.end(), [](Element v) { return v != 0; });
    require(lead != row.end(), ErrorKind::invalid_input, "zero row cannot be scaled");
    Element const mu = *lead;
    Element const mu_inv = f.inv(mu);
    for (auto& v : row) {
      v = f.mul(v, mu_inv);
    }
    d.scalars[r] = mu;
    d.scaled.set_row(r, row);
    RowVector const e = unit_row(m.rows(), r);
    if (m.row(r) != e && row == e) {
      ++d.trivial_scaled_rows;
    }
  }
  return d;
}

namespace {

/// Rewrites p so output t's final value is multiplied by scale[t].
LinearProgram rescale_outputs(LinearProgram const& p, RowVector const& scale) {
  Field const& f = p.field;
  std::vector<std::optional<std::size_t>> last(p.outputs);
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    if (p.steps[s].target < p.outputs) {
      last[p.steps[s].target] = s;
    }
  }
  // Original register j equals rho[j] times the rewritten one.
  RowVector rho(p.width(), 1);
  LinearProgram out{p.field, p.outputs, p.memory_cells, {}};
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    auto const& step = p.steps[s];
    Element const tau = last[step.target] == s ? scale[step.target] : 1;
    RowVector a(step.coeffs.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      a[j] = f.mul(tau, f.mul(step.coeffs[j], rho[j]));
    }
    out.steps.push_back({step.target, std::move(a)});
    rho[step.target] = f.inv(tau);
  }
  for (unsigned t = 0; t < p.outputs; ++t) {
    if (!last[t] && scale[t] != 1) {
      RowVector a(p.width(), 0);
      a[t] = scale[t];
      out.steps.push_back({t, std::move(a)});
    }
  }
  return out;
}

}  // namespace

LinearProgram scaled_program_from(LinearProgram const& p, ScaledDecomposition const& d) {
  RowVector inverse_scale(d.scalars.size());
  for (std::size_t i = 0; i < inverse_scale.size(); ++i) {
    inverse_scale[i] = p.field.inv(d.scalars[i]);
  }
  return rescale_outputs(p, inverse_scale);
}

LinearProgram program_from_scaled(LinearProgram const& p, ScaledDecomposition const& d) {
  return rescale_outputs(p, d.scalars);
}

std::uint64_t matrix_key(MatrixGF const& m) {
  std::uint64_t key = 0;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      key = key * m.field().q() + m(r, c);
    }
  }
  return key;
}

MatrixGF matrix_from_key(Field const& field, unsigned n, std::uint64_t key) {
  MatrixGF m(field, n, n);
  for (std::size_t i = n * n; i-- > 0;) {
    m.at(i / n, i % n) = static_cast<Element>(key % field.q());
    key /= field.q();
  }
  return m;
}

std::vector<MatrixGF> linear_generators(Field const& field, unsigned n) {
  std::uint64_t vectors = 1;
  for (unsigned i = 0; i < n; ++i) {
    vectors *= field.q();
  }
  std::vector<MatrixGF> out;
  std::unordered_set<std::uint64_t> seen;
  for (unsigned i = 0; i < n; ++i) {
    for (std::uint64_t code = 0; code < vectors; ++code) {
      RowVector v(n, 0);
      std::uint64_t rest = code;
      for (unsigned j = n; j-- > 0;) {
        v[j] = static_cast<Element>(rest % field.q());
        rest /= field.q();
      }
      if (v[i] == 0) {
        continue;
      }
      MatrixGF s = instruction_matrix(field, {i, v});
      if (seen.insert(matrix_key(s)).second) {
        out.push_back(std::move(s));
      }
    }
  }
  return out;
}

BigInt linear_generator_count(unsigned q, unsigned n) {
  BigInt out = n;
  for (unsigned i = 0; i + 1 < n; ++i) {
    out *= q;
  }
  out *= q - 1;
  return out - n + 1;
}

std::unordered_map<std::uint64_t, unsigned> linear_distances(Field const& field, unsigned n) {
  std::vector<MatrixGF> gens;
  for (auto& g : linear_generators(field, n)) {
    if (!(g == MatrixGF::identity(field, n))) {
      gens.push_back(std::move(g));
    }
  }
  std::unordered_map<std::uint64_t, unsigned> dist;
  MatrixGF const id = MatrixGF::identity(field, n);
  dist.emplace(matrix_key(id), 0);
  std::deque<MatrixGF> queue{id};
  while (!queue.empty()) {
    MatrixGF const x = std::move(queue.front());
    queue.pop_front();
    unsigned const d = dist.at(matrix_key(x));
    for (auto const& g : gens) {
      MatrixGF y = g * x;
      if (dist.emplace(matrix_key(y), d + 1).second) {
        queue.push_back(std::move(y));
      }
    }
  }
  return dist;
}

unsigned linear_memory_cells(unsigned n) { return n % 2 == 0 ? n / 2 : (n + 1) / 2 + 1; }

LinearProgram synth_linear_memory(MatrixGF const& m) {
  require_nonsingular(m);
  Field const& f = m.field();
  auto const n = static_cast<unsigned>(m.rows());
  // Odd n: work with diag(M, 1); the extra coordinate becomes scratch.
  unsigned const even = n + n % 2;
  unsigned const half = even / 2;
  unsigned const width = even + half;
  MatrixGF ext = MatrixGF::identity(f, even);
  for (unsigned r = 0; r < n; ++r) {
    ext.set_row(r, padded(m.row(r), even));
  }

  // N: rows kept outside span(M_1, N so far) and span(J, N so far).
  std::vector<RowVector> top;
  std::vector<RowVector> units;
  for (unsigned i = 0; i < half; ++i) {
    top.push_back(ext.row(i));
    units.push_back(unit_row(even, half + i));
  }
  std::uint64_t total = 1;
  for (unsigned i = 0; i < even; ++i) {
    total *= f.q();
  }
  std::vector<RowVector> helper;
  for (unsigned k = 0; k < half; ++k) {
    bool found = false;
    for (std::uint64_t code = 0; code < total && !found; ++code) {
      RowVector v(even, 0);
      std::uint64_t rest = code;
      for (unsigned j = even; j-- > 0;) {
        v[j] = static_cast<Element>(rest % f.q());
        rest /= f.q();
      }
      auto a = top;
      auto b = units;
      a.insert(a.end(), helper.begin(), helper.end());
      b.insert(b.end(), helper.begin(), helper.end());
      a.push_back(v);
      b.push_back(v);
      if (MatrixGF(f, a).rank() == a.size() && MatrixGF(f, b).rank() == b.size()) {
        helper.push_back(v);
        found = true;
      }
    }
    if (!found) {
      throw std::logic_error("no helper row for the scratch block");
    }
  }

  std::vector<RowUpdate> schedule;
  for (unsigned k = 0; k < half; ++k) {
    schedule.push_back({even + k, padded(helper[k], width)});
  }
  for (unsigned i = 0; i < even; ++i) {
    schedule.push_back({i, padded(ext.row(i), width)});
  }
  LinearProgram p = compile_rows(f, even, half, schedule);
  p.outputs = n;
  p.memory_cells = width - n;
  return drop_dead_scratch(std::move(p));
}

}  // namespace mlc
