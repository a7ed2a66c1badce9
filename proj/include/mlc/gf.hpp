#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mlc/error.hpp"

namespace mlc {

/// GF(q) element. For q = p^k the integer's base-p digits are the polynomial
/// coefficients (digit j multiplies t^j).
using Element = std::uint32_t;

class Field {
public:
  /// Throws invalid_input unless q is a prime power; unsupported for p^k > 2^16, k > 1.
  explicit Field(unsigned q);

  unsigned q() const noexcept { return q_; }
  unsigned characteristic() const noexcept { return p_; }
  unsigned degree() const noexcept { return k_; }
  bool is_prime() const noexcept { return k_ == 1; }
  /// Monic modulus coefficients c_0..c_{k-1} (x^k = -sum c_j x^j); empty for prime fields.
  std::vector<unsigned> const& modulus() const noexcept { return modulus_; }

  Element add(Element a, Element b) const;
  Element sub(Element a, Element b) const;
  Element neg(Element a) const;
  Element mul(Element a, Element b) const;
  Element inv(Element a) const;
  Element div(Element a, Element b) const { return mul(a, inv(b)); }

  /// Exhaustive check of the field axioms.
  bool check_axioms() const;

  bool operator==(Field const& other) const noexcept { return q_ == other.q_; }

private:
  unsigned q_;
  unsigned p_;
  unsigned k_;
  std::vector<unsigned> modulus_;
  // Shared so copies of a Field are cheap.
  std::shared_ptr<std::vector<Element> const> exp_;
  std::shared_ptr<std::vector<unsigned> const> log_;
};

/// Smallest prime p with q = p^k, or 0 if q is not a prime power.
unsigned prime_power_base(unsigned q);

/// Dense matrix over a finite field. Row i is the coefficient vector of output i.
class MatrixGF {
public:
  MatrixGF(Field field, std::size_t rows, std::size_t cols);
  MatrixGF(Field field, std::vector<std::vector<Element>> const& rows);

  static MatrixGF identity(Field const& field, std::size_t n);

  Field const& field() const noexcept { return field_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  Element operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  Element& at(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::vector<Element> row(std::size_t r) const;
  void set_row(std::size_t r, std::vector<Element> const& v);

  std::size_t rank() const;
  bool is_nonsingular() const { return rows_ == cols_ && rank() == rows_; }
  /// Throws unsupported when singular.
  MatrixGF inverse() const;

  bool operator==(MatrixGF const& other) const {
    return field_ == other.field_ && rows_ == other.rows_ && cols_ == other.cols_ &&
           data_ == other.data_;
  }

  std::string to_string() const;

private:
  Field field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Element> data_;
};

MatrixGF operator*(MatrixGF const& a, MatrixGF const& b);

/// Row vector times matrix.
std::vector<Element> times(std::vector<Element> const& v, MatrixGF const& m);

/// Matrix with the given rows stacked; every row must have the same length.
MatrixGF stack_rows(Field const& field, std::vector<std::vector<Element>> const& rows);

}  // namespace mlc
