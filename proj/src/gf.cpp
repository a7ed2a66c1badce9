#include "mlc/gf.hpp"

#include <algorithm>
#include <sstream>

namespace mlc {

unsigned prime_power_base(unsigned q) {
  if (q < 2) {
    return 0;
  }
  unsigned p = 2;
  while (static_cast<std::uint64_t>(p) * p <= q && q % p != 0) {
    ++p;
  }
  if (q % p != 0) {
    p = q;  // q itself is prime
  }
  unsigned rest = q;
  while (rest % p == 0) {
    rest /= p;
  }
  return rest == 1 ? p : 0;
}

namespace {

/// Powers of x modulo a monic polynomial, as encoded elements; empty unless x
/// has multiplicative order q-1.
std::vector<Element> powers_of_x(unsigned p, unsigned k, unsigned q,
                                 std::vector<unsigned> const& c) {
  std::vector<unsigned> poly(k, 0);
  poly[0] = 1;
  std::vector<Element> out;
  out.reserve(q - 1);
  std::vector<bool> seen(q, false);
  for (unsigned step = 0; step < q - 1; ++step) {
    Element code = 0;
    for (unsigned j = k; j-- > 0;) {
      code = code * p + poly[j];
    }
    if (code == 0 || seen[code]) {
      return {};
    }
    seen[code] = true;
    out.push_back(code);
    // Multiply by x and reduce with x^k = -sum c_j x^j.
    unsigned const top = poly[k - 1];
    for (unsigned j = k - 1; j > 0; --j) {
      poly[j] = poly[j - 1];
    }
    poly[0] = 0;
    for (unsigned j = 0; j < k; ++j) {
      poly[j] = (poly[j] + (p - c[j]) * top) % p;
    }
  }
  // Order exactly q-1: the next power is back at 1.
  return poly[0] == 1 && std::all_of(poly.begin() + 1, poly.end(), [](unsigned v) {
           return v == 0;
         })
             ? out
             : std::vector<Element>{};
}

}  // namespace

Field::Field(unsigned q) : q_(q), p_(prime_power_base(q)), k_(0) {
  require(p_ != 0, ErrorKind::invalid_input, "field size must be a prime power");
  for (unsigned rest = q; rest > 1; rest /= p_) {
    ++k_;
  }
  if (k_ == 1) {
    return;
  }
  require(q <= (1u << 16), ErrorKind::unsupported, "extension fields limited to 2^16 elements");
  // Lexicographically smallest monic primitive modulus.
  std::vector<unsigned> c(k_, 0);
  for (unsigned code = 0; code < q; ++code) {
    unsigned rest = code;
    for (unsigned j = 0; j < k_; ++j) {
      c[j] = rest % p_;
      rest /= p_;
    }
    if (c[0] == 0) {
      continue;
    }
    auto powers = powers_of_x(p_, k_, q, c);
    if (!powers.empty()) {
      modulus_ = c;
      std::vector<unsigned> logs(q, 0);
      for (unsigned e = 0; e < powers.size(); ++e) {
        logs[powers[e]] = e;
      }
      exp_ = std::make_shared<std::vector<Element> const>(std::move(powers));
      log_ = std::make_shared<std::vector<unsigned> const>(std::move(logs));
      return;
    }
  }
  fail(ErrorKind::invalid_input, "no primitive polynomial found");
}

Element Field::add(Element a, Element b) const {
  if (k_ == 1) {
    return static_cast<Element>((std::uint64_t{a} + b) % p_);
  }
  Element out = 0;
  Element w = 1;
  for (unsigned j = 0; j < k_; ++j) {
    out += ((a % p_ + b % p_) % p_) * w;
    a /= p_;
    b /= p_;
    w *= p_;
  }
  return out;
}

Element Field::neg(Element a) const {
  if (k_ == 1) {
    return a == 0 ? 0 : p_ - a;
  }
  Element out = 0;
  Element w = 1;
  for (unsigned j = 0; j < k_; ++j) {
    out += ((p_ - a % p_) % p_) * w;
    a /= p_;
    w *= p_;
  }
  return out;
}

Element Field::sub(Element a, Element b) const { return add(a, neg(b)); }

Element Field::mul(Element a, Element b) const {
  if (k_ == 1) {
    return static_cast<Element>((std::uint64_t{a} * b) % p_);
  }
  if (a == 0 || b == 0) {
    return 0;
  }
  return (*exp_)[((*log_)[a] + (*log_)[b]) % (q_ - 1)];
}

Element Field::inv(Element a) const {
  require(a != 0, ErrorKind::invalid_input, "zero has no inverse");
  if (k_ == 1) {
    // Fermat: a^(p-2).
    std::uint64_t result = 1;
    std::uint64_t base = a;
    for (unsigned e = p_ - 2; e > 0; e >>= 1) {
      if (e & 1u) {
        result = result * base % p_;
      }
      base = base * base % p_;
    }
    return static_cast<Element>(result);
  }
  return (*exp_)[(q_ - 1 - (*log_)[a]) % (q_ - 1)];
}

bool Field::check_axioms() const {
  for (Element a = 0; a < q_; ++a) {
    if (add(a, 0) != a || mul(a, 1) != a || add(a, neg(a)) != 0) {
      return false;
    }
    if (a != 0 && mul(a, inv(a)) != 1) {
      return false;
    }
    for (Element b = 0; b < q_; ++b) {
      if (add(a, b) != add(b, a) || mul(a, b) != mul(b, a)) {
        return false;
      }
      if (a != 0 && b != 0 && mul(a, b) == 0) {
        return false;
      }
      for (Element c = 0; c < q_; ++c) {
        if (add(add(a, b), c) != add(a, add(b, c)) || mul(mul(a, b), c) != mul(a, mul(b, c)) ||
            mul(a, add(b, c)) != add(mul(a, b), mul(a, c))) {
          return false;
        }
      }
    }
  }
  return true;
}

// ------------------------------------------------------------------ MatrixGF

MatrixGF::MatrixGF(Field field, std::size_t rows, std::size_t cols)
    : field_(std::move(field)), rows_(rows), cols_(cols), data_(rows * cols, 0) {}

MatrixGF::MatrixGF(Field field, std::vector<std::vector<Element>> const& rows)
    : MatrixGF(std::move(field), rows.size(), rows.empty() ? 0 : rows.front().size()) {
  for (std::size_t r = 0; r < rows_; ++r) {
    set_row(r, rows[r]);
  }
}

MatrixGF MatrixGF::identity(Field const& field, std::size_t n) {
  MatrixGF m(field, n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m.at(i, i) = 1;
  }
  return m;
}

std::vector<Element> MatrixGF::row(std::size_t r) const {
  require(r < rows_, ErrorKind::invalid_input, "row out of range");
  return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

void MatrixGF::set_row(std::size_t r, std::vector<Element> const& v) {
  require(r < rows_ && v.size() == cols_, ErrorKind::invalid_input, "row shape mismatch");
  for (std::size_t c = 0; c < cols_; ++c) {
    require(v[c] < field_.q(), ErrorKind::invalid_input, "entry outside the field");
    data_[r * cols_ + c] = v[c];
  }
}

std::size_t MatrixGF::rank() const {
  MatrixGF work = *this;
  std::size_t rank = 0;
  for (std::size_t c = 0; c < cols_ && rank < rows_; ++c) {
    std::size_t pivot = rank;
    while (pivot < rows_ && work(pivot, c) == 0) {
      ++pivot;
    }
    if (pivot == rows_) {
      continue;
    }
    for (std::size_t j = 0; j < cols_; ++j) {
      std::swap(work.at(pivot, j), work.at(rank, j));
    }
    Element const scale = field_.inv(work(rank, c));
    for (std::size_t r = rank + 1; r < rows_; ++r) {
      Element const factor = field_.mul(work(r, c), scale);
      if (factor == 0) {
        continue;
      }
      for (std::size_t j = c; j < cols_; ++j) {
        work.at(r, j) = field_.sub(work(r, j), field_.mul(factor, work(rank, j)));
      }
    }
    ++rank;
  }
  return rank;
}

MatrixGF MatrixGF::inverse() const {
  require(rows_ == cols_, ErrorKind::invalid_input, "only square matrices have inverses");
  std::size_t const n = rows_;
  MatrixGF work = *this;
  MatrixGF inv = identity(field_, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    while (pivot < n && work(pivot, c) == 0) {
      ++pivot;
    }
    require(pivot < n, ErrorKind::unsupported, "matrix is singular");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(work.at(pivot, j), work.at(c, j));
      std::swap(inv.at(pivot, j), inv.at(c, j));
    }
    Element const scale = field_.inv(work(c, c));
    for (std::size_t j = 0; j < n; ++j) {
      work.at(c, j) = field_.mul(work(c, j), scale);
      inv.at(c, j) = field_.mul(inv(c, j), scale);
    }
    for (std::size_t r = 0; r < n; ++r) {
      Element const factor = work(r, c);
      if (r == c || factor == 0) {
        continue;
      }
      for (std::size_t j = 0; j < n; ++j) {
        work.at(r, j) = field_.sub(work(r, j), field_.mul(factor, work(c, j)));
        inv.at(r, j) = field_.sub(inv(r, j), field_.mul(factor, inv(c, j)));
      }
    }
  }
  return inv;
}

std::string MatrixGF::to_string() const {
  std::ostringstream out;
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) {
      out << (c ? " " : "") << (*this)(r, c);
    }
    out << '\n';
  }
  return out.str();
}

MatrixGF operator*(MatrixGF const& a, MatrixGF const& b) {
  require(a.field() == b.field() && a.cols() == b.rows(), ErrorKind::invalid_input,
          "matrix shapes do not multiply");
  Field const& f = a.field();
  MatrixGF out(f, a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      Element const x = a(r, k);
      if (x == 0) {
        continue;
      }
      for (std::size_t c = 0; c < b.cols(); ++c) {
        out.at(r, c) = f.add(out(r, c), f.mul(x, b(k, c)));
      }
    }
  }
  return out;
}

std::vector<Element> times(std::vector<Element> const& v, MatrixGF const& m) {
  require(v.size() == m.rows(), ErrorKind::invalid_input, "vector length mismatch");
  Field const& f = m.field();
  std::vector<Element> out(m.cols(), 0);
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] == 0) {
      continue;
    }
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out[c] = f.add(out[c], f.mul(v[k], m(k, c)));
    }
  }
  return out;
}

MatrixGF stack_rows(Field const& field, std::vector<std::vector<Element>> const& rows) {
  return MatrixGF(field, rows);
}

}  // namespace mlc
