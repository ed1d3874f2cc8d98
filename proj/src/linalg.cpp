#include "kn/linalg.hpp"

#include <numeric>

#include "kn/errors.hpp"

namespace kn {

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Jet(1);
  return m;
}

bool Matrix::is_zero() const {
  for (const auto& x : a_)
    if (!x.is_zero()) return false;
  return true;
}

std::optional<Jet> Matrix::scalar_value() const {
  if (r_ != c_) return std::nullopt;
  if (r_ == 0) return Jet();
  Jet s = (*this)(0, 0);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) {
      const Jet& x = (*this)(i, j);
      if (i == j ? x != s : !x.is_zero()) return std::nullopt;
    }
  return s;
}

Matrix Matrix::transpose() const {
  Matrix t(c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::part(int which) const {
  Matrix m(r_, c_);
  for (size_t k = 0; k < a_.size(); ++k) {
    const Jet& x = a_[k];
    switch (which) {
      case 0: m.a_[k] = Jet(x.v()); break;
      case 1: m.a_[k] = Jet(x.d1()); break;
      case 2: m.a_[k] = Jet(x.d2()); break;
      default: m.a_[k] = Jet(x.d12()); break;
    }
  }
  return m;
}

Matrix& Matrix::operator+=(const Matrix& o) {
  if (r_ != o.r_ || c_ != o.c_) throw KnError(ErrorKind::DimensionMismatch, "matrix sum");
  for (size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& o) {
  if (r_ != o.r_ || c_ != o.c_) throw KnError(ErrorKind::DimensionMismatch, "matrix difference");
  for (size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
  return *this;
}

Matrix& Matrix::operator*=(const Jet& s) {
  for (auto& x : a_) x *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, const Jet& s) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw KnError(ErrorKind::DimensionMismatch, "matrix product");
  Matrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const Jet& x = a(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < b.cols(); ++j)
        if (!b(k, j).is_zero()) c(i, j) += x * b(k, j);
    }
  return c;
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

void Echelon::reduce(std::vector<Jet>& v) const {
  for (size_t r = 0; r < rows.size(); ++r) {
    Jet f = v[static_cast<size_t>(pivots[r])];
    if (f.is_zero()) continue;
    const auto& row = rows[r];
    for (size_t j = 0; j < row.size(); ++j)
      if (!row[j].is_zero()) v[j] -= f * row[j];
  }
}

bool Echelon::in_span(std::vector<Jet> v) const {
  reduce(v);
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

Echelon echelon(const std::vector<std::vector<Jet>>& input, int cols, const std::vector<int>& col_order) {
  std::vector<int> order = col_order;
  if (order.empty()) {
    order.resize(static_cast<size_t>(cols));
    std::iota(order.begin(), order.end(), 0);
  }
  std::vector<std::vector<Jet>> a = input;
  std::vector<bool> used(a.size(), false);
  Echelon e;
  e.cols = cols;
  for (int c : order) {
    int piv = -1;
    for (size_t r = 0; r < a.size(); ++r)
      if (!used[r] && a[r][static_cast<size_t>(c)].is_unit()) {
        piv = static_cast<int>(r);
        break;
      }
    if (piv < 0) continue;
    used[static_cast<size_t>(piv)] = true;
    auto& pr = a[static_cast<size_t>(piv)];
    Jet inv = pr[static_cast<size_t>(c)].inverse();
    for (auto& x : pr)
      if (!x.is_zero()) x *= inv;
    for (size_t r = 0; r < a.size(); ++r) {
      if (static_cast<int>(r) == piv) continue;
      Jet f = a[r][static_cast<size_t>(c)];
      if (f.is_zero()) continue;
      for (size_t j = 0; j < pr.size(); ++j)
        if (!pr[j].is_zero()) a[r][j] -= f * pr[j];
    }
    // rows already in the echelon must also be reduced at this column
    for (auto& er : e.rows) {
      Jet f = er[static_cast<size_t>(c)];
      if (f.is_zero()) continue;
      for (size_t j = 0; j < pr.size(); ++j)
        if (!pr[j].is_zero()) er[j] -= f * pr[j];
    }
    e.rows.push_back(pr);
    e.pivots.push_back(c);
  }
  return e;
}

int rank(const Matrix& m) {
  std::vector<std::vector<Jet>> rows(static_cast<size_t>(m.rows()), std::vector<Jet>(static_cast<size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
  return echelon(rows, m.cols()).rank();
}

std::vector<std::vector<Jet>> kernel(const Matrix& m) {
  std::vector<std::vector<Jet>> rows(static_cast<size_t>(m.rows()), std::vector<Jet>(static_cast<size_t>(m.cols())));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
  Echelon e = echelon(rows, m.cols());
  std::vector<bool> is_piv(static_cast<size_t>(m.cols()), false);
  for (int p : e.pivots) is_piv[static_cast<size_t>(p)] = true;
  std::vector<std::vector<Jet>> out;
  for (int f = 0; f < m.cols(); ++f) {
    if (is_piv[static_cast<size_t>(f)]) continue;
    std::vector<Jet> x(static_cast<size_t>(m.cols()));
    x[static_cast<size_t>(f)] = Jet(1);
    for (size_t r = 0; r < e.rows.size(); ++r) x[static_cast<size_t>(e.pivots[r])] = -e.rows[r][static_cast<size_t>(f)];
    out.push_back(std::move(x));
  }
  return out;
}

std::optional<std::vector<Jet>> solve(const Matrix& m, const std::vector<Jet>& b) {
  int n = m.cols();
  std::vector<std::vector<Jet>> rows(static_cast<size_t>(m.rows()), std::vector<Jet>(static_cast<size_t>(n) + 1));
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < n; ++j) rows[static_cast<size_t>(i)][static_cast<size_t>(j)] = m(i, j);
    rows[static_cast<size_t>(i)][static_cast<size_t>(n)] = b[static_cast<size_t>(i)];
  }
  std::vector<int> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Echelon e = echelon(rows, n + 1, order);
  // consistency: every original row must reduce to zero, including its rhs
  for (const auto& r : rows)
    if (!e.in_span(r)) return std::nullopt;
  std::vector<Jet> x(static_cast<size_t>(n));
  for (size_t r = 0; r < e.rows.size(); ++r) x[static_cast<size_t>(e.pivots[r])] = e.rows[r][static_cast<size_t>(n)];
  // verify
  for (int i = 0; i < m.rows(); ++i) {
    Jet s;
    for (int j = 0; j < n; ++j) s += m(i, j) * x[static_cast<size_t>(j)];
    if (s != b[static_cast<size_t>(i)]) return std::nullopt;
  }
  return x;
}

}  // namespace kn
