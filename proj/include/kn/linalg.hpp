#pragma once

#include <optional>
#include <vector>

#include "kn/jet.hpp"

namespace kn {

class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * static_cast<size_t>(cols)) {}

  static Matrix identity(int n);

  int rows() const { return r_; }
  int cols() const { return c_; }
  Jet& operator()(int i, int j) { return a_[static_cast<size_t>(i) * static_cast<size_t>(c_) + static_cast<size_t>(j)]; }
  const Jet& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * static_cast<size_t>(c_) + static_cast<size_t>(j)]; }

  bool is_zero() const;
  // Some s with this == s * identity, if any.
  std::optional<Jet> scalar_value() const;
  Matrix transpose() const;
  // Componentwise projection of jets onto a part: 0 value, 1 d1, 2 d2, 3 d12.
  Matrix part(int which) const;

  Matrix& operator+=(const Matrix& o);
  Matrix& operator-=(const Matrix& o);
  Matrix& operator*=(const Jet& s);

  friend bool operator==(const Matrix& a, const Matrix& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.a_ == b.a_; }

 private:
  int r_ = 0, c_ = 0;
  std::vector<Jet> a_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(Matrix a, const Jet& s);
Matrix commutator(const Matrix& a, const Matrix& b);

// Row echelon form over jets with unit pivots. Columns are visited in col_order
// (default: natural order). A column whose remaining entries are all nilpotent
// is skipped, so the rank is the rank of the value part for generic inputs.
struct Echelon {
  std::vector<std::vector<Jet>> rows;  // reduced rows, pivot entry normalized to 1
  std::vector<int> pivots;             // pivot column of each row
  int cols = 0;

  int rank() const { return static_cast<int>(pivots.size()); }
  // Reduce v against the rows (pivot coordinates become zero).
  void reduce(std::vector<Jet>& v) const;
  bool in_span(std::vector<Jet> v) const;
};

Echelon echelon(const std::vector<std::vector<Jet>>& rows, int cols, const std::vector<int>& col_order = {});
int rank(const Matrix& m);
// Basis of {x : m x = 0}.
std::vector<std::vector<Jet>> kernel(const Matrix& m);
// Some x with m x = b, or nullopt.
std::optional<std::vector<Jet>> solve(const Matrix& m, const std::vector<Jet>& b);

}  // namespace kn
