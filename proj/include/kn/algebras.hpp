#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "kn/forms.hpp"
#include "kn/linalg.hpp"

namespace kn {

// x_1 (x) A_1 + ... over the A_{n,p} basis, one matrix per basis function.
class CurrentElement {
 public:
  CurrentElement() = default;
  explicit CurrentElement(int rank) : rank_(rank) {}

  int rank() const { return rank_; }
  const std::map<KNIndex, Matrix>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  // Adds x (x) A for a function given by its expansion.
  void add(const Matrix& x, const Expansion& a);
  void add(const Matrix& x, KNIndex idx);
  CurrentElement& operator+=(const CurrentElement& o);
  CurrentElement& operator-=(const CurrentElement& o);
  CurrentElement& operator*=(const Jet& s);

  friend bool operator==(const CurrentElement& a, const CurrentElement& b) {
    return a.rank_ == b.rank_ && a.terms_ == b.terms_;
  }

 private:
  int rank_ = 1;
  std::map<KNIndex, Matrix> terms_;
};

CurrentElement operator+(CurrentElement a, const CurrentElement& b);
CurrentElement operator-(CurrentElement a, const CurrentElement& b);

struct DiffOpElement {
  CurrentElement current;
  Expansion vector;  // over e_{n,p}
  friend bool operator==(const DiffOpElement&, const DiffOpElement&) = default;
};

enum class AlgebraKind { Function, Vector, Current };

enum class SubalgebraKind { Plus, ZeroStrip, Minus, PlusStar, MinusStar, Regular };

struct SubalgebraTag {
  SubalgebraKind kind = SubalgebraKind::Plus;
  int p = 0;  // vanishing order parameter for Regular
};

struct StructureEntry {
  KNIndex left, right, out;
  Jet coeff;
};

struct StructureTable {
  std::vector<StructureEntry> entries;
  int R = 0, S = 0;  // realized almost-grading bounds
};

// Expansion arithmetic.
void axpy(Expansion& y, const Jet& a, const Expansion& x);
Expansion scaled(const Expansion& x, const Jet& a);
Expansion clean(Expansion x);

// Multiplication and bracket tables over one configuration, cached.
class KNAlgebra {
 public:
  explicit KNAlgebra(GeometryPtr geo);

  const Geometry& geo() const { return *geo_; }
  GeometryPtr geo_ptr() const { return geo_; }
  int N() const { return geo_->N(); }

  // A_a * A_b
  const Expansion& product(KNIndex a, KNIndex b) const;
  // [e_a, e_b]
  const Expansion& bracket(KNIndex a, KNIndex b) const;
  // e_a . f^lambda_b
  const Expansion& action(int lambda, KNIndex a, KNIndex b) const;

  Expansion multiply(const Expansion& a, const Expansion& b) const;
  Expansion bracket(const Expansion& e, const Expansion& f) const;
  Expansion act(const Expansion& e, int lambda, const Expansion& f) const;

  CurrentElement bracket_currents(const CurrentElement& x, const CurrentElement& y) const;
  // [e, x (x) A] = x (x) e.A
  CurrentElement act_on_current(const Expansion& e, const CurrentElement& x) const;
  DiffOpElement bracket_diffop(const DiffOpElement& a, const DiffOpElement& b) const;

  // 1 = sum_p A_{0,p}
  Expansion unit() const;

  // Weight-corrected order at infinity of a weight-lambda expansion.
  int order_at_infinity(int lambda, const Expansion& f) const;

  // Smallest K >= 0 such that every A_{n,p} with n <= -K-1 vanishes at infinity,
  // and smallest L >= 0 such that every e_{n,p} with n <= -L-1 vanishes to order >= 2.
  int strip_K() const;
  int strip_L() const;

  // Membership test; weight 0 for functions, -1 for vector fields.
  bool member(int lambda, const Expansion& f, const SubalgebraTag& tag) const;

  // Basis (echelon form) of the functions in span{A_{n,p} : lo <= n <= hi} with
  // order >= order_min at infinity, by an exact kernel computation.
  std::vector<Expansion> regular_functions(int lo, int hi, int order_min = 1) const;
  // Same for weight-lambda forms with the weight-corrected order.
  std::vector<Expansion> regular_forms(int lambda, int lo, int hi, int order_min = 1) const;

 private:
  using Key = std::tuple<int, int, int, int, int>;
  const Expansion& cached(const Key& key) const;

  GeometryPtr geo_;
  mutable std::mutex mu_;
  mutable std::map<Key, Expansion> cache_;
};

// Form-level operations.
KNForm multiply_functions(const KNForm& a, const KNForm& b);
KNForm bracket_vector_fields(const KNForm& e, const KNForm& f);

// Structure constants of the basis elements with degrees in [lo, hi].
StructureTable structure_constants(const KNAlgebra& alg, AlgebraKind kind, int lo, int hi);
// Realized module bounds T, U of e_{n,p} . f^lambda_{m,r} over degrees in [lo, hi].
std::pair<int, int> module_bounds(const KNAlgebra& alg, int lambda, int lo, int hi);

// gl(n) helpers: E_ij with 0-based indices.
Matrix elementary(int n, int i, int j);

std::string algebra_name(AlgebraKind k);
AlgebraKind parse_algebra(const std::string& s);
SubalgebraTag parse_subalgebra(const std::string& s);

}  // namespace kn
