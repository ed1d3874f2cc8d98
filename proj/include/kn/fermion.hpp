#pragma once

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

#include "kn/algebras.hpp"

namespace kn {

// psi_M = A_{n,p} (x) v_i with M = n*N*rank + (p-1)*rank + (i-1); i is 0-based here.
struct WedgeIndexMap {
  int N = 1;
  int rank = 1;

  long layer_size() const { return static_cast<long>(N) * rank; }
  long index(int n, int p, int i) const { return static_cast<long>(n) * layer_size() + (p - 1) * rank + i; }
  std::tuple<int, int, int> split(long M) const;
  int layer(long M) const;
};

// Occupied set = {M >= charge * layer_size} minus holes plus particles.
struct WedgeMonomial {
  int charge = 0;
  std::vector<long> holes;      // sorted, all >= base
  std::vector<long> particles;  // sorted, all < base

  long degree() const;
  friend auto operator<=>(const WedgeMonomial&, const WedgeMonomial&) = default;
  friend bool operator==(const WedgeMonomial&, const WedgeMonomial&) = default;
};

using WedgeVector = std::map<WedgeMonomial, Jet>;

struct Truncation {
  long d_min = 0;
  long exact_margin = 0;
};

// One-particle image of a basis fermion: M -> coefficient.
using Column = std::map<long, Jet>;

void add_to(WedgeVector& y, const Jet& a, const WedgeVector& x);

// A one-particle operator given by its columns; images of layer n lie in layers
// >= n + min_shift.
struct OneParticleOp {
  std::function<Column(long)> column;
  int min_shift = 0;
};

class FermionModule {
 public:
  FermionModule(std::shared_ptr<const KNAlgebra> alg, int rank);

  const KNAlgebra& alg() const { return *alg_; }
  std::shared_ptr<const KNAlgebra> alg_ptr() const { return alg_; }
  const WedgeIndexMap& index() const { return idx_; }
  int rank() const { return idx_.rank; }
  long base(int charge) const { return charge * idx_.layer_size(); }

  WedgeMonomial vacuum(int charge) const;
  bool occupied(const WedgeMonomial& m, long M) const;

  // (x (x) A_{k,q}) psi_M and the action of a differential operator on psi_M.
  Column gamma_action(const Matrix& x, KNIndex idx, long M) const;
  Column column(const DiffOpElement& op, long M) const;

  // Regularized action; exact on finite vectors. With a truncation, the input must
  // have degrees >= d_min (else TruncationOverflow) and the output keeps degrees
  // >= d_min - exact_margin.
  WedgeVector apply(const DiffOpElement& op, const WedgeVector& v, std::optional<Truncation> trunc = std::nullopt) const;
  WedgeVector apply(const DiffOpElement& op, const WedgeMonomial& m) const;
  WedgeVector apply_current(const CurrentElement& x, const WedgeVector& v, std::optional<Truncation> trunc = std::nullopt) const;
  WedgeVector apply_vector_field(const Expansion& e, const WedgeVector& v, std::optional<Truncation> trunc = std::nullopt) const;

  // Regularized action of a general one-particle operator.
  WedgeVector apply(const OneParticleOp& op, const WedgeMonomial& m) const;
  WedgeVector apply(const OneParticleOp& op, const WedgeVector& v) const;
  OneParticleOp one_particle(const DiffOpElement& op) const;

  // The diagonal regularization scalar of op on m.
  Jet lambda1(const DiffOpElement& op, const WedgeMonomial& m) const;
  Jet lambda1(const OneParticleOp& op, const WedgeMonomial& m) const;

  // pi([X,Y]) - [pi(X), pi(Y)] on every monomial of the window; NotScalar otherwise.
  Jet projective_defect(const DiffOpElement& X, const DiffOpElement& Y, int charge, long d_min) const;

  // All monomials of the charge with degree in [d_min, 0], sorted.
  std::vector<WedgeMonomial> window(int charge, long d_min) const;

 private:
  // Occupied positions from which op can reach an unoccupied one.
  std::vector<long> active_positions(int kmin, const WedgeMonomial& m) const;
  int min_degree(const DiffOpElement& op) const;

  std::shared_ptr<const KNAlgebra> alg_;
  WedgeIndexMap idx_;
};

// Replaces psi_from by psi_to (from occupied, to unoccupied); returns the sign.
int move_particle(WedgeMonomial& m, long base, long from, long to);

// Matrix of an operator on a window; rows are restricted to the window.
struct OperatorWindow {
  std::vector<WedgeMonomial> basis;
  std::vector<std::tuple<int, int, Jet>> entries;  // (row, col, value)
};

OperatorWindow operator_window(const FermionModule& F, const DiffOpElement& op, int charge, long d_min);

DiffOpElement current_op(int rank, const Matrix& x, const Expansion& a);
DiffOpElement current_op(int rank, const Matrix& x, KNIndex idx);
DiffOpElement vector_op(int rank, const Expansion& e);

}  // namespace kn
