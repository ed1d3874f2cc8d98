#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "kn/sugawara.hpp"

namespace kn {

// d/dz_p carried by the nilpotent jet slot (1 or 2) attached to the point.
struct ModuliDirection {
  int point = 1;
  int slot = 1;
};

// Adds eps_slot to the coordinate of each direction's point.
MarkedConfig with_directions(const MarkedConfig& base, const std::vector<ModuliDirection>& dirs);

// Derivative along a jet slot; the other slot is kept.
Jet d_slot(const Jet& j, int slot);
Expansion d_slot(const Expansion& e, int slot);
WedgeVector d_slot(const WedgeVector& v, int slot);
Matrix d_slot(const Matrix& m, int slot);
Matrix value_part(const Matrix& m);

// Moduli derivative of point-monomial terms through the constants and the points.
std::vector<PMTerm> pm_moduli_derivative(const std::vector<PMTerm>& ts, const MarkedConfig& cfg, int slot);

// d/dz_p of a basis element as a function or vector field (fixed z), expanded in the basis.
Expansion basis_moduli_derivative(const Geometry& geo, int lambda, KNIndex idx, int slot);
Expansion moduli_derivative(const Geometry& geo, int lambda, const Expansion& f, int slot);

// Default pull-back e_{-1,p} of d/dz_p.
Expansion pullback(int point);

// How the basis fermions depend on moduli: constant symbols, or transported with
// the basis functions (adds the second quantization of d/dz_p on the basis).
enum class Frame { Basis, Transported };

// One-particle matrix of d/dz_p acting on the moving basis fermions.
OneParticleOp frame_motion(const FermionModule& F, int slot);

// Generators u(A) v with A in the regular window basis, u in the gl(n) basis and v
// in the window; only generators whose image stays in the window are kept.
struct RegularSpan {
  std::vector<WedgeVector> generators;  // filled by regular_span only
  std::vector<Expansion> functions;     // regular window basis used
  long kept = 0, dropped = 0;
};

RegularSpan regular_span(const FermionModule& F, int charge, long d_min);

// Sparse reduced echelon; a new row takes as pivot its first unit entry in the
// column priority, so the pivot set is the greedy one for that priority.
class SparseEchelon {
 public:
  using Row = std::map<int, Jet>;
  explicit SparseEchelon(std::vector<int> priority = {}) : priority_(std::move(priority)) {}
  // Returns false when the row reduces to zero or to nilpotent entries only.
  bool add(Row v);
  void reduce(Row& v) const;
  bool is_pivot(int c) const { return rows_.count(c) > 0; }
  int rank() const { return static_cast<int>(rows_.size()); }

 private:
  std::vector<int> priority_;  // rank of each column in the visiting order
  std::map<int, Row> rows_;    // by pivot column
};

// Coinvariants computed on the window of degree >= d_min - lookahead modulo the
// generators that stay there. Blocks are the section monomials of degree >= d_min;
// the lookahead removes spurious classes created by generators cut off at the bottom.
// The section is greedy by degree descending. Default lookahead: two layers.
class CoinvariantSpace {
 public:
  CoinvariantSpace(const FermionModule& F, int charge, long d_min,
                   std::optional<std::vector<WedgeMonomial>> section = std::nullopt, long lookahead = -1);

  int dimension() const { return static_cast<int>(section_.size()); }
  int charge() const { return charge_; }
  long d_min() const { return d_min_; }
  long depth() const { return depth_; }
  const std::vector<WedgeMonomial>& window() const { return window_; }  // down to depth()
  const std::vector<WedgeMonomial>& section() const { return section_; }
  // Further quotient monomials below d_min.
  const std::vector<WedgeMonomial>& tail() const { return tail_; }
  const RegularSpan& span() const { return span_; }

  bool in_window(const WedgeVector& v) const;
  // Coordinates modulo the regular span on section() followed by tail();
  // WindowTooSmall outside the window.
  std::vector<Jet> project(const WedgeVector& v) const;
  bool in_regular_span(const WedgeVector& v) const;

 private:
  int charge_;
  long d_min_, depth_;
  std::vector<WedgeMonomial> window_, section_, tail_;
  std::map<WedgeMonomial, int> pos_;
  std::vector<int> quotient_;  // window columns of section then tail
  SparseEchelon ech_;
  RegularSpan span_;
};

struct BlocksReport {
  int dimension = 0;
  bool stabilized = false;
  std::vector<std::pair<long, int>> dims;  // (d_min, dimension)
};

// Dimensions at d_min, d_min - 1, d_min - 2; stabilized when all agree.
// The reported dimension is the one at d_min.
BlocksReport blocks_report(const FermionModule& F, int charge, long d_min);

// nabla_X = d_X + T(e_X) (+ frame motion) on one jet configuration.
class Connection {
 public:
  Connection(std::shared_ptr<const Sugawara> S, int charge, long d_min, Frame frame = Frame::Basis,
             std::optional<std::vector<WedgeMonomial>> section = std::nullopt);

  const CoinvariantSpace& blocks() const { return blocks_; }
  // Space reaching at least down to depth with the same blocks.
  const CoinvariantSpace& work(long depth) const;
  const Sugawara& sugawara() const { return *S_; }
  const FermionModule& module() const { return S_->module(); }
  Frame frame() const { return frame_; }

  // Operator part T(e_X) (+ frame motion) and the full nabla_X on a vector.
  WedgeVector potential(const ModuliDirection& X, const Expansion& eX, const WedgeVector& v) const;
  WedgeVector apply(const ModuliDirection& X, const Expansion& eX, const WedgeVector& v) const;

  // Block matrix of the potential on the section: nabla = d + B. Coordinates on
  // section elements below the block window are counted in *leak.
  // The working depth defaults to the lowest degree reached by the potential.
  Matrix block_matrix(const ModuliDirection& X, const Expansion& eX, int* leak = nullptr,
                      std::optional<long> depth = std::nullopt) const;
  long potential_depth(const ModuliDirection& X, const Expansion& eX) const;

  // [nabla_X, u(A)] v in the regular span for A regular, u in gl(n), v in the window.
  struct WellDefined {
    bool ok = true;
    int checked = 0, skipped = 0, failures = 0;
  };
  // Defects reaching below the computing window are skipped.
  WellDefined well_defined(const ModuliDirection& X, const Expansion& eX) const;

  // [nabla_X, nabla_Y] on blocks at the base point; NotScalar unless a multiple of 1.
  Jet curvature(const ModuliDirection& X, const Expansion& eX, const ModuliDirection& Y, const Expansion& eY) const;

 private:
  std::shared_ptr<const Sugawara> S_;
  Frame frame_;
  CoinvariantSpace blocks_;
  mutable std::mutex mu_;
  mutable std::map<long, std::unique_ptr<CoinvariantSpace>> work_;
};

// Builds the fermion module and detects the level.
std::shared_ptr<const Sugawara> make_sugawara(const MarkedConfig& cfg, int rank, long level_depth = -3);

// Jet-derivative identities at the base point.
struct IdentityReport {
  int checked = 0;
  int failures = 0;
  // Operator identities: samples with a nonzero defect, with a defect that is not a
  // common multiple of the identity, and that common multiple when there is one.
  int nonzero = 0, nonscalar = 0;
  std::optional<Q> scalar;
  bool ok() const { return failures == 0; }
};

// A^X = d_X A + e_X.A has order >= 1 at infinity for regular A.
IdentityReport check_nabl(const KNAlgebra& alg, const ModuliDirection& X, const std::vector<Expansion>& regular_functions);
// e^X = d_X e + [e_X, e] has order >= 1 at infinity for regular e.
IdentityReport check_reg1(const KNAlgebra& alg, const ModuliDirection& X, const std::vector<Expansion>& regular_fields);
// [e_X, e_Y] + d_X e_Y - d_Y e_X has order >= 1 at infinity.
IdentityReport check_ue(const KNAlgebra& alg, const ModuliDirection& X, const ModuliDirection& Y);
// d_X u(A) - u(d_X A) vanishes on the window (failures count nonzero defects); in the
// basis frame d_X A is read on the one-particle matrix entries, in the transported
// frame it is the function derivative.
IdentityReport check_normal(const Connection& C, const ModuliDirection& X, const Matrix& u, const Expansion& A);
// d_X T(e) - T(d_X e) is scalar on the window (failures count non-scalar defects).
IdentityReport check_norm1(const Connection& C, const ModuliDirection& X, const Expansion& e);

// First-order system d_p Psi = -M_p Psi on block coordinates.
struct KZPole {
  int p = 0, r = 0;
  bool simple = false;
  std::vector<std::vector<Q>> residue;  // lim (z_p - z_r) M_p
};

struct KZSystem {
  int direction = 0;
  int dimension = 0;
  std::vector<std::vector<Q>> matrix;  // M_p at the base configuration
  std::vector<KZPole> poles;
};

// M_p at the base point; poles from exact rational reconstruction of M_p in each
// other point coordinate.
KZSystem kz_emit(const MarkedConfig& base, int rank, int charge, long d_min, int p, Frame frame = Frame::Basis,
                 bool with_poles = true);

}  // namespace kn
