#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "kn/cocycles.hpp"
#include "kn/fermion.hpp"

namespace kn {

// One summand of the reductive split with dual bases for alpha.
struct Summand {
  std::string name;  // "s" (scalars) or "sl"
  std::vector<Matrix> basis, dual;
  Q kappa;           // half the Casimir eigenvalue on the adjoint
  Q level;           // detected
};

struct ReductiveSplit {
  int rank = 1;
  Q alpha_scale = 1;  // alpha = alpha_scale * tr(xy)
  std::vector<Summand> summands;
};

// Dual bases of gl(n) = s(n) + sl(n) for alpha = scale * tr(xy), with kappa computed
// from the adjoint Casimir. Levels are left at zero until detected.
ReductiveSplit make_split(int rank, const Q& alpha_scale = 1);

// Casimir eigenvalue on the adjoint divided by two; throws NotScalar otherwise.
Q adjoint_kappa(const std::vector<Matrix>& basis, const std::vector<Matrix>& dual);

// Level of each summand from the projective defect of probe pairs, checked on
// further random pairs; Inconsistent on disagreement.
void detect_level(ReductiveSplit& split, const FermionModule& F, int charge, long d_min, int checks = 10,
                  unsigned long seed = 1);

// l^{(n,p)(m,s)}_{(k,r)} = sum of residues of omega^{n,p} omega^{m,s} e_{k,r}.
Jet sugawara_coeff(const Geometry& geo, KNIndex k, KNIndex n, KNIndex m);

class Sugawara {
 public:
  // extra_window widens the summation limits beyond the realized coefficient window.
  Sugawara(std::shared_ptr<const FermionModule> F, ReductiveSplit split, int extra_window = 0);

  const FermionModule& module() const { return *F_; }
  const ReductiveSplit& split() const { return split_; }
  // Realized C with l vanishing unless k <= n + m <= k + C (scanned).
  int window_C() const { return C_; }

  Jet coeff(KNIndex k, KNIndex n, KNIndex m) const;

  // T[e] v with e over the e_{k,r}; exact on finite vectors.
  WedgeVector apply(const Expansion& e, const WedgeVector& v) const;
  WedgeVector apply_mode(KNIndex k, const WedgeVector& v) const;

  OperatorWindow mode_window(KNIndex k, int charge, long d_min) const;
  OperatorWindow field_window(const Expansion& e, int charge, long d_min) const;

  // T[[e,f]] - [T[e], T[f]] on the window; NotScalar otherwise.
  Jet defect(const Expansion& e, const Expansion& f, int charge, long d_min) const;

 private:
  // Largest m with u(m) possibly nonzero on the monomial.
  int kill_threshold(const WedgeMonomial& m) const;
  Expansion B(const Expansion& e, KNIndex m) const;

  std::shared_ptr<const FermionModule> F_;
  ReductiveSplit split_;
  int C_ = 0;
  int extra_ = 0;
  mutable std::mutex mu_;
  mutable std::map<std::tuple<int, int, int, int, int, int>, Jet> cache_;
};

// [T[e], x(A)] - x(e.A) on the window.
struct FundamentalReport {
  bool ok = true;
  Q max_abs = 0;
  std::optional<WedgeMonomial> column, row;
  Jet value;
  int checked = 0;
};

FundamentalReport fundamental_check(const Sugawara& S, const Expansion& e, const Matrix& x, const Expansion& a, int charge,
                                    long d_min);

}  // namespace kn
