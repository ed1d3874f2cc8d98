#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kn/acceptance.hpp"
#include "kn/blocks.hpp"
#include "kn/errors.hpp"
#include "kn/parallel.hpp"

using json = nlohmann::json;
using namespace kn;

namespace {

constexpr int kOk = 0, kUsage = 1, kFailure = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<Q> points{Q(0)};
  int gl_rank = 1;
  int charge = 0;
  long depth = -6;
  int orientation = 1;
  unsigned long seed = 1;
  int jobs = 1;
};

// Raw flag text; empty means not given.
struct Flags {
  std::string config, points, gl_rank, charge, depth, orientation, seed, jobs;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t"), e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

Q rational(const std::string& s) {
  try {
    return parse_rational(trim(s));
  } catch (const KnError&) {
    throw UsageError("bad rational '" + s + "'");
  }
}

long integer(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    long v = std::stol(trim(s), &pos);
    if (pos != trim(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("bad integer for ") + what + ": '" + s + "'");
  }
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long>());
  throw UsageError("config values must be integers or strings");
}

// File values first, flags override, environment supplies the jobs default.
RunConfig resolve(const Flags& f) {
  json cfg = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) throw UsageError("cannot read config file '" + f.config + "'");
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(std::string("bad config file: ") + e.what());
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [k, v] : cfg.items())
      if (k != "points" && k != "gl_rank" && k != "charge" && k != "depth" && k != "orientation" && k != "seed" &&
          k != "jobs")
        throw UsageError("unknown config key '" + k + "'");
  }
  auto set = [&](const char* key, const std::string& flag) {
    if (!flag.empty()) cfg[key] = flag;
  };
  set("gl_rank", f.gl_rank);
  set("charge", f.charge);
  set("depth", f.depth);
  set("orientation", f.orientation);
  set("seed", f.seed);
  set("jobs", f.jobs);
  if (!f.points.empty()) cfg["points"] = split(f.points, ',');
  if (!cfg.contains("jobs"))
    if (const char* env = std::getenv("KNCLI_JOBS")) cfg["jobs"] = std::string(env);

  RunConfig rc;
  if (cfg.contains("points")) {
    if (!cfg["points"].is_array()) throw UsageError("points must be a list");
    rc.points.clear();
    for (const auto& p : cfg["points"]) rc.points.push_back(rational(scalar_text(p)));
  }
  if (cfg.contains("gl_rank")) rc.gl_rank = static_cast<int>(integer(scalar_text(cfg["gl_rank"]), "gl_rank"));
  if (cfg.contains("charge")) rc.charge = static_cast<int>(integer(scalar_text(cfg["charge"]), "charge"));
  if (cfg.contains("depth")) rc.depth = integer(scalar_text(cfg["depth"]), "depth");
  if (cfg.contains("orientation"))
    rc.orientation = static_cast<int>(integer(scalar_text(cfg["orientation"]), "orientation"));
  if (cfg.contains("seed")) rc.seed = static_cast<unsigned long>(integer(scalar_text(cfg["seed"]), "seed"));
  if (cfg.contains("jobs")) rc.jobs = static_cast<int>(integer(scalar_text(cfg["jobs"]), "jobs"));

  if (rc.points.empty()) throw UsageError("at least one point is required");
  for (std::size_t i = 0; i < rc.points.size(); ++i)
    for (std::size_t j = i + 1; j < rc.points.size(); ++j)
      if (rc.points[i] == rc.points[j]) throw UsageError("points must be distinct");
  if (rc.gl_rank < 1) throw UsageError("gl-rank must be at least 1");
  if (rc.depth > 0) throw UsageError("depth must be <= 0");
  if (rc.orientation != 1 && rc.orientation != -1) throw UsageError("orientation must be 1 or -1");
  if (rc.jobs < 1) throw UsageError("jobs must be at least 1");
  return rc;
}

// Serialization: rationals as "p/q", jets as that string when pure.
json q_json(const Q& q) { return to_string(q); }

json jet_json(const Jet& j) {
  if (j.pure()) return q_json(j.v());
  json o = json::object();
  if (sgn(j.v()) != 0) o["v"] = q_json(j.v());
  if (sgn(j.d1()) != 0) o["d1"] = q_json(j.d1());
  if (sgn(j.d2()) != 0) o["d2"] = q_json(j.d2());
  if (sgn(j.d12()) != 0) o["d12"] = q_json(j.d12());
  return o;
}

json index_json(KNIndex k) { return json::array({k.n, k.p}); }

json monomial_json(const WedgeMonomial& m) {
  return json{{"charge", m.charge}, {"holes", m.holes}, {"particles", m.particles}};
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(jet_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

json qmatrix_json(const std::vector<std::vector<Q>>& m) {
  json rows = json::array();
  for (const auto& r : m) {
    json row = json::array();
    for (const auto& x : r) row.push_back(q_json(x));
    rows.push_back(row);
  }
  return rows;
}

json window_json(const OperatorWindow& w) {
  json basis = json::array();
  for (const auto& m : w.basis) basis.push_back(monomial_json(m));
  auto entries = w.entries;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b)); });
  json ent = json::array();
  for (const auto& [r, c, v] : entries) ent.push_back(json::array({r, c, jet_json(v)}));
  return json{{"rows", basis}, {"cols", basis}, {"entries", ent}};
}

MarkedConfig config_of(const RunConfig& rc) { return MarkedConfig::from_rationals(rc.points); }

KNIndex parse_index(const std::string& s, const char* what) {
  auto parts = split(s, ',');
  if (parts.size() != 2) throw UsageError(std::string(what) + " must be 'n,p'");
  return KNIndex{static_cast<int>(integer(parts[0], what)), static_cast<int>(integer(parts[1], what))};
}

void check_index(KNIndex k, int N, const char* what) {
  if (k.p < 1 || k.p > N) throw UsageError(std::string(what) + ": point index out of range");
}

// Row-major "a,b;c,d" or the identity when empty.
Matrix parse_matrix(const std::string& s, int rank, const char* what) {
  if (s.empty()) return Matrix::identity(rank);
  auto rows = split(s, ';');
  if (static_cast<int>(rows.size()) != rank) throw UsageError(std::string(what) + " must have gl-rank rows");
  Matrix m(rank, rank);
  for (int i = 0; i < rank; ++i) {
    auto cols = split(rows[static_cast<std::size_t>(i)], ',');
    if (static_cast<int>(cols.size()) != rank) throw UsageError(std::string(what) + " must have gl-rank columns");
    for (int j = 0; j < rank; ++j) m(i, j) = Jet(rational(cols[static_cast<std::size_t>(j)]));
  }
  return m;
}

Frame parse_frame(const std::string& s) {
  if (s == "transported") return Frame::Transported;
  if (s == "basis") return Frame::Basis;
  throw UsageError("frame must be 'transported' or 'basis'");
}

void emit(const json& j) { std::cout << j.dump() << "\n"; }

// Subcommand arguments beyond the run configuration.
struct Args {
  int lambda = 0, n = 0, p = 1, m = 0, r = 1;
  int lo = -3, hi = 3;
  std::string type = "function", algebra = "vector", op = "vector", x, y, e, a, frame = "transported";
  int direction = 1;
  bool has_n = false;
};

int cmd_basis(const RunConfig& rc, const Args& a) {
  auto cfg = config_of(rc);
  check_index({a.n, a.p}, cfg.N(), "--p");
  KNForm f = basis_form(cfg, a.lambda, {a.n, a.p});
  json num = json::array(), den = json::array();
  for (int i = 0; i <= f.coeff().num().degree(); ++i) num.push_back(jet_json(f.coeff().num()[i]));
  for (int i = 0; i <= f.coeff().den().degree(); ++i) den.push_back(jet_json(f.coeff().den()[i]));
  emit({{"lambda", a.lambda}, {"n", a.n}, {"p", a.p}, {"numerator", num}, {"denominator", den}});
  return kOk;
}

int cmd_pairing(const RunConfig& rc, const Args& a) {
  auto g = make_geometry(config_of(rc));
  check_index({a.n, a.p}, g->N(), "--p");
  check_index({a.m, a.r}, g->N(), "--r");
  Jet v = kn_pairing(basis_form(*g, a.lambda, {a.n, a.p}), basis_form(*g, 1 - a.lambda, {a.m, a.r}), *g);
  v *= Jet(rc.orientation);
  emit({{"lambda", a.lambda}, {"left", index_json({a.n, a.p})}, {"right", index_json({a.m, a.r})}, {"value", jet_json(v)}});
  return kOk;
}

int cmd_structure(const RunConfig& rc, const Args& a) {
  KNAlgebra alg(make_geometry(config_of(rc)));
  AlgebraKind kind;
  try {
    kind = parse_algebra(a.algebra);
  } catch (const KnError& e) {
    throw UsageError(e.what());
  }
  if (a.lo > a.hi) throw UsageError("--lo must not exceed --hi");
  auto table = structure_constants(alg, kind, a.lo, a.hi);
  json out = json::array();
  for (const auto& e : table.entries)
    out.push_back({{"left", index_json(e.left)}, {"right", index_json(e.right)}, {"out", index_json(e.out)},
                   {"coeff", jet_json(e.coeff)}});
  emit(out);
  return kOk;
}

BasisCocycle cocycle_of(const Cocycles& c, const std::string& type, int rank, const Matrix& x, const Matrix& y) {
  if (type == "function") return [&c](KNIndex a, KNIndex b) { return c.function(a, b); };
  if (type == "vector") return [&c](KNIndex a, KNIndex b) { return c.vector(a, b); };
  if (type == "mixing") return [&c](KNIndex a, KNIndex b) { return c.mixing(a, b); };
  if (type == "current")
    return [&c, rank, x, y](KNIndex a, KNIndex b) {
      CurrentElement u(rank), v(rank);
      u.add(x, a);
      v.add(y, b);
      return c.current(u, v, BilinearFormGL{});
    };
  throw UsageError("type must be function, vector, mixing or current");
}

int cmd_cocycle(const RunConfig& rc, const Args& a) {
  auto g = make_geometry(config_of(rc));
  check_index({a.n, a.p}, g->N(), "--p");
  check_index({a.m, a.r}, g->N(), "--r");
  Cocycles c(g);
  Matrix x = parse_matrix(a.x, rc.gl_rank, "--x"), y = parse_matrix(a.y, rc.gl_rank, "--y");
  Jet v = cocycle_of(c, a.type, rc.gl_rank, x, y)({a.n, a.p}, {a.m, a.r}) * Jet(rc.orientation);
  emit({{"type", a.type}, {"left", index_json({a.n, a.p})}, {"right", index_json({a.m, a.r})}, {"value", jet_json(v)}});
  return kOk;
}

int cmd_check_local(const RunConfig& rc, const Args& a) {
  auto g = make_geometry(config_of(rc));
  Cocycles c(g);
  Matrix x = parse_matrix(a.x, rc.gl_rank, "--x"), y = parse_matrix(a.y, rc.gl_rank, "--y");
  auto gamma = cocycle_of(c, a.type, rc.gl_rank, x, y);
  if (a.lo > a.hi) throw UsageError("--lo must not exceed --hi");
  auto rep = check_local(gamma, g->N(), a.lo, a.hi);
  bool ok = rep.is_local && (!rep.upper || *rep.upper <= 0);
  emit({{"type", a.type},
        {"upper", rep.upper ? json(*rep.upper) : json(nullptr)},
        {"lower", rep.lower ? json(*rep.lower) : json(nullptr)},
        {"is_local", rep.is_local},
        {"pairs", rep.pairs},
        {"nonzero", rep.nonzero},
        {"window", json::array({a.lo, a.hi})},
        {"ok", ok}});
  return ok ? kOk : kFailure;
}

std::shared_ptr<const FermionModule> module_of(const RunConfig& rc) {
  return std::make_shared<const FermionModule>(std::make_shared<const KNAlgebra>(make_geometry(config_of(rc))), rc.gl_rank);
}

int cmd_wedge(const RunConfig& rc, const Args& a) {
  auto F = module_of(rc);
  check_index({a.n, a.p}, F->alg().N(), "--p");
  DiffOpElement op;
  if (a.op == "vector")
    op = vector_op(rc.gl_rank, Expansion{{KNIndex{a.n, a.p}, Jet(1)}});
  else if (a.op == "current")
    op = current_op(rc.gl_rank, parse_matrix(a.x, rc.gl_rank, "--x"), KNIndex{a.n, a.p});
  else
    throw UsageError("op must be vector or current");
  json out = window_json(operator_window(*F, op, rc.charge, rc.depth));
  out["op"] = a.op;
  out["index"] = index_json({a.n, a.p});
  emit(out);
  return kOk;
}

int cmd_sugawara(const RunConfig& rc, const Args& a) {
  auto S = make_sugawara(config_of(rc), rc.gl_rank);
  int N = S->module().alg().N();
  std::vector<KNIndex> modes;
  if (a.has_n) {
    check_index({a.n, a.p}, N, "--p");
    modes.push_back({a.n, a.p});
  } else {
    for (int k = a.lo; k <= a.hi; ++k)
      for (int p = 1; p <= N; ++p) modes.push_back({k, p});
  }
  std::vector<json> mats(modes.size());
  parallel_for(rc.jobs, modes.size(), [&](std::size_t i) {
    mats[i] = window_json(S->mode_window(modes[i], rc.charge, rc.depth));
    mats[i]["mode"] = index_json(modes[i]);
  });
  json summands = json::array();
  for (const auto& s : S->split().summands)
    summands.push_back({{"name", s.name}, {"level", q_json(s.level)}, {"kappa", q_json(s.kappa)}});
  emit({{"summands", summands}, {"window_C", S->window_C()}, {"modes", mats}});
  return kOk;
}

int cmd_check_fundamental(const RunConfig& rc, const Args& a) {
  auto S = make_sugawara(config_of(rc), rc.gl_rank);
  int N = S->module().alg().N(), rank = rc.gl_rank;
  struct Triple {
    KNIndex e;
    Matrix x;
    KNIndex a;
  };
  std::vector<Triple> triples;
  if (!a.e.empty() || !a.a.empty()) {
    if (a.e.empty() || a.a.empty()) throw UsageError("--e and --a go together");
    KNIndex e = parse_index(a.e, "--e"), A = parse_index(a.a, "--a");
    check_index(e, N, "--e");
    check_index(A, N, "--a");
    triples.push_back({e, parse_matrix(a.x, rank, "--x"), A});
  } else {
    for (int k = a.lo; k <= a.hi; ++k)
      for (int r = 1; r <= N; ++r)
        for (int i = 0; i < rank; ++i)
          for (int j = 0; j < rank; ++j)
            for (int n = a.lo; n <= a.hi; ++n)
              for (int p = 1; p <= N; ++p) triples.push_back({{k, r}, elementary(rank, i, j), {n, p}});
  }
  std::vector<FundamentalReport> reps(triples.size());
  parallel_for(rc.jobs, triples.size(), [&](std::size_t i) {
    const auto& t = triples[i];
    reps[i] = fundamental_check(*S, Expansion{{t.e, Jet(1)}}, t.x, Expansion{{t.a, Jet(1)}}, rc.charge, rc.depth);
  });
  json first = nullptr;
  long checked = 0;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    checked += reps[i].checked;
    if (!reps[i].ok && first.is_null())
      first = {{"e", index_json(triples[i].e)},
               {"x", matrix_json(triples[i].x)},
               {"a", index_json(triples[i].a)},
               {"column", reps[i].column ? monomial_json(*reps[i].column) : json(nullptr)},
               {"row", reps[i].row ? monomial_json(*reps[i].row) : json(nullptr)},
               {"value", jet_json(reps[i].value)}};
  }
  bool ok = first.is_null();
  emit({{"ok", ok}, {"triples", triples.size()}, {"checked", checked}, {"first_failure", first}});
  return ok ? kOk : kFailure;
}

int cmd_blocks(const RunConfig& rc, const Args&) {
  auto F = module_of(rc);
  auto rep = blocks_report(*F, rc.charge, rc.depth);
  CoinvariantSpace space(*F, rc.charge, rc.depth);
  json basis = json::array();
  for (const auto& m : space.section()) basis.push_back(monomial_json(m));
  json dims = json::array();
  for (const auto& [d, n] : rep.dims) dims.push_back(json::array({d, n}));
  emit({{"dimension", rep.dimension}, {"stabilized", rep.stabilized}, {"basis", basis}, {"dims", dims}});
  return kOk;
}

int cmd_kz(const RunConfig& rc, const Args& a) {
  auto cfg = config_of(rc);
  if (a.direction < 1 || a.direction > cfg.N()) throw UsageError("--direction out of range");
  auto sys = kz_emit(cfg, rc.gl_rank, rc.charge, rc.depth, a.direction, parse_frame(a.frame));
  json poles = json::array();
  bool ok = true;
  for (const auto& p : sys.poles) {
    ok = ok && p.simple;
    poles.push_back({{"pair", json::array({p.p, p.r})}, {"simple", p.simple}, {"residue_matrix", qmatrix_json(p.residue)}});
  }
  emit({{"direction", sys.direction},
        {"dimension", sys.dimension},
        {"frame", a.frame},
        {"matrix", qmatrix_json(sys.matrix)},
        {"poles", poles}});
  return ok ? kOk : kFailure;
}

int cmd_curvature(const RunConfig& rc, const Args& a) {
  auto base = config_of(rc);
  int N = base.N();
  Frame frame = parse_frame(a.frame);
  std::vector<std::pair<int, int>> pairs;
  for (int p = 1; p <= N; ++p)
    for (int q = p; q <= N; ++q) pairs.emplace_back(p, q);
  struct Entry {
    std::optional<Jet> pq, qp;
    std::string error;
  };
  std::vector<Entry> entries(pairs.size());
  parallel_for(rc.jobs, pairs.size(), [&](std::size_t i) {
    auto [p, q] = pairs[i];
    ModuliDirection X{p, 1}, Y{q, 2};
    auto S = make_sugawara(with_directions(base, {X, Y}), rc.gl_rank);
    Connection C(S, rc.charge, rc.depth, frame);
    try {
      entries[i].pq = C.curvature(X, pullback(p), Y, pullback(q));
      entries[i].qp = C.curvature(Y, pullback(q), X, pullback(p));
    } catch (const KnError& e) {
      if (e.kind() != ErrorKind::NotScalar) throw;
      entries[i].error = e.what();
    }
  });
  json table = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    auto [p, q] = pairs[i];
    const auto& e = entries[i];
    bool scalar = e.error.empty();
    bool anti = scalar && *e.pq == -*e.qp;
    ok = ok && scalar && anti;
    json row{{"pair", json::array({p, q})}, {"scalar", scalar}, {"antisymmetric", anti}};
    row["lambda"] = scalar ? jet_json(e.pq->value_jet()) : json(nullptr);
    row["lambda_reversed"] = scalar ? jet_json(e.qp->value_jet()) : json(nullptr);
    table.push_back(row);
  }
  emit({{"frame", a.frame}, {"ok", ok}, {"table", table}});
  return ok ? kOk : kFailure;
}

int cmd_verify_all(const RunConfig& rc, const Flags& f) {
  AcceptanceOptions opt;
  opt.seed = rc.seed;
  opt.jobs = rc.jobs;
  opt.charge = rc.charge;
  // configuration overrides only when given explicitly
  bool from_file = !f.config.empty();
  if (!f.points.empty() || from_file) opt.points = rc.points;
  if (!f.gl_rank.empty() || from_file) opt.rank = rc.gl_rank;
  if (!f.depth.empty() || from_file) opt.depth = rc.depth;
  auto results = run_acceptance(opt);
  json crit = json::array();
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.pass;
    crit.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
  }
  emit({{"criteria", crit}, {"pass", ok}});
  return ok ? kOk : kFailure;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON file with run configuration keys");
  sub->add_option("--points", f.points, "comma-separated rational marked points (default 0)");
  sub->add_option("--gl-rank", f.gl_rank, "rank n of gl(n) (default 1)");
  sub->add_option("--charge", f.charge, "wedge charge (default 0)");
  sub->add_option("--depth", f.depth, "truncation depth <= 0 (default -6)");
  sub->add_option("--orientation", f.orientation, "+1 or -1; sign of every cycle integral (default 1)");
  sub->add_option("--seed", f.seed, "seed for sampled checks (default 1)");
  sub->add_option("--jobs", f.jobs, "worker threads (default KNCLI_JOBS or 1)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact computations for multi-point Krichever-Novikov algebras at genus 0"};
  app.require_subcommand(1);
  Flags f;
  Args a;
  std::string idx_n;
  std::map<std::string, CLI::App*> subs;
  const char* names[] = {"basis",     "pairing",           "structure", "cocycle", "check-local", "wedge",
                         "sugawara",  "check-fundamental", "blocks",    "kz",      "curvature",   "verify-all"};
  const char* help[] = {"basis element f^lambda_{n,p} as a rational function",
                        "pairing of f^lambda_{n,p} with f^{1-lambda}_{m,r}",
                        "structure constants on a degree window",
                        "cocycle value on two basis elements",
                        "locality bounds of a cocycle",
                        "operator matrix on the wedge window",
                        "Sugawara mode matrices, levels and kappas",
                        "fundamental relation on basis triples",
                        "conformal block dimension and basis",
                        "KZ system matrix and pole residues",
                        "curvature scalars of the connection",
                        "run the acceptance suite"};
  for (int i = 0; i < 12; ++i) {
    auto* s = app.add_subcommand(names[i], help[i]);
    add_common(s, f);
    subs[names[i]] = s;
  }
  for (const char* s : {"basis", "pairing"}) subs[s]->add_option("--lambda", a.lambda, "weight");
  for (const char* s : {"basis", "pairing", "cocycle", "wedge"}) {
    subs[s]->add_option("--n", a.n, "degree");
    subs[s]->add_option("--p", a.p, "point index");
  }
  subs["sugawara"]->add_option("--n", idx_n, "single mode degree (default: all in [--lo, --hi])");
  subs["sugawara"]->add_option("--p", a.p, "single mode point index");
  for (const char* s : {"pairing", "cocycle"}) {
    subs[s]->add_option("--m", a.m, "second degree");
    subs[s]->add_option("--r", a.r, "second point index");
  }
  for (const char* s : {"cocycle", "check-local"}) {
    subs[s]->add_option("--type", a.type, "function, vector, mixing or current");
    subs[s]->add_option("--y", a.y, "second matrix for current cocycles, rows ';' entries ','");
  }
  for (const char* s : {"cocycle", "check-local", "wedge", "check-fundamental"})
    subs[s]->add_option("--x", a.x, "matrix, rows ';' entries ',' (default identity)");
  subs["check-local"]->add_option("--lo", a.lo, "lowest degree (default -6)");
  subs["check-local"]->add_option("--hi", a.hi, "highest degree (default 6)");
  for (const char* s : {"structure", "sugawara", "check-fundamental"}) {
    subs[s]->add_option("--lo", a.lo, "lowest degree (default -3)");
    subs[s]->add_option("--hi", a.hi, "highest degree (default 3)");
  }
  subs["structure"]->add_option("--algebra", a.algebra, "function, vector or current");
  subs["wedge"]->add_option("--op", a.op, "vector or current");
  subs["check-fundamental"]->add_option("--e", a.e, "vector field index 'n,p'");
  subs["check-fundamental"]->add_option("--a", a.a, "function index 'n,p'");
  subs["kz"]->add_option("--direction", a.direction, "point p of d/dz_p (default 1)");
  for (const char* s : {"kz", "curvature"})
    subs[s]->add_option("--frame", a.frame, "transported (default) or basis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }
  std::string cmd = app.get_subcommands().front()->get_name();
  // check-local scans [-6, 6] unless told otherwise
  if (cmd == "check-local") {
    if (!subs[cmd]->count("--lo")) a.lo = -6;
    if (!subs[cmd]->count("--hi")) a.hi = 6;
  }
  try {
    RunConfig rc = resolve(f);
    if (!idx_n.empty()) {
      a.n = static_cast<int>(integer(idx_n, "--n"));
      a.has_n = true;
    }
    if (cmd == "basis") return cmd_basis(rc, a);
    if (cmd == "pairing") return cmd_pairing(rc, a);
    if (cmd == "structure") return cmd_structure(rc, a);
    if (cmd == "cocycle") return cmd_cocycle(rc, a);
    if (cmd == "check-local") return cmd_check_local(rc, a);
    if (cmd == "wedge") return cmd_wedge(rc, a);
    if (cmd == "sugawara") return cmd_sugawara(rc, a);
    if (cmd == "check-fundamental") return cmd_check_fundamental(rc, a);
    if (cmd == "blocks") return cmd_blocks(rc, a);
    if (cmd == "kz") return cmd_kz(rc, a);
    if (cmd == "curvature") return cmd_curvature(rc, a);
    return cmd_verify_all(rc, f);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const KnError& e) {
    if (e.kind() == ErrorKind::Usage) {
      std::cerr << "usage error: " << e.what() << "\n";
      return kUsage;
    }
    emit({{"ok", false}, {"error", {{"kind", error_name(e.kind())}, {"message", e.what()}}}});
    return kFailure;
  }
}
