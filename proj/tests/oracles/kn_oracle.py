# Independent sympy oracle: basis elements by a linear solve on the prescribed
# divisor (not the closed product formula), residues by sympy.residue.
# Prints the frozen tables used by the C++ unit tests.
import functools
import sympy as sp

z = sp.symbols("z")


@functools.lru_cache(None)
def basis(pts, lam, n, p):
    N = len(pts)
    m = [n + 1 - lam - (1 if i == p - 1 else 0) for i in range(N)]
    d = [max(0, -x) for x in m]
    D = sum(d) + N * (n + 1 - lam) - 1
    a = sp.symbols(f"a0:{D + 1}")
    P = sum(a[k] * z**k for k in range(D + 1))
    eqs = []
    for i, zi in enumerate(pts):
        for k in range(max(0, m[i])):
            eqs.append(sp.diff(P, z, k).subs(z, zi))
    if eqs:
        (gen,) = sp.linsolve(eqs, a)
    else:
        gen = a
    free = sorted(set().union(*[sp.sympify(x).free_symbols for x in gen]), key=str)
    assert len(free) == 1, (pts, lam, n, p, free)
    P = sum(gen[k] * z**k for k in range(D + 1))
    den = sp.Integer(1)
    for i, zi in enumerate(pts):
        den *= (z - zi) ** d[i]
    u = P / den
    zp = pts[p - 1]
    lead = sp.limit(sp.cancel(u / (z - zp) ** (n - lam)), z, zp)
    u = sp.cancel(u / lead)
    return u


def cyc(f, pts):
    f = sp.cancel(f)
    return sum(sp.residue(f, z, q) for q in pts)


def expand(f, lam, pts, lo, hi):
    out = {}
    for l in range(lo, hi + 1):
        for s in range(1, len(pts) + 1):
            v = cyc(f * basis(pts, 1 - lam, -l, s), pts)
            if v != 0:
                out[(l, s)] = v
    return out


def show(name, d):
    items = ", ".join(f"{{{l}, {s}, \"{v}\"}}" for (l, s), v in sorted(d.items()))
    print(f"// {name}\n{{{items}}},")


P2 = (0, 1)
print("A_{0,1} at (0,1):", sp.expand(basis(P2, 0, 0, 1)))
show("(0,1): A01*A02", expand(basis(P2, 0, 0, 1) * basis(P2, 0, 0, 2), 0, P2, -1, 2))

P3 = (0, sp.Rational(1, 2), -2)
A = lambda k, q: basis(P3, 0, k, q)
e = lambda k, q: basis(P3, -1, k, q)
show("N3: A12*A-13", expand(A(1, 2) * A(-1, 3), 0, P3, -2, 3))
show("N3: e01.A12", expand(e(0, 1) * sp.diff(A(1, 2), z), 0, P3, -2, 4))
show("N3: [e01,e02]", expand(e(0, 1) * sp.diff(e(0, 2), z) - e(0, 2) * sp.diff(e(0, 1), z), -1, P3, -2, 4))
show("N3: [e11,e-13]", expand(e(1, 1) * sp.diff(e(-1, 3), z) - e(-1, 3) * sp.diff(e(1, 1), z), -1, P3, -2, 4))

P = (0, 3)
Af = lambda k, q: basis(P, 0, k, q)
ev = lambda k, q: basis(P, -1, k, q)
om = lambda k, q: basis(P, 1, -k, q)
print("// function cocycle (0,3): k q n p value")
for k, q, n, p in [(1, 1, -1, 1), (1, 1, -1, 2), (2, 2, -2, 1), (0, 1, 0, 2), (-1, 2, 0, 1), (1, 2, -2, 2)]:
    print(f"{{{k}, {q}, {n}, {p}, \"{cyc(Af(k, q) * sp.diff(Af(n, p), z), P)}\"}},")
print("// vector cocycle (0,3), R=0")
for k, q, n, p in [(2, 1, -2, 1), (2, 1, -2, 2), (1, 2, -1, 1), (0, 1, 0, 2), (3, 2, -3, 2), (1, 1, -2, 2)]:
    a, b = ev(k, q), ev(n, p)
    v = cyc(sp.Rational(1, 12) * sp.Rational(1, 2) * (sp.diff(a, z, 3) * b - a * sp.diff(b, z, 3)), P)
    print(f"{{{k}, {q}, {n}, {p}, \"{v}\"}},")
print("// mixing cocycle (0,3), T=0")
for k, q, n, p in [(1, 1, -1, 1), (0, 2, 0, 1), (-1, 1, 1, 2), (2, 2, -2, 1), (1, 2, -2, 2)]:
    v = cyc(ev(k, q) * sp.diff(Af(n, p), z, 2), P)
    print(f"{{{k}, {q}, {n}, {p}, \"{v}\"}},")
print("// sugawara coefficients (0,3): k r n p m s value")
for k, r, n, p, m, s in [(0, 1, 0, 1, 0, 1), (0, 1, 0, 2, 0, 1), (0, 2, 1, 1, -1, 2), (1, 1, 0, 1, 1, 2), (-1, 2, -1, 1, 1, 2), (2, 1, 1, 1, 1, 1), (0, 1, 1, 1, 0, 2)]:
    v = cyc(om(n, p) * om(m, s) * ev(k, r), P)
    print(f"{{{k}, {r}, {n}, {p}, {m}, {s}, \"{v}\"}},")
