# Independent oracle for the jet chain-rule property: symbolic derivative in q
# of f(z0; q) = K (z0 - a1 q - b1)^e1 (z0 - a2 q - b2)^e2, evaluated at q0.
import random
import sympy as sp

random.seed(20261019)
q, z = sp.symbols("q z")


def rnd():
    return sp.Rational(random.randint(-9, 9), random.randint(1, 5))


rows = []
while len(rows) < 20:
    K, a1, b1, a2, b2, z0, q0 = (rnd() for _ in range(7))
    e1, e2 = random.randint(-3, 3), random.randint(-3, 3)
    f = K * (z - a1 * q - b1) ** e1 * (z - a2 * q - b2) ** e2
    fz = f.subs(z, z0)
    try:
        v = sp.nsimplify(fz.subs(q, q0))
        d = sp.nsimplify(sp.diff(fz, q).subs(q, q0))
    except ZeroDivisionError:
        continue
    if not (v.is_finite and d.is_finite) or v == sp.zoo or d == sp.zoo or K == 0:
        continue
    rows.append((K, a1, b1, e1, a2, b2, e2, z0, q0, v, d))

for r in rows:
    print("    {" + ", ".join(f'"{x}"' if not isinstance(x, int) else str(x) for x in r) + "},")
