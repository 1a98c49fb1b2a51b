"""Build a residuated binar by hand and put it through the verifier.

The diamond M3 (bottom, three incomparable atoms, top) is the smallest
lattice that breaks the distributive law.  Pairing it with the constant-
bottom multiplication gives a full residuated binar whose residuals are
forced to be constant-top.
"""

from resbinar import (
    FiniteBinar,
    builtin,
    cayley_latex,
    check_identity,
    check_lattice,
    check_residuation,
    derive_residuals,
    hasse_dot,
    order_from_tables,
)

# M3: 0 below 1,2,3 below 4, atoms pairwise incomparable
LEQ = [
    [True, True, True, True, True],
    [False, True, False, False, True],
    [False, False, True, False, True],
    [False, False, False, True, True],
    [False, False, False, False, True],
]
N = 5

# In M3 every set of common bounds is a chain, so max/min give glb/lub.
meet = [[max(m for m in range(N) if LEQ[m][x] and LEQ[m][y])
         for y in range(N)] for x in range(N)]
join = [[min(j for j in range(N) if LEQ[x][j] and LEQ[y][j])
         for y in range(N)] for x in range(N)]

order = order_from_tables(
    tuple(tuple(r) for r in meet), tuple(tuple(r) for r in join)
)
mult = tuple((0,) * N for _ in range(N))
lres, rres = derive_residuals(order, mult)
m3 = FiniteBinar(N, meet, join, mult, lres, rres)

print("lattice axioms:", check_lattice(m3).verdict)
print("residuation:", check_residuation(m3).verdict)

witness = check_identity(m3, builtin("LD"))
env = ", ".join(f"{k}={v}" for k, v in witness.env)
print(f"LD fails at {env}: lhs={witness.lhs}, rhs={witness.rhs}")

for name in ("D1", "D3", "D5"):
    verdict = "holds" if check_identity(m3, builtin(name)) is None else "fails"
    print(f"{name} {verdict}")

print("\nmultiplication table (LaTeX):")
print(cayley_latex(m3, "mult"))
print("Hasse diagram (DOT):")
print(hasse_dot(m3))
