"""Reference values for the Finsler and curvature tests.

Computed symbolically with sympy through textbook formulas that differ from
the library's closed form:
  spray            G^i = (1/4) g^il (2 d_k g_jl - d_l g_jk) y^j y^k
  nonlinear conn.  N^i_j = d G^i / d y^j
  Chern            C^i_jk = (1/2) g^il (d_k g_lj + d_j g_lk - d_l g_jk)
                   with d_k = d/dx^k - N^s_k d/dy^s (the delta derivative)
Run: python3 tests/oracles/finsler_oracles.py
"""
import sympy as sp

x1, x2, y1, y2 = sp.symbols("x1 x2 y1 y2", real=True)
X, Y = [x1, x2], [y1, y2]


def fundamental(F):
    L = F**2 / 2
    return sp.Matrix(2, 2, lambda i, j: sp.diff(L, Y[i], Y[j]))


def cartan(F, g):
    return [[[F / 2 * sp.diff(g[i, j], Y[k]) for k in range(2)] for j in range(2)] for i in range(2)]


def chern_via_delta(F):
    g = fundamental(F)
    gi = g.inv()
    G = [sp.Rational(1, 4) * sum(gi[i, l] * (2 * sp.diff(g[j, l], X[k]) - sp.diff(g[j, k], X[l])) * Y[j] * Y[k]
                                  for l in range(2) for j in range(2) for k in range(2)) for i in range(2)]
    N = [[sp.diff(G[i], Y[j]) for j in range(2)] for i in range(2)]

    def delta(f, k):
        return sp.diff(f, X[k]) - sum(N[s][k] * sp.diff(f, Y[s]) for s in range(2))

    C = [[[sp.Rational(1, 2) * sum(gi[i, l] * (delta(g[l, j], k) + delta(g[l, k], j) - delta(g[j, k], l))
                                   for l in range(2)) for k in range(2)] for j in range(2)] for i in range(2)]
    return g, N, C


def show(name, value):
    print(f"{name} = {sp.N(value, 17)}")


# quartic Minkowski norm
Fq = (y1**4 + y2**4) ** sp.Rational(1, 4)
gq = fundamental(Fq)
Aq = cartan(Fq, gq)
at = {y1: 1, y2: 2}
for i in range(2):
    for j in range(2):
        show(f"quartic g[{i}][{j}] at y=(1,2)", gq[i, j].subs(at))
for i, j, k in [(0, 0, 0), (0, 0, 1), (0, 1, 1), (1, 1, 1)]:
    show(f"quartic A[{i}][{j}][{k}] at y=(1,2)", Aq[i][j][k].subs(at))
at11 = {y1: 1, y2: 1}
show("quartic g[0][0] at y=(1,1)", sp.nsimplify(gq[0, 0].subs(at11)))
show("quartic g[0][1] at y=(1,1)", sp.nsimplify(gq[0, 1].subs(at11)))

# Randers, alpha Euclidean, b = (-x2/10, x1/10)
Fr = sp.sqrt(y1**2 + y2**2) - x2 / 10 * y1 + x1 / 10 * y2
gr, Nr, Cr = chern_via_delta(Fr)
pt = {x1: sp.Rational(3, 10), x2: sp.Rational(1, 2), y1: 1, y2: sp.Rational(3, 10)}
for i in range(2):
    for j in range(2):
        show(f"randers g[{i}][{j}]", gr[i, j].subs(pt))
for i in range(2):
    for j in range(2):
        show(f"randers N[{i}][{j}]", Nr[i][j].subs(pt))
for i in range(2):
    for j in range(2):
        for k in range(2):
            show(f"randers chern[{i}][{j}][{k}]", Cr[i][j][k].subs(pt))

# Gaussian curvature of g = [[1 + x2^2, x2], [x2, 1]] (Brioschi via Christoffel symbols)
gm = sp.Matrix([[1 + x2**2, x2], [x2, 1]])
gmi = gm.inv()
Gam = [[[sp.Rational(1, 2) * sum(gmi[l, s] * (sp.diff(gm[s, j], X[k]) + sp.diff(gm[s, k], X[j]) - sp.diff(gm[j, k], X[s]))
                                 for s in range(2)) for k in range(2)] for j in range(2)] for l in range(2)]


def riemann(l, i, j, k):
    # R(d_j, d_k) d_i = R^l_ijk d_l
    return (sp.diff(Gam[l][k][i], X[j]) - sp.diff(Gam[l][i][j], X[k])
            + sum(Gam[m][k][i] * Gam[l][j][m] - Gam[m][i][j] * Gam[l][k][m] for m in range(2)))


K = sp.simplify(sum(gm[0, l] * riemann(l, 1, 0, 1) for l in range(2)) / gm.det())
print("unimodular K =", K)
show("unimodular R^0_101 at x=(0.2,0.4)", riemann(0, 1, 0, 1).subs({x1: sp.Rational(1, 5), x2: sp.Rational(2, 5)}))
show("unimodular R^1_101 at x=(0.2,0.4)", riemann(1, 1, 0, 1).subs({x1: sp.Rational(1, 5), x2: sp.Rational(2, 5)}))
show("unimodular Gamma^0_01 at x=(0.2,0.4)", Gam[0][0][1].subs({x2: sp.Rational(2, 5)}))
show("unimodular Gamma^1_00 at x=(0.2,0.4)", Gam[1][0][0].subs({x2: sp.Rational(2, 5)}))
