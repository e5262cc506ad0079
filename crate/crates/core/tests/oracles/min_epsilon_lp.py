"""Independent oracle for the minimal setting-dependence LP (HiGHS via scipy).

Variables: P[pair][s] (4x16), Q[s] (16), eps.  Strategy s has
(A1, A2, B1, B2) = (+1 if bit clear else -1) for bits 3..0 of s.
"""
import itertools
import numpy as np
from scipy.optimize import linprog

PAIRS = [(0, 0), (0, 1), (1, 0), (1, 1)]  # a1b1 a1b2 a2b1 a2b2


def strategies():
    out = []
    for s in range(16):
        out.append([1 if ((s >> (3 - k)) & 1) == 0 else -1 for k in range(4)])
    return np.array(out, dtype=float)


def min_eps(targets, match_marginals=True):
    st = strategies()
    n = 16
    nv = 4 * n + n + 1
    eps = nv - 1
    q0 = 4 * n
    aeq, beq = [], []
    for p, (i, j) in enumerate(PAIRS):
        row = np.zeros(nv); row[p * n:(p + 1) * n] = 1; aeq.append(row); beq.append(1)
        row = np.zeros(nv); row[p * n:(p + 1) * n] = st[:, i] * st[:, 2 + j]; aeq.append(row); beq.append(targets[p])
        if match_marginals:
            row = np.zeros(nv); row[p * n:(p + 1) * n] = st[:, i]; aeq.append(row); beq.append(0)
            row = np.zeros(nv); row[p * n:(p + 1) * n] = st[:, 2 + j]; aeq.append(row); beq.append(0)
    row = np.zeros(nv); row[q0:q0 + n] = 1; aeq.append(row); beq.append(1)
    aub, bub = [], []
    for p in range(4):
        for s in range(n):
            row = np.zeros(nv); row[p * n + s] = 1; row[q0 + s] = -1; row[eps] = -1; aub.append(row); bub.append(0)
            row = np.zeros(nv); row[p * n + s] = -1; row[q0 + s] = 1; row[eps] = -1; aub.append(row); bub.append(0)
    c = np.zeros(nv); c[eps] = 1
    r = linprog(c, A_ub=np.array(aub), b_ub=bub, A_eq=np.array(aeq), b_eq=beq, bounds=[(0, None)] * nv, method="highs")
    return r.status, r.fun


def singlet(a, b):
    return -np.cos(a - b)


if __name__ == "__main__":
    a1, a2, b1, b2 = 0.0, np.pi / 2, np.pi / 4, 3 * np.pi / 4
    t = [singlet(a1, b1), singlet(a1, b2), singlet(a2, b1), singlet(a2, b2)]
    for mm in (True, False):
        st, v = min_eps(t, mm)
        print(f"singlet match_marginals={mm}: status={st} eps={v!r}")
    print("zeros", min_eps([0, 0, 0, 0]))
    print("ones", min_eps([1, 1, 1, 1]))
    print("PR box (1,-1,1,1)", min_eps([1, -1, 1, 1]))
