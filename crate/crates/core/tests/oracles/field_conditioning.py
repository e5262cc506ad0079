"""Exact Gaussian oracle for conditional variance of the Lambda-mean.

f, g are independent unit white noise on a 32x32 grid, each projected onto
the cone mask.  The projection is an orthogonal projector P, so Cov(f) = P.
Y = mean of f over Lambda; X = (mean f over A, mean g over A, mean f over B,
mean g over B).  ratio = Var(Y | X) / Var(Y).
"""
import numpy as np

N = 32
L = 2 * np.pi


def mask(kind):
    k = np.fft.fftfreq(N, d=L / N) * 2 * np.pi
    K, W = np.meshgrid(k, k, indexing="ij")
    if kind == "omega":
        return np.abs(W) >= np.abs(K) - 1e-12
    if kind == "all":
        return np.ones_like(K, dtype=bool)
    return np.abs(K) >= np.abs(W) - 1e-12


def projector(kind):
    m = mask(kind)
    P = np.zeros((N * N, N * N))
    for idx in range(N * N):
        e = np.zeros(N * N); e[idx] = 1
        P[:, idx] = np.fft.ifft2(np.fft.fft2(e.reshape(N, N)) * m).real.ravel()
    return P


def indicator(r):
    (i0, i1), (j0, j1) = r
    u = np.zeros((N, N))
    u[i0:i1, j0:j1] = 1.0 / ((i1 - i0) * (j1 - j0))
    return u.ravel()


def ratio(kind, A, B, Lam):
    P = projector(kind)
    y = indicator(Lam)
    xs = [indicator(A), indicator(B)]
    vy = y @ P @ y
    c = np.array([y @ P @ x for x in xs])
    C = np.array([[a @ P @ b for b in xs] for a in xs])
    return (vy - c @ np.linalg.solve(C, c)) / vy


if __name__ == "__main__":
    Lam = ((14, 18), (14, 18))
    A = ((10, 14), (14, 18))
    B = ((18, 22), (14, 18))
    for kind in ("omega", "k", "all"):
        print(kind, repr(ratio(kind, A, B, Lam)))
    print("A=Lam omega", repr(ratio("omega", Lam, B, Lam)))
