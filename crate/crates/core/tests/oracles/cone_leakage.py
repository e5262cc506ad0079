"""Independent oracle for cone projection leakage of the raised-cosine bump.

Grid 64x64 over (x1, t), both periods 2*pi.  Bump support: central quarter of
each axis, samples 24..=40, w(i) = 0.5 * (1 - cos(2*pi*(i - 24) / 16)).
Projection keeps |omega| >= |k1| (equality kept), or |k1| >= |omega|.
"""
import numpy as np

N = 64
L = 2 * np.pi


def bump():
    w = np.zeros(N)
    for i in range(24, 41):
        w[i] = 0.5 * (1 - np.cos(2 * np.pi * (i - 24) / 16))
    return np.outer(w, w)


def mask(kind):
    k = np.fft.fftfreq(N, d=L / N) * 2 * np.pi
    K, W = np.meshgrid(k, k, indexing="ij")
    if kind == "omega":
        return np.abs(W) >= np.abs(K) - 1e-12
    return np.abs(K) >= np.abs(W) - 1e-12


def tail(field, zero):
    inside = np.zeros_like(field, dtype=bool)
    inside[24:41, 24:41] = True
    fa = np.abs(field)
    za = np.abs(zero)
    out = max(fa[~inside].max(), za[~inside].max())
    peak = max(fa[inside].max(), za[inside].max())
    return out / peak


if __name__ == "__main__":
    f = bump()
    for kind in ("omega", "k"):
        p = np.fft.ifft2(np.fft.fft2(f) * mask(kind))
        print(kind, "imag", np.abs(p.imag).max(), "tail", repr(tail(p.real, np.zeros_like(f))))
