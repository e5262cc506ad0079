"""Periodicity residual of unprojected cylinder data read from CSV.

Usage: cylinder_periodicity.py data.csv T
Evolves (f, g) to t = T with the exact per-mode solution, including the
secular k = 0 branch phi = a + b t, and prints max(|df|, |dg|) / peak.
"""
import sys
import numpy as np

rows = np.loadtxt(sys.argv[1], delimiter=",", skiprows=1)
T = float(sys.argv[2])
x, f, g = rows[:, 1], rows[:, 2], rows[:, 3]
n = len(f)
L = n * (x[1] - x[0])
k = 2 * np.pi * np.fft.fftfreq(n, d=L / n)
k[n // 2] = abs(k[n // 2])
p, q = np.fft.fft(f), np.fft.fft(g)
safe = np.where(k == 0, 1.0, k)
pt = np.where(k == 0, p + q * T, p * np.cos(k * T) + q * np.sin(k * T) / safe)
qt = np.where(k == 0, q, -p * safe * np.sin(k * T) + q * np.cos(k * T))
ft, gt = np.fft.ifft(pt).real, np.fft.ifft(qt).real
peak = max(np.abs(f).max(), np.abs(g).max())
print(repr(max(np.abs(ft - f).max(), np.abs(gt - g).max()) / peak))
