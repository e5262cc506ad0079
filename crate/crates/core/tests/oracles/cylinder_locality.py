"""Center difference for the cylinder locality probe.

The probe is linear, so the Gaussian base cancels and the difference is the
projected bump evolved alone. Projection averages the bump over the r
shifts by T, which on a grid with 32 samples per period is the periodized
bump divided by r. Evolution with g = 0 is phi_hat(k) cos(k t).
"""
import numpy as np

T, M, t = 1.0, 32, 0.1
x = np.arange(M) * T / M
u = ((x - 0.5) % T) / 0.25
u = np.where(u > 2, u - 4, u)
bump = np.where(np.abs(u) < 1, 0.5 * (1 + np.cos(np.pi * u)), 0.0)
k = 2 * np.pi * np.fft.fftfreq(M, d=T / M)
k[M // 2] = abs(k[M // 2])
phi = np.fft.ifft(np.fft.fft(bump) * np.cos(k * t)).real
print(repr(abs(phi[0])))
for r in (8, 16, 32):
    print(r, repr(abs(phi[0]) / r))
