"""How a surface profile turns into the roughness coefficient M.

The fast-scale profile h2 (periodic, zero average) influences the effective
film equations through one number only: the period average of (dh2/dX)^2.
This script computes it for a few profiles and demonstrates the two basic
properties the solver relies on: M is translation invariant and scales with
the square of the profile amplitude.  The admissible range is M < 2; the
reference simulations sweep M in {0, 0.5, 1}.

Run:  python3 demos/roughness_coefficient.py
"""

import numpy as np

from microlub import RoughnessProfile, compute_roughness_coefficient

print("sinusoids a*sin(2 pi k X): closed form M = 2 pi^2 k^2 a^2")
print(f"{'amplitude':>10} {'frequency':>10} {'M (computed)':>14} {'M (closed form)':>16}")
for a, k in [(0.05, 1), (0.1, 1), (0.2, 1), (0.1, 2)]:
    M = compute_roughness_coefficient(RoughnessProfile.sine(a, frequency=k))
    print(f"{a:>10.3f} {k:>10d} {M:>14.8f} {2 * np.pi**2 * k**2 * a**2:>16.8f}")

print("\ntranslation invariance: shifting the profile leaves M unchanged")
base = RoughnessProfile.sine(0.15)
for shift in (0.0, 0.25, 0.4):
    shifted = RoughnessProfile.sine(0.15, phase=2 * np.pi * shift)
    print(f"  shift {shift:4.2f}: M = {compute_roughness_coefficient(shifted):.10f}")

print("\nquadratic amplitude scaling on a sampled two-mode profile")
X = np.arange(512) / 512
waveform = 0.08 * np.sin(2 * np.pi * X) + 0.03 * np.sin(4 * np.pi * X + 1.0)
M1 = compute_roughness_coefficient(waveform)
for factor in (0.5, 1.0, 1.5):
    M = compute_roughness_coefficient(factor * waveform)
    print(f"  amplitude x{factor:3.1f}: M = {M:.8f}   (quadratic prediction {factor**2 * M1:.8f})")

print("\nprofiles outside the admissible range are rejected:")
try:
    compute_roughness_coefficient(RoughnessProfile.sine(1.0))  # M = 2 pi^2
except ValueError as err:
    print(f"  {err}")
