"""Published constants of the construction kernels.

Single source of truth for both the NumPy backend and the compiled
extension, and for the tests that pin segment values.
"""

# Piecewise-polynomial single-step maps (mean-LLR in, mean-LLR out).
# Five segments, coefficients (a3, a2, a1, a0) for a3*x^3 + a2*x^2 + a1*x + a0,
# segment s applies on (POLY_BOUNDS[s-1], POLY_BOUNDS[s]].
POLY_BOUNDS = (0.2, 1.0, 6.0, 20.0)

APGA_SEGMENTS = (
    (0.0, 0.323, 0.0, 0.0),
    (-0.1, 0.43, -0.039, -0.005),
    (-0.003, 0.063, 0.432, -0.2),
    (-0.0002, 0.012, 0.777, -1.023),
    (0.0, 0.0, 0.9803, -2.109),
)

SPGA_SEGMENTS = (
    (-0.256, 0.461, 0.002, 0.0),
    (-0.064, 0.294, 0.05, -0.004),
    (-0.005, 0.092, 0.316, -0.133),
    (0.0, 0.002, 0.908, -1.588),
    (0.0, 0.0, 0.995, -2.459),
)

# Two-segment closed form of the classic GA approximant:
# exp(AGA_A * x^AGA_P + AGA_C) for 0 <= x <= 10,
# sqrt(pi/x) * (1 - 10/(7x)) * exp(-x/4) above.
AGA_A = -0.4527
AGA_P = 0.86
AGA_C = 0.0218
AGA_BOUND = 10.0

# Three-segment closed form of the piecewise-GA phi:
# exp(PGA_Q2 * x^2 + PGA_Q1 * x)            for 0 <= x < PGA_BREAK,
# exp(PGA_A * x^PGA_P + PGA_C)              for PGA_BREAK <= x < 10,
# sqrt(pi/x) * (1 - PGA_T/x) * exp(-x/PGA_D) for x >= 10.
PGA_BREAK = 0.867861
PGA_Q2 = -0.0484
PGA_Q1 = -0.3258
PGA_A = -0.4777
PGA_P = 0.8512
PGA_C = 0.1094
PGA_T = 1.509
PGA_D = 3.936
PGA_BOUND = 10.0

# Exponential-difference odd function used by the integral-form piecewise phi:
# a*exp(b*u) + c*exp(d*u) clamped to [-1, 1], hard-limited beyond |u| > cutoff.
PGA_F_A = 1.9e7
PGA_F_B = 8.4e-9
PGA_F_C = -1.8e7
PGA_F_D = -8.5e-9
PGA_F_CUTOFF = 3.1
