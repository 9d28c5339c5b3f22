"""Regulated coincident deltas next to coth and the zeta-assigned values, for both sphere damping laws."""
import math

from kmvertex.regularization import (
    coth_laurent_gap,
    delta_eps_torus,
    regularized_delta0_sphere,
    regularized_delta0_torus,
)

print(f"{'eps':>6}  {'delta_eps(0)':>14}  {'coth':>14}  {'e^eps coth':>14}  {'coth - 1/eps':>12}")
for eps in (1.0, 0.5, 0.1, 0.05, 0.01):
    d = delta_eps_torus(0.0, eps)
    c = 1 / math.tanh(eps)
    print(f"{eps:>6g}  {d:>14.10g}  {c:>14.10g}  {math.exp(eps) * c:>14.10g}  {coth_laurent_gap(eps):>12.3e}")
print(f"\ntorus delta_reg(0) = {regularized_delta0_torus()}")
print(f"{'m':>3}  {'shifted':>8}  {'absolute':>8}")
for m in range(5):
    print(f"{m:>3}  {str(regularized_delta0_sphere(m)):>8}  {str(regularized_delta0_sphere(m, 'absolute')):>8}")
