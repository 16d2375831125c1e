"""Approach to the Meijer G hard-edge kernel as N grows.

Near the origin the rescaled kernel ``K_N(x/(N gap), y/(N gap)) / (N gap)``
converges to a limit that no longer depends on the coupling.  The table
shows the deviation shrinking roughly like ``1/N``.

Run with ``python3 demos/hard_edge.py``.
"""
from coupledsv.ensemble import BiorthogonalSystem, make_parameters
from coupledsv.hardedge import limiting_kernel, rescaled_finite_kernel

nu, x, y = 1, 0.8, 1.7
limit = float(limiting_kernel(x, y, nu))
print(f"limit K(x={x}, y={y}; nu={nu}) = {limit:.10f}")
for mu in (0.3, 0.7):
    for n in (10, 20, 40, 80):
        sys = BiorthogonalSystem(make_parameters(mu, n, n + nu))
        dev = float(rescaled_finite_kernel(x, y, sys)) - limit
        print(f"mu={mu}  N={n:3d}  deviation={dev:+.3e}  N*deviation={n * dev:+.3f}")
