"""
Cost per gate versus register size
==================================

Gates touch one packed column of the tableau, so the per-gate cost grows far
slower than the n^2 bits stored.
"""

from stabsim.cli import bench_one

print(f"{'n':>5} {'us/gate':>8} {'bytes':>8}")
for n in (50, 100, 200, 400, 800):
    r = bench_one(n, 20_000, seed=0)
    print(f"{n:>5} {1e6 * r['per_gate']:>8.2f} {r['memory_bytes']:>8}")
