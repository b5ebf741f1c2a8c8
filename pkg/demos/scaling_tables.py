"""Measured resource constants for both constructions, printed as small tables.

Run: python3 demos/scaling_tables.py
"""
import math

from uqc.depth_universal import scaling_grid
from uqc.size_universal import build_edge_universal, build_size_universal

for family in ("F", "Fprime"):
    reps = scaling_grid(range(1, 7), (1, 4, 8), family)
    print(f"depth-universal over {family}")
    print("  n  d  depth  qubits  depth/d  qubits/(n^2 d)")
    for r in reps:
        print(f"  {r.n}  {r.d}  {r.depth:5d}  {r.qubits:6d}  {r.K_U:7g}  {r.k_q:14.3f}")

print("edge-universal graphs")
print("     N  vertices  |V|/(N lg N)")
for N in (2, 4, 8, 16, 17, 32, 64, 128, 256, 512, 1024):
    eu = build_edge_universal(N)
    print(f"  {N:4d}  {len(eu.vertices):8d}  {eu.size_constant():12.3f}")

print("size-universal templates")
print("  n  c  gates  gates/((n+c) lg(n+c))")
for n in (1, 2, 3):
    for c in (1, 3, 6):
        t = build_size_universal(n, c)
        m = n + c
        print(f"  {n}  {c}  {t.circuit.size:5d}  {t.circuit.size / (m * max(1.0, math.log2(m))):8.2f}")
