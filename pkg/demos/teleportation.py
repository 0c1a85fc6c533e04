"""
Teleporting a qubit through a shared Bell pair
==============================================

Alice holds an unknown qubit and half of an EPR pair. Two measurements and
two classically controlled Pauli corrections move the state to Bob.
"""

import numpy as np

from stabsim import format_trace, parse, run
from stabsim.cli import read_source

circuit = parse(read_source("fig7_teleport", "circuit"))
print(read_source("fig7_teleport", "circuit"))

# The tableau only tracks where the logical operators end up; the measured
# outcomes never appear in the final block, whatever the seed.
print(format_trace(run(circuit, seed=0)))

# Lockstep with the state-vector oracle on random inputs.
rng = np.random.default_rng(1)
for trial in range(5):
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    psi /= np.linalg.norm(psi)
    trace = run(circuit, backend="both", seed=trial, data=psi)
    bob = trace.state.amps
    outcomes = [r.outcome for r in trace.measurements]
    print(f"outcomes {outcomes}  |<psi|bob>|^2 = {abs(np.vdot(psi, bob)) ** 2:.15f}")
