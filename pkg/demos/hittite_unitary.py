"""
From logical operators back to a unitary
========================================

Four Clifford gates, tracked as images of X and Z, then converted to a
matrix by following basis states.
"""

import numpy as np

from stabsim import Tableau, oracle

t = Tableau.init(2)
t.r(0).p(1)
t.cnot(0, 1)
t.r(1)
t.cnot(0, 1)
print(t, end="\n\n")

u = oracle.tableau_to_unitary(t)
np.set_printoptions(precision=3, suppress=True)
print(2 * u)

# the same matrix from dense gate composition, up to one global phase
direct = oracle.circuit_unitary(2, [("R", 0), ("P", 1), ("CNOT", 0, 1), ("R", 1), ("CNOT", 0, 1)])
print("equal up to phase:", oracle.equal_up_to_phase(u, direct))
