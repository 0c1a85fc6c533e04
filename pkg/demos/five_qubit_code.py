"""
The five-qubit code
===================

Distance by brute force, the syndrome lookup table, and a correction run
on the tableau engine for every single-qubit error.
"""

from stabsim.codes import build_syndrome_table, distance, experiment, five_qubit_code, paulis_of_weight

code = five_qubit_code()
for g in code.generators:
    print(g)

print(distance(code))

profile = build_syndrome_table(code, t=1)
for s, e in sorted(profile.syndrome_table.items()):
    print("".join(map(str, s)), e)

restored = [experiment(code, e, "correct", profile).restored for e in paulis_of_weight(5, 1)]
print(f"{sum(restored)}/{len(restored)} single-qubit errors corrected")
