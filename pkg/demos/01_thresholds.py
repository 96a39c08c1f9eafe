"""
Closed-form thresholds
======================

How large can a subspace be before it must contain a product state, and how
many states can separated parties still tell apart without error?
"""

from entsub import SpaceSpec, ThresholdReport, locc_threshold, min_copies, s_max, segre_degree

# Three qubits: 8 amplitudes, 3 local degrees of freedom.
space = SpaceSpec((2, 2, 2))
print("s_max:", s_max(space))
print("product states in a generic subspace of dimension s_max + 1:", segre_degree(space))

# The number of states that can be discriminated grows linearly with copies,
# while the dimension grows exponentially.
for c in range(1, 5):
    print(f"copies={c}: up to {locc_threshold(space, c)} states")

# The full basis of m qubits needs m separated copies.
for m in range(2, 7):
    print(f"{m} qubits, n = 2^{m}: {min_copies((2,) * m, 2 ** m)} copies")

print(ThresholdReport.for_space(space, copies=(1, 2, 3), n_values=(8,)).to_dict())
