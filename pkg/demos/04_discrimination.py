"""
Unambiguous discrimination by separated parties
===============================================

Certificates of local distinguishability, the resulting measurement and a
Monte-Carlo run of it.
"""

from entsub import (
    RngStream,
    SearchConfig,
    SearchFailure,
    StateSet,
    build_povm,
    generic_verdict,
    multicopy_certificate,
    predicted_success,
    random_states,
    simulate,
)

cfg = SearchConfig()

# Two qubits: three random states can be told apart, four cannot.
for n in (3, 4):
    psi = StateSet.of(random_states((2, 2), n, RngStream(7, n)))
    try:
        cert = multicopy_certificate(psi, 1, cfg, RngStream(8, n))
        print(n, "states: certificate valid =", cert.valid)
    except SearchFailure as e:
        print(n, "states: no certificate; complement Schmidt ranks", e.witness)
    print("   generic verdict:", generic_verdict((2, 2), n))

# A second copy lifts the threshold from 3 to 5.
psi = StateSet.of(random_states((2, 2), 5, RngStream(7, 5)))
cert = multicopy_certificate(psi, 2, cfg, RngStream(8, 5))
print("5 states, 2 copies: valid =", cert.valid)

# Build the measurement and run it.
psi = StateSet.of(random_states((2, 2), 3, RngStream(7, 3)))
cert = multicopy_certificate(psi, 1, cfg, RngStream(8, 3))
povm = build_povm(cert)
print("completeness error", povm.completeness_error())
rep = simulate(povm, psi, 1_000_000, RngStream(9, 0))
print("predicted success", predicted_success(povm, psi), "empirical", rep.empirical_success)
print("misidentified", rep.misidentified)
