"""Tour of the basic objects: scenarios, behaviors, no-signaling checks,
and local-polytope membership with certificates both ways.

Run:  python demos/01_behaviors_and_membership.py
"""

import numpy as np

import bellwire as bw

# A bipartite box experiment is indexed by a Scenario: settings and
# outcomes per party. Asymmetric scenarios are first-class.
sc = bw.Scenario(sA=2, rA=2, sB=2, rB=2)
print(f"scenario {sc.key()}: {sc.vertex_count} deterministic strategy pairs")

# The PR box wins the CHSH game with certainty. It is no-signaling yet
# far outside the local polytope.
pr = bw.pr_box()
print("\nPR box, setting (1,1):")
print(pr.p[1, 1])

report = bw.is_no_signaling(pr, tol=1e-12)
print(f"no-signaling: {report.ok} (max residual {report.max_residual:.2e})")

res = bw.is_local(pr)
print(f"local: {res.is_local}")
cert = res.certificate
print(f"separating functional value {cert.value_on_behavior:.3f} "
      f"vs local bound {cert.local_bound:.3f}")

# The certificate is machine-checkable without trusting the solver:
# its bound is the exhaustive maximum over all 16 deterministic vertices.
V = bw.local_vertex_matrix(sc)
exhaustive = (V @ cert.coefficients.reshape(-1)).max()
print(f"exhaustive vertex maximum: {exhaustive:.3f}")

# Noisy PR boxes become local exactly at visibility 1/2.
for mu in (0.45, 0.5, 0.55):
    mix = bw.Behavior(sc, mu * pr.p + (1 - mu) * bw.white_noise(sc).p)
    print(f"visibility {mu:.2f}: local = {bw.is_local(mix).is_local}")

# A membership verdict in the other direction carries a convex
# decomposition over deterministic strategies.
p_local, _ = bw.random_local_behavior(sc, seed=7)
model = bw.is_local(p_local).model
print(f"\nrandom local behavior reconstructed from {len(model.sparse_pairs())} "
      f"weighted strategy pairs; max error "
      f"{np.max(np.abs(model.reconstruct().p - p_local.p)):.2e}")

# Seeded no-signaling sampling backs all the property-test campaigns.
p_ns = bw.random_ns_behavior(sc, seed=42)
print(f"random NS behavior: no-signaling at 1e-9 -> "
      f"{bw.is_no_signaling(p_ns, 1e-9).ok}")
