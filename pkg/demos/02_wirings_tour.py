"""Tour of the wiring classes and their closure properties.

Four families act on behaviors: global wirings (arbitrary auxiliary
boxes; can create nonlocality), local operations with shared randomness
(cannot), their uncorrelated product subclass, and wirings with
prior-to-input classical communication (cannot create nonlocality, but
live partly outside the global class).

Run:  python demos/02_wirings_tour.py
"""

import numpy as np

import bellwire as bw

sc = bw.Scenario(2, 2, 2, 2)

# --- global wirings can fabricate anything ---------------------------------
target = bw.pr_box()
bypass = bw.bypass_global_wiring(sc, target)
out = bw.apply_gw(bypass, bw.white_noise(sc))
print("bypass wiring turns white noise into the PR box:",
      out.allclose(target))

# --- local wirings preserve the local set and the no-signaling set ---------
w = bw.random_losr_wiring(sc, sc, seed=3, n_lambda=3)
p_local, _ = bw.random_local_behavior(sc, seed=3)
print("LOSR output of a local input is local:",
      bw.is_local(bw.apply_losr(w, p_local)).is_local)
p_ns = bw.random_ns_behavior(sc, seed=5)
print("LOSR output of an NS input is NS:",
      bw.is_no_signaling(bw.apply_losr(w, p_ns), 1e-9).ok)

# every shared-randomness mixture splits into uncorrelated components
components = bw.uclosr_decomposition(w)
resum = sum(wt * bw.apply_uclosr(u, p_ns).p for wt, u in components)
print("uncorrelated decomposition reassembles the output:",
      np.max(np.abs(resum - bw.apply_losr(w, p_ns).p)) < 1e-12)

# and lifts densely into the global class
gw = bw.losr_to_gw(w)
print("dense global form agrees entrywise:",
      np.max(np.abs(bw.apply_gw(gw, p_ns).p - bw.apply_losr(w, p_ns).p)) < 1e-12)

# --- communication wirings --------------------------------------------------
# The five-branch tree: both-measure (two orders), one-measures (two
# parties), and a no-measurement branch that is plain local processing.
wp = bw.random_wpicc_wiring(sc, sc, seed=11)
out = bw.apply_wpicc(wp, p_ns)
print("\ncommunication wiring output is NS:", bw.is_no_signaling(out, 1e-9).ok)

# the four measuring branches collapse the box to a local behavior,
# giving the two-term simplified form: p*L(P0) + (1-p)*LOSR(P0)
p_meas = wp.measuring_probability
local_part = bw.wpicc_local_part(wp, p_ns)
losr_part = bw.apply_losr(wp.none_branch, p_ns)
combo = p_meas * local_part.p + (1 - p_meas) * losr_part.p
print("two-term form matches the five-branch sum:",
      np.max(np.abs(combo - out.p)) < 1e-12)
print("the measuring part is local:", bw.is_local(local_part).is_local)

# signaling inputs are refused: the preparation phase would close a
# causal loop
table = np.zeros(sc.shape)
for x in range(2):
    for y in range(2):
        table[x, y, y, 0] = 1.0
signaling = bw.Behavior(sc, table)
try:
    bw.apply_wpicc(wp, signaling)
except bw.errors.DomainViolation as err:
    print(f"signaling input refused: {err}")
