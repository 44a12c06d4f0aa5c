"""Train against PPT edge states and scan for detected bound entanglement.

Plain training leaves the plane negative on some product states, so the
witness is retrained with the offending product states added as separable
samples until none is left.  Takes a minute or two.
"""
import numpy as np

from ewsvm import features, optimality, states, svm, witness

cfg = states.DatasetConfig(n_qubits=3, family="edge", n_separable=300, n_entangled=300, seed=7)
data = states.generate_dataset(cfg)
X = features.feature_matrix([s.rho for s in data])
y = np.array([s.label for s in data], dtype=float)

res = witness.train_with_product_cuts(X, y, svm.TrainConfig(C=1000.0), max_rounds=150, seed=7)
print(f"converged={res.converged} after {res.rounds} rounds, {res.cuts} product cuts")
W = witness.calibrate(res.witness)
print("valid:", witness.verify_witness(W, 1024).valid)

hits = optimality.pptes_scan(W)
print(optimality.nondecomposability_verdict(hits))
for h in sorted(hits, key=lambda h: h.trace_value)[:5]:
    p = h.params
    print(f"  a={p.a:.3f} b={p.b:.3f} c={p.c:.3f}  Tr(W rho) = {h.trace_value:.5f}")
