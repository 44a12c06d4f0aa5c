"""Werner-GHZ detection thresholds for three and four qubits.

The separable class mixes product mixtures, dephased GHZ states and
sub-threshold Werner states; the dephased samples pull the plane onto the
GHZ coherences.  Thresholds are compared with the full-separability bound.
"""
import numpy as np

from ewsvm import features, states, svm, witness

for n in (3, 4):
    cfg = states.DatasetConfig(n_qubits=n, p_min=0.6 if n == 3 else 0.5,
                               mixture_fraction=0.5, dephased_fraction=0.2, seed=7)
    data = states.generate_dataset(cfg)
    X = features.feature_matrix([s.rho for s in data])
    y = np.array([s.label for s in data], dtype=float)
    W = witness.calibrate(witness.assemble_witness(svm.train(X, y)))
    thr = witness.detection_threshold(W, states.ghz_state(n))
    bound = states.ppt_boundary(states.ghz_state(n))
    print(f"{n} qubits: Tr(W rho_p) = {thr.slope:.4f} p + {thr.intercept:.4f}, "
          f"p* = {thr.p_star:.4f} (separable up to {bound:.4f})")
