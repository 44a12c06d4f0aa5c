"""Learn a two-qubit witness from Werner data and certify that it is optimal."""
import numpy as np

from ewsvm import features, optimality, qcore, states, svm, witness

data = states.generate_dataset(states.DatasetConfig(n_qubits=2, seed=7))
X = features.feature_matrix([s.rho for s in data])
y = np.array([s.label for s in data], dtype=float)

model = svm.train(X, y)
W = witness.calibrate(witness.assemble_witness(model))
print(f"training accuracy {model.meta['train_accuracy']:.4f}")
print("witness matrix (real part):")
print(np.round(W.matrix.real, 6))

bell = states.bell_state(0, 0)
ideal = 0.5 * np.eye(4) - qcore.projector(bell)
print("distance to 1/2 I - |phi><phi|:", np.abs(W.matrix - ideal).max())
print(witness.detection_threshold(W, bell).verdict)

ts = optimality.tangent_states(W, restarts=256)
print(f"{len(ts.states)} tangent product states, span rank {ts.span_rank}:",
      optimality.optimality_verdict(ts, 2))
