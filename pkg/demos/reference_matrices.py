"""Check the bundled reference witnesses as numbers, without training."""
from ewsvm import cli, optimality, states, witness

bases = {"w1": states.bell_state(0, 0), "wghz": states.ghz_state(3), "w4": states.ghz_state(4),
         "w4q": states.ghz3_times_qubit(0.0, 0.0), "ew22": None}
for name in cli.REFERENCES:
    W = cli.load_reference(name)
    rep = witness.verify_witness(W)
    line = f"{name:5s} {W.n_qubits} qubits  product min {rep.min_product_value:+.5f}  " \
           f"min eigenvalue {rep.min_eigenvalue:+.4f}  {rep.verdict}"
    if bases[name] is not None:
        line += f"  p* = {witness.detection_threshold(W, bases[name]).p_star:.4f}"
    print(line)

W = cli.load_reference("ew22")
curve = optimality.edge_trace_curve(W)
print("edge curve n*Tr = %.5f + %.5f/a + %.5f a" % curve.coefficients)
hits = optimality.pptes_scan(W)
print(f"ew22 scan: {len(hits)} hits (not a valid witness, so this proves nothing)")
