"""Project a three-qubit dataset on its principal axes and write a CSV."""
import sys
import tempfile
from pathlib import Path

from ewsvm import cli

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
cli.main(["gen", "--qubits", "3", "--per-class", "200", "--seed", "1", "--out", str(out / "data")])
cli.main(["pca", "--data", str(out / "data"), "--k", "3", "--out", str(out / "pca")])
print("wrote", out / "pca" / "pca.csv")
