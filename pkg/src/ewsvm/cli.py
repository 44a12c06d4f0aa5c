"""Command line front end: ``ewsvm gen | train | certify | pca | pipeline``.

Exit codes: 0 success, 2 invalid configuration, 3 verdict failure
(not a witness, training divergence), 4 file errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import features, io, optimality, qcore, states, svm, witness
from .states import DatasetConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VERDICT = 3
EXIT_IO = 4

REFERENCES = ("w1", "wghz", "ew22", "w4", "w4q")
FAMILY_ALIASES = {"edge-ppt-entangled": "edge", "ghz3xqubit": "ghz3-qubit"}

log = logging.getLogger("ewsvm")


class ConfigError(ValueError):
    pass


class VerdictFailure(RuntimeError):
    pass


def reference_path(name: str) -> Path:
    if name not in REFERENCES:
        raise ConfigError(f"unknown reference {name!r}; choose from {', '.join(REFERENCES)}")
    return Path(resources.files("ewsvm") / "data" / f"{name}.json")


def load_reference(name: str) -> witness.WitnessOperator:
    return io.read_witness(reference_path(name))


# --------------------------------------------------------------------------
# gen
# --------------------------------------------------------------------------

def dataset_config(args) -> DatasetConfig:
    family = FAMILY_ALIASES.get(args.family, args.family)
    p_min = args.p_min
    if p_min is None:
        p_min = 0.6 if args.qubits == 3 else 0.5
    try:
        return DatasetConfig(
            n_qubits=args.qubits, n_separable=args.per_class, n_entangled=args.per_class,
            family=family, base=args.base, p_min=p_min, p_max=args.p_max,
            mixture_fraction=args.mixture_fraction, dephased_fraction=args.dephased_fraction,
            seed=args.seed,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _config_items(config: DatasetConfig) -> dict:
    items = dataclasses.asdict(config)
    items["edge_range"] = list(items["edge_range"])
    return items


def config_from_metadata(meta: dict) -> DatasetConfig:
    kw = {}
    for f in dataclasses.fields(DatasetConfig):
        if f.name not in meta:
            continue
        raw = meta[f.name]
        if f.name == "edge_range":
            kw[f.name] = tuple(float(x) for x in raw.split())
        elif f.name in ("family", "base"):
            kw[f.name] = raw
        elif f.name == "separable_p_max":
            kw[f.name] = None if raw == "None" else float(raw)
        elif f.name in ("n_qubits", "n_separable", "n_entangled", "max_terms", "seed"):
            kw[f.name] = int(raw)
        else:
            kw[f.name] = float(raw)
    return DatasetConfig(**kw)


def run_gen(config: DatasetConfig, out: Path) -> dict:
    samples = states.generate_dataset(config)
    X = features.feature_matrix([s.rho for s in samples])
    y = np.array([s.label for s in samples])
    out.mkdir(parents=True, exist_ok=True)
    io.write_dataset(out / "dataset.csv", y, X)
    io.write_metadata(out / "dataset.meta", _config_items(config), [s.provenance for s in samples])
    counts = {"separable": int(np.sum(y == 1)), "entangled": int(np.sum(y == -1))}
    print(f"wrote {len(y)} samples ({counts['separable']} separable, {counts['entangled']} entangled) to {out}")
    return counts


def cmd_gen(args) -> int:
    run_gen(dataset_config(args), Path(args.out))
    return EXIT_OK


# --------------------------------------------------------------------------
# train
# --------------------------------------------------------------------------

def train_config(args) -> svm.TrainConfig:
    try:
        return svm.TrainConfig(C=args.C, lr=args.lr, epochs=args.epochs, seed=args.seed, solver=args.solver)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def werner_base(config: DatasetConfig):
    """The pure state whose Werner line is reported, or None for edge data."""
    if config.family == "edge":
        return None
    return states.base_state(config)


def summarize_witness(W: witness.WitnessOperator, restarts: int, seed: int, base=None) -> dict:
    rep = witness.verify_witness(W, restarts, seed).fields()
    if base is not None:
        rep["threshold"] = witness.detection_threshold(W, base).fields()
    return rep


def run_train(data_dir: Path, out: Path, config: svm.TrainConfig, restarts: int, seed: int,
              cut_rounds: int = 0) -> dict:
    y, X, _ = io.read_dataset(data_dir / "dataset.csv")
    meta, _prov = io.read_metadata(data_dir / "dataset.meta")
    dconf = config_from_metadata(meta)
    if cut_rounds > 0:
        res = witness.train_with_product_cuts(X, y, config, max_rounds=cut_rounds, seed=seed)
        model, raw = res.model, res.witness
    else:
        model = svm.train(X, y, config)
        raw = witness.assemble_witness(model)
    W = witness.calibrate(raw, restarts, seed)
    rep = summarize_witness(W, restarts, seed, werner_base(dconf))
    rep["train_accuracy"] = model.meta["train_accuracy"]
    rep["calibration_shift"] = W.meta["calibration_shift"]
    out.mkdir(parents=True, exist_ok=True)
    io.write_model(out / "model.txt", model)
    io.write_witness(out / "witness.json", W, rep)
    print(f"training accuracy {model.meta['train_accuracy']:.4f}")
    _print_witness(rep)
    return rep


def _print_witness(rep: dict) -> None:
    print(f"min over product states {rep['min_product_value']:.6g}")
    print(f"min eigenvalue {rep['min_eigenvalue']:.6g}")
    if "threshold" in rep:
        t = rep["threshold"]
        print(f"Werner threshold: Tr(W rho_p) = {t['slope']:.6g} p + {t['intercept']:.6g}, {t['verdict']}")
    print("verdict:", "valid witness" if rep["verdict"] == "valid" else f"not a witness: {rep['reason']}")


def cmd_train(args) -> int:
    out = Path(args.out)
    if args.load_reference:
        W = load_reference(args.load_reference)
        base = {2: states.bell_state(0, 0), 3: states.ghz_state(3), 4: states.ghz_state(4)}.get(W.n_qubits)
        if args.load_reference == "w4q":
            base = states.ghz3_times_qubit(0.0, 0.0)
        rep = summarize_witness(W, args.restarts, args.seed, base)
        out.mkdir(parents=True, exist_ok=True)
        io.write_witness(out / "witness.json", W, rep)
        _print_witness(rep)
        return EXIT_OK if rep["verdict"] == "valid" else EXIT_VERDICT
    if not args.data:
        raise ConfigError("train needs --data or --load-reference")
    run_train(Path(args.data), out, train_config(args), args.restarts, args.seed, args.cut_rounds)
    return EXIT_OK


# --------------------------------------------------------------------------
# certify
# --------------------------------------------------------------------------

def run_certify(W: witness.WitnessOperator, out: Path, restarts: int, seed: int, grid_points: int,
                eps: float = optimality.EPS_TAN) -> dict:
    rep = witness.verify_witness(W, min(restarts, witness.DEFAULT_RESTARTS), seed).fields()
    ts = optimality.tangent_states(W, restarts=restarts, seed=seed, eps=eps)
    opt = optimality.optimality_verdict(ts, W.n_qubits)
    report = {
        "witness": rep,
        "tangent_states": ts.table(),
        "span_rank": ts.span_rank,
        "tangent_short": ts.short,
        "optimality": opt.verdict,
    }
    if W.n_qubits == 3:
        hits = optimality.pptes_scan(W, optimality.default_pptes_grid(grid_points), seed)
        nd = optimality.nondecomposability_verdict(hits)
        report["pptes_hits"] = [
            {"a": h.params.a, "b": h.params.b, "c": h.params.c, "trace": h.trace_value} for h in hits
        ]
        report["nondecomposability"] = nd.verdict
    out.mkdir(parents=True, exist_ok=True)
    io.write_json(out / "report.json", report)
    (out / "report.txt").write_text(format_report(report))
    print(format_report(report, max_rows=8), end="")
    return report


def format_report(report: dict, max_rows: int | None = None) -> str:
    rep = report["witness"]
    lines = [f"witness: {rep['verdict']}" + (f" ({rep['reason']})" if rep["reason"] else ""),
             f"min over product states: {rep['min_product_value']:.6g}",
             f"min eigenvalue: {rep['min_eigenvalue']:.6g}",
             "", "tangent product states:"]
    rows = report["tangent_states"]
    shown = rows if max_rows is None else rows[:max_rows]
    for r in shown:
        th = " ".join(f"{x:8.4f}" for x in r["theta"])
        al = " ".join(f"{x:8.4f}" for x in r["alpha"])
        lines.append(f"  theta [{th}]  alpha [{al}]  value {r['value']: .2e}")
    if len(shown) < len(rows):
        lines.append(f"  ... {len(rows) - len(shown)} more")
    lines.append(f"span rank: {report['span_rank']}")
    lines.append(f"optimality: {report['optimality']}")
    if "pptes_hits" in report:
        hits = report["pptes_hits"]
        lines.append("")
        lines.append(f"PPT entangled states detected: {len(hits)}")
        for h in (hits if max_rows is None else hits[:max_rows]):
            lines.append(f"  a={h['a']:.5f} b={h['b']:.5f} c={h['c']:.5f}  Tr(W rho) = {h['trace']:.6g}")
        lines.append(f"non-decomposability: {report['nondecomposability']}")
    return "\n".join(lines) + "\n"


def cmd_certify(args) -> int:
    if args.load_reference:
        W = load_reference(args.load_reference)
    elif args.witness:
        W = io.read_witness(args.witness)
    else:
        raise ConfigError("certify needs --witness or --load-reference")
    report = run_certify(W, Path(args.out), args.restarts, args.seed, args.grid, args.eps)
    return EXIT_OK if report["witness"]["verdict"] == "valid" else EXIT_VERDICT


# --------------------------------------------------------------------------
# pca
# --------------------------------------------------------------------------

def run_pca(data_dir: Path, out: Path, k: int = 3) -> features.PcaProjection:
    y, X, _ = io.read_dataset(data_dir / "dataset.csv")
    proj = features.pca_fit(X, k)
    Z = features.pca_transform(proj, X)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "pca.csv", "w") as fh:
        fh.write(",".join([f"pc{i + 1}" for i in range(k)] + ["label"]) + "\n")
        for z, lab in zip(Z, y):
            fh.write(",".join([format(v, ".17g") for v in z] + [str(int(lab))]) + "\n")
    io.write_kv(out / "pca.meta", {"explained_variance": proj.explained_variance,
                                   "variance_share": proj.variance_share()})
    shares = ", ".join(f"PC{i + 1} {s:.4f}" for i, s in enumerate(proj.variance_share()))
    print(f"explained variance share: {shares}")
    return proj


def cmd_pca(args) -> int:
    run_pca(Path(args.data), Path(args.out), args.k)
    return EXIT_OK


# --------------------------------------------------------------------------
# pipeline
# --------------------------------------------------------------------------

def cmd_pipeline(args) -> int:
    out = Path(args.out)
    run_gen(dataset_config(args), out / "data")
    rep = run_train(out / "data", out / "train", train_config(args), args.restarts, args.seed, args.cut_rounds)
    W = io.read_witness(out / "train" / "witness.json")
    report = run_certify(W, out / "certify", args.certify_restarts, args.seed, args.grid, args.eps)
    return EXIT_OK if rep["verdict"] == "valid" and report["witness"]["verdict"] == "valid" else EXIT_VERDICT


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

def _gen_flags(p):
    p.add_argument("--qubits", type=int, default=2)
    p.add_argument("--per-class", type=int, default=500)
    p.add_argument("--family", default="werner",
                   choices=list(states.ENTANGLED_FAMILIES) + list(FAMILY_ALIASES))
    p.add_argument("--base", default="ghz", help="Werner base: ghz or bellIJ (two qubits)")
    p.add_argument("--p-min", type=float, default=None, help="default 0.5 (0.6 for three qubits)")
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--mixture-fraction", type=float, default=0.7)
    p.add_argument("--dephased-fraction", type=float, default=0.0)


def _train_flags(p):
    p.add_argument("--C", type=float, default=10.0)
    p.add_argument("--epochs", type=int, default=2000)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--solver", default="interior-point", choices=svm.SOLVERS)
    p.add_argument("--cut-rounds", type=int, default=0,
                   help="retrain against negative product states up to this many rounds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ewsvm", description="Entanglement witnesses from linear SVMs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a labeled dataset")
    _gen_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("train", help="train, calibrate and verify a witness")
    p.add_argument("--data")
    _train_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=witness.DEFAULT_RESTARTS)
    p.add_argument("--load-reference", choices=REFERENCES)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("certify", help="optimality and non-decomposability certificates")
    p.add_argument("--witness")
    p.add_argument("--load-reference", choices=REFERENCES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=optimality.DEFAULT_TANGENT_RESTARTS)
    p.add_argument("--grid", type=int, default=20, help="edge-state grid points per axis")
    p.add_argument("--eps", type=float, default=optimality.EPS_TAN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("pca", help="project a dataset on its principal axes")
    p.add_argument("--data", required=True)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pca)

    p = sub.add_parser("pipeline", help="gen, train and certify from one seed")
    _gen_flags(p)
    _train_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=witness.DEFAULT_RESTARTS)
    p.add_argument("--certify-restarts", type=int, default=optimality.DEFAULT_TANGENT_RESTARTS)
    p.add_argument("--grid", type=int, default=20)
    p.add_argument("--eps", type=float, default=optimality.EPS_TAN)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        if isinstance(exc, (io.FormatError, qcore.StateError)):
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO if isinstance(exc, io.FormatError) else EXIT_CONFIG
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (witness.NotAWitness, svm.SvmDivergence, VerdictFailure) as exc:
        print(f"not a witness: {exc}" if isinstance(exc, witness.NotAWitness) else f"failure: {exc}",
              file=sys.stderr)
        return EXIT_VERDICT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
