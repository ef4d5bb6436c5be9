"""Command-line harness: simulate, analyze, signal-scan, verify-gates, dump-circuit."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import countsfile, gates, stats
from .circuits import LABELS, SETTING_PAIRS, VARIANTS, Settings, build_circuit
from .noise import NoiseModel, counts_to_dict, exact_label_probabilities, sample_label_counts
from .statevec import bitstring, make_rng

# sub-stream tag for the per-repetition setting shuffle
ORDER_STREAM = 1 << 16


@dataclass(frozen=True)
class RunConfig:
    variant: str = "ibm-ecr"
    shots: int = 20000
    reps: int = 1
    seed: int = 0
    noise: NoiseModel = field(default_factory=NoiseModel)
    out: Path | None = None
    workers: int = 1
    group_label: str = "sim"
    qubit_map: dict | None = None
    # infinite-statistics run: write exact probabilities instead of counts
    exact: bool = False

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; choose from {sorted(VARIANTS)}")
        if self.shots < 1 or self.reps < 1:
            raise ValueError("shots and reps must both be >= 1")


def _run_job(args) -> dict:
    variant, shots, seed, noise, rep, a, b = args
    circuit = build_circuit(variant, Settings.from_bits(a, b))
    if shots is None:
        probs = exact_label_probabilities(circuit, noise)
        return {"repetition": rep, "a": a, "b": b, "shots": None,
                "probabilities": {bitstring(j, len(LABELS)): float(probs[j]) for j in np.flatnonzero(probs)}}
    rng = make_rng(seed, rep, 2 * a + b)
    counts = sample_label_counts(circuit, noise, shots, rng)
    return {"repetition": rep, "a": a, "b": b, "shots": shots, "counts": counts_to_dict(counts)}


def simulate_table(variant: str, noise: NoiseModel, shots: int | None, seed: int = 0,
                   rep: int = 0) -> stats.CountsTable:
    """All four settings of one repetition, on the same RNG streams as :func:`cmd_simulate`.

    ``shots=None`` gives the exact-probability table.
    """
    t = stats.CountsTable()
    for a, b in SETTING_PAIRS:
        run = _run_job((variant, shots, seed, noise, rep, a, b))
        if shots is None:
            t.set_probabilities(a, b, run["probabilities"])
        else:
            t.add(a, b, run["counts"])
    return t


def setting_order(seed: int, rep: int) -> list[tuple[int, int]]:
    perm = make_rng(seed, rep, ORDER_STREAM).permutation(len(SETTING_PAIRS))
    return [SETTING_PAIRS[i] for i in perm]


def cmd_simulate(config: RunConfig) -> dict:
    """Run ``reps`` x 4 settings (shuffled per repetition) and return a counts document."""
    if config.exact and config.reps != 1:
        raise ValueError("an exact run has a single repetition")
    shots = None if config.exact else config.shots
    orders = [setting_order(config.seed, r) for r in range(config.reps)]
    jobs = [
        (config.variant, shots, config.seed, config.noise, r, a, b)
        for r, order in enumerate(orders) for a, b in order
    ]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            runs = list(pool.map(_run_job, jobs))
    else:
        runs = [_run_job(j) for j in jobs]
    doc = {
        "schema_version": countsfile.SCHEMA_VERSION,
        "bit_order": countsfile.BIT_ORDER,
        "backend": config.variant,
        "group_label": config.group_label,
        "seed": config.seed,
        "noise": config.noise.to_dict(),
        "shots_per_setting": shots,
        "repetitions": config.reps,
        "setting_order": [[list(s) for s in order] for order in orders],
        "created": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "runs": runs,
    }
    if config.qubit_map:
        doc["qubit_map"] = dict(config.qubit_map)
    if config.out is not None:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        countsfile.dump(doc, out / "counts.json")
    return doc


def analyze_doc(doc: dict, threshold: float = stats.SIGNIFICANCE):
    table = countsfile.to_table(doc)
    return stats.chsh(table), stats.signaling_scan(table, threshold)


def cmd_analyze(paths, out=None, threshold: float = stats.SIGNIFICANCE, stream=None) -> list:
    """Bell table (one row per counts file) to stdout, plus CSV/text files under ``out``."""
    stream = stream or sys.stdout
    results = []
    for p in paths:
        doc = countsfile.load(p)
        br, sr = analyze_doc(doc, threshold)
        results.append((doc.get("group_label") or Path(p).stem, br, sr))
    text = stats.bell_text(results)
    stream.write(text)
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bell.csv").write_text(stats.bell_csv(results), encoding="utf-8", newline="")
        (out / "bell.txt").write_text(text, encoding="utf-8")
        (out / "signaling.csv").write_text(
            stats.signaling_csv((g, sr) for g, _, sr in results), encoding="utf-8", newline=""
        )
    return results


def cmd_signal_scan(path, out=None, threshold: float = stats.SIGNIFICANCE, stream=None):
    stream = stream or sys.stdout
    doc = countsfile.load(path)
    table = countsfile.to_table(doc)
    report = stats.signaling_scan(table, threshold)
    group = doc.get("group_label") or Path(path).stem
    stream.write(stats.signaling_text(report, group))
    if out is not None:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "signaling.csv").write_text(stats.signaling_csv([(group, report)]), encoding="utf-8", newline="")
    return report


def cmd_verify_gates(stream=None) -> int:
    stream = stream or sys.stdout
    results = gates.verify_appendix_identities()
    for r in results:
        tag = "PASS" if r.passed else "FAIL"
        extra = " (diagnostic)" if r.diagnostic else ""
        stream.write(f"{r.name:<30} {tag}  residual={r.residual:.3e}  {r.note}{extra}\n")
    neg = gates.corrupted_cx_identity_residual()
    stream.write(f"{'negative_control_s_dagger':<30} {'FAIL' if neg >= gates.PHASE_TOL else 'PASS'}"
                 f"  residual={neg:.3e}  expected to FAIL\n")
    ok = all(r.passed for r in results if not r.diagnostic) and neg >= gates.PHASE_TOL
    return 0 if ok else 1


def cmd_dump_circuit(variant: str, a: int, b: int) -> dict:
    return build_circuit(variant, Settings.from_bits(a, b)).to_dict()


def _noise_from_args(args) -> NoiseModel:
    base = {}
    if args.noise_json:
        src = args.noise_json
        text = Path(src).read_text() if Path(src).exists() else src
        base = json.loads(text)
    for key in ("p1", "p2", "readout_flip", "crosstalk_zz"):
        v = getattr(args, key)
        if v is not None:
            base[key] = v
    return NoiseModel.from_dict(base)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bellfriends", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate a Bell-with-friends run and write counts.json")
    sim.add_argument("--variant", choices=sorted(VARIANTS), default="ibm-ecr")
    sim.add_argument("--shots", type=int, default=20000, help="shots per setting per repetition")
    sim.add_argument("--reps", type=int, default=1)
    sim.add_argument("--seed", type=int, default=None)
    sim.add_argument("--noise-json", help="JSON file or inline JSON {p1, p2, readout_flip, crosstalk_zz, seed}")
    sim.add_argument("--p1", type=float)
    sim.add_argument("--p2", type=float)
    sim.add_argument("--readout-flip", dest="readout_flip", type=float)
    sim.add_argument("--crosstalk-zz", dest="crosstalk_zz", type=float)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--group-label", default="sim")
    sim.add_argument("--qubit-group", help="attach a published layout, e.g. ibm_kingston:3")
    sim.add_argument("--dump-circuit", action="store_true", help="also write circuits.json")
    sim.add_argument("--exact", action="store_true",
                     help="write exact probabilities (shots null); no depolarizing noise")
    sim.add_argument("--out", type=Path, required=True, help="output directory")

    for name, helptext in (("analyze", "Bell table + signaling summary"),
                           ("signal-scan", "per-outcome delta-P table")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("paths", nargs="+" if name == "analyze" else 1, type=Path)
        sp.add_argument("--out", type=Path)
        sp.add_argument("--threshold", type=float, default=stats.SIGNIFICANCE)

    sub.add_parser("verify-gates", help="check the native-gate decomposition identities")

    dc = sub.add_parser("dump-circuit", help="print a circuit as JSON")
    dc.add_argument("--variant", choices=sorted(VARIANTS), default="ibm-ecr")
    dc.add_argument("-a", type=int, default=0)
    dc.add_argument("-b", type=int, default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            noise = _noise_from_args(args)
            seed = args.seed if args.seed is not None else (noise.seed if noise.seed is not None else 0)
            qmap = None
            if args.qubit_group:
                device, _, g = args.qubit_group.partition(":")
                qmap = countsfile.QUBIT_GROUPS[device][int(g)]
            cfg = RunConfig(args.variant, args.shots, args.reps, seed, noise, args.out,
                            args.workers, args.group_label, qmap, args.exact)
            doc = cmd_simulate(cfg)
            if args.dump_circuit:
                circuits = {f"{a}{b}": cmd_dump_circuit(args.variant, a, b) for a, b in SETTING_PAIRS}
                (args.out / "circuits.json").write_text(json.dumps(circuits, indent=1) + "\n")
            br, sr = analyze_doc(doc)
            print(f"wrote {args.out / 'counts.json'}: B = {br.B:.4f} +- {br.sigma_B:.2e}, "
                  f"signaling {sr.direction}")
        elif args.command == "analyze":
            cmd_analyze(args.paths, args.out, args.threshold)
        elif args.command == "signal-scan":
            cmd_signal_scan(args.paths[0], args.out, args.threshold)
        elif args.command == "verify-gates":
            return cmd_verify_gates()
        elif args.command == "dump-circuit":
            print(json.dumps(cmd_dump_circuit(args.variant, args.a, args.b), indent=1))
    except (countsfile.CountsFileError, stats.StatsError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
