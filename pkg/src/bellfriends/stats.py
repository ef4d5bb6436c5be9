"""Unanimity-CHSH estimator and the no-signaling scan.

Outcome keys are six-character bitstrings A0A1A2B0B1B2.  A table may hold
integer shot counts, or exact probabilities with ``shots = inf`` (the
infinite-statistics limit, where every error bar is zero).
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .circuits import SETTING_PAIRS

CLASSICAL_BOUND = 2.0
QUANTUM_BOUND = 2.0 * math.sqrt(2.0)
SIGNIFICANCE = 5.0
# with exact probabilities sigma is 0; smaller differences are treated as roundoff
EXACT_TOL = 1e-12
# sign of <A_a B_b> in B = <A0B0> - <A1B0> - <A0B1> - <A1B1>
CHSH_SIGNS = {(0, 0): 1.0, (1, 0): -1.0, (0, 1): -1.0, (1, 1): -1.0}
PARTY_OUTCOMES = tuple(f"{i:03b}" for i in range(8))


class StatsError(ValueError):
    pass


def unanimity_value(triple: str) -> int:
    if len(triple) != 3 or any(c not in "01" for c in triple):
        raise StatsError(f"expected three outcome bits, got {triple!r}")
    return {"000": 1, "111": -1}.get(triple, 0)


@dataclass
class CountsTable:
    """Weights per setting pair: counts, or probabilities when ``shots`` is inf."""

    data: dict = field(default_factory=dict)  # (a, b) -> {bitstring: weight}
    shots: dict = field(default_factory=dict)  # (a, b) -> int | inf

    def add(self, a: int, b: int, counts: Mapping[str, int]) -> None:
        """Accumulate integer counts for a setting (repetitions are summed)."""
        key = (a, b)
        if math.isinf(self.shots.get(key, 0)):
            raise StatsError(f"setting {key} already holds exact probabilities")
        row = self.data.setdefault(key, {})
        for bits, n in counts.items():
            if len(bits) != 6 or any(c not in "01" for c in bits):
                raise StatsError(f"bad outcome key {bits!r}")
            if n < 0:
                raise StatsError(f"negative count for {bits!r}")
            row[bits] = row.get(bits, 0) + int(n)
        self.shots[key] = self.shots.get(key, 0) + int(sum(counts.values()))

    def set_probabilities(self, a: int, b: int, probs: Mapping[str, float]) -> None:
        total = sum(probs.values())
        if abs(total - 1.0) > 1e-9:
            raise StatsError(f"probabilities for {(a, b)} sum to {total}")
        self.data[(a, b)] = dict(probs)
        self.shots[(a, b)] = math.inf

    @classmethod
    def from_probabilities(cls, probs_by_setting: Mapping) -> "CountsTable":
        t = cls()
        for (a, b), p in probs_by_setting.items():
            t.set_probabilities(a, b, p)
        return t

    def frequencies(self, a: int, b: int) -> dict[str, float]:
        row = self.data[(a, b)]
        total = float(sum(row.values()))
        return {k: v / total for k, v in row.items()}

    def require_bell(self) -> None:
        missing = [s for s in SETTING_PAIRS if s not in self.data]
        if missing:
            raise StatsError(f"missing setting pair(s) {missing}")
        for s in SETTING_PAIRS:
            if not sum(self.data[s].values()):
                raise StatsError(f"setting {s} has no shots")


def correlation(counts: Mapping[str, float]) -> tuple[float, float]:
    """Mean of A*B under unanimity and its single-shot variance <A^2B^2> - <AB>^2."""
    total = float(sum(counts.values()))
    if total <= 0:
        raise StatsError("correlation of an empty setting")
    ab = ab2 = 0.0
    for bits, n in counts.items():
        v = unanimity_value(bits[:3]) * unanimity_value(bits[3:])
        ab += n * v
        ab2 += n * v * v
    ab /= total
    ab2 /= total
    return ab, ab2 - ab * ab


@dataclass
class BellReport:
    B: float
    sigma_B: float
    correlations: dict
    variances: dict
    shots: dict
    classical_bound: float = CLASSICAL_BOUND
    quantum_bound: float = QUANTUM_BOUND

    @property
    def violation_sigmas(self) -> float:
        if self.sigma_B == 0:
            return math.inf if self.B > CLASSICAL_BOUND else 0.0
        return (self.B - CLASSICAL_BOUND) / self.sigma_B


def chsh(table: CountsTable) -> BellReport:
    table.require_bell()
    corr, var = {}, {}
    B = 0.0
    err2 = 0.0
    for s in SETTING_PAIRS:
        corr[s], var[s] = correlation(table.data[s])
        B += CHSH_SIGNS[s] * corr[s]
        err2 += var[s] / table.shots[s]
    return BellReport(B, math.sqrt(err2), corr, var, dict(table.shots))


@dataclass(frozen=True)
class SignalingEntry:
    party: str  # "A" or "B"
    own_setting: int
    outcome: str
    delta: float
    sigma: float
    z: float
    significant: bool


@dataclass
class SignalingReport:
    entries: list
    threshold: float = SIGNIFICANCE

    @property
    def direction(self) -> str:
        # A-side entries move with B's choice, i.e. B signals to A
        to_a = any(e.significant for e in self.entries if e.party == "A")
        to_b = any(e.significant for e in self.entries if e.party == "B")
        return {(False, False): "none", (True, False): "A←B",
                (False, True): "A→B", (True, True): "A↔B"}[(to_a, to_b)]

    @property
    def arrow(self) -> str:
        d = self.direction
        return "" if d == "none" else d[1]

    def flagged(self) -> list:
        return [e for e in self.entries if e.significant]

    def max_abs_z(self) -> float:
        return max(abs(e.z) for e in self.entries)


def _marginals(table: CountsTable, a: int, b: int) -> tuple[dict, dict]:
    freq = table.frequencies(a, b)
    pa = dict.fromkeys(PARTY_OUTCOMES, 0.0)
    pb = dict.fromkeys(PARTY_OUTCOMES, 0.0)
    for bits, f in freq.items():
        pa[bits[:3]] += f
        pb[bits[3:]] += f
    return pa, pb


def _bernoulli_var(p: float, n: float) -> float:
    """Variance of a frequency estimate; floored at 1/N so empty bins still carry error."""
    if math.isinf(n):
        return 0.0
    return max(p * (1 - p), 1.0 / n) / n


def signaling_scan(table: CountsTable, threshold: float = SIGNIFICANCE) -> SignalingReport:
    """delta P_{a*}(A) = P(A*|a0) - P(A*|a1) and delta P_{*b}(B) = P(*B|0b) - P(*B|1b)."""
    table.require_bell()
    marg = {s: _marginals(table, *s) for s in SETTING_PAIRS}
    entries = []
    for party, side in (("A", 0), ("B", 1)):
        for own in (0, 1):
            s0, s1 = ((own, 0), (own, 1)) if party == "A" else ((0, own), (1, own))
            p0, p1 = marg[s0][side], marg[s1][side]
            n0, n1 = table.shots[s0], table.shots[s1]
            for x in PARTY_OUTCOMES:
                d = p0[x] - p1[x]
                sig = math.sqrt(_bernoulli_var(p0[x], n0) + _bernoulli_var(p1[x], n1))
                if sig > 0:
                    z = d / sig
                else:
                    z = 0.0 if abs(d) <= EXACT_TOL else math.copysign(math.inf, d)
                entries.append(SignalingEntry(party, own, x, d, sig, z, abs(z) > threshold))
    return SignalingReport(entries, threshold)


# --- report emission ------------------------------------------------------------


def bell_rows(results: list) -> list[dict]:
    """``results`` is a list of (group_label, BellReport, SignalingReport)."""
    return [
        {"G": g, "B": f"{br.B:.6f}", "dB_1e-4": f"{br.sigma_B * 1e4:.3f}",
         "A-B": sr.arrow, "direction": sr.direction}
        for g, br, sr in results
    ]


def bell_csv(results: list) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["G", "B", "dB_1e-4", "A-B", "direction"], lineterminator="\r\n")
    w.writeheader()
    w.writerows(bell_rows(results))
    return buf.getvalue()


def bell_text(results: list) -> str:
    lines = [f"{'G':<12} {'B':>9} {'dB[1e-4]':>9}  A-B"]
    for g, br, sr in results:
        lines.append(f"{g:<12} {br.B:9.4f} {br.sigma_B * 1e4:9.3f}  {sr.arrow}")
    return "\n".join(lines) + "\n"


def signaling_csv(reports) -> str:
    """Plot-ready delta-P rows for an iterable of (group, SignalingReport)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["group", "party", "own_setting", "outcome", "delta_P", "sigma", "z", "significant"])
    for group, report in reports:
        for e in report.entries:
            w.writerow([group, e.party, e.own_setting, e.outcome, f"{e.delta:.9g}", f"{e.sigma:.9g}",
                        f"{e.z:.6g}", int(e.significant)])
    return buf.getvalue()


def signaling_text(report: SignalingReport, group: str = "") -> str:
    flagged = report.flagged()
    head = f"group {group}: direction {report.direction}, {len(flagged)} significant (|z| > {report.threshold:g})"
    lines = [head]
    if flagged:
        lines.append("flagged:")
        for e in sorted(flagged, key=lambda e: -abs(e.z)):
            lines.append(f"  dP {e.party} own={e.own_setting} {e.outcome}: {e.delta:+.3e} z={e.z:+.2f}")
    lines.append(f"{'party':<5} {'own':>3} {'outcome':>7} {'delta_P':>11} {'sigma':>10} {'z':>8}")
    for e in report.entries:
        mark = " *" if e.significant else ""
        lines.append(f"{e.party:<5} {e.own_setting:>3} {e.outcome:>7} {e.delta:+11.3e} {e.sigma:10.3e} {e.z:+8.2f}{mark}")
    return "\n".join(lines) + "\n"


def table_from_label_counts(counts_by_setting: Mapping, bit_keys) -> CountsTable:
    """Build a table from per-setting count arrays indexed like ``bit_keys``."""
    t = CountsTable()
    for (a, b), arr in counts_by_setting.items():
        t.add(a, b, {bit_keys[j]: int(n) for j, n in enumerate(np.asarray(arr)) if n})
    return t
