"""Self-contained optimality certificates and their offline verification.

A certificate records a machine-readable claim, an anchor into the claim
index below, the run configuration, and enough evidence (point, value,
active set, multipliers, exact-arithmetic flags) to be re-checked without
re-running any optimizer.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .region import (
    check_feasible,
    product_bound,
    tight_constraints_at_linear_point,
    TOL_FEAS,
)

# claim index: every certificate anchor must resolve to an entry here
ANCHOR_INDEX = {
    "region-product-maximum": (
        "For k = ceil(r/e), the maximum of prod x_i over the (r, k) region "
        "is r!/r^r, attained exactly at x_i = i/r."
    ),
    "region-counterexample": (
        "For k < floor(r/e), the region contains a point with "
        "prod x_i strictly greater than r!/r^r."
    ),
    "region-probe": (
        "Exploratory comparison of the (r, floor(r/e)) region optimum "
        "against r!/r^r; no general statement is asserted at this k."
    ),
}


@dataclass(frozen=True)
class Certificate:
    claim: str
    anchor: str
    config: dict
    evidence: dict

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        d = json.loads(text)
        try:
            return cls(claim=d["claim"], anchor=d["anchor"],
                       config=d["config"], evidence=d["evidence"])
        except KeyError as missing:
            raise ValueError(f"malformed certificate: missing {missing}") from None


def _full_normal(label, r: int) -> np.ndarray:
    """Constraint normal in R^r from its stored label."""
    row = np.zeros(r)
    kind = label[0]
    if kind == "tent":
        _, i, j, s = label
        row[i - 1] += 1.0
        row[j - 1] += 1.0
        row[s - 1] -= 1.0
    elif kind == "monotone":
        _, i, j = label
        row[i - 1] += 1.0
        row[j - 1] -= 1.0
    else:
        raise ValueError(f"unknown constraint kind {kind!r}")
    return row


def _constraint_value(label, x) -> float:
    """Slack of the labeled constraint at x (x_0 = 0, x indexed from 1)."""
    kind = label[0]
    if kind == "tent":
        _, i, j, s = label
        return x[s - 1] - x[i - 1] - x[j - 1]
    if kind == "monotone":
        _, i, j = label
        hi = 1.0 if j == len(x) + 1 else x[j - 1]
        return hi - x[i - 1]
    raise ValueError(f"unknown constraint kind {kind!r}")


def _check_max_certificate(cert: Certificate) -> list[tuple[str, bool, str]]:
    ev = cert.evidence
    r, k = int(ev["r"]), int(ev["k"])
    x = np.asarray(ev["x"], dtype=float)
    checks = []

    ok, bad = check_feasible(x, r, k, TOL_FEAS)
    checks.append(("point-feasible", ok, str(bad[:3]) if bad else ""))

    prod = float(np.prod(x))
    value = float(ev["value"])
    ok = abs(prod - value) <= 1e-9 * max(1.0, abs(value))
    checks.append(("value-matches-point", ok, f"prod={prod}, claimed={value}"))

    kkt = ev.get("kkt", {})
    if kkt.get("optimal"):
        labels = kkt["active"]
        mus = np.asarray(kkt["multipliers"], dtype=float)
        nu = float(kkt["equality_multiplier"])
        ok = bool((mus >= -1e-12).all())
        checks.append(("multipliers-nonnegative", ok, f"min={mus.min(initial=0.0)}"))
        slacks = [abs(_constraint_value(lab, x)) for lab in labels]
        ok = all(s <= 1e-5 for s in slacks)
        checks.append(("active-set-tight", ok, f"max slack={max(slacks, default=0.0)}"))
        g = 1.0 / x
        recon = np.zeros(r)
        for lab, mu in zip(labels, mus):
            recon += mu * _full_normal(lab, r)
        recon[r - 1] += nu
        resid = float(np.linalg.norm(g - recon) / np.linalg.norm(g))
        checks.append(("stationarity", resid < 1e-6, f"residual={resid}"))
    else:
        checks.append(("kkt-payload-present", False, "no optimality payload"))

    exact = ev.get("exact", {})
    if exact:
        ok = tight_constraints_at_linear_point(r, k) == bool(
            exact.get("linear_point_feasible_and_tight"))
        checks.append(("exact-tightness-flag", ok, ""))
        bound = product_bound(r)
        ok = abs(value - float(bound)) <= 1e-6 * float(bound)
        checks.append(("value-equals-bound", ok,
                       f"value={value}, bound={float(bound)}"))
    return checks


def _check_counterexample_certificate(cert: Certificate) -> list[tuple[str, bool, str]]:
    ev = cert.evidence
    r, k = int(ev["r"]), int(ev["k"])
    x = [Fraction(s) for s in ev["x_exact"]]
    checks = []
    ok, bad = check_feasible(x, r, k, tol=0)
    checks.append(("point-feasible-exact", ok, str(bad[:3]) if bad else ""))
    prod = math.prod(x)
    bound = product_bound(r)
    checks.append(("product-exceeds-bound-exact", prod > bound,
                   f"prod={prod}, bound={bound}"))
    ok = abs(float(prod) - float(ev["value"])) <= 1e-12
    checks.append(("value-matches-point", ok, ""))
    return checks


_CHECKERS = {
    "region-product-maximum": _check_max_certificate,
    "region-counterexample": _check_counterexample_certificate,
    "region-probe": _check_max_certificate,
}


def verify_certificate(cert: Certificate) -> tuple[bool, list[tuple[str, bool, str]]]:
    """Re-check a certificate without re-optimizing.

    Returns (passed, checks); each check is (name, ok, detail).
    """
    checks = []
    anchored = cert.anchor in ANCHOR_INDEX
    checks.append(("anchor-resolves", anchored, cert.anchor))
    checker = _CHECKERS.get(cert.claim)
    if checker is None:
        checks.append(("claim-recognized", False, cert.claim))
        return False, checks
    if anchored:
        checks.extend(checker(cert))
    return all(ok for _, ok, _ in checks), checks
