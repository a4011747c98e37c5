"""Executable checks of the planted-partition proximity and triangle lemmas.

Statements about expected proximity are checked on the exact block matrix:
``p`` and ``q`` are read as decimal fractions and all powers are computed in
integer arithmetic, so equalities are exact and the closed-form gap can be
compared without rounding noise.  Only the triangle lemma is Monte Carlo.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm

import numpy as np

from .graph import PPMParams, expected_ppm_matrix, matrix_power, sample_ppm
from .motif import motif_adjacency

DEFAULT_GRID = tuple(
    PPMParams(m, r, p, q)
    for m, r, p, q in product((2, 5, 10), (2, 3), (0.5, 0.9), (0.1, 0.4))
)
TRIANGLE_PARAMS = PPMParams(10, 2, 0.5, 0.1)


@dataclass
class LemmaReport:
    lemma: str
    entries: list[dict] = field(default_factory=list)
    tolerance: float = 0.0
    max_abs_error: float = 0.0
    max_rel_error: float = 0.0
    passed: bool = True
    empirical: bool = False
    diagnostics: list[dict] = field(default_factory=list)

    def add(self, entry: dict) -> None:
        self.entries.append(entry)
        self.max_abs_error = max(self.max_abs_error, entry.get("abs_error", 0.0))
        self.max_rel_error = max(self.max_rel_error, entry.get("rel_error", 0.0))
        self.passed = self.passed and bool(entry["ok"])

    def to_dict(self) -> dict:
        return asdict(self)

    def summary(self) -> str:
        bad = sum(not e["ok"] for e in self.entries)
        tag = "PASS" if self.passed else "FAIL"
        kind = " (empirical)" if self.empirical else ""
        return (f"{tag}  {self.lemma}{kind}: {len(self.entries)} checks, {bad} failed, "
                f"max abs err {self.max_abs_error:.3g}, max rel err {self.max_rel_error:.3g}")


def _as_fraction(x: float) -> Fraction:
    # shortest decimal that round-trips, i.e. the value the user typed
    return Fraction(repr(float(x)))


def exact_block_power(params: PPMParams, l: int, normalize: bool = False):
    """``(numerators, denominator)`` with ``A^l = numerators / denominator`` exactly.

    ``normalize`` row-normalises ``A`` into a transition matrix first.
    """
    p, q = _as_fraction(params.p), _as_fraction(params.q)
    den = lcm(p.denominator, q.denominator)
    pi, qi = int(p * den), int(q * den)
    cluster = params.labels()
    base = np.where(cluster[:, None] == cluster[None, :], pi, qi)
    if normalize:
        # every row sums to m p + (r - 1) m q
        den = params.m * pi + (params.r - 1) * params.m * qi
    bound = (params.n * max(pi, qi, 1)) ** l
    dtype = np.int64 if bound < 2 ** 62 else object
    base = base.astype(dtype)
    out = base.copy()
    for _ in range(l - 1):
        out = out @ base
    return out, den ** l


def _gap_exact(num, den, params: PPMParams, src: int = 0) -> Fraction:
    """Smallest same-cluster entry minus largest cross-cluster entry of row ``src``."""
    cluster = params.labels()
    row = num[src]
    same = (cluster == cluster[src]) & (np.arange(params.n) != src)
    cross = cluster != cluster[src]
    return Fraction(int(min(row[same])) - int(max(row[cross])), den)


def verify_lemma1(grid=DEFAULT_GRID, l_max: int = 6, rel_tol: float = 1e-9) -> LemmaReport:
    """Same-cluster minus cross-cluster proximity equals ``m^(l-1) (p-q)^l`` and is positive."""
    rep = LemmaReport("lemma1_gap", tolerance=rel_tol)
    for params in grid:
        pf, qf = _as_fraction(params.p), _as_fraction(params.q)
        for l in range(1, l_max + 1):
            num, den = exact_block_power(params, l)
            gap = _gap_exact(num, den, params)
            predicted = Fraction(params.m) ** (l - 1) * (pf - qf) ** l
            abs_err = float(abs(gap - predicted))
            rel_err = abs_err / float(abs(predicted)) if predicted else abs_err
            rep.add({
                "m": params.m, "r": params.r, "p": params.p, "q": params.q, "l": l,
                "measured": float(gap), "predicted": float(predicted),
                "abs_error": abs_err, "rel_error": rel_err,
                "ok": rel_err <= rel_tol and gap > 0,
            })
    return rep


def verify_symmetry(grid=DEFAULT_GRID, l_max: int = 6, abs_tol: float = 1e-12) -> LemmaReport:
    """From every source, all targets in one cluster share the same proximity value.

    The floating-point spread of ``matrix_power`` is recorded as a diagnostic.
    """
    if isinstance(grid, PPMParams):
        grid = (grid,)
    rep = LemmaReport("symmetry", tolerance=abs_tol)
    for params in grid:
        cluster = params.labels()
        for l in range(1, l_max + 1):
            num, den = exact_block_power(params, l)
            spread = Fraction(0)
            for src in range(params.n):
                for c in range(params.r):
                    block = num[src, cluster == c]
                    spread = max(spread, Fraction(int(max(block)) - int(min(block)), den))
            fl = matrix_power(expected_ppm_matrix(params), l).to_dense()
            fl_spread = max(
                float(np.ptp(fl[src, cluster == c])) for src in range(params.n) for c in range(params.r)
            )
            err = float(spread)
            rep.add({
                "m": params.m, "r": params.r, "p": params.p, "q": params.q, "l": l,
                "abs_error": err, "float_spread": fl_spread,
                "float_rel_spread": fl_spread / float(np.abs(fl).max()),
                "ok": err <= abs_tol,
            })
    return rep


def verify_rw_inequality(grid=DEFAULT_GRID, l_max: int = 6) -> LemmaReport:
    """``P^l`` with ``P`` the row-normalised block matrix keeps same > cross (empirical)."""
    if isinstance(grid, PPMParams):
        grid = (grid,)
    rep = LemmaReport("rw_inequality", empirical=True)
    for params in grid:
        for l in range(1, l_max + 1):
            num, den = exact_block_power(params, l, normalize=True)
            gap = _gap_exact(num, den, params)
            rep.add({
                "m": params.m, "r": params.r, "p": params.p, "q": params.q, "l": l,
                "gap": float(gap), "ok": gap > 0,
            })
    return rep


def triangle_closed_forms(params: PPMParams) -> tuple[float, float]:
    """Expected triangles through a same-cluster and through a cross-cluster edge."""
    m, r, p, q = params.m, params.r, params.p, params.q
    within = (m - 2) * p ** 2 + (r - 1) * m * q ** 2
    cross = 2 * (m - 1) * p * q + (r - 2) * m * q ** 2
    return within, cross


def verify_triangle_expectations(params: PPMParams = TRIANGLE_PARAMS, n_samples: int = 500,
                                 seed: int = 0, rel_tol: float = 0.05) -> LemmaReport:
    """Monte-Carlo mean triangle count per existing edge vs. the closed forms.

    Means are pooled over all existing same-cluster (resp. cross-cluster)
    edges of all sampled graphs.  With ``p == q`` the gap is reported but
    not required to be positive.
    """
    cluster = params.labels()
    tot = {"within": 0.0, "cross": 0.0}
    cnt = {"within": 0, "cross": 0}
    for s in range(n_samples):
        g = sample_ppm(params, [seed, s])
        a_m = motif_adjacency(g)
        counts = {e: 0.0 for e in g.edges}
        for u, v, w in zip(a_m.rows, a_m.cols, a_m.vals):
            counts[(int(u), int(v))] = w
        for (u, v), w in counts.items():
            key = "within" if cluster[u] == cluster[v] else "cross"
            tot[key] += float(w)
            cnt[key] += 1
    predicted = dict(zip(("within", "cross"), triangle_closed_forms(params)))
    rep = LemmaReport("triangle_expectation", tolerance=rel_tol)
    measured = {}
    for key in ("within", "cross"):
        measured[key] = tot[key] / cnt[key] if cnt[key] else float("nan")
        pred = predicted[key]
        abs_err = float(abs(measured[key] - pred))
        rel_err = abs_err / abs(pred) if pred else abs_err
        rep.add({
            "m": params.m, "r": params.r, "p": params.p, "q": params.q,
            "edge_type": key, "edges_measured": cnt[key], "n_samples": n_samples,
            "measured": measured[key], "predicted": pred,
            "abs_error": abs_err, "rel_error": rel_err, "ok": bool(rel_err <= rel_tol),
        })
    gap = measured["within"] - measured["cross"]
    leading = params.m * (params.p - params.q) ** 2
    entry = {"check": "gap", "measured": gap,
             "predicted": predicted["within"] - predicted["cross"], "leading_order": leading}
    if params.p == params.q:
        rep.diagnostics.append({**entry, "note": "p == q, positivity not required"})
    else:
        rep.add({**entry, "ok": bool(gap > 0)})
    return rep


def sampled_power_diagnostic(params: PPMParams, l: int, n_samples: int = 200, seed: int = 0) -> dict:
    """Mean of sampled ``A^l`` vs. ``(E[A])^l`` on one same/cross pair.

    The expected-matrix algebra ignores dependence between reused edges;
    this measures how far apart the two are (no tolerance implied).
    Sampled graphs have no self-loops, so the block matrix used here has a
    zero diagonal.
    """
    n, m = params.n, params.m
    acc = np.zeros((n, n))
    for s in range(n_samples):
        a = sample_ppm(params, [seed, s]).adjacency().to_dense()
        acc += np.linalg.matrix_power(a, l)
    acc /= n_samples
    exp_a = expected_ppm_matrix(params).to_dense()
    np.fill_diagonal(exp_a, 0.0)
    power = np.linalg.matrix_power(exp_a, l)
    return {
        "l": l, "within_sampled": float(acc[0, 1]), "within_expected_power": float(power[0, 1]),
        "cross_sampled": float(acc[0, m]), "cross_expected_power": float(power[0, m]),
    }


def run_suite(grid=DEFAULT_GRID, l_max: int = 6, triangle_params: PPMParams = TRIANGLE_PARAMS,
              n_samples: int = 500, seed: int = 0, rel_tol: float = 1e-9,
              abs_tol: float = 1e-12, triangle_tol: float = 0.05) -> list[LemmaReport]:
    reports = [
        verify_lemma1(grid, l_max, rel_tol),
        verify_symmetry(grid, l_max, abs_tol),
        verify_rw_inequality(grid, l_max),
        verify_triangle_expectations(triangle_params, n_samples, seed, triangle_tol),
    ]
    reports[-1].diagnostics.extend(
        sampled_power_diagnostic(triangle_params, l, 50, seed) for l in (2, 3)
    )
    return reports


def reports_to_json(reports) -> str:
    return json.dumps({"passed": all(r.passed for r in reports),
                       "reports": [r.to_dict() for r in reports]}, indent=2) + "\n"
