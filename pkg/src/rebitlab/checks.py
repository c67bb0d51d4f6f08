"""Acceptance checks reproducing the two-rebit results at a configurable scale.

Each check returns a :class:`CheckResult`. ``scale`` multiplies every sample
size; ``scale=1`` is the reference configuration (10^5 / 10^6 samples).
"""
from __future__ import annotations

import math
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from rebitlab import analytics, entanglement, estimation, runner, sampling, states

KS_CRIT_001 = estimation.ks_critical_value(0.001)
KS_CRIT_01 = estimation.ks_critical_value(0.01)


@dataclass
class CheckResult:
    name: str
    passed: bool
    observed: str
    threshold: str
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        text = f"[{status}] {self.name}: observed {self.observed}; threshold {self.threshold}"
        return text + (f" ({self.detail})" if self.detail else "")


@dataclass
class Context:
    """Shared sample pools so several checks reuse one expensive draw."""

    master_seed: int = 20020101
    scale: float = 1.0
    workers: int | str = 1
    chunk_size: int = sampling.DEFAULT_CHUNK_SIZE
    boundary: Callable = analytics.boundary_c2_max
    _pools: dict = field(default_factory=dict)

    def size(self, n: int) -> int:
        return max(1000, int(round(n * self.scale)))

    def seed(self, offset: int) -> sampling.SeedSpec:
        return sampling.SeedSpec((self.master_seed + offset) % 2**64, self.chunk_size)

    def records(self, kind: sampling.EnsembleKind, n: int, offset: int = 0) -> dict:
        key = (kind, n, offset)
        if key not in self._pools:
            self._pools[key] = runner.collect_records(kind, n, self.seed(offset), self.workers)
        return self._pools[key]


RM, RP, CM, CP = (
    sampling.EnsembleKind.REAL_MIXED,
    sampling.EnsembleKind.REAL_PURE,
    sampling.EnsembleKind.COMPLEX_MIXED,
    sampling.EnsembleKind.COMPLEX_PURE,
)


def check_uniform_concurrence(ctx: Context) -> CheckResult:
    n = ctx.size(10**5)
    t0 = time.perf_counter()
    rng = sampling.derive_stream(ctx.seed(101), 0)
    c = entanglement.concurrence_cfr(sampling.sample_states(RP, rng, n))
    ks = estimation.ks_uniform(c)
    elapsed = time.perf_counter() - t0
    ok = ks.scaled < 1.95 and elapsed < 10.0
    return CheckResult(
        "1 uniform pure-state concurrence (KS)",
        ok,
        f"sqrt(n) D = {ks.scaled:.4f}, runtime {elapsed:.2f} s",
        "< 1.95 (alpha = 0.001), runtime < 10 s",
        f"n = {n}",
    )


def _pure_rebit_density(ctx: Context, bins: int):
    rec = ctx.records(RP, ctx.size(10**6))
    h = estimation.Histogram(0.0, 1.0, bins).accumulate(rec["e_cfr"])
    return np.array(estimation.hist_density_with_errors(h))


def check_endpoint_density(ctx: Context) -> CheckResult:
    dens = _pure_rebit_density(ctx, 100)
    last = dens[-1, 1]
    curve_end = analytics.pure_entanglement_density_curve(1000)[-1]
    ok = abs(last - math.log(2)) <= 0.05 and abs(curve_end.ordinate - math.log(2)) <= 1e-9 and curve_end.abscissa == 1.0
    return CheckResult(
        "2 endpoint density P(E=1) = ln 2",
        ok,
        f"last-bin density {last:.4f}, analytic endpoint {curve_end.ordinate:.12f}",
        "ln 2 +/- 0.05 (histogram), ln 2 +/- 1e-9 (analytic)",
    )


def check_pure_density_curve(ctx: Context) -> CheckResult:
    dens = _pure_rebit_density(ctx, 100)
    curve = np.array(analytics.pure_entanglement_density_curve(10**5))
    centers, d = dens[:, 0], dens[:, 1]
    mask = (centers >= 0.05) & (centers <= 0.95)
    analytic = np.interp(centers[mask], curve[:, 0], curve[:, 1])
    dev = float(np.max(np.abs(d[mask] - analytic)))
    return CheckResult(
        "3 Monte Carlo vs analytic pure-state P(E)",
        dev <= 0.05,
        f"sup deviation {dev:.4f}",
        "<= 0.05 on E in [0.05, 0.95]",
    )


def _family_records() -> tuple[dict, dict]:
    ps = np.linspace(0.0, 1.0, 101)
    mix = entanglement.evaluate_batch(np.array([states.maximal_entangled_mixture(p).matrix for p in ps]))
    betas = (np.arange(101) - 50) / 100.0
    fam = entanglement.evaluate_batch(np.array([analytics.maximal_family_state(b).matrix for b in betas]))
    return mix, fam


def check_boundary(ctx: Context) -> CheckResult:
    rec = ctx.records(RM, ctx.size(10**6))
    r = np.clip(rec["participation_ratio"], 1.0, 4.0)
    violations = int(np.count_nonzero(rec["c_cfr"] ** 2 > ctx.boundary(r) + 1e-9))
    mix, fam = _family_records()
    gap = 0.0
    for fam_rec in (mix, fam):
        fr = np.clip(fam_rec["participation_ratio"], 1.0, 4.0)
        gap = max(gap, float(np.max(np.abs(fam_rec["c_cfr"] ** 2 - ctx.boundary(fr)))))
    ok = violations == 0 and gap <= 1e-12
    return CheckResult(
        "4 boundary dominance C^2 <= C^2_m(R)",
        ok,
        f"{violations} violations in {len(r)} states, family-to-boundary gap {gap:.2e}",
        "0 violations at tol 1e-9; gap <= 1e-12",
    )


def check_family_closed_forms(ctx: Context) -> CheckResult:
    worst = 0.0
    for k in range(101):
        beta = (k - 50) / 100.0
        rho = analytics.maximal_family_state(beta).matrix
        expect, c2, r = analytics.maximal_family_metrics(beta)
        direct = (
            float(np.trace(rho @ states.SIGMA_YY)),
            entanglement.concurrence_cfr(rho) ** 2,
            entanglement.participation_ratio(rho),
        )
        worst = max(worst, *(abs(a - b) for a, b in zip(direct, (expect, c2, r))))
    return CheckResult(
        "5 extremal family closed forms",
        worst <= 1e-12,
        f"max |direct - closed form| {worst:.2e}",
        "<= 1e-12 on 101-point beta grid",
    )


def check_formula_ordering(ctx: Context) -> CheckResult:
    n = ctx.size(10**5)
    rec = {k: v[:n] for k, v in ctx.records(RM, ctx.size(10**6)).items()}
    gap = float(np.min(rec["e_cfr"] - rec["e_wootters"]))
    edges = np.linspace(1.0, 4.0, 61)
    r = rec["participation_ratio"]
    cfr = estimation.conditional_mean(r, rec["e_cfr"], edges)
    woo = estimation.conditional_mean(r, rec["e_wootters"], edges)
    nonempty = cfr.count > 0
    bins_ok = bool(np.all(cfr.means()[nonempty] > woo.means()[nonempty]))
    ok = gap >= -1e-9 and bins_ok
    return CheckResult(
        "6 CFR entanglement >= Wootters entanglement",
        ok,
        f"min(e_cfr - e_wootters) = {gap:.3e}; {int(nonempty.sum())} nonempty R-bins, all ordered: {bins_ok}",
        "pointwise >= -1e-9; every bin mean strictly larger",
        f"n = {n}",
    )


def check_wootters_threshold(ctx: Context) -> CheckResult:
    rec = ctx.records(RM, ctx.size(10**6))
    sel = rec["lambda_max"] <= 1.0 / 3.0 - 1e-6
    worst = float(np.max(rec["c_wootters"][sel])) if sel.any() else 0.0
    return CheckResult(
        "7 Wootters separability for lambda_max <= 1/3",
        bool(sel.any()) and worst <= 1e-9,
        f"max c_wootters {worst:.2e} over {int(sel.sum())} states",
        "<= 1e-9",
    )


def _noise_inversions_ok(d: np.ndarray, err: np.ndarray) -> tuple[bool, int]:
    """Nonincreasing up to isolated one-bin rises that sit within 3 standard errors."""
    rises = np.nonzero(np.diff(d) > 0)[0]
    ok = True
    for i in rises:
        if d[i + 1] - d[i] > 3.0 * math.hypot(err[i], err[i + 1]):
            ok = False
        if i + 1 in rises:
            ok = False
    return ok, len(rises)


def check_density_shape_contrast(ctx: Context) -> CheckResult:
    dens = _pure_rebit_density(ctx, 20)
    rebit_ok, rises = _noise_inversions_ok(dens[:, 1], dens[:, 2])
    rec = ctx.records(CP, ctx.size(10**6))
    h = estimation.Histogram(0.0, 1.0, 20).accumulate(rec["e_wootters"])
    q = np.array(estimation.hist_density_with_errors(h))
    k = int(np.argmax(q[:, 1]))
    interior = 0 < k < 19
    margin = 3.0 * q[k, 2]
    qubit_ok = interior and q[k, 1] - q[0, 1] > margin and q[k, 1] - q[-1, 1] > margin
    return CheckResult(
        "8 pure rebit P(E) decreasing, pure qubit P(E) interior maximum",
        rebit_ok and qubit_ok,
        f"rebit: {rises} isolated rises; qubit: max at bin {k} (E ~ {q[k, 0]:.3f})",
        "rebit nonincreasing up to 1-bin noise; qubit maximum strictly interior",
    )


def check_measure_sanity(ctx: Context) -> CheckResult:
    n = ctx.size(10**5)
    q = sampling.sample_orthogonal_haar(sampling.derive_stream(ctx.seed(901), 0))
    rho_a = sampling.sample_states(RM, sampling.derive_stream(ctx.seed(902), 0), n)
    rho_b = sampling.sample_states(RM, sampling.derive_stream(ctx.seed(903), 0), n)
    rotated = q @ rho_a @ q.T
    lam_a = entanglement.lambda_max(rotated)
    lam_b = entanglement.lambda_max(rho_b)
    two = estimation.ks_two_sample(lam_a, lam_b)
    simplex = sampling.sample_simplex(sampling.derive_stream(ctx.seed(904), 0), n)
    one = estimation.ks_against_cdf(simplex[:, 0], lambda x: 1.0 - (1.0 - x) ** 3)
    ok = two.scaled < KS_CRIT_01 and one.scaled < KS_CRIT_01
    return CheckResult(
        "9 measure sanity (orthogonal invariance, simplex marginal)",
        ok,
        f"two-sample sqrt(n_eff) D = {two.scaled:.4f}, simplex sqrt(n) D = {one.scaled:.4f}",
        f"< {KS_CRIT_01:.4f} (alpha = 0.01)",
        f"n = {n}",
    )


def check_determinism(ctx: Context) -> CheckResult:
    from rebitlab import cli

    digests = {}
    with tempfile.TemporaryDirectory() as tmp:
        for w in (1, 2, 8):
            out = Path(tmp) / f"w{w}.csv"
            code = cli.main(
                ["sample", "--ensemble", "real-mixed", "--n", "5000", "--seed", str(ctx.master_seed),
                 "--chunk-size", "512", "--workers", str(w), "--out", str(out)]
            )
            digests[w] = out.read_bytes() if code == 0 else None
    same = digests[1] is not None and digests[1] == digests[2] == digests[8]
    return CheckResult(
        "10 determinism across worker counts",
        same,
        "byte-identical" if same else "outputs differ",
        "identical CSVs for workers 1, 2, 8",
    )


ALL_CHECKS = [
    check_uniform_concurrence,
    check_endpoint_density,
    check_pure_density_curve,
    check_boundary,
    check_family_closed_forms,
    check_formula_ordering,
    check_wootters_threshold,
    check_density_shape_contrast,
    check_measure_sanity,
    check_determinism,
]


def run_all(ctx: Context) -> list[CheckResult]:
    return [check(ctx) for check in ALL_CHECKS]
