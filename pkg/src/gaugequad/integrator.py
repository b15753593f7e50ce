"""Gauge-driven integration.

``hk_integrate`` computes integrals directly from the definition: it
builds a schedule of ever-tighter gauges, constructs fine tagged
partitions for each, and watches the Riemann sums stabilize.  Declared
singular points pinch the gauge quadratically, which is the classical
mechanism that lets badly unbounded derivatives integrate.

``hake_improper`` evaluates the same integrals as limits of integrals
over exhausting subintervals (the two notions agree whenever either
exists).  Cutoffs double toward an infinite endpoint and halve their
distance to a finite singular one; partial integrals are accelerated
with iterated Aitken extrapolation.  Divergence is decided on the raw
cutoff sequence only, never on accelerated values, so extrapolation
cannot manufacture convergence for a divergent integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np

from .accel import shanks_limit, window_oscillation
from .extreal import NEG_INF, POS_INF, ClosedInterval, ExtReal, OpenInterval, ext
from .gauge import Gauge, intersect_gauges, singularity_gauge, uniform_gauge
from .partition import (
    DEFAULT_MAX_CELLS,
    CellBudgetExceeded,
    EvaluatorDomainError,
    TaggedPartition,
    _carve_ends,
    cousin_fine_partition,
    refine_fine_cells,
    riemann_sum,
)

__all__ = [
    "IntegralStatus",
    "IntegralResult",
    "IntegratorConfig",
    "SumSpread",
    "CauchyBranch",
    "hk_integrate",
    "hk_sum_spread",
    "hake_improper",
    "integrate_auto",
    "cauchy_closed_form",
]


class IntegralStatus(str, Enum):
    CONVERGED = "CONVERGED"
    DIVERGED = "DIVERGED"
    INCONCLUSIVE = "INCONCLUSIVE"


class CauchyBranch(str, Enum):
    SIN = "sin"
    COS = "cos"


@dataclass(frozen=True)
class IntegratorConfig:
    """Knobs shared by the integration drivers.

    tol is a mixed tolerance: a comparison passes when the discrepancy
    is at most tol + tol * |value|.  singular_points lists finite points
    where the integrand may be undefined or wild; the gauge schedule
    pinches around them.  gauge_override, when set, is intersected with
    every gauge of the schedule (this is how a custom enumeration gauge
    is pushed into the engine).
    """

    tol: float = 1e-8
    max_refinements: int = 24
    stability_runs: int = 3
    max_depth: int = 60
    seed: int = 0
    singular_points: tuple[float, ...] = ()
    sharpness_scale: float = 0.02
    delta0: Optional[float] = None
    tail0: Optional[float] = None
    max_cells: int = DEFAULT_MAX_CELLS
    min_levels: int = 2
    gauge_override: Optional[Gauge] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValueError(f"tol must be positive finite, got {self.tol}")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be at least 1")
        if self.stability_runs < 1:
            raise ValueError("stability_runs must be at least 1")
        if self.max_depth < 1:
            raise ValueError("max_depth must be at least 1")
        for p in self.singular_points:
            if not math.isfinite(p):
                raise ValueError("singular points must be finite")

    def with_(self, **kw) -> "IntegratorConfig":
        return replace(self, **kw)

    def mixed_tol(self, value: float) -> float:
        return self.tol + self.tol * abs(value)


@dataclass
class IntegralResult:
    value: float
    error_estimate: float
    status: IntegralStatus
    evaluations: int
    trace: list[tuple[int, float]]
    message: str = ""

    def to_json_dict(self, include_trace: bool = False) -> dict:
        out = {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "status": self.status.value,
            "evaluations": self.evaluations,
        }
        if self.message:
            out["message"] = self.message
        if include_trace:
            out["trace"] = [[int(i), float(v)] for i, v in self.trace]
        return out


@dataclass(frozen=True)
class SumSpread:
    minimum: float
    maximum: float
    mean: float
    sums: tuple[float, ...]


def _as_vector_fn(f: Callable, probe: float) -> Callable[[np.ndarray], np.ndarray]:
    """Adapt scalar or vectorized evaluators to the array protocol."""
    try:
        out = f(np.array([probe, probe]))
        arr = np.asarray(out, dtype=float)
        if arr.shape == (2,):
            return lambda z: np.asarray(f(z), dtype=float)
    except Exception:
        pass
    vec = np.vectorize(lambda x: float(f(float(x))), otypes=[float])
    return lambda z: vec(z)


def _probe_undefined(fv, points: Sequence[float]) -> list[float]:
    """Declared singular points where the evaluator is unusable."""
    undefined = []
    for p in points:
        try:
            with np.errstate(all="ignore"):
                val = float(np.asarray(fv(np.array([p])), dtype=float)[0])
            if not math.isfinite(val):
                undefined.append(float(p))
        except Exception:
            undefined.append(float(p))
    return undefined


def _finite_geometry(target: ClosedInterval) -> tuple[Optional[float], Optional[float]]:
    lo = target.lo.value if target.lo.is_finite else None
    hi = target.hi.value if target.hi.is_finite else None
    return lo, hi


def _schedule_params(cfg: IntegratorConfig, target: ClosedInterval) -> tuple[float, float, float]:
    """(delta0, tail0, length_scale) defaults derived from the target."""
    lo, hi = _finite_geometry(target)
    ends = [abs(v) for v in (lo, hi) if v is not None]
    if lo is not None and hi is not None:
        span = hi - lo
        delta0 = cfg.delta0 if cfg.delta0 is not None else span / 8.0
        scale = span
    else:
        delta0 = cfg.delta0 if cfg.delta0 is not None else max(1.0, *(ends or [1.0]))
        scale = max(1.0, *(ends or [1.0]))
    tail0 = cfg.tail0 if cfg.tail0 is not None else max(8.0, *(2.0 * e for e in ends)) if ends else 8.0
    return float(delta0), float(tail0), float(scale)


def _level_gauge(
    cfg: IntegratorConfig,
    k: int,
    delta0: float,
    tail0: float,
    scale: float,
    points: Sequence[float],
) -> Gauge:
    delta_k = delta0 * 2.0 ** (-k)
    tail_k = tail0 * 2.0**k
    g = uniform_gauge(delta_k, tail_k)
    if points:
        sharpness_k = cfg.sharpness_scale * delta_k * delta_k / scale**3
        g = singularity_gauge(g, points, max(sharpness_k, 1e-300))
    if cfg.gauge_override is not None:
        g = intersect_gauges(cfg.gauge_override, g)
    return g


def _eval_checked(fv, tags: np.ndarray) -> np.ndarray:
    try:
        with np.errstate(all="ignore"):
            vals = np.asarray(fv(tags), dtype=float)
    except Exception as exc:
        raise EvaluatorDomainError(f"evaluator raised on a tag batch: {exc}") from exc
    bad = ~np.isfinite(vals)
    if bad.any():
        t = float(tags[np.flatnonzero(bad)[0]])
        raise EvaluatorDomainError(
            f"evaluator returned a non-finite value at tag {t!r}", tag=t
        )
    return vals


def _streamed_sum(
    fv,
    gauge: Gauge,
    lo_f: float,
    hi_f: float,
    *,
    seed_seq,
    policy: str,
    cfg: IntegratorConfig,
    undefined: Sequence[float],
) -> tuple[float, int]:
    """One fine partition's Riemann sum without materializing cells."""
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    total = 0.0
    evals = 0

    def emit(tags: np.ndarray, us: np.ndarray, vs: np.ndarray) -> None:
        nonlocal total, evals
        vals = _eval_checked(fv, tags)
        total += float(np.dot(vals, vs - us))
        evals += tags.size

    refine_fine_cells(
        gauge,
        lo_f,
        hi_f,
        rng=rng,
        emit=emit,
        policy=policy,
        max_depth=cfg.max_depth,
        max_cells=cfg.max_cells,
        undefined_tags=undefined,
    )
    return total, evals


def _oscillation_stalled(values: Sequence[float], tol_floor: float) -> bool:
    """True when the last windows of the sequence stopped shrinking.

    Window oscillations (width 5) must decay by a factor of at least 0.9
    per step; four consecutive failures above the tolerance floor signal
    a drifting or oscillating non-convergent sequence.
    """
    osc = window_oscillation(values, 5)
    if len(osc) < 5:
        return False
    bad = 0
    for prev, cur in zip(osc[:-1], osc[1:]):
        if cur > 0.9 * prev and cur > tol_floor:
            bad += 1
            if bad >= 4:
                return True
        else:
            bad = 0
    return False


def hk_integrate(
    f: Callable, target: ClosedInterval, cfg: Optional[IntegratorConfig] = None
) -> IntegralResult:
    """Integrate from the definition via a schedule of shrinking gauges.

    Level k uses windows of width delta0 * 2**-k (tail rays pushed out
    by the same factor) pinched quadratically around declared singular
    points.  Each level draws ``stability_runs`` independent partitions;
    the run spread plus the gap to the previous level is the empirical
    error.  CONVERGED requires both below the mixed tolerance.

    Declared singular points where the evaluator is undefined are never
    used as tags: such cells are summed with the nearest defined
    endpoint instead (a null-set modification).
    """
    cfg = cfg or IntegratorConfig()
    lo_f, hi_f, _ = _carve_ends(uniform_gauge(1.0, max(8.0, *_abs_ends(target))), target)
    fv = _as_vector_fn(f, probe=lo_f + 0.37 * (hi_f - lo_f))
    points = [p for p in cfg.singular_points]
    undefined = _probe_undefined(fv, points)
    delta0, tail0, scale = _schedule_params(cfg, target)

    trace: list[tuple[int, float]] = []
    evals = 0
    means: list[float] = []
    last_err = math.inf
    message = ""
    root = np.random.SeedSequence(cfg.seed)
    for k in range(cfg.max_refinements + 1):
        gauge_k = _level_gauge(cfg, k, delta0, tail0, scale, points)
        glo, ghi, _ = _carve_ends(gauge_k, target)
        sums = []
        try:
            for r in range(cfg.stability_runs):
                s, n = _streamed_sum(
                    fv,
                    gauge_k,
                    glo,
                    ghi,
                    seed_seq=np.random.SeedSequence([cfg.seed, k, r]),
                    policy="midpoint_first",
                    cfg=cfg,
                    undefined=undefined,
                )
                sums.append(s)
                evals += n
        except CellBudgetExceeded as exc:
            message = f"stopped at refinement {k}: {exc}"
            break
        mean_k = float(np.mean(sums))
        spread = float(np.max(sums) - np.min(sums))
        trace.extend((k, float(s)) for s in sums)
        means.append(mean_k)
        gap = abs(mean_k - means[-2]) if len(means) >= 2 else math.inf
        last_err = max(spread, gap)
        if k >= cfg.min_levels and last_err <= cfg.mixed_tol(mean_k):
            return IntegralResult(
                mean_k, last_err, IntegralStatus.CONVERGED, evals, trace
            )
        scale0 = max(1.0, abs(means[0]))
        if abs(mean_k) > 1e12 * scale0:
            return IntegralResult(
                mean_k,
                last_err,
                IntegralStatus.DIVERGED,
                evals,
                trace,
                message=f"Riemann sums grew beyond 1e12 x initial scale at refinement {k}",
            )
        if _oscillation_stalled(means, 100.0 * cfg.mixed_tol(mean_k)):
            return IntegralResult(
                mean_k,
                last_err,
                IntegralStatus.DIVERGED,
                evals,
                trace,
                message="Riemann sums oscillate without shrinking across refinements",
            )
    value = means[-1] if means else math.nan
    err = last_err if means else math.inf
    return IntegralResult(
        value,
        err,
        IntegralStatus.INCONCLUSIVE,
        evals,
        trace,
        message=message or "refinement budget exhausted before the tolerance was met",
    )


def _abs_ends(target: ClosedInterval) -> list[float]:
    lo, hi = _finite_geometry(target)
    vals = [abs(v) for v in (lo, hi) if v is not None]
    return vals or [8.0]


def hk_sum_spread(
    f: Callable,
    gauge: Gauge,
    target: ClosedInterval,
    n_partitions: int,
    cfg: Optional[IntegratorConfig] = None,
) -> SumSpread:
    """Riemann-sum spread over independent fine partitions of one gauge.

    A direct view of how tightly the gauge controls the sums; tags are
    chosen in fully randomized candidate order.
    """
    cfg = cfg or IntegratorConfig()
    if n_partitions < 1:
        raise ValueError("n_partitions must be at least 1")
    lo_f, hi_f, _ = _carve_ends(gauge, target)
    fv = _as_vector_fn(f, probe=lo_f + 0.37 * (hi_f - lo_f))
    undefined = _probe_undefined(fv, cfg.singular_points)
    sums = []
    for i in range(n_partitions):
        s, _ = _streamed_sum(
            fv,
            gauge,
            lo_f,
            hi_f,
            seed_seq=np.random.SeedSequence([cfg.seed, 0x5EED, i]),
            policy="random",
            cfg=cfg,
            undefined=undefined,
        )
        sums.append(s)
    arr = np.array(sums)
    return SumSpread(float(arr.min()), float(arr.max()), float(arr.mean()), tuple(sums))


def cauchy_closed_form(branch, s: float) -> float:
    """Reference value of int_0^oo {sin|cos}(x^2) cos(s x) dx.

    Both branches equal sqrt(pi/8) at s = 0 and stay convergent for all
    real s; the sign between the two trigonometric terms is the only
    difference between the branches.
    """
    branch = CauchyBranch(branch)
    c = math.sqrt(math.pi / 8.0)
    a = s * s / 4.0
    if branch is CauchyBranch.SIN:
        return c * (math.cos(a) - math.sin(a))
    return c * (math.cos(a) + math.sin(a))


# ---------------------------------------------------------------------------
# Exhaustion (cutoff-limit) evaluation


def _compact_batch_sums(
    fv,
    seg_lo: np.ndarray,
    seg_hi: np.ndarray,
    tol_seg: float,
    *,
    undefined: Sequence[float] = (),
    start_cells: int = 4,
    max_level: int = 16,
    elem_budget: int = 1 << 21,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Midpoint Riemann sums of many compact segments, refined together.

    Every segment is split into uniform cells tagged at midpoints (fine
    for the matching uniform gauge); cell counts double per level until
    the per-segment change drops below tol_seg.  Returns per-segment
    values, the last per-segment change, and the evaluation count.
    """
    nseg = seg_lo.size
    values = np.zeros(nseg)
    gaps = np.full(nseg, math.inf)
    active = np.ones(nseg, dtype=bool)
    evals = 0
    undef = np.array(sorted(set(float(u) for u in undefined)), dtype=float)
    n = start_cells
    prev = np.full(nseg, np.nan)
    for level in range(max_level + 1):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        if idx.size * n > elem_budget:
            # Refine in chunks to bound memory, not accuracy.
            chunk = max(1, elem_budget // n)
        else:
            chunk = idx.size
        sums = np.empty(idx.size)
        for s0 in range(0, idx.size, chunk):
            sel = idx[s0 : s0 + chunk]
            lo = seg_lo[sel]
            w = (seg_hi[sel] - lo) / n
            mids = lo[:, None] + (np.arange(n) + 0.5)[None, :] * w[:, None]
            if undef.size:
                hit = np.isin(mids, undef)
                if hit.any():
                    mids[hit] += 0.25 * np.broadcast_to(w[:, None], mids.shape)[hit]
            with np.errstate(all="ignore"):
                vals = np.asarray(fv(mids.ravel()), dtype=float)
            bad = ~np.isfinite(vals)
            if bad.any():
                t = float(mids.ravel()[np.flatnonzero(bad)[0]])
                raise EvaluatorDomainError(
                    f"evaluator returned a non-finite value at {t!r}", tag=t
                )
            evals += vals.size
            sums[s0 : s0 + chunk] = vals.reshape(-1, n).sum(axis=1) * w
        new_gap = np.abs(sums - prev[idx])
        values[idx] = sums
        gaps[idx] = new_gap
        done = new_gap <= tol_seg
        if level == 0:
            done[:] = False
        still = idx[~done]
        active[:] = False
        active[still] = True
        prev[idx] = sums
        n *= 2
    return values, gaps, evals


def _reflect_gauge(g: Gauge) -> Gauge:
    """The gauge seen through u -> -u, for left-side exhaustion runs."""

    def assign(x: float) -> OpenInterval:
        w = g.assign(-x)
        lo_f, hi_f = w.float_bounds()
        return OpenInterval(
            ext(-hi_f) if math.isfinite(hi_f) else NEG_INF,
            ext(-lo_f) if math.isfinite(lo_f) else POS_INF,
            includes_neg_inf=w.includes_pos_inf,
            includes_pos_inf=w.includes_neg_inf,
        )

    def windows(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lo2, hi2 = g.windows(-np.asarray(z, dtype=float))
        return -hi2, -lo2

    return Gauge(assign, f"reflection of ({g.description})", window_fn=windows)


def _lobe_slab(
    fv, lo: float, hi: float, max_lobes: int, samples: int = 8192
) -> tuple[np.ndarray, float]:
    """Sign-change edges of f on [lo, c] with c pulled in from hi until
    the slab holds at most max_lobes lobes.

    With max_lobes = samples // 8 an accepted slab is sampled at eight
    or more points per lobe, so the detected edges are trustworthy.
    Returns (interior edges, c); an empty edge set means the slab has a
    single sign (or none detectable) up to c.
    """
    c = hi
    for _ in range(10):
        xs = np.linspace(lo, c, samples + 1)
        mids = 0.5 * (xs[:-1] + xs[1:])
        with np.errstate(all="ignore"):
            vals = np.asarray(fv(mids), dtype=float)
        vals = np.where(np.isfinite(vals), vals, 0.0)
        sgn = np.sign(vals)
        nz = sgn != 0
        flips = np.flatnonzero(nz[:-1] & nz[1:] & (sgn[:-1] != sgn[1:]))
        if flips.size <= max_lobes:
            edges = 0.5 * (mids[flips] + mids[flips + 1])
            return edges[(edges > lo) & (edges < c)], c
        cut = flips[max_lobes - 1]
        pulled = 0.5 * (mids[cut] + mids[cut + 1])
        if not pulled > lo:
            break
        c = pulled
    return np.empty(0), c


@dataclass
class _SideOutcome:
    value: float
    err: float
    status: IntegralStatus
    anchors: list[float]
    evals: int
    message: str = ""


def _exhaust_side(
    fv,
    frm: float,
    to_is_inf: bool,
    to_finite: Optional[float],
    cfg: IntegratorConfig,
    undefined: Sequence[float],
) -> _SideOutcome:
    """Limit of int_frm^c as the cutoff c runs toward the improper end.

    Cutoffs double away from ``frm`` toward +oo, or halve their distance
    to a finite endpoint.  Between consecutive cutoffs the integrand is
    split at its sign changes so the sequence of partial integrals at
    segment boundaries is nearly alternating, which iterated Aitken
    extrapolation accelerates well.  Divergence verdicts use the raw
    cutoff integrals only.

    ``cfg`` is taken in the side's own coordinates: for a left-side run
    the caller reflects singular points and any gauge override.

    Rungs that would hold more sign-change lobes than the cap are pulled
    in so every slab stays fully resolvable; when the per-rung lobe
    amplitudes stop decaying (the signature of a merely oscillating
    cutoff sequence) the slabs are integrated just accurately enough for
    the divergence monitor.
    """
    boundary_sums: list[float] = []
    anchors: list[float] = []
    lobe_amps: list[float] = []
    accel_hist: list[float] = []
    total = 0.0
    evals = 0
    rough = 0.0  # unresolved residue from budget-capped segments
    prev_edge = frm
    max_lobes = 1024
    # Declared singular structure (a pinch target or a custom gauge)
    # routes every rung through the gauge integrator; plain rungs use
    # the much cheaper uniform midpoint refinement.
    via_gauge = cfg.gauge_override is not None or bool(cfg.singular_points)
    for j in range(cfg.max_refinements + 1):
        if to_is_inf:
            if j == 0:
                c_target = max(1.0, frm + max(1.0, abs(frm)))
            else:
                c_target = prev_edge * 2.0
            if not c_target > prev_edge:
                break
        else:
            c_target = prev_edge + 0.5 * (to_finite - prev_edge)
            if not prev_edge < c_target < to_finite:
                break
        rung_lo = prev_edge
        if via_gauge:
            c = c_target
            sub = hk_integrate(
                fv,
                ClosedInterval(rung_lo, c),
                cfg.with_(
                    tol=0.5 * cfg.tol,
                    stability_runs=1,
                    min_levels=1,
                    seed=cfg.seed + 7919 * (j + 1),
                ),
            )
            evals += sub.evaluations
            if sub.status is IntegralStatus.DIVERGED:
                return _SideOutcome(
                    total,
                    math.inf,
                    IntegralStatus.DIVERGED,
                    anchors,
                    evals,
                    message=f"the piece over [{rung_lo!r}, {c!r}] diverged",
                )
            if sub.status is not IntegralStatus.CONVERGED:
                return _SideOutcome(
                    total,
                    math.inf,
                    IntegralStatus.INCONCLUSIVE,
                    anchors,
                    evals,
                    message=(
                        f"the piece over [{rung_lo!r}, {c!r}] "
                        "did not settle within budget"
                    ),
                )
            total += sub.value
            boundary_sums.append(total)
        else:
            inner, c = _lobe_slab(fv, rung_lo, c_target, max_lobes)
            evals += 8192
            edges = np.concatenate(([rung_lo], inner, [c]))
            # Tolerance per segment: boundary sums must stay well inside
            # the requested tolerance even after thousands of segments.
            n_here = max(1, edges.size - 1)
            tol_seg = cfg.tol / (
                8.0 * math.sqrt(float(len(boundary_sums) + n_here + 1))
            )
            if len(lobe_amps) >= 3 and (
                lobe_amps[-1] > 0.75 * lobe_amps[-2]
                and lobe_amps[-2] > 0.75 * lobe_amps[-3]
            ):
                # Lobe areas stopped decaying: from here on the slabs only
                # feed the divergence monitor, which needs the envelope,
                # not the tolerance.
                tol_seg = max(tol_seg, 0.02 * lobe_amps[-1])
            vals, gaps, n = _compact_batch_sums(
                fv,
                edges[:-1],
                edges[1:],
                tol_seg,
                undefined=undefined,
                elem_budget=cfg.max_cells,
            )
            evals += n
            finite_gaps = gaps[np.isfinite(gaps)]
            resid = float(np.sum(finite_gaps[finite_gaps > tol_seg]))
            mon_scale = float(np.ptp(anchors[-5:])) if len(anchors) >= 2 else 0.0
            if resid > max(100.0 * cfg.tol, 0.02 * mon_scale):
                # The slab could not be resolved within budget; its sum
                # would poison both the value and the monitors.
                return _SideOutcome(
                    total,
                    math.inf,
                    IntegralStatus.INCONCLUSIVE,
                    anchors,
                    evals,
                    message=(
                        f"ran out of resolvable rungs at [{rung_lo!r}, {c!r}] "
                        f"(unresolved residue {resid:.2e})"
                    ),
                )
            rough += resid
            if inner.size >= 32:
                lobe_amps.append(float(np.max(np.abs(vals))))
            for v in vals:
                total += float(v)
                boundary_sums.append(total)
        anchors.append(total)
        scale0 = max(1.0, abs(anchors[0]))
        if abs(total) > 1e12 * scale0:
            return _SideOutcome(
                total,
                abs(total),
                IntegralStatus.DIVERGED,
                anchors,
                evals,
                message=f"cutoff integrals grew beyond 1e12 x initial scale at cutoff {j}",
            )
        tol_floor = 10.0 * cfg.mixed_tol(total)
        if _oscillation_stalled(anchors, tol_floor):
            return _SideOutcome(
                total,
                float(np.ptp(anchors[-5:])),
                IntegralStatus.DIVERGED,
                anchors,
                evals,
                message="cutoff integrals oscillate without decay as the cutoff grows",
            )
        converged, value, err = _exhaust_converged(
            boundary_sums, anchors, cfg, rough, accel_hist
        )
        if converged:
            return _SideOutcome(value, err, IntegralStatus.CONVERGED, anchors, evals)
        prev_edge = c
    return _SideOutcome(
        anchors[-1] if anchors else math.nan,
        abs(anchors[-1] - anchors[-2]) if len(anchors) >= 2 else math.inf,
        IntegralStatus.INCONCLUSIVE,
        anchors,
        evals,
        message="cutoff budget exhausted before the tolerance was met",
    )


def _exhaust_converged(
    boundary_sums: list[float],
    anchors: list[float],
    cfg: IntegratorConfig,
    rough: float = 0.0,
    accel_hist: Optional[list[float]] = None,
) -> tuple[bool, float, float]:
    """Convergence decision for an exhaustion run.

    Accepts either a raw Cauchy tail on the cutoff integrals or an
    accelerated estimate whose error gauge is below tolerance while the
    raw oscillation is visibly decaying and two consecutive rungs agree
    on the accelerated value.  The decay guard keeps Aitken antilimits
    of divergent integrals from being reported as values.
    """
    if len(anchors) < 4:
        return False, math.nan, math.inf
    raw_gaps = [abs(b - a) for a, b in zip(anchors[-4:-1], anchors[-3:])]
    raw_err = max(max(raw_gaps), rough)
    tol = cfg.mixed_tol(anchors[-1])
    if raw_err <= tol:
        return True, anchors[-1], raw_err
    osc = window_oscillation(anchors, 5)
    # Window extrema persist for several steps, so decay is judged over
    # two window advances, never one.
    decaying = len(osc) >= 3 and (osc[-1] <= 0.9 * osc[-3] or osc[-1] <= tol)
    tail = boundary_sums[-min(len(boundary_sums), 96) :]
    est, err = shanks_limit(tail)
    est_a, err_a = shanks_limit(anchors)
    if err_a < err:
        est, err = est_a, err_a
    err = max(err, rough)
    if accel_hist is not None and math.isfinite(est):
        accel_hist.append(est)
    if decaying and err <= cfg.mixed_tol(est):
        if (
            accel_hist is not None
            and len(accel_hist) >= 2
            and abs(accel_hist[-1] - accel_hist[-2]) <= 0.5 * cfg.mixed_tol(est)
        ):
            err = max(err, abs(accel_hist[-1] - accel_hist[-2]))
            return True, est, err
    return False, math.nan, math.inf


def _improper_ends(
    fv, target: ClosedInterval, cfg: IntegratorConfig
) -> tuple[bool, bool]:
    """Which endpoints need exhaustion: infinite, declared, or undefined."""
    lo, hi = target.lo, target.hi
    left = lo == NEG_INF
    right = hi == POS_INF
    if lo.is_finite:
        if lo.value in cfg.singular_points or _probe_undefined(fv, [lo.value]):
            left = True
    if hi.is_finite:
        if hi.value in cfg.singular_points or _probe_undefined(fv, [hi.value]):
            right = True
    return left, right


def hake_improper(
    f: Callable, target: ClosedInterval, cfg: Optional[IntegratorConfig] = None
) -> IntegralResult:
    """Evaluate an integral as the limit of integrals over exhaustions.

    Equivalent in value to ``hk_integrate`` whenever either converges;
    this is the practical route for infinite intervals and endpoint
    singularities.  Status DIVERGED is decided on the raw sequence of
    cutoff integrals (unbounded growth, or window oscillation that stops
    decaying); INCONCLUSIVE means the cutoff budget ran out first.
    """
    cfg = cfg or IntegratorConfig()
    lo, hi = target.lo, target.hi
    mid_probe = 1.0
    if lo.is_finite and hi.is_finite:
        mid_probe = lo.value + 0.5 * (hi.value - lo.value)
    elif lo.is_finite:
        mid_probe = lo.value + 1.0
    elif hi.is_finite:
        mid_probe = hi.value - 1.0
    fv = _as_vector_fn(f, probe=mid_probe)
    left, right = _improper_ends(fv, target, cfg)
    if not left and not right:
        right = True  # compact target: exhaust toward the right endpoint
    # Anchor separating the two exhaustion directions.
    if left and right:
        lo_v = lo.as_float()
        hi_v = hi.as_float()
        if lo_v < 0.0 < hi_v:
            anchor = 0.0
        elif lo.is_finite and hi.is_finite:
            anchor = lo.value + 0.5 * (hi.value - lo.value)
        elif lo.is_finite:
            anchor = lo.value + 1.0
        elif hi.is_finite:
            anchor = hi.value - 1.0
        else:
            anchor = 0.0
    else:
        anchor = lo.value if not left else hi.value
    undefined = _probe_undefined(fv, cfg.singular_points)
    sides: list[_SideOutcome] = []
    if right:
        sides.append(
            _exhaust_side(
                fv,
                anchor,
                hi == POS_INF,
                hi.value if hi.is_finite else None,
                cfg,
                undefined,
            )
        )
    if left:
        def refl(u):
            return np.asarray(fv(-np.asarray(u, dtype=float)), dtype=float)

        cfg_left = cfg.with_(
            singular_points=tuple(-p for p in cfg.singular_points),
            gauge_override=(
                _reflect_gauge(cfg.gauge_override)
                if cfg.gauge_override is not None
                else None
            ),
        )
        sides.append(
            _exhaust_side(
                refl,
                -anchor,
                lo == NEG_INF,
                -lo.value if lo.is_finite else None,
                cfg_left,
                [-u for u in undefined],
            )
        )
    value = sum(s.value for s in sides)
    err = sum(s.err for s in sides)
    evals = sum(s.evals for s in sides)
    trace: list[tuple[int, float]] = []
    i = 0
    for s in sides:
        for a in s.anchors:
            trace.append((i, float(a)))
            i += 1
    statuses = [s.status for s in sides]
    if IntegralStatus.DIVERGED in statuses:
        status = IntegralStatus.DIVERGED
    elif IntegralStatus.INCONCLUSIVE in statuses:
        status = IntegralStatus.INCONCLUSIVE
    else:
        status = IntegralStatus.CONVERGED
    message = "; ".join(s.message for s in sides if s.message)
    return IntegralResult(value, err, status, evals, trace, message=message)


def integrate_auto(
    f: Callable, target: ClosedInterval, cfg: Optional[IntegratorConfig] = None
) -> IntegralResult:
    """Dispatch: exhaustion for unbounded or endpoint-undefined targets,
    the direct gauge schedule otherwise.  The two agree in value, so the
    choice is purely about efficiency."""
    cfg = cfg or IntegratorConfig()
    if not (target.lo.is_finite and target.hi.is_finite):
        return hake_improper(f, target, cfg)
    mid = target.lo.value + 0.5 * (target.hi.value - target.lo.value)
    fv = _as_vector_fn(f, probe=mid)
    ends = [v for v in (target.lo.value, target.hi.value) if v in cfg.singular_points]
    if ends and _probe_undefined(fv, ends):
        return hake_improper(f, target, cfg)
    return hk_integrate(f, target, cfg)
