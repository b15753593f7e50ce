"""Tagged partitions and the gauge-driven partitioner.

Cousin's lemma guarantees that every gauge on a closed interval of the
compactified line admits a fine tagged partition; the constructive
version here carves unbounded end cells first (every gauge window at an
infinite end is a ray, so one cell suffices) and then bisects the finite
remainder until every cell fits inside the window of one of its
candidate tags (left end, midpoint, right end).

The bisection engine is vectorized: each round processes the whole
frontier of still-unaccepted cells as numpy arrays, which is what makes
partitions of a few million cells affordable.  Accepted cells stream
through a callback so integration does not have to materialize them.
"""
from __future__ import annotations

import math
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .extreal import (
    NEG_INF,
    POS_INF,
    ClosedInterval,
    ExtReal,
    ext,
)
from .gauge import Gauge

__all__ = [
    "TaggedPartition",
    "DepthExceeded",
    "CellBudgetExceeded",
    "EvaluatorDomainError",
    "validate",
    "riemann_sum",
    "cousin_fine_partition",
    "DEFAULT_MAX_CELLS",
]

DEFAULT_MAX_CELLS = 1 << 23

_PERMS = np.array(
    [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ],
    dtype=np.int8,
)


class DepthExceeded(RuntimeError):
    """Bisection hit the depth limit: the gauge is pathologically narrow."""


class CellBudgetExceeded(RuntimeError):
    """The partition would exceed the cell budget."""


class EvaluatorDomainError(RuntimeError):
    """The integrand misbehaved (non-finite or raised) at a tag."""

    def __init__(self, message: str, tag: Optional[float] = None):
        super().__init__(message)
        self.tag = tag


class TaggedPartition:
    """A finite list of (tag, cell) pairs over a target interval."""

    __slots__ = ("target", "pairs")

    def __init__(
        self,
        target: ClosedInterval,
        pairs: Iterable[tuple[ExtReal, ClosedInterval]],
    ):
        self.target = target
        self.pairs = [(ext(t), c) for t, c in pairs]

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def to_records(self) -> list[dict]:
        """JSON-ready view: list of {tag, lo, hi} with string infinities."""

        def num(x: ExtReal):
            return x.value if x.is_finite else str(x)

        return [
            {"tag": num(tag), "lo": num(cell.lo), "hi": num(cell.hi)}
            for tag, cell in self.pairs
        ]

    def __repr__(self) -> str:
        return f"TaggedPartition({self.target!r}, cells={len(self.pairs)})"


def validate(partition: TaggedPartition) -> list[str]:
    """All structural violations, or [] for a genuine tagged partition.

    Checks: every tag lies in its cell, cells stay inside the target,
    interiors are pairwise disjoint, and the union is exactly the
    target.  Repeated tag values across cells are legitimate.
    """
    violations: list[str] = []
    target = partition.target
    if not partition.pairs:
        return [f"empty partition does not cover {target!r}"]
    for tag, cell in partition.pairs:
        if not cell.contains(tag):
            violations.append(f"tag {tag} outside its cell {cell!r}")
        if cell.lo < target.lo or cell.hi > target.hi:
            violations.append(f"cell {cell!r} extends outside target {target!r}")
    cells = sorted((c for _, c in partition.pairs), key=lambda c: c.lo._key())
    if cells[0].lo != target.lo:
        violations.append(f"coverage starts at {cells[0].lo}, target starts at {target.lo}")
    for prev, cur in zip(cells, cells[1:]):
        if cur.lo < prev.hi:
            violations.append(f"cells {prev!r} and {cur!r} overlap")
        elif cur.lo > prev.hi:
            violations.append(f"gap between {prev.hi} and {cur.lo}")
    if cells[-1].hi != target.hi:
        violations.append(f"coverage ends at {cells[-1].hi}, target ends at {target.hi}")
    return violations


def riemann_sum(f: Callable, partition: TaggedPartition) -> float:
    """Sum of f(tag) * length(cell) over the partition.

    Unbounded cells contribute exactly 0 and f is never evaluated at
    their tags, so the sum is a finite combination of finite terms.
    Accumulation uses exact summation, making the result independent of
    the order of the pairs.
    """
    tags: list[float] = []
    lengths: list[float] = []
    for tag, cell in partition.pairs:
        if not cell.is_bounded:
            continue
        tags.append(tag.value if tag.is_finite else math.nan)
        lengths.append(cell.length())
        if not tag.is_finite:
            raise EvaluatorDomainError(
                f"finite cell {cell!r} carries an infinite tag", tag=None
            )
    if not tags:
        return 0.0
    tag_arr = np.array(tags, dtype=float)
    try:
        values = np.asarray(f(tag_arr), dtype=float)
        if values.shape != tag_arr.shape:
            raise TypeError("shape mismatch")
    except EvaluatorDomainError:
        raise
    except Exception:
        values = np.empty_like(tag_arr)
        for i, t in enumerate(tag_arr):
            try:
                values[i] = float(f(t))
            except Exception as exc:
                raise EvaluatorDomainError(
                    f"evaluator raised at tag {t!r}: {exc}", tag=float(t)
                ) from exc
    bad = ~np.isfinite(values)
    if bad.any():
        t = float(tag_arr[np.flatnonzero(bad)[0]])
        raise EvaluatorDomainError(f"evaluator returned non-finite value at tag {t!r}", tag=t)
    return math.fsum(values[i] * lengths[i] for i in range(len(lengths)))


def _carve_ends(
    gauge: Gauge, target: ClosedInterval
) -> tuple[float, float, list[tuple[ExtReal, ClosedInterval]]]:
    """Split off unbounded end cells; return the finite remainder bounds."""
    end_cells: list[tuple[ExtReal, ClosedInterval]] = []
    eps = float(np.finfo(float).eps)
    lo_f: float
    hi_f: float
    c1 = None
    if target.lo == NEG_INF:
        w = gauge.assign(NEG_INF)
        if not w.includes_neg_inf:
            raise ValueError("gauge window at -inf does not adjoin -inf")
        b = w.hi.as_float()
        th = target.hi.as_float()
        bound = min(b, th)
        if not math.isfinite(bound):
            bound = 0.0
        step = max(1.0, 8.0 * eps * abs(bound))
        c1 = bound - step
        end_cells.append((NEG_INF, ClosedInterval(NEG_INF, c1)))
        lo_f = c1
    else:
        lo_f = target.lo.value
    if target.hi == POS_INF:
        w = gauge.assign(POS_INF)
        if not w.includes_pos_inf:
            raise ValueError("gauge window at +inf does not adjoin +inf")
        a = w.lo.as_float()
        tl = target.lo.as_float()
        bound = max(a, tl)
        if not math.isfinite(bound):
            bound = 0.0
        step = max(1.0, 8.0 * eps * abs(bound))
        c2 = bound + step
        if c1 is not None and c2 <= c1:
            c2 = c1 + max(1.0, 8.0 * eps * abs(c1))
        end_cells.append((POS_INF, ClosedInterval(c2, POS_INF)))
        hi_f = c2
    else:
        hi_f = target.hi.value
    if not lo_f < hi_f:
        raise ValueError(
            f"no room for a finite segment between {lo_f} and {hi_f}; "
            "gauge rays at the ends are inconsistent with the target"
        )
    return lo_f, hi_f, end_cells


def refine_fine_cells(
    gauge: Gauge,
    lo: float,
    hi: float,
    *,
    rng: np.random.Generator,
    emit: Callable[[np.ndarray, np.ndarray, np.ndarray], None],
    policy: str = "random",
    max_depth: int = 60,
    max_cells: int = DEFAULT_MAX_CELLS,
    undefined_tags: Sequence[float] = (),
    chunk: int = 1 << 19,
) -> int:
    """Bisect [lo, hi] into gauge-fine cells, streaming them to ``emit``.

    Candidate tags for a cell [u, v] are u, the midpoint, and v; the
    order they are tried in is  either a seeded random permutation
    ("random") or midpoint first with the endpoints in seeded random
    order ("midpoint_first", the low-noise choice for integration).
    Tags listed in ``undefined_tags`` are never emitted: a cell accepted
    through such a tag is emitted with the nearest defined endpoint
    instead (the gauge window test still uses the original candidate).

    Returns the number of accepted cells.  Raises DepthExceeded if some
    cell survives max_depth bisections and CellBudgetExceeded if the
    frontier plus accepted cells would exceed max_cells.
    """
    if policy not in ("random", "midpoint_first"):
        raise ValueError(f"unknown tag policy {policy!r}")
    undef = np.array(sorted(set(float(t) for t in undefined_tags)), dtype=float)
    pend_u = np.array([lo], dtype=float)
    pend_v = np.array([hi], dtype=float)
    accepted = 0
    for depth in range(max_depth + 1):
        n = pend_u.size
        if n == 0:
            return accepted
        if accepted + 2 * n > max_cells:
            raise CellBudgetExceeded(
                f"partition would exceed {max_cells} cells (depth {depth})"
            )
        next_u: list[np.ndarray] = []
        next_v: list[np.ndarray] = []
        for start in range(0, n, chunk):
            u = pend_u[start : start + chunk]
            v = pend_v[start : start + chunk]
            m = u + 0.5 * (v - u)
            splittable = (m > u) & (m < v)
            cand = np.stack((u, np.where(splittable, m, u), v))
            glo, ghi = gauge.windows(cand.ravel())
            glo = glo.reshape(cand.shape)
            ghi = ghi.reshape(cand.shape)
            ok = (glo < u) & (v < ghi)
            ok[1] &= splittable
            if undef.size:
                is_undef = np.isin(cand, undef)
                # Replacement tag when the candidate itself is undefined:
                # the opposite endpoint for endpoints, the left endpoint
                # for the midpoint (falling back to the right).
                etag = cand.copy()
                u_ok = ~np.isin(u, undef)
                v_ok = ~np.isin(v, undef)
                etag[0] = np.where(is_undef[0], v, u)
                etag[2] = np.where(is_undef[2], u, v)
                etag[1] = np.where(is_undef[1], np.where(u_ok, u, v), etag[1])
                definable = np.stack(
                    (
                        ~is_undef[0] | v_ok,
                        ~is_undef[1] | u_ok | v_ok,
                        ~is_undef[2] | u_ok,
                    )
                )
                ok &= definable
            else:
                etag = cand
            if policy == "midpoint_first":
                coin = rng.integers(0, 2, size=u.size)
                first = np.where(coin == 0, 0, 2)
                third = np.where(coin == 0, 2, 0)
                order = np.stack((np.ones_like(first), first, third))
            else:
                perm = _PERMS[rng.integers(0, 6, size=u.size)]
                order = perm.T.astype(np.int64)
            cols = np.arange(u.size)
            chosen = np.full(u.size, -1, dtype=np.int64)
            for pos in range(3):
                cidx = order[pos]
                take = (chosen < 0) & ok[cidx, cols]
                chosen[take] = cidx[take]
            acc = chosen >= 0
            if acc.any():
                sel = cols[acc]
                tags = etag[chosen[acc], sel]
                emit(tags, u[acc], v[acc])
                accepted += int(acc.sum())
            rej = ~acc
            if rej.any():
                if not splittable[rej].all():
                    bad = np.flatnonzero(rej & ~splittable)[0]
                    raise DepthExceeded(
                        f"cell [{u[bad]!r}, {v[bad]!r}] cannot be split further "
                        "and no candidate tag satisfies the gauge"
                    )
                next_u.append(u[rej])
                next_u.append(m[rej])
                next_v.append(m[rej])
                next_v.append(v[rej])
        if next_u:
            pend_u = np.concatenate(next_u)
            pend_v = np.concatenate(next_v)
        else:
            return accepted
    raise DepthExceeded(
        f"{pend_u.size} cells still unaccepted at depth {max_depth}; "
        f"narrowest is [{pend_u[0]!r}, {pend_v[0]!r}]"
    )


def cousin_fine_partition(
    gauge: Gauge,
    target: ClosedInterval,
    max_depth: int = 60,
    *,
    seed: int = 0,
    policy: str = "random",
    max_cells: int = DEFAULT_MAX_CELLS,
) -> TaggedPartition:
    """Construct a tagged partition of ``target`` fine for ``gauge``.

    Deterministic for a fixed seed.  The result always passes
    ``validate``; it is fine for the gauge whenever no undefined-tag
    substitution was needed (the plain partitioner never substitutes).
    """
    lo_f, hi_f, end_cells = _carve_ends(gauge, target)
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    bucket: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []

    def emit(tags: np.ndarray, us: np.ndarray, vs: np.ndarray) -> None:
        bucket.append((tags.copy(), us.copy(), vs.copy()))

    refine_fine_cells(
        gauge,
        lo_f,
        hi_f,
        rng=rng,
        emit=emit,
        policy=policy,
        max_depth=max_depth,
        max_cells=max_cells,
    )
    if bucket:
        tags = np.concatenate([b[0] for b in bucket])
        us = np.concatenate([b[1] for b in bucket])
        vs = np.concatenate([b[2] for b in bucket])
        order = np.argsort(us, kind="stable")
        pairs = [
            (ExtReal(float(tags[i])), ClosedInterval(float(us[i]), float(vs[i])))
            for i in order
        ]
    else:
        pairs = []
    neg_ends = [pc for pc in end_cells if pc[0] == NEG_INF]
    pos_ends = [pc for pc in end_cells if pc[0] == POS_INF]
    return TaggedPartition(target, neg_ends + pairs + pos_ends)
