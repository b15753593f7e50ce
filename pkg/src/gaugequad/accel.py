"""Sequence acceleration: guarded Aitken delta-squared, iterated (Shanks).

Works on 1-D sequences and, for the series checkers, columnwise on 2-D
arrays (axis 0 is the sequence index).  Every transform step guards the
denominator: where it is negligible relative to the local scale the
entry is passed through unchanged, so converged or arithmetic stretches
never blow up.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "aitken_sweep",
    "shanks_limit",
    "shanks_columns",
    "series_limit",
    "window_oscillation",
]


def aitken_sweep(s: np.ndarray) -> np.ndarray:
    """One delta-squared sweep; output is 2 entries shorter on axis 0.

    Entries pass through untransformed where the second difference is at
    noise level (converged or arithmetic stretches) or where the implied
    correction dwarfs the sequence's own scale (an extrapolation no
    bounded sequence justifies).
    """
    s = np.asarray(s, dtype=float)
    s0 = s[:-2]
    s1 = s[1:-1]
    s2 = s[2:]
    d1 = s1 - s0
    d2 = s2 - s1
    den = d2 - d1
    scale = np.abs(d1) + np.abs(d2) + np.finfo(float).tiny
    safe = np.abs(den) > 1e-12 * scale
    correction = np.where(safe, d2 * d2 / np.where(safe, den, 1.0), 0.0)
    cap = 8.0 * (np.max(np.abs(s), axis=0) + np.finfo(float).tiny)
    correction = np.where(np.abs(correction) > cap, 0.0, correction)
    return s2 - correction


def shanks_limit(seq, max_sweeps: int | None = None) -> tuple[float, float]:
    """Iterated Aitken estimate of the limit and a two-sided error gauge.

    The error estimate combines the Cauchy gap at the deepest sweep with
    the change of the tail value across the last two sweeps, so it stays
    honest when the transform stalls.
    """
    s = np.asarray(seq, dtype=float)
    if s.size == 0:
        raise ValueError("empty sequence")
    if s.size < 3:
        est = float(s[-1])
        err = float(abs(s[-1] - s[0])) if s.size == 2 else float("inf")
        return est, err
    tails = [float(s[-1])]
    gaps = [abs(float(s[-1] - s[-2]))]
    sweeps = max_sweeps if max_sweeps is not None else (s.size - 1) // 2
    for _ in range(sweeps):
        if s.size < 3:
            break
        s = aitken_sweep(s)
        tails.append(float(s[-1]))
        gaps.append(abs(float(s[-1] - s[-2])) if s.size >= 2 else gaps[-1])
    est = tails[-1]
    err = gaps[-1]
    if len(tails) >= 2:
        err = max(err, abs(tails[-1] - tails[-2]))
    return est, float(err)


def shanks_columns(matrix: np.ndarray, max_sweeps: int | None = None):
    """Columnwise iterated Aitken: limits and error gauges per column."""
    s = np.asarray(matrix, dtype=float)
    if s.ndim != 2 or s.shape[0] == 0:
        raise ValueError("need a nonempty 2-D array")
    if s.shape[0] < 3:
        est = s[-1].copy()
        err = np.abs(s[-1] - s[0]) if s.shape[0] == 2 else np.full(s.shape[1], np.inf)
        return est, err
    prev_tail = s[-1].copy()
    gap = np.abs(s[-1] - s[-2])
    sweep_change = gap.copy()
    sweeps = max_sweeps if max_sweeps is not None else (s.shape[0] - 1) // 2
    for _ in range(sweeps):
        if s.shape[0] < 3:
            break
        s = aitken_sweep(s)
        gap = np.abs(s[-1] - s[-2]) if s.shape[0] >= 2 else gap
        tail = s[-1]
        sweep_change = np.abs(tail - prev_tail)
        prev_tail = tail.copy()
    return prev_tail, np.maximum(gap, sweep_change)


_SERIES_WINDOW = 128


def series_limit(term_at, xs, tol: float, n_cap: int = 1 << 20):
    """Pointwise limit of the series sum_{n>=1} term_at(n, xs).

    Partial sums are pushed in doubling octaves.  A column is settled when
    it stabilizes raw (Cauchy across the last octave), or when its recent
    structure is one acceleration can be trusted on: a tail decaying past a
    visible peak, or contracting alternation.  Accelerated values must agree
    across two consecutive octaves before they are accepted; the octave is
    sampled at 128 evenly strided checkpoints so the window always spans a
    factor-of-two range of indices regardless of depth.  Columns still
    undecided at n_cap are reported unresolved, never guessed.

    term_at(n, x_vector) must return the n-th term at those points.
    Returns (est, err, resolved); unresolved columns carry err = inf.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    m = xs.size
    est = np.zeros(m)
    err = np.full(m, np.inf)
    live = np.ones(m, dtype=bool)
    peak = np.zeros(m)
    sums = np.zeros(m)
    cand = np.full(m, np.nan)
    anchor_cand = np.full(m, np.nan)
    prev_span = np.full(m, np.inf)
    anchors: list[np.ndarray] = []
    atol = 0.25 * tol
    window = _SERIES_WINDOW
    k = 2 * window
    n = 0
    stage = 0
    while True:
        stride = k // (2 * window)
        cp = np.empty((window, m))
        slot = 0
        while n < k:
            n += 1
            if live.any():
                term = np.zeros(m)
                term[live] = term_at(n, xs[live])
                sums = sums + term
            np.maximum(peak, np.abs(sums), out=peak)
            if n > k // 2 and (n - k // 2) % stride == 0:
                cp[slot] = sums
                slot += 1
        anchors.append(sums.copy())
        span = np.abs(cp[-1] - cp[0])
        raw_ok = live & (span <= atol + atol * np.abs(cp[-1]))
        est = np.where(raw_ok, sums, est)
        err = np.where(raw_ok, span, err)
        live &= ~raw_ok
        gate = np.zeros(m, dtype=bool)
        if live.any():
            aw = np.abs(cp)
            q = window // 4
            hump = (np.max(aw[-q:], axis=0) <= 0.7 * np.max(aw[:q], axis=0) + atol) & (
                aw[-1] <= 0.5 * peak + atol
            )
            diffs = np.diff(cp, axis=0)
            signs = np.sign(diffs)
            alt = np.all(signs[1:] * signs[:-1] < 0, axis=0) & (
                np.abs(diffs[-1]) <= np.abs(diffs[0])
            )
            gate = live & (hump | alt)
            if gate.any():
                accel, gauge = shanks_columns(cp[:, gate])
                good = gauge <= atol + atol * np.abs(accel)
                gi = np.flatnonzero(gate)
                # Contracting alternation brackets its limit, so a clean
                # gauge is enough on the consecutive (stage-0) window;
                # everything else needs agreement across two octaves.
                instant = alt[gi] & (stage == 0)
                agree = good & (
                    instant | (np.abs(accel - cand[gi]) <= atol + atol * np.abs(accel))
                )
                done = gi[agree]
                est[done] = accel[agree]
                err[done] = np.where(
                    instant[agree],
                    gauge[agree],
                    (np.abs(accel - cand[gi]) + gauge)[agree],
                )
                live[done] = False
                cand[gi] = np.where(good, accel, np.nan)
            # Monotone tails with shrinking octave spans: the stage-end
            # anchors sit at powers of two, so a c*K^(-p) remainder is
            # geometric in the stage index and Shanks applies to them.
            if len(anchors) >= 5 and live.any():
                mono = np.all(signs >= 0, axis=0) | np.all(signs <= 0, axis=0)
                gate2 = live & mono & (span < prev_span)
                if gate2.any():
                    amat = np.array(anchors)
                    accel2, gauge2 = shanks_columns(amat[:, gate2])
                    good2 = gauge2 <= atol + atol * np.abs(accel2)
                    gi2 = np.flatnonzero(gate2)
                    agree2 = good2 & (
                        np.abs(accel2 - anchor_cand[gi2]) <= atol + atol * np.abs(accel2)
                    )
                    done2 = gi2[agree2]
                    est[done2] = accel2[agree2]
                    err[done2] = (np.abs(accel2 - anchor_cand[gi2]) + gauge2)[agree2]
                    live[done2] = False
                    anchor_cand[gi2] = np.where(good2, accel2, np.nan)
        cand[live & ~gate] = np.nan
        prev_span = span
        if not live.any() or k >= n_cap:
            break
        k *= 2
        stage += 1
    return est, err, ~live


def window_oscillation(values, width: int = 5) -> list[float]:
    """Max-min over a sliding window; one entry per full window."""
    v = np.asarray(values, dtype=float)
    if v.size < width:
        return []
    out = []
    for i in range(width - 1, v.size):
        w = v[i - width + 1 : i + 1]
        out.append(float(np.max(w) - np.min(w)))
    return out
