"""Adaptive Simpson quadrature.

Used as an independent oracle for the closed-form antiderivatives and
moments, so it deliberately knows nothing about Airy functions.
"""

import math

import numpy as np

from .errors import QuadratureError


def _simpson(fa, fm, fb, width):
    return width * (fa + 4.0 * fm + fb) / 6.0


def adaptive_simpson(f, a, b, tol=1e-10, max_depth=40, initial_intervals=8,
                     vectorized=True):
    """Integrate ``f`` over ``[a, b]`` to absolute tolerance ``tol``.

    Intervals are refined breadth-first so that a vectorized ``f`` is
    called once per refinement level on all active subintervals. Each
    subinterval receives a share of ``tol`` proportional to its width and
    is accepted when the two-panel and one-panel estimates agree to
    ``15 * share``; the Richardson-corrected estimate is accumulated.

    Parameters
    ----------
    f : callable
        Integrand. Must accept a 1-D float array when ``vectorized`` is
        true, otherwise a float.
    a, b : float
        Integration limits; ``b < a`` flips the sign of the result.
    tol : float
        Absolute error target.
    max_depth : int
        Hard cap on the number of bisections of any initial interval.
    initial_intervals : int
        Number of equal panels the range is split into before refinement;
        guards against false convergence on oscillatory integrands.

    Raises
    ------
    QuadratureError
        If subintervals still unresolved at ``max_depth`` carry a combined
        error estimate above ``tol / 10``.
    """
    a = float(a)
    b = float(b)
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol, max_depth, initial_intervals, vectorized)
    if not vectorized:
        scalar = f
        f = lambda x: np.array([scalar(float(v)) for v in x])  # noqa: E731

    total_width = b - a
    edges = np.linspace(a, b, int(initial_intervals) + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    vals = f(np.concatenate([lo, mid, hi]))
    n = lo.size
    flo, fmid, fhi = vals[:n], vals[n:2 * n], vals[2 * n:]
    whole = _simpson(flo, fmid, fhi, hi - lo)

    accepted = []
    for depth in range(max_depth + 1):
        lmid = 0.5 * (lo + mid)
        rmid = 0.5 * (mid + hi)
        vals = f(np.concatenate([lmid, rmid]))
        n = lo.size
        flm, frm = vals[:n], vals[n:]
        left = _simpson(flo, flm, fmid, mid - lo)
        right = _simpson(fmid, frm, fhi, hi - mid)
        refined = left + right
        delta = refined - whole
        share = tol * (hi - lo) / total_width
        done = np.abs(delta) <= 15.0 * share
        if not np.all(np.isfinite(refined)):
            bad = lo[~np.isfinite(refined)][0]
            raise QuadratureError(f"non-finite integrand near x={bad!r}")
        accepted.append(refined[done] + delta[done] / 15.0)
        keep = ~done
        if not np.any(keep):
            return math.fsum(np.concatenate(accepted))
        if depth == max_depth:
            break
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, fmid, fhi = flo[keep], fmid[keep], fhi[keep]
        lmid, rmid = lmid[keep], rmid[keep]
        flm, frm = flm[keep], frm[keep]
        left, right = left[keep], right[keep]
        lo = np.concatenate([lo, mid])
        hi_new = np.concatenate([mid, hi])
        flo = np.concatenate([flo, fmid])
        fhi = np.concatenate([fmid, fhi])
        mid = np.concatenate([lmid, rmid])
        fmid = np.concatenate([flm, frm])
        whole = np.concatenate([left, right])
        hi = hi_new

    bad_lo, bad_hi, bad_err = lo[~done], hi[~done], np.abs(delta[~done]) / 15.0
    # Width-proportional shares starve panels squeezed against an endpoint
    # singularity; accept them if their combined error still fits the budget.
    if math.fsum(bad_err) <= 0.1 * tol:
        accepted.append(refined[~done] + delta[~done] / 15.0)
        return math.fsum(np.concatenate(accepted))
    worst = int(np.argmax(bad_err))
    raise QuadratureError(
        f"adaptive Simpson did not converge on [{a!r}, {b!r}]: "
        f"{bad_lo.size} panels unresolved at depth {max_depth}, "
        f"worst panel [{bad_lo[worst]!r}, {bad_hi[worst]!r}] "
        f"with error estimate {bad_err[worst]:.3e}"
    )
