"""Series-expansion spectral function: coefficients, zeros, exceptional points.

The eigenvalue problem is recast in a displaced-operator basis where the
wavefunction components expand with coefficients e_m, f_m obeying two coupled
recurrences in the spectral variable x = lambda_plus + E.  The sector function

    G_even(x) = sum_m (f_m - e_m) beta^m,    G_odd(x) = sum_m (f_m + e_m) beta^m

has simple poles at x = 0, 1, 2, ... and its zeros are the regular eigenvalues
of that parity.  A pole at x = n is lifted exactly when the numerator of e_n
vanishes there; that condition locates the isolated doubly degenerate
(level-crossing) eigenvalues E = n - lambda_plus.

Numerics: raw f_m grows combinatorially while beta^m shrinks, so the scaled
products et_m = e_m beta^m and ft_m = f_m beta^m are the stored representation.
Absorbing the beta powers removes every division by beta from the recurrences
(only beta^2 = g1*g2 remains), and the scaled terms decay geometrically with
ratio ~1/2, independent of coupling strength.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .model import DerivedParams, ModelParams, Parity, derive

#: half-width of the exclusion window around each pole during zero scans
DEFAULT_POLE_EXCLUSION = 1e-6
DEFAULT_GRID_STEP = 1e-3
DEFAULT_BISECT_TOL = 1e-10
DEFAULT_SERIES_TOL = 1e-12
DEFAULT_N_MAX = 2000
#: an x this close to a nonnegative integer is treated as sitting on a pole
POLE_PROXIMITY = 1e-12
#: number of trailing terms whose magnitude must drop below tolerance
TAIL_WINDOW = 5


class NonConvergenceError(RuntimeError):
    """Series tail still above tolerance when the term cap was reached."""


class PoleProximityError(ValueError):
    """Generic evaluation requested within POLE_PROXIMITY of a pole."""


class SuspectedMissedZeroWarning(UserWarning):
    """Two adjacent scan samples nearly vanish without a sign change."""


class NonConvergentSampleWarning(UserWarning):
    """A scan sample failed to converge and was skipped."""


@dataclass
class CoeffSeries:
    """Scaled recurrence coefficients at one spectral point.

    tail_estimate is relative to the running sector-function magnitude
    (floored at 1), so converged implies tail_estimate < the requested
    tolerance.
    """

    x: float
    n_terms: int
    e_scaled: list[float]
    f_scaled: list[float]
    converged: bool
    tail_estimate: float


@dataclass(frozen=True)
class GValue:
    x: float
    parity: Parity
    value: float
    nearest_pole_distance: float


@dataclass(frozen=True)
class ExceptionalSolution:
    """A lifted pole: doubly degenerate eigenvalue E = n - lambda_plus."""

    n: int
    g1_star: float
    energy: float
    condition_residual: float


@dataclass(frozen=True)
class ZeroScanOptions:
    grid_step: float = DEFAULT_GRID_STEP
    pole_exclusion: float = DEFAULT_POLE_EXCLUSION
    bisect_tol: float = DEFAULT_BISECT_TOL
    series_tol: float = DEFAULT_SERIES_TOL
    n_max: int = DEFAULT_N_MAX

    def __post_init__(self) -> None:
        for name in ("grid_step", "pole_exclusion", "bisect_tol", "series_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.n_max < TAIL_WINDOW:
            raise ValueError("n_max too small for the tail criterion")


def nearest_pole_distance(x: float) -> float:
    """Distance from x to the nearest pole (nonnegative integer)."""
    return abs(x - max(0.0, round(x)))


def _require_beta(d: DerivedParams) -> None:
    if d.beta <= 0.0:
        raise ValueError(
            "series solver needs both couplings positive (beta > 0); "
            "use the diagonalization oracle for a vanishing coupling"
        )


def _run_recurrence(
    d: DerivedParams,
    delta: float,
    xs: np.ndarray,
    tol: float,
    n_max: int,
    record: bool = False,
) -> dict:
    """Walk the scaled recurrences at the points xs simultaneously.

    Returns running parity sums, a latched per-point convergence mask and the
    relative tail estimate; with record=True (scalar use) also the term lists.
    """
    lp, lm, b2 = d.lambda_plus, d.lambda_minus, d.beta * d.beta
    f_prev = np.ones_like(xs)  # ft_0
    e_prev = (delta / 2.0 - lm) / (0.0 - xs)  # et_0
    f_prev2 = np.zeros_like(xs)
    e_prev2 = np.zeros_like(xs)
    sum_f = f_prev.copy()
    sum_e = e_prev.copy()
    tail = np.empty((TAIL_WINDOW, xs.size))
    tail[:] = np.inf
    tail[0] = np.maximum(np.abs(f_prev), np.abs(e_prev))
    converged = np.zeros(xs.shape, dtype=bool)
    e_terms = [e_prev.copy()] if record else None
    f_terms = [f_prev.copy()] if record else None

    n_terms = 1
    for m in range(1, n_max):
        f_m = (
            -(delta / 2.0 + lm) * e_prev
            + lm * e_prev2
            + (m - 1 + 2.0 * b2 + 2.0 * lp - xs) * f_prev
            - (b2 + lp) * f_prev2
        ) / (2.0 * m)
        e_m = ((b2 - lp) * e_prev + (delta / 2.0 - lm) * f_m + lm * f_prev) / (m - xs)
        sum_f += f_m
        sum_e += e_m
        tail[m % TAIL_WINDOW] = np.maximum(np.abs(f_m), np.abs(e_m))
        if record:
            e_terms.append(e_m.copy())
            f_terms.append(f_m.copy())
        e_prev2, e_prev = e_prev, e_m
        f_prev2, f_prev = f_prev, f_m
        n_terms = m + 1
        if m >= TAIL_WINDOW:
            scale = np.maximum(1.0, np.abs(sum_f) + np.abs(sum_e))
            converged |= tail.max(axis=0) < tol * scale
            if converged.all():
                break

    scale = np.maximum(1.0, np.abs(sum_f) + np.abs(sum_e))
    return {
        "sum_f": sum_f,
        "sum_e": sum_e,
        "converged": converged,
        "tail_rel": tail.max(axis=0) / scale,
        "n_terms": n_terms,
        "e_terms": e_terms,
        "f_terms": f_terms,
    }


def compute_coefficients(
    params: ModelParams,
    x: float,
    tol: float = DEFAULT_SERIES_TOL,
    n_max: int = DEFAULT_N_MAX,
    *,
    allow_unconverged: bool = False,
) -> CoeffSeries:
    """Scaled coefficient series {et_m, ft_m} at one spectral point.

    Raises PoleProximityError at a pole and NonConvergenceError when the tail
    is still above tolerance at n_max (suppressed by allow_unconverged, in
    which case the returned series carries converged=False).
    """
    d = derive(params)
    _require_beta(d)
    if nearest_pole_distance(x) <= POLE_PROXIMITY:
        raise PoleProximityError(f"x={x!r} is within {POLE_PROXIMITY} of a pole")
    out = _run_recurrence(d, params.delta, np.array([float(x)]), tol, n_max, record=True)
    converged = bool(out["converged"][0])
    if not converged and not allow_unconverged:
        raise NonConvergenceError(
            f"series tail {out['tail_rel'][0]:.3e} above tol {tol:.1e} after "
            f"{out['n_terms']} terms at x={x}"
        )
    return CoeffSeries(
        x=float(x),
        n_terms=out["n_terms"],
        e_scaled=[float(t[0]) for t in out["e_terms"]],
        f_scaled=[float(t[0]) for t in out["f_terms"]],
        converged=converged,
        tail_estimate=float(out["tail_rel"][0]),
    )


def series_g_value(series: CoeffSeries, parity: Parity) -> float:
    """Sector-function value from a stored coefficient series."""
    sign = -1.0 if parity is Parity.EVEN else 1.0
    return float(sum(f + sign * e for f, e in zip(series.f_scaled, series.e_scaled)))


def g_function(
    params: ModelParams,
    x: float,
    parity: Parity,
    tol: float = DEFAULT_SERIES_TOL,
    n_max: int = DEFAULT_N_MAX,
) -> GValue:
    """Evaluate the sector function at one point (even: f - e, odd: f + e)."""
    series = compute_coefficients(params, x, tol, n_max)
    return GValue(
        x=float(x),
        parity=parity,
        value=series_g_value(series, parity),
        nearest_pole_distance=nearest_pole_distance(x),
    )


def g_function_grid(
    params: ModelParams,
    xs: np.ndarray,
    parity: Parity,
    tol: float = DEFAULT_SERIES_TOL,
    n_max: int = DEFAULT_N_MAX,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized sector-function values over a pole-free grid.

    Returns (values, converged mask); non-converged entries are still reported
    so the caller can decide whether to skip or flag them.
    """
    d = derive(params)
    _require_beta(d)
    xs = np.asarray(xs, dtype=float)
    out = _run_recurrence(d, params.delta, xs, tol, n_max)
    sign = -1.0 if parity is Parity.EVEN else 1.0
    return out["sum_f"] + sign * out["sum_e"], out["converged"]


def _bisect(fn, a: float, b: float, fa: float, fb: float, xtol: float) -> float:
    """Plain bisection on a sign change; assumes fa*fb < 0."""
    while b - a > xtol:
        mid = 0.5 * (a + b)
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fa < 0.0) != (fm < 0.0):
            b, fb = mid, fm
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def _scan_segments(x_lo: float, x_hi: float, exclusion: float) -> list[tuple[float, float]]:
    """Open intervals between consecutive poles, clipped to [x_lo, x_hi].

    The region below x=0 contains no poles and forms a single segment.
    """
    segments: list[tuple[float, float]] = []
    if x_lo < -exclusion:
        segments.append((x_lo, min(x_hi, -exclusion)))
    k = max(0, math.ceil(x_lo))
    while k < x_hi:
        a = max(x_lo, k + exclusion)
        b = min(x_hi, k + 1 - exclusion)
        if b > a:
            segments.append((a, b))
        k += 1
    return segments


def _zeros_on_segments(
    fn_grid, fn_point, segments: list[tuple[float, float]], opts: ZeroScanOptions
) -> list[float]:
    """Grid-sample fn on each segment, bracket sign changes, refine by bisection.

    fn_grid maps an ndarray of x to (values, converged mask); fn_point is its
    scalar counterpart.  Non-converged samples are skipped with a warning; two
    adjacent nearly-zero samples without a sign change raise the
    near-tangency warning.
    """
    zeros: list[float] = []
    near_zero = 10.0 * opts.bisect_tol
    for a, b in segments:
        n_pts = max(2, int(math.ceil((b - a) / opts.grid_step)) + 1)
        xs = np.linspace(a, b, n_pts)
        values, converged = fn_grid(xs)
        if not converged.all():
            warnings.warn(
                f"{int((~converged).sum())} scan samples in ({a:.6g}, {b:.6g}) "
                "did not converge and were skipped",
                NonConvergentSampleWarning,
                stacklevel=3,
            )
            xs, values = xs[converged], values[converged]
        for i in range(len(xs) - 1):
            va, vb = values[i], values[i + 1]
            if va == 0.0:
                zeros.append(float(xs[i]))
                continue
            if (va < 0.0) != (vb < 0.0):
                zeros.append(_bisect(fn_point, float(xs[i]), float(xs[i + 1]), va, vb, opts.bisect_tol))
            elif abs(va) < near_zero and abs(vb) < near_zero:
                warnings.warn(
                    f"near-tangency at x in [{xs[i]:.9g}, {xs[i + 1]:.9g}]: adjacent "
                    "samples nearly vanish without a sign change",
                    SuspectedMissedZeroWarning,
                    stacklevel=3,
                )
        if len(xs) and values[-1] == 0.0:
            zeros.append(float(xs[-1]))
    return zeros


def find_regular_zeros(
    params: ModelParams,
    x_range: tuple[float, float],
    parity: Parity,
    opts: ZeroScanOptions | None = None,
) -> list[float]:
    """Regular eigenvalues of one parity sector as energies E = x - lambda_plus.

    Pole crossings are excluded by construction: each interval between
    consecutive poles is scanned separately, leaving a window of half-width
    opts.pole_exclusion around every pole.  Zeros converging into that window
    are the degenerate exceptional case and are reported only through
    find_exceptional.
    """
    opts = opts or ZeroScanOptions()
    x_lo, x_hi = x_range
    if not (math.isfinite(x_lo) and math.isfinite(x_hi)) or x_hi <= x_lo:
        raise ValueError(f"invalid x_range {x_range!r}")
    d = derive(params)
    _require_beta(d)

    def fn_grid(xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        return g_function_grid(params, xs, parity, opts.series_tol, opts.n_max)

    def fn_point(x: float) -> float:
        values, _ = fn_grid(np.array([x]))
        return float(values[0])

    segments = _scan_segments(x_lo, x_hi, opts.pole_exclusion)
    zeros = _zeros_on_segments(fn_grid, fn_point, segments, opts)
    return sorted(x - d.lambda_plus for x in zeros)


def exceptional_condition(params: ModelParams, n: int) -> float:
    """Scaled pole-lifting residual T_n at x = n.

    T_n is the numerator of the coefficient e_n evaluated at the pole; it
    vanishes exactly when E = n - lambda_plus is a doubly degenerate
    eigenvalue.  All coefficients with index below n stay finite there, so
    the evaluation is regular.  The scaled recurrences contain no division
    by beta, so the residual is defined for beta = 0 as well (continuous
    one-coupling limit).
    """
    if n < 0:
        raise IndexError(f"pole index must be nonnegative, got {n}")
    d = derive(params)
    lp, lm, b2 = d.lambda_plus, d.lambda_minus, d.beta * d.beta
    delta = params.delta
    if n == 0:
        return delta / 2.0 - lm  # (delta/2 - lambda_minus) * ft_0
    x = float(n)
    f_prev, f_prev2 = 1.0, 0.0
    e_prev, e_prev2 = (delta / 2.0 - lm) / (0.0 - x), 0.0
    f_n = 0.0
    for m in range(1, n + 1):
        f_n = (
            -(delta / 2.0 + lm) * e_prev
            + lm * e_prev2
            + (m - 1 + 2.0 * b2 + 2.0 * lp - x) * f_prev
            - (b2 + lp) * f_prev2
        ) / (2.0 * m)
        if m < n:
            e_m = ((b2 - lp) * e_prev + (delta / 2.0 - lm) * f_n + lm * f_prev) / (m - x)
            e_prev2, e_prev = e_prev, e_m
            f_prev2, f_prev = f_prev, f_n
    return (b2 - lp) * e_prev + (delta / 2.0 - lm) * f_n + lm * f_prev


@dataclass(frozen=True)
class ExceptionalScanOptions:
    grid_step: float = DEFAULT_GRID_STEP
    residual_tol: float = 1e-10
    bracket_tol: float = 1e-13


def find_exceptional(
    delta: float,
    ratio: float,
    n: int,
    g1_range: tuple[float, float],
    opts: ExceptionalScanOptions | None = None,
) -> list[ExceptionalSolution]:
    """Couplings g1 at which the pole x = n is lifted, for fixed delta and
    ratio r = g2/g1.

    Scans the residual T_n(g1) on a grid, brackets every sign change and
    refines it by bisection.  An empty list is a valid outcome (for example
    the n = 0 condition has no root when the counter-rotating coupling
    dominates, r > 1).
    """
    if ratio < 0:
        raise ValueError(f"ratio must be nonnegative, got {ratio}")
    g_lo, g_hi = g1_range
    if not (0 < g_lo < g_hi) or not math.isfinite(g_hi):
        raise ValueError(f"g1_range must be a finite positive interval, got {g1_range!r}")
    opts = opts or ExceptionalScanOptions()

    def residual(g1: float) -> float:
        return exceptional_condition(ModelParams(delta, g1, ratio * g1), n)

    n_pts = max(2, int(math.ceil((g_hi - g_lo) / opts.grid_step)) + 1)
    grid = np.linspace(g_lo, g_hi, n_pts)
    values = [residual(g) for g in grid]
    solutions: list[ExceptionalSolution] = []
    for i in range(n_pts - 1):
        va, vb = values[i], values[i + 1]
        root = None
        if va == 0.0:
            root = float(grid[i])
        elif (va < 0.0) != (vb < 0.0):
            root = _bisect(residual, float(grid[i]), float(grid[i + 1]), va, vb, opts.bracket_tol)
        if root is not None:
            lp = derive(ModelParams(delta, root, ratio * root)).lambda_plus
            solutions.append(
                ExceptionalSolution(
                    n=n,
                    g1_star=root,
                    energy=n - lp,
                    condition_residual=residual(root),
                )
            )
    if values[-1] == 0.0:
        lp = derive(ModelParams(delta, float(grid[-1]), ratio * float(grid[-1]))).lambda_plus
        solutions.append(
            ExceptionalSolution(
                n=n, g1_star=float(grid[-1]), energy=n - lp, condition_residual=0.0
            )
        )
    return solutions


def wavefunction_coefficients(
    params: ModelParams,
    energy: float,
    parity: Parity,
    n_terms: int | None = None,
    tol: float = DEFAULT_SERIES_TOL,
    n_max: int = DEFAULT_N_MAX,
) -> CoeffSeries:
    """Unnormalized expansion coefficients of the eigenstate at a converged
    regular eigenvalue, in the positive-displacement basis.

    The opposite-displacement representation follows by attaching (-1)^m and
    swapping the component roles, so only one series is exposed.  When the
    sector-function residual at (energy, parity) is not small the energy is
    probably not an eigenvalue of that sector; a warning is issued.
    """
    x = derive(params).lambda_plus + energy
    if n_terms is not None:
        if n_terms < 1:
            raise ValueError("n_terms must be positive")
        series = compute_coefficients(params, x, tol, n_terms, allow_unconverged=True)
    else:
        series = compute_coefficients(params, x, tol, n_max)
    residual = series_g_value(series, parity)
    scale = max(1.0, sum(abs(f) for f in series.f_scaled))
    if abs(residual) > 1e-6 * scale:
        warnings.warn(
            f"sector-function residual {residual:.3e} at E={energy}: "
            "not an eigenvalue of this parity sector?",
            UserWarning,
            stacklevel=2,
        )
    return series
