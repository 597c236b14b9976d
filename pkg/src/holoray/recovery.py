"""Recovery of far-field expansions from intensity-only ray samples.

Everything here sees the measured field exclusively through an opaque
callable ``point -> intensity``; no phase information and no other field
quantity is reachable from this module. The pipeline is: form the scaled
intensity residual along a ray, extract its leading oscillatory coefficient
from a two-point sample, peel it off, and induct to deeper coefficients,
refining each level across a radius grid.

Measurement model caveat: the engine assumes the intensity oracle can be
queried at the large radii it chooses. Extending data given only on a short
interval of the ray is an analytic-continuation problem, deliberately out of
scope here.
"""

from __future__ import annotations

import cmath
import math
import warnings as _warnings
from dataclasses import dataclass

import numpy as np

from .fields import (
    PHASE_GAUGED,
    Direction,
    DomainError,
    FarFieldExpansion,
    Ray,
    WaveVector,
)

__all__ = [
    "DegenerateDirectionError",
    "DegenerateTauError",
    "OutOfZoneError",
    "SamplingPlan",
    "IntensityTrace",
    "LevelDiagnostics",
    "RecoveryReport",
    "PlaneTargetResult",
    "choose_tau",
    "scaled_residual",
    "extract_leading",
    "partial_field",
    "residual_b",
    "recover_next",
    "richardson_refine",
    "recover_expansion",
    "reconstruct_on_ray",
    "recover_on_plane",
    "amplification_floor",
]


class DegenerateDirectionError(ValueError):
    """The ray direction coincides with the plane-wave direction."""


class DegenerateTauError(ValueError):
    """The two-point extraction kernel is numerically singular for this tau."""


class OutOfZoneError(ValueError):
    """Reconstruction requested below the expansion's convergence bound."""


# Direction degeneracy threshold: 1 - dir.k/kappa <= this value is rejected.
_DIR_TOL = 1e-12
# Kernel degeneracy threshold on |D|.
_ABSD_TOL = 1e-6
# Relative round-off scale of a double-precision intensity sample.
_EPS_INTENSITY = 2.3e-16
# Polish sweep controls: stop when the largest relative correction falls
# below _SWEEP_TOL, never run more than _MAX_SWEEPS sweeps.
_SWEEP_TOL = 1e-13
_MAX_SWEEPS = 8


@dataclass(frozen=True)
class SamplingPlan:
    """Radius grid and extraction parameters for one recovery run.

    ``tau = None`` requests the automatic choice (see :func:`choose_tau`),
    resolved when a recovery starts; a numeric ``tau`` must already satisfy
    ``min(s_grid) >= 10 * tau``.
    """

    s_grid: tuple[float, ...]
    tau: float | None = None
    order: int = 4
    richardson: bool = True

    def __init__(self, s_grid, tau: float | None = None, order: int = 4, richardson: bool = True):
        grid = tuple(float(s) for s in s_grid)
        if not grid:
            raise DomainError("s_grid must be nonempty")
        if any(s <= 0.0 for s in grid):
            raise DomainError("s_grid radii must be positive")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise DomainError("s_grid must be strictly ascending")
        if tau is not None:
            tau = float(tau)
            if tau <= 0.0:
                raise DomainError("tau must be positive")
            if grid[0] < 10.0 * tau:
                raise DomainError(
                    f"min(s_grid)={grid[0]} violates min(s_grid) >= 10*tau with tau={tau}"
                )
        order = int(order)
        if order < 1:
            raise DomainError("order must be a positive integer")
        object.__setattr__(self, "s_grid", grid)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "richardson", bool(richardson))


@dataclass(frozen=True)
class IntensityTrace:
    """Recorded intensity samples along one ray."""

    frame_origin: tuple[float, float, float]
    dir: Direction
    samples: tuple[tuple[float, float], ...]

    def __init__(self, frame_origin, dir: Direction, samples):
        if not isinstance(dir, Direction):
            dir = Direction(dir)
        origin = tuple(float(v) for v in np.asarray(frame_origin, dtype=float))
        rows = tuple((float(s), float(i)) for s, i in samples)
        radii = [s for s, _ in rows]
        if any(s <= 0.0 for s in radii):
            raise DomainError("trace radii must be positive")
        if len(set(radii)) != len(radii):
            raise DomainError("trace radii must be distinct")
        if any(i < 0.0 for _, i in rows):
            raise DomainError("intensities must be nonnegative")
        object.__setattr__(self, "frame_origin", origin)
        object.__setattr__(self, "dir", dir)
        object.__setattr__(self, "samples", rows)

    @classmethod
    def sample(cls, measure, frame_origin, dir: Direction, radii) -> "IntensityTrace":
        if not isinstance(dir, Direction):
            dir = Direction(dir)
        q = np.asarray(frame_origin, dtype=float)
        rows = [(float(s), float(measure(q + float(s) * dir.as_array()))) for s in radii]
        return cls(frame_origin, dir, rows)


@dataclass(frozen=True)
class LevelDiagnostics:
    """Per-level record of one induction step."""

    level: int
    tau: float
    abs_d: float
    raw: tuple[tuple[float, complex], ...]
    refined: complex
    spread: float


@dataclass(frozen=True)
class RecoveryReport:
    """Recovered plane-wave-gauged expansion plus per-level diagnostics."""

    expansion: FarFieldExpansion
    per_level: tuple[LevelDiagnostics, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.per_level) != len(self.expansion.coeffs):
            raise DomainError(
                "per_level length must equal the number of recovered coefficients"
            )
        for diag in self.per_level:
            if not diag.abs_d > _ABSD_TOL:
                raise DomainError(f"recorded |D|={diag.abs_d} is not > {_ABSD_TOL}")


@dataclass(frozen=True)
class PlaneTargetResult:
    """Outcome for one plane target: the point, its reconstructed value,
    the recovery report of the ray that served it (shared between targets on
    a common line), and a failure message when the value is None."""

    point: tuple[float, float, float]
    value: complex | None
    report: RecoveryReport | None
    message: str = ""


def _kdot(k: WaveVector, dir: Direction) -> float:
    return float(np.dot(k.as_array(), dir.as_array()))


def _check_direction(k: WaveVector, dir: Direction) -> float:
    kd = _kdot(k, dir)
    if 1.0 - kd / k.kappa <= _DIR_TOL:
        raise DegenerateDirectionError(
            "ray direction coincides with the plane-wave direction k/kappa "
            f"(1 - dir.k/kappa = {1.0 - kd / k.kappa:.3e} <= {_DIR_TOL})"
        )
    return kd


def choose_tau(k: WaveVector, dir: Direction) -> float:
    """Offset that maximizes the extraction kernel: ``tau* = pi/(2(kappa - k.dir))``.

    With this choice ``tau*(k.dir - kappa) = -pi/2`` and ``D = -2i``, the
    largest possible ``|D|``, so intensity noise is amplified least. Callers
    may override with any tau whose ``|D|`` stays above the degeneracy bound.
    """
    if not isinstance(dir, Direction):
        dir = Direction(dir)
    kd = _check_direction(k, dir)
    return math.pi / (2.0 * (k.kappa - kd))


def _real_sample(measure, point) -> float:
    value = measure(point)
    if isinstance(value, complex):
        if abs(value.imag) > 1e-13 * max(1.0, abs(value)):
            raise DomainError(f"intensity sample has a nonreal value {value!r}")
        value = value.real
    return float(value)


def scaled_residual(measure, k: WaveVector, q, dir: Direction, s: float) -> float:
    """Scaled intensity residual ``a~(s) = s * (I(q + s dir) - 1)``.

    Subtracting the unit plane-wave intensity and scaling by the radius turns
    the measured intensity into a quantity whose leading large-``s`` behavior
    is a pure two-phase oscillation carrying the first expansion coefficient.
    """
    if not isinstance(dir, Direction):
        dir = Direction(dir)
    s = float(s)
    if s <= 0.0:
        raise DomainError(f"radius must be positive, got {s}")
    point = np.asarray(q, dtype=float) + s * dir.as_array()
    return s * (_real_sample(measure, point) - 1.0)


def extract_leading(g_x: float, g_y: float, s: float, tau: float, k: WaveVector, dir: Direction) -> complex:
    """Two-point extraction of the leading oscillatory coefficient.

    Given values ``g_x = g(s)`` and ``g_y = g(s + tau)`` of a real signal with
    asymptotics ``exp(i phi(s)) F + exp(-i phi(s)) conj(F) + O(1/s)`` where
    ``phi(s) = s (kappa - k.dir)``, returns

        F_hat = (exp(i((s+tau) k.dir - kappa (s+tau))) g_x
                 - exp(i(s k.dir - kappa s)) g_y) / D,
        D = 2i sin(tau (k.dir - kappa)).

    The formula is exact (no remainder at all) whenever ``g`` is exactly of
    the two-phase form.
    """
    if not isinstance(dir, Direction):
        dir = Direction(dir)
    kd = _kdot(k, dir)
    delta = k.kappa - kd
    d_kernel = -2j * math.sin(tau * delta)
    if abs(d_kernel) <= _ABSD_TOL:
        raise DegenerateTauError(
            f"|D| = {abs(d_kernel):.3e} <= {_ABSD_TOL} for tau={tau}; extraction is singular"
        )
    s = float(s)
    # One product per phase argument keeps the rounding of the large phases
    # consistent with phi(s) = s (kappa - k.dir) itself.
    phase_y = cmath.exp(-1j * ((s + tau) * delta))
    phase_x = cmath.exp(-1j * (s * delta))
    return (phase_y * g_x - phase_x * g_y) / d_kernel


def _coeff_list(coeffs) -> list[complex]:
    if isinstance(coeffs, FarFieldExpansion):
        return list(coeffs.coeffs)
    return [complex(c) for c in coeffs]


def partial_field(coeffs, k: WaveVector, s: float) -> complex:
    """Truncated expansion ``(exp(i kappa s)/s) sum_j f_j / s**(j-1)``.

    Evaluated in the recovery frame: no plane-wave gauge factor is applied.
    An empty prefix gives 0.
    """
    s = float(s)
    if s <= 0.0:
        raise DomainError(f"radius must be positive, got {s}")
    values = _coeff_list(coeffs)
    acc = 0.0 + 0.0j
    inv = 1.0
    for c in values:
        acc += c * inv
        inv /= s
    return cmath.exp(1j * k.kappa * s) / s * acc


def amplification_floor(s: float, n: int) -> float:
    """Round-off scale of the depth-``n`` residual: ``s**(n+1) * 2.3e-16``.

    The intensity carries relative round-off ~2.3e-16; the residual scaling
    multiplies it by ``s`` and the depth-``n`` peel-off by ``s**n``.
    """
    return float(s) ** (n + 1) * _EPS_INTENSITY


def _model_residual(coeffs, kd: float, k: WaveVector, s: float) -> float:
    # a_n(s) = s (|exp(i k.dir s) + partial(s)|^2 - 1), kept as one subtraction
    # of near-equal intensities so cancellation happens before the s scaling.
    total = cmath.exp(1j * kd * s) + partial_field(coeffs, k, s)
    return s * (abs(total) ** 2 - 1.0)


def residual_b(measure, coeffs, k: WaveVector, q, dir: Direction, s: float) -> float:
    """Depth-``n`` residual ``b_n(s) = s**n (a~(s) - a_n(s))`` for ``n = len(coeffs)``.

    ``a_n`` is the scaled residual the truncated expansion would produce. With
    an exact prefix, ``b_n`` has the same two-phase asymptotics as ``a~`` with
    the next coefficient in the leading slot. The ``s**n`` scaling also
    multiplies intensity round-off: the engine checks
    :func:`amplification_floor` against its target tolerance and refuses
    depths whose noise floor would drown the estimate.
    """
    if not isinstance(dir, Direction):
        dir = Direction(dir)
    values = _coeff_list(coeffs)
    n = len(values)
    s = float(s)
    a_meas = scaled_residual(measure, k, q, dir, s)
    kd = _kdot(k, dir)
    return s**n * (a_meas - _model_residual(values, kd, k, s))


def recover_next(measure, coeffs, k: WaveVector, q, dir: Direction, s: float, tau: float) -> complex:
    """One induction step: estimate coefficient ``n+1`` given a prefix of ``n``.

    Extracts the leading coefficient of the depth-``n`` residual from the
    sample pair ``(s, s + tau)``. Error is O(1/s) plus whatever the prefix
    error feeds forward.
    """
    if not isinstance(dir, Direction):
        dir = Direction(dir)
    _check_direction(k, dir)
    b_x = residual_b(measure, coeffs, k, q, dir, s)
    b_y = residual_b(measure, coeffs, k, q, dir, s + tau)
    return extract_leading(b_x, b_y, s, tau, k, dir)


def richardson_refine(estimates) -> complex:
    """Eliminate the 1/s error term across a radius grid.

    For the largest two radii ``s1 < s2`` returns
    ``(s2 F(s2) - s1 F(s1)) / (s2 - s1)``; with three or more radii one
    further elimination step is applied to the largest three. A single
    estimate is returned unchanged with a warning.
    """
    rows = sorted(((float(s), complex(f)) for s, f in estimates), key=lambda t: t[0])
    if not rows:
        raise DomainError("no estimates to refine")
    if len(rows) == 1:
        _warnings.warn("richardson_refine got a single estimate; returning it unchanged")
        return rows[0][1]

    def eliminate(a, b):
        (sa, fa), (sb, fb) = a, b
        return (sb * fb - sa * fa) / (sb - sa)

    if len(rows) == 2:
        return eliminate(rows[0], rows[1])
    r1, r2, r3 = rows[-3], rows[-2], rows[-1]
    first = (r1[0], eliminate(r1, r2))
    second = (r3[0], eliminate(r2, r3))
    return (r3[0] * second[1] - r1[0] * first[1]) / (r3[0] - r1[0])


def _correction_estimate(cmeasure, coeffs, level, kd, k, q_arr, dir, s, tau) -> complex:
    # Residual of the FULL current model, re-weighted to the target level:
    # r**(level-1) (a~(r) - a_model(r)) has the level's coefficient error in
    # its leading slot, so the same two-point extraction yields a correction.
    def weighted(r):
        point = q_arr + r * dir.as_array()
        a_meas = r * (_real_sample(cmeasure, point) - 1.0)
        return r ** (level - 1) * (a_meas - _model_residual(coeffs, kd, k, r))

    return extract_leading(weighted(s), weighted(s + tau), s, tau, k, dir)


def recover_expansion(measure, ray: Ray, k: WaveVector, plan: SamplingPlan, *, target_tol: float = 1e-2) -> RecoveryReport:
    """Recover the far-field expansion seen from a ray, intensity-only.

    The recovery frame origin is ``ray.x0``, so the returned expansion is
    plane-wave-gauged: its coefficients absorb ``exp(-i k . x0)`` relative to
    the frame centered at the coordinate origin.

    The induction runs one level at a time: raw estimates at every base
    radius, a Richardson refinement across the grid (when enabled), then the
    refined value is committed as the prefix for the next level. Because a
    committed prefix error re-enters deeper residuals amplified by ``s``,
    grids with two or more radii get Gauss-Seidel polish sweeps afterwards:
    each sweep re-extracts per-level corrections from the residual of the
    full current model and Richardson-refines them, which contracts like
    ``1/s`` per sweep. Sweeps stop on convergence, after a fixed budget, or
    on the first sign of divergence (the previous iterate is kept and a
    warning recorded).

    ``target_tol`` is the accuracy the caller is aiming for; levels whose
    round-off floor (:func:`amplification_floor`) exceeds a tenth of it are
    not recovered: the report is truncated with an explanatory warning.
    """
    if not isinstance(ray, Ray):
        raise DomainError("ray must be a Ray")
    dir = ray.dir
    kd = _check_direction(k, dir)
    tau = plan.tau if plan.tau is not None else choose_tau(k, dir)
    grid = list(plan.s_grid)
    if grid[0] < 10.0 * tau:
        raise DomainError(
            f"min(s_grid)={grid[0]} violates min(s_grid) >= 10*tau with resolved tau={tau}"
        )
    abs_d = abs(2.0 * math.sin(tau * (kd - k.kappa)))
    if abs_d <= _ABSD_TOL:
        raise DegenerateTauError(
            f"|D| = {abs_d:.3e} <= {_ABSD_TOL} for tau={tau}; choose a different tau"
        )

    q_arr = np.array(ray.x0)
    cache: dict[bytes, float] = {}

    def cmeasure(point):
        key = np.asarray(point, dtype=float).tobytes()
        if key not in cache:
            cache[key] = _real_sample(measure, point)
        return cache[key]

    report_warnings: list[str] = []
    s_worst = grid[-1] + tau
    coeffs: list[complex] = []
    for level in range(1, plan.order + 1):
        floor = amplification_floor(s_worst, level - 1)
        if floor > 0.1 * target_tol:
            report_warnings.append(
                f"amplification abort at level {level}: round-off floor "
                f"{floor:.3e} at s={s_worst:g} exceeds 0.1 x target tolerance "
                f"{target_tol:g}; deeper levels not recovered"
            )
            break
        raws = [(s, recover_next(cmeasure, coeffs, k, q_arr, dir, s, tau)) for s in grid]
        if plan.richardson and len(raws) >= 2:
            committed = richardson_refine(raws)
        else:
            if plan.richardson and len(raws) < 2:
                report_warnings.append(
                    "richardson refinement requested but the grid has a single "
                    "radius; using the raw estimate"
                )
            committed = raws[-1][1]
        coeffs.append(committed)

    if plan.richardson and coeffs and len(grid) >= 2:
        best = list(coeffs)
        prev_max = math.inf
        for sweep in range(1, _MAX_SWEEPS + 1):
            trial = list(best)
            sweep_max = 0.0
            for level in range(1, len(trial) + 1):
                draws = [
                    (s, _correction_estimate(cmeasure, trial, level, kd, k, q_arr, dir, s, tau))
                    for s in grid
                ]
                delta = richardson_refine(draws)
                trial[level - 1] += delta
                sweep_max = max(sweep_max, abs(delta) / (1.0 + abs(trial[level - 1])))
            if sweep_max > 2.0 * prev_max:
                # Healthy sweeps contract by ~tau/s and floor jitter stays
                # within small factors; doubling means the iteration diverges.
                report_warnings.append(
                    f"refinement sweep {sweep} grew the corrections "
                    f"({sweep_max:.3e} > {prev_max:.3e}); kept the previous "
                    "iterate; deeper coefficients may be inaccurate"
                )
                break
            best = trial
            if sweep_max < _SWEEP_TOL:
                break
            if sweep_max > 0.5 * prev_max:
                # No real contraction: the corrections sit at the round-off
                # floor, so further sweeps only stir noise.
                break
            prev_max = sweep_max
        coeffs = best

    per_level = []
    for level in range(1, len(coeffs) + 1):
        prefix = coeffs[: level - 1]
        raws = tuple(
            (s, recover_next(cmeasure, prefix, k, q_arr, dir, s, tau)) for s in grid
        )
        spread = max(abs(r - coeffs[level - 1]) for _, r in raws)
        per_level.append(
            LevelDiagnostics(
                level=level,
                tau=tau,
                abs_d=abs_d,
                raw=raws,
                refined=coeffs[level - 1],
                spread=spread,
            )
        )

    expansion = FarFieldExpansion(ray.x0, dir, coeffs, PHASE_GAUGED)
    return RecoveryReport(expansion, tuple(per_level), tuple(report_warnings))


def reconstruct_on_ray(report: RecoveryReport, k: WaveVector, s_eval: float, *, r_min_estimate: float = 1.0) -> complex:
    """Field value at ``frame_origin + s_eval * dir`` from a recovery report.

    Undoes the plane-wave gauge: returns
    ``exp(i k . q) (exp(i kappa s)/s) sum_j f_j / s**(j-1)``. The expansion is
    only trusted in its numerical convergence zone, so ``s_eval`` must be at
    least ``2 * (|frame_origin| + r_min_estimate)`` where ``r_min_estimate``
    is the caller's bound on the source region radius about the coordinate
    origin.
    """
    s_eval = float(s_eval)
    q = np.array(report.expansion.frame_origin)
    bound = 2.0 * (float(np.linalg.norm(q)) + float(r_min_estimate))
    if s_eval < bound:
        raise OutOfZoneError(
            f"s_eval={s_eval} is below the convergence bound {bound} "
            "(2 x (|frame_origin| + r_min_estimate))"
        )
    gauge = cmath.exp(1j * float(np.dot(k.as_array(), q)))
    return gauge * partial_field(report.expansion.coeffs, k, s_eval)


def _plane_frame(plane):
    p0, t1, t2 = plane
    p0 = np.asarray(p0, dtype=float)
    t1 = np.asarray(t1, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    for name, t in (("first tangent", t1), ("second tangent", t2)):
        if abs(np.linalg.norm(t) - 1.0) > 1e-10:
            raise DomainError(f"{name} must be a unit vector")
    if abs(float(np.dot(t1, t2))) > 1e-10:
        raise DomainError("tangent vectors must be orthogonal")
    normal = np.cross(t1, t2)
    return p0, t1, t2, normal


def _candidate_directions(x, p0, t1, t2, normal, k: WaveVector):
    karr = k.as_array()
    cands: list[np.ndarray] = []

    def push(v):
        norm = float(np.linalg.norm(v))
        if norm < 1e-12:
            return
        u = v / norm
        for c in cands:
            if float(np.dot(c, u)) > 1.0 - 1e-12:
                return
        cands.append(u)

    # Tie-break choice first: the in-plane direction minimizing dir.k/kappa.
    k_in = karr - float(np.dot(karr, normal)) * normal
    if float(np.linalg.norm(k_in)) > 1e-12 * k.kappa:
        push(-k_in)
    # Radial escape from the in-plane foot of the coordinate origin.
    w = -p0
    anchor = p0 + (w - float(np.dot(w, normal)) * normal)
    v = x - anchor
    push(v - float(np.dot(v, normal)) * normal)
    # Fan of fixed in-plane directions as a last resort.
    for step in range(8):
        ang = 2.0 * math.pi * step / 8.0
        push(math.cos(ang) * t1 + math.sin(ang) * t2)
    return cands


def recover_on_plane(measure, plane, k: WaveVector, plan: SamplingPlan, targets, *, r_min_estimate: float = 1.0, target_tol: float = 1e-2):
    """Reconstruct the radiated field at in-plane target points.

    For each target an in-plane ray through it is selected: candidate
    directions are tried in tie-break order (most anti-aligned with the wave
    vector first), each must satisfy ``dir.k/kappa < 1 - 1e-6``, and the ray
    start is the point of the target's line closest to the coordinate origin,
    which both minimizes the gauge origin ``|q|`` and makes targets on a
    common line share one ray. A candidate is feasible when the target sits
    above the convergence bound ``2 (|q| + r_min_estimate)`` along it. One
    recovery runs per distinct ray (cached); each target is reconstructed at
    its own radius.

    Per-target failures (no feasible direction, degenerate geometry, a failed
    recovery) are reported individually in the result list; the batch always
    completes. Returns a list of :class:`PlaneTargetResult`.
    """
    p0, t1, t2, normal = _plane_frame(plane)
    results: list[PlaneTargetResult] = []
    ray_cache: dict[tuple, RecoveryReport] = {}
    for target in targets:
        x = np.asarray(target, dtype=float)
        point = (float(x[0]), float(x[1]), float(x[2]))
        offplane = abs(float(np.dot(x - p0, normal)))
        if offplane > 1e-9 * (1.0 + float(np.linalg.norm(x))):
            results.append(
                PlaneTargetResult(point, None, None, f"target is off the plane by {offplane:.3e}")
            )
            continue
        cands = _candidate_directions(x, p0, t1, t2, normal, k)
        if not cands:
            # Unreachable on a 2-plane; kept as a defensive guard.
            raise DegenerateDirectionError("no admissible in-plane direction exists")
        chosen = None
        for u in cands:
            kd_ratio = float(np.dot(k.as_array(), u)) / k.kappa
            if kd_ratio >= 1.0 - 1e-6:
                continue
            s_eval = float(np.dot(x, u))
            if s_eval <= 0.0:
                continue
            q = x - s_eval * u
            if s_eval < 2.0 * (float(np.linalg.norm(q)) + r_min_estimate):
                continue
            chosen = (u, q, s_eval)
            break
        if chosen is None:
            results.append(
                PlaneTargetResult(
                    point,
                    None,
                    None,
                    "no admissible in-plane ray reaches the target above its convergence bound",
                )
            )
            continue
        u, q, s_eval = chosen
        key = (tuple(np.round(u, 12)), tuple(np.round(q, 9)))
        try:
            if key not in ray_cache:
                ray_cache[key] = recover_expansion(
                    measure, Ray(q, Direction(u)), k, plan, target_tol=target_tol
                )
            report = ray_cache[key]
            value = reconstruct_on_ray(report, k, s_eval, r_min_estimate=r_min_estimate)
        except (ValueError, ArithmeticError) as exc:
            results.append(PlaneTargetResult(point, None, None, f"recovery failed: {exc}"))
            continue
        results.append(PlaneTargetResult(point, value, report, ""))
    return results
