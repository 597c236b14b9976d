"""Config-driven experiment execution and report writing."""

from __future__ import annotations

import cmath
import hashlib
import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .config import (
    ChecksConfig,
    ExperimentConfig,
    PlaneGeometry,
    RayGeometry,
)
from .fields import (
    Direction,
    MultipoleSpectrum,
    RadiatingField,
    Ray,
    WaveVector,
    aw_coefficients,
    eval_radiated,
    eval_total,
    intensity_function,
)
from .recovery import (
    SamplingPlan,
    partial_field,
    recover_expansion,
    recover_on_plane,
)

RESULT_COLUMNS = (
    "experiment_id",
    "level",
    "s",
    "raw_re",
    "raw_im",
    "refined_re",
    "refined_im",
    "oracle_re",
    "oracle_im",
    "abs_error",
    "abs_d",
    "warnings",
)

PLANE_COLUMNS = (
    "experiment_id",
    "x",
    "y",
    "z",
    "recon_re",
    "recon_im",
    "true_re",
    "true_im",
    "rel_error",
    "status",
)

SYNTH_COLUMNS = (
    "experiment_id",
    "s",
    "radiated_re",
    "radiated_im",
    "total_re",
    "total_im",
    "intensity",
)

# Coefficient errors below this are round-off, not convergence data.
_SLOPE_FLOOR = 1e-12


@dataclass(frozen=True)
class ResultRow:
    """One (level, base radius) cell of a recovery or convergence run."""

    experiment_id: str
    level: int
    s: float
    raw: complex
    refined: complex
    oracle: complex | None
    abs_d: float
    warnings: str

    @property
    def abs_error(self) -> float | None:
        if self.oracle is None:
            return None
        return abs(self.refined - self.oracle)

    def as_csv(self) -> list[str]:
        return [
            self.experiment_id,
            str(self.level),
            _fmt(self.s),
            _fmt(self.raw.real),
            _fmt(self.raw.imag),
            _fmt(self.refined.real),
            _fmt(self.refined.imag),
            "" if self.oracle is None else _fmt(self.oracle.real),
            "" if self.oracle is None else _fmt(self.oracle.imag),
            "" if self.abs_error is None else _fmt(self.abs_error),
            _fmt(self.abs_d),
            self.warnings,
        ]


def _fmt(x: float) -> str:
    # 17 significant digits: enough to round-trip a double exactly.
    return format(float(x), ".17g")


def build_wave(config: ExperimentConfig) -> WaveVector:
    return WaveVector(config.scene.wave)


def build_field(config: ExperimentConfig) -> RadiatingField:
    scene = config.scene
    entries = [(l, m, complex(re, im)) for l, m, re, im in scene.entries]
    spectrum = MultipoleSpectrum(entries)
    kappa = math.sqrt(sum(v * v for v in scene.wave))
    return RadiatingField(spectrum, kappa, scene.center, scene.r_min)


def build_plan(config: ExperimentConfig) -> SamplingPlan:
    plan = config.plan
    tau = None if plan.tau == "auto" else float(plan.tau)
    return SamplingPlan(plan.s_grid, tau, plan.order, plan.richardson)


def noisy_measure(measure, amplitude: float, seed: int):
    """Multiplicative perturbation I*(1 + amplitude*u), u in [-1, 1).

    u is a pure function of the query point and the seed, so repeated queries
    of one point see one consistent perturbed field and identical runs are
    byte-identical.
    """
    seed_bytes = int(seed).to_bytes(8, "little")

    def noisy(point) -> float:
        base = float(measure(point))
        payload = np.asarray(point, dtype=float).tobytes() + seed_bytes
        digest = hashlib.blake2b(payload, digest_size=8).digest()
        u = int.from_bytes(digest, "little") / 2.0**63 - 1.0
        return base * (1.0 + amplitude * u)

    return noisy


def build_measure(config: ExperimentConfig):
    measure = intensity_function(build_field(config), build_wave(config))
    if config.noise is not None and config.noise.amplitude > 0.0:
        measure = noisy_measure(measure, config.noise.amplitude, config.noise.seed)
    return measure


def _target_tolerance(checks: ChecksConfig | None, default: float) -> float:
    if checks is not None and checks.tolerance is not None:
        return checks.tolerance
    return default


def oracle_coefficients(config: ExperimentConfig, ray: Ray, levels: int) -> list[complex] | None:
    """Exact plane-wave-gauged expansion coefficients for the ray, if any.

    The zero field has an all-zero expansion in every frame. Otherwise a
    closed form exists exactly when the ray's line passes through the source
    center: writing center = start + delta*dir, the centered coefficients
    shift by a finite binomial resummation of the 1/(s - delta) powers,

        f'_j = exp(-i kappa delta) * sum_i f_i * C(j-1, j-i) * delta**(j-i),

    and the plane-wave gauge contributes exp(-i k . start). Off-axis frames
    return None (no closed form; validate through reconstruction instead).
    """
    field = build_field(config)
    wave = build_wave(config)
    entries = [c for _, _, c in field.spectrum.items()]
    if not entries or all(c == 0 for c in entries):
        return [0.0 + 0.0j] * levels
    q = np.array(ray.x0)
    th = ray.dir.as_array()
    w = np.array(field.center) - q
    delta = float(np.dot(w, th))
    off_axis = w - delta * th
    if float(np.linalg.norm(off_axis)) > 1e-9 * (1.0 + float(np.linalg.norm(field.center))):
        return None
    max_l = field.spectrum.max_degree
    base = aw_coefficients(field, ray.dir, max_l + 1).coeffs
    gauge = cmath.exp(-1j * float(np.dot(wave.as_array(), q)))
    shift = cmath.exp(-1j * wave.kappa * delta)
    out = []
    for j in range(1, levels + 1):
        acc = 0.0 + 0.0j
        for i in range(1, min(j, max_l + 1) + 1):
            acc += base[i - 1] * math.comb(j - 1, j - i) * delta ** (j - i)
        out.append(gauge * shift * acc)
    return out


def _require_ray(config: ExperimentConfig) -> Ray:
    if not isinstance(config.geometry, RayGeometry):
        raise ValueError(f"experiment {config.id!r} needs ray geometry for this command")
    return Ray(config.geometry.start, Direction(config.geometry.direction))


def _recovery_rows(config: ExperimentConfig, report, oracle) -> list[ResultRow]:
    joined = "; ".join(report.warnings)
    rows = []
    for diag in report.per_level:
        level_oracle = None if oracle is None else oracle[diag.level - 1]
        for s, raw in diag.raw:
            rows.append(
                ResultRow(
                    experiment_id=config.id,
                    level=diag.level,
                    s=s,
                    raw=raw,
                    refined=diag.refined,
                    oracle=level_oracle,
                    abs_d=diag.abs_d,
                    warnings=joined,
                )
            )
    return rows


def run_recovery(config: ExperimentConfig):
    """Single-ray recovery. Returns (rows, summary_lines, ok)."""
    ray = _require_ray(config)
    wave = build_wave(config)
    plan = build_plan(config)
    tol = _target_tolerance(config.checks, 1e-2)
    report = recover_expansion(build_measure(config), ray, wave, plan, target_tol=tol)
    oracle = oracle_coefficients(config, ray, len(report.per_level))
    rows = _recovery_rows(config, report, oracle)
    summary = [f"experiment: {config.id}", "command: recover"]
    if oracle is None:
        summary.append("oracle: unavailable (shifted frame); coefficient errors not reported")
    failures = []
    for diag in report.per_level:
        line = (
            f"level {diag.level}: refined = {_fmt(diag.refined.real)} "
            f"{_fmt(diag.refined.imag)}i, spread = {_fmt(diag.spread)}"
        )
        if oracle is not None:
            err = abs(diag.refined - oracle[diag.level - 1])
            line += f", abs_error = {_fmt(err)}"
            if config.checks is not None and config.checks.tolerance is not None and err > config.checks.tolerance:
                failures.append(f"level {diag.level} abs_error {_fmt(err)} > tolerance")
        summary.append(line)
    for w in report.warnings:
        summary.append(f"warning: {w}")
    ok = not failures
    if config.checks is not None and config.checks.tolerance is not None:
        summary.append(
            f"check tolerance {_fmt(config.checks.tolerance)}: "
            + ("PASS" if ok else "FAIL (" + "; ".join(failures) + ")")
        )
    return rows, summary, ok


def _loglog_slope(radii, errors) -> float:
    xs = np.log(np.asarray(radii, dtype=float))
    ys = np.log(np.asarray(errors, dtype=float))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def run_convergence(config: ExperimentConfig):
    """Per-level error-decay study over the radius grid.

    Slopes are least-squares fits of log|error| against log s. Errors are
    coefficient errors against the closed-form oracle when the ray admits
    one; otherwise reconstruction errors against direct field evaluation at
    the base radii, flagged in the summary.
    """
    if len(config.plan.s_grid) < 3:
        raise ValueError("convergence study needs at least 3 base radii")
    ray = _require_ray(config)
    wave = build_wave(config)
    plan = build_plan(config)
    tol = _target_tolerance(config.checks, 1e-2)
    report = recover_expansion(build_measure(config), ray, wave, plan, target_tol=tol)
    oracle = oracle_coefficients(config, ray, len(report.per_level))
    rows = _recovery_rows(config, report, oracle)
    summary = [f"experiment: {config.id}", "command: convergence"]
    field = build_field(config)
    q = np.array(ray.x0)
    gauge = cmath.exp(1j * float(np.dot(wave.as_array(), q)))
    if oracle is None:
        summary.append(
            "oracle: unavailable (shifted frame); slopes measured on "
            "reconstruction errors at the base radii"
        )
    slopes: list[tuple[int, str]] = []
    for diag in report.per_level:
        radii = [s for s, _ in diag.raw]
        if oracle is not None:
            errors = [abs(raw - oracle[diag.level - 1]) for _, raw in diag.raw]
        else:
            prefix = report.expansion.coeffs[: diag.level]
            errors = []
            for s in radii:
                recon = gauge * partial_field(prefix, wave, s)
                truth = eval_radiated(field, q + s * ray.dir.as_array())
                errors.append(abs(recon - truth) / max(abs(truth), 1e-300))
        if max(errors) <= _SLOPE_FLOOR:
            slopes.append((diag.level, "n/a"))
            summary.append(f"level {diag.level}: errors at round-off, slope n/a")
        else:
            slope = _loglog_slope(radii, [max(e, 1e-300) for e in errors])
            slopes.append((diag.level, _fmt(slope)))
            summary.append(f"level {diag.level}: slope {_fmt(slope)}")
    for w in report.warnings:
        summary.append(f"warning: {w}")
    ok = True
    failures = []
    if config.checks is not None and config.checks.slope_range is not None:
        low, high = config.checks.slope_range
        for level, slope in slopes:
            if slope == "n/a":
                continue
            value = float(slope)
            if not low <= value <= high:
                failures.append(f"level {level} slope {slope} outside [{low:g}, {high:g}]")
        ok = not failures
        summary.append(
            f"check slope_range [{low:g}, {high:g}]: "
            + ("PASS" if ok else "FAIL (" + "; ".join(failures) + ")")
        )
    if config.checks is not None and config.checks.tolerance is not None and oracle is not None:
        tol_failures = []
        for diag in report.per_level:
            err = abs(diag.refined - oracle[diag.level - 1])
            if err > config.checks.tolerance:
                tol_failures.append(f"level {diag.level} abs_error {_fmt(err)} > tolerance")
        if tol_failures:
            failures.extend(tol_failures)
            ok = False
        summary.append(
            f"check tolerance {_fmt(config.checks.tolerance)}: "
            + ("PASS" if not tol_failures else "FAIL (" + "; ".join(tol_failures) + ")")
        )
    return rows, summary, ok


def run_plane_demo(config: ExperimentConfig):
    """Reconstruct the radiated field at every plane target and compare."""
    if not isinstance(config.geometry, PlaneGeometry):
        raise ValueError(f"experiment {config.id!r} needs plane geometry for this command")
    geom = config.geometry
    wave = build_wave(config)
    field = build_field(config)
    plan = build_plan(config)
    tol = _target_tolerance(config.checks, 1e-2)
    r_estimate = math.sqrt(sum(v * v for v in config.scene.center)) + config.scene.r_min
    results = recover_on_plane(
        build_measure(config),
        (geom.point, geom.tangents[0], geom.tangents[1]),
        wave,
        plan,
        geom.targets,
        r_min_estimate=r_estimate,
        target_tol=tol,
    )
    rows = []
    summary = [f"experiment: {config.id}", "command: plane"]
    tolerance = None if config.checks is None else config.checks.tolerance
    failures = []
    for res in results:
        truth = eval_radiated(field, res.point)
        if res.value is None:
            status = f"failed: {res.message}"
            rows.append(
                [config.id, _fmt(res.point[0]), _fmt(res.point[1]), _fmt(res.point[2]),
                 "", "", _fmt(truth.real), _fmt(truth.imag), "", status]
            )
            failures.append(f"target {res.point}: {res.message}")
            summary.append(f"target ({res.point[0]:g}, {res.point[1]:g}, {res.point[2]:g}): {status}")
            continue
        denom = abs(truth)
        rel = abs(res.value - truth) / denom if denom > 1e-14 else abs(res.value - truth)
        status = "ok"
        if tolerance is not None and rel > tolerance:
            status = "exceeds tolerance"
            failures.append(f"target {res.point}: rel_error {_fmt(rel)} > tolerance")
        rows.append(
            [config.id, _fmt(res.point[0]), _fmt(res.point[1]), _fmt(res.point[2]),
             _fmt(res.value.real), _fmt(res.value.imag), _fmt(truth.real), _fmt(truth.imag),
             _fmt(rel), status]
        )
        summary.append(
            f"target ({res.point[0]:g}, {res.point[1]:g}, {res.point[2]:g}): "
            f"rel_error {_fmt(rel)} [{status}]"
        )
    distinct = len({id(res.report) for res in results if res.report is not None})
    summary.append(f"rays recovered: {distinct} for {len(results)} targets")
    ok = True
    if tolerance is not None:
        ok = not failures
        summary.append(
            f"check tolerance {_fmt(tolerance)}: "
            + ("PASS" if ok else "FAIL (" + "; ".join(failures) + ")")
        )
    return rows, summary, ok


def run_synth(config: ExperimentConfig):
    """Tabulate field values and measured intensities along the ray."""
    ray = _require_ray(config)
    wave = build_wave(config)
    field = build_field(config)
    measure = build_measure(config)
    rows = []
    for s in config.plan.s_grid:
        point = ray.point(s)
        radiated = eval_radiated(field, point)
        total = eval_total(field, wave, point)
        rows.append(
            [config.id, _fmt(s), _fmt(radiated.real), _fmt(radiated.imag),
             _fmt(total.real), _fmt(total.imag), _fmt(float(measure(point)))]
        )
    summary = [
        f"experiment: {config.id}",
        "command: synth",
        f"samples: {len(rows)} along the configured ray",
    ]
    return rows, summary, True


def _write_csv(path: str, header, str_rows) -> None:
    lines = [",".join(header)]
    for row in str_rows:
        for cell in row:
            if "," in cell or "\n" in cell or '"' in cell:
                raise ValueError(f"cell {cell!r} needs quoting; report cells must stay plain")
        lines.append(",".join(row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_report(rows, summary, out_dir: str, fmt: str = "csv", *, basename: str = "report", columns=RESULT_COLUMNS):
    """Write the table and summary; byte-stable for identical inputs.

    ``rows`` are ResultRow instances or pre-formatted string lists matching
    ``columns``. Returns the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    str_rows = [r.as_csv() if isinstance(r, ResultRow) else list(r) for r in rows]
    for row in str_rows:
        if len(row) != len(columns):
            raise ValueError(f"row width {len(row)} does not match {len(columns)} columns")
    paths = []
    csv_path = os.path.join(out_dir, f"{basename}.csv")
    _write_csv(csv_path, columns, str_rows)
    paths.append(csv_path)
    summary_path = os.path.join(out_dir, "summary.txt")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(summary) + "\n")
    paths.append(summary_path)
    if fmt == "csv+json":
        json_path = os.path.join(out_dir, f"{basename}.json")
        payload = [dict(zip(columns, row)) for row in str_rows]
        with open(json_path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
        paths.append(json_path)
    return paths
