"""Experiment harness: convergence sweeps, invariance checks, minimization.

Everything here is deterministic given (fixture, options, seed): sweeps
assemble rows in fixed order, the invariance check derives all transforms
from one seeded generator, and descent uses no randomness at all.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .curves import ParametricCurve
from .discrete import e_cos_m_value
from .errors import InputError
from .kernels import OK, kim_kusner_sum, simon_md_sum, ecos_sum
from .moebius import MoebiusTransform, random_transform
from .polygon import ClosedPolygon, inscribe


def _energy_value(name: str):
    table = {
        "ecos": lambda v: _checked(ecos_sum(v), "ecos"),
        "kk": lambda v: _checked(kim_kusner_sum(v), "kk"),
        "simon": lambda v: _checked(simon_md_sum(v), "simon"),
    }
    if name not in table:
        raise InputError(f"unknown energy {name!r} (known: ecos, kk, simon)")
    return table[name]


def _checked(result, name):
    value, code, bi, bj = result
    if code != OK:
        from .discrete import _raise_for_code

        _raise_for_code(code, bi, bj, name)
    return value


def make_energy(spec) -> tuple[str, callable]:
    """Energy spec -> (label, vertex-array -> value).

    Accepts a plain name ("ecos", "kk", "simon") or a dict of name ->
    weight for a weighted mix, e.g. ``{"ecos": 1.0, "kk": 0.01}``.
    """
    if isinstance(spec, str):
        return spec, _energy_value(spec)
    weights = {k: float(w) for k, w in dict(spec).items()}
    fns = [(w, _energy_value(k)) for k, w in weights.items()]
    label = "+".join(f"{w:g}*{k}" for k, w in weights.items())

    def combined(v):
        return math.fsum(w * fn(v) for w, fn in fns)

    return label, combined


# -- convergence sweeps -------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    fineness: float
    value: float
    reference: float
    abs_error: float
    rel_error: float


@dataclass(frozen=True)
class ConvergenceTable:
    rows: tuple[ConvergenceRow, ...]
    fitted_rate: float | None
    fit_residual: float | None
    fixture: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "fixture": self.fixture,
            "fitted_rate": self.fitted_rate,
            "fit_residual": self.fit_residual,
            "rows": [
                {"m": r.m, "fineness": r.fineness, "value": r.value,
                 "reference": r.reference, "abs_error": r.abs_error,
                 "rel_error": r.rel_error}
                for r in self.rows
            ],
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2) + "\n")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["m", "fineness", "value", "reference",
                             "abs_error", "rel_error"])
            for r in self.rows:
                writer.writerow([r.m, repr(float(r.fineness)), repr(float(r.value)),
                                 repr(float(r.reference)), repr(float(r.abs_error)),
                                 repr(float(r.rel_error))])

    def write_svg(self, path) -> None:
        write_loglog_svg(self, path)


def _fit_rate(rows) -> tuple[float | None, float | None]:
    """Least squares on log(abs error) vs log m over the last half of rows.

    Errors at the floating-point floor make the fit meaningless, so rows
    with abs_error below 1e-13 * max(1, |reference|) are dropped and the
    rate is reported as None when fewer than two usable rows remain.
    """
    usable = [r for r in rows[len(rows) // 2:]
              if r.abs_error > 1e-13 * max(1.0, abs(r.reference))]
    if len(usable) < 2:
        return None, None
    lx = np.log([r.m for r in usable])
    ly = np.log([r.abs_error for r in usable])
    coeffs, res = np.polyfit(lx, ly, 1, full=True)[:2]
    rate = -float(coeffs[0])
    residual = float(np.sqrt(res[0] / len(usable))) if res.size else 0.0
    return rate, residual


def gamma_limsup_sweep(f: ParametricCurve, ms, partition: str = "parameter",
                       energy: str = "ecos", reference: float = 0.0) -> ConvergenceTable:
    """Discrete energies of inscribed polygons against a reference value.

    *ms* must increase and start at 8 or above; the error-decay rate is
    fitted on the asymptotic (last) half of the ladder.
    """
    ms = [int(m) for m in ms]
    if len(ms) == 0 or ms[0] < 8 or any(b <= a for a, b in zip(ms, ms[1:])):
        raise InputError("ms must be strictly increasing with min >= 8")
    _, value_fn = make_energy(energy)
    rows = []
    for m in ms:
        p = inscribe(f, m, partition)
        v = value_fn(p.vertices)
        abs_err = abs(v - reference)
        rel_err = abs_err / abs(reference) if reference != 0.0 else math.inf
        rows.append(ConvergenceRow(m=m, fineness=p.fineness(), value=v,
                                   reference=reference, abs_error=abs_err,
                                   rel_error=rel_err))
    rate, residual = _fit_rate(rows)
    fixture = {"curve": f.spec_string(), "partition": partition, "energy": energy}
    return ConvergenceTable(rows=tuple(rows), fitted_rate=rate,
                            fit_residual=residual, fixture=fixture)


def write_loglog_svg(table: ConvergenceTable, path, width=480, height=360) -> None:
    """Minimal log-log error plot as hand-emitted SVG tags."""
    pts = [(r.m, r.abs_error) for r in table.rows if r.abs_error > 0]
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'viewBox="0 0 {width} {height}">',
             f'<rect width="{width}" height="{height}" fill="white"/>']
    if pts:
        lx = [math.log10(m) for m, _ in pts]
        ly = [math.log10(e) for _, e in pts]
        x0, x1 = min(lx), max(lx)
        y0, y1 = min(ly), max(ly)
        pad = 40

        def sx(v):
            return pad + (v - x0) / max(x1 - x0, 1e-12) * (width - 2 * pad)

        def sy(v):
            return height - pad - (v - y0) / max(y1 - y0, 1e-12) * (height - 2 * pad)

        path_d = " ".join(f"{'M' if k == 0 else 'L'}{sx(a):.2f},{sy(b):.2f}"
                          for k, (a, b) in enumerate(zip(lx, ly)))
        lines.append(f'<path d="{path_d}" fill="none" stroke="black" stroke-width="1.5"/>')
        for a, b in zip(lx, ly):
            lines.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="black"/>')
        lines.append(f'<text x="{width / 2:.0f}" y="{height - 8}" text-anchor="middle" '
                     f'font-size="12">log10 m</text>')
        lines.append(f'<text x="12" y="{height / 2:.0f}" font-size="12" '
                     f'transform="rotate(-90 12 {height / 2:.0f})" '
                     f'text-anchor="middle">log10 abs error</text>')
        if table.fitted_rate is not None:
            lines.append(f'<text x="{width - pad}" y="{pad}" text-anchor="end" '
                         f'font-size="12">rate ~ {table.fitted_rate:.2f}</text>')
    lines.append("</svg>")
    Path(path).write_text("\n".join(lines) + "\n")


# -- Moebius invariance sweep -------------------------------------------------


@dataclass(frozen=True)
class InvarianceReport:
    baseline: float
    n_transforms: int
    seed: int
    margin: float
    max_deviation: float
    deviation_kind: str
    worst_index: int
    worst_transform: MoebiusTransform | None

    def to_json_obj(self) -> dict:
        return {
            "baseline": self.baseline,
            "n_transforms": self.n_transforms,
            "seed": self.seed,
            "margin": self.margin,
            "max_deviation": self.max_deviation,
            "deviation_kind": self.deviation_kind,
            "worst_index": self.worst_index,
            "worst_transform": (None if self.worst_transform is None
                                else self.worst_transform.to_json_obj()),
        }

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_obj(), indent=2) + "\n")


ZERO_BASELINE = 1e-10  # below this the baseline counts as zero energy


def invariance_sweep(p: ClosedPolygon, n_transforms: int = 100, seed: int = 0,
                     margin: float | None = None) -> InvarianceReport:
    """Evaluate the Moebius-invariant energy under seeded random transforms.

    Deviations are relative to the baseline energy, except for zero-energy
    polygons (cocircular vertices) where absolute deviations are reported.
    The inversion-center margin defaults to a tenth of the polygon diameter
    so inverted energies stay well-conditioned.
    """
    if margin is None:
        margin = 0.1 * p.diameter()
    rng = np.random.default_rng(seed)
    baseline = e_cos_m_value(p.vertices)
    relative = abs(baseline) > ZERO_BASELINE
    worst = -1.0
    worst_idx = -1
    worst_t = None
    for k in range(n_transforms):
        t = random_transform(rng, p.vertices, margin)
        value = e_cos_m_value(t.apply_polygon(p).vertices)
        dev = abs(value - baseline)
        if relative:
            dev /= abs(baseline)
        if dev > worst:
            worst, worst_idx, worst_t = dev, k, t
    return InvarianceReport(
        baseline=baseline, n_transforms=n_transforms, seed=seed, margin=margin,
        max_deviation=worst, deviation_kind="relative" if relative else "absolute",
        worst_index=worst_idx, worst_transform=worst_t)


# -- fineness-floor probe -----------------------------------------------------


@dataclass(frozen=True)
class LiminfProbeReport:
    stale_fraction: float
    rows: tuple[ConvergenceRow, ...]

    def to_json_obj(self) -> dict:
        return {
            "stale_fraction": self.stale_fraction,
            "rows": [{"m": r.m, "fineness": r.fineness, "value": r.value}
                     for r in self.rows],
        }


def stale_polygon(f: ParametricCurve, m: int, stale_fraction: float) -> ClosedPolygon:
    """Inscribed m-gon whose first parameter gap never refines.

    One edge spans [0, stale_fraction]; the remaining m - 1 vertices
    equipartition the rest, so the fineness stays >= stale_fraction no
    matter how large m grows.
    """
    if not (0.0 < stale_fraction < 1.0):
        raise InputError(f"stale_fraction must lie in (0, 1), got {stale_fraction}")
    if m < 4:
        raise InputError(f"need m >= 4, got {m}")
    thetas = np.empty(m)
    thetas[0] = 0.0
    thetas[1:] = stale_fraction + (1.0 - stale_fraction) * np.arange(m - 1) / (m - 1)
    return ClosedPolygon(f.position(thetas), thetas)


def liminf_probe(f: ParametricCurve, m: int, stale_fraction: float) -> LiminfProbeReport:
    """Discrete energies along a ladder of polygons with a fineness floor.

    Refines only the complement of the stale gap (ladder m/8, m/4, m/2, m),
    illustrating that without fineness -> 0 the discrete energies do not
    approach the continuous limit.
    """
    ladder = sorted({max(8, m // 8), max(8, m // 4), max(8, m // 2), m})
    rows = []
    for mm in ladder:
        p = stale_polygon(f, mm, stale_fraction)
        v = e_cos_m_value(p.vertices)
        rows.append(ConvergenceRow(m=mm, fineness=p.fineness(), value=v,
                                   reference=math.nan, abs_error=math.nan,
                                   rel_error=math.nan))
    return LiminfProbeReport(stale_fraction=stale_fraction, rows=tuple(rows))


# -- descent ------------------------------------------------------------------


@dataclass(frozen=True)
class MinimizeOptions:
    max_iter: int = 200
    grad_tol: float = 1e-8
    step_floor: float = 1e-16
    armijo: float = 1e-4
    fd_scale: float = 1e-6   # finite-difference step as a fraction of diameter
    initial_step: float = 1.0


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    energy: float
    grad_norm: float
    max_displacement: float


@dataclass(frozen=True)
class MinimizeTrace:
    energy: str
    rows: tuple[TraceRow, ...]
    final_polygon: ClosedPolygon
    termination: str

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iteration", "energy", "grad_norm", "max_displacement"])
            for r in self.rows:
                writer.writerow([r.iteration, repr(float(r.energy)), repr(float(r.grad_norm)),
                                 repr(float(r.max_displacement))])


def _fd_gradient(value_fn, v: np.ndarray, h: float) -> np.ndarray:
    g = np.empty_like(v)
    for k in range(v.shape[0]):
        for d in range(v.shape[1]):
            orig = v[k, d]
            v[k, d] = orig + h
            up = value_fn(v)
            v[k, d] = orig - h
            down = value_fn(v)
            v[k, d] = orig
            g[k, d] = (up - down) / (2.0 * h)
    return g


def minimize(p0: ClosedPolygon, energy="ecos",
             opts: MinimizeOptions | None = None) -> MinimizeTrace:
    """Vertex-wise gradient descent with backtracking line search.

    Gradients are central finite differences (step: ``fd_scale`` times the
    current polygon diameter); steps are accepted under the Armijo
    condition, so the recorded energies never increase.  The search
    direction is unconstrained: the Moebius-invariant energy drives
    unknotted polygons toward cocircular configurations, which the trace
    reports rather than prevents; adding a small weight of the arc-length
    discretization (a weighted-mix energy) is the documented mitigation for
    knotted experiments.
    """
    opts = opts or MinimizeOptions()
    label, value_fn = make_energy(energy)
    v = np.array(p0.vertices, dtype=float)
    e = value_fn(v)
    rows = [TraceRow(iteration=0, energy=e, grad_norm=math.nan, max_displacement=0.0)]
    step = opts.initial_step
    termination = "max_iter"
    for it in range(1, opts.max_iter + 1):
        diam = float(np.max(np.linalg.norm(v[:, None, :] - v[None, :, :], axis=-1)))
        g = _fd_gradient(value_fn, v, opts.fd_scale * diam)
        gn = float(np.linalg.norm(g))
        if gn < opts.grad_tol:
            termination = "grad_tol"
            break
        step *= 2.0
        accepted = False
        while step > opts.step_floor:
            cand = v - step * g
            try:
                e_cand = value_fn(cand)
            except Exception:
                e_cand = math.inf
            if e_cand <= e - opts.armijo * step * gn * gn:
                disp = float(np.max(np.linalg.norm(cand - v, axis=1)))
                v, e = cand, e_cand
                rows.append(TraceRow(iteration=it, energy=e, grad_norm=gn,
                                     max_displacement=disp))
                accepted = True
                break
            step *= 0.5
        if not accepted:
            termination = "step_floor"
            break
    return MinimizeTrace(energy=label, rows=tuple(rows),
                         final_polygon=p0.with_vertices(v),
                         termination=termination)
