"""Closed parametric curves: analytic families and mollified sampled curves.

Curves are maps R/Z -> R^n with vectorized position and derivative
evaluators.  Arc length along a curve is served from a cumulative table
(midpoint panel quadrature with one Richardson step, linear interpolation
between the 4096 panel nodes), built lazily on first use.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import GeometryError, InputError

ARCLENGTH_PANELS = 4096


class ParametricCurve:
    """Closed curve defined by position and derivative evaluators.

    Both evaluators must accept scalars or 1-D arrays of parameters and
    return arrays with a trailing coordinate axis of size ``dim``.
    Periodicity (f(x+1) = f(x)) and regularity (positive speed) are spot
    checked on a sample grid at construction.
    """

    def __init__(self, position, derivative, dim: int = 3, name: str = "custom",
                 params: dict | None = None, check: bool = True):
        self._position = position
        self._derivative = derivative
        self.dim = dim
        self.name = name
        self.params = dict(params or {})
        self._cum_table = None
        if check:
            self._spot_check()

    def _spot_check(self, samples: int = 32) -> None:
        x = np.arange(samples) / samples
        gap = np.linalg.norm(self.position(x + 1.0) - self.position(x), axis=-1)
        if np.max(gap) > 1e-12 * max(1.0, float(np.max(np.linalg.norm(self.position(x), axis=-1)))):
            raise GeometryError(f"curve {self.name!r} is not 1-periodic")
        if np.min(self.speed(x)) <= 0.0:
            raise GeometryError(f"curve {self.name!r} has vanishing speed")

    def position(self, x) -> np.ndarray:
        return np.asarray(self._position(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, x) -> np.ndarray:
        return np.asarray(self._derivative(np.asarray(x, dtype=float)), dtype=float)

    def speed(self, x) -> np.ndarray:
        return np.linalg.norm(self.derivative(x), axis=-1)

    def spec_string(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}:{args}"

    def __repr__(self) -> str:
        return f"ParametricCurve({self.spec_string()!r}, dim={self.dim})"

    # -- arc length ---------------------------------------------------------

    def _table(self) -> np.ndarray:
        if self._cum_table is None:
            n = ARCLENGTH_PANELS
            h = 1.0 / n
            one = self.speed((np.arange(n) + 0.5) * h) * h
            two = 0.5 * h * (self.speed((np.arange(n) + 0.25) * h)
                             + self.speed((np.arange(n) + 0.75) * h))
            panels = (4.0 * two - one) / 3.0
            self._cum_table = np.concatenate([[0.0], np.cumsum(panels)])
            self._cum_table.setflags(write=False)
        return self._cum_table

    def total_length(self) -> float:
        return float(self._table()[-1])

    def cumulative_length(self, x) -> np.ndarray:
        """Arc length from parameter 0 to x (x in [0, 1], linear interp)."""
        t = self._table()
        n = t.size - 1
        pos = np.clip(np.asarray(x, dtype=float), 0.0, 1.0) * n
        idx = np.minimum(pos.astype(int), n - 1)
        return t[idx] + (pos - idx) * (t[idx + 1] - t[idx])

    def arc_distance(self, x, y) -> np.ndarray:
        """Length of the shorter arc between the points at parameters x, y."""
        total = self.total_length()
        d = np.abs(self.cumulative_length(np.asarray(y) % 1.0)
                   - self.cumulative_length(np.asarray(x) % 1.0))
        return np.minimum(d, total - d)


def arc_distance_curve(f: ParametricCurve, x, y):
    return f.arc_distance(x, y)


# -- analytic families -------------------------------------------------------


def _planar(dim, cx, cy):
    def embed(x, a, b):
        out = np.zeros(np.shape(x) + (dim,))
        out[..., 0] = a
        out[..., 1] = b
        return out

    def pos(x):
        return embed(x, cx(x), cy(x))

    return pos


def circle(R: float = 1.0, dim: int = 3) -> ParametricCurve:
    """Round circle of radius R in the first two coordinates."""
    if R <= 0:
        raise InputError(f"circle radius must be positive, got {R}")
    tau = 2.0 * np.pi
    pos = _planar(dim, lambda x: R * np.cos(tau * x), lambda x: R * np.sin(tau * x))
    der = _planar(dim, lambda x: -tau * R * np.sin(tau * x), lambda x: tau * R * np.cos(tau * x))
    return ParametricCurve(pos, der, dim=dim, name="circle", params={"R": R})


def ellipse(a: float = 2.0, b: float = 1.0, dim: int = 3) -> ParametricCurve:
    """Axis-aligned ellipse with semi-axes a, b."""
    if a <= 0 or b <= 0:
        raise InputError(f"ellipse semi-axes must be positive, got {a}, {b}")
    tau = 2.0 * np.pi
    pos = _planar(dim, lambda x: a * np.cos(tau * x), lambda x: b * np.sin(tau * x))
    der = _planar(dim, lambda x: -tau * a * np.sin(tau * x), lambda x: tau * b * np.cos(tau * x))
    return ParametricCurve(pos, der, dim=dim, name="ellipse", params={"a": a, "b": b})


def torus_knot(p: int = 2, q: int = 3, R: float = 2.0, r: float = 0.5) -> ParametricCurve:
    """(p, q) torus knot on the torus with radii R > r > 0.

    Requires gcd(p, q) = 1 so the curve closes after one period and is a
    genuine knot (p=2, q=3 is the trefoil).
    """
    p, q = int(p), int(q)
    if p < 1 or q < 1 or math.gcd(p, q) != 1:
        raise InputError(f"torus knot needs coprime positive p, q, got ({p}, {q})")
    if not (0 < r < R):
        raise InputError(f"torus knot needs 0 < r < R, got r={r}, R={R}")
    tau = 2.0 * np.pi

    def pos(x):
        ang_p = tau * p * x
        ang_q = tau * q * x
        rad = R + r * np.cos(ang_q)
        out = np.zeros(np.shape(x) + (3,))
        out[..., 0] = rad * np.cos(ang_p)
        out[..., 1] = rad * np.sin(ang_p)
        out[..., 2] = r * np.sin(ang_q)
        return out

    def der(x):
        ang_p = tau * p * x
        ang_q = tau * q * x
        rad = R + r * np.cos(ang_q)
        drad = -tau * q * r * np.sin(ang_q)
        out = np.zeros(np.shape(x) + (3,))
        out[..., 0] = drad * np.cos(ang_p) - tau * p * rad * np.sin(ang_p)
        out[..., 1] = drad * np.sin(ang_p) + tau * p * rad * np.cos(ang_p)
        out[..., 2] = tau * q * r * np.cos(ang_q)
        return out

    return ParametricCurve(pos, der, dim=3, name="torus",
                           params={"p": p, "q": q, "R": R, "r": r})


_FAMILIES = {
    "circle": (circle, {"R": float}),
    "ellipse": (ellipse, {"a": float, "b": float}),
    "torus": (torus_knot, {"p": int, "q": int, "R": float, "r": float}),
    "torus_knot": (torus_knot, {"p": int, "q": int, "R": float, "r": float}),
}


def make_curve(spec: str) -> ParametricCurve:
    """Build a curve from a spec string ``family:key=val,...``.

    Examples: ``circle:R=1``, ``ellipse:a=2,b=1``, ``torus:p=2,q=3,R=2,r=0.5``.
    Omitted keys take the family defaults.
    """
    name, _, args = spec.strip().partition(":")
    name = name.strip().lower()
    if name not in _FAMILIES:
        known = ", ".join(sorted(set(_FAMILIES) - {"torus_knot"}))
        raise InputError(f"unknown curve family {name!r} (known: {known})")
    factory, types = _FAMILIES[name]
    kwargs = {}
    if args.strip():
        for item in args.split(","):
            key, _, val = item.partition("=")
            key = key.strip()
            if key not in types or not val.strip():
                raise InputError(f"bad curve parameter {item!r} in {spec!r}")
            try:
                kwargs[key] = types[key](float(val))
            except ValueError as exc:
                raise InputError(f"bad curve parameter {item!r} in {spec!r}") from exc
    return factory(**kwargs)


def curve_families() -> list[dict]:
    """Human-readable family catalogue for the CLI."""
    return [
        {"family": "circle", "parameters": "R=1", "example": "circle:R=1"},
        {"family": "ellipse", "parameters": "a=2,b=1", "example": "ellipse:a=2,b=1"},
        {"family": "torus", "parameters": "p=2,q=3,R=2,r=0.5",
         "example": "torus:p=2,q=3,R=2,r=0.5"},
    ]


# -- sampled curves and mollification ----------------------------------------


@dataclass(frozen=True)
class SampledCurve:
    """Positions sampled on the uniform parameter grid k/N, k = 0..N-1."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2 or s.shape[0] < 8 or s.shape[1] < 2:
            raise GeometryError(f"need >= 8 samples in R^(n>=2), got shape {s.shape}")
        steps = np.linalg.norm(np.roll(s, -1, axis=0) - s, axis=1)
        if np.min(steps) <= 0.0:
            raise GeometryError("consecutive samples must be distinct")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @classmethod
    def from_curve(cls, f: ParametricCurve, n: int) -> "SampledCurve":
        return cls(f.position(np.arange(n) / n))


def save_sampled_csv(s: SampledCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in s.samples:
            writer.writerow([repr(float(x)) for x in row])


def save_sampled_json(s: SampledCurve, path) -> None:
    obj = {"dim": s.dim, "samples": s.samples.tolist()}
    Path(path).write_text(json.dumps(obj, indent=2) + "\n")


def load_sampled(path) -> SampledCurve:
    path = Path(path)
    if not path.exists():
        raise InputError(f"no such file: {path}")
    if path.suffix.lower() == ".json":
        obj = json.loads(path.read_text())
        return SampledCurve(np.asarray(obj["samples"], dtype=float))
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if row:
                rows.append([float(x) for x in row])
    return SampledCurve(np.asarray(rows))


@dataclass(frozen=True)
class MollifierKernel:
    """Smooth bump exp(-1/(1 - t^2)) scaled to bandwidth eps.

    Supported in [-eps, eps]; the discrete weights are renormalized to unit
    sum at every evaluation point, which makes the partition-of-unity
    property exact rather than approximate.
    """

    bandwidth: float

    def __post_init__(self):
        if not (0.0 < self.bandwidth < 0.5):
            raise InputError(f"bandwidth must lie in (0, 1/2), got {self.bandwidth}")

    def _bump(self, t):
        inside = np.abs(t) < 1.0
        u = np.where(inside, t, 0.0)
        return np.where(inside, np.exp(-1.0 / (1.0 - u * u)), 0.0)

    def _bump_deriv(self, t):
        inside = np.abs(t) < 1.0
        u = np.where(inside, t, 0.0)
        denom = (1.0 - u * u)
        return np.where(inside, np.exp(-1.0 / denom) * (-2.0 * u) / denom ** 2, 0.0)

    def weight(self, t):
        """Unnormalized eta_eps(t) = eta(t / eps) / eps."""
        return self._bump(np.asarray(t) / self.bandwidth) / self.bandwidth

    def weight_deriv(self, t):
        return self._bump_deriv(np.asarray(t) / self.bandwidth) / self.bandwidth ** 2


def mollify(s: SampledCurve, eps: float) -> ParametricCurve:
    """Periodic convolution of the samples with the bump kernel.

    Returns a smooth closed curve; the derivative evaluator differentiates
    the normalized convolution exactly (quotient rule over the kernel and
    kernel-derivative sums), so it matches finite differences of the
    positions to discretization accuracy.
    """
    n = s.n
    if not (1.0 / n < eps < 0.5):
        raise InputError(f"bandwidth must lie in (1/{n}, 1/2), got {eps}")
    kernel = MollifierKernel(eps)
    grid = np.arange(n) / n
    samples = s.samples

    def _offsets(x):
        d = np.asarray(x, dtype=float)[..., None] - grid
        return (d + 0.5) % 1.0 - 0.5

    def pos(x):
        d = _offsets(x)
        w = kernel.weight(d)
        z = np.sum(w, axis=-1, keepdims=True)
        return (w @ samples) / z

    def der(x):
        d = _offsets(x)
        w = kernel.weight(d)
        wd = kernel.weight_deriv(d)
        z = np.sum(w, axis=-1, keepdims=True)
        zd = np.sum(wd, axis=-1, keepdims=True)
        a = w @ samples
        ad = wd @ samples
        return (ad * z - a * zd) / (z * z)

    return ParametricCurve(pos, der, dim=s.dim, name="mollified",
                           params={"eps": eps, "n": n})


# -- derivative oscillation modulus ------------------------------------------


def modulus_D(f: ParametricCurve, r: float, grid: int = 64) -> float:
    """Largest local L^2 oscillation of f' at scale r.

    Approximates ``sup_z (integral over B_r(z)^2 of |f'(x) - f'(y)|^2 /
    |x - y|^2)^(1/2)`` with a midpoint rule on a ``grid x grid`` cell grid
    per window and ``grid`` candidate centers z.  Diagonal cells use the
    integrand at half-cell offset (bounded for C^1 data); this is a
    diagnostic-grade approximation, not a certified bound.
    """
    if not (0.0 < r < 0.5):
        raise InputError(f"need 0 < r < 1/2, got r={r}")
    if grid < 4:
        raise InputError(f"need grid >= 4, got {grid}")
    h = 2.0 * r / grid
    centers = np.arange(grid) / grid
    worst = 0.0
    offsets = (np.arange(grid) + 0.5) * h - r
    for z in centers:
        xs = z + offsets
        dv = f.derivative(xs)
        diff2 = np.sum((dv[:, None, :] - dv[None, :, :]) ** 2, axis=-1)
        sep2 = (xs[:, None] - xs[None, :]) ** 2
        np.fill_diagonal(sep2, 1.0)
        vals = diff2 / sep2
        half = f.derivative(xs + 0.5 * h)
        diag = np.sum((dv - half) ** 2, axis=-1) / (0.5 * h) ** 2
        np.fill_diagonal(vals, diag)
        worst = max(worst, float(np.sum(vals)) * h * h)
    return math.sqrt(worst)
