"""Scenario files: flat key-value text with bracketed sections.

One value per line, ``key = value``; expressions use the grammar of
:mod:`vortexflow.expressions`.  Scenarios are plain data; the ``build_*``
helpers compile them into fields, paths, and ensembles.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import expressions, vortexwave
from .expressions import Expression, ExpressionSyntaxError, parse_expression
from .fields import PointVortexPath, TimeVaryingField
from .flow import InitialEnsemble, disk_ensemble

DEFAULT_LEVELS = (16, 64, 256)
DEFAULT_REFERENCE = 2048
DEFAULT_OUTPUT_TIMES = 129
PATH_SAMPLES = 1025


class ScenarioSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ScenarioSemanticError(ValueError):
    pass


@dataclass(frozen=True)
class FieldSpec:
    u1: Expression
    u2: Expression
    sup_norm: float
    div: Optional[Expression] = None
    already_smooth: bool = True


@dataclass(frozen=True)
class PathSpec:
    kind: str                                   # expression | samples | from_vortexwave
    z1: Optional[Expression] = None
    z2: Optional[Expression] = None
    lipschitz_bound: Optional[float] = None
    samples: Tuple[Tuple[float, float, float], ...] = ()


@dataclass(frozen=True)
class EnsembleSpec:
    center: Tuple[float, float]
    radius: float
    spacing: float


@dataclass(frozen=True)
class VortexWaveSpec:
    omega0: Expression
    window: Tuple[float, float, float, float]
    blob_spacing: float
    delta_blob: float
    vortex: Tuple[float, float]
    strength: float
    snapshots: int = 3


@dataclass(frozen=True)
class Scenario:
    name: str
    horizon: float
    dt: float
    field: FieldSpec
    path: PathSpec
    ensemble: EnsembleSpec
    levels: Tuple[int, ...] = DEFAULT_LEVELS
    reference_level: int = DEFAULT_REFERENCE
    output_times: int = DEFAULT_OUTPUT_TIMES
    vortexwave: Optional[VortexWaveSpec] = None


# --- parsing ------------------------------------------------------------------

def _split_sections(text: str) -> Dict[str, List[Tuple[int, str, str]]]:
    sections: Dict[str, List[Tuple[int, str, str]]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            sections.setdefault(current, [])
            continue
        if "=" not in line:
            raise ScenarioSyntaxError("expected 'key = value'", lineno,
                                      raw.index(line[0]) + 1)
        if current is None:
            raise ScenarioSyntaxError("key outside any [section]", lineno)
        key, value = line.split("=", 1)
        sections[current].append((lineno, key.strip().lower(), value.strip()))
    return sections


class _Section:
    def __init__(self, rows: List[Tuple[int, str, str]], name: str):
        self.name = name
        self.rows = rows
        self.map: Dict[str, Tuple[int, str]] = {}
        for lineno, key, value in rows:
            self.map[key] = (lineno, value)

    def get(self, key: str) -> Optional[str]:
        entry = self.map.get(key)
        return entry[1] if entry else None

    def line(self, key: str) -> int:
        return self.map[key][0]

    def require(self, key: str, what: str) -> str:
        value = self.get(key)
        if value is None:
            raise ScenarioSemanticError(f"{what} required ([{self.name}] {key})")
        return value

    def number(self, key: str, what: str, default=None) -> Optional[float]:
        value = self.get(key)
        if value is None:
            if default is not None or key in ():
                return default
            raise ScenarioSemanticError(f"{what} required ([{self.name}] {key})")
        try:
            return float(value)
        except ValueError:
            raise ScenarioSyntaxError(f"{what}: bad number {value!r}",
                                      self.line(key))

    def expr(self, key: str, what: str) -> Expression:
        value = self.require(key, what)
        try:
            return parse_expression(value, line=self.line(key))
        except ExpressionSyntaxError:
            raise

    def pair(self, key: str, what: str) -> Tuple[float, float]:
        value = self.require(key, what)
        parts = [p.strip() for p in value.split(",")]
        if len(parts) != 2:
            raise ScenarioSyntaxError(f"{what}: expected 'a, b'", self.line(key))
        try:
            return (float(parts[0]), float(parts[1]))
        except ValueError:
            raise ScenarioSyntaxError(f"{what}: bad number in {value!r}",
                                      self.line(key))


_TRUE = {"true", "yes", "1", "on"}
_FALSE = {"false", "no", "0", "off"}


def parse_scenario(text) -> Scenario:
    """Parse and validate a scenario; raises syntax errors with line/column
    and semantic errors naming the violated invariant."""
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    sections = _split_sections(text)

    def section(name: str) -> _Section:
        return _Section(sections.get(name, []), name)

    sc = section("scenario")
    name = sc.get("name") or "unnamed"
    horizon_raw = sc.get("horizon")
    if horizon_raw is None:
        raise ScenarioSemanticError("horizon T required")
    try:
        horizon = float(horizon_raw)
    except ValueError:
        raise ScenarioSyntaxError(f"bad number {horizon_raw!r}", sc.line("horizon"))
    dt = sc.number("dt", "time step dt")

    fs = section("field")
    field_spec = FieldSpec(
        u1=fs.expr("u1", "smooth field component u1"),
        u2=fs.expr("u2", "smooth field component u2"),
        sup_norm=fs.number("sup_norm", "field sup_norm"),
        div=fs.expr("div", "field divergence") if fs.get("div") is not None else None,
        already_smooth=_parse_bool(fs, "already_smooth", default=True),
    )

    ps = section("path")
    kind = (ps.get("kind") or "expression").lower()
    if kind == "expression":
        path_spec = PathSpec(
            kind=kind,
            z1=ps.expr("z1", "path component z1"),
            z2=ps.expr("z2", "path component z2"),
            lipschitz_bound=ps.number("lipschitz_bound", "path Lipschitz bound",
                                      default=float("nan")),
        )
        if np.isnan(path_spec.lipschitz_bound):
            path_spec = PathSpec(kind=kind, z1=path_spec.z1, z2=path_spec.z2,
                                 lipschitz_bound=None)
    elif kind == "samples":
        samples = []
        for lineno, key, value in ps.rows:
            if key != "sample":
                continue
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 3:
                raise ScenarioSyntaxError("sample: expected 't, z1, z2'", lineno)
            samples.append(tuple(float(p) for p in parts))
        if not samples:
            raise ScenarioSemanticError("sampled path requires 'sample' lines")
        lip = ps.number("lipschitz_bound", "path Lipschitz bound",
                        default=float("nan"))
        path_spec = PathSpec(kind=kind, samples=tuple(samples),
                             lipschitz_bound=None if np.isnan(lip) else lip)
    elif kind == "from_vortexwave":
        path_spec = PathSpec(kind=kind)
    else:
        raise ScenarioSemanticError(
            f"path kind must be expression, samples or from_vortexwave, got {kind!r}")

    es = section("ensemble")
    ensemble_spec = EnsembleSpec(
        center=es.pair("center", "ensemble center") if es.get("center") else (0.0, 0.0),
        radius=es.number("radius", "ensemble radius R"),
        spacing=es.number("spacing", "ensemble spacing h"),
    )

    ls = section("levels")
    levels_raw = ls.get("levels")
    if levels_raw is None:
        levels = DEFAULT_LEVELS
    else:
        try:
            levels = tuple(int(p.strip()) for p in levels_raw.split(","))
        except ValueError:
            raise ScenarioSyntaxError(f"bad level list {levels_raw!r}",
                                      ls.line("levels"))
    ref_raw = ls.get("reference")
    reference = int(float(ref_raw)) if ref_raw is not None else DEFAULT_REFERENCE

    os_ = section("output")
    times_raw = os_.get("times")
    output_times = int(float(times_raw)) if times_raw is not None else DEFAULT_OUTPUT_TIMES

    vw_spec = None
    if "vortexwave" in sections:
        vs = section("vortexwave")
        window_raw = vs.require("window", "vortexwave window")
        parts = [p.strip() for p in window_raw.split(",")]
        if len(parts) != 4:
            raise ScenarioSyntaxError("window: expected 'xmin, xmax, ymin, ymax'",
                                      vs.line("window"))
        snapshots_raw = vs.get("snapshots")
        vw_spec = VortexWaveSpec(
            omega0=vs.expr("omega0", "initial vorticity omega0"),
            window=tuple(float(p) for p in parts),
            blob_spacing=vs.number("blob_spacing", "blob lattice spacing"),
            delta_blob=vs.number("delta_blob", "blob core length"),
            vortex=vs.pair("vortex", "initial vortex position"),
            strength=vs.number("strength", "vortex strength", default=1.0),
            snapshots=int(float(snapshots_raw)) if snapshots_raw is not None else 3,
        )

    scenario = Scenario(
        name=name, horizon=horizon, dt=dt, field=field_spec, path=path_spec,
        ensemble=ensemble_spec, levels=levels, reference_level=reference,
        output_times=output_times, vortexwave=vw_spec)
    validate_scenario(scenario)
    return scenario


def _parse_bool(sec: _Section, key: str, default: bool) -> bool:
    value = sec.get(key)
    if value is None:
        return default
    lowered = value.lower()
    if lowered in _TRUE:
        return True
    if lowered in _FALSE:
        return False
    raise ScenarioSyntaxError(f"expected boolean, got {value!r}", sec.line(key))


def validate_scenario(s: Scenario):
    if s.horizon <= 0:
        raise ScenarioSemanticError("horizon T must be positive")
    if s.dt <= 0:
        raise ScenarioSemanticError("time step dt must be positive")
    if s.ensemble.radius <= 0:
        raise ScenarioSemanticError(
            "ensemble invariant violated: radius R must be positive")
    if s.ensemble.spacing <= 0:
        raise ScenarioSemanticError(
            "ensemble invariant violated: spacing h must be positive")
    if s.field.sup_norm < 0:
        raise ScenarioSemanticError("field sup_norm must be nonnegative")
    if any(n < 1 for n in s.levels) or s.reference_level < 1:
        raise ScenarioSemanticError("regularization levels must be >= 1")
    if any(n >= s.reference_level for n in s.levels):
        raise ScenarioSemanticError(
            "level invariant violated: every level must be below reference_level")
    if s.output_times < 1:
        raise ScenarioSemanticError("output times count must be >= 1")
    if s.path.kind == "from_vortexwave" and s.vortexwave is None:
        raise ScenarioSemanticError(
            "path kind from_vortexwave requires a [vortexwave] section")
    if s.path.kind == "samples":
        times = [t for t, _, _ in s.path.samples]
        if times[0] != 0.0 or any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioSemanticError(
                "path samples must have strictly increasing times starting at 0")
    if s.vortexwave is not None:
        vw = s.vortexwave
        xmin, xmax, ymin, ymax = vw.window
        if xmax <= xmin or ymax <= ymin:
            raise ScenarioSemanticError("vortexwave window must be nonempty")
        if vw.blob_spacing <= 0 or vw.delta_blob <= 0:
            raise ScenarioSemanticError(
                "vortexwave blob_spacing and delta_blob must be positive")


# --- emission and hashing -----------------------------------------------------

def emit_scenario(s: Scenario) -> str:
    lines = ["[scenario]", f"name = {s.name}", f"horizon = {s.horizon!r}",
             f"dt = {s.dt!r}", "", "[field]",
             f"u1 = {s.field.u1.source}", f"u2 = {s.field.u2.source}",
             f"sup_norm = {s.field.sup_norm!r}"]
    if s.field.div is not None:
        lines.append(f"div = {s.field.div.source}")
    lines.append(f"already_smooth = {'true' if s.field.already_smooth else 'false'}")
    lines += ["", "[path]", f"kind = {s.path.kind}"]
    if s.path.kind == "expression":
        lines += [f"z1 = {s.path.z1.source}", f"z2 = {s.path.z2.source}"]
        if s.path.lipschitz_bound is not None:
            lines.append(f"lipschitz_bound = {s.path.lipschitz_bound!r}")
    elif s.path.kind == "samples":
        for t, z1, z2 in s.path.samples:
            lines.append(f"sample = {t!r}, {z1!r}, {z2!r}")
        if s.path.lipschitz_bound is not None:
            lines.append(f"lipschitz_bound = {s.path.lipschitz_bound!r}")
    lines += ["", "[ensemble]",
              f"center = {s.ensemble.center[0]!r}, {s.ensemble.center[1]!r}",
              f"radius = {s.ensemble.radius!r}",
              f"spacing = {s.ensemble.spacing!r}",
              "", "[levels]",
              "levels = " + ", ".join(str(n) for n in s.levels),
              f"reference = {s.reference_level}",
              "", "[output]", f"times = {s.output_times}"]
    if s.vortexwave is not None:
        vw = s.vortexwave
        lines += ["", "[vortexwave]",
                  f"omega0 = {vw.omega0.source}",
                  "window = " + ", ".join(repr(v) for v in vw.window),
                  f"blob_spacing = {vw.blob_spacing!r}",
                  f"delta_blob = {vw.delta_blob!r}",
                  f"vortex = {vw.vortex[0]!r}, {vw.vortex[1]!r}",
                  f"strength = {vw.strength!r}",
                  f"snapshots = {vw.snapshots}"]
    return "\n".join(lines) + "\n"


def scenario_hash(s: Scenario) -> str:
    return hashlib.sha256(emit_scenario(s).encode("utf-8")).hexdigest()[:16]


# --- builders -----------------------------------------------------------------

def build_smooth_field(s: Scenario) -> TimeVaryingField:
    """Compile the scenario's smooth part; expression fields are jittable."""
    spec = s.field
    f1 = spec.u1.as_numpy()
    f2 = spec.u2.as_numpy()

    def velocity(t, xs):
        xs = np.asarray(xs, dtype=float)
        x1 = xs[..., 0]
        x2 = xs[..., 1]
        out = np.empty_like(xs)
        out[..., 0] = f1(t, x1, x2)
        out[..., 1] = f2(t, x1, x2)
        return out

    div = None
    if spec.div is not None:
        fd = spec.div.as_numpy()

        def div(t, xs):
            xs = np.asarray(xs, dtype=float)
            return fd(t, xs[..., 0], xs[..., 1])

    scalar = expressions.compile_scalar_pair(spec.u1, spec.u2)
    return TimeVaryingField(
        velocity=velocity, div=div, sup_norm=spec.sup_norm,
        div_sup_integral=0.0 if spec.div is not None and spec.div.source == "0" else None,
        scalar_velocity=scalar, jit_ok=True)


def build_path(s: Scenario, vortexwave_path: Optional[PointVortexPath] = None
               ) -> PointVortexPath:
    spec = s.path
    if spec.kind == "from_vortexwave":
        if vortexwave_path is None:
            raise ScenarioSemanticError(
                "from_vortexwave path requested but no vortex-wave run supplied")
        return vortexwave_path
    if spec.kind == "samples":
        samples = np.asarray(spec.samples, dtype=float)
        times = samples[:, 0]
        positions = samples[:, 1:]
        lip = spec.lipschitz_bound
        if lip is None:
            if len(times) > 1:
                seg = np.linalg.norm(np.diff(positions, axis=0), axis=1)
                lip = float((seg / np.diff(times)).max()) * (1.0 + 1e-9)
            else:
                lip = 0.0
        return PointVortexPath(times, positions, lip)
    # expression path, sampled on a uniform grid
    g1 = spec.z1.as_numpy()
    g2 = spec.z2.as_numpy()
    times = np.linspace(0.0, s.horizon, PATH_SAMPLES)
    zero = np.zeros_like(times)
    positions = np.stack((g1(times, zero, zero), g2(times, zero, zero)), axis=-1)
    lip = spec.lipschitz_bound
    if lip is None:
        seg = np.linalg.norm(np.diff(positions, axis=0), axis=1)
        lip = float((seg / np.diff(times)).max()) * (1.0 + 1e-9)
    return PointVortexPath(times, positions, lip)


def build_ensemble(s: Scenario) -> InitialEnsemble:
    return disk_ensemble(s.ensemble.center, s.ensemble.radius, s.ensemble.spacing)


def build_output_times(s: Scenario) -> np.ndarray:
    if s.output_times == 1:
        return np.array([0.0])
    return np.linspace(0.0, s.horizon, s.output_times)


def build_blob_ensemble(s: Scenario) -> vortexwave.BlobEnsemble:
    if s.vortexwave is None:
        raise ScenarioSemanticError("scenario has no [vortexwave] section")
    vw = s.vortexwave
    omega = vw.omega0.as_numpy()
    return vortexwave.lattice_ensemble(
        lambda x1, x2: omega(0.0, x1, x2), vw.window, vw.blob_spacing, vw.delta_blob)


def build_vortexwave_state(s: Scenario) -> vortexwave.VortexWaveState:
    ensemble = build_blob_ensemble(s)
    vw = s.vortexwave
    return vortexwave.VortexWaveState(
        vortex=np.asarray(vw.vortex, dtype=float), strength=vw.strength,
        ensemble=ensemble, t=0.0)
