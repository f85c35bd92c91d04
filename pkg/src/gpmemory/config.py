"""Kernel-spec parsing, experiment configuration and the preset pipelines.

Kernel spec grammar::

    spec   := family ":" params | "file:" path
    family := "const" | "exp" | "powerlaw" | "abel"
    params := name "=" number ("," name "=" number)*

with exactly the parameters ``const: a``, ``exp: a, b``,
``powerlaw: a, omega, l`` and ``abel: alpha``.
"""

from __future__ import annotations

import copy
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GPMemoryError, ParseError, ValidationError
from .front_analysis import FrontReport, analyze
from .io import write_field, write_json
from .kernels import (
    AbelKernel,
    ConstantKernel,
    ExponentialKernel,
    Kernel,
    PowerLawKernel,
    load_sampled_kernel,
)
from .laplace_inversion import invert
from .signals import BoundarySignal, MollifiedDelta, SampledSignal, mollify_delta
from .symbol import Finite, classify_speed, front_jet, symbol_expansion
from .telegraph import TelegraphParams, telegraph_mollified
from .timedomain import Field, Grid, solve

__all__ = [
    "parse_kernel_spec",
    "boundary_from_dict",
    "ExperimentConfig",
    "PRESETS",
    "preset_config",
    "apply_overrides",
    "run_experiment",
    "run_preset",
    "PresetResult",
]

FAMILIES = {
    "const": (ConstantKernel, ("a",)),
    "exp": (ExponentialKernel, ("a", "b")),
    "powerlaw": (PowerLawKernel, ("a", "omega", "l")),
    "abel": (AbelKernel, ("alpha",)),
}
_NAME = re.compile(r"[A-Za-z_]\w*")
_NUMBER = re.compile(r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Cursor:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def match(self, pattern, what, expected):
        self.skip_ws()
        m = pattern.match(self.text, self.pos)
        if not m:
            raise ParseError(f"expected {what}", self.pos, expected)
        self.pos = m.end()
        return m.group(0)

    def literal(self, ch):
        self.skip_ws()
        if not self.text.startswith(ch, self.pos):
            raise ParseError(f"expected {ch!r}", self.pos, (ch,))
        self.pos += 1

    def at_end(self):
        self.skip_ws()
        return self.pos >= len(self.text)


def parse_kernel_spec(spec: str) -> Kernel:
    """Parse a kernel spec string into a validated :class:`Kernel`.

    Raises ParseError (with ``position`` and ``expected``) for grammar
    violations and ValidationError for out-of-range parameters.
    """
    cur = _Cursor(spec)
    families = tuple(FAMILIES) + ("file",)
    start = cur.pos
    family = cur.match(_NAME, "kernel family", families)
    if family not in families:
        raise ParseError(f"unknown kernel family {family!r}", start, families)
    cur.literal(":")
    if family == "file":
        path = spec[cur.pos :].strip()
        if not path:
            raise ParseError("missing kernel file path", cur.pos, ("<path>",))
        return load_sampled_kernel(path)

    cls, names = FAMILIES[family]
    values: dict = {}
    while True:
        start = cur.pos
        name = cur.match(_NAME, "parameter name", names)
        if name not in names:
            raise ParseError(f"unknown parameter {name!r} for {family}", start, names)
        if name in values:
            raise ParseError(f"duplicate parameter {name!r}", start, tuple(n for n in names if n not in values))
        cur.literal("=")
        values[name] = float(cur.match(_NUMBER, "number", ("<number>",)))
        if cur.at_end():
            break
        cur.literal(",")
    missing = tuple(n for n in names if n not in values)
    if missing:
        raise ParseError(f"missing parameter(s) for {family}", cur.pos, missing)
    return cls(**values)


def boundary_from_dict(d: dict) -> BoundarySignal:
    kind = d.get("type", "mollified_delta")
    if kind == "mollified_delta":
        return mollify_delta(float(d["eps"]), d.get("shape", "bump"))
    if kind == "sampled":
        data = np.loadtxt(d["path"], delimiter=",", ndmin=2, comments="#", skiprows=int(d.get("skiprows", 0)))
        return SampledSignal(data[:, 0], data[:, 1], source=str(d["path"]))
    raise ValidationError(f"unknown boundary type {kind!r}")


def _boundary_to_dict(b: BoundarySignal) -> dict:
    if isinstance(b, MollifiedDelta):
        return {"type": "mollified_delta", "eps": b.eps, "shape": b.shape.value}
    if isinstance(b, SampledSignal):
        return {"type": "sampled", "path": b.source}
    raise ValidationError(f"boundary {type(b).__name__} cannot be serialised")


@dataclass
class ExperimentConfig:
    """One simulate-then-analyse run.

    ``solver`` holds ``method``, ``generator`` and ``space_order``;
    ``analysis`` holds ``x_list``, ``thresholds`` and ``plateau_x``;
    ``outputs`` holds ``field_csv``, ``report_json`` and the CSV strides.
    """

    kernel_spec: str
    boundary: BoundarySignal
    grid: Grid
    solver: dict = field(default_factory=dict)
    analysis: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        parse_kernel_spec(self.kernel_spec)
        if not self.analysis.get("x_list"):
            raise ValidationError("analysis.x_list must list at least one position")
        for key in ("field_csv", "report_json"):
            p = self.outputs.get(key)
            if p and not Path(p).resolve().parent.is_dir():
                raise ValidationError(f"outputs.{key}: directory of {p} does not exist")

    @property
    def kernel(self) -> Kernel:
        return parse_kernel_spec(self.kernel_spec)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        try:
            return cls(
                kernel_spec=d["kernel_spec"],
                boundary=boundary_from_dict(d["boundary"]),
                grid=Grid(**d["grid"]),
                solver=dict(d.get("solver", {})),
                analysis=dict(d.get("analysis", {})),
                outputs=dict(d.get("outputs", {})),
            )
        except KeyError as exc:
            raise ValidationError(f"config is missing field {exc.args[0]!r}") from None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "kernel_spec": self.kernel_spec,
            "boundary": _boundary_to_dict(self.boundary),
            "grid": self.grid.as_dict(),
            "solver": dict(self.solver),
            "analysis": dict(self.analysis),
            "outputs": dict(self.outputs),
        }


_THRESHOLDS = [1e-2, 1e-3, 1e-4]

PRESETS = {
    "wave": {
        "kernel_spec": "const:a=2",
        "boundary": {"type": "mollified_delta", "eps": 0.05, "shape": "bump"},
        "grid": {"L": 6.0, "nx": 1200, "T": 2.5, "nt": 2000},
        "solver": {"method": "cq", "generator": "trapezoidal", "space_order": 4},
        "analysis": {
            "x_list": [0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0],
            "thresholds": _THRESHOLDS,
            "plateau_x": [0.5, 1.0, 1.5, 2.0],
        },
        "outputs": {"x_stride": 10, "t_stride": 10},
    },
    "telegraph": {
        "kernel_spec": "exp:a=1,b=1",
        "boundary": {"type": "mollified_delta", "eps": 0.05, "shape": "bump"},
        "grid": {"L": 3.6, "nx": 720, "T": 3.0, "nt": 2400},
        "solver": {"method": "cq", "generator": "trapezoidal", "space_order": 4},
        "analysis": {
            "x_list": [0.5, 0.75, 1.0, 1.25, 1.5, 1.75, 2.0],
            "thresholds": _THRESHOLDS,
            "plateau_x": [0.5, 1.0, 1.5, 2.0],
            "oracle_x": [0.5, 1.0, 1.5, 2.0],
            "convergence": True,
            "inversion": True,
        },
        "outputs": {"x_stride": 10, "t_stride": 10},
    },
    "abel": {
        "kernel_spec": "abel:alpha=0.5",
        "boundary": {"type": "mollified_delta", "eps": 0.05, "shape": "bump"},
        "grid": {"L": 2.0, "nx": 400, "T": 1.0, "nt": 1600},
        "solver": {"method": "product", "space_order": 2},
        "analysis": {"x_list": [0.1, 0.2, 0.3, 0.4, 0.5], "thresholds": _THRESHOLDS},
        "outputs": {"x_stride": 5, "t_stride": 10},
    },
}

#: acceptance tolerances
VELOCITY_RTOL = 0.02
DECAY_ATOL = 0.02
DECAY_RTOL = 0.05
PLATEAU_RTOL = 0.10
PLATEAU_ZERO = 1e-4
CAUSALITY_LEVEL = 1e-6
THRESHOLD_SPREAD = 0.03
ORACLE_L2 = 1e-2
MIN_CONVERGENCE = 1.7
#: causality is tested before x/a + t0 - 5 eps - 2 dt
CAUSAL_MARGIN = 5.0


def apply_overrides(d: dict, overrides: dict | None) -> dict:
    """Return a copy of ``d`` with dotted-key overrides (``"grid.nx": 800``) applied."""
    out = copy.deepcopy(d)
    for key, value in (overrides or {}).items():
        node = out
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
        node[parts[-1]] = value
    return out


def preset_config(name: str, overrides: dict | None = None, out_dir=None) -> ExperimentConfig:
    if name not in PRESETS:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    d = apply_overrides(PRESETS[name], overrides)
    if out_dir is not None:
        out_dir = Path(out_dir)
        d["outputs"].setdefault("field_csv", str(out_dir / f"{name}_field.csv"))
        d["outputs"].setdefault("report_json", str(out_dir / f"{name}_report.json"))
    return ExperimentConfig.from_dict(d)


def _simulate(cfg: ExperimentConfig, grid: Grid | None = None) -> Field:
    s = cfg.solver
    return solve(
        cfg.kernel,
        cfg.boundary,
        grid or cfg.grid,
        method=s.get("method", "auto"),
        generator=s.get("generator", "trapezoidal"),
        space_order=s.get("space_order"),
    )


def _check(name, passed, value, limit):
    return {"name": name, "passed": bool(passed), "value": value, "limit": limit}


def _causality(field: Field, a: float, x_list) -> float:
    # largest |theta| ahead of the mollified front, relative to the global peak
    peak = float(np.max(np.abs(field.values)))
    worst = 0.0
    for x in x_list:
        cut = x / a + field.shift - CAUSAL_MARGIN * field.eps - 2 * field.grid.dt
        ahead = field.t < cut
        if ahead.any():
            worst = max(worst, float(np.max(np.abs(field.column(x)[ahead]))) / peak)
    return worst


def _oracle_errors(cfg: ExperimentConfig, field: Field, params: TelegraphParams, x_list):
    # (max abs error, relative L2 error) against the exact solution away from the front
    err_max, num, den = 0.0, 0.0, 0.0
    eps = cfg.boundary.eps
    for x in x_list:
        ref = telegraph_mollified(params, cfg.boundary, x, field.t)
        away = np.abs(field.t - (x / params.a + cfg.boundary.shift)) > CAUSAL_MARGIN * eps
        diff = (field.column(x) - ref)[away]
        err_max = max(err_max, float(np.max(np.abs(diff))))
        num += float(diff @ diff)
        den += float(ref[away] @ ref[away])
    return err_max, math.sqrt(num / den)


def _telegraph_extras(cfg, field, kernel, checks, measurements):
    params = TelegraphParams.from_kernel(kernel)
    x_list = cfg.analysis.get("oracle_x", [])
    if not x_list:
        return
    eps = cfg.boundary.eps
    err_max, l2 = _oracle_errors(cfg, field, params, x_list)
    measurements["oracle"] = {"max_error": err_max, "rel_l2": l2}
    checks.append(_check("timedomain_vs_oracle_l2", l2 <= ORACLE_L2, l2, ORACLE_L2))

    if cfg.analysis.get("inversion"):
        t = field.t[1:]
        num = den = num_o = 0.0
        for x in x_list:
            inv = invert(kernel, cfg.boundary, x, t).values
            ref = telegraph_mollified(params, cfg.boundary, x, t)
            away = np.abs(t - (x / params.a + cfg.boundary.shift)) > CAUSAL_MARGIN * eps
            d_td = (inv - field.column(x)[1:])[away]
            d_or = (inv - ref)[away]
            num += float(d_td @ d_td)
            num_o += float(d_or @ d_or)
            den += float(ref[away] @ ref[away])
        l2_td, l2_or = math.sqrt(num / den), math.sqrt(num_o / den)
        measurements["inversion"] = {"vs_timedomain_rel_l2": l2_td, "vs_oracle_rel_l2": l2_or}
        checks.append(_check("inversion_vs_timedomain_l2", l2_td <= ORACLE_L2, l2_td, ORACLE_L2))
        checks.append(_check("inversion_vs_oracle_l2", l2_or <= ORACLE_L2, l2_or, ORACLE_L2))

    if cfg.analysis.get("convergence"):
        fine = _simulate(cfg, cfg.grid.refined())
        fine_max, _ = _oracle_errors(cfg, fine, params, x_list)
        factor = err_max / fine_max if fine_max > 0 else math.inf
        measurements["convergence"] = {
            "coarse_max_error": err_max,
            "fine_max_error": fine_max,
            "factor": factor,
            "observed_order": math.log2(factor) if math.isfinite(factor) and factor > 0 else None,
        }
        checks.append(_check("convergence_factor", factor >= MIN_CONVERGENCE, factor, MIN_CONVERGENCE))


def _checks(cfg: ExperimentConfig, field: Field, kernel: Kernel, report: FrontReport, measurements: dict) -> list:
    checks = []
    speed = classify_speed(kernel)
    thr = report.threshold_velocity
    if not isinstance(speed, Finite):
        checks.append(_check("classification_infinite", True, "infinite", "infinite"))
        vs = [d["velocity"] for d in sorted(thr, key=lambda d: -d["threshold"])]
        ok = len(vs) == len(cfg.analysis.get("thresholds", [])) and len(vs) >= 2
        ok = ok and all(b > a for a, b in zip(vs, vs[1:]))
        checks.append(_check("threshold_velocity_increasing", ok, vs, "strictly increasing"))
        return checks

    a = speed.a
    gamma = symbol_expansion(kernel).gamma
    v_err = abs(report.velocity / a - 1.0) if math.isfinite(report.velocity) else math.inf
    checks.append(_check("velocity", v_err <= VELOCITY_RTOL, report.velocity, [a, VELOCITY_RTOL]))
    if gamma == 0.0:
        ok = abs(report.decay_rate) <= DECAY_ATOL
        checks.append(_check("decay_rate", ok, report.decay_rate, [0.0, DECAY_ATOL]))
    else:
        ok = abs(report.decay_rate / gamma - 1.0) <= DECAY_RTOL
        checks.append(_check("decay_rate", ok, report.decay_rate, [gamma, DECAY_RTOL]))

    peak = float(np.max(np.abs(field.values)))
    for entry in report.plateau:
        m, p = entry["measured"], entry["predicted"]
        if p == 0.0:
            ok = abs(m) <= PLATEAU_ZERO * peak
            limit = PLATEAU_ZERO * peak
        else:
            ok = abs(m / p - 1.0) <= PLATEAU_RTOL
            limit = [p, PLATEAU_RTOL]
        checks.append(_check(f"plateau_x={entry['x']:g}", ok and math.isfinite(m), m, limit))

    causal = _causality(field, a, cfg.analysis["x_list"])
    measurements["causality"] = causal
    checks.append(_check("causality", causal <= CAUSALITY_LEVEL, causal, CAUSALITY_LEVEL))

    if len(thr) >= 2:
        vs = [d["velocity"] for d in thr]
        spread = (max(vs) - min(vs)) / report.velocity
        checks.append(_check("threshold_insensitive", spread < THRESHOLD_SPREAD, spread, THRESHOLD_SPREAD))

    if isinstance(kernel, ExponentialKernel):
        _telegraph_extras(cfg, field, kernel, checks, measurements)
    return checks


@dataclass
class PresetResult:
    exit_code: int
    report: dict
    field: Field


def run_experiment(cfg: ExperimentConfig) -> PresetResult:
    """Simulate, analyse, compare with predictions, and write the configured outputs.

    The exit code is 0 iff every check passes.  Reports carry no timings so
    identical configs give byte-identical files.
    """
    kernel = cfg.kernel
    field = _simulate(cfg)
    an = cfg.analysis
    report = analyze(
        field,
        an["x_list"],
        kernel,
        thresholds=an.get("thresholds", _THRESHOLDS),
        plateau_x=an.get("plateau_x"),
    )
    measurements: dict = {}
    try:
        checks = _checks(cfg, field, kernel, report, measurements)
    except GPMemoryError as exc:
        checks = [_check("pipeline", False, str(exc), None)]

    predictions = dict(report.predictions)
    if isinstance(classify_speed(kernel), Finite):
        predictions["p"] = [{"x": float(x), "p": front_jet(kernel, x).heaviside_coeff} for x in an.get("plateau_x") or []]
    failures = [c["name"] for c in checks if not c["passed"]]
    doc = {
        "tool": "gpmemory",
        "version": __version__,
        "config": cfg.to_dict(),
        "predictions": predictions,
        "measurements": {**report.to_dict(), **measurements},
        "checks": checks,
        "failures": failures,
        "passed": not failures,
    }
    out = cfg.outputs
    if out.get("field_csv"):
        write_field(field, out["field_csv"], int(out.get("x_stride", 1)), int(out.get("t_stride", 1)))
    if out.get("report_json"):
        write_json(out["report_json"], doc)
    return PresetResult(0 if not failures else 1, doc, field)


def run_preset(name: str, overrides: dict | None = None, out_dir=None) -> PresetResult:
    """Run one of the ``wave``, ``telegraph`` or ``abel`` presets."""
    return run_experiment(preset_config(name, overrides, out_dir))
