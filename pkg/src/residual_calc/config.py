"""Job configuration: parsing and validation.

A config is a JSON object; see ``docs/config_schema.md``. Parse failures
raise :class:`ConfigParseError`, semantic problems raise
:class:`ConfigValidationError` naming the offending field.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .class_ring import GradedClass, RingContext, Variable
from .errors import CalculusError
from .lattice import Febd, LatticeClass, SurfaceGeometry, TypeTag, adjunction_delta, pair, square


class ConfigParseError(Exception):
    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ConfigValidationError(Exception):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


DEFAULT_VARIABLES = (("z", 1), ("n", 0))

# kind -> (class args, class-list args, required params, optional params)
TASK_SCHEMA: dict[str, tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...], tuple[str, ...]]] = {
    "pair": (("a", "b"), (), (), ()),
    "is_exceptional": (("e",), (), (), ()),
    "expected_dimension": (("e",), (), (), ()),
    "typeI_codimension": (("e",), (), (), ()),
    "adjunction_delta": ((), (), ("L_sq",), ()),
    "chi_line": (("c",), (), (), ()),
    "rank_omega": (("c",), ("es",), (), ("d",)),
    "dimension_triple": (("c",), ("es",), (), ()),
    "w_prime_ranks": (("c", "e", "d"), (), ("n",), ()),
    "yau_zaslow": ((), (), ("delta_max",), ("c2",)),
    "virtual_count": ((), (), ("L_sq",), ("c2",)),
    "k3_vanishing": ((), (), ("p",), ("pg", "r2_trivial")),
    "schedule": (("c",), ("candidates",), ("max_size",), ()),
    "bundle": ((), (), ("rank", "ctotal"), ("twist", "pushforward")),
    "localized_class": ((), (), ("v", "w", "base_dim", "moduli_segre"), ("stabilize_by",)),
    "residual_expansion": (("c",), ("es",), (), (
        "d", "n0", "h", "v_chern", "v_prime_chern", "rnd_chern", "r1_chern", "pg_class",
        "r2_trivial", "special_assumption", "eta_tilde")),
    "stabilization_check": ((), (), (), ("instances",)),
    "whitney_segre_check": ((), (), (), ("instances",)),
    "rank_omega_check": ((), (), (), ("instances",)),
    "dimension_identity_check": ((), (), (), ("instances",)),
    "tau_check": ((), (), (), ("instances",)),
}


@dataclass(frozen=True)
class Task:
    index: int
    kind: str
    params: dict[str, Any]


@dataclass(frozen=True)
class JobConfig:
    geometry: SurfaceGeometry
    classes: dict[str, LatticeClass]
    tasks: tuple[Task, ...]
    ring: RingContext
    output_path: str = "report.json"
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def truncation(self) -> int:
        return self.ring.truncation

    def cls(self, name: str) -> LatticeClass:
        return self.classes[name]

    def expr(self, text) -> GradedClass:
        if isinstance(text, list):
            return GradedClass.from_terms(self.ring, text)
        return GradedClass.parse(self.ring, str(text))


def load_text(text: str, source: str = "<config>") -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}",
                               exc.lineno, exc.colno) from None
    if not isinstance(data, dict):
        raise ConfigParseError(f"{source}:1:1: top level must be an object", 1, 1)
    return data


def load_path(path: str | Path) -> JobConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParseError(f"{path}: {exc.strerror}") from None
    return validate(load_text(text, str(path)))


def _req(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigValidationError(f"{where}.{key}", "missing")
    return obj[key]


def _int(value, where: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(where, "expected an integer")
    return value


def _geometry(data) -> SurfaceGeometry:
    if not isinstance(data, dict):
        raise ConfigValidationError("geometry", "expected an object")
    try:
        return SurfaceGeometry(
            gram=_req(data, "gram", "geometry"),
            canonical=_req(data, "canonical", "geometry"),
            p_g=_int(data.get("p_g", 0), "geometry.p_g"),
            q=_int(data.get("q", 0), "geometry.q"),
            c2=_int(data.get("c2", 0), "geometry.c2"),
            dim_base=_int(data.get("dim_base", 0), "geometry.dim_base"),
            canonical_degree_rel=data.get("canonical_degree_rel"),
        )
    except CalculusError as exc:
        raise ConfigValidationError(f"geometry.{exc.fields.get('field', 'gram')}", str(exc)) from None
    except (TypeError, ValueError) as exc:
        raise ConfigValidationError("geometry", str(exc)) from None


def _classes(data, rank: int) -> dict[str, LatticeClass]:
    items = data.items() if isinstance(data, dict) else (
        (d.get("name"), d) for d in data) if isinstance(data, list) else None
    if items is None:
        raise ConfigValidationError("classes", "expected an object or a list")
    out = {}
    for name, spec in items:
        where = f"classes.{name}"
        if not isinstance(name, str) or not name:
            raise ConfigValidationError("classes", "every class needs a name")
        if name in out:
            raise ConfigValidationError(where, "declared twice")
        if isinstance(spec, list):
            spec = {"coords": spec}
        coords = _req(spec, "coords", where)
        if not isinstance(coords, list) or len(coords) != rank:
            raise ConfigValidationError(f"{where}.coords", f"expected {rank} integers")
        for x in coords:
            _int(x, f"{where}.coords")
        try:
            out[name] = LatticeClass(tuple(coords), _int(spec.get("degree_rel", 0), f"{where}.degree_rel"),
                                     Febd(spec.get("febd", "pg")),
                                     TypeTag(spec.get("type", "ordinary")))
        except ValueError as exc:
            raise ConfigValidationError(where, str(exc)) from None
    return out


def _ring(data) -> RingContext:
    truncation = _int(_req(data, "truncation", "config"), "truncation")
    variables = data.get("variables", [list(v) for v in DEFAULT_VARIABLES])
    try:
        return RingContext(tuple(Variable(str(n), int(d)) for n, d in variables), truncation)
    except (TypeError, ValueError) as exc:
        raise ConfigValidationError("variables", str(exc)) from None


def validate(data: dict) -> JobConfig:
    geometry = _geometry(_req(data, "geometry", "config"))
    classes = _classes(data.get("classes", {}), geometry.rank)
    ring = _ring(data)
    raw_tasks = _req(data, "tasks", "config")
    if not isinstance(raw_tasks, list):
        raise ConfigValidationError("tasks", "expected a list")
    output = data.get("output_path", "report.json")
    if not isinstance(output, str):
        raise ConfigValidationError("output_path", "expected a string")
    tasks = []
    for i, t in enumerate(raw_tasks):
        where = f"tasks[{i}]"
        if not isinstance(t, dict):
            raise ConfigValidationError(where, "expected an object")
        kind = _req(t, "kind", where)
        if kind not in TASK_SCHEMA:
            raise ConfigValidationError(f"{where}.kind", f"unknown task kind {kind!r}")
        cargs, largs, required, optional = TASK_SCHEMA[kind]
        allowed = {"kind", *cargs, *largs, *required, *optional}
        for key in t:
            if key not in allowed:
                raise ConfigValidationError(f"{where}.{key}", "unexpected field")
        for key in cargs:
            _check_name(_req(t, key, where), classes, f"{where}.{key}")
        for key in ("d",):
            if key in t and key not in cargs:
                _check_name(t[key], classes, f"{where}.{key}")
        for key in largs:
            names = _req(t, key, where)
            if not isinstance(names, list) or not names:
                raise ConfigValidationError(f"{where}.{key}", "expected a nonempty list of class names")
            for j, name in enumerate(names):
                _check_name(name, classes, f"{where}.{key}[{j}]")
        for key in required:
            _req(t, key, where)
        params = {k: v for k, v in t.items() if k != "kind"}
        task = Task(i, kind, params)
        _check_task(task, geometry, classes, ring, where)
        tasks.append(task)
    return JobConfig(geometry, classes, tuple(tasks), ring, output, raw=data)


def _check_name(name, classes, where):
    if not isinstance(name, str) or name not in classes:
        raise ConfigValidationError(where, f"undeclared class {name!r}")


def _check_expr(ring, text, where):
    try:
        if isinstance(text, list):
            return GradedClass.from_terms(ring, text)
        return GradedClass.parse(ring, str(text))
    except (CalculusError, ValueError) as exc:
        raise ConfigValidationError(where, f"bad class expression: {exc}") from None


def _check_bundle(ring, spec, where):
    if not isinstance(spec, dict):
        raise ConfigValidationError(where, "expected {rank, ctotal}")
    rank = _int(_req(spec, "rank", where), f"{where}.rank")
    c = _check_expr(ring, spec.get("ctotal", "1"), f"{where}.ctotal")
    if rank < 0:
        raise ConfigValidationError(f"{where}.rank", "must be nonnegative")
    if c.degree_part(0) != ring.one():
        raise ConfigValidationError(f"{where}.ctotal", "constant term must be 1")
    if c.max_degree() > rank:
        raise ConfigValidationError(f"{where}.ctotal", "Chern classes above the rank")
    return rank, c


def _check_task(task: Task, g: SurfaceGeometry, classes, ring: RingContext, where: str):
    p = task.params
    kind = task.kind
    for key in ("L_sq", "delta_max", "c2", "p", "pg", "n", "n0", "max_size", "instances", "base_dim"):
        if key in p:
            _int(p[key], f"{where}.{key}")
    if kind == "adjunction_delta" or kind == "virtual_count":
        try:
            adjunction_delta(p["L_sq"])
        except CalculusError:
            if kind == "virtual_count":
                raise ConfigValidationError(f"{where}.L_sq", "must be even and >= -2") from None
    if kind in ("yau_zaslow", "virtual_count"):
        c2 = p.get("c2", g.c2)
        if not isinstance(c2, int) or c2 < 1:
            raise ConfigValidationError(f"{where}.c2", "needs a positive c2")
        if kind == "yau_zaslow" and p["delta_max"] < 0:
            raise ConfigValidationError(f"{where}.delta_max", "must be nonnegative")
    if kind == "k3_vanishing" and p["p"] < 1:
        raise ConfigValidationError(f"{where}.p", "must be at least 1")
    if kind == "schedule" and p["max_size"] < 1:
        raise ConfigValidationError(f"{where}.max_size", "must be at least 1")
    if "instances" in p and p["instances"] < 0:
        raise ConfigValidationError(f"{where}.instances", "must be nonnegative")
    if kind == "bundle":
        rank, _ = _check_bundle(ring, {"rank": p["rank"], "ctotal": p["ctotal"]}, where)
        if rank > ring.truncation:
            raise ConfigValidationError(f"{where}.rank", "top Chern degree exceeds truncation")
        for key in ("twist", "pushforward"):
            if key in p:
                _check_var(ring, p[key], f"{where}.{key}")
    if kind == "localized_class":
        vr, _ = _check_bundle(ring, p["v"], f"{where}.v")
        wr, _ = _check_bundle(ring, p["w"], f"{where}.w")
        _check_expr(ring, p["moduli_segre"], f"{where}.moduli_segre")
        ed = p["base_dim"] + vr - 1 - wr
        if vr < 1:
            raise ConfigValidationError(f"{where}.v.rank", "must be at least 1")
        if not 0 <= ed <= ring.truncation:
            raise ConfigValidationError(f"{where}.base_dim",
                                        f"expected dimension {ed} outside [0, truncation]")
        if "stabilize_by" in p:
            _check_bundle(ring, p["stabilize_by"], f"{where}.stabilize_by")
        _check_var(ring, "z", f"{where}")
    if kind == "residual_expansion":
        es = [classes[n] for n in p["es"]]
        c = classes[p["c"]]
        a3 = sum(square(e, g) - pair(c, e, g) for e in es) + sum(
            pair(es[i], es[j], g) for i in range(len(es)) for j in range(i + 1, len(es)))
        rank = a3 - len(es) * g.q
        if rank > ring.truncation:
            raise ConfigValidationError(f"{where}.es",
                                        f"rank(omega) = {rank} exceeds truncation {ring.truncation}")
        hs = p.get("h", [f"h{i + 1}" for i in range(len(es))])
        if len(hs) != len(es):
            raise ConfigValidationError(f"{where}.h", "one generator per type II class")
        for j, h in enumerate(hs):
            _check_var(ring, h, f"{where}.h[{j}]")
        _check_var(ring, "z", where)
        _check_var(ring, "n", where)
        for key in ("v_prime_chern", "rnd_chern", "r1_chern", "eta_tilde"):
            if key in p:
                _check_expr(ring, p[key], f"{where}.{key}")
        if "v_chern" in p:
            if not isinstance(p["v_chern"], list) or len(p["v_chern"]) != len(es):
                raise ConfigValidationError(f"{where}.v_chern", "one class per type II class")
            for j, x in enumerate(p["v_chern"]):
                _check_expr(ring, x, f"{where}.v_chern[{j}]")
        if "pg_class" in p:
            _check_var(ring, p["pg_class"], f"{where}.pg_class")


def _check_var(ring: RingContext, name, where):
    if not isinstance(name, str) or name not in ring.names:
        raise ConfigValidationError(where, f"undeclared ring generator {name!r}")
