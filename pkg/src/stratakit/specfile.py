"""The JSON input format and its strict parser.

A spec file describes a bound-quiver algebra over an exact field, an
optional stratification (poset, vertex labeling, optional sign function),
and an optional Macpherson-Vilonen gluing block.  The key names below are
a compatibility contract; unknown keys are rejected everywhere.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .algebra import Algebra, Presentation, Quiver, build_bound_quiver_algebra
from .linalg import Field


class SpecError(ValueError):
    """Malformed input file (schema level, exit code 1 territory)."""


def _expect_keys(obj: dict, where: str, required: set[str], optional: set[str] = frozenset()) -> None:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: expected an object")
    keys = set(obj)
    missing = required - keys
    unknown = keys - required - optional
    if missing:
        raise SpecError(f"{where}: missing keys {sorted(missing)}")
    if unknown:
        raise SpecError(f"{where}: unknown keys {sorted(unknown)}")


def _parse_field(obj) -> Field:
    _expect_keys(obj, "field", {"kind"}, {"p"})
    if obj["kind"] == "GF":
        if "p" not in obj or not isinstance(obj["p"], int):
            raise SpecError("field: GF needs an integer p")
        try:
            return Field.gf(obj["p"])
        except ValueError as e:
            raise SpecError(f"field: {e}") from None
    if obj["kind"] == "Q":
        if "p" in obj:
            raise SpecError("field: Q takes no p")
        return Field.rationals()
    raise SpecError(f"field: unknown kind {obj['kind']!r}")


def _parse_quiver(obj) -> Quiver:
    _expect_keys(obj, "quiver", {"vertices", "arrows"})
    vs = obj["vertices"]
    if not isinstance(vs, list) or not all(isinstance(v, str) for v in vs):
        raise SpecError("quiver.vertices: expected a list of strings")
    arrows = []
    for i, a in enumerate(obj["arrows"]):
        _expect_keys(a, f"quiver.arrows[{i}]", {"name", "from", "to"})
        arrows.append((a["name"], a["from"], a["to"]))
    try:
        return Quiver(tuple(vs), tuple(arrows))
    except ValueError as e:
        raise SpecError(f"quiver: {e}") from None


def _parse_relations(obj, quiver: Quiver) -> Presentation:
    rels = []
    for i, rel in enumerate(obj):
        _expect_keys(rel, f"relations[{i}]", {"terms"})
        terms = []
        for j, t in enumerate(rel["terms"]):
            _expect_keys(t, f"relations[{i}].terms[{j}]", {"coeff", "path"})
            path = t["path"]
            if not isinstance(path, list) or not all(isinstance(x, str) for x in path):
                raise SpecError(f"relations[{i}].terms[{j}].path: expected arrow names")
            terms.append((t["coeff"], path))
        rels.append(terms)
    try:
        return Presentation.from_names(quiver, rels)
    except KeyError as e:
        raise SpecError(f"relations: unknown arrow {e}") from None


@dataclass(frozen=True)
class PosetSpec:
    elements: tuple[str, ...]
    leq: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class StratSpec:
    poset: PosetSpec
    rho: dict[str, str]
    epsilon: dict[str, str] | None


def _parse_stratification(obj, quiver: Quiver) -> StratSpec:
    _expect_keys(obj, "stratification", {"poset", "rho"}, {"epsilon"})
    _expect_keys(obj["poset"], "stratification.poset", {"elements", "leq"})
    elements = obj["poset"]["elements"]
    if not isinstance(elements, list) or not all(isinstance(x, str) for x in elements):
        raise SpecError("stratification.poset.elements: expected strings")
    leq = []
    for pair in obj["poset"]["leq"]:
        if not isinstance(pair, list) or len(pair) != 2:
            raise SpecError("stratification.poset.leq: expected pairs")
        if pair[0] not in elements or pair[1] not in elements:
            raise SpecError(f"stratification.poset.leq: unknown element in {pair}")
        leq.append((pair[0], pair[1]))
    rho = obj["rho"]
    if set(rho) != set(quiver.vertices):
        raise SpecError("stratification.rho: must label every vertex exactly once")
    for v, lam in rho.items():
        if lam not in elements:
            raise SpecError(f"stratification.rho[{v}]: unknown poset element {lam!r}")
    if set(rho.values()) != set(elements):
        raise SpecError("stratification.rho: every poset element must label some vertex")
    eps = None
    if "epsilon" in obj:
        eps = obj["epsilon"]
        if set(eps) != set(elements):
            raise SpecError("stratification.epsilon: must assign every poset element")
        for lam, s in eps.items():
            if s not in ("+", "-"):
                raise SpecError(f"stratification.epsilon[{lam}]: expected '+' or '-'")
    return StratSpec(PosetSpec(tuple(elements), tuple(leq)), dict(rho), eps)


@dataclass(frozen=True)
class BimoduleSpec:
    dim: int
    left: dict[str, list]   # acting algebra basis label -> matrix rows
    right: dict[str, list]


@dataclass(frozen=True)
class MVSpec:
    z_quiver: Quiver
    z_presentation: Presentation
    u_quiver: Quiver
    u_presentation: Presentation
    m: BimoduleSpec  # left u-algebra, right z-algebra
    n: BimoduleSpec  # left z-algebra, right u-algebra
    theta: list      # (dim m * dim n) x dim(u-algebra) rows


def _parse_matrix_rows(obj, where: str) -> list:
    if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
        raise SpecError(f"{where}: expected a list of rows")
    return obj


def _parse_bimodule(obj, where: str, left_key: str, right_key: str) -> BimoduleSpec:
    _expect_keys(obj, where, {"dim", left_key, right_key})
    if not isinstance(obj["dim"], int) or obj["dim"] < 0:
        raise SpecError(f"{where}.dim: expected a nonnegative integer")
    left = {k: _parse_matrix_rows(v, f"{where}.{left_key}[{k}]") for k, v in obj[left_key].items()}
    right = {k: _parse_matrix_rows(v, f"{where}.{right_key}[{k}]") for k, v in obj[right_key].items()}
    return BimoduleSpec(obj["dim"], left, right)


def _parse_mv(obj) -> MVSpec:
    _expect_keys(obj, "mv", {"z", "u", "m", "n", "theta"})
    sides = {}
    for side in ("z", "u"):
        _expect_keys(obj[side], f"mv.{side}", {"quiver"}, {"relations"})
        q = _parse_quiver(obj[side]["quiver"])
        pres = _parse_relations(obj[side].get("relations", []), q)
        sides[side] = (q, pres)
    m = _parse_bimodule(obj["m"], "mv.m", "left_u", "right_z")
    n = _parse_bimodule(obj["n"], "mv.n", "left_z", "right_u")
    theta = _parse_matrix_rows(obj["theta"], "mv.theta")
    return MVSpec(
        z_quiver=sides["z"][0], z_presentation=sides["z"][1],
        u_quiver=sides["u"][0], u_presentation=sides["u"][1],
        m=m, n=n, theta=theta,
    )


@dataclass(frozen=True)
class AlgebraSpec:
    name: str
    field: Field
    quiver: Quiver
    presentation: Presentation
    stratification: StratSpec | None
    mv: MVSpec | None


def parse_spec(data, name: str = "<input>") -> AlgebraSpec:
    _expect_keys(data, name, {"field", "quiver"}, {"relations", "stratification", "mv"})
    field = _parse_field(data["field"])
    quiver = _parse_quiver(data["quiver"])
    pres = _parse_relations(data.get("relations", []), quiver)
    strat = None
    if "stratification" in data:
        strat = _parse_stratification(data["stratification"], quiver)
    mv = None
    if "mv" in data:
        mv = _parse_mv(data["mv"])
    return AlgebraSpec(name=name, field=field, quiver=quiver, presentation=pres,
                       stratification=strat, mv=mv)


def load_spec(path: str | Path) -> tuple[AlgebraSpec, bytes]:
    raw = Path(path).read_bytes()
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as e:
        raise SpecError(f"{path}: not valid JSON ({e})") from None
    return parse_spec(data, name=Path(path).stem), raw


def build_algebra(spec: AlgebraSpec, length_bound: int | None = None) -> Algebra:
    kwargs = {}
    if length_bound is not None:
        kwargs["length_bound"] = length_bound
    return build_bound_quiver_algebra(spec.presentation, spec.field, **kwargs)
