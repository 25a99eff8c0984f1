"""Diagram descriptions and their index contraction"""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import jsonschema
import sympy

from feynman.errors import DanglingIndexError, DiagramError, MomentumConservationError
from feynman.rules import (
    CONSISTENT, GAUGE, GHOST, PRINTED, VERTEX_LEGS, Leg, ProjectorMode, propagator, vertex,
)
from symbolic import Expression, canonicalize, contract_metric, make_atom, substitute
from symbolic.errors import IndexContractionError, UnknownIndexError
from symbolic.indices import IndexKind, fresh_label, index_kind

logger = logging.getLogger(__name__)

SCHEMA_PATH = Path(__file__).resolve().parent.parent / "schema" / "diagram.schema.json"

Combination = Tuple[Tuple[str, Fraction], ...]


def _combination(data: Optional[Dict]) -> Combination:
    items = ((name, Fraction(str(value))) for name, value in (data or {}).items())
    return tuple(sorted((name, value) for name, value in items if value != 0))


def _add(a: Combination, b: Combination, sign: int = 1) -> Combination:
    total: Dict[str, Fraction] = dict(a)
    for name, value in b:
        total[name] = total.get(name, Fraction(0)) + sign * value
    return tuple(sorted((n, v) for n, v in total.items() if v != 0))


@dataclass(frozen=True)
class Routing:
    spacetime: Combination = ()
    inner: Combination = ()

    @classmethod
    def from_dict(cls, data: Optional[Dict]) -> "Routing":
        data = data or {}
        return cls(_combination(data.get("spacetime")), _combination(data.get("inner")))

    def plus(self, other: "Routing", sign: int = 1) -> "Routing":
        return Routing(_add(self.spacetime, other.spacetime, sign), _add(self.inner, other.inner, sign))

    @property
    def is_zero(self) -> bool:
        return not self.spacetime and not self.inner

    def __str__(self):
        def text(parts):
            return " + ".join(f"{v}*{n}" for n, v in parts) or "0"
        return f"p: {text(self.spacetime)}, P: {text(self.inner)}"


@dataclass(frozen=True)
class VertexSpec:
    id: str
    kind: str
    legs: Tuple[str, ...]
    variant: str = CONSISTENT


@dataclass(frozen=True)
class Edge:
    id: str
    species: str
    start: str
    end: str
    momentum: Routing


@dataclass(frozen=True)
class ExternalLeg:
    id: str
    species: str
    indices: Tuple[str, ...]
    momentum: Routing = Routing()


@dataclass(frozen=True)
class Loop:
    spacetime: str
    inner: str


@dataclass(frozen=True)
class Diagram:
    name: str
    vertices: Tuple[VertexSpec, ...] = ()
    edges: Tuple[Edge, ...] = ()
    externals: Tuple[ExternalLeg, ...] = ()
    loops: Tuple[Loop, ...] = ()
    gauge_parameter: Union[int, str] = 1

    @classmethod
    def from_dict(cls, data: Dict) -> "Diagram":
        return cls(
            name=data["name"],
            vertices=tuple(VertexSpec(v["id"], v["kind"], tuple(v["legs"]), v.get("variant", CONSISTENT))
                           for v in data.get("vertices", [])),
            edges=tuple(Edge(e["id"], e["species"], e["from"], e["to"], Routing.from_dict(e.get("momentum")))
                        for e in data.get("edges", [])),
            externals=tuple(ExternalLeg(x["id"], x["species"], tuple(x["indices"]),
                                        Routing.from_dict(x.get("momentum")))
                            for x in data.get("externals", [])),
            loops=tuple(Loop(l["spacetime"], l["inner"]) for l in data.get("loops", [])),
            gauge_parameter=data.get("gauge_parameter", 1),
        )

    @property
    def internal_edges(self) -> List[Edge]:
        ids = {v.id for v in self.vertices}
        return [e for e in self.edges if e.start in ids and e.end in ids]

    @property
    def loop_count(self) -> int:
        if not self.vertices:
            return 0
        return len(self.internal_edges) - len(self.vertices) + 1

    @property
    def external_labels(self) -> set:
        return {label for x in self.externals for label in x.indices}


def load_diagram(path: Union[str, Path]) -> Diagram:
    """Read and schema-validate a diagram description"""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Diagram file not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        schema = json.load(f)
    try:
        jsonschema.validate(instance=data, schema=schema)
    except jsonschema.ValidationError as e:
        raise DiagramError(f"{path}: {e.message}") from e
    return Diagram.from_dict(data)


_SLOTS = {GAUGE: (IndexKind.SPACETIME, IndexKind.INNER), GHOST: (IndexKind.INNER,)}


def _leg_species(species: str) -> str:
    return GHOST if species == GHOST else GAUGE


class _Assembly:
    """Index labels and incoming momenta of every leg end"""

    def __init__(self, diagram: Diagram):
        self.diagram = diagram
        self.edges = {e.id: e for e in diagram.edges}
        self.externals = {x.id: x for x in diagram.externals}
        self.vertex_ids = {v.id for v in diagram.vertices}
        self.taken = set(diagram.external_labels)
        self.end_labels: Dict[Tuple[str, str], Tuple[str, ...]] = {}
        self.used_externals: List[str] = []
        self._check_externals()
        self._label_edges()

    def _check_externals(self):
        for x in self.diagram.externals:
            kinds = _SLOTS.get(x.species)
            if kinds is None:
                raise DiagramError(f"external '{x.id}' has unknown species '{x.species}'")
            if len(x.indices) != len(kinds):
                raise DiagramError(f"external '{x.id}' needs {len(kinds)} indices, got {len(x.indices)}")
            for label, kind in zip(x.indices, kinds):
                try:
                    actual = index_kind(label)
                except UnknownIndexError as e:
                    raise DiagramError(f"external '{x.id}': {e}") from e
                if actual != kind:
                    raise DiagramError(f"external '{x.id}': '{label}' is not a {kind.value} index")

    def _label_edges(self):
        for e in self.diagram.edges:
            if e.species not in _SLOTS:
                raise DiagramError(f"edge '{e.id}' has unknown species '{e.species}'")
            for side, target in (("from", e.start), ("to", e.end)):
                if target in self.externals:
                    x = self.externals[target]
                    if x.species != e.species:
                        raise DiagramError(f"edge '{e.id}' joins a {x.species} external as {e.species}")
                    self.end_labels[(e.id, side)] = x.indices
                    self.used_externals.append(target)
                elif target in self.vertex_ids:
                    self.end_labels[(e.id, side)] = tuple(self._fresh(kind) for kind in _SLOTS[e.species])
                else:
                    raise DiagramError(f"edge '{e.id}' ends at unknown node '{target}'")

    def _fresh(self, kind: IndexKind) -> str:
        label = fresh_label(kind, self.taken)
        self.taken.add(label)
        return label

    def stray(self) -> str:
        return self._fresh(IndexKind.INNER)

    def legs(self, spec: VertexSpec) -> Tuple[List[Tuple[Tuple[str, ...], Routing]], Routing]:
        """Labels and incoming momentum per leg, plus the momentum residual"""
        if spec.kind not in VERTEX_LEGS:
            raise DiagramError(f"vertex '{spec.id}' has unknown kind '{spec.kind}'")
        expected = VERTEX_LEGS[spec.kind]
        if len(spec.legs) != len(expected):
            raise DiagramError(f"vertex '{spec.id}' ({spec.kind}) needs {len(expected)} legs")
        out, residual, seen = [], Routing(), set()
        for attachment, species in zip(spec.legs, expected):
            if attachment in self.edges:
                e = self.edges[attachment]
                if e.end == spec.id and (e.id, "to") not in seen:
                    side, sign = "to", 1
                elif e.start == spec.id and (e.id, "from") not in seen:
                    side, sign = "from", -1
                else:
                    raise DiagramError(f"edge '{e.id}' is not attached to vertex '{spec.id}' there")
                seen.add((e.id, side))
                found, labels, momentum = e.species, self.end_labels[(e.id, side)], Routing().plus(e.momentum, sign)
            elif attachment in self.externals:
                x = self.externals[attachment]
                self.used_externals.append(x.id)
                found, labels, momentum = x.species, x.indices, x.momentum
            else:
                raise DiagramError(f"vertex '{spec.id}' refers to unknown leg '{attachment}'")
            if _leg_species(found) != species:
                raise DiagramError(f"vertex '{spec.id}' expects a {species} leg, '{attachment}' is {found}")
            out.append((labels, momentum))
            residual = residual.plus(momentum)
        return out, residual


def _routing_builder(combination: Combination):
    def build(atom):
        return Expression.sum(Expression.of(make_atom(name, atom.indices), coeff=sympy.Rational(value))
                              for name, value in combination)
    return build


def _route(expr: Expression, placeholder: str, combination: Combination) -> Expression:
    return substitute(expr, placeholder, _routing_builder(combination))


def _ghost_loops(diagram: Diagram) -> int:
    """Closed cycles made only of ghost edges between vertices"""
    vertex_ids = {v.id for v in diagram.vertices}
    ghost = [e for e in diagram.edges if e.species == GHOST]
    open_nodes = {n for e in ghost for n in (e.start, e.end) if n not in vertex_ids}
    adjacency: Dict[str, List[str]] = {}
    for e in ghost:
        adjacency.setdefault(e.start, []).append(e.end)
        adjacency.setdefault(e.end, []).append(e.start)
    seen, loops = set(), 0
    for node in adjacency:
        if node in seen:
            continue
        component, stack = set(), [node]
        while stack:
            current = stack.pop()
            if current in component:
                continue
            component.add(current)
            stack.extend(adjacency[current])
        seen |= component
        edges = [e for e in ghost if e.start in component]
        if not component & open_nodes and len(edges) == len(component):
            loops += 1
    return loops


def contract_diagram(diagram: Diagram, mode=ProjectorMode.SIMPLIFIED) -> Expression:
    """Product of all vertex and propagator factors with internal indices summed

    Inner loop dependence stays as monomials in the loop momenta; spacetime
    denominators are the formal symbols D_p_<edge>.
    """
    mode = ProjectorMode(mode)
    if diagram.loop_count != len(diagram.loops):
        raise DiagramError(
            f"diagram '{diagram.name}' has {diagram.loop_count} loops but declares {len(diagram.loops)}")
    if diagram.loops and mode == ProjectorMode.FULL:
        raise DiagramError("the full inner projector is not polynomial in loop momenta")
    assembly = _Assembly(diagram)
    sign = (-1) ** _ghost_loops(diagram)
    factors = []
    for spec in diagram.vertices:
        legs, residual = assembly.legs(spec)
        if not residual.is_zero:
            raise MomentumConservationError(spec.id, str(residual))
        placeholders = [Leg(labels[-1], labels[0] if len(labels) == 2 else None, f"p{n}", f"P{n}")
                        for n, (labels, _) in enumerate(legs, start=1)]
        v = vertex(spec.kind, placeholders, spec.variant, stray=assembly.stray())
        expected = set(v.indices)
        for term in v.expression.terms:
            if term.externals() != expected:
                raise DanglingIndexError(f"vertex '{spec.id}'", term.externals() ^ expected)
        expr = v.expression
        for leg, (_, momentum) in zip(placeholders, legs):
            expr = _route(expr, leg.momentum, momentum.spacetime)
            expr = _route(expr, leg.inner_momentum, momentum.inner)
        factors.append(expr)
    for e in diagram.edges:
        ends = []
        for side in ("from", "to"):
            labels = assembly.end_labels[(e.id, side)]
            ends.append(Leg(labels[-1], labels[0] if len(labels) == 2 else None))
        prop = propagator(e.species, diagram.gauge_parameter, mode, ends, "p", "P", tag=e.id)
        expr = _route(_route(prop.expression, "p", e.momentum.spacetime), "P", e.momentum.inner)
        factors.append(expr)
    unused = set(assembly.externals) - set(assembly.used_externals)
    if unused:
        raise DiagramError(f"external legs {sorted(unused)} are not attached")

    # η factors are eliminated before canonical ordering sees them
    total = Expression.scalar(sign)
    for expr in factors:
        total = total * expr
    try:
        total = contract_metric(total)
    except IndexContractionError as e:
        raise DanglingIndexError(f"diagram '{diagram.name}'", []) from e
    expected = diagram.external_labels
    for term in total.terms:
        if term.externals() != expected:
            raise DanglingIndexError(f"diagram '{diagram.name}'", term.externals() ^ expected)
    logger.info("Contracted diagram %s: %d terms", diagram.name, len(total.terms))
    return total


def contract_diagrams(diagrams: Sequence[Diagram], mode=ProjectorMode.SIMPLIFIED,
                      workers: Optional[int] = None) -> List[Expression]:
    """Contract independent diagrams concurrently, results in input order"""
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda d: contract_diagram(d, mode), diagrams))
