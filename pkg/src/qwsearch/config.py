"""Experiment specs and their INI-style config files.

Grammar (``configparser`` syntax, ``#`` / ``;`` comments)::

    [experiment]
    name = fig2_solid                  ; optional, defaults to file stem

    [graph]
    family = grid                      ; grid | hypercube | complete | gadget | edgelist
    side = 50                          ; grid
    dim = 10                           ; hypercube
    k = 5                              ; complete
    block = 0-1 1-2 0-2                ; gadget: edges among marked vertices 0..b-1
    attachments = 2 1 3                ; gadget: links from each marked vertex
    clique_size = 5                    ; gadget
    path = graph.txt                   ; edgelist, relative to the config file

    [marked]
    vertices = 0,0 0,1                 ; grid takes x,y tokens; others take ids
    partition = 0,0 0,1 | 2,0 3,0      ; optional groups separated by '|'

    [run]
    steps = 100
    measure = overlap p_m residual     ; subset, order fixed as t,overlap,p_m,residual
    format = csv                       ; csv | json
    output = out/fig2_solid.csv        ; relative to the config file; optional
    norm_tol = 1e-10                   ; optional, max allowed | ||psi|| - 1 |

Gadget configs with no explicit ``vertices`` mark the block vertices.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .errors import QWSearchError
from .graphs import (Graph, build_clique_gadget, build_complete, build_hypercube,
                     build_torus_grid, from_edge_list, grid_vertex, read_edge_list)
from .stationary import MarkedConfig

FAMILIES = ("grid", "hypercube", "complete", "gadget", "edgelist")
MEASURES = ("overlap", "p_m", "residual")


class SpecError(QWSearchError, ValueError):
    """An experiment config is malformed or references an unconstructible graph."""


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    family: str
    graph_params: tuple[tuple[str, object], ...]
    marked: tuple[object, ...] = ()
    partition: tuple[tuple[object, ...], ...] | None = None
    steps: int = 100
    measures: tuple[str, ...] = ("overlap", "p_m")
    output: Path | None = None
    fmt: str = "csv"
    norm_tol: float | None = None
    base_dir: Path = field(default=Path("."), compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise SpecError(f"unknown graph family {self.family!r}; expected one of {FAMILIES}")
        if self.steps < 1:
            raise SpecError(f"steps must be >= 1, got {self.steps}")
        bad = [m for m in self.measures if m not in MEASURES]
        if bad:
            raise SpecError(f"unknown measures {bad}; expected a subset of {MEASURES}")
        if self.fmt not in ("csv", "json"):
            raise SpecError(f"unknown output format {self.fmt!r}")

    @property
    def params(self) -> dict:
        return dict(self.graph_params)

    def build_graph(self) -> tuple[Graph, MarkedConfig | None]:
        p = self.params
        try:
            if self.family == "grid":
                return build_torus_grid(int(p["side"])), None
            if self.family == "hypercube":
                return build_hypercube(int(p["dim"])), None
            if self.family == "complete":
                return build_complete(int(p["k"])), None
            if self.family == "gadget":
                return build_clique_gadget(p["block"], p["attachments"], int(p["clique_size"]))
            path = Path(p["path"])
            if not path.is_absolute():
                path = self.base_dir / path
            return from_edge_list(read_edge_list(path), params=(("path", p["path"]),)), None
        except KeyError as exc:
            raise SpecError(f"{self.name}: {self.family} graph needs parameter {exc}") from None
        except QWSearchError as exc:
            raise SpecError(f"{self.name}: cannot build graph: {exc}") from exc

    def _vertex_id(self, label) -> int:
        if self.family == "grid":
            side = int(self.params["side"])
            x, y = label
            if not (0 <= x < side and 0 <= y < side):
                raise SpecError(f"{self.name}: grid vertex {label} outside {side}x{side}")
            return grid_vertex(side, x, y)
        return int(label)

    def build(self) -> tuple[Graph, MarkedConfig]:
        """Construct the graph and the validated marked configuration."""
        graph, default_marked = self.build_graph()
        if self.marked:
            partition = None
            if self.partition is not None:
                partition = tuple(tuple(self._vertex_id(v) for v in g) for g in self.partition)
            marked = MarkedConfig(tuple(self._vertex_id(v) for v in self.marked), partition)
        elif default_marked is not None:
            marked = default_marked
        else:
            marked = MarkedConfig(())
        try:
            marked.validate(graph)
        except QWSearchError as exc:
            raise SpecError(f"{self.name}: {exc}") from exc
        return graph, marked

    def output_path(self) -> Path | None:
        if self.output is None:
            return None
        return self.output if self.output.is_absolute() else self.base_dir / self.output

    def metadata(self) -> dict:
        meta = {"name": self.name, "family": self.family}
        for k, v in self.graph_params:
            meta[k] = _fmt_value(v)
        meta["marked"] = " ".join(_fmt_label(v) for v in self.marked)
        if self.partition is not None:
            meta["partition"] = " | ".join(" ".join(_fmt_label(v) for v in g)
                                           for g in self.partition)
        meta["steps"] = str(self.steps)
        return meta


def _fmt_label(v) -> str:
    return f"{v[0]},{v[1]}" if isinstance(v, tuple) else str(v)


def _fmt_value(v) -> str:
    if isinstance(v, tuple) and v and isinstance(v[0], tuple):
        return " ".join(f"{a}-{b}" for a, b in v)
    if isinstance(v, tuple):
        return " ".join(str(x) for x in v)
    return str(v)


def _parse_label(tok: str, grid: bool):
    try:
        if grid:
            x, y = tok.split(",")
            return (int(x), int(y))
        return int(tok)
    except ValueError:
        kind = "x,y pair" if grid else "integer vertex id"
        raise SpecError(f"bad vertex {tok!r}: expected {kind}") from None


def _parse_ints(text: str, what: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(",", " ").split())
    except ValueError:
        raise SpecError(f"bad integer list for {what}: {text!r}") from None


def _parse_block(text: str) -> tuple[tuple[int, int], ...]:
    edges = []
    for tok in text.split():
        try:
            u, v = tok.split("-")
            edges.append((int(u), int(v)))
        except ValueError:
            raise SpecError(f"bad block edge {tok!r}: expected u-v") from None
    return tuple(edges)


def parse_spec(text: str, *, name: str = "experiment", base_dir: Path | str = ".") -> ExperimentSpec:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise SpecError(f"{name}: {exc}") from None
    if not cp.has_section("graph"):
        raise SpecError(f"{name}: missing [graph] section")
    name = cp.get("experiment", "name", fallback=name)
    g = cp["graph"]
    family = g.get("family", "").strip()
    params: list[tuple[str, object]] = []
    int_keys = {"grid": ("side",), "hypercube": ("dim",), "complete": ("k",),
                "gadget": ("clique_size",), "edgelist": ()}
    if family not in int_keys:
        raise SpecError(f"{name}: unknown graph family {family!r}; expected one of {FAMILIES}")
    for key in int_keys[family]:
        if key not in g:
            raise SpecError(f"{name}: {family} graph needs '{key}'")
        params.append((key, _parse_ints(g[key], key)[0]))
    if family == "gadget":
        for key in ("block", "attachments"):
            if key not in g:
                raise SpecError(f"{name}: gadget graph needs '{key}'")
        params.insert(0, ("attachments", _parse_ints(g["attachments"], "attachments")))
        params.insert(0, ("block", _parse_block(g["block"])))
    if family == "edgelist":
        if "path" not in g:
            raise SpecError(f"{name}: edgelist graph needs 'path'")
        params.append(("path", g["path"].strip()))

    grid = family == "grid"
    marked: tuple = ()
    partition = None
    if cp.has_section("marked"):
        m = cp["marked"]
        marked = tuple(_parse_label(t, grid) for t in m.get("vertices", "").split())
        if m.get("partition", "").strip():
            partition = tuple(tuple(_parse_label(t, grid) for t in grp.split())
                              for grp in m["partition"].split("|"))

    r = cp["run"] if cp.has_section("run") else {}
    try:
        steps = int(r.get("steps", "100"))
        norm_tol = float(r["norm_tol"]) if "norm_tol" in r else None
    except ValueError as exc:
        raise SpecError(f"{name}: {exc}") from None
    measures = tuple(r.get("measure", "overlap p_m").replace(",", " ").split())
    output = Path(r["output"].strip()) if r.get("output", "").strip() else None
    return ExperimentSpec(name=name, family=family, graph_params=tuple(params),
                          marked=marked, partition=partition, steps=steps,
                          measures=measures, output=output,
                          fmt=r.get("format", "csv").strip(), norm_tol=norm_tol,
                          base_dir=Path(base_dir))


def load_spec(path: str | Path) -> ExperimentSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from None
    return parse_spec(text, name=path.stem, base_dir=path.parent)


def load_suite(directory: str | Path) -> list[ExperimentSpec]:
    directory = Path(directory)
    if not directory.is_dir():
        raise SpecError(f"{directory} is not a directory")
    return [load_spec(p) for p in sorted(directory.glob("*.cfg"))]

