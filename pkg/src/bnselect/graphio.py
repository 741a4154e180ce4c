"""Reading and writing graph descriptions.

Text format, one statement per line, `#` starting a comment:

    node <name> states=<k>                        plain observed node
    node <name> states=<k> role=selection value=<v>
    node <name> states=<k> role=conditioning
    a -> b                                        directed edge
    a -- b                                        undirected edge

States are counted from zero, so ``value=0`` picks a node's first state.
Nodes must be declared before any edge mentions them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .graphs import NODE_NAME, ConditionalDag, Dag, GraphError, Pdag

ROLES = ("selection", "conditioning")


class ParseError(ValueError):
    """Malformed graph description; `.line` holds the 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class NodeDecl:
    name: str
    states: int
    role: str | None = None
    value: int | None = None


@dataclass(frozen=True)
class ParsedGraph:
    """A graph description plus per-node state counts and roles."""

    node_decls: tuple[NodeDecl, ...]
    directed: tuple[tuple[str, str], ...]
    undirected: tuple[tuple[str, str], ...]

    @property
    def names(self):
        return tuple(d.name for d in self.node_decls)

    def decl(self, name) -> NodeDecl:
        for d in self.node_decls:
            if d.name == name:
                return d
        raise KeyError(name)

    @property
    def selection_nodes(self):
        return tuple(d.name for d in self.node_decls if d.role == "selection")

    @property
    def observed_nodes(self):
        return tuple(d.name for d in self.node_decls if d.role is None)

    def selection_values(self) -> dict:
        return {d.name: d.value for d in self.node_decls if d.role == "selection"}

    def cardinalities(self) -> dict:
        return {d.name: d.states for d in self.node_decls}

    def to_dag(self) -> Dag:
        if self.undirected:
            raise GraphError("description has undirected edges; not a DAG")
        return Dag(self.names, self.directed)

    def to_pdag(self) -> Pdag:
        return Pdag(self.names, self.directed, self.undirected)

    def to_conditional_dag(self) -> ConditionalDag:
        if self.undirected:
            raise GraphError("description has undirected edges")
        fixed = [d.name for d in self.node_decls if d.role == "conditioning"]
        rand = [d.name for d in self.node_decls if d.role != "conditioning"]
        return ConditionalDag(rand, fixed, self.directed)


def _parse_node(tokens, lineno) -> NodeDecl:
    if len(tokens) < 2:
        raise ParseError("node line needs a name", lineno)
    name = tokens[1]
    if not NODE_NAME.match(name):
        raise ParseError(f"invalid node name {name!r}", lineno)
    fields = {}
    for tok in tokens[2:]:
        key, sep, val = tok.partition("=")
        if not sep or key not in ("states", "role", "value"):
            raise ParseError(f"unrecognized field {tok!r}", lineno)
        if key in fields:
            raise ParseError(f"repeated field {key!r}", lineno)
        fields[key] = val
    if "states" not in fields:
        raise ParseError(f"node {name} is missing states=<k>", lineno)
    try:
        states = int(fields["states"])
    except ValueError:
        raise ParseError(f"states must be an integer, got {fields['states']!r}",
                         lineno) from None
    if states < 2:
        raise ParseError(f"node {name} needs at least 2 states", lineno)
    role = fields.get("role")
    if role is not None and role not in ROLES:
        raise ParseError(f"unknown role {role!r}", lineno)
    value = None
    if "value" in fields:
        if role != "selection":
            raise ParseError("value= is only valid with role=selection", lineno)
        try:
            value = int(fields["value"])
        except ValueError:
            raise ParseError(f"value must be an integer, got {fields['value']!r}",
                             lineno) from None
        if not 0 <= value < states:
            raise ParseError(
                f"value {value} out of range for {states} states", lineno)
    elif role == "selection":
        raise ParseError("role=selection requires value=<v>", lineno)
    return NodeDecl(name, states, role, value)


def parse_graph(text: str) -> ParsedGraph:
    decls = []
    names = set()
    directed = []
    undirected = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if tokens[0] == "node":
            decl = _parse_node(tokens, lineno)
            if decl.name in names:
                raise ParseError(f"duplicate node {decl.name}", lineno)
            names.add(decl.name)
            decls.append(decl)
        elif len(tokens) == 3 and tokens[1] in ("->", "--"):
            a, arrow, b = tokens
            for end in (a, b):
                if end not in names:
                    raise ParseError(f"edge mentions undeclared node {end}", lineno)
            (directed if arrow == "->" else undirected).append((a, b))
        else:
            raise ParseError(f"cannot parse {line!r}", lineno)
    return ParsedGraph(tuple(decls), tuple(directed), tuple(undirected))


def load_graph(path) -> ParsedGraph:
    return parse_graph(Path(path).read_text())


def format_graph(pg: ParsedGraph) -> str:
    lines = []
    for d in pg.node_decls:
        parts = [f"node {d.name}", f"states={d.states}"]
        if d.role is not None:
            parts.append(f"role={d.role}")
        if d.value is not None:
            parts.append(f"value={d.value}")
        lines.append(" ".join(parts))
    lines.extend(f"{a} -> {b}" for a, b in pg.directed)
    lines.extend(f"{a} -- {b}" for a, b in pg.undirected)
    return "\n".join(lines) + "\n"


def to_json_dict(pg: ParsedGraph) -> dict:
    nodes = []
    for d in pg.node_decls:
        entry = {"name": d.name, "states": d.states}
        if d.role is not None:
            entry["role"] = d.role
        if d.value is not None:
            entry["value"] = d.value
        nodes.append(entry)
    return {
        "nodes": nodes,
        "directed": [list(e) for e in pg.directed],
        "undirected": [list(e) for e in pg.undirected],
    }


def from_json_dict(data: dict) -> ParsedGraph:
    try:
        raw_nodes = data["nodes"]
    except (TypeError, KeyError):
        raise ParseError("expected an object with a 'nodes' list") from None
    decls = []
    for entry in raw_nodes:
        tokens = [f"states={entry['states']}"] if "states" in entry else []
        if "role" in entry:
            tokens.append(f"role={entry['role']}")
        if "value" in entry:
            tokens.append(f"value={entry['value']}")
        decls.append(_parse_node(["node", str(entry.get("name", ""))] + tokens,
                                 None))
    names = {d.name for d in decls}
    directed = []
    undirected = []
    for key, sink in (("directed", directed), ("undirected", undirected)):
        for pair in data.get(key, []):
            if len(pair) != 2 or not set(pair) <= names:
                raise ParseError(f"bad {key} edge {pair!r}")
            sink.append((pair[0], pair[1]))
    return ParsedGraph(tuple(decls), tuple(directed), tuple(undirected))


def load_graph_json(path) -> ParsedGraph:
    with open(path) as fh:
        return from_json_dict(json.load(fh))


def to_dot(g, highlight=()) -> str:
    """Graphviz text for any of the graph types; undirected edges get dir=none."""
    highlight = set(highlight)
    lines = ["digraph g {"]
    for v in g.nodes:
        attr = " [shape=box]" if v in highlight else ""
        lines.append(f"  {v}{attr};")
    if isinstance(g, Pdag):
        directed, undirected = g.directed_edges, g.undirected_edges
    else:
        directed, undirected = g.edges, ()
    for a, b in sorted(directed):
        lines.append(f"  {a} -> {b};")
    for a, b in sorted(undirected):
        lines.append(f"  {a} -> {b} [dir=none];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_cpts(path) -> dict:
    """Conditional tables from a JSON sidecar.

    Shape: ``{"X": {"given": ["A", "B"], "rows": [[...], ...]}}`` with one
    row per joint state of the given nodes, earlier given nodes varying
    slowest.  Value checking happens when a network is assembled.
    """
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ParseError("expected an object keyed by node name")
    out = {}
    for name, entry in data.items():
        try:
            given = tuple(entry["given"])
            rows = [list(map(float, row)) for row in entry["rows"]]
        except (TypeError, KeyError, ValueError):
            raise ParseError(f"bad table for node {name}") from None
        out[name] = {"given": given, "rows": rows}
    return out


def fixture_path(name: str) -> Path:
    """Path of a bundled example graph; accepts 'fig2' or 'fig2.graph'."""
    if not name.endswith(".graph"):
        name = name + ".graph"
    root = resources.files("bnselect").joinpath("fixtures")
    candidate = root.joinpath(name)
    if not candidate.is_file():
        known = ", ".join(sorted(p.name for p in root.iterdir()))
        raise FileNotFoundError(f"no fixture {name!r}; bundled: {known}")
    return Path(str(candidate))


def list_fixtures() -> list:
    root = resources.files("bnselect").joinpath("fixtures")
    return sorted(p.name[:-len(".graph")] for p in root.iterdir()
                  if p.name.endswith(".graph"))


def load_fixture(name: str) -> ParsedGraph:
    return parse_graph(fixture_path(name).read_text())
