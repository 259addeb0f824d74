"""Line-oriented system and distribution files.

System file (``#`` starts a comment, one statement per line)::

    components 4                           # optional; defaults to the largest index
    structure min(x1, x4, max(x2, x3))     # flat form

or a flat form given by path sets (for structures such as the bridge where
a component would otherwise appear twice)::

    components 5
    paths {1, 4} {2, 5} {1, 3, 5} {2, 3, 4}

or the modular form::

    components 4
    module A {1, 4} = series(x1, x4)
    module B {2, 3} = parallel(x2, x3)
    organizer series(A, B)
    distribution law.dist                  # optional, relative to this file

Distribution file, one of::

    order-distribution n=4
    1 2 3 4  1/18                          # failure order (first failure first), mass
    ...                                    # omitted orders have mass 0

    uniform n=4

    product n=4                            # independent blocks, i.i.d. inside a block
    block 1 2 : 1/2 1/2                    # weights of the shared unit intervals
    block 3 4 : 1/4 3/4

Component indices are 1-based in every file format.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Union

from ..errors import ParseError, SignatureError, ValidationError
from ..quality import OrderDistribution, block_product
from ..structure import ModularSystem, Partition, StructureFunction, projection
from .parser import Component, Expr, KOutOfN, Name, Parallel, Series, atoms, parse_structure


@dataclass
class ModuleSpec:
    name: str
    components: tuple[int, ...]
    expr: Expr
    line: int


@dataclass
class SystemSpec:
    n: int | None = None
    structure: Expr | None = None
    paths: list[tuple[int, ...]] | None = None
    modules: list[ModuleSpec] = field(default_factory=list)
    organizer: Expr | None = None
    distribution: Path | None = None

    @property
    def is_modular(self) -> bool:
        return bool(self.modules)


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].rstrip()


_MODULE = re.compile(r"module\s+([A-Za-z_][A-Za-z0-9_]*)\s*\{([^}]*)\}\s*=\s*(.*)$")


def _index_list(text: str, line: int, column: int) -> tuple[int, ...]:
    items = [t for t in re.split(r"[\s,]+", text.strip()) if t]
    try:
        values = tuple(int(t) for t in items)
    except ValueError:
        raise ParseError(f"component list {text.strip()!r} must hold integers", line, column) from None
    if any(v < 1 for v in values):
        raise ParseError("component indices start at 1", line, column)
    return values


def _path_sets(text: str, line: int, column: int) -> list[tuple[int, ...]]:
    if not re.fullmatch(r"(\s*\{[^{}]*\})+\s*", text):
        raise ParseError("paths expects one or more {i, j, ...} groups", line, column)
    paths = []
    for m in re.finditer(r"\{([^{}]*)\}", text):
        indices = _index_list(m.group(1), line, column + m.start(1))
        if not indices:
            raise ParseError("empty path set", line, column + m.start())
        paths.append(indices)
    return paths


def parse_system(text: str, base: Path | None = None, source: str | None = None) -> SystemSpec:
    spec = SystemSpec()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        stripped = line.lstrip()
        if not stripped:
            continue
        indent = len(line) - len(stripped)
        keyword, _, rest = stripped.partition(" ")
        rest_col = indent + len(keyword) + 2 + (len(rest) - len(rest.lstrip()))
        rest = rest.strip()
        try:
            if keyword == "components":
                if spec.n is not None:
                    raise ParseError("duplicate components line", lineno, 1)
                if not rest.isdigit() or int(rest) < 1:
                    raise ParseError("components expects a positive integer", lineno, rest_col)
                spec.n = int(rest)
            elif keyword == "structure":
                if spec.structure is not None:
                    raise ParseError("duplicate structure line", lineno, 1)
                spec.structure = parse_structure(rest, lineno, rest_col)
            elif keyword == "paths":
                if spec.paths is not None:
                    raise ParseError("duplicate paths line", lineno, 1)
                spec.paths = _path_sets(rest, lineno, rest_col)
            elif keyword == "module":
                m = _MODULE.match(stripped)
                if not m:
                    raise ParseError("expected 'module NAME {i, j, ...} = expr'", lineno, indent + 1)
                comps = _index_list(m.group(2), lineno, indent + m.start(2) + 1)
                expr = parse_structure(m.group(3), lineno, indent + m.start(3) + 1)
                spec.modules.append(ModuleSpec(m.group(1), comps, expr, lineno))
            elif keyword == "organizer":
                if spec.organizer is not None:
                    raise ParseError("duplicate organizer line", lineno, 1)
                spec.organizer = parse_structure(rest, lineno, rest_col)
            elif keyword == "distribution":
                if not rest:
                    raise ParseError("distribution expects a file path", lineno, rest_col)
                path = Path(rest)
                spec.distribution = path if base is None or path.is_absolute() else base / path
            else:
                raise ParseError(f"unknown statement {keyword!r}", lineno, indent + 1)
        except ParseError as exc:
            if exc.source is None and source is not None:
                raise ParseError(exc.message, exc.line, exc.column, source) from None
            raise
    forms = sum(x for x in (spec.structure is not None, spec.paths is not None, bool(spec.modules)))
    if forms == 0:
        raise ParseError("system file needs a structure, paths or module lines", 1, 1, source)
    if forms > 1 or (spec.organizer is not None and not spec.modules):
        raise ParseError("use exactly one of structure, paths or modules with an organizer", 1, 1, source)
    if spec.modules and spec.organizer is None:
        raise ParseError("modular system file needs an organizer line", 1, 1, source)
    return spec


def load_system(path: str | Path) -> SystemSpec:
    path = Path(path)
    return parse_system(path.read_text(), base=path.parent, source=str(path))


# -- elaboration ------------------------------------------------------------


def expression_table(expr: Expr, variables: dict[object, int], n: int) -> StructureFunction:
    """Truth table of ``expr`` where atom ``a`` is variable ``variables[a]`` of ``n``.

    Evaluated bit-parallel: each subexpression is a packed truth table.
    """
    everything = (1 << (1 << n)) - 1

    def table(e: Expr) -> int:
        if isinstance(e, (Component, Name)):
            return projection(n, variables[e]).table
        children = [table(a) for a in e.args]
        if isinstance(e, Series):
            out = everything
            for c in children:
                out &= c
            return out
        if isinstance(e, Parallel):
            out = 0
            for c in children:
                out |= c
            return out
        # at_least[j]: at least j children work
        at_least = [everything] + [0] * e.k
        for c in children:
            for j in range(e.k, 0, -1):
                at_least[j] |= at_least[j - 1] & c
        return at_least[e.k]

    return StructureFunction(n, table(expr))


def _check_components(expr: Expr, allowed: set[int], where: str) -> None:
    for atom in atoms(expr):
        if isinstance(atom, Name):
            raise ValidationError(f"{where}: module name {atom.name!r} used where components are expected")
        if atom.index not in allowed:
            raise ValidationError(f"{where}: component x{atom.index} is not available here")


def elaborate(spec: SystemSpec) -> Union[ModularSystem, StructureFunction]:
    """Build the structure function (flat form) or the modular system."""
    try:
        return _elaborate(spec)
    except ValidationError:
        raise
    except SignatureError as exc:
        raise ValidationError(str(exc)) from exc


def _elaborate(spec: SystemSpec):
    if spec.paths is not None:
        n = spec.n if spec.n is not None else max(i for p in spec.paths for i in p)
        return StructureFunction.from_path_sets(n, [[i - 1 for i in p] for p in spec.paths])
    if not spec.is_modular:
        used = [a.index for a in atoms(spec.structure) if isinstance(a, Component)]
        n = spec.n if spec.n is not None else max(used, default=0)
        _check_components(spec.structure, set(range(1, n + 1)), "structure")
        variables = {Component(i): i - 1 for i in range(1, n + 1)}
        return expression_table(spec.structure, variables, n)

    listed = [i for m in spec.modules for i in m.components]
    n = spec.n if spec.n is not None else max(listed)
    if sorted(listed) != list(range(1, n + 1)):
        raise ValidationError(f"module component lists must partition 1..{n} exactly")
    names = [m.name for m in spec.modules]
    if len(set(names)) != len(names):
        raise ValidationError("module names must be unique")
    blocks = []
    modules = []
    for m in spec.modules:
        block = tuple(sorted(m.components))
        _check_components(m.expr, set(block), f"module {m.name} (line {m.line})")
        variables = {Component(i): t for t, i in enumerate(block)}
        modules.append(expression_table(m.expr, variables, len(block)))
        blocks.append(tuple(i - 1 for i in block))
    for atom in atoms(spec.organizer):
        if not isinstance(atom, Name) or atom.name not in names:
            label = atom.name if isinstance(atom, Name) else f"x{atom.index}"
            raise ValidationError(f"organizer refers to {label!r}, which is not a module name")
    unused = set(names) - {a.name for a in atoms(spec.organizer)}
    if unused:
        raise ValidationError(f"organizer must use every module; missing {', '.join(sorted(unused))}")
    variables = {Name(name): j for j, name in enumerate(names)}
    organizer = expression_table(spec.organizer, variables, len(names))
    return ModularSystem(Partition(tuple(blocks)), tuple(modules), organizer)


# -- partitions and distributions -------------------------------------------


def parse_partition(text: str, n: int | None = None) -> Partition:
    """``"1,2|3,4"`` (1-based) to a 0-based Partition."""
    blocks = []
    for part in text.split("|"):
        items = [t for t in re.split(r"[\s,]+", part.strip()) if t]
        if not items:
            raise ParseError(f"empty block in partition {text!r}")
        try:
            blocks.append(tuple(int(t) - 1 for t in items))
        except ValueError:
            raise ParseError(f"partition {text!r} must list integers") from None
    try:
        partition = Partition(tuple(blocks))
    except SignatureError as exc:
        raise ValidationError(f"partition {text!r}: {exc}") from exc
    if n is not None and partition.n != n:
        raise ValidationError(f"partition {text!r} covers {partition.n} components, expected {n}")
    return partition


def format_partition(partition: Partition) -> str:
    return "|".join(",".join(str(i + 1) for i in b) for b in partition.blocks)


_HEADER = re.compile(r"(order-distribution|uniform|product)\s+n\s*=\s*(\d+)$")


def _fraction(text: str, line: int) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{text!r} is not a rational number", line, 1) from None


def parse_distribution(text: str, source: str | None = None) -> OrderDistribution:
    lines = [(i, _strip_comment(raw).strip()) for i, raw in enumerate(text.splitlines(), start=1)]
    lines = [(i, l) for i, l in lines if l]
    if not lines:
        raise ParseError("empty distribution file", 1, 1, source)
    head_line, head = lines[0]
    m = _HEADER.match(head)
    if not m:
        raise ParseError("expected 'order-distribution n=N', 'uniform n=N' or 'product n=N'", head_line, 1, source)
    kind, n = m.group(1), int(m.group(2))
    body = lines[1:]
    try:
        if kind == "uniform":
            if body:
                raise ParseError("uniform distributions take no body", body[0][0], 1, source)
            return OrderDistribution.uniform(n)
        if kind == "order-distribution":
            masses: dict[tuple[int, ...], Fraction] = {}
            for lineno, l in body:
                parts = l.split()
                if len(parts) != n + 1:
                    raise ParseError(f"expected {n} components and a mass", lineno, 1, source)
                try:
                    order = tuple(int(t) - 1 for t in parts[:n])
                except ValueError:
                    raise ParseError("failure order must list integers", lineno, 1, source) from None
                if sorted(order) != list(range(n)):
                    raise ValidationError(f"line {lineno}: not an ordering of 1..{n}")
                if order in masses:
                    raise ValidationError(f"line {lineno}: order listed twice")
                masses[order] = _fraction(parts[n], lineno)
            return OrderDistribution(n, masses)
        blocks, weights = [], []
        for lineno, l in body:
            bm = re.fullmatch(r"block\s+([\d\s,]+):\s*(.+)", l)
            if not bm:
                raise ParseError("expected 'block i j ... : w1 w2 ...'", lineno, 1, source)
            blocks.append(tuple(i - 1 for i in _index_list(bm.group(1), lineno, 7)))
            weights.append([_fraction(t, lineno) for t in bm.group(2).split()])
        partition = Partition(tuple(blocks))
        if partition.n != n:
            raise ValidationError(f"product blocks cover {partition.n} components, header says {n}")
        return block_product(partition, weights)
    except ParseError as exc:
        if exc.source is None and source is not None:
            raise ParseError(exc.message, exc.line, exc.column, source) from None
        raise
    except ValidationError:
        raise
    except SignatureError as exc:
        raise ValidationError(str(exc)) from exc


def load_distribution(path: str | Path) -> OrderDistribution:
    path = Path(path)
    return parse_distribution(path.read_text(), source=str(path))


def format_distribution(dist: OrderDistribution) -> str:
    lines = [f"order-distribution n={dist.n}"]
    for order in sorted(dist.masses):
        lines.append(" ".join(str(i + 1) for i in order) + f"  {dist.masses[order]}")
    return "\n".join(lines) + "\n"
