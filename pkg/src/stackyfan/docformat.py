"""Line-oriented text documents for fans, stacky fans, morphisms and BCS data.

The grammar is described in ``docs/FORMAT.md``. Every line is ``key: value``;
``#`` starts a comment. Values are whitespace-separated items, each an
integer, a name, a bracketed list, or ``name=item``.

:func:`serialize` always produces the canonical form: rays sorted by
generator, maximal cones only, fixed separators. Parsing that text gives
back an equal value.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, Union

from .bcs import BcsError, BcsStackyFan, GerbeData
from .lattice import FinAbGroup, IntMatrix, LatticeError, primitive_vector, vector_gcd
from .polyhedral import Fan, FanError, Ray
from .stacky import StackyFan, StackyFanError, StackyFanMorphism, make_stacky_fan


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, source: str | None = None):
        where = f"{source}:" if source else ""
        super().__init__(f"{where}line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class DocumentError(ValueError):
    """The document parsed but does not describe a valid object."""


@dataclass(frozen=True)
class MorphismDocument:
    matrix: IntMatrix
    source: StackyFan
    target: StackyFan


Document = Union[Fan, StackyFan, MorphismDocument, BcsStackyFan]


# --- tokenizing --------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>-?\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_.'-]*)|(?P<punct>[\[\],=]))")


@dataclass
class _Item:
    value: Any
    column: int
    key: str | None = None


class _ValueParser:
    def __init__(self, text: str, line: int, col0: int, source: str | None):
        self.text = text
        self.line = line
        self.col0 = col0
        self.source = source
        self.pos = 0
        self.tokens = self._tokenize()
        self.i = 0

    def _error(self, msg: str, column: int) -> ParseError:
        return ParseError(msg, self.line, column, self.source)

    def _tokenize(self):
        toks = []
        pos = 0
        text = self.text.rstrip()
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                col = self.col0 + pos + (len(text[pos:]) - len(text[pos:].lstrip()))
                raise self._error(f"unexpected character {text[pos:].lstrip()[:1]!r}", col)
            kind = m.lastgroup
            col = self.col0 + m.start(kind)
            toks.append((kind, m.group(kind), col))
            pos = m.end()
        return toks

    def _peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _next(self):
        tok = self._peek()
        if tok is None:
            raise self._error("unexpected end of line", self.col0 + len(self.text.rstrip()))
        self.i += 1
        return tok

    def _element(self):
        kind, text, col = self._next()
        if kind == "int":
            return int(text), col
        if kind == "name":
            return text, col
        if text == "[":
            out = []
            if self._peek() and self._peek()[1] == "]":
                self._next()
                return out, col
            while True:
                v, _ = self._element()
                out.append(v)
                kind2, text2, col2 = self._next()
                if text2 == "]":
                    return out, col
                if text2 != ",":
                    raise self._error(f"expected ',' or ']' but found {text2!r}", col2)
        raise self._error(f"unexpected {text!r}", col)

    def items(self) -> list[_Item]:
        out = []
        while self._peek() is not None:
            kind, text, col = self._peek()
            nxt = self.tokens[self.i + 1] if self.i + 1 < len(self.tokens) else None
            if kind == "name" and nxt is not None and nxt[1] == "=":
                self.i += 2
                v, _ = self._element()
                out.append(_Item(v, col, key=text))
            else:
                v, c = self._element()
                out.append(_Item(v, c))
        return out


@dataclass
class _Line:
    key: str
    items: list[_Item]
    line: int
    column: int
    raw: str


def _split_lines(text: str, source: str | None, offset: int = 0) -> list[_Line]:
    out = []
    for no, raw in enumerate(text.splitlines(), start=1 + offset):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        if body.strip() == "end":
            # Closes an inline block; only meaningful inside morphism documents.
            out.append(_Line("end", [], no, len(raw) - len(raw.lstrip()) + 1, "end"))
            continue
        if ":" not in body:
            col = len(raw) - len(raw.lstrip()) + 1
            raise ParseError("expected 'key: value'", no, col, source)
        key, value = body.split(":", 1)
        kcol = len(key) - len(key.lstrip()) + 1
        key = key.strip()
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_-]*", key):
            raise ParseError(f"bad key {key!r}", no, kcol, source)
        vcol = len(key) + (kcol - 1) + 2
        if key in ("source", "target"):
            # A path or "begin"; paths are not tokenized.
            items = [_Item(value.strip(), vcol + len(value) - len(value.lstrip()))]
        else:
            items = _ValueParser(value, no, vcol, source).items()
        out.append(_Line(key, items, no, kcol, value.strip()))
    return out


# --- helpers -----------------------------------------------------------------


class _Reader:
    def __init__(self, lines: list[_Line], source: str | None):
        self.lines = lines
        self.source = source

    def error(self, msg: str, line: _Line, item: _Item | None = None) -> ParseError:
        return ParseError(msg, line.line, item.column if item else line.column, self.source)

    def int_vector(self, item: _Item, line: _Line, length: int | None = None) -> tuple[int, ...]:
        v = item.value
        if not isinstance(v, list) or not all(isinstance(x, int) for x in v):
            raise self.error("expected an integer list like [1,0]", line, item)
        if length is not None and len(v) != length:
            raise self.error(f"expected {length} entries, got {len(v)}", line, item)
        return tuple(v)

    def integer(self, line: _Line) -> int:
        if len(line.items) != 1 or not isinstance(line.items[0].value, int):
            raise self.error(f"{line.key} expects a single integer", line, line.items[0] if line.items else None)
        return line.items[0].value

    def name_list(self, item: _Item, line: _Line) -> list[str]:
        v = item.value
        if not isinstance(v, list) or not all(isinstance(x, str) for x in v):
            raise self.error("expected a list of ray names like [r1,r2]", line, item)
        return v


def _kind(lines: list[_Line], reader: _Reader) -> str:
    if not lines or lines[0].key != "kind":
        line = lines[0] if lines else _Line("", [], 1, 1, "")
        raise reader.error("document must start with 'kind: ...'", line)
    first = lines[0]
    if len(first.items) != 1 or not isinstance(first.items[0].value, str):
        raise reader.error("kind expects one name", first)
    return first.items[0].value


def _parse_fan_lines(
    lines: list[_Line], reader: _Reader, *, allow_levels: bool, allow_beta: bool, rank_key: str = "rank"
):
    rank = None
    rays: list[tuple[_Line, str, tuple[int, ...], dict]] = []
    cones: list[tuple[_Line, list[str]]] = []
    other: list[_Line] = []
    for line in lines:
        if line.key == rank_key:
            if rank is not None:
                raise reader.error(f"{rank_key} given twice", line)
            rank = reader.integer(line)
            if rank < 0:
                raise reader.error(f"{rank_key} must be nonnegative", line, line.items[0])
        elif line.key == "ray":
            if rank is None:
                raise reader.error(f"'{rank_key}' must come before the rays", line)
            items = line.items
            if not items or items[0].key is not None or not isinstance(items[0].value, str):
                raise reader.error("ray expects a name first", line, items[0] if items else None)
            name = items[0].value
            attrs: dict[str, tuple[Any, _Item]] = {}
            for it in items[1:]:
                if it.key is None:
                    raise reader.error("ray attributes look like gen=[1,0]", line, it)
                if it.key in attrs:
                    raise reader.error(f"attribute {it.key} repeated", line, it)
                attrs[it.key] = it
            allowed = {"gen", "net"} | ({"level"} if allow_levels else set()) | ({"beta"} if allow_beta else set())
            for k, it in attrs.items():
                if k not in allowed:
                    raise reader.error(f"unknown ray attribute {k}", line, it)
            if ("gen" in attrs) == ("net" in attrs):
                raise reader.error(f"ray {name} needs exactly one of gen= or net=", line, items[0])
            if "net" in attrs and not allow_levels:
                raise reader.error("net= only makes sense for stacky fans", line, attrs["net"])
            if "net" in attrs and "level" in attrs:
                raise reader.error(f"ray {name}: net= already fixes the level", line, attrs["level"])
            vec_item = attrs.get("gen") or attrs["net"]
            vec = reader.int_vector(vec_item, line, rank)
            if not any(vec):
                raise DocumentError(f"ray {name}: zero generator")
            if "net" in attrs:
                level = vector_gcd(vec)
                gen = primitive_vector(vec)
            else:
                gen = vec
                if vector_gcd(vec) != 1:
                    raise DocumentError(
                        f"ray {name}: generator {list(vec)} is not primitive (use net= for a free-net generator)"
                    )
                level = None
                if "level" in attrs:
                    it = attrs["level"]
                    if not isinstance(it.value, int):
                        raise reader.error("level expects an integer", line, it)
                    level = it.value
            extra = {}
            if "beta" in attrs:
                extra["beta"] = attrs["beta"]
            rays.append((line, name, gen, {"level": level, **extra}))
        elif line.key == "cone":
            if len(line.items) != 1:
                raise reader.error("cone expects one list of ray names", line)
            cones.append((line, reader.name_list(line.items[0], line)))
        else:
            other.append(line)
    if rank is None:
        raise reader.error(f"missing '{rank_key}'", lines[0] if lines else _Line("", [], 1, 1, ""))
    try:
        fan = Fan.from_cones(rank, [Ray(g, n) for _, n, g, _ in rays], [c for _, c in cones])
    except FanError as e:
        raise DocumentError(str(e)) from None
    return fan, rays, other


def _reject_unknown(other: list[_Line], reader: _Reader, allowed: Sequence[str] = ()) -> None:
    for line in other:
        if line.key not in allowed:
            raise reader.error(f"unknown key {line.key!r}", line)


def _check_fan(fan: Fan) -> None:
    from .polyhedral import validate_fan

    report = validate_fan(fan)
    if not report.valid:
        raise DocumentError("invalid fan: " + "; ".join(report.problems))


def _build_stacky(fan: Fan, rays) -> StackyFan:
    _check_fan(fan)
    levels = {}
    for _, name, _, attrs in rays:
        level = attrs["level"]
        levels[name] = 1 if level is None else level
    try:
        return make_stacky_fan(fan, levels, check_fan=False)
    except StackyFanError as e:
        raise DocumentError(str(e)) from None


# --- parsing -----------------------------------------------------------------


def parse_document(text: str, *, source: str | None = None, base_dir: Path | None = None) -> Document:
    """Parse any document kind; fan-only documents give a :class:`Fan`."""
    return _parse_lines(_split_lines(text, source), text, source, base_dir)


def _parse_lines(lines: list[_Line], text: str, source, base_dir) -> Document:
    reader = _Reader(lines, source)
    kind = _kind(lines, reader)
    body = lines[1:]
    if kind == "fan":
        fan, _, other = _parse_fan_lines(body, reader, allow_levels=False, allow_beta=False)
        _reject_unknown(other, reader)
        _check_fan(fan)
        return fan
    if kind == "stacky-fan":
        fan, rays, other = _parse_fan_lines(body, reader, allow_levels=True, allow_beta=False)
        _reject_unknown(other, reader)
        return _build_stacky(fan, rays)
    if kind == "bcs":
        return _parse_bcs(body, reader)
    if kind == "morphism":
        return _parse_morphism(text, lines, reader, base_dir)
    raise reader.error(f"unknown document kind {kind!r}", lines[0], lines[0].items[0])


def parse_stacky_fan(text: str, *, source: str | None = None) -> StackyFan:
    doc = parse_document(text, source=source)
    if isinstance(doc, Fan):
        raise DocumentError("expected a stacky-fan document, got a plain fan")
    if not isinstance(doc, StackyFan):
        raise DocumentError(f"expected a stacky-fan document, got {type(doc).__name__}")
    return doc


def parse_fan(text: str, *, source: str | None = None) -> Fan:
    """Parse a fan; stacky-fan documents are accepted and their levels dropped."""
    doc = parse_document(text, source=source)
    if isinstance(doc, StackyFan):
        return doc.fan
    if not isinstance(doc, Fan):
        raise DocumentError(f"expected a fan document, got {type(doc).__name__}")
    return doc


def _parse_bcs(body: list[_Line], reader: _Reader) -> BcsStackyFan:
    ngen = None
    relations = []
    fan_lines = []
    for line in body:
        if line.key == "generators":
            ngen = reader.integer(line)
        elif line.key == "relation":
            if ngen is None:
                raise reader.error("'generators' must come before relations", line)
            if len(line.items) != 1:
                raise reader.error("relation expects one integer list", line)
            relations.append(reader.int_vector(line.items[0], line, ngen))
        else:
            fan_lines.append(line)
    if ngen is None:
        raise reader.error("missing 'generators'", body[0] if body else _Line("", [], 1, 1, ""))
    fan, rays, other = _parse_fan_lines(fan_lines, reader, allow_levels=False, allow_beta=True)
    _reject_unknown(other, reader)
    _check_fan(fan)
    beta_of = {}
    for line, name, _, attrs in rays:
        if "beta" not in attrs:
            raise reader.error(f"ray {name} needs beta=[...] in Z^{ngen}", line)
        beta_of[name] = reader.int_vector(attrs["beta"], line, ngen)
    beta = IntMatrix.from_columns([beta_of[r.name] for r in fan.rays], ngen)
    try:
        bcs = BcsStackyFan(ngen, IntMatrix.from_columns(relations, ngen), fan, beta)
        bcs.levels()
    except (BcsError, LatticeError) as e:
        raise DocumentError(str(e)) from None
    return bcs


def _parse_morphism(text: str, lines: list[_Line], reader: _Reader, base_dir: Path | None) -> MorphismDocument:
    raw = text.splitlines()
    matrix = None
    ends: dict[str, StackyFan] = {}
    skip_until = 0
    for line in lines[1:]:
        if line.line <= skip_until:
            continue
        if line.key == "matrix":
            if len(line.items) != 1 or not isinstance(line.items[0].value, list):
                raise reader.error("matrix expects a list of integer rows", line)
            rows = line.items[0].value
            if not rows or not all(isinstance(r, list) and all(isinstance(x, int) for x in r) for r in rows):
                raise reader.error("matrix expects a list of integer rows like [[1,0],[0,1]]", line, line.items[0])
            if len({len(r) for r in rows}) != 1:
                raise reader.error("matrix rows have different lengths", line, line.items[0])
            matrix = IntMatrix.from_rows(rows)
        elif line.key in ("source", "target"):
            if line.key in ends:
                raise reader.error(f"{line.key} given twice", line)
            if line.raw == "begin":
                # Inline document up to a line reading "end".
                start = line.line
                stop = next((k for k in range(start, len(raw)) if raw[k].strip() == "end"), None)
                if stop is None:
                    raise reader.error(f"inline {line.key} has no closing 'end'", line)
                inner = "\n".join(raw[start:stop])
                inner_lines = _split_lines(inner, reader.source, offset=start)
                doc = _parse_lines(inner_lines, inner, reader.source, base_dir)
                skip_until = stop + 1
            else:
                path = Path(line.raw)
                if base_dir is not None and not path.is_absolute():
                    path = base_dir / path
                try:
                    inner = path.read_text(encoding="utf-8")
                except OSError as e:
                    raise reader.error(f"cannot read {line.key} file {line.raw}: {e.strerror}", line, line.items[0] if line.items else None)
                doc = parse_document(inner, source=str(path), base_dir=path.parent)
            if not isinstance(doc, StackyFan):
                raise DocumentError(f"{line.key} must be a stacky-fan document")
            ends[line.key] = doc
        else:
            raise reader.error(f"unknown key {line.key!r}", line)
    for key in ("source", "target"):
        if key not in ends:
            raise reader.error(f"missing '{key}'", lines[0])
    if matrix is None:
        raise reader.error("missing 'matrix'", lines[0])
    src, tgt = ends["source"], ends["target"]
    if matrix.shape != (tgt.lattice_rank, src.lattice_rank):
        raise DocumentError(
            f"matrix is {matrix.nrows}x{matrix.ncols} but must be "
            f"{tgt.lattice_rank}x{src.lattice_rank} to map the source lattice to the target lattice"
        )
    return MorphismDocument(matrix, src, tgt)


# --- serializing -------------------------------------------------------------


def format_vector(v: Sequence[int]) -> str:
    return "[" + ",".join(str(x) for x in v) + "]"


def format_point(v: Sequence[int]) -> str:
    return "(" + ",".join(str(x) for x in v) + ")"


def format_matrix(m: IntMatrix) -> str:
    return "[" + ",".join(format_vector(r) for r in m.rows) + "]"


def format_names(names: Sequence[str]) -> str:
    return "[" + ",".join(names) + "]"


def format_group(g: FinAbGroup) -> str:
    return g.describe()


def _fan_body(fan: Fan, ray_attrs) -> list[str]:
    out = [f"rank: {fan.lattice_rank}"]
    for r in fan.rays:
        out.append(f"ray: {r.name} gen={format_vector(r.generator)}{ray_attrs(r)}")
    for c in fan.maximal_cones():
        if c.rays:
            out.append(f"cone: {format_names(c.names)}")
    return out


def serialize_fan(fan: Fan) -> str:
    return "\n".join(["kind: fan", *_fan_body(fan, lambda r: "")]) + "\n"


def serialize_stacky_fan(sf: StackyFan) -> str:
    lines = ["kind: stacky-fan", *_fan_body(sf.fan, lambda r: f" level={sf.level(r.name)}")]
    return "\n".join(lines) + "\n"


def serialize_bcs(bcs: BcsStackyFan) -> str:
    lines = ["kind: bcs", f"generators: {bcs.group_generators}"]
    lines += [f"relation: {format_vector(c)}" for c in bcs.relations.columns]
    index = {r.name: i for i, r in enumerate(bcs.fan.rays)}
    lines += _fan_body(bcs.fan, lambda r: f" beta={format_vector(bcs.beta.column(index[r.name]))}")
    return "\n".join(lines) + "\n"


def serialize_morphism(matrix: IntMatrix, source: StackyFan, target: StackyFan) -> str:
    lines = ["kind: morphism", f"matrix: {format_matrix(matrix)}", "source: begin"]
    lines += serialize_stacky_fan(source).splitlines()
    lines += ["end", "target: begin"]
    lines += serialize_stacky_fan(target).splitlines()
    lines.append("end")
    return "\n".join(lines) + "\n"


def serialize_gerbe(g: GerbeData) -> str:
    return "".join(f"gerbe: w={w} b={format_vector(b)}\n" for w, b in g.factors)


def serialize(obj: Document | StackyFanMorphism) -> str:
    if isinstance(obj, StackyFan):
        return serialize_stacky_fan(obj)
    if isinstance(obj, Fan):
        return serialize_fan(obj)
    if isinstance(obj, BcsStackyFan):
        return serialize_bcs(obj)
    if isinstance(obj, (MorphismDocument, StackyFanMorphism)):
        return serialize_morphism(obj.matrix, obj.source, obj.target)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def load(path: str | Path) -> Document:
    path = Path(path)
    return parse_document(path.read_text(encoding="utf-8"), source=str(path), base_dir=path.parent)
