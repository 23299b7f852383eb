"""Command-line driver.

Each subcommand parses its input documents, calls one library operation and
prints a canonical text rendering on stdout. Exit codes: 0 success, 1 the
input is mathematically invalid (bad fan, rejected morphism, ...), 2 usage
or parse errors. Failures print one ``ERROR: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from . import bcs as bcs_mod
from . import polyhedral, presentation, resolution, stacky
from .bcs import BcsError, BcsStackyFan
from .docformat import (
    DocumentError,
    MorphismDocument,
    ParseError,
    format_group,
    format_matrix,
    format_names,
    format_point,
    format_vector,
    load,
    serialize,
    serialize_gerbe,
)
from .lattice import LatticeError
from .polyhedral import Fan, FanError
from .stacky import InvalidMorphism, StackyFan, StackyFanError


class UsageError(Exception):
    pass


class Invalid(Exception):
    """Mathematical invalidity; exit code 1."""


def _load(path: str):
    try:
        return load(path)
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _stacky(path: str) -> StackyFan:
    doc = _load(path)
    if not isinstance(doc, StackyFan):
        raise UsageError(f"{path}: expected a stacky-fan document")
    return doc


def _fan(path: str) -> Fan:
    doc = _load(path)
    if isinstance(doc, StackyFan):
        return doc.fan
    if not isinstance(doc, Fan):
        raise UsageError(f"{path}: expected a fan or stacky-fan document")
    return doc


def _bcs(path: str) -> BcsStackyFan:
    doc = _load(path)
    if not isinstance(doc, BcsStackyFan):
        raise UsageError(f"{path}: expected a bcs document")
    return doc


def _cone(fan: Fan, text: str) -> polyhedral.Cone:
    names = [n.strip() for n in text.split(",") if n.strip()]
    try:
        return fan.cone(names)
    except FanError as e:
        raise UsageError(str(e)) from None


def _fraction(q) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


# --- subcommands -------------------------------------------------------------


def cmd_validate(args) -> str:
    if args.batch:
        return _validate_batch(Path(args.batch))
    if not args.file:
        raise UsageError("validate needs FILE or --batch DIR")
    return serialize(_load(args.file))


def _validate_one(path: Path) -> tuple[str, bool]:
    try:
        load(path)
    except (ParseError, DocumentError, FanError, StackyFanError, BcsError, LatticeError) as e:
        return f"{path.name}: ERROR {e}", False
    return f"{path.name}: ok", True


def _validate_batch(directory: Path) -> str:
    if not directory.is_dir():
        raise UsageError(f"{directory} is not a directory")
    files = sorted(p for p in directory.iterdir() if p.is_file() and p.suffix in (".sf", ".fan", ".map", ".bcs"))
    # Files are independent; results are reported in sorted order.
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(_validate_one, files))
    text = "".join(line + "\n" for line, _ in results)
    if not all(ok for _, ok in results):
        print(text, end="")
        raise Invalid(f"{sum(not ok for _, ok in results)} of {len(results)} files invalid")
    return text


def cmd_member(args) -> str:
    sf = _stacky(args.file)
    point = tuple(args.coords)
    if len(point) != sf.lattice_rank:
        raise UsageError(f"point needs {sf.lattice_rank} coordinates, got {len(point)}")
    m = stacky.freenet_contains(sf, point)
    lines = [f"point: {format_point(point)}"]
    if m.cone is None:
        return "\n".join(lines + ["member: false", "reason: outside the support"]) + "\n"
    lines.append(f"cone: {format_names(m.cone.names)}")
    lines.append("coordinates: " + ", ".join(f"{n}={_fraction(q)}" for n, q in zip(m.cone.names, m.coordinates)))
    if m.contained:
        lines.append("member: true")
        lines.append("multiples: " + ", ".join(f"{n}={k}" for n, k in zip(m.cone.names, m.multiples)))
    else:
        lines.append("member: false")
        lines.append(f"reason: coordinate on {m.failing_ray} is not a multiple of level {sf.level(m.failing_ray)}")
    return "\n".join(lines) + "\n"


def cmd_hom(args) -> str:
    doc = _load(args.mapfile)
    if not isinstance(doc, MorphismDocument):
        raise UsageError(f"{args.mapfile}: expected a morphism document")
    try:
        m = stacky.validate_morphism(doc.matrix, doc.source, doc.target)
    except InvalidMorphism as e:
        raise Invalid(f"hom: {e}") from None
    lines = ["valid: true", f"matrix: {format_matrix(m.matrix)}"]
    for sigma in m.source.fan.cones:
        if sigma.rays:
            lines.append(f"cone: {format_names(sigma.names)} -> {format_names(m.cone_map[sigma.names])}")
    lines.append(f"isomorphism: {'true' if stacky.is_isomorphism(m) else 'false'}")
    return "\n".join(lines) + "\n"


def cmd_resolve(args) -> str:
    sf = _stacky(args.file)
    cone = _cone(sf.fan, args.cone)
    if not cone.rays:
        raise UsageError("resolve needs a nonzero cone")
    res = resolution.minimal_free_resolution(cone) if args.minimal else resolution.stacky_free_resolution(sf, cone)
    axes = resolution.ray_correspondence(res)
    lines = [
        f"cone: {format_names(cone.names)}",
        f"levels: {format_vector(res.levels)}",
        f"generators: [{','.join(format_vector(p) for p in res.monoid_generators)}]",
        f"image: {format_matrix(res.image)}",
        "axes: " + ", ".join(f"e{a + 1} -> {axes[a]}" for a in range(res.rank)),
        f"close: {'true' if resolution.is_close_submonoid(res.image_columns(), res.rank) else 'false'}",
    ]
    return "\n".join(lines) + "\n"


def cmd_hilbert(args) -> str:
    sf_or_fan = _load(args.file)
    fan = sf_or_fan.fan if isinstance(sf_or_fan, StackyFan) else sf_or_fan
    if not isinstance(fan, Fan):
        raise UsageError(f"{args.file}: expected a fan or stacky-fan document")
    cone = _cone(fan, args.cone)
    if not cone.rays:
        raise UsageError("hilbert needs a nonzero cone")
    gens = polyhedral.dual_cone_basis(cone) if args.dual else cone.generators
    basis = polyhedral.hilbert_basis(gens)
    lines = [
        f"cone: {format_names(cone.names)}",
        f"monoid: {'dual' if args.dual else 'cone'}",
        f"basis: [{','.join(format_vector(v) for v in basis)}]",
    ]
    return "\n".join(lines) + "\n"


def _character(c) -> str:
    return str(c[0]) if len(c) == 1 else format_point(c)


def cmd_present(args) -> str:
    sf = _stacky(args.file)
    cone = _cone(sf.fan, args.cone)
    p = presentation.local_quotient_presentation(sf, cone)
    lines = [
        f"cone: {format_names(cone.names)}",
        f"group: {format_group(p.group)}",
        "characters: " + ", ".join(f"{n} -> {_character(c)}" for n, c in zip(cone.names, p.characters)),
        f"map: {format_matrix(p.map_matrix)}" if cone.rays else "map: []",
    ]
    return "\n".join(lines) + "\n"


def cmd_stabilizer(args) -> str:
    sf = _stacky(args.file)
    cone = _cone(sf.fan, args.cone)
    return format_group(presentation.stabilizer_group(sf, cone)) + "\n"


def cmd_divisors(args) -> str:
    sf = _stacky(args.file)
    return "".join(f"{r.name}: {presentation.divisor_multiplicity(sf, r)}\n" for r in sf.fan.rays)


def cmd_cover(args) -> str:
    sf = _stacky(args.file)
    cover = presentation.canonical_cover(sf)
    text = serialize(stacky.canonical_freenet(cover.cover_fan, check_fan=False))
    axes = ", ".join(f"{c} -> {r.name}" for c, r in zip(cover.cover_ray_names, sf.fan.rays))
    return text + f"eta: {format_matrix(cover.eta)}\naxes: {axes}\n"


def _orders(text: str) -> dict[str, int]:
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"bad order {part!r}; expected ray=k")
        try:
            out[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"bad order {part!r}; expected ray=k") from None
    return out


def cmd_reconstruct(args) -> str:
    fan = _fan(args.fanfile)
    sf = stacky.reconstruct_from_stabilizers(fan, _orders(args.orders))
    return serialize(sf)


def cmd_bcs_reduce(args) -> str:
    framed, gerbe = bcs_mod.reduce_bcs(_bcs(args.file))
    return serialize(framed) + serialize_gerbe(gerbe)


def cmd_bcs_to_framed(args) -> str:
    return serialize(bcs_mod.bcs_to_framed(_bcs(args.file)))


def cmd_framed_to_bcs(args) -> str:
    return serialize(bcs_mod.framed_to_bcs(_stacky(args.file)))


@dataclass(frozen=True)
class Command:
    handler: Callable[[argparse.Namespace], str]
    operation: Callable
    help: str


COMMANDS: dict[str, Command] = {
    "validate": Command(cmd_validate, polyhedral.validate_fan, "parse and validate a document"),
    "member": Command(cmd_member, stacky.freenet_contains, "free-net membership of a point"),
    "hom": Command(cmd_hom, stacky.validate_morphism, "check a morphism of stacky fans"),
    "resolve": Command(cmd_resolve, resolution.stacky_free_resolution, "free resolution of a cone's dual monoid"),
    "hilbert": Command(cmd_hilbert, polyhedral.hilbert_basis, "Hilbert basis of a cone"),
    "present": Command(cmd_present, presentation.local_quotient_presentation, "local quotient presentation"),
    "stabilizer": Command(cmd_stabilizer, presentation.stabilizer_group, "stabilizer group of a cone"),
    "divisors": Command(cmd_divisors, presentation.divisor_multiplicity, "divisor multiplicities"),
    "cover": Command(cmd_cover, presentation.canonical_cover, "canonical smooth cover"),
    "reconstruct": Command(cmd_reconstruct, stacky.reconstruct_from_stabilizers, "stacky fan from stabilizer orders"),
    "bcs-reduce": Command(cmd_bcs_reduce, bcs_mod.reduce_bcs, "reduce a BCS stacky fan"),
    "bcs-to-framed": Command(cmd_bcs_to_framed, bcs_mod.bcs_to_framed, "reduced BCS fan to framed stacky fan"),
    "framed-to-bcs": Command(cmd_framed_to_bcs, bcs_mod.framed_to_bcs, "framed stacky fan to BCS fan"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stackyfan", description="Exact computations with stacky fans.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, cmd in COMMANDS.items():
        p = sub.add_parser(name, help=cmd.help)
        if name == "validate":
            p.add_argument("file", nargs="?")
            p.add_argument("--batch", metavar="DIR")
        elif name == "member":
            p.add_argument("file")
            p.add_argument("coords", nargs="+", type=int, metavar="X")
        elif name == "hom":
            p.add_argument("mapfile")
        elif name == "reconstruct":
            p.add_argument("fanfile")
            p.add_argument("--orders", required=True, metavar="RAY=K,...")
        else:
            p.add_argument("file")
        if name in ("resolve", "hilbert", "present", "stabilizer"):
            p.add_argument("--cone", required=True, metavar="NAMES", help="comma-separated ray names")
        if name == "resolve":
            p.add_argument("--minimal", action="store_true", help="ignore levels")
        if name == "hilbert":
            p.add_argument("--dual", action="store_true", help="use the dual monoid in M_sigma")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = COMMANDS[args.command].handler(args)
    except (UsageError, ParseError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2
    except Invalid as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1
    except (DocumentError, FanError, StackyFanError, BcsError, LatticeError) as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 1
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
