"""Text file formats for cocycles, paths, bigons, and surfaces.

The grammar is line-based.  A file is a sequence of sections

    [base]                  dimension, lower, upper, periodic
    [crossed_module]        name = BA:U1 | EG:SU2 | ...
    [patch i]               box = lo... ; hi...   A<k>, B<jk>, psi entries
    [overlap i j]           g, phi<k> entries
    [triple i j k]          f entry

with `key = value` lines and '#' comments.  Lie-algebra-valued coefficients
use the expression language over x1..xn with basis names E1..Ek; group-valued
entries are written `exp(<algebra expression>)`, and `1` denotes the identity.
Path, bigon and surface files hold per-coordinate expressions over t, (s,t)
and the polygon coordinates (u,v) respectively::

    [path]                  [bigon]                [surface]
    x1 = t                  x1 = t                 genus = 1
    x2 = 0.5                x2 = s                 cells = 64
                                                   x1 = 0.5 - 0.5*u + 0.5*v
                                                   x2 = 0.5 - 0.5*u - 0.5*v

Parse errors report the offending line and section.
"""

from __future__ import annotations

import itertools
import re

import numpy as np

from . import lie_core as lc
from .cocycle import DifferentialCocycle
from .cover import Box, BoxCover
from .crossed_module import crossed_module
from .expressions import ExpressionError, compile_expression
from .fields import BoxChart, Form, MapField
from .holonomy import FundamentalBigon, build_fundamental_bigon
from .transport import Bigon, Path


class ParseError(ValueError):
    pass


_SECTION = re.compile(r"^\[([a-z_]+)((?:\s+\d+)*)\]$")


def _sections(text: str, where: str):
    """Yield (name, indices, dict of key -> (value, line_no))."""
    current = None
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _SECTION.match(line)
        if m:
            indices = tuple(int(v) for v in m.group(2).split()) if m.group(2).strip() else ()
            current = (m.group(1), indices, {})
            out.append(current)
            continue
        if "=" not in line:
            raise ParseError(f"{where}:{lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise ParseError(f"{where}:{lineno}: entry outside any section")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in current[2]:
            raise ParseError(f"{where}:{lineno}: duplicate key {key!r} in [{current[0]}]")
        current[2][key] = (value, lineno)
    return out


def _floats(value: str, where: str = "", lineno: int = 0):
    try:
        return [float(v) for v in value.replace(",", " ").split()]
    except ValueError as err:
        raise ParseError(f"{where}:{lineno}: expected numbers, got {value!r}") from err


def _int(value: str, where: str, lineno: int) -> int:
    try:
        return int(value)
    except ValueError as err:
        raise ParseError(f"{where}:{lineno}: expected an integer, got {value!r}") from err


def _group_entry(src: str, variables, group, where, lineno):
    """Group-valued entry: '1' or 'exp(<algebra expression>)'."""
    src = src.strip()
    if src == "1":
        return lambda x: np.eye(group.dim, dtype=complex)
    m = re.match(r"^exp\((.*)\)$", src, re.DOTALL)
    if not m:
        raise ParseError(f"{where}:{lineno}: group entry must be '1' or 'exp(...)'")
    basis = [e.matrix for e in group.basis]
    if not basis:
        raise ParseError(f"{where}:{lineno}: exp() entry for a discrete group")
    try:
        fn = compile_expression(m.group(1), variables, basis)
    except ExpressionError as err:
        raise ParseError(f"{where}:{lineno}: {err}") from err

    def evaluator(x):
        return lc.exp(lc.AlgebraElement(fn(x), group)).matrix
    return evaluator


def load_cocycle(path: str) -> DifferentialCocycle:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return parse_cocycle(text, where=path)


def parse_cocycle(text: str, where: str = "<string>") -> DifferentialCocycle:
    sections = _sections(text, where)
    chart = None
    cm = None
    variables = None
    patches, patch_data = [], {}
    overlap_data, triple_data = {}, {}

    for name, idx, entries in sections:
        if name == "base":
            dim = _int(entries["dimension"][0], where, entries["dimension"][1])
            lower = _floats(entries["lower"][0], where, entries["lower"][1])
            upper = _floats(entries["upper"][0], where, entries["upper"][1])
            periodic = [v.lower() in ("true", "1", "yes")
                        for v in entries.get("periodic", ("", 0))[0].split()] or [False] * dim
            if len(lower) != dim or len(upper) != dim or len(periodic) != dim:
                raise ParseError(f"{where}: [base] lengths do not match dimension {dim}")
            chart = BoxChart(tuple(lower), tuple(upper), tuple(periodic))
            variables = [f"x{k + 1}" for k in range(dim)]
        elif name == "crossed_module":
            cm = crossed_module(entries["name"][0])
        elif name == "patch":
            if chart is None or cm is None:
                raise ParseError(f"{where}: [patch] before [base]/[crossed_module]")
            (i,) = idx
            box_val, lineno = entries["box"]
            parts = box_val.split(";")
            if len(parts) != 2:
                raise ParseError(f"{where}:{lineno}: box needs 'lo... ; hi...'")
            while len(patches) <= i:
                patches.append(None)
            patches[i] = Box(tuple(_floats(parts[0], where, lineno)),
                             tuple(_floats(parts[1], where, lineno)))
            patch_data[i] = entries
        elif name == "overlap":
            overlap_data[tuple(idx)] = entries
        elif name == "triple":
            triple_data[tuple(idx)] = entries
        elif name in ("path", "bigon", "surface"):
            raise ParseError(f"{where}: [{name}] does not belong in a cocycle file")
        else:
            raise ParseError(f"{where}: unknown section [{name}]")

    if chart is None or cm is None or not patches or any(p is None for p in patches):
        raise ParseError(f"{where}: need [base], [crossed_module] and contiguous [patch i]")
    cover = BoxCover(chart, patches)

    def algebra_form(entries, prefix, group, degree):
        table = {}
        basis = [e.matrix for e in group.basis]
        for key, (value, lineno) in entries.items():
            if not key.startswith(prefix) or key == "psi" or key in ("box", "g", "f"):
                continue
            digits = key[len(prefix):]
            if not digits.isdigit():
                continue
            J = tuple(int(ch) - 1 for ch in digits)
            if len(J) != degree or list(J) != sorted(set(J)):
                raise ParseError(f"{where}:{lineno}: bad component key {key!r}")
            if not basis:
                raise ParseError(f"{where}:{lineno}: {key!r} set for a trivial algebra")
            try:
                table[J] = compile_expression(value, variables, basis)
            except ExpressionError as err:
                raise ParseError(f"{where}:{lineno}: {err}") from err
        if not table:
            return None
        return Form.from_components(chart, group, degree, table)

    A, B, psi, g, phi, f = {}, {}, {}, {}, {}, {}
    for i, entries in patch_data.items():
        a_form = algebra_form(entries, "A", cm.G, 1)
        if a_form is not None:
            A[i] = a_form
        b_form = algebra_form(entries, "B", cm.H, 2)
        if b_form is not None:
            B[i] = b_form
        if "psi" in entries:
            value, lineno = entries["psi"]
            psi[i] = MapField(chart, cm.H,
                              _group_entry(value, variables, cm.H, where, lineno))
    for pair, entries in overlap_data.items():
        if len(pair) != 2 or not pair[0] < pair[1]:
            raise ParseError(f"{where}: [overlap {' '.join(map(str, pair))}] "
                             "indices must be increasing")
        if "g" in entries:
            value, lineno = entries["g"]
            g[pair] = MapField(chart, cm.G,
                               _group_entry(value, variables, cm.G, where, lineno))
        phi_form = algebra_form(entries, "phi", cm.H, 1)
        if phi_form is not None:
            phi[pair] = phi_form
    for trip, entries in triple_data.items():
        if len(trip) != 3 or not trip[0] < trip[1] < trip[2]:
            raise ParseError(f"{where}: [triple ...] indices must be increasing")
        if "f" in entries:
            value, lineno = entries["f"]
            f[trip] = MapField(chart, cm.H,
                               _group_entry(value, variables, cm.H, where, lineno))
    return DifferentialCocycle(cm, cover, A=A, B=B, psi=psi, g=g, phi=phi, f=f)


def _coordinate_functions(entries, variables, dim, where):
    fns = []
    for k in range(dim):
        key = f"x{k + 1}"
        if key not in entries:
            raise ParseError(f"{where}: missing coordinate entry {key!r}")
        value, lineno = entries[key]
        try:
            fns.append(compile_expression(value, variables))
        except ExpressionError as err:
            raise ParseError(f"{where}:{lineno}: {err}") from err
    return fns


def load_path(path: str, chart: BoxChart) -> Path:
    with open(path, "r", encoding="utf-8") as fh:
        sections = _sections(fh.read(), path)
    for name, _, entries in sections:
        if name == "path":
            fns = _coordinate_functions(entries, ["t"], chart.dim, path)
            return Path(chart, lambda t: np.array([fn([t]) for fn in fns]))
    raise ParseError(f"{path}: no [path] section")


def load_bigon(path: str, chart: BoxChart) -> Bigon:
    with open(path, "r", encoding="utf-8") as fh:
        sections = _sections(fh.read(), path)
    for name, _, entries in sections:
        if name == "bigon":
            fns = _coordinate_functions(entries, ["s", "t"], chart.dim, path)
            return Bigon(chart, lambda s, t: np.array([fn([s, t]) for fn in fns]))
    raise ParseError(f"{path}: no [bigon] section")


def load_surface(path: str, chart: BoxChart):
    """Returns (phi, FundamentalBigon, cells)."""
    with open(path, "r", encoding="utf-8") as fh:
        sections = _sections(fh.read(), path)
    for name, _, entries in sections:
        if name == "surface":
            genus = _int(entries.get("genus", ("1", 0))[0], path,
                         entries.get("genus", ("1", 0))[1])
            cells = _int(entries.get("cells", ("64", 0))[0], path,
                         entries.get("cells", ("64", 0))[1])
            fns = _coordinate_functions(entries, ["u", "v"], chart.dim, path)

            def phi(p):
                return np.array([fn([p[0], p[1]]) for fn in fns])
            return phi, build_fundamental_bigon(genus), cells
    raise ParseError(f"{path}: no [surface] section")
