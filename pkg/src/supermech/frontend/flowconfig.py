"""Flow path configuration files.

Plain text: a `params` line naming the free parameters (t0 first), one
waypoint per line as comma-separated values, `steps <N>`, then initial
state lines `generator = <value>` where the value is a sum of terms
`scalar*g<k>*...` over the odd basis slots g1..gn (scalars accept a
trailing `j` for the imaginary part).
"""
from __future__ import annotations

import re

from ..errors import ModelSyntaxError
from ..numeric_flow import GrassmannValue, PathSpec

_VALUE_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?)"
    r"|(?P<gen>g\d+)|(?P<op>[*+-]))")

_NAME = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)(?:\[(\d+)\])?$")


def _tokenize_value(text, line_no):
    pos = 0
    out = []
    while pos < len(text):
        m = _VALUE_TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:].strip()
            if not rest:
                break
            raise ModelSyntaxError(f"bad value token {rest!r}", line_no, pos + 1)
        if m.lastgroup == "num":
            out.append(("num", complex(m.group("num"))))
        elif m.lastgroup == "gen":
            out.append(("gen", int(m.group("gen")[1:])))
        else:
            out.append(("op", m.group("op")))
        pos = m.end()
    return out


def parse_value(text, n, line_no=0):
    """Parse a Lambda-value literal into a GrassmannValue of Lambda_n."""
    tokens = _tokenize_value(text, line_no)
    if not tokens:
        raise ModelSyntaxError("empty value", line_no, 1)
    total = GrassmannValue(n)
    pos = 0

    def term():
        nonlocal pos
        sign = 1.0
        while pos < len(tokens) and tokens[pos] == ("op", "-"):
            sign = -sign
            pos += 1
        if pos < len(tokens) and tokens[pos] == ("op", "+"):
            pos += 1
        factors = []
        expect_factor = True
        while pos < len(tokens):
            kind, value = tokens[pos]
            if kind == "op" and value == "*":
                pos += 1
                expect_factor = True
                continue
            if kind == "op":
                break
            if not expect_factor:
                break
            factors.append((kind, value))
            pos += 1
            expect_factor = False
        if not factors:
            raise ModelSyntaxError("expected a term", line_no, 1)
        acc = GrassmannValue.body_value(n, sign)
        for kind, value in factors:
            if kind == "num":
                acc = acc.scaled(value)
            else:
                acc = acc * GrassmannValue.generator(n, value)
        return acc

    total = total + term()
    while pos < len(tokens):
        kind, value = tokens[pos]
        if kind != "op" or value not in "+-":
            raise ModelSyntaxError(f"expected + or - between terms", line_no, 1)
        if value == "+":
            pos += 1
        total = total + term()
    return total


def max_generator_index(text):
    return max((int(m.group()[1:]) for m in re.finditer(r"g\d+", text)), default=0)


def parse_path_config(text, elaborated, hj_system):
    """Parse waypoints, steps and the initial state for a flow run."""
    lines = [(no + 1, raw.split("#", 1)[0].strip())
             for no, raw in enumerate(text.splitlines())]
    lines = [(no, line) for no, line in lines if line]
    if not lines or not lines[0][1].startswith("params"):
        raise ModelSyntaxError("flow config must start with a params line", 1, 1)
    no0, header = lines[0]
    names = header.split()[1:]
    if not names or names[0] != "t0":
        raise ModelSyntaxError("first flow parameter must be t0", no0, 1)
    params = [hj_system.t0]
    for name in names[1:]:
        m = _NAME.match(name)
        if m is None:
            raise ModelSyntaxError(f"bad parameter name {name!r}", no0, 1)
        gen = elaborated.lookup(m.group(1), int(m.group(2)) if m.group(2) else None)
        params.append(gen)

    waypoints = []
    steps = None
    assignments = []
    for no, line in lines[1:]:
        if line.startswith("steps"):
            steps = int(line.split()[1])
            continue
        if "=" in line:
            target, value = line.split("=", 1)
            assignments.append((no, target.strip(), value.strip()))
            continue
        if steps is not None:
            raise ModelSyntaxError("waypoints must precede steps", no, 1)
        try:
            waypoints.append(tuple(float(x) for x in line.split(",")))
        except ValueError:
            raise ModelSyntaxError(f"bad waypoint line {line!r}", no, 1) from None
    if steps is None:
        raise ModelSyntaxError("flow config misses a steps line", 1, 1)
    path = PathSpec(tuple(params), tuple(waypoints), steps)

    n = max(elaborated.n_odd,
            max((max_generator_index(v) for _, _, v in assignments), default=0))
    init = {}
    for no, target, value in assignments:
        m = _NAME.match(target)
        if m is None:
            raise ModelSyntaxError(f"bad generator name {target!r}", no, 1)
        gen = elaborated.lookup(m.group(1), int(m.group(2)) if m.group(2) else None)
        init[gen] = parse_value(value, n, no)

    model = elaborated.model
    zero = GrassmannValue(n)
    for q in model.coordinates:
        init.setdefault(q, zero)
        init.setdefault(model.momentum(q), zero)
    for i, p in enumerate(params):
        if p is hj_system.t0:
            continue
        init.setdefault(p, GrassmannValue.body_value(n, waypoints[0][i]))
    return path, init
