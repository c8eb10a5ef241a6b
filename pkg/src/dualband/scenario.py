"""Scenario files: a sectioned key = value text format driving the CLI.

A scenario describes one dual-band space, an optional operator symbol,
a task list, and numeric overrides.  Symbol values use a small
expression grammar: mono(k), poly([c...], offset), blaschke([a...], c),
rat(num, den, shift), atomic([(xi, mu), ...]), combined with *, +, -,
conj(...), and complex literals written with an i or j suffix.

Sections and keys:

    [scenario]  name
    [space]     theta, phi, psi, aplus, aminus
    [operator]  g
    [tasks]     run            comma list or "all"
    [lambdas]   values         comma list of complex numbers
    [rfactors]  values         comma list of symbol expressions
    [numerics]  grid, tol, cutoff

Unknown sections or keys are rejected.  Parse errors carry line and
column positions.
"""

import hashlib
import os
import re
from dataclasses import dataclass, field

from .errors import ScenarioError
from .symbols import InnerFunction, LaurentSymbol
from .dual_band import build_dualband

TASK_NAMES = ("validate", "spectrum", "kernel", "factorize", "resolvent",
              "norm")

_SECTION_KEYS = {
    "scenario": ("name",),
    "space": ("theta", "phi", "psi", "aplus", "aminus"),
    "operator": ("g",),
    "tasks": ("run",),
    "lambdas": ("values",),
    "rfactors": ("values",),
    "numerics": ("grid", "tol", "cutoff"),
}


# ---------------------------------------------------------------------------
# expression tokenizer

_TOKEN_RE = re.compile(r"""
    (?P<num>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?[ij]?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct>[()\[\],+\-*])
  | (?P<ws>\s+)
""", re.VERBOSE)


def _tokenize(text, line):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ScenarioError(
                f"line {line}, col {pos + 1}: unexpected character "
                f"{text[pos]!r}")
        if m.lastgroup == "num":
            raw = m.group("num")
            if raw[-1] in "ij":
                val = complex(0.0, float(raw[:-1]))
            else:
                val = complex(float(raw), 0.0)
            toks.append(("num", val, pos + 1))
        elif m.lastgroup == "name":
            toks.append(("name", m.group("name"), pos + 1))
        elif m.lastgroup == "punct":
            toks.append((m.group("punct"), m.group("punct"), pos + 1))
        pos = m.end()
    toks.append(("end", None, len(text) + 1))
    return toks


class _Parser:
    """Recursive-descent reader for one expression string."""

    def __init__(self, text, line, mode):
        self.toks = _tokenize(text, line)
        self.i = 0
        self.line = line
        self.mode = mode  # "inner" or "symbol"

    def peek(self):
        return self.toks[self.i][0]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.next()
        if tok[0] != kind:
            raise ScenarioError(
                f"line {self.line}, col {tok[2]}: expected {kind!r}, "
                f"got {tok[1]!r}")
        return tok

    def fail(self, msg):
        col = self.toks[self.i][2]
        raise ScenarioError(f"line {self.line}, col {col}: {msg}")

    # expr := term (('+' | '-') term)*
    def expr(self):
        val = self.term()
        while self.peek() in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            val = _add(val, rhs, self) if op == "+" else _sub(val, rhs, self)
        return val

    # term := factor ('*' factor)*
    def term(self):
        val = self.factor()
        while self.peek() == "*":
            self.next()
            val = _mul(val, self.factor(), self)
        return val

    def factor(self):
        if self.peek() == "-":
            self.next()
            return _neg(self.factor(), self)
        return self.atom()

    def atom(self):
        kind = self.peek()
        if kind == "num":
            return self.next()[1]
        if kind == "(":
            self.next()
            val = self.expr()
            self.expect(")")
            return val
        if kind == "[":
            return self.list_literal()
        if kind == "name":
            name = self.next()[1]
            if name in ("i", "j"):
                return complex(0.0, 1.0)
            if self.peek() != "(":
                self.fail(f"unknown name {name!r}")
            self.next()
            args = []
            if self.peek() != ")":
                args.append(self.argument())
                while self.peek() == ",":
                    self.next()
                    args.append(self.argument())
            self.expect(")")
            return self.call(name, args)
        self.fail("expected a value")

    def argument(self):
        if self.peek() == "[":
            return self.list_literal()
        return self.expr()

    def list_literal(self):
        self.expect("[")
        items = []
        if self.peek() != "]":
            items.append(self.list_item())
            while self.peek() == ",":
                self.next()
                items.append(self.list_item())
        self.expect("]")
        return items

    def list_item(self):
        # a '(' inside a list may open a (xi, mu) pair or a grouped expr
        if self.peek() == "(":
            self.next()
            first = self.expr()
            if self.peek() == ",":
                self.next()
                second = self.expr()
                self.expect(")")
                return (first, second)
            self.expect(")")
            return first
        return self.expr()

    def call(self, name, args):
        if self.mode == "inner":
            return _inner_call(name, args, self)
        return _symbol_call(name, args, self)


def _as_int(val, parser, what):
    if not isinstance(val, complex) or val.imag != 0 or \
            val.real != int(val.real):
        parser.fail(f"{what} must be an integer")
    return int(val.real)


def _scalar_list(vals, parser, what):
    out = []
    for v in vals:
        if not isinstance(v, complex):
            parser.fail(f"{what} entries must be numbers")
        out.append(v)
    return out


def _symbol_call(name, args, parser):
    if name == "mono":
        if len(args) != 1:
            parser.fail("mono takes one argument")
        return LaurentSymbol.monomial(_as_int(args[0], parser, "mono power"))
    if name == "poly":
        if len(args) not in (1, 2) or not isinstance(args[0], list):
            parser.fail("poly takes a coefficient list and optional offset")
        coeffs = _scalar_list(args[0], parser, "poly coefficient")
        offset = _as_int(args[1], parser, "poly offset") if len(args) == 2 \
            else 0
        return LaurentSymbol.from_coeffs(coeffs, offset)
    if name == "rat":
        if len(args) not in (2, 3) or not isinstance(args[0], list) \
                or not isinstance(args[1], list):
            parser.fail("rat takes numerator and denominator lists and an "
                        "optional shift")
        num = _scalar_list(args[0], parser, "rat numerator")
        den = _scalar_list(args[1], parser, "rat denominator")
        shift = _as_int(args[2], parser, "rat shift") if len(args) == 3 else 0
        return LaurentSymbol.rational(num, den, shift)
    if name == "blaschke":
        return _inner_blaschke(args, parser).as_symbol()
    if name == "conj":
        if len(args) != 1:
            parser.fail("conj takes one argument")
        val = args[0]
        if isinstance(val, complex):
            return val.conjugate()
        if isinstance(val, LaurentSymbol):
            return val.conj()
        parser.fail("conj needs a number or a symbol")
    if name == "atomic":
        parser.fail("atomic inner functions have no coefficient form here")
    parser.fail(f"unknown constructor {name!r}")


def _inner_blaschke(args, parser):
    if len(args) not in (1, 2) or not isinstance(args[0], list):
        parser.fail("blaschke takes a zero list and an optional constant")
    zeros = _scalar_list(args[0], parser, "blaschke zero")
    const = args[1] if len(args) == 2 else complex(1.0)
    if not isinstance(const, complex):
        parser.fail("blaschke constant must be a number")
    try:
        return InnerFunction.blaschke(zeros, const)
    except ValueError as exc:
        parser.fail(str(exc))


def _inner_call(name, args, parser):
    if name == "mono":
        if len(args) != 1:
            parser.fail("mono takes one argument")
        return InnerFunction.monomial(_as_int(args[0], parser, "mono power"))
    if name == "blaschke":
        return _inner_blaschke(args, parser)
    if name == "atomic":
        if len(args) != 1 or not isinstance(args[0], list):
            parser.fail("atomic takes a list of (point, mass) pairs")
        points = []
        for item in args[0]:
            if not (isinstance(item, tuple) and len(item) == 2):
                parser.fail("atomic entries must be (point, mass) pairs")
            xi, mu = item
            if not (isinstance(xi, complex) and isinstance(mu, complex)):
                parser.fail("atomic entries must be numeric pairs")
            if mu.imag != 0 or mu.real <= 0:
                parser.fail("atomic mass must be a positive real")
            points.append((xi, mu.real))
        return InnerFunction.atomic(points)
    parser.fail(f"{name!r} does not name an inner function")


def _mul(a, b, parser):
    if isinstance(a, complex) and isinstance(b, complex):
        return a * b
    if isinstance(a, InnerFunction) or isinstance(b, InnerFunction):
        if isinstance(a, InnerFunction) and isinstance(b, InnerFunction):
            return InnerFunction.product([a, b])
        parser.fail("inner functions only combine with other inner functions")
    a, b = _promote(a, parser), _promote(b, parser)
    return a * b


def _add(a, b, parser):
    if isinstance(a, complex) and isinstance(b, complex):
        return a + b
    if isinstance(a, InnerFunction) or isinstance(b, InnerFunction):
        parser.fail("inner functions cannot be added")
    return _promote(a, parser) + _promote(b, parser)


def _sub(a, b, parser):
    return _add(a, _neg(b, parser), parser)


def _neg(a, parser):
    if isinstance(a, complex):
        return -a
    if isinstance(a, LaurentSymbol):
        return a * LaurentSymbol.constant(-1.0)
    parser.fail("cannot negate this value")


def _promote(val, parser):
    if isinstance(val, LaurentSymbol):
        return val
    if isinstance(val, complex):
        return LaurentSymbol.constant(val)
    parser.fail("expected a number or a symbol")


def parse_expression(text, line=1, mode="symbol"):
    """Evaluate one expression string; mode selects the constructor set."""
    p = _Parser(text, line, mode)
    val = p.expr()
    if p.peek() != "end":
        p.fail("trailing input after expression")
    return val


def _parse_complex(text, line):
    val = parse_expression(text, line, mode="symbol")
    if not isinstance(val, complex):
        raise ScenarioError(f"line {line}: expected a number, got a symbol")
    return val


def _split_top_level(text):
    """Split on commas that are not nested in brackets or parens."""
    parts = []
    depth = 0
    start = 0
    for k, ch in enumerate(text):
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append(text[start:k])
            start = k + 1
    parts.append(text[start:])
    return [p.strip() for p in parts if p.strip()]


# ---------------------------------------------------------------------------
# scenario file

@dataclass
class Scenario:
    name: str
    theta: InnerFunction
    phi: object = None
    psi: object = None
    aplus: object = None
    aminus: object = None
    g: object = None
    tasks: tuple = ()
    lambdas: tuple = ()
    rfactors: tuple = ()
    grid: int = None
    tol: float = None
    cutoff: int = None
    digest: str = ""
    path: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def realized(self):
        return self.phi is not None


def _read_sections(text):
    """Raw pass: {(section, key): (value_text, line_number)}."""
    entries = {}
    section = None
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ScenarioError(f"line {ln}: unterminated section header")
            section = stripped[1:-1].strip()
            if section not in _SECTION_KEYS:
                raise ScenarioError(f"line {ln}: unknown section "
                                    f"[{section}]")
            continue
        if section is None:
            raise ScenarioError(f"line {ln}: key outside any section")
        if "=" not in line:
            raise ScenarioError(f"line {ln}: expected key = value")
        key, value = line.split("=", 1)
        key = key.strip()
        if key not in _SECTION_KEYS[section]:
            raise ScenarioError(f"line {ln}: unknown key {key!r} in "
                                f"[{section}]")
        slot = (section, key)
        if slot in entries:
            raise ScenarioError(f"line {ln}: duplicate key {key!r} in "
                                f"[{section}]")
        entries[slot] = (value.strip(), ln)
    return entries


def parse_scenario_text(text, name_hint="scenario", path=""):
    entries = _read_sections(text)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()

    def take(section, key):
        return entries.pop((section, key), (None, None))

    name_text, _ = take("scenario", "name")
    name = name_text or name_hint

    theta_text, theta_line = take("space", "theta")
    if theta_text is None:
        raise ScenarioError("scenario is missing [space] theta")
    theta = parse_expression(theta_text, theta_line, mode="inner")

    fields = {}
    for key in ("phi", "psi", "aplus", "aminus"):
        text_k, line_k = take("space", key)
        fields[key] = None if text_k is None else \
            parse_expression(text_k, line_k, mode="symbol")
    realized = fields["phi"] is not None or fields["psi"] is not None
    if realized and (fields["phi"] is None or fields["psi"] is None):
        raise ScenarioError("realized spaces need both phi and psi")
    if not realized and (fields["aplus"] is None or fields["aminus"] is None):
        raise ScenarioError("a space needs phi/psi or aplus/aminus")

    g_text, g_line = take("operator", "g")
    g = None if g_text is None else parse_expression(g_text, g_line,
                                                     mode="symbol")

    tasks_text, tasks_line = take("tasks", "run")
    if tasks_text is None:
        raise ScenarioError("scenario is missing [tasks] run")
    tasks = []
    for item in _split_top_level(tasks_text):
        if item == "all":
            tasks.extend(TASK_NAMES)
        elif item in TASK_NAMES:
            tasks.append(item)
        else:
            raise ScenarioError(f"line {tasks_line}: unknown task {item!r}")
    seen = set()
    tasks = tuple(t for t in tasks if not (t in seen or seen.add(t)))

    lam_text, lam_line = take("lambdas", "values")
    lambdas = tuple(_parse_complex(p, lam_line)
                    for p in _split_top_level(lam_text)) if lam_text else ()

    r_text, r_line = take("rfactors", "values")
    rfactors = ()
    if r_text:
        rfactors = tuple(parse_expression(p, r_line, mode="symbol")
                         for p in _split_top_level(r_text))
        for r in rfactors:
            if not isinstance(r, LaurentSymbol):
                raise ScenarioError(f"line {r_line}: rfactors must be "
                                    "symbols")

    grid_text, grid_line = take("numerics", "grid")
    tol_text, tol_line = take("numerics", "tol")
    cut_text, cut_line = take("numerics", "cutoff")
    grid = None
    if grid_text is not None:
        grid = _as_int_text(grid_text, grid_line, "grid")
    tol = None
    if tol_text is not None:
        tol = _parse_complex(tol_text, tol_line)
        if tol.imag != 0 or tol.real <= 0:
            raise ScenarioError(f"line {tol_line}: tol must be positive")
        tol = tol.real
    cutoff = None
    if cut_text is not None:
        cutoff = _as_int_text(cut_text, cut_line, "cutoff")

    if entries:
        (section, key), (_, ln) = next(iter(entries.items()))
        raise ScenarioError(f"line {ln}: unused key {key!r} in [{section}]")

    scn = Scenario(name=name, theta=theta, phi=fields["phi"],
                   psi=fields["psi"], aplus=fields["aplus"],
                   aminus=fields["aminus"], g=g, tasks=tasks,
                   lambdas=lambdas, rfactors=rfactors, grid=grid, tol=tol,
                   cutoff=cutoff, digest=digest, path=path)
    check_prerequisites(scn)
    return scn


def _as_int_text(text, line, what):
    val = _parse_complex(text, line)
    if val.imag != 0 or val.real != int(val.real) or val.real <= 0:
        raise ScenarioError(f"line {line}: {what} must be a positive "
                            "integer")
    return int(val.real)


def check_prerequisites(scn, tasks=None):
    """Reject task lists whose inputs the scenario does not carry."""
    tasks = scn.tasks if tasks is None else tasks
    for task in tasks:
        if task not in TASK_NAMES:
            raise ScenarioError(f"unknown task {task!r}")
    for task in ("factorize", "resolvent"):
        if task in tasks and not scn.lambdas:
            raise ScenarioError(f"task {task!r} needs a [lambdas] section")
    for task in ("validate", "norm"):
        if task in tasks and scn.g is None:
            raise ScenarioError(f"task {task!r} needs an [operator] g")
        if task in tasks and not scn.realized:
            raise ScenarioError(f"task {task!r} needs a realized space "
                                "(phi and psi)")


def parse_scenario(path):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    name_hint = os.path.splitext(os.path.basename(path))[0]
    return parse_scenario_text(text, name_hint=name_hint, path=str(path))


def build_space(scn, grid=None):
    """Assemble the dual-band space a scenario describes."""
    if scn.realized:
        return build_dualband(scn.theta, phi=scn.phi, psi=scn.psi,
                              grid=grid or scn.grid)
    return build_dualband(scn.theta, aplus=scn.aplus, aminus=scn.aminus,
                          grid=grid or scn.grid)
