"""Isogeny-family data: embedded curve tables and genus-zero j-maps.

The tables live in ``data/`` next to this module (or in the directory named
by ``$ISORANK_DATA``) and are verified against ``SHA256SUMS`` on load.
"""

import ast
import csv
from dataclasses import dataclass
from fractions import Fraction
import hashlib
import io
import operator
import os
from pathlib import Path

from .checkpoint import run_chunks, split
from .ec import WeierstrassModel, compute_invariants, curve_from_j, minimal_model, rationals_of_height, reduce_twist
from .errors import DegenerateMap, FixtureError, IsorankError, ParseError, PoleOfMap
from .heuristics import nagao_score
from .modp import ap_table

ISOGENY_DEGREES = frozenset(range(1, 20)) | {21, 25, 27, 37, 43, 67, 163}

DATA_ENV = "ISORANK_DATA"
FAMILY_VERSION = 1


def data_dir():
    return Path(os.environ.get(DATA_ENV) or Path(__file__).with_name("data"))


def _read_verified(name):
    d = data_dir()
    try:
        raw = (d / name).read_bytes()
        sums = (d / "SHA256SUMS").read_text(encoding="utf-8")
    except OSError as exc:
        raise FixtureError(f"cannot read fixture {name} in {d}: {exc}") from None
    expected = {}
    for line in sums.splitlines():
        digest, fname = line.split(maxsplit=1)
        expected[fname.strip()] = digest
    if expected.get(name) != hashlib.sha256(raw).hexdigest():
        raise FixtureError(f"checksum mismatch for {d / name}")
    return raw.decode("utf-8")


# -- exact expression parsing for the printed j-values --------------------------

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}


def parse_rational(text):
    """Evaluate an exact expression such as ``-5^2*241^3/2^3`` or ``5281^3/(3^4*5*13)``."""

    def ev(node):
        if isinstance(node, ast.Constant) and type(node.value) is int:
            return Fraction(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Pow):
                e = ev(node.right)
                if e.denominator != 1 or e < 0:
                    raise ParseError(f"bad exponent in {text!r}")
                return ev(node.left) ** int(e)
            if type(node.op) in _BINOPS:
                return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        raise ParseError(f"unsupported expression {text!r}")

    try:
        tree = ast.parse(text.replace("^", "**").strip(), mode="eval")
    except SyntaxError:
        raise ParseError(f"cannot parse {text!r}") from None
    return ev(tree.body)


# -- tables -------------------------------------------------------------------


@dataclass(frozen=True)
class IsogenyClassEntry:
    n: int
    j: Fraction
    a_invariants: WeierstrassModel
    source_table: str
    record_D: int = None
    record_rank: int = None
    H_used: int = None
    status: str = "ok"
    j_text: str = ""

    def j_consistent(self):
        return compute_invariants(self.a_invariants).j == self.j


@dataclass(frozen=True)
class NagaoTableEntry:
    n: int
    r: Fraction
    a_invariants: WeierstrassModel
    rank: int


def load_tables():
    """Every row of the positive-genus, n = 163, genus-zero twist, and n = 10, 12 tables."""
    rows = []
    for rec in csv.DictReader(io.StringIO(_read_verified("tables.csv"))):
        H = parse_rational(rec["H"]) if rec["H"] else None
        rows.append(IsogenyClassEntry(
            n=int(rec["n"]),
            j=parse_rational(rec["j"]),
            a_invariants=WeierstrassModel.parse(rec["a_invariants"]),
            source_table=f"table{rec['table']}",
            record_D=int(rec["D"]),
            record_rank=int(rec["rank"]),
            H_used=None if H is None else int(H),
            status=rec["status"],
            j_text=rec["j"],
        ))
    return rows


def load_nagao_table():
    return [
        NagaoTableEntry(int(rec["n"]), Fraction(rec["r"]), WeierstrassModel.parse(rec["a_invariants"]), int(rec["rank"]))
        for rec in csv.DictReader(io.StringIO(_read_verified("nagao_table.csv")))
    ]


def load_reference_curves():
    """Reference curves of rank 0-3 with small generators: label -> (rank, model, points)."""
    out = {}
    for rec in csv.DictReader(io.StringIO(_read_verified("reference_curves.csv"))):
        pts = []
        for tok in rec["generators"].split():
            x, y = tok.strip("()").split(";")
            pts.append((Fraction(x), Fraction(y)))
        out[rec["label"]] = (int(rec["rank"]), WeierstrassModel.parse(rec["a_invariants"]), pts)
    return out


def curves_for_degree(n):
    if n not in ISOGENY_DEGREES:
        return []
    return [e for e in load_tables() if e.n == n and e.status == "ok"]


# -- genus-zero families ------------------------------------------------------


@dataclass(frozen=True)
class GenusZeroFamily:
    n: int
    num: tuple  # integer coefficients, low degree first
    den: tuple


def _trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_gcd_degree(f, g):
    """Degree of gcd(f, g) over Q (Euclid on Fraction coefficients)."""
    f, g = _trim(map(Fraction, f)), _trim(map(Fraction, g))
    while g:
        r = list(f)
        while len(r) >= len(g) and r:
            q = r[-1] / g[-1]
            shift = len(r) - len(g)
            for i, c in enumerate(g):
                r[shift + i] -= q * c
            r = _trim(r)
        f, g = g, r
    return len(f) - 1


def make_family(n, num, den):
    num, den = tuple(_trim(num)), tuple(_trim(den))
    if not den:
        raise DegenerateMap("denominator is identically zero")
    if not num:
        raise DegenerateMap("numerator is identically zero")
    if _poly_gcd_degree(num, den) > 0:
        raise DegenerateMap("numerator and denominator share a factor")
    return GenusZeroFamily(n, num, den)


def load_family(text):
    """Parse a family description::

        version 1
        family 13
        num c0 c1 c2 ...
        den d0 d1 ...
    """
    fields = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        if key in fields:
            raise ParseError(f"duplicate {key!r} line")
        fields[key] = rest.split()
    try:
        if int(fields.get("version", ["1"])[0]) > FAMILY_VERSION:
            raise ParseError("unsupported family file version")
        n = int(fields["family"][0])
        num = [int(c) for c in fields["num"]]
        den = [int(c) for c in fields["den"]]
    except (KeyError, IndexError, ValueError) as exc:
        raise ParseError(f"malformed family description: {exc}") from None
    return make_family(n, num, den)


def dump_family(family):
    return (f"version {FAMILY_VERSION}\nfamily {family.n}\n"
            f"num {' '.join(map(str, family.num))}\nden {' '.join(map(str, family.den))}\n")


def builtin_family(n):
    if n != 13:
        raise KeyError(f"no built-in genus-zero family for n={n}")
    return load_family(_read_verified("j13.family"))


def _horner(coeffs, h):
    v = Fraction(0)
    for c in reversed(coeffs):
        v = v * h + c
    return v


def eval_family(family, h):
    h = Fraction(h)
    d = _horner(family.den, h)
    if d == 0:
        raise PoleOfMap(f"j_{family.n} has a pole at h={h}")
    return _horner(family.num, h) / d


def family_curve(family, h):
    """Minimal model of the reduced-twist curve with j-invariant j_n(h)."""
    short = reduce_twist(curve_from_j(eval_family(family, h)))
    return minimal_model(short.to_weierstrass())


def _family_chunk(args):
    family, N, hs = args
    rows, failures = [], []
    for a, b in hs:
        h = Fraction(a, b)
        try:
            model = family_curve(family, h)
            score = nagao_score(ap_table(model, N), N).value
        except IsorankError as exc:
            failures.append([a, b, f"{type(exc).__name__}: {exc}"])
            continue
        rows.append([a, b, score, str(model)])
    return {"rows": rows, "failures": failures}


@dataclass(frozen=True)
class FamilyScanRow:
    h: Fraction
    score: float
    model: WeierstrassModel


def family_scan(family, H, N, *, workers=1, snapshot=None, stop_after=None, chunk_size=16):
    """Nagao scores S(E_h, N) for every h of height <= H, best first.

    Returns (rows, failures); failures are (h, message) pairs, poles included.
    """
    if H < 1 or N < 2:
        raise ValueError("need H >= 1 and N >= 2")
    hs = [(h.numerator, h.denominator) for h in rationals_of_height(H)]
    chunks = [(family, N, c) for c in split(hs, chunk_size)]
    config = {"scan": "nagao-family", "family": dump_family(family), "H": H, "N": N,
              "chunk_size": chunk_size}
    payloads = run_chunks(_family_chunk, chunks, kind="nagao-family", config=config,
                          snapshot_path=snapshot, workers=workers, stop_after=stop_after)
    rows = [FamilyScanRow(Fraction(a, b), s, WeierstrassModel.parse(m))
            for pl in payloads for a, b, s, m in pl["rows"]]
    rows.sort(key=lambda r: (-r.score, abs(r.h), r.h))
    failures = [(Fraction(a, b), msg) for pl in payloads for a, b, msg in pl["failures"]]
    return rows, failures
