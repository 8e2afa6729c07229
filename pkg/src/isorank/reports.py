"""CSV scan reports and their self-check.

All reports are UTF-8 with LF line endings and a header row:

    rogers  D,count,witnesses      witnesses are ';'-joined a/b, count desc
    mazur   D,min_bias,final_bias,t_max     min_bias asc
    nagao   key,score,N            score desc
"""

import csv
from fractions import Fraction
import io

from . import arith
from .errors import ParseError

HEADERS = {
    "rogers": ["D", "count", "witnesses"],
    "mazur": ["D", "min_bias", "final_bias", "t_max"],
    "nagao": ["key", "score", "N"],
}


def _render(kind, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADERS[kind])
    w.writerows(rows)
    return buf.getvalue()


def rogers_csv(table, top=None, witness_limit=None):
    rows = [(D, c, ";".join(f"{r.numerator}/{r.denominator}" for r in wit))
            for D, c, wit in table.ranked(top, witness_limit)]
    return _render("rogers", rows)


def mazur_csv(records, top=None):
    recs = records if top is None else records[:top]
    return _render("mazur", [(r.D, r.min_bias, r.final_bias, r.t_max) for r in recs])


def _key_sort(key):
    try:
        q = Fraction(key)
        return (0, abs(q), q, "")
    except (ValueError, ZeroDivisionError):
        return (1, 0, 0, key)


def nagao_csv(scored, N, top=None):
    """``scored`` is an iterable of (key, score); keys are rationals or strings."""
    rows = sorted(((str(k), s) for k, s in scored), key=lambda ks: (-ks[1], _key_sort(ks[0])))
    if top is not None:
        rows = rows[:top]
    return _render("nagao", [(k, repr(float(s)), N) for k, s in rows])


def write_report(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def validate_csv(kind, text):
    """Check schema, ordering and squarefree D; raises ParseError, returns the row count."""
    if kind not in HEADERS:
        raise ParseError(f"unknown report kind {kind!r}")
    if "\r" in text:
        raise ParseError("report must use LF line endings")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != HEADERS[kind]:
        raise ParseError(f"bad header for {kind} report: {rows[:1]}")
    prev = None
    for n, row in enumerate(rows[1:], start=2):
        if len(row) != len(HEADERS[kind]):
            raise ParseError(f"line {n}: expected {len(HEADERS[kind])} fields")
        try:
            if kind == "nagao":
                key = (-float(row[1]), _key_sort(row[0]))
                if int(row[2]) < 1:
                    raise ParseError(f"line {n}: N must be positive")
            else:
                D = int(row[0])
                if D == 0 or not arith.is_squarefree(D):
                    raise ParseError(f"line {n}: D={D} is not squarefree")
                if kind == "rogers":
                    count = int(row[1])
                    wit = [Fraction(w) for w in row[2].split(";")] if row[2] else []
                    if count < 1 or len(wit) > count:
                        raise ParseError(f"line {n}: inconsistent count/witnesses")
                    key = (-count, abs(D), D)
                else:
                    lo, fin = int(row[1]), int(row[2])
                    if lo > 0 or lo > fin or int(row[3]) < 1:
                        raise ParseError(f"line {n}: inconsistent bias values")
                    key = (lo, abs(D), D)
        except ValueError as exc:
            raise ParseError(f"line {n}: {exc}") from None
        if prev is not None and key < prev:
            raise ParseError(f"line {n}: rows out of order")
        prev = key
    return len(rows) - 1
