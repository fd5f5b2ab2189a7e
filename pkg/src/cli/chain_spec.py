"""
Chain Spec Files

Line-oriented plain-text description of a chain and an observable:

    # comments and blank lines are ignored
    states <n>
    row <p1> ... <pn>      (exactly n row lines)
    f <v1> ... <vn>
    c <bound>              (optional)
    pi <p1> ... <pn>       (optional, checked against the computed pi)
"""
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from src.markov import tolerances as tol
from src.markov.chain import (
    FiniteChain,
    Observable,
    make_observable,
    stationary,
    validate_chain,
)
from src.markov.errors import (
    DeclaredStationaryMismatch,
    NegativeEntry,
    ParseError,
    RowSumViolation,
)

logger = logging.getLogger(__name__)

DIRECTIVES = ("states", "row", "f", "c", "pi")


@dataclass(frozen=True)
class ChainSpecFile:
    """Syntactic content of a spec file, before validation."""

    n: int
    rows: List[List[float]]
    row_lines: List[int]
    f: List[float]
    c: Optional[float] = None
    pi: Optional[List[float]] = None


def _numbers(tokens: List[str], line: int) -> List[float]:
    out = []
    for token in tokens:
        try:
            value = float(token)
        except ValueError:
            raise ParseError(line, f"not a number: {token!r}")
        if not math.isfinite(value):
            raise ParseError(line, f"non-finite value: {token!r}")
        out.append(value)
    return out


def read_chain_spec(text: str) -> ChainSpecFile:
    """
    Tokenize a spec file into a ChainSpecFile.

    Raises:
        ParseError: unknown directive, bad count, duplicate or missing line
    """
    n = None
    rows, row_lines = [], []
    fields = {}

    for line_no, raw in enumerate(text.splitlines(), start=1):
        content = raw.split("#", 1)[0].strip()
        if not content:
            continue
        keyword, *tokens = content.split()

        if keyword not in DIRECTIVES:
            raise ParseError(line_no, f"unknown directive {keyword!r}")

        if keyword == "states":
            if n is not None:
                raise ParseError(line_no, "duplicate 'states' line")
            if len(tokens) != 1 or not tokens[0].isdigit() or int(tokens[0]) < 1:
                raise ParseError(line_no, "'states' takes one positive integer")
            n = int(tokens[0])
            continue

        if n is None:
            raise ParseError(line_no, "'states' must come first")

        values = _numbers(tokens, line_no)
        if keyword == "row":
            if len(values) != n:
                raise ParseError(line_no, f"row {len(rows)} has {len(values)} entries, expected {n}")
            rows.append(values)
            row_lines.append(line_no)
        elif keyword in fields:
            raise ParseError(line_no, f"duplicate {keyword!r} line")
        elif keyword == "c":
            if len(values) != 1:
                raise ParseError(line_no, "'c' takes one value")
            fields["c"] = values[0]
        else:
            if len(values) != n:
                raise ParseError(line_no, f"{keyword!r} has {len(values)} entries, expected {n}")
            fields[keyword] = values

    if n is None:
        raise ParseError(0, "states required")
    if len(rows) != n:
        raise ParseError(0, f"expected {n} row lines, found {len(rows)}")
    if "f" not in fields:
        raise ParseError(0, "f required")

    return ChainSpecFile(
        n=n, rows=rows, row_lines=row_lines, f=fields["f"], c=fields.get("c"), pi=fields.get("pi")
    )


def parse_chain_spec(text: str) -> Tuple[FiniteChain, Observable]:
    """
    Parse and validate a spec file into a chain and a centered observable.

    Raises:
        ParseError: syntax errors and invalid rows (with the row index)
        DeclaredStationaryMismatch: declared pi differs from the computed one
        NumericalError: the stationary distribution cannot be computed
    """
    spec = read_chain_spec(text)
    try:
        chain = validate_chain(spec.rows)
    except NegativeEntry as e:
        raise ParseError(spec.row_lines[e.row], f"row {e.row} has a negative entry") from e
    except RowSumViolation as e:
        raise ParseError(spec.row_lines[e.row], f"row {e.row} sums to {e.total!r}, expected 1") from e

    pi = stationary(chain)
    if spec.pi is not None:
        max_diff = float(np.max(np.abs(np.asarray(spec.pi) - pi.pi)))
        if max_diff > tol.DECLARED_PI_TOL:
            raise DeclaredStationaryMismatch(max_diff)

    f = make_observable(spec.f, pi, spec.c)
    logger.debug(f"Parsed chain with {chain.n_states} states, c={f.c}")
    return chain, f


def load_chain_spec(path: Union[str, Path]) -> Tuple[FiniteChain, Observable]:
    """Read a spec file from disk (UTF-8) and parse it."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise ParseError(0, "file is not valid UTF-8")
    return parse_chain_spec(text)


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def emit_chain_spec(chain: FiniteChain, f, c: Optional[float] = None, pi=None) -> str:
    """
    Serialize a chain and observable values at 17 significant digits, so
    that parsing the output reproduces the transition matrix bit for bit.
    """
    values = f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)
    lines = [f"states {chain.n_states}"]
    for row in chain.transition:
        lines.append("row " + " ".join(_fmt(p) for p in row))
    lines.append("f " + " ".join(_fmt(v) for v in values))
    if c is not None:
        lines.append(f"c {_fmt(c)}")
    if pi is not None:
        lines.append("pi " + " ".join(_fmt(p) for p in np.asarray(getattr(pi, "pi", pi))))
    return "\n".join(lines) + "\n"
