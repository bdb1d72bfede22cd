"""DIMACS CNF reading for width-3 formulas."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import ParseError


@dataclass(frozen=True)
class CnfFormula:
    """``clauses`` holds triples of signed 1-based literals (DIMACS convention)."""

    n: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        for cl in self.clauses:
            if len(cl) != 3:
                raise ParseError("every clause must have exactly three literals")
            for lit in cl:
                if lit == 0 or abs(lit) > self.n:
                    raise ParseError(f"literal {lit} out of range for n={self.n}")

    def clause_vars(self, k: int) -> list[int]:
        """Distinct 0-based variables of clause k in order of first occurrence."""
        seen = []
        for lit in self.clauses[k]:
            v = abs(lit) - 1
            if v not in seen:
                seen.append(v)
        return seen

    def clause_satisfied(self, k: int, assignment: int) -> bool:
        """``assignment`` has bit i set when variable i+1 is true."""
        return any(((assignment >> (abs(l) - 1)) & 1) == (l > 0) for l in self.clauses[k])

    def satisfied_by(self, assignment: int) -> bool:
        return all(self.clause_satisfied(k, assignment) for k in range(len(self.clauses)))

    def satisfying_assignments(self) -> list[int]:
        if self.n > 22:
            raise ValueError("brute force limited to 22 variables")
        return [a for a in range(1 << self.n) if self.satisfied_by(a)]

    def is_satisfiable(self) -> bool:
        return bool(self.satisfying_assignments())

    def slot_satisfies(self, k: int, slots: int) -> bool:
        """Three slot values (bit j = value of literal position j's variable).

        Slots repeating a variable must agree; then the clause must hold.
        """
        cl = self.clauses[k]
        vals = {}
        for j, lit in enumerate(cl):
            b = (slots >> j) & 1
            v = abs(lit)
            if vals.setdefault(v, b) != b:
                return False
        return any(((slots >> j) & 1) == (lit > 0) for j, lit in enumerate(cl))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {len(self.clauses)}"]
        lines += [" ".join(str(l) for l in cl) + " 0" for cl in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(data: bytes | str) -> CnfFormula:
    """Parse DIMACS CNF.  Clauses shorter than 3 repeat their last literal; longer ones are rejected."""
    text = data.decode() if isinstance(data, bytes) else data
    n = m = None
    tokens: list[int] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError(f"line {lineno}: malformed header {line!r}")
            try:
                n, m = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: malformed header {line!r}") from None
            continue
        if n is None:
            raise ParseError("clause before the 'p cnf' header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer token") from None
    if n is None:
        raise ParseError("missing 'p cnf' header")
    clauses = []
    cur: list[int] = []
    for t in tokens:
        if t == 0:
            if not cur:
                raise ParseError("empty clause")
            if len(cur) > 3:
                raise ParseError(f"clause of width {len(cur)} (only width <= 3 is supported)")
            while len(cur) < 3:
                cur.append(cur[-1])
            clauses.append(tuple(cur))
            cur = []
        else:
            if abs(t) > n:
                raise ParseError(f"literal {t} exceeds declared variable count {n}")
            cur.append(t)
    if cur:
        raise ParseError("last clause is not terminated by 0")
    if m is not None and m != len(clauses):
        raise ParseError(f"header declares {m} clauses, found {len(clauses)}")
    return CnfFormula(n, tuple(clauses))


def all_clauses_formula(n: int = 3) -> CnfFormula:
    """The unsatisfiable formula made of all 2^n sign patterns on x_1..x_n (n = 3)."""
    clauses = []
    for signs in product((1, -1), repeat=3):
        clauses.append(tuple(s * (i + 1) for s, i in zip(signs, range(3))))
    return CnfFormula(max(n, 3), tuple(clauses))
