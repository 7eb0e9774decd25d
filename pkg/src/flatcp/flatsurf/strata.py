"""The eight strata of quadratic differentials of complex dimension 5 and the
Prym loci of their orientation double covers.

Lookups accept either side: ``strataTable("Q(8)")`` and
``strataTable("Prym(4,4)^even")`` return the same row.  Stratum names are
normalised, so ``"Q(-1,-1,-1,1,2)"`` and ``"Q(-1^3,1,2)"`` agree.

    >>> strataTable("Q(8)").prym
    'Prym(4,4)^even'
    >>> strataTable("Prym(1,1,2)").quadratic
    'Q(-1^3,1,2)'
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .surface import format_stratum

__all__ = ["StrataRow", "NotInTable", "strataTable", "STRATA_TABLE", "cover_orders", "parse_stratum"]


class NotInTable(KeyError):
    """The stratum or locus is not one of the eight rows."""


@dataclass(frozen=True)
class StrataRow:
    index: int
    quadratic: str
    prym: str
    alias: str | None
    genus: int

    @property
    def quadratic_orders(self) -> tuple[int, ...]:
        return parse_stratum(self.quadratic)[1]

    @property
    def prym_orders(self) -> tuple[int, ...]:
        return parse_stratum(self.prym)[1]

    def to_json(self) -> dict:
        return {
            "row": self.index,
            "quadratic": self.quadratic,
            "prym": self.prym,
            "alias": self.alias,
            "genus": self.genus,
        }


STRATA_TABLE: tuple[StrataRow, ...] = (
    StrataRow(1, "Q(-1^6,2)", "Prym(1,1)", "H(1,1)", 2),
    StrataRow(2, "Q(-1^2,6)", "Prym(3,3)", "H(1,1)", 4),
    StrataRow(3, "Q(1,1,2)", "Prym(2,2,1,1)", "H(0^2,2)", 4),
    StrataRow(4, "Q(-1^4,4)", "Prym(2,2)^odd", None, 3),
    StrataRow(5, "Q(-1^3,1,2)", "Prym(1,1,2)", None, 3),
    StrataRow(6, "Q(-1,2,3)", "Prym(1,1,4)", None, 4),
    StrataRow(7, "Q(8)", "Prym(4,4)^even", None, 5),
    StrataRow(8, "Q(-1,1,4)", "Prym(2,2,2)^even", None, 4),
)

_NAME = re.compile(r"^\s*(Q|H|Prym)\s*\(([^)]*)\)\s*(?:\^\s*(odd|even))?\s*$")


def parse_stratum(name: str) -> tuple[str, tuple[int, ...], str | None]:
    """``(kind, sorted orders, spin)`` for names such as ``"Q(-1^3,1,2)"``."""
    m = _NAME.match(name)
    if not m:
        raise NotInTable(f"cannot parse stratum name {name!r}")
    kind, body, spin = m.group(1), m.group(2), m.group(3)
    orders: list[int] = []
    for part in filter(None, (p.strip() for p in body.split(","))):
        base, _, mult = part.partition("^")
        try:
            orders += [int(base)] * (int(mult) if mult else 1)
        except ValueError as exc:
            raise NotInTable(f"cannot parse stratum name {name!r}") from exc
    return kind, tuple(sorted(orders)), spin


def strataTable(name: str) -> StrataRow:
    """The row containing the quadratic stratum or Prym locus ``name``.

    A Prym locus given without its spin suffix matches the unique row with
    those orders.
    """
    kind, orders, spin = parse_stratum(name)
    for row in STRATA_TABLE:
        if kind == "Q" and row.quadratic_orders == orders:
            return row
        if kind == "Prym":
            rk, ro, rs = parse_stratum(row.prym)
            if ro == orders and (spin is None or spin == rs):
                return row
    raise NotInTable(f"{format_stratum(kind, orders) if kind != 'Prym' else name} is not in the table")


def cover_orders(quadratic_orders) -> tuple[int, ...]:
    """Zero orders of the orientation double cover: an even order ``k``
    gives two zeros of order ``k/2``, an odd order ``k`` one zero of order
    ``k+1``; poles become regular points and are dropped."""
    out: list[int] = []
    for k in quadratic_orders:
        if k == -1:
            continue
        if k % 2 == 0:
            out += [k // 2, k // 2]
        else:
            out.append(k + 1)
    return tuple(sorted(x for x in out if x))
