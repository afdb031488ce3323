"""Search budgets shared by all modules."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Budget:
    # n^|V| assignments enumerated by brute force
    assignments: int = 2**24
    # n^m table cells for polymorphism enumeration
    op_cells: int = 27
    # backtracking nodes
    nodes: int = 10**7
    # operations kept in any one operation set
    ops: int = 20000
    # rows in any one LP
    lp_rows: int = 200000

    def __post_init__(self):
        for k, v in asdict(self).items():
            if not isinstance(v, int) or v <= 0:
                raise ValueError(f"budget {k} must be a positive integer, got {v!r}")

    def as_dict(self):
        return asdict(self)


DEFAULT_BUDGET = Budget()
