"""Exact charge bookkeeping shared by both discharging audits."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction


@dataclass(frozen=True)
class Transfer:
    src: int
    dst: int
    amount: Fraction
    rule: str


@dataclass
class ChargeLedger:
    initial: dict[int, Fraction]
    transfers: list[Transfer] = field(default_factory=list)
    problems: list[str] = field(default_factory=list)

    def give(self, src: int, dst: int, amount, rule: str) -> None:
        amount = Fraction(amount)
        if amount:
            self.transfers.append(Transfer(src, dst, amount, rule))

    def incoming(self) -> dict[int, Fraction]:
        acc = {v: Fraction(0) for v in self.initial}
        for t in self.transfers:
            acc[t.dst] += t.amount
        return acc

    def outgoing(self) -> dict[int, Fraction]:
        acc = {v: Fraction(0) for v in self.initial}
        for t in self.transfers:
            acc[t.src] += t.amount
        return acc

    @property
    def final(self) -> dict[int, Fraction]:
        inc, out = self.incoming(), self.outgoing()
        return {v: self.initial[v] - out[v] + inc[v] for v in self.initial}

    def conserved(self) -> bool:
        return sum(self.final.values(), Fraction(0)) == sum(self.initial.values(), Fraction(0))

    def violations(self) -> list[int]:
        """Vertices whose final charge is negative."""
        return sorted(v for v, x in self.final.items() if x < 0)

    def total(self) -> Fraction:
        return sum(self.initial.values(), Fraction(0))

    def to_tsv(self) -> str:
        inc, out, fin = self.incoming(), self.outgoing(), self.final
        rows = ["vertex\tinitial\tin\tout\tfinal"]
        for v in sorted(self.initial):
            rows.append(f"{v}\t{self.initial[v]}\t{inc[v]}\t{out[v]}\t{fin[v]}")
        return "\n".join(rows) + "\n"

    def transfers_tsv(self) -> str:
        rows = ["from\tto\tamount\trule"]
        rows += [f"{t.src}\t{t.dst}\t{t.amount}\t{t.rule}" for t in self.transfers]
        return "\n".join(rows) + "\n"
