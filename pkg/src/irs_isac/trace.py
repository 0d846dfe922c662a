"""Per-run iteration records shared by all optimization pipelines."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    mi_nats: float
    rates: tuple[float, ...]
    power: float
    slack_norm: float
    penalty: float
    wall_clock_ms: float


@dataclass
class RunTrace:
    """Chronological record of an optimization run."""

    scheme: str
    records: list[IterationRecord] = field(default_factory=list)
    exit_reason: str | None = None
    restarts: int = 0
    stalls: int = 0

    def append(self, record: IterationRecord) -> None:
        if self.records and record.iteration <= self.records[-1].iteration:
            raise ValueError("iteration indices must be strictly increasing")
        self.records.append(record)

    @property
    def mi_values(self) -> list[float]:
        return [r.mi_nats for r in self.records]

    @property
    def total_wall_ms(self) -> float:
        return sum(r.wall_clock_ms for r in self.records)

    def finish(self, reason: str) -> "RunTrace":
        self.exit_reason = reason
        return self
