"""Request and report models shared by the HTTP service and the command line."""
from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

Protocol = Literal["current", "proposed"]


class _Model(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class Source(_Model):
    """A builtin name, or document text with the file name used in diagnostics."""
    builtin: Optional[str] = None
    text: Optional[str] = None
    origin: str = "<input>"

    @model_validator(mode="after")
    def _one_of(self):
        if (self.builtin is None) == (self.text is None):
            raise ValueError("give exactly one of builtin or text")
        return self


class Limits(_Model):
    max_states: Optional[int] = Field(None, alias="maxStates", ge=1)
    max_depth: Optional[int] = Field(None, alias="maxDepth", ge=0)
    hide: list[str] = []


class CheckRequest(_Model):
    topology: Optional[Source] = None
    model: Optional[Source] = None
    protocol: Protocol = "current"
    limits: Limits = Limits()

    @model_validator(mode="after")
    def _one_input(self):
        if (self.topology is None) == (self.model is None):
            raise ValueError("give exactly one of topology or model")
        return self


class CompareRequest(_Model):
    topology: Source
    limits: Limits = Limits()


class QuerySpec(_Model):
    mode: Literal["ForallPrecedes", "ExistsInterleaving"] = "ForallPrecedes"
    first: list[str]
    second: list[str] = []
    groups: list[list[str]] = []


class OrderRequest(_Model):
    topology: Source
    protocol: Protocol = "current"
    query: Optional[QuerySpec] = None
    parallel_termination: Optional[str] = Field(None, alias="parallelTermination")
    expect: Literal["pass", "fail"] = "pass"
    limits: Limits = Limits()

    @model_validator(mode="after")
    def _one_query(self):
        if (self.query is None) == (self.parallel_termination is None):
            raise ValueError("give exactly one of query or parallelTermination")
        return self


class SimRequest(_Model):
    scenario: Source
    horizon: Optional[int] = Field(None, ge=1)


class EmitRequest(_Model):
    topology: Source
    protocol: Protocol = "current"


# -- reports ---------------------------------------------------------------------

class LassoReport(_Model):
    stem: list[str]
    cycle: list[str]


class ExplorationReport(_Model):
    model: str
    variant: Optional[str]
    tool: str
    states: int
    transitions: int
    deadlocks: list[list[str]]
    divergences: list[LassoReport]
    terminated: int
    truncated: bool


class ComparisonReport(_Model):
    current: ExplorationReport
    proposed: ExplorationReport
    reduction: float
    inconclusive: bool


class QueryReport(_Model):
    mode: str
    first: list[str]
    second: list[str] | list[list[str]]


class OrderReport(_Model):
    model: str
    variant: str
    tool: str
    query: QueryReport
    verdict: Literal["holds", "fails", "witnessFound", "noWitness"]
    trace: Optional[list[str]]
    states: int
    truncated: bool
    first_seen: bool = Field(alias="firstSeen")


class SimEventReport(BaseModel):
    model_config = ConfigDict(extra="allow")
    t: int
    kind: Literal["release", "deadlineArm", "deadlineMiss", "budgetExhausted", "replenish",
                  "timerFire", "timerCancel", "missionPhase"]
    subject: str


class SimReport(_Model):
    horizon: int
    per_tick: list[str] = Field(alias="perTick")
    events: list[SimEventReport]
    priorities: dict[str, int]
    warnings: list[str]


class EmitReport(_Model):
    topology: str
    variant: str
    text: str


class Outcome(_Model):
    """What one command produced: its exit status, JSON report and human rendering."""
    exit_code: int = Field(alias="exitCode")
    report: dict
    text: str


REPORT_SCHEMAS = {
    "exploration-report": ExplorationReport,
    "comparison-report": ComparisonReport,
    "order-report": OrderReport,
    "sim-trace": SimReport,
    "emit-report": EmitReport,
}


def json_schemas() -> dict[str, dict]:
    return {name: m.model_json_schema(by_alias=True) for name, m in REPORT_SCHEMAS.items()}
