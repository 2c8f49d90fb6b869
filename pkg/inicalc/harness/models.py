"""Pydantic records for generator configuration and suite reports."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from inicalc import config
from inicalc.semantics.models import ModelId
from inicalc.syntax.ast import Layer
from inicalc.translator import FragmentTag


# ── Generator configuration ────────────────────────────────────────

class GenWeights(BaseModel):
    """Relative weights of the generator's term-former families."""
    var: float = Field(default=config.GEN_WEIGHTS["var"], ge=0)
    leaf: float = Field(default=config.GEN_WEIGHTS["leaf"], ge=0)
    prim: float = Field(default=config.GEN_WEIGHTS["prim"], ge=0)
    intro: float = Field(default=config.GEN_WEIGHTS["intro"], ge=0)
    let: float = Field(default=config.GEN_WEIGHTS["let"], ge=0)
    let_tensor: float = Field(default=config.GEN_WEIGHTS["let_tensor"], ge=0)
    proj: float = Field(default=config.GEN_WEIGHTS["proj"], ge=0)
    case: float = Field(default=config.GEN_WEIGHTS["case"], ge=0)
    app: float = Field(default=config.GEN_WEIGHTS["app"], ge=0)
    sample: float = Field(default=config.GEN_WEIGHTS["sample"], ge=0)


class GenConfig(BaseModel):
    max_depth: int = Field(default=config.DEFAULT_DEPTH, ge=1)
    seed: int = Field(default=config.DEFAULT_SEED, ge=0, lt=2**64)
    target_type: Optional[str] = None  # concrete syntax, e.g. "Bool (x) Bool"
    layer: Layer = Layer.INI
    model: ModelId = ModelId(config.DEFAULT_MODEL)
    count: int = Field(default=config.DEFAULT_COUNT, ge=0)
    fragment: Optional[FragmentTag] = None
    relaxed: bool = False
    max_attempts: int = Field(default=config.MAX_ATTEMPTS, ge=1)
    budget: int = Field(default=config.GEN_BUDGET, ge=1)
    weights: GenWeights = Field(default_factory=GenWeights)


# ── Reports ────────────────────────────────────────────────────────

class LawFailure(BaseModel):
    index: int
    lhs: str
    rhs: str
    left_value: str
    right_value: str


class LawResult(BaseModel):
    schema_name: str
    layer: Layer
    model: ModelId
    checked: int = 0
    failures: list[LawFailure] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


class LawReport(BaseModel):
    seed: int
    count: int
    depth: int
    results: list[LawResult] = Field(default_factory=list)

    @property
    def failure_count(self) -> int:
        return sum(len(r.failures) for r in self.results)


class SoundnessFailure(BaseModel):
    layer: Layer
    model: ModelId
    term: str
    reason: str


class SoundnessReport(BaseModel):
    seed: int
    count: int
    depth: int
    model: ModelId
    ini_checked: int = 0
    i_checked: int = 0
    names_disjoint: Optional[bool] = None
    negative_control_flagged: bool = False
    negative_control_witness: Optional[str] = None
    failures: list[SoundnessFailure] = Field(default_factory=list)

    @property
    def failure_count(self) -> int:
        return len(self.failures) + (0 if self.negative_control_flagged else 1)


class TranslationFailure(BaseModel):
    check: str  # typing | semantics | abstraction
    fragment: FragmentTag
    term: str
    detail: str


class TranslationReport(BaseModel):
    seed: int
    count: int
    typing_checked: int = 0
    semantics_checked: int = 0
    pairs_checked: int = 0
    pairs_equal: int = 0
    failures: list[TranslationFailure] = Field(default_factory=list)

    @property
    def failure_count(self) -> int:
        return len(self.failures)


class SplittingDisagreement(BaseModel):
    layer: Layer
    context: dict[str, str]
    term: str
    algorithmic: Optional[str]
    declarative: Optional[str]


class SplittingReport(BaseModel):
    seed: int
    count: int
    checked: int = 0
    accepted: int = 0
    disagreements: list[SplittingDisagreement] = Field(default_factory=list)

    @property
    def failure_count(self) -> int:
        return len(self.disagreements)
