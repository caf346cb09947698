"""Request and response models for the HTTP service.

The market document mirrors the on-disk market-file schema: rational
numbers travel as gcd-reduced "p/q" strings, node keys are outcome
labels joined by "/" with "" for the root. Deep semantic validation
(kernel mass, price shapes, claim completeness) happens in the core
reader; these models pin the JSON structure.
"""
from __future__ import annotations

from typing import Dict, List, Optional

from pydantic import BaseModel, Field


class PeriodSpec(BaseModel):
    outcomes: List[str]


class MarketDocument(BaseModel):
    horizon: int
    assets: int
    periods: List[PeriodSpec]
    prices: Dict[str, List[str]]
    root_generators: List[Dict[str, str]]
    kernels: Dict[str, List[Dict[str, str]]] = Field(default_factory=dict)
    claim: Optional[Dict[str, str]] = None


class PriorDocument(BaseModel):
    root_mixture: List[str]
    node_mixtures: Dict[str, List[str]] = Field(default_factory=dict)


class ValidateRequest(BaseModel):
    market: MarketDocument


class ValidateResponse(BaseModel):
    valid: bool
    horizon: int
    assets: int
    nodes: int
    leaves: int
    has_claim: bool


class PriceRequest(BaseModel):
    market: MarketDocument
    mode: str = "qs"  # qs | mono | lower
    prior: Optional[PriorDocument] = None


class StrategyDocument(BaseModel):
    initial_capital: str
    positions: Dict[str, List[str]]


class PriceResponse(BaseModel):
    price: str
    semantics: str
    strategy: StrategyDocument
    node_values: Dict[str, str]
    maximizing_prior: Optional[PriorDocument] = None


class NaRequest(BaseModel):
    market: MarketDocument
    scope: str = "qs"  # qs | family
    prior: Optional[PriorDocument] = None


class NaResponse(BaseModel):
    holds: bool
    node: Optional[str] = None
    certificate: Optional[List[str]] = None


class SupportsRequest(BaseModel):
    market: MarketDocument


class SupportsResponse(BaseModel):
    supports: Dict[str, List[List[str]]]


class DualRequest(BaseModel):
    market: MarketDocument
    ns: List[int] = Field(default_factory=lambda: [1, 10, 100])


class DualResponse(BaseModel):
    value: str
    leaf_weights: Dict[str, str]
    full_support_weights: Dict[str, str]
    gap_constant: str
    gaps: Dict[str, str]  # n -> exact gap value
    gap_law_holds: bool


class ConstructRequest(BaseModel):
    market: MarketDocument
    what: str  # ptilde | phat | family | repair
    lam: str = "1/2"
    prior: Optional[PriorDocument] = None  # base prior for "repair"


class ConstructResponse(BaseModel):
    what: str
    prior: Optional[PriorDocument] = None
    market: Optional[MarketDocument] = None


class FixtureResponse(BaseModel):
    name: str
    param: Optional[int] = None
    market: MarketDocument


class ChainRecordDocument(BaseModel):
    name: str
    left: str
    right: str
    passed: bool
    witness: Optional[str] = None


class VerifyChainRequest(BaseModel):
    market: MarketDocument
    lam: str = "1/2"
    sample_seed: int = 0


class VerifyChainResponse(BaseModel):
    passed: bool
    common_value: Optional[str] = None
    records: List[ChainRecordDocument]


class VerifyRandomRequest(BaseModel):
    count: int
    seed: int
    max_horizon: int = 3
    max_outcomes: int = 4
    max_assets: int = 2
    max_generators: int = 3


class VerifyRandomResponse(BaseModel):
    requested: int
    verified: int
    passed: int
    rejected_arbitrage: int
    failures: List[str]


class ErrorResponse(BaseModel):
    error: str
    detail: str
    node: Optional[str] = None
    certificate: Optional[List[str]] = None
