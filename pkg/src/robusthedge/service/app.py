"""FastAPI application wrapping the pricing engine.

Every endpoint is a pure function of its request body; the service
holds no state. Rational values cross the wire as exact "p/q" strings.
Error mapping: malformed or inconsistent inputs give 422, operations
that require no-arbitrage report violations as 409 (with the failing
node and certificate when available), and enumeration or solver
capacity exhaustion gives 413.
"""
from __future__ import annotations

import dataclasses
import json
from typing import Optional, Tuple

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import verify as verify_mod
from ..arbitrage import global_na_qs, na_prior, sna_family
from ..constructions import (build_phat, build_ptilde_family,
                             build_ptilde_measure, na_repair_mixture)
from ..duality import dual_sup_equivalent
from ..errors import (BadParameter, CapacityError, ExplosionGuard,
                      LambdaOutOfRange, NoArbitrageViolation, ParseError,
                      RobustHedgeError, ShapeMismatch, ValidationError)
from ..fixtures import FixtureSpec, make_fixture
from ..model import (Claim, MarketModel, format_rational, market_to_dict,
                     node_key, parse_rational, prior_from_dict, prior_to_dict,
                     read_market)
from ..pricing import price_lower, price_mono, price_quasi_sure
from ..supports import supports_to_json
from . import schemas

_UNPROCESSABLE = (ParseError, ValidationError, ShapeMismatch, BadParameter,
                  LambdaOutOfRange, ValueError)
_CAPACITY = (ExplosionGuard, CapacityError)


def _load(doc: schemas.MarketDocument) -> Tuple[MarketModel, Optional[Claim]]:
    raw = json.dumps(doc.model_dump(exclude_none=True)).encode("utf-8")
    return read_market(raw)


def _require_claim(claim: Optional[Claim]) -> Claim:
    if claim is None:
        raise ValidationError("claim", "this operation requires a claim")
    return claim


def _na_response(verdict) -> schemas.NaResponse:
    return schemas.NaResponse(
        holds=verdict.holds,
        node=None if verdict.node is None else node_key(verdict.node),
        certificate=None if verdict.certificate is None else
        [format_rational(c) for c in verdict.certificate],
    )


def create_app() -> FastAPI:
    app = FastAPI(title="robusthedge", version="0.1.0")

    @app.exception_handler(RobustHedgeError)
    async def _domain_error(request: Request, exc: RobustHedgeError):
        if isinstance(exc, _CAPACITY):
            status = 413
        elif isinstance(exc, NoArbitrageViolation):
            status = 409
        elif isinstance(exc, _UNPROCESSABLE):
            status = 422
        else:
            status = 500
        body = schemas.ErrorResponse(
            error=type(exc).__name__, detail=str(exc))
        if isinstance(exc, NoArbitrageViolation):
            if exc.node is not None:
                body.node = node_key(exc.node)
            if exc.certificate is not None:
                body.certificate = [format_rational(c) for c in exc.certificate]
        return JSONResponse(status_code=status,
                            content=body.model_dump(exclude_none=True))

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok"}

    @app.post("/validate", response_model=schemas.ValidateResponse)
    def validate(req: schemas.ValidateRequest) -> schemas.ValidateResponse:
        model, claim = _load(req.market)
        return schemas.ValidateResponse(
            valid=True,
            horizon=model.lattice.horizon,
            assets=model.prices.assets,
            nodes=sum(1 for _ in model.lattice.nodes()),
            leaves=sum(1 for _ in model.lattice.leaves()),
            has_claim=claim is not None,
        )

    @app.post("/price", response_model=schemas.PriceResponse,
              response_model_exclude_none=True)
    def price(req: schemas.PriceRequest) -> schemas.PriceResponse:
        model, claim = _load(req.market)
        claim = _require_claim(claim)
        maximizer = None
        if req.mode == "qs":
            report = price_quasi_sure(model, claim)
        elif req.mode == "mono":
            if req.prior is None:
                raise ValidationError("prior", "mode 'mono' requires a prior")
            prior = prior_from_dict(req.prior.model_dump())
            report = price_mono(model, prior, claim)
        elif req.mode == "lower":
            _, maximizer = price_lower(model, "all", claim)
            report = dataclasses.replace(
                price_mono(model, maximizer, claim), semantics="lower")
        else:
            raise ValidationError("mode", f"unknown pricing mode {req.mode!r}")
        return schemas.PriceResponse(
            price=format_rational(report.price),
            semantics=report.semantics,
            strategy=schemas.StrategyDocument(
                initial_capital=format_rational(report.strategy.initial_capital),
                positions={
                    node_key(n): [format_rational(x) for x in h]
                    for n, h in sorted(report.strategy.positions.items())
                },
            ),
            node_values={
                node_key(n): format_rational(v)
                for n, v in sorted(report.node_values.items())
            },
            maximizing_prior=None if maximizer is None else
            schemas.PriorDocument(**prior_to_dict(maximizer)),
        )

    @app.post("/na", response_model=schemas.NaResponse,
              response_model_exclude_none=True)
    def na(req: schemas.NaRequest) -> schemas.NaResponse:
        model, _ = _load(req.market)
        if req.prior is not None:
            verdict = na_prior(model, prior_from_dict(req.prior.model_dump()))
        elif req.scope == "qs":
            verdict = global_na_qs(model)
        elif req.scope == "family":
            verdict = sna_family(model, "all")
        else:
            raise ValidationError("scope", f"unknown scope {req.scope!r}")
        return _na_response(verdict)

    @app.post("/supports", response_model=schemas.SupportsResponse)
    def supports(req: schemas.SupportsRequest) -> schemas.SupportsResponse:
        model, _ = _load(req.market)
        return schemas.SupportsResponse(supports=supports_to_json(model))

    @app.post("/dual", response_model=schemas.DualResponse)
    def dual(req: schemas.DualRequest) -> schemas.DualResponse:
        model, claim = _load(req.market)
        claim = _require_claim(claim)
        if any(n < 1 for n in req.ns):
            raise ValidationError("ns", "perturbation indices must be >= 1")
        evidence = dual_sup_equivalent(model, claim, req.ns)
        return schemas.DualResponse(
            value=format_rational(evidence.value),
            leaf_weights={
                node_key(l): format_rational(w)
                for l, w in sorted(evidence.maximizer.leaf_weights.items())
            },
            full_support_weights={
                node_key(l): format_rational(w)
                for l, w in sorted(evidence.full_support.leaf_weights.items())
            },
            gap_constant=format_rational(evidence.constant),
            gaps={str(n): format_rational(g)
                  for n, g in sorted(evidence.gaps.items())},
            gap_law_holds=evidence.law_holds,
        )

    @app.post("/construct", response_model=schemas.ConstructResponse,
              response_model_exclude_none=True)
    def construct(req: schemas.ConstructRequest) -> schemas.ConstructResponse:
        model, claim = _load(req.market)
        lam = parse_rational(req.lam)
        if req.what == "ptilde":
            prior = build_ptilde_measure(model)
            return schemas.ConstructResponse(
                what="ptilde",
                prior=schemas.PriorDocument(**prior_to_dict(prior)))
        if req.what == "phat":
            prior = build_phat(model, "all", _require_claim(claim))
            return schemas.ConstructResponse(
                what="phat",
                prior=schemas.PriorDocument(**prior_to_dict(prior)))
        if req.what == "family":
            fam = build_ptilde_family(model, lam)
            return schemas.ConstructResponse(
                what="family",
                market=schemas.MarketDocument(**market_to_dict(fam, claim)))
        if req.what == "repair":
            if req.prior is None:
                raise ValidationError("prior", "'repair' requires a base prior")
            base = prior_from_dict(req.prior.model_dump())
            prior = na_repair_mixture(model, base)
            return schemas.ConstructResponse(
                what="repair",
                prior=schemas.PriorDocument(**prior_to_dict(prior)))
        raise ValidationError("what", f"unknown construction {req.what!r}")

    @app.get("/fixture/{name}", response_model=schemas.FixtureResponse)
    def fixture(name: str, param: Optional[int] = None) -> schemas.FixtureResponse:
        model, claim = make_fixture(FixtureSpec(name, param))
        return schemas.FixtureResponse(
            name=name, param=param,
            market=schemas.MarketDocument(**market_to_dict(model, claim)))

    @app.post("/verify-chain", response_model=schemas.VerifyChainResponse,
              response_model_exclude_none=True)
    def verify_chain(req: schemas.VerifyChainRequest) -> schemas.VerifyChainResponse:
        model, claim = _load(req.market)
        claim = _require_claim(claim)
        lam = parse_rational(req.lam)
        report = verify_mod.verify_chain(model, claim, lam=lam,
                                         sample_seed=req.sample_seed)
        return schemas.VerifyChainResponse(**report.to_dict())

    @app.post("/verify-random", response_model=schemas.VerifyRandomResponse)
    def verify_random(req: schemas.VerifyRandomRequest) -> schemas.VerifyRandomResponse:
        if req.count < 0:
            raise ValidationError("count", "must be >= 0")
        summary = verify_mod.verify_random(
            req.count, req.seed, req.max_horizon, req.max_outcomes,
            req.max_assets, req.max_generators)
        return schemas.VerifyRandomResponse(**summary.to_dict())

    return app
