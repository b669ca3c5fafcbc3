"""Service layer between the command line and the engine.

Every command is described by a validated ``CommandConfig``; the service turns
it into engine calls and returns plain result objects for rendering.
"""

from __future__ import annotations

import re
import time
from pathlib import Path
from typing import Literal, Optional

import sympy
from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, field_validator, model_validator

from latereg.arith import DEFAULT_PRIME, Polynomial, RingContext
from latereg.construct import (
    EmbeddingAssignment,
    ExportFormat,
    JmCertificate,
    ModuleInput,
    PureModuleSpec,
    ScanResult,
    build_jm,
    embed,
    export_generators,
    pure_module,
    pure_profile,
    read_generators,
    require_hypotheses,
    scan,
    verify,
)
from latereg.freemod import format_matrix, infer_ring_shape, parse_matrix
from latereg.resolution import BettiTable, BettiTableModel, betti_table, resolve

Subcommand = Literal["pure", "construct", "resolve", "verify", "scan"]
OutputFormat = Literal["ascii", "json", "cas", "csv"]
StrategyName = Literal["degree", "fifo"]

_RANGE = re.compile(r"^\s*(?P<lo>\d+)\s*(?:\.\.|-)\s*(?P<hi>\d+)\s*$")


class CommandConfig(BaseModel):
    """Validated parameters of one command invocation."""

    subcommand: Subcommand
    n: Optional[int] = Field(default=None, ge=1)
    N: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = Field(default=None, ge=1)
    d: Optional[int] = Field(default=None, ge=0)
    prime: int = DEFAULT_PRIME
    module: Optional[Path] = None
    input: Optional[Path] = None
    out: Optional[Path] = None
    format: Optional[OutputFormat] = None
    strategy: StrategyName = "degree"
    max_seconds: PositiveFloat = 30.0
    expect_seq: Optional[list[int]] = None
    k_range: Optional[tuple[int, int]] = None
    jobs: int = Field(default=1, ge=1)
    certificates: Optional[Path] = None

    @field_validator("prime")
    @classmethod
    def _odd_prime(cls, p: int) -> int:
        if p < 3 or not sympy.isprime(p):
            raise ValueError(f"prime must be an odd prime, got {p}")
        return p

    @field_validator("expect_seq", mode="before")
    @classmethod
    def _split_sequence(cls, value: object) -> object:
        if isinstance(value, str):
            return [int(t) for t in value.replace("(", "").replace(")", "").split(",") if t.strip()]
        return value

    @field_validator("k_range", mode="before")
    @classmethod
    def _parse_range(cls, value: object) -> object:
        if isinstance(value, str):
            match = _RANGE.match(value)
            if not match:
                raise ValueError(f"k range must look like 2..6 or 2-6, got '{value}'")
            return int(match["lo"]), int(match["hi"])
        return value

    @model_validator(mode="after")
    def _required(self) -> CommandConfig:
        def need(*names: str) -> None:
            missing = [f"--{name}" for name in names if getattr(self, name) is None]
            if missing:
                raise ValueError(f"{self.subcommand} needs {', '.join(missing)}")

        if self.subcommand == "pure":
            need("n", "k", "d")
        elif self.subcommand in ("construct", "verify"):
            need("N")
            if self.module is None:
                need("n", "k", "d")
        elif self.subcommand == "resolve":
            need("input")
        elif self.subcommand == "scan":
            need("n", "N", "k_range")
            lo, hi = self.k_range  # type: ignore[misc]
            if lo < 1 or hi < lo:
                raise ValueError(f"k range {lo}..{hi} is empty or starts below 1")
        allowed = {
            "pure": {"ascii", "json"},
            "construct": {"ascii", "json", "cas"},
            "resolve": {"ascii", "json"},
            "verify": {"ascii", "json"},
            "scan": {"ascii", "csv", "json"},
        }[self.subcommand]
        if self.format is None:
            self.format = "json" if self.subcommand == "verify" else "ascii"
        if self.format not in allowed:
            raise ValueError(f"{self.subcommand} supports formats {sorted(allowed)}")
        return self

    def spec(self) -> PureModuleSpec:
        return PureModuleSpec(n=self.n, k=self.k, d=self.d)


class PureResponse(BaseModel):
    """A pure module: its presentation and engine-verified Betti data."""

    n: int
    k: int
    d: int
    presentation: str
    betti: BettiTableModel
    degree_sequence: list[int]
    generator_count: int
    pure: bool


class ResolveResponse(BaseModel):
    """Minimal resolution data of a matrix cokernel."""

    ranks: list[int]
    betti: BettiTableModel
    regularity: Optional[int]


class ConstructResult(BaseModel):
    """Generators of J_M ready for export."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    ring: RingContext
    generators: list[Polynomial]
    embedding: list[str]

    def export(self, fmt: ExportFormat) -> str:
        return export_generators(self.generators, fmt, self.ring)


def load_module(path: Path, prime: int, strategy: StrategyName = "degree") -> ModuleInput:
    """Read a presentation over R from a matrix file and resolve it.

    Raises:
        ValueError: If the file mentions y variables.
    """
    text = path.read_text()
    n, N = infer_ring_shape(text)
    if N:
        raise ValueError(f"{path}: module presentations may only use x variables")
    ring = RingContext(n, 0, prime)
    return ModuleInput.from_presentation(parse_matrix(text, ring), strategy=strategy)


class LateRegService:
    """Entry point for every command of the tool.

    This provides a unified API usable without the command line.
    """

    def module_for(self, config: CommandConfig) -> tuple[ModuleInput, int]:
        """The module M and generating degree k a command works on."""
        if config.module is not None:
            m = load_module(config.module, config.prime, config.strategy)
            k = config.k if config.k is not None else m.min_generator_degree
            return m, k
        return pure_module(config.spec(), config.prime), config.k  # type: ignore[return-value]

    def pure(self, config: CommandConfig) -> PureResponse:
        m = pure_module(config.spec(), config.prime)
        return PureResponse(
            n=config.n,
            k=config.k,
            d=config.d,
            presentation=format_matrix(m.presentation, with_ring=True),
            betti=m.betti.to_model(),
            degree_sequence=list(m.degree_sequence),
            generator_count=m.generator_count,
            pure=m.betti.is_pure(),
        )

    def construct(self, config: CommandConfig) -> ConstructResult:
        """Generators of J_M.

        Raises:
            HypothesisError: If M, k and N fail the hypotheses.
        """
        N = config.N
        if config.module is None:
            require_hypotheses(pure_profile(config.spec()), config.k, N)  # type: ignore[arg-type]
        m, k = self.module_for(config)
        require_hypotheses(m, k, N)  # type: ignore[arg-type]
        embedding: EmbeddingAssignment = embed(m, k, N)  # type: ignore[arg-type]
        gens = build_jm(m, k, N, embedding)  # type: ignore[arg-type]
        ring = RingContext(m.ring.n, N, config.prime)  # type: ignore[arg-type]
        return ConstructResult(ring=ring, generators=gens, embedding=embedding.describe(ring))

    def resolve(self, config: CommandConfig) -> ResolveResponse:
        text = config.input.read_text()  # type: ignore[union-attr]
        n, N = infer_ring_shape(text)
        ring = RingContext(n, N, config.prime)
        c = resolve(parse_matrix(text, ring), strategy=config.strategy)
        table: BettiTable = betti_table(c)
        return ResolveResponse(
            ranks=c.ranks(),
            betti=table.to_model(),
            regularity=table.regularity() if table else None,
        )

    def verify(self, config: CommandConfig) -> JmCertificate:
        """Run the full pipeline for one instance.

        Raises:
            HypothesisError: If M, k and N fail the hypotheses.
            BudgetExceeded: If the run exceeds ``max_seconds``.
        """
        N = config.N
        source: ModuleInput | PureModuleSpec
        if config.module is not None:
            source, k = self.module_for(config)
            n = source.n
        else:
            source, k, n = config.spec(), config.k, config.n
        generators = None
        if config.input is not None:
            ring = RingContext(n, N, config.prime)  # type: ignore[arg-type]
            _, generators = read_generators(config.input.read_text(), ring)
        return verify(
            source,
            N,  # type: ignore[arg-type]
            k=k,
            prime=config.prime,
            strategy=config.strategy,
            generators=generators,
            expect_seq=config.expect_seq,
            deadline=time.monotonic() + config.max_seconds,
        )

    def scan(self, config: CommandConfig) -> ScanResult:
        lo, hi = config.k_range  # type: ignore[misc]
        result = scan(
            config.n,  # type: ignore[arg-type]
            config.N,  # type: ignore[arg-type]
            range(lo, hi + 1),
            max_seconds=config.max_seconds,
            jobs=config.jobs,
            prime=config.prime,
        )
        if config.certificates is not None:
            config.certificates.mkdir(parents=True, exist_ok=True)
            for k, cert in result.certificates.items():
                path = config.certificates / f"n{config.n}_N{config.N}_k{k}.json"
                path.write_text(cert.model_dump_json(indent=2) + "\n")
        return result
