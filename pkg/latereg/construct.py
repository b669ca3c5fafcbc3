"""Ideals with late regularity: pure modules, the J_M construction and its verifier.

Given a graded R-module M = coker(F_1 -> F_0) over R = F_p[x_0..x_n] whose
maximal degree sequence (t_0, ..., t_r) is strictly increasing, F_0 is
embedded into I^k/I^{k+1} for I = (y_1..y_N) in S = R[y_1..y_N], and J_M is
the lift of the image E of F_1. Its maximal degree sequence is then
(t_1, ..., t_r, t_r + 1, ..., t_r + N) and reg J_M = reg M + 1.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy.stats import linregress

from latereg.arith import (
    DEFAULT_PRIME,
    Monomial,
    Polynomial,
    RingContext,
    big_binomial,
    format_polynomial,
    monomials_of_degree,
    parse_polynomial,
    ring_from_names,
)
from latereg.freemod import (
    Complex,
    GradedFreeModule,
    GradedMatrix,
    ModuleElement,
    compose_is_zero,
    dualize,
    format_matrix,
    twist_complex,
)
from latereg.groebner import BudgetExceeded, Strategy, ideal_basis, reduce_polynomial
from latereg.resolution import (
    BettiTable,
    BettiTableModel,
    DegreeSequence,
    betti_table,
    hilbert_check,
    ideal_table,
    power_ideal_betti,
    resolve,
)

logger = logging.getLogger(__name__)

IDEAL_CONVENTION = "Betti tables of J_M are those of the ideal as a module: generators sit at i = 0"


class HypothesisError(ValueError):
    """Raised when a module fails the hypotheses of the construction."""

    def __init__(self, report: HypothesisReport) -> None:
        self.report = report
        super().__init__("; ".join(f"({c.value}) {msg}" for c, msg in report.failures.items()))


class ConstructionError(RuntimeError):
    """Raised when a built module does not have the shape it was built for."""


class EmbeddingError(ValueError):
    """Raised when F_0 does not fit into I^k/I^{k+1}."""


class PureModuleSpec(BaseModel):
    """Shape of a pure module with degree sequence (k, ..., k+n, k+n+1+d)."""

    model_config = ConfigDict(frozen=True)

    n: int = Field(ge=1)
    k: int = Field(ge=1)
    d: int = Field(ge=0)


@dataclass(frozen=True)
class PureProfile:
    """Closed-form data of a pure module, no engine run needed."""

    n: int
    k: int
    d: int

    @classmethod
    def of(cls, spec: PureModuleSpec) -> PureProfile:
        return cls(spec.n, spec.k, spec.d)

    @property
    def degree_sequence(self) -> DegreeSequence:
        return tuple(range(self.k, self.k + self.n + 1)) + (self.k + self.n + 1 + self.d,)

    @property
    def min_generator_degree(self) -> int:
        return self.k

    @property
    def generator_count(self) -> int:
        return big_binomial(self.n + self.d, self.n)

    @property
    def pd(self) -> int:
        return self.n + 1

    @property
    def regularity(self) -> int:
        return self.k + self.d


@dataclass(frozen=True)
class ModuleInput:
    """A module M over R given by a minimal presentation, with its Betti table."""

    presentation: GradedMatrix
    betti: BettiTable
    resolution: Optional[Complex] = field(default=None, compare=False, repr=False)

    @classmethod
    def from_presentation(
        cls, presentation: GradedMatrix, strategy: Strategy = "degree"
    ) -> ModuleInput:
        """Resolve coker(presentation) over R and keep the minimal presentation.

        Raises:
            ConstructionError: If the presentation lives over a ring with y
                variables or presents the zero module.
        """
        ring = presentation.ring
        if ring.N:
            raise ConstructionError("module presentations must live over R (no y variables)")
        c = resolve(presentation, strategy=strategy)
        if c.base.rank == 0:
            raise ConstructionError("the presentation describes the zero module")
        first = c.maps[0] if c.maps else GradedMatrix.zero(GradedFreeModule(ring, ()), c.base)
        return cls(presentation=first, betti=betti_table(c), resolution=c)

    @property
    def ring(self) -> RingContext:
        return self.presentation.ring

    @property
    def n(self) -> int:
        return self.ring.n

    @property
    def generator_degrees(self) -> tuple[int, ...]:
        return self.presentation.target.twists

    @property
    def degree_sequence(self) -> DegreeSequence:
        return self.betti.max_degree_sequence()

    @property
    def min_generator_degree(self) -> int:
        return min(self.generator_degrees)

    @property
    def generator_count(self) -> int:
        return len(self.generator_degrees)

    @property
    def pd(self) -> int:
        return self.betti.pd

    @property
    def regularity(self) -> int:
        return self.betti.regularity()

    def digest(self) -> str:
        return hashlib.sha256(format_matrix(self.presentation).encode()).hexdigest()[:12]


def pure_profile(spec: PureModuleSpec) -> PureProfile:
    return PureProfile.of(spec)


ModuleLike = Union[ModuleInput, PureProfile]


class Clause(Enum):
    """Hypotheses of the construction."""

    POSITIVE = "a"  # generated in positive degrees, minimal degree k
    INCREASING = "b"  # strictly increasing maximal degree sequence
    LENGTH = "c"  # projective dimension at most n + 1
    COUNT = "d"  # generators fit into I^k/I^{k+1}


class HypothesisReport(BaseModel):
    """Outcome of ``hypothesis_check``; empty ``failures`` means pass."""

    failures: dict[Clause, str] = Field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def __bool__(self) -> bool:
        return self.passed


def hypothesis_check(m: ModuleLike, k: int, N: int) -> HypothesisReport:
    """Check every hypothesis of the construction for M, k and N.

    Clause (d) compares Σ_j β_{0,j} with binom(k+N-1, k) exactly.
    """
    report = HypothesisReport()
    t = m.degree_sequence
    if k < 1 or t[0] < 1 or m.min_generator_degree != k:
        report.failures[Clause.POSITIVE] = (
            f"need t_0 >= 1 and minimal generator degree {m.min_generator_degree} == k = {k}"
        )
    if any(a >= b for a, b in zip(t, t[1:])):
        report.failures[Clause.INCREASING] = f"degree sequence {t} is not strictly increasing"
    if m.pd > m.n + 1:
        report.failures[Clause.LENGTH] = f"projective dimension {m.pd} exceeds n + 1 = {m.n + 1}"
    if N < 1:
        report.failures[Clause.COUNT] = f"N must be positive, got {N}"
    else:
        room = big_binomial(k + N - 1, k)
        if m.generator_count > room:
            report.failures[Clause.COUNT] = (
                f"{m.generator_count} generators exceed binom(k+N-1, k) = {room}"
            )
    return report


def require_hypotheses(m: ModuleLike, k: int, N: int) -> None:
    report = hypothesis_check(m, k, N)
    if not report.passed:
        raise HypothesisError(report)


def max_jump(n: int, N: int, k: int) -> int:
    """Largest d with binom(n+d, n) <= binom(k+N-1, k)."""
    room = big_binomial(k + N - 1, k)
    lo, hi = 0, 1
    while big_binomial(n + hi, n) <= room:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if big_binomial(n + mid, n) <= room:
            lo = mid
        else:
            hi = mid
    return lo


# Pure modules -------------------------------------------------------------


@lru_cache(maxsize=64)
def _dual_power_resolution(n: int, d: int, prime: int) -> Complex:
    ring = RingContext(n, 0, prime)
    gens = [Polynomial.monomial(ring, m) for m in monomials_of_degree(n + 1, d + 1)]
    return dualize(resolve(GradedMatrix.row(ring, gens)))


def pure_module(spec: PureModuleSpec, prime: int = DEFAULT_PRIME) -> ModuleInput:
    """Pure module with degree sequence (k, k+1, ..., k+n, k+n+1+d).

    Built as the dual of the minimal resolution of R/m^{d+1}, twisted so that
    its generators sit in degree k, then checked against the closed form.

    Raises:
        ConstructionError: If the result is not pure with the expected shape.
    """
    dual = _dual_power_resolution(spec.n, spec.d, prime)
    shifted = twist_complex(dual, spec.k + spec.d + spec.n + 1)
    m = ModuleInput.from_presentation(shifted.maps[0])
    profile = pure_profile(spec)
    if not m.betti.is_pure() or m.degree_sequence != profile.degree_sequence:
        raise ConstructionError(
            f"built module has table {m.betti}, expected degrees {profile.degree_sequence}"
        )
    if m.generator_count != profile.generator_count:
        raise ConstructionError(
            f"built module has {m.generator_count} generators, expected {profile.generator_count}"
        )
    logger.info("pure module n=%d k=%d d=%d: betti %s", spec.n, spec.k, spec.d, m.betti.totals())
    return m


# Embedding and generators ---------------------------------------------------


def conormal_basis(k: int, N: int) -> list[Monomial]:
    """The degree-k monomials in y_1..y_N in lex order, as y-exponent vectors."""
    if k < 1 or N < 1:
        raise ValueError(f"conormal_basis needs k, N >= 1, got ({k}, {N})")
    return list(monomials_of_degree(N, k))


class EmbeddingEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    generator: int
    degree: int
    target: Monomial  # y-exponent vector of degree k
    multiplier: int  # power of x_0


class EmbeddingAssignment(BaseModel):
    """F_0 -> R(-k)^binom(k+N-1,k): e_i goes to x_0^(j_i - k) * y^alpha_i."""

    model_config = ConfigDict(frozen=True)

    k: int
    N: int
    entries: tuple[EmbeddingEntry, ...]

    def for_generator(self, i: int) -> EmbeddingEntry:
        for e in self.entries:
            if e.generator == i:
                return e
        raise KeyError(i)

    def describe(self, ring: RingContext) -> list[str]:
        out = []
        for e in self.entries:
            mono = ring.format_monomial(ring.y_monomial(e.target, e.multiplier))
            out.append(f"e{e.generator} -> {mono}")
        return out


def embed(m: ModuleLike, k: int, N: int) -> EmbeddingAssignment:
    """Canonical inclusion: generators by ascending degree onto the lex basis.

    Raises:
        EmbeddingError: If some generator has degree below k or there are
            more generators than basis monomials.
    """
    if not isinstance(m, ModuleInput):
        raise EmbeddingError("an explicit module is needed to embed its generators")
    degrees = m.generator_degrees
    basis = conormal_basis(k, N)
    if len(degrees) > len(basis):
        raise EmbeddingError(
            f"{len(degrees)} generators do not fit into {len(basis)} conormal directions"
        )
    order = sorted(range(len(degrees)), key=lambda i: degrees[i])
    entries = []
    for slot, i in enumerate(order):
        if degrees[i] < k:
            raise EmbeddingError(f"generator {i} has degree {degrees[i]} < k = {k}")
        entries.append(
            EmbeddingEntry(
                generator=i, degree=degrees[i], target=basis[slot], multiplier=degrees[i] - k
            )
        )
    return EmbeddingAssignment(k=k, N=N, entries=tuple(entries))


def build_jm(
    m: ModuleInput, k: int, N: int, embedding: Optional[EmbeddingAssignment] = None
) -> list[Polynomial]:
    """Generators of J_M in S = R[y_1..y_N].

    All degree-(k+1) y-monomials, followed by Σ_i s_i(x) x_0^(j_i-k) y^alpha_i
    for every nonzero column s of the presentation F_1 -> F_0.

    Raises:
        HypothesisError: If the hypotheses fail.
    """
    require_hypotheses(m, k, N)
    embedding = embedding or embed(m, k, N)
    S = RingContext(m.ring.n, N, m.ring.prime)
    gens = [Polynomial.monomial(S, S.y_monomial(a)) for a in monomials_of_degree(N, k + 1)]
    for col in m.presentation.columns:
        if col.is_zero():
            continue
        acc: dict[Monomial, int] = {}
        for i, s in col.entries().items():
            e = embedding.for_generator(i)
            shift = S.y_monomial(e.target, e.multiplier)
            for u, c in s.terms:
                key = tuple(a + b for a, b in zip(S.lift_monomial(u), shift))
                acc[key] = acc.get(key, 0) + c
        g = Polynomial(S, acc)
        if not g.is_zero():
            gens.append(g)
    return gens


# Predictions ---------------------------------------------------------------


def predicted_degree_sequence(t: Sequence[int], N: int) -> DegreeSequence:
    """(t_1, ..., t_r, t_r + 1, ..., t_r + N).

    Raises:
        ValueError: If t is empty or not strictly increasing.
    """
    if not t or any(a >= b for a, b in zip(t, t[1:])):
        raise ValueError(f"degree sequence {tuple(t)} must be nonempty and strictly increasing")
    return tuple(t[1:]) + tuple(t[-1] + q for q in range(1, N + 1))


def e_betti_predicted(betti_m: BettiTable, N: int) -> BettiTable:
    """Betti table over S of E = im(F_1 -> F_0), from G[y] ⊗ K(y_1..y_N).

    β_{i,j}(E) = Σ_q binom(N, q) β^R_{i+1-q, j-q}(M), over q <= i.
    """
    entries: dict[tuple[int, int], int] = {}
    for (i, j), b in betti_m.entries.items():
        if i < 1:
            continue
        for q in range(N + 1):
            key = (i - 1 + q, j + q)
            entries[key] = entries.get(key, 0) + big_binomial(N, q) * b
    return BettiTable(entries)


def predicted_betti_jm(betti_m: BettiTable, k: int, N: int) -> BettiTable:
    """β(J_M) = β(I^{k+1}) + β(E), the two ends of 0 -> I^{k+1} -> J_M -> E -> 0."""
    return power_ideal_betti(N, k + 1) + e_betti_predicted(betti_m, N)


def e_betti_over_s(m: ModuleInput, N: int, strategy: Strategy = "degree") -> BettiTable:
    """Resolve E over S directly from the presentation [d_2 | y_1 Id | ... | y_N Id]."""
    S = RingContext(m.ring.n, N, m.ring.prime)
    f1 = m.presentation.source
    if f1.rank == 0:
        return BettiTable()
    target = GradedFreeModule(S, f1.twists)
    blocks = []
    if m.resolution is not None and m.resolution.length >= 2:
        blocks.append(m.resolution.maps[1].lift_to(S))
    for q in range(1, N + 1):
        cols = [
            ModuleElement(target, {(i, S.y(q)): 1}) for i in range(target.rank)
        ]
        blocks.append(GradedMatrix(target.twisted(1), target, cols))
    return betti_table(resolve(GradedMatrix.hstack(blocks), strategy=strategy))


# Verification --------------------------------------------------------------


class EmbeddingRecord(BaseModel):
    generator: int
    degree: int
    image: str


class JmCertificate(BaseModel):
    """Predicted against computed data for one J_M instance."""

    n: int
    N: int
    k: int
    d: Optional[int] = None
    module_hash: Optional[str] = None
    prime: int
    strategy: str
    convention: str = IDEAL_CONVENTION
    embedding: list[EmbeddingRecord]
    generator_count: int
    predicted_sequence: list[int]
    computed_sequence: list[int]
    predicted_regularity: int
    computed_regularity: int
    module_regularity: int
    predicted_betti: BettiTableModel
    computed_betti: BettiTableModel
    checks: dict[str, bool]
    mismatches: list[str]
    passed: bool
    wall_time: float

    def predicted_table(self) -> BettiTable:
        return BettiTable.from_model(self.predicted_betti)

    def computed_table(self) -> BettiTable:
        return BettiTable.from_model(self.computed_betti)


def verify(
    source: Union[PureModuleSpec, ModuleInput],
    N: int,
    *,
    k: Optional[int] = None,
    prime: int = DEFAULT_PRIME,
    strategy: Strategy = "degree",
    generators: Optional[Sequence[Polynomial]] = None,
    expect_seq: Optional[Sequence[int]] = None,
    deadline: Optional[float] = None,
) -> JmCertificate:
    """Build J_M, resolve it and compare every invariant with its prediction.

    Raises:
        HypothesisError: If the hypotheses fail.
        BudgetExceeded: If ``deadline`` passes.
    """
    started = time.monotonic()
    if isinstance(source, PureModuleSpec):
        require_hypotheses(pure_profile(source), source.k, N)
        m = pure_module(source, prime)
        k = source.k
        d: Optional[int] = source.d
    else:
        m = source
        k = k if k is not None else m.min_generator_degree
        d = None
    require_hypotheses(m, k, N)
    embedding = embed(m, k, N)
    S = RingContext(m.ring.n, N, m.ring.prime)
    gens = list(generators) if generators is not None else build_jm(m, k, N, embedding)

    presentation = GradedMatrix.row(S, gens)
    quotient = resolve(presentation, strategy=strategy, deadline=deadline)
    quotient_table = betti_table(quotient)
    computed = ideal_table(quotient_table)

    predicted = predicted_betti_jm(m.betti, k, N)
    t = m.degree_sequence
    r = m.pd
    if r >= 1:
        predicted_seq = predicted_degree_sequence(t, N)
        predicted_reg = m.regularity + 1
    else:
        predicted_seq = tuple(k + 1 + i for i in range(N))
        predicted_reg = k + 1
    if expect_seq is not None:
        predicted_seq = tuple(expect_seq)

    j_basis = ideal_basis(gens, S, strategy=strategy, deadline=deadline)
    power_k = ideal_basis(
        [Polynomial.monomial(S, S.y_monomial(a)) for a in monomials_of_degree(N, k)], S
    )
    support = all(
        reduce_polynomial(Polynomial.monomial(S, S.y_monomial(a)), j_basis).is_zero()
        for a in monomials_of_degree(N, k + 1)
    )
    containment = all(reduce_polynomial(g, power_k).is_zero() for g in gens)

    computed_seq = computed.max_degree_sequence() if computed else ()
    computed_reg = computed.regularity() if computed else 0
    checks = {
        "sequence": computed_seq == predicted_seq,
        "regularity": computed_reg == predicted_reg,
        "betti": computed == predicted,
        "prediction_consistent": (predicted.max_degree_sequence() == predicted_seq)
        if expect_seq is None
        else True,
        "support": support,
        "containment": containment,
        "complex": bool(compose_is_zero(quotient)),
        "hilbert": hilbert_check(presentation, quotient_table),
    }
    mismatches = []
    if not checks["sequence"]:
        mismatches.append(f"sequence: predicted {predicted_seq}, computed {computed_seq}")
    if not checks["regularity"]:
        mismatches.append(f"regularity: predicted {predicted_reg}, computed {computed_reg}")
    for (i, j), (a, b) in computed.difference(predicted).items():
        mismatches.append(f"beta_{i},{j}: computed {a}, predicted {b}")
    for name in ("prediction_consistent", "support", "containment", "complex", "hilbert"):
        if not checks[name]:
            mismatches.append(f"{name} check failed")

    passed = all(checks.values())
    cert = JmCertificate(
        n=m.n,
        N=N,
        k=k,
        d=d,
        module_hash=None if d is not None else m.digest(),
        prime=m.ring.prime,
        strategy=strategy,
        embedding=[
            EmbeddingRecord(
                generator=e.generator,
                degree=e.degree,
                image=S.format_monomial(S.y_monomial(e.target, e.multiplier)),
            )
            for e in embedding.entries
        ],
        generator_count=len(gens),
        predicted_sequence=list(predicted_seq),
        computed_sequence=list(computed_seq),
        predicted_regularity=predicted_reg,
        computed_regularity=computed_reg,
        module_regularity=m.regularity,
        predicted_betti=predicted.to_model(),
        computed_betti=computed.to_model(),
        checks=checks,
        mismatches=mismatches,
        passed=passed,
        wall_time=round(time.monotonic() - started, 6),
    )
    logger.info(
        "verify n=%d N=%d k=%d: %s (%.2fs)", m.n, N, k, "pass" if passed else "FAIL", cert.wall_time
    )
    return cert


# Growth scan --------------------------------------------------------------


SCAN_COLUMNS = ["k", "d_max", "reg_predicted", "reg_computed", "seconds"]


@dataclass
class ScanResult:
    """Scan rows plus the fitted growth exponents of the predicted column."""

    n: int
    N: int
    table: pd.DataFrame
    adjusted_slope: float  # against log(k + N/2)
    raw_slope: float  # against log k
    certificates: dict[int, JmCertificate] = field(default_factory=dict)

    def to_csv(self) -> str:
        return self.table.to_csv(index=False)


def _scan_instance(
    n: int, N: int, k: int, max_seconds: Optional[float], prime: int
) -> tuple[dict, Optional[JmCertificate]]:
    d = max_jump(n, N, k)
    profile = PureProfile(n, k, d)
    row = {
        "k": k,
        "d_max": d,
        "reg_predicted": profile.regularity + 1,
        "reg_computed": None,
        "seconds": None,
    }
    if max_seconds is None or max_seconds <= 0:
        return row, None
    started = time.monotonic()
    try:
        cert = verify(
            PureModuleSpec(n=n, k=k, d=d), N, prime=prime, deadline=started + max_seconds
        )
    except BudgetExceeded:
        logger.info("scan k=%d: over budget after %.1fs", k, max_seconds)
        return row, None
    row["reg_computed"] = cert.computed_regularity
    row["seconds"] = cert.wall_time
    return row, cert


def _fit(x: Sequence[float], y: Sequence[float]) -> float:
    if len(x) < 2:
        return math.nan
    return float(linregress(np.log(x), np.log(y)).slope)


def scan(
    n: int,
    N: int,
    ks: Sequence[int],
    max_seconds: Optional[float] = 30.0,
    jobs: int = 1,
    prime: int = DEFAULT_PRIME,
) -> ScanResult:
    """Predicted (always) and computed (within budget) reg J_M for each k.

    Each k uses the largest admissible jump d_max, so reg J_M = k + d_max + 1
    grows like k^{(N-1)/n}.
    """
    ks = sorted(set(ks))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_scan_instance, n, N, k, max_seconds, prime) for k in ks]
            results = [f.result() for f in futures]
    else:
        results = [_scan_instance(n, N, k, max_seconds, prime) for k in ks]
    table = pd.DataFrame([row for row, _ in results], columns=SCAN_COLUMNS)
    table["reg_computed"] = table["reg_computed"].astype("Int64")
    regs = table["reg_predicted"].astype(float).tolist()
    adjusted_slope = _fit([k + N / 2 for k in ks], regs)
    raw_slope = _fit([float(k) for k in ks], regs)
    certs = {row["k"]: cert for row, cert in results if cert is not None}
    return ScanResult(n, N, table, adjusted_slope, raw_slope, certs)


# Export --------------------------------------------------------------------


class ExportFormat(Enum):
    TEXT = "text"
    JSON = "json"
    CAS = "cas"


class RingModel(BaseModel):
    n: int
    N: int
    prime: int


class GeneratorsModel(BaseModel):
    ring: RingModel
    generators: list[str]


def export_generators(
    generators: Sequence[Polynomial], fmt: ExportFormat, ring: RingContext
) -> str:
    """Render generators as plain lines, JSON or a CAS ideal with ring preamble."""
    lines = [format_polynomial(g) for g in generators]
    if fmt is ExportFormat.TEXT:
        return "\n".join(lines) + "\n"
    if fmt is ExportFormat.JSON:
        model = GeneratorsModel(
            ring=RingModel(n=ring.n, N=ring.N, prime=ring.prime), generators=lines
        )
        return model.model_dump_json(indent=2) + "\n"
    names = ",".join(ring.names)
    body = ", ".join(lines)
    return f"S = ZZ/{ring.prime}[{names}];\nJ = ideal({body});\n"


_CAS_RING = re.compile(r"ZZ\s*/\s*(?P<p>\d+)\s*\[(?P<names>[^\]]*)\]")
_CAS_IDEAL = re.compile(r"ideal\s*\((?P<body>.*)\)", re.S)


def read_generators(
    text: str, ring: Optional[RingContext] = None
) -> tuple[RingContext, list[Polynomial]]:
    """Parse any format written by ``export_generators``.

    Without an explicit ring the JSON header, the CAS preamble, or the
    variable names in use decide it.
    """
    stripped = text.strip()
    if stripped.startswith("{"):
        model = GeneratorsModel.model_validate(json.loads(stripped))
        ring = ring or RingContext(model.ring.n, model.ring.N, model.ring.prime)
        return ring, [parse_polynomial(g, ring) for g in model.generators]
    match = _CAS_IDEAL.search(stripped)
    if match:
        header = _CAS_RING.search(stripped)
        if ring is None:
            if header is None:
                raise ValueError("CAS input needs a ring preamble like S = ZZ/p[x0,...]")
            names = [s.strip() for s in header["names"].split(",") if s.strip()]
            ring = ring_from_names(names, int(header["p"]))
        body = match["body"]
        return ring, [parse_polynomial(g, ring) for g in body.split(",") if g.strip()]
    lines = [ln.strip() for ln in stripped.splitlines() if ln.strip() and not ln.startswith("#")]
    if ring is None:
        ring = ring_from_names(re.findall(r"\b[xy]\d+\b", stripped))
    return ring, [parse_polynomial(ln, ring) for ln in lines]
