"""
The image set f(M_n): evaluation, classification, Capelli dependence and the
seeded witness searches the certificate pipelines start from.

Every search is deterministic in (seed, budget): trial t draws from its own
random.Random seeded by SHA-256 of (seed, search label, t).
"""
import hashlib
import os
import random
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .errors import (
    EnumerationCapError,
    FieldMismatchError,
    IdentityPolynomialError,
    PreconditionError,
    SearchFailure,
)
from .exactmat import (
    Conjugator,
    Mat,
    eigen_triangular_conjugator,
    max_root_multiplicity,
    rank_of_rows,
    rational_spectrum,
)
from .fields import Field
from .freealg import Poly, Word, capelli

ENUM_CAP = int(os.getenv("NCW_ENUM_CAP", "200000"))
UNIT_TUPLE_CAP = int(os.getenv("NCW_UNIT_TUPLE_CAP", "4096"))
SPECTRUM_HEIGHT = int(os.getenv("NCW_SPECTRUM_HEIGHT", "6"))

PROVEN = "proven"
RANDOMIZED = "randomized"


# ---- evaluation ----

@dataclass(frozen=True)
class EvalPoint:
    args: Tuple[Mat, ...]

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not self.args:
            raise PreconditionError("an evaluation point needs at least one matrix")
        first = self.args[0]
        for a in self.args[1:]:
            first._check(a)

    @property
    def n(self) -> int:
        return self.args[0].n

    @property
    def field(self) -> Field:
        return self.args[0].field

    def __len__(self) -> int:
        return len(self.args)


def _word_value(w: Word, args: Tuple[Mat, ...], cache: Dict[Word, Mat]) -> Mat:
    if w in cache:
        return cache[w]
    k = len(w) - 1
    while w[:k] not in cache:
        k -= 1
    m = cache[w[:k]]
    for j in range(k, len(w)):
        m = m @ args[w[j] - 1]
        cache[w[:j + 1]] = m
    return m


def evaluate(f: Poly, point: EvalPoint) -> Mat:
    if f.field != point.field:
        raise FieldMismatchError(f"polynomial over {f.field} evaluated at matrices over {point.field}")
    if len(point) < f.nvars:
        raise PreconditionError(f"polynomial in {f.nvars} variables needs {f.nvars} matrices, got {len(point)}")
    n, field = point.n, point.field
    cache: Dict[Word, Mat] = {(): Mat.identity(n, field)}
    total = Mat.zeros(n, field)
    for w, c in f.items():
        total = total + _word_value(w, point.args, cache) * c
    return total


@dataclass(frozen=True)
class ImageWitness:
    """value == conjugator.apply(f(point)), or f(point) without a conjugator."""

    value: Mat
    point: EvalPoint
    conjugator: Optional[Conjugator] = None

    @classmethod
    def at(cls, f: Poly, point: EvalPoint) -> "ImageWitness":
        return cls(evaluate(f, point), point)

    def transported(self, conj: Conjugator) -> "ImageWitness":
        inner = self.conjugator
        return ImageWitness(conj.apply(self.value), self.point, conj if inner is None else conj.compose(inner))

    def recheck(self, f: Poly) -> bool:
        raw = evaluate(f, self.point)
        if self.conjugator is not None:
            raw = self.conjugator.apply(raw)
        return raw == self.value


# ---- seeded sampling ----

def derive_seed(seed: int, label: str, trial: int) -> int:
    digest = hashlib.sha256(f"{seed}:{label}:{trial}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def trial_rng(seed: int, label: str, trial: int) -> random.Random:
    return random.Random(derive_seed(seed, label, trial))


def default_height(f: Poly, n: int) -> int:
    return max(2 * max(f.degree, 1) * n * n, 2)


def random_matrix(rng: random.Random, n: int, field: Field, height: int, shape: str = "dense") -> Mat:
    def entry() -> int:
        return rng.randint(-height, height)

    def nonzero() -> int:
        while True:
            v = rng.randint(-height, height)
            if field.coerce(v) != 0:
                return v

    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if shape == "dense":
                rows[i][j] = entry()
            elif shape == "upper" and i <= j:
                rows[i][j] = entry()
            elif shape == "lower" and i >= j:
                rows[i][j] = entry()
            elif shape == "diagonal" and i == j:
                rows[i][j] = entry()
            elif shape == "upper_shift" and j == i + 1:
                rows[i][j] = nonzero()
            elif shape == "lower_shift" and i == j + 1:
                rows[i][j] = nonzero()
    return Mat(rows, field)


def random_point(rng: random.Random, m: int, n: int, field: Field, height: int,
                 shapes: Sequence[str] = ("dense",)) -> EvalPoint:
    return EvalPoint(tuple(random_matrix(rng, n, field, height, shapes[i % len(shapes)]) for i in range(m)))


def unit_matrices(n: int, field: Field) -> List[Mat]:
    return [Mat.unit(n, i, j, field) for i in range(1, n + 1) for j in range(1, n + 1)]


def all_points(n: int, m: int, field: Field) -> Iterator[EvalPoint]:
    p = field.characteristic
    if p == 0:
        raise PreconditionError("enumeration needs a prime field")
    count = p ** (n * n * m)
    if count > ENUM_CAP:
        raise EnumerationCapError(f"{count} points over {field} exceed the cap {ENUM_CAP}")
    mats = [Mat([list(entries[i * n:(i + 1) * n]) for i in range(n)], field)
            for entries in product(range(p), repeat=n * n)]
    for args in product(mats, repeat=m):
        yield EvalPoint(args)


# ---- classification ----

class ImageKind(str, Enum):
    IDENTITY = "identity"
    CENTRAL = "central"
    NEITHER = "neither"


@dataclass(frozen=True)
class Classification:
    kind: ImageKind
    confidence: str
    seed: int
    trials: int
    witness: Optional[ImageWitness] = None


def _classify_points(f: Poly, points: Iterable[EvalPoint], confidence: str, seed: int) -> Classification:
    trials = 0
    central = None
    for point in points:
        trials += 1
        value = evaluate(f, point)
        if not value.is_scalar():
            # a non-scalar value settles it whatever the sampling
            return Classification(ImageKind.NEITHER, PROVEN, seed, trials, ImageWitness(value, point))
        if central is None and not value.is_zero():
            central = ImageWitness(value, point)
    kind = ImageKind.CENTRAL if central is not None else ImageKind.IDENTITY
    return Classification(kind, confidence, seed, trials, central)


def _commutative_collapse(f: Poly) -> Poly:
    out: Dict[Word, object] = {}
    for w, c in f.items():
        key = tuple(sorted(w))
        out[key] = out.get(key, 0) + c
    return Poly(out, f.field)


def classify_on_mn(f: Poly, n: int, budget: int, seed: int, exhaustive: bool = False) -> Classification:
    if n < 1:
        raise PreconditionError(f"dimension must be positive, got {n}")
    field = f.field
    m = max(f.nvars, 1)
    height = default_height(f, n)

    if f.is_constant():
        if f.is_zero():
            return Classification(ImageKind.IDENTITY, PROVEN, seed, 0)
        point = EvalPoint((Mat.zeros(n, field),))
        return Classification(ImageKind.CENTRAL, PROVEN, seed, 0, ImageWitness.at(f, point))

    if n == 1 and field.is_rational:
        # M_1(Q) = Q: identity exactly when the commutative image polynomial vanishes
        if _commutative_collapse(f).is_zero():
            return Classification(ImageKind.IDENTITY, PROVEN, seed, 0)
        for t in range(budget):
            point = random_point(trial_rng(seed, "classify", t), m, 1, field, height)
            value = evaluate(f, point)
            if not value.is_zero():
                return Classification(ImageKind.CENTRAL, PROVEN, seed, t + 1, ImageWitness(value, point))
        return Classification(ImageKind.CENTRAL, PROVEN, seed, budget)

    if f.is_multilinear() and (n * n) ** m <= UNIT_TUPLE_CAP:
        units = unit_matrices(n, field)
        points = (EvalPoint(args) for args in product(units, repeat=m))
        return _classify_points(f, points, PROVEN, seed)

    if exhaustive:
        return _classify_points(f, all_points(n, m, field), PROVEN, seed)

    points = (random_point(trial_rng(seed, "classify", t), m, n, field, height) for t in range(budget))
    return _classify_points(f, points, RANDOMIZED, seed)


# ---- local linear dependence ----

@dataclass(frozen=True)
class DependenceResult:
    dependent: bool
    confidence: str
    trials: int
    point: Optional[EvalPoint] = None
    values: Tuple[Mat, ...] = ()
    ys: Tuple[Mat, ...] = ()
    capelli_value: Optional[Mat] = None
    rank: Optional[int] = None


def _capelli_certificate(values: Tuple[Mat, ...], budget: int, seed: int) -> Tuple[Tuple[Mat, ...], Mat]:
    s = len(values)
    n, field = values[0].n, values[0].field
    cs = capelli(s).over(field)
    if s == 1:
        return (), evaluate(cs, EvalPoint(values))
    if (n * n) ** (s - 1) <= UNIT_TUPLE_CAP:
        candidates: Iterable[Tuple[Mat, ...]] = product(unit_matrices(n, field), repeat=s - 1)
    else:
        height = 2 * n * n
        candidates = (random_point(trial_rng(seed, "capelli-y", t), s - 1, n, field, height).args
                      for t in range(max(budget, 1)))
    for ys in candidates:
        value = evaluate(cs, EvalPoint(values + tuple(ys)))
        if not value.is_zero():
            return tuple(ys), value
    raise SearchFailure(f"values are independent but no Capelli witness was found in {budget} tries")


def capelli_dependence_test(fs: Sequence[Poly], n: int, budget: int, seed: int,
                            exhaustive: bool = False) -> DependenceResult:
    """
    Local linear dependence of fs on M_n, decided through c_s(f1..fs, Y1..Ys-1):
    independence is always returned with a point where the values have full
    rank and Y-values where the Capelli value is nonzero.
    """
    if not fs:
        raise PreconditionError("need at least one polynomial")
    field = fs[0].field
    for f in fs[1:]:
        if f.field != field:
            raise FieldMismatchError(f"polynomials over {field} and {f.field}")
    s = len(fs)
    if s > n * n:
        return DependenceResult(True, PROVEN, 0)
    m = max(max(f.nvars for f in fs), 1)
    if exhaustive:
        points: Iterable[EvalPoint] = all_points(n, m, field)
        confidence = PROVEN
    else:
        height = max(default_height(f, n) for f in fs)
        points = (random_point(trial_rng(seed, "dependence", t), m, n, field, height) for t in range(budget))
        confidence = RANDOMIZED
    trials = 0
    for point in points:
        trials += 1
        values = tuple(evaluate(f, point) for f in fs)
        rank = rank_of_rows([v.flatten() for v in values], field)
        if rank == s:
            ys, value = _capelli_certificate(values, budget, seed)
            return DependenceResult(False, PROVEN, trials, point, values, ys, value, rank)
    return DependenceResult(True, confidence, trials)


@dataclass(frozen=True)
class PowerIndex:
    k: int
    tail_independent: bool
    dependence: DependenceResult
    tail: DependenceResult


def power_dependence_index(f: Poly, n: int, budget: int, seed: int) -> PowerIndex:
    """Least k with 1, f, ..., f^k locally dependent on M_n."""
    if classify_on_mn(f, n, budget, seed).kind == ImageKind.IDENTITY:
        raise IdentityPolynomialError(f"polynomial is an identity of M_{n}")
    one = Poly.const(1, f.field)
    powers = [f ** i for i in range(1, n + 1)]
    for k in range(1, n + 1):
        dep = capelli_dependence_test([one] + powers[:k], n, budget, seed)
        if dep.dependent:
            tail = capelli_dependence_test(powers[:k], n, budget, seed)
            return PowerIndex(k, not tail.dependent, dep, tail)
    raise SearchFailure(f"no dependence found up to k = {n}")


# ---- witness searches ----

def find_invertible_witness(f: Poly, n: int, budget: int, seed: int) -> ImageWitness:
    field = f.field
    m = max(f.nvars, 1)
    height = default_height(f, n)
    for t in range(budget):
        point = random_point(trial_rng(seed, "invertible", t), m, n, field, height)
        value = evaluate(f, point)
        if value.is_invertible():
            return ImageWitness(value, point)
    raise SearchFailure(f"no invertible value in {budget} trials")


# point shapes cycled through by the spectrum search, one per trial
SPECTRUM_PATTERNS: Tuple[Tuple[str, ...], ...] = (
    ("upper_shift", "lower_shift"),
    ("upper",),
    ("lower_shift", "upper_shift"),
    ("dense",),
)


def find_split_spectrum_witness(f: Poly, n: int, budget: int, seed: int) -> ImageWitness:
    """
    A value of f with rational eigenvalues, each of multiplicity at most n/2,
    conjugated into block upper triangular eigen-order. Candidates with more
    distinct eigenvalues win, then smaller entries.
    """
    if not f.field.is_rational:
        raise PreconditionError("split-spectrum search runs over the rationals")
    kind = classify_on_mn(f, n, budget, seed).kind
    if kind != ImageKind.NEITHER:
        raise PreconditionError(f"polynomial is {kind.value} on M_{n}")
    field = f.field
    m = max(f.nvars, 1)
    best = None
    closest: Optional[Tuple[int, ImageWitness]] = None
    for t in range(budget):
        rng = trial_rng(seed, "spectrum", t)
        point = random_point(rng, m, n, field, SPECTRUM_HEIGHT, SPECTRUM_PATTERNS[t % len(SPECTRUM_PATTERNS)])
        value = evaluate(f, point)
        spectrum = rational_spectrum(value)
        if spectrum.splits and 2 * spectrum.max_multiplicity <= n:
            key = (-spectrum.distinct, value.height(), t)
            if best is None or key < best[0]:
                best = (key, point, value, spectrum)
            if spectrum.distinct == n:
                break
        elif best is None:
            mult = max_root_multiplicity(value)
            if closest is None or mult < closest[0]:
                closest = (mult, ImageWitness(value, point))
    if best is None:
        raise SearchFailure(
            f"no rational-split witness found in {budget} trials "
            "(existence is only guaranteed over the algebraic closure)",
            best=closest[1] if closest else None,
        )
    _, point, value, spectrum = best
    conj = eigen_triangular_conjugator(value, spectrum)
    return ImageWitness(conj.unapply(value), point, conj.inverse())


def find_nonzero_trace_witness(f: Poly, n: int, budget: int, seed: int,
                               hint: Optional[EvalPoint] = None) -> ImageWitness:
    if hint is not None:
        value = evaluate(f, hint)
        if value.trace() != 0:
            return ImageWitness(value, hint)
    field = f.field
    m = max(f.nvars, 1)
    height = default_height(f, n)
    for t in range(budget):
        point = random_point(trial_rng(seed, "trace", t), m, n, field, height)
        value = evaluate(f, point)
        if value.trace() != 0:
            return ImageWitness(value, point)
    raise SearchFailure(f"every value seen in {budget} trials is traceless")


def exhaustive_image(f: Poly, n: int, p: int) -> frozenset:
    field = Field.prime(p)
    g = f.over(field)
    m = max(g.nvars, 1)
    return frozenset(evaluate(g, point) for point in all_points(n, m, field))
