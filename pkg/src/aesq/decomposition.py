"""Pointwise evaluation of the sieve decomposition of the prime indicator.

The prime indicator varpi is split by repeated application of the sieve
recursion  psi(m, z1) = psi(m, z2) - sum_{z2 <= p < z1} psi(m/p, p)  into the
pieces gamma_1 .. gamma_11 and the starred pieces gamma_5* .. gamma_9*, from
which the minorant/majorant weights lambda_1, lambda_2, lambda_3 are built.
Every sum here is evaluated literally on concrete integers, which makes the
combinatorial identities between the pieces machine-checkable.

Boundary conventions follow the printed inequalities exactly: the cutoffs
z, U, V are real and compared against integer primes with the strict or
non-strict comparisons as written (z <= p < U, U <= p <= V, V < p < sqrt_x1,
p <= sqrt(V), ...); ties are never rounded.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from . import primes as pt
from .constants import SieveParams
from .errors import CapacityError, DomainError

GAMMA_INDICES = tuple(range(1, 12))
GAMMA_STAR_INDICES = (5, 6, 7, 8, 9)


@dataclass(frozen=True)
class DecompParams:
    """Cutoffs for the decomposition: 2 <= z < U < V < sqrt_x1^2."""

    z: float
    U: float
    V: float
    sqrt_x1: float
    theta: float | None = None  # set when derived from exponents
    x: float | None = None

    def __post_init__(self):
        if not (2 <= self.z < self.U < self.V < self.sqrt_x1**2):
            raise DomainError(
                f"require 2 <= z < U < V < sqrt_x1^2, got {self.z}, {self.U}, {self.V}, {self.sqrt_x1}"
            )

    @classmethod
    def from_exponents(cls, theta, x: float, sigma=None) -> "DecompParams":
        """Cutoffs z = x^e_z, U = x^e_U, V = x^e_V at scale x."""
        sp = SieveParams.for_theta(theta, sigma=sigma, x=x)
        return cls(
            z=x ** float(sp.e_z),
            U=x ** float(sp.e_U),
            V=x ** float(sp.e_V),
            sqrt_x1=math.sqrt(x + x ** float(sp.theta)),
            theta=float(sp.theta),
            x=x,
        )

    @property
    def x1(self) -> float:
        return self.sqrt_x1**2

    def check_e_applicable(self) -> bool:
        """Whether gamma_8* - gamma_9* = gamma_11 is forced, i.e. U/z <= sqrt(V).

        The comparison carries a relative slack: at the boundary exponent the
        two cutoffs coincide as reals and only differ by float rounding.
        """
        return self.U / self.z <= math.sqrt(self.V) * (1 + 1e-9)

    def interval(self) -> tuple[int, int]:
        """Endpoints of the scale window (x - x^theta, x + x^theta].

        Returned as integers (lo, hi) with the same half-open convention:
        the window holds exactly the integers m with lo < m <= hi.
        """
        if self.theta is None or self.x is None:
            raise DomainError("params were not derived from a scale x")
        half = self.x ** self.theta
        return math.floor(self.x - half), math.floor(self.x + half)


# --- factor-multiset helpers -------------------------------------------------

def _factor_multiset(m: int, bound: float) -> list[int]:
    """Sorted multiset of prime factors of m below `bound`."""
    out: list[int] = []
    for p, e in pt.factorize(m).factors:
        if p >= bound:
            break
        out.extend([p] * e)
    return out


def _psi_without(fs: list[int], removed: tuple[int, ...], w: float) -> int:
    """psi(m / prod(removed), w) given the sorted small-factor multiset of m.

    `removed` must be a multiset of entries of fs; factors >= the sieving
    bound that produced fs never matter because w stays below that bound.
    """
    skip = list(removed)
    for f in fs:
        if f >= w:
            break
        if f in skip:
            skip.remove(f)
            continue
        return 0
    return 1


@dataclass
class _Evaluator:
    """All gamma values of one m, computed from its small-factor multiset."""

    params: DecompParams
    m: int
    fs: list[int] = field(default_factory=list)

    def __post_init__(self):
        self.fs = _factor_multiset(self.m, self.params.sqrt_x1)
        self.distinct = sorted(set(self.fs))

    def psi_m(self, w: float) -> int:
        return 0 if (self.fs and self.fs[0] < w) else 1

    def varpi(self) -> int:
        # psi(m, sqrt_x1) is what the decomposition telescopes to; it equals
        # the prime indicator exactly when m <= x1 (i.e. m in the window).
        return self.psi_m(self.params.sqrt_x1)

    def gamma(self, j: int) -> int:
        p = self.params
        if j == 1:
            return self.psi_m(p.z)
        if j == 2:
            return self._single(p.z, p.U, "pp")
        if j == 3:
            return self._single(p.U, p.V, "pp", hi_closed=True)
        if j == 4:
            return self._single(p.V, p.sqrt_x1, "pp", lo_open=True)
        if j == 5:
            return self._single(p.z, p.U, "z")
        if j == 6:
            return self._pairs(lambda q: q < p.U, "p2")
        if j == 7:
            return self._pairs(lambda q: p.U <= q <= p.V, "p2")
        if j == 8:
            return self._pairs(lambda q: q > p.V, "p2")
        if j == 9:
            return self._pairs(lambda q: q < p.U, "z")
        if j == 10:
            return self._triples(lambda q3: q3 <= p.V)
        if j == 11:
            return self._triples(lambda q3: q3 > p.V)
        raise DomainError(f"gamma index {j} not in 1..11")

    def gamma_star(self, j: int) -> int:
        p = self.params
        sqV = math.sqrt(p.V)
        if j == 5:
            return self._single(sqV, p.U, "pp", lo_open=True)
        if j == 6:
            return self._single(p.z, sqV, "z", hi_closed=True)
        if j == 7:
            total = 0
            for i1, p1 in enumerate(self.distinct):
                if not (p.z <= p1 <= sqV):
                    continue
                for p2 in self.distinct[:i1]:
                    if p2 < p.z:
                        continue
                    total += _psi_without(self.fs, (p1, p2), p.z)
            return total
        if j in (8, 9):
            total = 0
            for i1, p1 in enumerate(self.distinct):
                if not (p.z <= p1 <= sqV):
                    continue
                for i2 in range(i1):
                    p2 = self.distinct[i2]
                    if p2 < p.z:
                        continue
                    for p3 in self.distinct[:i2]:
                        if p3 < p.z:
                            continue
                        if j == 9 and not (p1 * p2 >= p.U or p1 * p2 * p3 <= p.V):
                            continue
                        total += _psi_without(self.fs, (p1, p2, p3), p3)
            return total
        raise DomainError(f"gamma* index {j} not in 5..9")

    # sum over single primes p | m in [lo, hi) (or as adjusted), inner cutoff
    def _single(self, lo, hi, cutoff, lo_open=False, hi_closed=False) -> int:
        total = 0
        for p1 in self.distinct:
            if (p1 <= lo if lo_open else p1 < lo):
                continue
            if (p1 > hi if hi_closed else p1 >= hi):
                continue
            w = self.params.z if cutoff == "z" else p1
            total += _psi_without(self.fs, (p1,), w)
        return total

    # pairs z <= p2 < p1 < U with a condition on q = p1*p2
    def _pairs(self, cond, cutoff) -> int:
        p = self.params
        total = 0
        for i1, p1 in enumerate(self.distinct):
            if not (p.z <= p1 < p.U):
                continue
            for p2 in self.distinct[:i1]:
                if p2 < p.z:
                    continue
                if not cond(p1 * p2):
                    continue
                w = p.z if cutoff == "z" else p2
                total += _psi_without(self.fs, (p1, p2), w)
        return total

    # triples z <= p3 < p2 < p1 < U with p1*p2 < U and a condition on p1*p2*p3
    def _triples(self, cond3) -> int:
        p = self.params
        total = 0
        for i1, p1 in enumerate(self.distinct):
            if not (p.z <= p1 < p.U):
                continue
            for i2 in range(i1):
                p2 = self.distinct[i2]
                if p2 < p.z or p1 * p2 >= p.U:
                    continue
                for p3 in self.distinct[:i2]:
                    if p3 < p.z:
                        continue
                    if not cond3(p1 * p2 * p3):
                        continue
                    total += _psi_without(self.fs, (p1, p2, p3), p3)
        return total


def buchstab_identity_check(m: int, z1: float, z2: float) -> tuple[int, int]:
    """Both sides of psi(m, z1) = psi(m, z2) - sum_{z2 <= p < z1} psi(m/p, p)."""
    if not (2 <= z2 < z1):
        raise DomainError(f"require 2 <= z2 < z1, got z1={z1}, z2={z2}")
    if m < 1:
        raise DomainError(f"require m >= 1, got {m}")
    lhs = pt.psi(m, z1)
    rhs = pt.psi(m, z2)
    for p in pt.primes_upto(pt._ceil_excl(z1)):
        if p < z2:
            continue
        if m % p == 0:
            rhs -= pt.psi(m // p, p)
        # psi of a non-integer is 0; nothing to subtract
    return lhs, rhs


def gamma_eval(j: int, m: int, params: DecompParams, star: bool = False) -> int:
    """One decomposition piece at one integer; j in 1..11 (or 5..9 starred)."""
    if m < 1:
        raise DomainError(f"require m >= 1, got {m}")
    ev = _Evaluator(params, m)
    return ev.gamma_star(j) if star else ev.gamma(j)


def lambda_eval(i: int, m: int, params: DecompParams) -> int:
    """lambda_1, lambda_2 or lambda_3 as the definitional gamma combination."""
    ev = _Evaluator(params, m)
    if i == 1:
        return ev.gamma(1) - ev.gamma(3) - ev.gamma(5) + ev.gamma(7) + ev.gamma(9) - ev.gamma(10)
    if i == 2:
        return ev.gamma(4) + ev.gamma(11)
    if i == 3:
        return (
            ev.gamma(1) - ev.gamma(3) - ev.gamma_star(6) + ev.gamma_star(7) - ev.gamma_star(9)
        )
    raise DomainError(f"lambda index {i} not in 1..3")


@dataclass(frozen=True)
class DecompValue:
    """All pieces at one integer, with the lambda combinations."""

    m: int
    gamma: tuple[int, ...]       # gamma_1 .. gamma_11
    gamma_star: tuple[int, ...]  # gamma_5* .. gamma_9*
    varpi: int

    @property
    def lambda1(self) -> int:
        g = self.gamma
        return g[0] - g[2] - g[4] + g[6] + g[8] - g[9]

    @property
    def lambda2(self) -> int:
        g = self.gamma
        return g[3] + g[10]

    @property
    def lambda3(self) -> int:
        g, gs = self.gamma, self.gamma_star
        return g[0] - g[2] - gs[1] + gs[2] - gs[4]


def decomp_value(m: int, params: DecompParams) -> DecompValue:
    ev = _Evaluator(params, m)
    return DecompValue(
        m=m,
        gamma=tuple(ev.gamma(j) for j in GAMMA_INDICES),
        gamma_star=tuple(ev.gamma_star(j) for j in GAMMA_STAR_INDICES),
        varpi=ev.varpi(),
    )


CHECK_NAMES = ("a", "b", "c", "d", "e")


@dataclass
class VerifyReport:
    lo: int
    hi: int
    params: DecompParams
    checked: int = 0
    checks_run: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    check_e_run: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    @property
    def first_counterexample(self):
        return self.failures[0] if self.failures else None


def _verify_chunk(args) -> tuple[int, list]:
    params, lo, hi, run_e, cap = args
    fails: list = []
    count = 0
    batch = _IntervalBatch(params, lo, hi)
    for m in range(lo + 1, hi + 1):
        v = batch.value(m)
        g, gs = v.gamma, v.gamma_star
        count += 1
        if v.varpi != v.lambda1 - v.lambda2 + g[7]:
            fails.append(("a", m, "identity"))
        if not (v.lambda1 - v.lambda2 <= v.varpi <= v.lambda3):
            fails.append(("b", m, "sandwich"))
        if v.lambda2 < 0:
            fails.append(("c", m, "negativity"))
        if v.varpi != g[0] - g[2] - g[3] - gs[0] - gs[1] + gs[2] - gs[3]:
            fails.append(("d", m, "identity"))
        if run_e and gs[3] - gs[4] != g[10]:
            fails.append(("e", m, "g8*-g9* != g11"))
        if len(fails) >= cap:
            break
    return count, fails


class _IntervalBatch:
    """Factor-sieved window (lo, hi]: all gamma values without per-m factorization.

    A segmented sieve over prime powers below sqrt_x1 yields each m's sorted
    small-factor multiset in one pass over the window.
    """

    def __init__(self, params: DecompParams, lo: int, hi: int):
        self.params = params
        self.lo = lo
        bound = params.sqrt_x1
        lists: list[list[int]] = [[] for _ in range(hi - lo)]
        for p in pt.primes_upto(pt._ceil_excl(bound)):
            pk = p
            while pk <= hi:
                start = ((lo + pk) // pk) * pk  # first multiple > lo
                for mult in range(start, hi + 1, pk):
                    lists[mult - lo - 1].append(p)
                pk *= p
        self.factors = [sorted(fs) for fs in lists]

    def value(self, m: int) -> DecompValue:
        ev = _Evaluator.__new__(_Evaluator)
        ev.params = self.params
        ev.m = m
        ev.fs = self.factors[m - self.lo - 1]
        ev.distinct = sorted(set(ev.fs))
        return DecompValue(
            m=m,
            gamma=tuple(ev.gamma(j) for j in GAMMA_INDICES),
            gamma_star=tuple(ev.gamma_star(j) for j in GAMMA_STAR_INDICES),
            varpi=ev.varpi(),
        )


def verify_interval(
    params: DecompParams,
    lo: int,
    hi: int,
    run_e: bool | None = None,
    threads: int = 1,
    max_failures: int = 100,
) -> VerifyReport:
    """Check the decomposition identities for every integer in (lo, hi].

    run_e defaults to params.check_e_applicable() for scale-derived params
    with theta >= 8/9 and to False otherwise; a True override is honored but
    may legitimately report failures for synthetic cutoffs.
    """
    if not (0 < lo < hi):
        raise DomainError(f"require 0 < lo < hi, got {lo}, {hi}")
    if hi > pt.SIEVE_BOUND:
        raise CapacityError(f"hi={hi} exceeds the factorization bound")
    if run_e is None:
        run_e = params.theta is not None and params.theta >= 8 / 9 - 1e-12 and params.check_e_applicable()
    report = VerifyReport(lo=lo, hi=hi, params=params)
    chunk = 1 << 15
    tasks = [
        (params, a, min(a + chunk, hi), run_e, max_failures)
        for a in range(lo, hi, chunk)
    ]
    if threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(_verify_chunk, tasks))
    else:
        results = [_verify_chunk(t) for t in tasks]
    for count, fails in results:
        report.checked += count
        report.failures.extend(fails)
    report.failures = report.failures[:max_failures]
    names = CHECK_NAMES if run_e else CHECK_NAMES[:4]
    report.checks_run = {name: report.checked for name in names}
    report.check_e_run = run_e
    return report
