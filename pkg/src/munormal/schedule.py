"""Stage schedules for the concatenated word ``w_1^{l_1} ⊙ w_2^{l_2} ⊙ ...``.

A :class:`Schedule` holds per-stage data (copy count ``l``, tolerance
``eps``, certified length ``k``, approximating measure ``nu`` and the block
parameters) and derives the bookkeeping used everywhere else: the stage
length ``M_i`` (copies, self-padding and the padding into the next stage),
cumulative lengths ``L_i``, the position decomposition of a global index and
the expected-count accumulator ``phi_n(b)``.

The growth conditions are asymptotic, so :func:`validate_good` and
:func:`validate_good4` only report finite-range trends.  Schedules whose
parameters overflow (``l_i = i^(2i)``) are described by
:class:`SymbolicSchedule`, which works with logarithms throughout.
"""

from __future__ import annotations

import bisect
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .blocks import WeightedBlock, build_block, check_normal
from .languages import ParryData, ShiftLanguage
from .measures import CylinderMeasure, cf_min_measure_bound
from .words import Word, WordLike, as_word

BLOCK_CACHE_STAGES = 3


class ScheduleExhausted(IndexError):
    """A finite schedule has no stage at the requested index."""


class EnvelopeError(ValueError):
    """The envelope hypotheses do not hold at the requested stage."""

    def __init__(self, message: str, hypotheses: dict):
        super().__init__(message)
        self.hypotheses = hypotheses


@dataclass(frozen=True)
class StageSpec:
    """Parameters of one stage.

    ``weight=None`` selects the smallest admissible weight ``ceil(1/m_w)``.
    """

    copies: int
    eps: float
    k: int
    measure: CylinderMeasure
    window: int
    base: int
    weight: Optional[Union[int, Fraction]] = None
    offset: int = 0


@dataclass(frozen=True)
class StageInfo:
    index: int
    copies: int
    length: int          # |w_i|
    self_pad: Word       # padding between consecutive copies
    next_pad: Word       # padding into the next non-empty stage
    total: int           # M_i
    cumulative: int      # L_i
    end_state: Optional[int]


@dataclass(frozen=True)
class Position:
    """``n = L_i + m`` with ``m = x (|w_{i+1}| + |u|) + y``."""

    n: int
    i: int
    m: int
    x: int
    y: int


def _auto_weight(spec: StageSpec, language: ShiftLanguage):
    from .blocks import enumerate_pool

    masses = [spec.measure.mass(p) for p in enumerate_pool(language, spec.base, spec.window, offset=spec.offset)]
    low = min(m for m in masses if m > 0)
    if isinstance(low, Fraction):
        return math.ceil(1 / low)
    return math.ceil(1 / float(low) * (1 + 1e-12))


class Schedule:
    """Materialised schedule over a shift language.

    Parameters
    ----------
    language : ShiftLanguage
    target : CylinderMeasure
        The measure the infinite word should be generic for.
    stages : sequence of StageSpec, or callable ``i -> StageSpec``
        Stage ``i`` (1-based).  A callable gives an unbounded schedule unless
        ``n_stages`` is set.
    """

    def __init__(self, language: ShiftLanguage, target: CylinderMeasure,
                 stages: Union[Sequence[StageSpec], Callable[[int], StageSpec]],
                 n_stages: Optional[int] = None, name: str = "schedule",
                 cache_stages: int = BLOCK_CACHE_STAGES):
        self.language = language
        self.target = target
        self.name = name
        if callable(stages):
            self._factory = stages
            self.n_stages = n_stages
        else:
            stages = list(stages)
            self._factory = lambda i: stages[i - 1]
            self.n_stages = len(stages) if n_stages is None else min(n_stages, len(stages))
        self._specs: dict = {}
        self._infos: list = []
        self._cum: list = [0]
        self._blocks: OrderedDict = OrderedDict()
        self._cache_stages = cache_stages
        self._lock = threading.RLock()

    @property
    def j(self) -> int:
        return self.language.j

    # stage data -----------------------------------------------------------

    def has_stage(self, i: int) -> bool:
        return i >= 1 and (self.n_stages is None or i <= self.n_stages)

    def spec(self, i: int) -> StageSpec:
        if not self.has_stage(i):
            raise ScheduleExhausted(f"{self.name} has no stage {i}")
        with self._lock:
            if i not in self._specs:
                spec = self._factory(i)
                if spec.weight is None:
                    spec = StageSpec(spec.copies, spec.eps, spec.k, spec.measure, spec.window,
                                     spec.base, _auto_weight(spec, self.language), spec.offset)
                self._specs[i] = spec
            return self._specs[i]

    def block(self, i: int) -> WeightedBlock:
        """Block ``w_i``; at most ``cache_stages`` blocks are kept alive."""
        with self._lock:
            blk = self._blocks.get(i)
            if blk is not None:
                self._blocks.move_to_end(i)
                return blk
            s = self.spec(i)
            blk = build_block(self.language, s.measure, s.base, s.window, s.weight, offset=s.offset)
            self._blocks[i] = blk
            while len(self._blocks) > self._cache_stages:
                self._blocks.popitem(last=False)
            return blk

    def _next_nonempty(self, i: int) -> Optional[int]:
        t = i + 1
        while self.has_stage(t):
            if self.spec(t).copies > 0:
                return t
            t += 1
            if self.n_stages is None and t > i + 10_000:
                raise RuntimeError("no non-empty stage within 10000 stages")
        return None

    def info(self, i: int) -> StageInfo:
        with self._lock:
            while len(self._infos) < i:
                self._infos.append(self._compute_info(len(self._infos) + 1))
                self._cum.append(self._cum[-1] + self._infos[-1].total)
            return self._infos[i - 1]

    def _compute_info(self, i: int) -> StageInfo:
        s = self.spec(i)
        if s.copies == 0:
            return StageInfo(i, 0, 0, (), (), 0, self._cum[-1], None)
        blk = self.block(i)
        last = _last_pool_word(blk)
        # chained paddings resynchronise, so the block ends where its last pool word does
        state = self.language.end_state(last)
        self_pad = self.language.padding(last, blk.word, state_a=state, check=False)
        nxt = self._next_nonempty(i)
        if nxt is None:
            next_pad: Word = ()
        else:
            next_pad = self.language.padding(last, self.block(nxt).word, state_a=state, check=False)
        n = len(blk)
        total = s.copies * n + (s.copies - 1) * len(self_pad) + len(next_pad)
        return StageInfo(i, s.copies, n, tuple(self_pad), tuple(next_pad), total,
                         self._cum[-1] + total, state)

    def M(self, i: int) -> int:
        return self.info(i).total

    def L(self, i: int) -> int:
        """Cumulative length ``L_i``; ``L_0 = 0``."""
        if i <= 0:
            return 0
        return self.info(i).cumulative

    def materialized(self) -> int:
        return len(self._infos)

    def total_length(self) -> Optional[int]:
        return None if self.n_stages is None else self.L(self.n_stages)

    # positions ------------------------------------------------------------

    def stage_of(self, n: int) -> int:
        """``i`` with ``L_i < n <= L_{i+1}``."""
        if n < 1:
            raise ValueError("positions start at 1")
        with self._lock:
            while self._cum[-1] < n:
                nxt = len(self._infos) + 1
                if not self.has_stage(nxt):
                    raise ScheduleExhausted(f"{self.name} ends after {self._cum[-1]} digits")
                self.info(nxt)
            return bisect.bisect_left(self._cum, n) - 1

    def locate(self, n: int) -> Position:
        """Decompose ``n`` taking the largest ``x < l_{i+1}`` with ``y >= 0``."""
        i = self.stage_of(n)
        m = n - self.L(i)
        nxt = self.info(i + 1)
        period = nxt.length + len(nxt.self_pad)
        x = min(m // period, nxt.copies - 1)
        return Position(n, i, m, x, m - x * period)

    def digit_at(self, n: int) -> int:
        i = self.stage_of(n)
        st = self.info(i + 1)
        o = n - 1 - self.L(i)
        period = st.length + len(st.self_pad)
        x = min(o // period, st.copies - 1)
        r = o - x * period
        if r < st.length:
            return int(self.block(i + 1).word[r])
        r -= st.length
        pad = st.self_pad if x < st.copies - 1 else st.next_pad
        return int(pad[r])

    def stage_digits(self, i: int) -> np.ndarray:
        """The whole stage word ``w_i^{⊙ l_i} u_{w_i, w_next}``."""
        st = self.info(i)
        if st.copies == 0:
            return np.zeros(0, dtype=np.int32)
        w = self.block(i).word
        unit = np.concatenate([w, np.asarray(st.self_pad, dtype=np.int32)])
        body = np.tile(unit, st.copies - 1)
        return np.concatenate([body, w, np.asarray(st.next_pad, dtype=np.int32)]).astype(np.int32)

    # expected counts --------------------------------------------------------

    def nu(self, i: int, b: WordLike) -> float:
        return float(self.spec(i).measure.mass(as_word(b)))

    def phi_boundary(self, i: int, b: WordLike) -> float:
        """``phi_{L_i}(b) = sum_{k <= i} M_k nu_k(b)``."""
        b = as_word(b)
        return math.fsum(self.M(k) * self.nu(k, b) for k in range(1, i + 1) if self.M(k))

    def phi(self, n: int, b: WordLike) -> float:
        """``sum_{k <= i} M_k nu_k(b) + m nu_{i+1}(b)`` with ``i = i(n)``."""
        b = as_word(b)
        i = self.stage_of(n)
        m = n - self.L(i)
        return self.phi_boundary(i, b) + m * self.nu(i + 1, b)

    # envelopes --------------------------------------------------------------

    def _coefficients(self, i: int, b: Word, k: int) -> dict:
        if i < 1:
            raise ValueError("envelopes start at stage 1")
        cur, nxt = self.info(i), self.info(i + 1)
        s_cur, s_nxt = self.spec(i), self.spec(i + 1)
        kj = k + self.j
        nu_i, nu_n = self.nu(i, b), self.nu(i + 1, b)
        return dict(
            C=self.L(i - 1) + s_cur.eps * nu_i * cur.copies * cur.length + kj * cur.copies,
            D=s_nxt.eps * nu_n * nxt.length + kj,
            E=1.0,
            F=self.phi_boundary(i, b),
            G=nu_n * (nxt.length + len(nxt.self_pad)),
            H=nu_n,
            f_num0=self.phi_boundary(i - 1, b) + s_cur.eps * nu_i * cur.copies * cur.length,
            f_x=nu_n * (s_nxt.eps * nxt.length + len(nxt.self_pad)),
        )

    def g_envelope(self, i: int, b: WordLike, x: float, y: float, k: Optional[int] = None) -> float:
        """Upper envelope ``(C + Dx + Ey) / (F + Gx + Hy)``."""
        b = as_word(b)
        c = self._coefficients(i, b, len(b) if k is None else k)
        den = c["F"] + c["G"] * x + c["H"] * y
        if den <= 0:
            raise ZeroDivisionError("envelope denominator is not positive")
        return (c["C"] + c["D"] * x + c["E"] * y) / den

    def f_envelope(self, i: int, b: WordLike, x: float, y: float, k: Optional[int] = None) -> float:
        """Lower-side companion of :meth:`g_envelope`, same denominator."""
        b = as_word(b)
        c = self._coefficients(i, b, len(b) if k is None else k)
        den = c["F"] + c["G"] * x + c["H"] * y
        if den <= 0:
            raise ZeroDivisionError("envelope denominator is not positive")
        return (c["f_num0"] + c["f_x"] * x + c["H"] * y) / den

    def tilde(self, i: int, b: WordLike) -> tuple:
        """``(t, e)``: last stage ``t <= i`` with ``nu_{i+1}(b) >= nu_t(b)`` (0 if none)
        and the excess ``max(0, L_t nu_{i+1}(b) - phi_{L_t}(b))``."""
        b = as_word(b)
        nu_n = self.nu(i + 1, b)
        t = 0
        for s in range(i, 0, -1):
            if nu_n >= self.nu(s, b):
                t = s
                break
        e = max(0.0, self.L(t) * nu_n - self.phi_boundary(t, b)) if t else 0.0
        return t, e

    def hypotheses(self, i: int, b: WordLike, k: Optional[int] = None) -> dict:
        b = as_word(b)
        k = len(b) if k is None else k
        cur, nxt = self.info(i), self.info(i + 1)
        eps_i, eps_n = self.spec(i).eps, self.spec(i + 1).eps
        nu_i, nu_n = self.nu(i, b), self.nu(i + 1, b)
        kj = k + self.j
        _, e = self.tilde(i, b)
        gap = eps_i - eps_n
        return {
            "admissible": nu_i > 0 and k <= self.spec(i).k,
            "block_long": nu_i > 0 and cur.length > 2 * kj + 2 * e / nu_i,
            "next_block_long": nu_n > 0 and gap > 0 and nxt.length > kj / (nu_n * gap),
            "eps_small": eps_i < 0.5,
            "copies_positive": cur.copies > 0 and nxt.copies > 0,
            "nu_monotone": nu_n <= nu_i,
        }

    def error_envelope(self, i: int, b: WordLike, k: Optional[int] = None) -> float:
        """``g(0, |w_{i+1}| + j)``; raises :class:`EnvelopeError` off-hypothesis."""
        b = as_word(b)
        hyp = self.hypotheses(i, b, k)
        if not all(hyp.values()):
            bad = ", ".join(name for name, ok in hyp.items() if not ok)
            raise EnvelopeError(f"stage {i}, block {b}: failed {bad}", hyp)
        return self.g_envelope(i, b, 0, self.info(i + 1).length + self.j, k)

    # normality of the stage blocks -------------------------------------------

    def check_blocks(self, stages: Optional[Sequence[int]] = None) -> dict:
        """``check_normal`` of every block against its own ``(eps_i, k_i, nu_i)``."""
        stages = range(1, self.n_stages + 1) if stages is None else stages
        out = {}
        for i in stages:
            s = self.spec(i)
            if s.copies == 0:
                continue
            out[i] = check_normal(self.block(i).word, s.eps, s.k, s.measure)
        return out

    # growth-condition inputs --------------------------------------------------

    def log_length(self, i: int) -> float:
        return math.log(self.info(i).length) if self.info(i).length else -math.inf

    def log_copies(self, i: int) -> float:
        c = self.spec(i).copies
        return math.log(c) if c else -math.inf

    def eps(self, i: int) -> float:
        return self.spec(i).eps


def _last_pool_word(blk: WeightedBlock) -> Word:
    return next(reversed(blk.copies))


# symbolic (log-space) schedules ----------------------------------------------


class SymbolicSchedule:
    """Schedule described by formulas, evaluated in log space.

    Block lengths are modelled by the upper length bound
    ``(i + j)(M_i + q_i^i)`` of a block with window ``i``.
    """

    def __init__(self, name: str, log_q: Callable[[int], float], log_M: Callable[[int], float],
                 log_l: Callable[[int], float], eps: Callable[[int], float], j: int = 0,
                 first: int = 1):
        self.name = name
        self._log_q = log_q
        self._log_M = log_M
        self._log_l = log_l
        self._eps = eps
        self.j = j
        self.first = first

    def log_q(self, i: int) -> float:
        return self._log_q(i)

    def log_M(self, i: int) -> float:
        return self._log_M(i)

    def log_copies(self, i: int) -> float:
        return self._log_l(i)

    def eps(self, i: int) -> float:
        return self._eps(i)

    def log_length(self, i: int) -> float:
        return math.log(i + self.j) + np.logaddexp(self.log_M(i), i * self.log_q(i))


def _log_max(a: float, b: float) -> float:
    return max(a, b)


def _log_log(i: int) -> float:
    # log(log i); log 1 = 0 maps to -inf
    return math.log(math.log(i)) if i > 1 else -math.inf


def formula_qary(b: int = 2) -> SymbolicSchedule:
    """``q_i = b``, ``M_i = b^{2i} log i``, ``l_i = i^{2i}``, ``eps_i = i^{-1/2}``."""
    return SymbolicSchedule(
        f"qary-b{b}", lambda i: math.log(b), lambda i: 2 * i * math.log(b) + _log_log(i),
        lambda i: 2 * i * math.log(i), lambda i: i ** -0.5)


def formula_lueroth() -> SymbolicSchedule:
    """``q_i = i + 2``, ``M_i = max(36, i^{2i} log i)``, ``l_i = floor(i^2 log i)``."""
    def log_l(i: int) -> float:
        l = math.floor(i * i * math.log(i))
        return math.log(l) if l > 0 else -math.inf
    return SymbolicSchedule(
        "lueroth", lambda i: math.log(i + 2),
        lambda i: _log_max(math.log(36), 2 * i * math.log(i) + _log_log(i)),
        log_l, lambda i: i ** -0.5)


def beta_phi(data: ParryData, w: int) -> int:
    """Number of periods needed to bound the shortest cylinder of length ``w``."""
    t, p = data.t, data.p
    if w <= t or p == 0:
        return 1
    return max(2, 1 + math.ceil((w - t) / p))


def formula_beta(data: ParryData) -> SymbolicSchedule:
    """``M_i = max(beta^{t + phi(i) p} / (1 - 1/beta), ceil(beta)^{2i} log i)``, ``l_i = i^{2i}``."""
    beta = float(data.beta(64))
    q = math.ceil(beta)
    t, p = data.t, data.p

    def log_M(i: int) -> float:
        first = (t + beta_phi(data, i) * p) * math.log(beta) - math.log(1 - 1 / beta)
        return _log_max(first, 2 * i * math.log(q) + _log_log(i))
    return SymbolicSchedule(f"beta{data.preperiod}{data.period}", lambda i: math.log(q), log_M,
                            lambda i: 2 * i * math.log(i), lambda i: i ** -0.5, j=data.j)


def formula_cf() -> SymbolicSchedule:
    """``M_i = 2 i^{2i} log i``, pool base ``i + 1``, ``l_i = 0`` below stage 8."""
    def log_l(i: int) -> float:
        if i < 8:
            return -math.inf
        return math.log(math.floor(i * i * math.log(i)))
    return SymbolicSchedule(
        "cf", lambda i: math.log(i + 1), lambda i: math.log(2) + 2 * i * math.log(i) + _log_log(i),
        log_l, lambda i: i ** -0.5)


def cf_r2_bound(i: int) -> float:
    """Closed-form bound on the second ratio of the continued-fraction preset."""
    return (1 - 1 / i) ** (2 * i) / (i - 1) + 1 / (2 * i ** (i + 1))


def cf_min_bound_holds(i: int) -> bool:
    from .measures import GaussMeasure
    return float(GaussMeasure(stage=i).min_mass_bound(i)) > cf_min_measure_bound(i)


# growth-condition reports -----------------------------------------------------


@dataclass
class TrendReport:
    """Finite-range trend of a ratio sequence that should tend to 0.

    ``decreasing`` means strictly decreasing over the second half of the
    evaluated indices (at least the last two); a little-o statement cannot be decided from finitely
    many terms, so this is evidence only.
    """

    name: str
    indices: list
    log_values: list
    decreasing: bool
    note: str = ""

    @property
    def values(self) -> list:
        return [math.exp(v) if v < 700 else math.inf for v in self.log_values]

    def value_at(self, i: int) -> float:
        return self.values[self.indices.index(i)]

    def to_dict(self) -> dict:
        return {"name": self.name, "indices": self.indices, "values": self.values,
                "log_values": self.log_values, "decreasing": self.decreasing, "note": self.note}


def _trend(name: str, indices: list, logs: list) -> TrendReport:
    finite = [(i, v) for i, v in zip(indices, logs) if math.isfinite(v)]
    if len(finite) < 2 or len(finite) < len(logs):
        return TrendReport(name, indices, logs, False, "undefined or infinite terms")
    tail = logs[min(len(logs) // 2, len(logs) - 2):]
    ok = all(b < a for a, b in zip(tail, tail[1:]))
    return TrendReport(name, indices, logs, ok)


@dataclass
class GoodReport:
    schedule: str
    trends: list

    @property
    def passed(self) -> bool:
        return all(t.decreasing for t in self.trends)

    def failed(self) -> list:
        return [t.name for t in self.trends if not t.decreasing]

    def __getitem__(self, name: str) -> TrendReport:
        for t in self.trends:
            if t.name == name:
                return t
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {"schedule": self.schedule, "passed": self.passed,
                "trends": [t.to_dict() for t in self.trends]}


def _first_with_copies(W, horizon: int) -> int:
    i = getattr(W, "first", 1)
    while i < horizon and not math.isfinite(W.log_copies(i)):
        i += 1
    return i


def validate_good(W, horizon: int) -> GoodReport:
    """Ratios of the three growth conditions for ``2 <= i <= horizon - 1``.

    ``r1 = 1/((eps_{i-1} - eps_i)|w_i|)``,
    ``r2 = i l_{i-1}|w_{i-1}| / (l_i |w_i|)``,
    ``r3 = |w_{i+1}| / (l_i |w_i|)``.
    Indices start after the first stage with copies, since the ratios
    involving ``l_{i-1}`` are degenerate before it.
    """
    if horizon < 3:
        raise ValueError("need at least 3 stages")
    start = max(2, _first_with_copies(W, horizon) + 1)
    idx = list(range(start, horizon))
    r1, r2, r3 = [], [], []
    for i in idx:
        gap = W.eps(i - 1) - W.eps(i)
        r1.append(-math.log(gap) - W.log_length(i) if gap > 0 else math.inf)
        r2.append(math.log(i) + W.log_copies(i - 1) + W.log_length(i - 1)
                  - W.log_copies(i) - W.log_length(i))
        r3.append(W.log_length(i + 1) - W.log_copies(i) - W.log_length(i))
    name = getattr(W, "name", "schedule")
    return GoodReport(name, [_trend("good1", idx, r1), _trend("good2", idx, r2), _trend("good3", idx, r3)])


def validate_good4(log_q: Callable[[int], float], log_M: Callable[[int], float], horizon: int,
                   start: int = 1, name: str = "schedule") -> GoodReport:
    """Trend of ``q_i^{2i} / M_i`` (given as log callables)."""
    idx = list(range(start, horizon + 1))
    logs = [2 * i * log_q(i) - log_M(i) for i in idx]
    return GoodReport(name, [_trend("good4", idx, logs)])


def validate_symbolic(W: SymbolicSchedule, horizon: int) -> GoodReport:
    """All four conditions for a symbolic schedule."""
    rep = validate_good(W, horizon)
    start = max(2, getattr(W, "first", 1))
    g4 = validate_good4(W.log_q, W.log_M, horizon, start=start, name=W.name)
    return GoodReport(W.name, rep.trends + g4.trends)
