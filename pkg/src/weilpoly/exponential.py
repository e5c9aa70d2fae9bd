"""The exponential construction: from (q, n, m) with m in
[q^(n-1/2), q^(n+1/2)), build h with integer low coefficients whose hat
has value exactly m at 1, certify it, and decide the feasibility
inequality that guarantees success.

The residual windows make every c_i rational (c_1 is an integer); only
log(m/q^n) itself needs an enclosure, refined until each floor is
unambiguous.  The boundary case (a window value landing exactly on an
integer) would need log(m/q^n) rational, which happens only for m = q^n;
that case is dispatched exactly first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .disks import DiskCertificate, certify_nonvanishing
from .intervals import RatInterval, exp_interval, log_interval, log_ratio_interval, sqrt_interval
from .series import TruncSeries, j_series, series_exp, ExpExponent
from .weil import Certificate, WeilCandidate, certify, prime_power


class ConstructionError(RuntimeError):
    """Structured failure: `stage` names the failing step."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


@dataclass(frozen=True)
class ExpParams:
    q: int
    n: int
    m: int

    def __post_init__(self):
        prime_power(self.q)
        if self.n < 2:
            raise ValueError("need n >= 2")
        # m in [q^(n-1/2), q^(n+1/2)) by exact cross multiplication
        q, n, m = self.q, self.n, self.m
        if not (m * m >= q ** (2 * n - 1) and m * m < q ** (2 * n + 1)):
            raise ValueError("m outside [q^(n-1/2), q^(n+1/2))")

    @property
    def p(self) -> int:
        return prime_power(self.q)[0]


def compute_s(q: int) -> int:
    """floor(q log(q)/2 + 1/2), certified by refining the log enclosure."""
    prec = 48
    while True:
        val = log_interval(q, prec) * Fraction(q, 2) + Fraction(1, 2)
        import math
        lo = math.floor(val.lo)
        hi = math.floor(val.hi)
        if lo == hi:
            return lo
        prec *= 2
        if prec > 1 << 16:  # q log q / 2 + 1/2 integral is impossible
            raise RuntimeError("floor undecided at absurd precision")


@dataclass(frozen=True)
class CoefficientData:
    b: tuple[int, ...]            # b_0..b_{n-1}, exact exp-series integers
    c: tuple[Fraction, ...]       # c_1..c_{n-1}, exact rationals
    c_n: RatInterval              # enclosure of the final (irrational) c_n
    s: int


def choose_coefficients(params: ExpParams, prec: int = 64) -> CoefficientData:
    """Window-determined c_i and the integer exp coefficients b_i.

    Every c_i (i < n) is rational: the window test compares q^i log(m/q^n)
    against rationals, so only the log enclosure is refined.
    """
    q, n, m = params.q, params.n, params.m
    s = compute_s(q)
    if m == q ** n:
        b = (1,) + (0,) * (n - 1)
        return CoefficientData(b=b, c=(Fraction(0),) * (n - 1),
                               c_n=RatInterval(0), s=s)
    import math
    cs: list[Fraction] = []
    bs: list[int] = [1]
    srat = Fraction(0)  # sum c_j q^-j so far
    cur_prec = prec
    for i in range(1, n):
        # T_i = [z^i] exp(c_1 z + ... + c_{i-1} z^{i-1}), exact
        t_i = series_exp(ExpExponent(poly=tuple(cs)), i).coeffs[i]
        # window value w = q^i (log(m/q^n) - srat) + T_i + 1/2; B_i = floor(w)
        qi = q ** i
        off = -qi * srat + t_i + Fraction(1, 2)
        while True:
            lg = log_ratio_interval(m, q, n, cur_prec)
            lo = math.floor(qi * lg.lo + off)
            hi = math.floor(qi * lg.hi + off)
            if lo == hi:
                break
            cur_prec *= 2
            if cur_prec > 1 << 18:
                raise ConstructionError(
                    "window", f"floor undecided at i={i} (m={m})")
        b_i = lo
        c_i = b_i - t_i
        if i == 1:
            assert abs(c_i) <= s, "|c_1| <= s violated"
        else:
            assert abs(c_i) <= Fraction(q + 1, 2), "|c_i| <= (q+1)/2 violated"
        cs.append(c_i)
        bs.append(b_i)
        srat += c_i / qi
    lg = log_ratio_interval(m, q, n, cur_prec)
    c_n = (lg - srat) * q ** n
    return CoefficientData(b=tuple(bs), c=tuple(cs), c_n=c_n, s=s)


@dataclass(frozen=True)
class ExpResult:
    params: ExpParams
    h: tuple[Fraction, ...]       # b_0..b_{n-1} plus half-integer top
    f_hat: tuple[int, ...]
    certificate: Certificate
    disk: DiskCertificate
    coeffs: CoefficientData

    @property
    def candidate(self) -> WeilCandidate:
        return WeilCandidate(q=self.params.q, n=self.params.n, f=self.f_hat,
                             provenance="exp")


def build_candidate(params: ExpParams, prec: int = 64,
                    max_depth: int = 40) -> ExpResult:
    """Run the construction end to end and certify the output.

    f_hat(1) = m holds exactly by the middle-coefficient identity
    2 h^[n] = m - sum_{i<n} b_i (1 + q^(n-i)); the step that forces
    p | f_hat^[n] away adds z^(n-1) - ((q+1)/2) z^n.
    """
    q, n, m, p = params.q, params.n, params.m, params.p
    data = choose_coefficients(params, prec)
    b = list(data.b)
    two_h_top = m - sum(b[i] * (1 + q ** (n - i)) for i in range(n))
    if two_h_top % p == 0:
        b[n - 1] += 1
        two_h_top -= q + 1
        assert two_h_top % p != 0
    h = [Fraction(c) for c in b] + [Fraction(two_h_top, 2)]
    # assemble f_hat directly from the integers
    f = [0] * (2 * n + 1)
    for i in range(n):
        f[2 * n - i] = b[i]
        f[i] = q ** (n - i) * b[i]
    f[n] = two_h_top
    assert sum(f) == m
    disk = certify_nonvanishing(h, q, max_depth=max_depth)
    if not disk.nonvanishing:
        raise ConstructionError(
            "disk", f"nonvanishing certificate inconclusive (q={q}, n={n}, m={m})")
    cand = WeilCandidate(q=q, n=n, f=tuple(f), provenance="exp")
    cert = certify(cand, require_ordinary=True)
    if cert.honda_tate != "VerifiedOrdinary" or cert.order != m:
        raise ConstructionError(
            "certify", f"a-posteriori certification failed: {cert}")
    if not cert.squarefree:
        raise ConstructionError("certify", "output unexpectedly non-squarefree")
    return ExpResult(params=params, h=tuple(h), f_hat=tuple(f),
                     certificate=cert, disk=disk, coeffs=data)


# ---------------------------------------------------------------------------
# feasibility: the sufficient inequality and its weakenings

@dataclass(frozen=True)
class FeasibilityReport:
    q: int
    n: int
    ineq_main: bool          # the sharp sufficient inequality
    ineq_simple: bool        # monotone-in-n weakening
    ineq_q7: bool            # q >= 7 criterion
    ineq_q16: bool           # q >= 16 criterion
    lhs_upper: Fraction
    rhs_lower: Fraction
    terms: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "q": self.q, "n": self.n,
            "ineq_main": self.ineq_main, "ineq_simple": self.ineq_simple,
            "ineq_q7": self.ineq_q7, "ineq_q16": self.ineq_q16,
            "lhs_upper": str(self.lhs_upper), "rhs_lower": str(self.rhs_lower),
            "terms": {k: str(v) for k, v in self.terms.items()},
        }


def _j_tail_upper(js: TruncSeries, x_up: Fraction, q: int, s: int,
                  prec: int) -> Fraction:
    """Upper bound for J_>n at a point with upper enclosure x_up: evaluate
    J(x_up) upward and subtract the exact head at x_up downward."""
    # exponent value at x_up: s*x + (q+1)/2 * x^2/(1-x)
    ev = Fraction(s) * x_up + Fraction(q + 1, 2) * x_up * x_up / (1 - x_up)
    j_up = exp_interval(ev, prec).hi
    head = js.eval_head(x_up)
    return max(j_up - head, Fraction(0))


def _head_eval(coeffs, n: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs[:n + 1]):
        acc = acc * x + c
    return acc


def check_feasible(q: int, n: int, prec: int = 96,
                   _series: TruncSeries | None = None) -> FeasibilityReport:
    """Evaluate the sufficient inequality with certified directed bounds:
    an upper bound of the left side against a lower bound of the right.

    LHS = J_>n(q^-1/2) + q^(n/2)/2 J_>n(1/q) + q^(-n/2)/2 J_<=n(1)
          + (sqrt(q)+1)^2/2 q^(-n/2)
    RHS = 1 / J(q^-1/2).
    """
    if n < 2:
        raise ValueError("need n >= 2")
    s = compute_s(q)
    js = _series if _series is not None and _series.degree >= n \
        else j_series(q, s, n)
    rq = sqrt_interval(q, prec)
    inv_rq = sqrt_interval(Fraction(1, q), prec)
    qn_half_up = rq.hi ** n
    qmn_half_up = inv_rq.hi ** n

    def tail_upper(x_up: Fraction) -> Fraction:
        ev = Fraction(s) * x_up + Fraction(q + 1, 2) * x_up * x_up / (1 - x_up)
        j_up = exp_interval(ev, prec).hi
        return max(j_up - _head_eval(js.coeffs, n, x_up), Fraction(0))

    tail_rq = tail_upper(inv_rq.hi)
    tail_q = tail_upper(Fraction(1, q))
    head_1 = _head_eval(js.coeffs, n, Fraction(1))
    adj = (rq.hi + 1) ** 2 / 2 * qmn_half_up
    lhs_up = tail_rq + qn_half_up / 2 * tail_q + qmn_half_up / 2 * head_1 + adj

    ev_up = Fraction(s) * inv_rq.hi + \
        Fraction(q + 1, 2) * inv_rq.hi ** 2 / (1 - inv_rq.hi)
    j_rq_up = exp_interval(ev_up, prec).hi
    rhs_lo = 1 / j_rq_up
    main = lhs_up < rhs_lo

    # simple weakening: (1 + q^-1/2 / 2) J_>n(q^-1/2)
    #   + 1/2 (4/3 q^-1/2)^n J(3/4) + (sqrt q + 1)^2 / 2 q^(-n/2) < 1/J(q^-1/2)
    ev34 = Fraction(s) * Fraction(3, 4) + Fraction(q + 1, 2) * Fraction(9, 4)
    j34_up = exp_interval(ev34, prec).hi
    lhs_simple = ((1 + inv_rq.hi / 2) * tail_rq
                  + Fraction(1, 2) * (Fraction(4, 3) * inv_rq.hi) ** n * j34_up
                  + adj)
    simple = lhs_simple < rhs_lo

    # q >= 7: 2^(n-1) > J(q^-1/2) J(2 q^-1/2)
    q7 = False
    if q >= 7:
        ev2 = Fraction(2 * s) * inv_rq.hi + \
            Fraction(q + 1, 2) * (2 * inv_rq.hi) ** 2 / (1 - 2 * inv_rq.hi)
        j2_up = exp_interval(ev2, prec).hi
        q7 = 2 ** (n - 1) > j_rq_up * j2_up

    # q >= 16: n > 3 sqrt(q) log q - 1/2
    q16 = False
    if q >= 16:
        bound_up = 3 * rq.hi * log_interval(q, prec).hi - Fraction(1, 2)
        q16 = Fraction(n) > bound_up

    return FeasibilityReport(
        q=q, n=n, ineq_main=main, ineq_simple=simple, ineq_q7=q7,
        ineq_q16=q16, lhs_upper=lhs_up, rhs_lower=rhs_lo,
        terms={"tail_at_inv_sqrt_q": tail_rq, "tail_at_inv_q": tail_q,
               "head_at_1": head_1, "adjustment": adj,
               "j_at_inv_sqrt_q_upper": j_rq_up})


@dataclass(frozen=True)
class N0Report:
    q: int
    n0: int
    n_star: int  # from here on the monotone weakening holds
    transcript: tuple[FeasibilityReport, ...]


def find_n0(q: int, n_cap: int = 400, prec: int = 96) -> N0Report:
    """Smallest n0 such that the main inequality is verified for every
    n in [n0, n_star] and the monotone weakening covers n > n_star."""
    if q >= 16:
        raise ValueError("intended for q < 16")
    s = compute_s(q)
    full = j_series(q, s, n_cap)
    n_star = None
    transcript = []
    for n in range(2, n_cap + 1):
        rep = check_feasible(q, n, prec, _series=full)
        transcript.append(rep)
        if rep.ineq_simple:
            n_star = n
            break
    if n_star is None:
        raise RuntimeError(f"monotone criterion never held up to n={n_cap}")
    n0 = n_star
    n = n_star - 1
    while n >= 2:
        rep = check_feasible(q, n, prec, _series=full)
        transcript.append(rep)
        if not rep.ineq_main:
            break
        n0 = n
        n -= 1
    return N0Report(q=q, n0=n0, n_star=n_star, transcript=tuple(transcript))
