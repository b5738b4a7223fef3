"""Zeta/L log-series, Dirichlet densities and equidistribution checks.

A constructible function assigns to every level-n point of a base system
the value of a central function at the point's Frobenius substitution,
piecewise over finitely many disjoint strata. Realizations are exact maps
from points to Gaussian rationals; all series bookkeeping stays exact
(rational coefficients, rational evaluation points, exact ratios of
truncated log-series). Floating-point numbers appear only in reports and
in least-squares decay fits, never in a verdict that an exact zero can
decide.

Point keys are int tuples: the canonical integer form of each coordinate
in the field the ambient system's level points materialize in. Two
realizations over the same ambient system therefore share keys, which is
what the pairing needs. Identification of points across unrelated field
towers is deliberately not attempted; see realized_pullback.
"""

import math
import os
from fractions import Fraction

from mpmath import mp, mpf

from .gaussian import GaussianRational, ZERO
from .quandle import CentralFunction, constant_function, inner_product
from .diffpoly import EndoSpec, evaluate_plain, evaluate_twisted
from .diffvar import _lsq_slope, lang_weil_fit, points as level_points
from .fields import embedding
from .cover import level_over, pushforward_to_base

DEFAULT_PRECISION_BITS = 200


def _precision_bits(bits=None):
    if bits is not None:
        return int(bits)
    env = os.environ.get("FROB_PRECISION_BITS")
    return int(env) if env else DEFAULT_PRECISION_BITS


def _gauss(x):
    if isinstance(x, GaussianRational):
        return x
    return GaussianRational(x)


# ---------------------------------------------------------------------------
# series containers
# ---------------------------------------------------------------------------


class SeriesData:
    """Exact log-series coefficients c_1..c_K (sum c_n t^n), contiguous."""

    __slots__ = ("coeffs", "range")

    def __init__(self, coeffs):
        coeffs = tuple(_gauss(c) for c in coeffs)
        if not coeffs:
            raise ValueError("density.SeriesData: empty coefficient list")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "range", (1, len(coeffs)))

    def __setattr__(self, *a):
        raise AttributeError("SeriesData is immutable")

    def __len__(self):
        return len(self.coeffs)

    def coeff(self, n):
        if not 1 <= n <= len(self.coeffs):
            raise IndexError("density.SeriesData: no coefficient %d" % n)
        return self.coeffs[n - 1]

    def eval_at(self, t):
        """Exact value of the truncated series at a rational t."""
        t = Fraction(t)
        total = ZERO
        tp = Fraction(1)
        for c in self.coeffs:
            tp *= t
            total = total + c * tp
        return total

    def __repr__(self):
        return "SeriesData(n=1..%d)" % len(self.coeffs)


def zeta_coeffs(rows):
    """c_n = a_n / n from count rows (n, Q, count, exact), n contiguous
    from 1."""
    rows = list(rows)
    ns = [r[0] for r in rows]
    if ns != list(range(1, len(rows) + 1)):
        raise ValueError("density.zeta_coeffs: count rows must cover "
                         "n = 1..K contiguously, got %r" % (ns,))
    return SeriesData([Fraction(r[2], r[0]) for r in rows])


# ---------------------------------------------------------------------------
# constructible functions
# ---------------------------------------------------------------------------


def _system_key(sys):
    return (sys.field.p, sys.field.N, tuple(sys.field.modulus), sys.vars,
            sys.q0_exp, tuple(sorted(P.key() for P in sys.equations)),
            tuple(sorted(sys.units)))


class BasicConstructible:
    """A cover together with a central function on its substitution coset."""

    __slots__ = ("cover", "alpha")

    def __init__(self, cover, alpha):
        if not isinstance(alpha, CentralFunction):
            raise ValueError("density.BasicConstructible: alpha must be a "
                             "central function")
        if alpha.structure.conj != cover.structure.conj:
            raise ValueError("density.BasicConstructible: alpha does not "
                             "live on the cover's substitution structure")
        object.__setattr__(self, "cover", cover)
        object.__setattr__(self, "alpha", alpha)

    def __setattr__(self, *a):
        raise AttributeError("BasicConstructible is immutable")


class ConstructibleFunction:
    """Disjoint strata of a base system, each carrying a basic piece.

    A stratum is a DiffSystem over the same field, variables and twist as
    the ambient system, carved out by extra equations and units; each
    stratum is the base of its piece's cover. Disjointness and covering are
    not decidable symbolically here, so they are enforced on every sampled
    point set instead (realize errors on a point in zero or two strata).
    """

    __slots__ = ("system", "strata")

    def __init__(self, system, strata):
        strata = tuple((s, b) for s, b in strata)
        if not strata:
            raise ValueError("density.ConstructibleFunction: no strata")
        for stratum, basic in strata:
            if (stratum.field.p, stratum.field.N) != (system.field.p,
                                                      system.field.N) \
                    or stratum.vars != system.vars \
                    or stratum.q0_exp != system.q0_exp:
                raise ValueError(
                    "density.ConstructibleFunction: stratum is not carved "
                    "out of the ambient system (field/vars/twist differ)")
            if not isinstance(basic, BasicConstructible):
                raise ValueError("density.ConstructibleFunction: stratum "
                                 "data must be BasicConstructible")
            if basic.cover.base is not stratum and \
                    _system_key(basic.cover.base) != _system_key(stratum):
                raise ValueError(
                    "density.ConstructibleFunction: the piece's cover is "
                    "not built over its stratum")
        object.__setattr__(self, "system", system)
        object.__setattr__(self, "strata", strata)

    def __setattr__(self, *a):
        raise AttributeError("ConstructibleFunction is immutable")

    @classmethod
    def from_basic(cls, basic):
        base = basic.cover.base
        return cls(base, [(base, basic)])


def realize(f, n, field_cap=12):
    """Map each level-n point key of the ambient system to alpha(phi__n,x).

    Keys are tuples of canonical coordinate integers in the field the
    ambient point set materializes in.
    """
    xset = level_points(f.system, n)
    ctx0 = xset.ctx
    keys = [tuple(ctx0.to_int(c) for c in pt) for pt in xset.points]
    if len(f.strata) == 1 and \
            _system_key(f.strata[0][0]) == _system_key(f.system):
        basic = f.strata[0][1]
        lv = basic.cover.level(n, field_cap)
        if len(lv.subst) != len(keys):
            raise ValueError("density.realize: cover level does not match "
                             "the ambient point set")
        return dict(zip(keys, (basic.alpha(i) for i in lv.subst)))

    Q = f.system.twist_order(n)
    emb0 = embedding(f.system.field, ctx0)
    owner = {}
    members = [[] for _ in f.strata]
    for si, (stratum, _basic) in enumerate(f.strata):
        eqs = stratum.effective_equations()
        for i, pt in enumerate(xset.points):
            pd = dict(zip(f.system.vars, pt))
            if any(pd[u] == ctx0.zero for u in stratum.units):
                continue
            if any(evaluate_twisted(P, pd, Q, ctx0, emb0) != ctx0.zero
                   for P in eqs):
                continue
            if i in owner:
                raise ValueError(
                    "density.realize: level-%d point %r lies in strata %d "
                    "and %d" % (n, keys[i], owner[i], si))
            owner[i] = si
            members[si].append(i)
    stray = [keys[i] for i in range(len(keys)) if i not in owner]
    if stray:
        raise ValueError("density.realize: level-%d point %r lies in no "
                         "stratum" % (n, stray[0]))
    out = {}
    for (stratum, basic), idx in zip(f.strata, members):
        if not idx:
            continue
        lv = level_over(basic.cover, n, ctx0,
                        [xset.points[i] for i in idx], field_cap)
        for i, s in zip(idx, lv.subst):
            out[keys[i]] = basic.alpha(s)
    return out


def constructible_algebra(f, g, op):
    """Stratum-wise sum or product of two functions sharing strata and
    covers."""
    if op not in ("add", "mul"):
        raise ValueError("density.constructible_algebra: op must be 'add' "
                         "or 'mul'")
    if _system_key(f.system) != _system_key(g.system) or \
            len(f.strata) != len(g.strata):
        raise ValueError("density.constructible_algebra: functions live on "
                         "different systems or stratifications")
    out = []
    for (s1, b1), (s2, b2) in zip(f.strata, g.strata):
        if _system_key(s1) != _system_key(s2):
            raise ValueError("density.constructible_algebra: strata differ")
        if b1.cover is not b2.cover:
            raise ValueError("density.constructible_algebra: pieces use "
                             "different covers; bring them to a common one "
                             "first")
        if op == "add":
            vals = [a + b for a, b in zip(b1.alpha.values, b2.alpha.values)]
        else:
            vals = [a * b for a, b in zip(b1.alpha.values, b2.alpha.values)]
        out.append((s1, BasicConstructible(
            b1.cover, CentralFunction(b1.cover.structure, vals))))
    return ConstructibleFunction(f.system, out)


def realized_pullback(h, beta, n, domain=None, field_cap=12):
    """Realize x -> beta at h(x), for a polynomial self-coordinate map.

    h is a twist-free EndoSpec on the target's variables; its images are
    evaluated at each level-n point of the domain system (the target system
    itself when domain is None) and the value of beta's realization at the
    image point is pulled back. The domain's and target's level point sets
    must materialize in the same field; identifying points across unrelated
    field towers would require a choice of isomorphism this library refuses
    to guess.
    """
    if not isinstance(h, EndoSpec) or h.vars != beta.system.vars:
        raise ValueError("density.realized_pullback: h must be an EndoSpec "
                         "on the target system's variables")
    if h.const_twist != 0:
        raise ValueError("density.realized_pullback: a point map cannot "
                         "twist constants")
    if domain is None:
        domain = beta.system
    if domain.vars != beta.system.vars:
        raise ValueError("density.realized_pullback: domain and target "
                         "variable lists differ")
    values = realize(beta, n, field_cap)
    xset = level_points(domain, n)
    yset = xset if domain is beta.system else level_points(beta.system, n)
    if xset.ctx is not yset.ctx:
        raise ValueError(
            "density.realized_pullback: domain points live in F_(p^%d) but "
            "target points in F_(p^%d); no canonical identification"
            % (xset.ctx.N, yset.ctx.N))
    ctx = xset.ctx
    emb = embedding(domain.field, ctx)
    out = {}
    for pt in xset.points:
        pd = dict(zip(domain.vars, pt))
        img = tuple(ctx.to_int(evaluate_plain(h.images[v], pd, ctx, emb))
                    for v in beta.system.vars)
        if img not in values:
            raise ValueError(
                "density.realized_pullback: image point %r is not a "
                "level-%d point of the target system" % (img, n))
        out[tuple(ctx.to_int(c) for c in pt)] = values[img]
    return out


def pairing(u, v):
    """(1/|X|) sum u(x) * conj(v(x)); zero on the empty point set."""
    if set(u) != set(v):
        raise ValueError("density.pairing: realizations are over different "
                         "point sets")
    if not u:
        return ZERO
    total = ZERO
    for k in sorted(u):
        total = total + u[k] * v[k].conjugate()
    return total * GaussianRational(Fraction(1, len(u)))


def l_coeffs(f, n_range, field_cap=12):
    """c_n = (sum of the realization at level n) / n, exact."""
    ns = list(n_range)
    if ns != list(range(1, len(ns) + 1)):
        raise ValueError("density.l_coeffs: levels must be 1..K "
                         "contiguously, got %r" % (ns,))
    coeffs = []
    for n in ns:
        total = ZERO
        for val in realize(f, n, field_cap).values():
            total = total + val
        coeffs.append(total * GaussianRational(Fraction(1, n)))
    return SeriesData(coeffs)


# ---------------------------------------------------------------------------
# density and verdicts
# ---------------------------------------------------------------------------


def dirichlet_density(l, z, d, q, schedule=None, precision_bits=None):
    """Ratio of truncated log-series along t_j = q^(-d) (1 - 2^(-j)).

    Everything is exact: the estimate is the exact ratio at the last
    schedule point, the sequence holds every (j, ratio), and the Richardson
    column 2 r_(j+1) - r_j is reported separately, never substituted for
    the estimate. Float renderings at the configured precision are attached
    for reading only.
    """
    if schedule is None:
        schedule = range(4, 21)
    schedule = [int(j) for j in schedule]
    if not schedule or any(j < 1 for j in schedule):
        raise ValueError("density.dirichlet_density: schedule must list "
                         "positive exponents j")
    if not isinstance(d, int) or d < 0:
        raise ValueError("density.dirichlet_density: d must be a "
                         "nonnegative integer dimension")
    if l.range != z.range:
        raise ValueError("density.dirichlet_density: series ranges differ "
                         "(%r vs %r)" % (l.range, z.range))
    if all(c == ZERO for c in z.coeffs):
        raise ValueError("density.dirichlet_density: denominator log-series "
                         "is identically zero")
    pole = Fraction(1, q ** d)
    seq = []
    for j in schedule:
        t = pole * (1 - Fraction(1, 2 ** j))
        num = l.eval_at(t)
        den = z.eval_at(t)
        if den == ZERO:
            raise ValueError("density.dirichlet_density: denominator "
                             "series vanishes at t_%d" % j)
        seq.append((j, num / den))
    richardson = [(seq[i + 1][0],
                   GaussianRational(2) * seq[i + 1][1] - seq[i][1])
                  for i in range(len(seq) - 1)]
    bits = _precision_bits(precision_bits)
    return {
        "estimate": seq[-1][1],
        "sequence": seq,
        "richardson": richardson,
        "schedule": schedule,
        "floats": [(j, gauss_str(r, bits)) for j, r in seq],
    }


def gauss_str(g, bits=None, digits=30):
    """Decimal rendering of an exact Gaussian rational at fixed precision."""
    bits = _precision_bits(bits)
    old = mp.prec
    try:
        mp.prec = bits
        re = mpf(g.re.numerator) / mpf(g.re.denominator)
        if g.im == 0:
            return mp.nstr(re, digits)
        im = mpf(g.im.numerator) / mpf(g.im.denominator)
        return "%s + %s i" % (mp.nstr(re, digits), mp.nstr(im, digits))
    finally:
        mp.prec = old


def _log_abs(e):
    """log|e| for a nonzero exact value, safe for huge numerators."""
    if isinstance(e, GaussianRational):
        n2 = e.norm()
        return (math.log(n2.numerator) - math.log(n2.denominator)) / 2
    e = Fraction(e)
    return math.log(abs(e.numerator)) - math.log(e.denominator)


def _abs_float(g):
    """|z| as a float, via logs so huge exact values cannot overflow."""
    if not g:
        return 0.0
    return math.exp(_log_abs(g))


def _decay_fit(err_rows, q, q0, d):
    """Least-squares decay of log|err| against n log q, plus the fitted
    constant for |err| <= C (q^n q0)^(d - 1/2). (None, 0.0) when everything
    is zero."""
    nz = [(n, e) for n, e in err_rows if e != 0]
    C = 0.0
    for n, e in nz:
        scale = (d - 0.5) * (n * math.log(q) + math.log(q0))
        C = max(C, math.exp(_log_abs(e) - scale))
    if len(nz) < 2:
        return None, C
    slope = _lsq_slope([n * math.log(q) for n, _ in nz],
                       [_log_abs(e) for _, e in nz])
    return slope, C


def chebotarev_report(basic, n_range, d, schedule=None, precision_bits=None,
                      tol=Fraction(1, 10 ** 9), field_cap=12):
    """Dirichlet density of alpha against its Haar average over Sigma.

    The density estimate comes from the exact ratio of truncated log-series;
    the Haar side is (1/|Sigma|) sum alpha. The verdict compares the exact
    gap against tol.
    """
    ns = list(n_range)
    f = ConstructibleFunction.from_basic(basic)
    if ns != list(range(1, len(ns) + 1)):
        raise ValueError("density.chebotarev_report: levels must be 1..K "
                         "contiguously, got %r" % (ns,))
    per_n = []
    lc = []
    zc = []
    for n in ns:
        realized = realize(f, n, field_cap)
        a_n = len(realized)
        total = ZERO
        for val in realized.values():
            total = total + val
        per_n.append({"n": n, "count": a_n, "alpha_sum": total})
        lc.append(total * GaussianRational(Fraction(1, n)))
        zc.append(Fraction(a_n, n))
    dd = dirichlet_density(SeriesData(lc), SeriesData(zc), d,
                           basic.cover.base.q, schedule, precision_bits)
    haar = inner_product(basic.alpha,
                         constant_function(basic.alpha.structure))
    gap = dd["estimate"] - haar
    ok = gap.norm() <= Fraction(tol) ** 2
    return {
        "check": "chebotarev",
        "params": {"d": d, "n_max": ns[-1], "q": basic.cover.base.q,
                   "q0": basic.cover.base.q0,
                   "schedule": dd["schedule"]},
        "per_n": per_n,
        "haar": haar,
        "estimate": dd["estimate"],
        "gap": gap,
        "gap_abs": _abs_float(gap),
        "sequence": dd["sequence"],
        "richardson": dd["richardson"],
        "floats": dd["floats"],
        "verdict": "pass" if ok else "fail",
        "fitted": {"C": None, "exponent": None},
    }


def trace_check(basic, n_range, d, tol=0.05, field_cap=12):
    """Level sums of alpha against (pushforward value) * (point count).

    lhs_n sums alpha over the level's substitutions; rhs_n multiplies the
    base pushforward of alpha at the constant-field class n mod m by the
    point count. Their gap must decay like square-root cancellation:
    exponent <= d - 1/2 + tol, or vanish identically.
    """
    cover = basic.cover
    ns = list(n_range)
    _T, _pi, beta = pushforward_to_base(cover, ns, basic.alpha)
    m = cover.const_field_degree
    per_n = []
    errs = []
    for n in ns:
        lv = cover.level(n, field_cap)
        lhs = ZERO
        for i in lv.subst:
            lhs = lhs + basic.alpha(i)
        rhs = beta.values[n % m] * len(lv.xpoints)
        err = lhs - rhs
        per_n.append({"n": n, "count": len(lv.xpoints), "lhs": lhs,
                      "rhs": rhs, "error": err,
                      "error_abs": _abs_float(err)})
        errs.append((n, err))
    q, q0 = cover.base.q, cover.base.q0
    exponent, C = _decay_fit(errs, q, q0, d)
    all_zero = all(e == ZERO for _, e in errs)
    ok = all_zero or exponent is None or exponent <= d - 0.5 + tol
    return {
        "check": "trace",
        "params": {"d": d, "n_max": ns[-1], "q": q, "q0": q0,
                   "constFieldDegree": m},
        "per_n": per_n,
        "pushforward": list(beta.values),
        "verdict": "pass" if ok else "fail",
        "fitted": {"C": C, "exponent": exponent},
    }


def zeta_shape_check(rows, d, mu, q, q0, tol=0.05):
    """Residuals a_n - mu (q^n q0)^d against the square-root bound.

    With d or mu omitted both come from the fit and the residuals are
    floats; declared values keep the residuals exact.
    """
    rows = list(rows)
    pairs = [(r[0], r[2]) for r in rows]
    fit = lang_weil_fit(pairs, q, q0, d=d, mu=mu)
    d, mu = fit.d, fit.mu
    if fit.inferred:
        per_n = [{"n": n, "count": a,
                  "residual": a - mu * float(q ** n * q0) ** d}
                 for n, a in pairs]
    else:
        mu = Fraction(mu)
        per_n = [{"n": n, "count": a,
                  "residual": Fraction(a) - mu * Fraction(q ** n * q0) ** d}
                 for n, a in pairs]
    all_zero = all(row["residual"] == 0 for row in per_n)
    exponent = fit.residual_exponent
    ok = all_zero or exponent is None or exponent <= d - 0.5 + tol
    return {
        "check": "zeta-shape",
        "params": {"d": d, "mu": mu, "q": q, "q0": q0},
        "per_n": per_n,
        "window_constants": fit.window_constants,
        "warnings": fit.warnings,
        "verdict": "pass" if ok else "fail",
        "fitted": {"C": fit.C, "exponent": exponent},
    }


def adjointness_report(fmap, alpha, beta, n_range, pushed, q=None,
                       tol=0.05, field_cap=12):
    """Per-level gap (alpha, f^* beta)_X - (f_* alpha, beta)_Y.

    fmap is either a twist-free EndoSpec (a coordinate self-map of the
    shared variable list; f^* beta is its realized pullback and pushed must
    be f_* alpha as a constructible function on the target) or the string
    "point" (the target is a single point; beta and pushed are then plain
    Gaussian-rational values, pushed typically taken from
    pushforward_to_base). Passes when the gaps vanish identically or decay
    with exponent <= -1/2 + tol.
    """
    ns = list(n_range)
    per_n = []
    gaps = []
    q = q if q is not None else alpha.system.q
    for n in ns:
        u = realize(alpha, n, field_cap)
        if fmap == "point":
            bval = _gauss(beta)
            pval = _gauss(pushed)
            if u:
                total = ZERO
                for val in u.values():
                    total = total + val
                lhs = total * GaussianRational(Fraction(1, len(u))) \
                    * bval.conjugate()
            else:
                lhs = ZERO
            rhs = pval * bval.conjugate()
        else:
            v = realized_pullback(fmap, beta, n, domain=alpha.system,
                                  field_cap=field_cap)
            lhs = pairing(u, v)
            rhs = pairing(realize(pushed, n, field_cap),
                          realize(beta, n, field_cap))
        gap = lhs - rhs
        per_n.append({"n": n, "lhs": lhs, "rhs": rhs, "gap": gap,
                      "gap_abs": _abs_float(gap)})
        gaps.append((n, gap))
    exponent, C = _decay_fit(gaps, q, 1, 0)
    all_zero = all(g == ZERO for _, g in gaps)
    ok = all_zero or exponent is None or exponent <= -0.5 + tol
    return {
        "check": "adjointness",
        "params": {"n_levels": len(ns), "q": q},
        "per_n": per_n,
        "verdict": "pass" if ok else "fail",
        "fitted": {"C": C, "exponent": exponent},
    }


# ---------------------------------------------------------------------------
# rationality probe
# ---------------------------------------------------------------------------


def near_rationality_probe(rows, max_deg):
    """Smallest exact Pade fit of d/dt log Z = sum a_n t^(n-1).

    Candidates (u, v) are scanned by total degree then numerator degree;
    a fit must reproduce every available coefficient, so a truncated match
    that diverges later is rejected rather than reported. The linear solve
    is exact; an underdetermined (consistent) system is flagged degenerate
    and resolved by zeroing the free unknowns.
    """
    rows = list(rows)
    s = [Fraction(r[2]) for r in rows]
    need = 2 * max_deg + 1
    if len(s) < need:
        raise ValueError("density.near_rationality_probe: need at least "
                         "2*maxDeg+1 = %d coefficients, got %d"
                         % (need, len(s)))
    for total in range(2 * max_deg + 1):
        for u in range(total + 1):
            v = total - u
            if u > max_deg or v > max_deg:
                continue
            hit = _pade_attempt(s, u, v)
            if hit is None:
                continue
            num, den, degenerate = hit
            return {
                "check": "pade",
                "params": {"maxDeg": max_deg, "coefficients": len(s)},
                "found": True,
                "u": u,
                "v": v,
                "numerator": num,
                "denominator": den,
                "degenerate": degenerate,
                "verdict": "pass",
            }
    return {
        "check": "pade",
        "params": {"maxDeg": max_deg, "coefficients": len(s)},
        "found": False,
        "reason": "no rational fit within degree bounds",
        "verdict": "fail",
    }


def _pade_attempt(s, u, v):
    """Exact solve of sum_j q_j s_(i-j) = -s_i for all i > u; None if
    inconsistent."""
    eqs = []
    for i in range(u + 1, len(s)):
        row = [s[i - j] if j <= i else Fraction(0) for j in range(1, v + 1)]
        eqs.append((row, -s[i]))
    sol, degenerate = _solve_exact(eqs, v)
    if sol is None:
        return None
    qden = [Fraction(1)] + sol
    num = []
    for i in range(u + 1):
        acc = Fraction(0)
        for j in range(0, min(v, i) + 1):
            acc += qden[j] * s[i - j]
        num.append(acc)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    while len(qden) > 1 and qden[-1] == 0:
        qden.pop()
    return num, qden, degenerate


def _solve_exact(eqs, nvars):
    """Gaussian elimination over Fraction for a (possibly overdetermined)
    system; returns (solution, degenerate) or (None, False) if
    inconsistent. Free unknowns are set to zero and flagged."""
    rows = [list(r) + [b] for r, b in eqs]
    pivot_of = {}
    rank = 0
    for col in range(nvars):
        piv = None
        for i in range(rank, len(rows)):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = 1 / rows[rank][col]
        rows[rank] = [c * inv for c in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        pivot_of[col] = rank
        rank += 1
    for i in range(rank, len(rows)):
        if rows[i][nvars] != 0:
            return None, False
    # free unknowns are zero, so each pivot variable reads off its rhs
    sol = [Fraction(0)] * nvars
    for col, r in pivot_of.items():
        sol[col] = rows[r][nvars]
    degenerate = len(pivot_of) < nvars and bool(eqs)
    return sol, degenerate


# ---------------------------------------------------------------------------
# JSON rendering
# ---------------------------------------------------------------------------


def to_jsonable(obj):
    """Deterministic plain-data form: Fractions as 'p/q' strings, Gaussian
    rationals as {re, im} string pairs, tuples as lists."""
    if isinstance(obj, GaussianRational):
        return {"re": str(obj.re), "im": str(obj.im)}
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str)) or obj is None:
        return obj
    raise TypeError("density.to_jsonable: cannot render %r"
                    % type(obj).__name__)
