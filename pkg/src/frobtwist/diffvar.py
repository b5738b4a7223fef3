"""Difference systems over finite fields and their twisted point sets.

A system lives over a base pair (F_q, phi0) where phi0 acts on constants as
the q0-power Frobenius, q0 = p^e0 with 0 <= e0 <= N (q = p^N; e0 = 0 means
the identity operator). Level-n points are solutions in the algebraic
closure of the equations with x@i read as x^(Q^i) for Q = q^n * q0.

Variables that never occur at a positive shift are implicitly constant: the
relation x@1 = x is adjoined before twisting, so a system with no equations
has point set F_Q^vars (a fixed field) rather than the whole closure.

Counting prefers exact routes. Univariate systems go through the sparse
distinct-root counter and never materialize large fields; multivariate
systems fall back to enumeration over F_(p^M), M = lcm(lcm(1..B), N), with a
stabilization check between consecutive bounds B-1 and B, and exact=False on
the result. Coordinates, when materialized, live in one big field per level
and are sorted by canonical integer encoding.
"""

import itertools
import math
import random
from fractions import Fraction

from .fields import (BudgetError, make_field, embedding, distinct_root_count,
                     dense_roots, dense_gcd, dense_trim, dense_mul,
                     dense_divmod, dense_derivative, dense_eval,
                     dense_powmod, sparse_to_dense, all_nth_roots)
from .diffpoly import (DifferencePolynomial, variable, twist_substitute,
                       evaluate_plain)


class DimensionError(Exception):
    """The point set does not look finite at the probed level."""


class DiffSystem:
    """Finitely many difference equations plus unit conditions."""

    def __init__(self, field, q0_exp, vars_, equations, units=()):
        vars_ = tuple(vars_)
        if not vars_ or len(set(vars_)) != len(vars_):
            raise ValueError("diffvar.DiffSystem: variables must be distinct "
                             "and nonempty")
        if not (0 <= q0_exp <= field.N):
            raise ValueError("diffvar.DiffSystem: q0 must be a power of p "
                             "dividing q (got exponent %d, q = p^%d)"
                             % (q0_exp, field.N))
        for P in equations:
            if not isinstance(P, DifferencePolynomial) or P.vars != vars_ \
                    or (P.field.p, P.field.N) != (field.p, field.N):
                raise ValueError("diffvar.DiffSystem: equation not over the "
                                 "system's ring")
        units = frozenset(units)
        if not units <= set(vars_):
            raise ValueError("diffvar.DiffSystem: units must be declared "
                             "variables")
        self.field = field
        self.q0_exp = q0_exp
        self.vars = vars_
        self.equations = tuple(equations)
        self.units = units

    @property
    def p(self):
        return self.field.p

    @property
    def q(self):
        return self.field.order

    @property
    def q0(self):
        return self.field.p ** self.q0_exp

    def twist_exp(self, n):
        """log_p of the level-n Frobenius power."""
        if n < 1:
            raise ValueError("diffvar: level n must be >= 1")
        return n * self.field.N + self.q0_exp

    def twist_order(self, n):
        return self.field.p ** self.twist_exp(n)

    def effective_equations(self):
        """Declared equations plus implicit constancy x@1 - x.

        A variable with no occurrence at shift >= 1 is constant along the
        difference structure; without this a unit-only system would have an
        infinite point set.
        """
        shifted = set()
        for P in self.equations:
            for mono in P.terms:
                for (j, i), _e in mono:
                    if i >= 1:
                        shifted.add(self.vars[j])
        out = list(self.equations)
        for v in self.vars:
            if v not in shifted:
                out.append(variable(self.field, self.vars, v, 1)
                           - variable(self.field, self.vars, v, 0))
        return out

    def __repr__(self):
        return "DiffSystem(q=%d, q0=%d, vars=%r, %d equations)" % (
            self.q, self.q0, list(self.vars), len(self.equations))


class PointSet:
    """Materialized level-n solutions, coordinates in one field context."""

    def __init__(self, system, n, ctx, points, count, exact, note=""):
        self.system = system
        self.n = n
        self.Q = system.twist_order(n)
        self.ctx = ctx
        self.points = points
        self.count = count
        self.exact = exact
        self.note = note

    def point_dict(self, i):
        return dict(zip(self.system.vars, self.points[i]))

    def __len__(self):
        return self.count

    def __repr__(self):
        return "PointSet(n=%d, count=%d, exact=%s)" % (self.n, self.count,
                                                       self.exact)


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------


def _univariate_sparse(sys, Q):
    """Twisted equations of a one-variable system as sparse exponent maps."""
    out = []
    f = sys.field
    for P in sys.effective_equations():
        tp = twist_substitute(P, Q)
        h = {}
        for mono, c in tp.terms.items():
            e = mono[0][1] if mono else 0
            h[e] = f.add(h.get(e, f.zero), c)
        out.append({e: c for e, c in h.items() if c != f.zero})
    return out


def _combined_sparse(sys, Q, dense_budget):
    """Reduce a univariate system to one polynomial (gcd if several)."""
    hs = [h for h in _univariate_sparse(sys, Q) if h]
    if not hs:
        raise DimensionError(
            "diffvar: apparent positive sigma-dimension (every equation "
            "vanishes identically at level twist Q=%d)" % Q)
    if len(hs) == 1:
        return hs[0]
    f = sys.field
    g = None
    for h in hs:
        d = sparse_to_dense(f, h, dense_budget)
        g = d if g is None else dense_gcd(f, g, d)
    return {e: c for e, c in enumerate(g) if c != f.zero}


def count_points(sys, n, dense_budget=1 << 14, enum_bound=3, budget=1 << 17):
    """Level-n solution count: (count, exact, note)."""
    Q = sys.twist_order(n)
    if len(sys.vars) == 1:
        h = _combined_sparse(sys, Q, dense_budget)
        v = min(h)
        if v > 0:
            h = {e - v: c for e, c in h.items()}
        count = distinct_root_count(sys.field, h, dense_budget)
        if v > 0 and sys.vars[0] not in sys.units:
            count += 1
        return count, True, "univariate exact"
    _pts, count, exact, note, _ctx = _enumerate_level(sys, n, enum_bound,
                                                      budget, False)
    return count, exact, note


def _twisted_plain(sys, Q):
    return [twist_substitute(P, Q) for P in sys.effective_equations()]


def _enumerate_level(sys, n, B, budget, want_points):
    """Brute-force search over F_(p^M)^vars, M = lcm(1..B) up to the base
    degree, with a stabilization check against the bound B-1."""
    if B < 2:
        raise ValueError("diffvar: enumeration bound must be >= 2")
    prev = _enum_once(sys, n, B - 1, budget, False)[1]
    pts, count, ctx = _enum_once(sys, n, B, budget, want_points)
    if prev != count:
        raise DimensionError(
            "diffvar: counts did not stabilize between enumeration bounds "
            "%d and %d (%d vs %d); apparent positive sigma-dimension or "
            "solutions beyond the search field" % (B - 1, B, prev, count))
    note = ("enumerated over F_(p^%d)^%d; counts stable between bounds "
            "%d and %d" % (ctx.N, len(sys.vars), B - 1, B))
    return pts, count, False, note, ctx


def _enum_once(sys, n, B, budget, want_points):
    M = math.lcm(math.lcm(*range(1, B + 1)), sys.field.N)
    ctx = make_field(sys.p, M)
    k = len(sys.vars)
    total = ctx.order ** k
    if total > budget:
        raise BudgetError(
            "diffvar: enumeration budget exceeded "
            "(%d candidate tuples > budget %d)" % (total, budget))
    emb = embedding(sys.field, ctx)
    eqs = _twisted_plain(sys, sys.twist_order(n))
    unit_idx = [i for i, v in enumerate(sys.vars) if v in sys.units]
    pts = [] if want_points else None
    count = 0
    for cand in itertools.product(ctx.elements(budget), repeat=k):
        if any(cand[i] == ctx.zero for i in unit_idx):
            continue
        pt = dict(zip(sys.vars, cand))
        if all(evaluate_plain(P, pt, ctx, emb) == ctx.zero for P in eqs):
            count += 1
            if want_points:
                pts.append(cand)
    if want_points:
        pts.sort(key=lambda t: tuple(ctx.to_int(c) for c in t))
    return pts, count, ctx


def count_sequence(sys, n_range, dense_budget=1 << 14, enum_bound=3,
                   budget=1 << 17):
    """Rows (n, Q, a_n, exact) for each level in n_range."""
    rows = []
    for n in n_range:
        c, exact, _ = count_points(sys, n, dense_budget, enum_bound, budget)
        rows.append((n, sys.twist_order(n), c, exact))
    return rows


def count_sequence_csv(rows):
    lines = ["n,Q,count,exact"]
    for n, Q, c, exact in rows:
        lines.append("%d,%d,%d,%s" % (n, Q, c, "true" if exact else "false"))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# materialization
# ---------------------------------------------------------------------------


def _odd_part(k, p):
    while k % p == 0:
        k //= p
    return k


def _plog(v, p):
    """e with p^e = v, or None."""
    e = 0
    while v > 1 and v % p == 0:
        v //= p
        e += 1
    return e if v == 1 else None


def points(sys, n, ctx=None, dense_budget=1 << 14, enum_bound=3,
           budget=1 << 17, field_cap=64):
    """Materialize the level-n point set.

    ctx, when given, fixes the field the coordinates are expressed in (the
    experiment's big field); solutions that do not all fit in it are an
    error, never a silent truncation.
    """
    Q = sys.twist_order(n)
    if len(sys.vars) > 1:
        if ctx is not None:
            raise ValueError("diffvar.points: a target field can only be "
                             "fixed for univariate systems")
        pts, count, exact, note, ectx = _enumerate_level(sys, n, enum_bound,
                                                         budget, True)
        return PointSet(sys, n, ectx, pts, count, exact, note)

    count, exact, note = count_points(sys, n, dense_budget, enum_bound,
                                      budget)
    f = sys.field
    h = _combined_sparse(sys, Q, dense_budget)
    v = min(h)
    if v > 0:
        h = {e - v: c for e, c in h.items()}
    add_zero = v > 0 and sys.vars[0] not in sys.units

    roots, ctx = _univariate_roots(f, h, ctx, dense_budget, field_cap)
    pts = [(r,) for r in roots]
    if add_zero:
        pts.append((ctx.zero,))
    pts.sort(key=lambda t: ctx.to_int(t[0]))
    if len(pts) != count:
        raise ValueError(
            "diffvar.points: %d of %d solutions escape the experiment's "
            "big field F_(p^%d)" % (count - len(pts), count, ctx.N))
    return PointSet(sys, n, ctx, pts, count, exact, note)


def _univariate_roots(f, h, ctx, dense_budget, field_cap):
    """Roots of a valuation-stripped sparse polynomial, with field discovery.

    When ctx is None the target field is found: a fixed-field shortcut for
    x^(p^s) = x, a root-of-unity search for binomials, and a dense radical
    splitting-field walk otherwise. Returns (roots, ctx).
    """
    p = f.p
    if len(h) <= 1:
        # constant: no roots beyond the possible zero handled by the caller
        return [], ctx if ctx is not None else f

    if len(h) == 2:
        A = max(h)
        c = f.neg(f.mul(h[0], f.inv(h[A])))
        expected = _odd_part(A, p)
        logp = _plog(A + 1, p)
        if c == f.one and logp is not None:
            # x^(p^s - 1) = 1 cuts out F_(p^s) minus zero
            if ctx is None:
                ctx = make_field(p, math.lcm(logp, f.N))
            if ctx.N % logp == 0:
                return [x for x in ctx.fixed_field(logp)
                        if x != ctx.zero], ctx
        if ctx is not None:
            roots = all_nth_roots(ctx, embedding(f, ctx)(c), A)
            if len(roots) != expected:
                raise ValueError(
                    "diffvar.points: binomial roots escape the experiment's "
                    "big field F_(p^%d) (%d found, %d exist)"
                    % (ctx.N, len(roots), expected))
            return roots, ctx
        for j in range(1, field_cap + 1):
            cand = make_field(p, f.N * j)
            roots = all_nth_roots(cand, embedding(f, cand)(c), A)
            if len(roots) == expected:
                return roots, cand
        raise BudgetError("diffvar.points: binomial splitting field exceeds "
                          "degree cap %d" % (f.N * field_cap))

    dense = sparse_to_dense(f, h, dense_budget)
    rad = _dense_radical(f, dense)
    target = len(rad) - 1
    k = _splitting_degree(f, rad, field_cap)
    if ctx is None:
        ctx = make_field(p, f.N * k)
    elif ctx.N % (f.N * k) != 0:
        raise ValueError(
            "diffvar.points: solutions need F_(p^%d) but the experiment's "
            "big field is F_(p^%d)" % (f.N * k, ctx.N))
    fn = embedding(f, ctx)
    roots = dense_roots(ctx, [fn(c) for c in rad])
    if len(roots) != target:
        raise ValueError("diffvar.points: %d of %d solutions escape the "
                         "experiment's big field" % (target - len(roots),
                                                     target))
    return roots, ctx


def _dense_radical(ctx, f):
    """Monic squarefree polynomial with the same distinct roots as f."""
    f = dense_trim(ctx, list(f))
    if not f:
        raise ValueError("diffvar: zero polynomial has no radical")
    out = [ctx.one]
    while len(f) > 1:
        d = dense_derivative(ctx, f)
        if not d:
            # every exponent divisible by p: pass to the p-th root
            nf = [ctx.zero] * ((len(f) - 1) // ctx.p + 1)
            for i in range(0, len(f), ctx.p):
                nf[i // ctx.p] = ctx.pth_root(f[i])
            f = dense_trim(ctx, nf)
            continue
        g = dense_gcd(ctx, f, d)
        w, _ = dense_divmod(ctx, f, g)
        inv = ctx.inv(w[-1])
        w = [ctx.mul(c, inv) for c in w]
        out = dense_mul(ctx, out, w)
        r = g
        while True:
            c = dense_gcd(ctx, r, w)
            if len(c) <= 1:
                break
            r, _ = dense_divmod(ctx, r, c)
        f = dense_trim(ctx, r)
    return out


def _splitting_degree(f, rad, cap):
    """Smallest k with every root of rad inside F_(q^k)."""
    if len(rad) <= 2:
        return 1
    t = [f.zero, f.one]
    g = t
    for k in range(1, cap + 1):
        g = dense_powmod(f, g, f.order, rad)
        if g == t:
            return k
    raise BudgetError("diffvar.points: splitting degree exceeds cap %d"
                      % cap)


# ---------------------------------------------------------------------------
# limit degree
# ---------------------------------------------------------------------------


def limit_degree_estimate(sys, trials=8, levels=4, seed=0):
    """Probabilistic limit degree via consistent specialization chains.

    Random solution chains are grown level by level; the number of distinct
    continuations at each level is exact (radical degree over the closure),
    the generic per-level value is the maximum over trials, and the estimate
    is the minimum over levels. Returns None when the level sequence has not
    stabilized. Requires the level systems to become triangular after
    substitution.
    """
    if levels < 2:
        raise ValueError("diffvar.limit_degree_estimate: needs >= 2 levels")
    rng = random.Random(seed)
    W = make_field(sys.p, sys.field.N * 12)
    emb = embedding(sys.field, W)
    eqs = sys.effective_equations()
    per_level = [[] for _ in range(levels)]
    done = 0
    for _attempt in range(trials * 6):
        if done >= trials:
            break
        chain = _chain_attempt(sys, eqs, W, emb, rng, levels)
        if chain is None:
            continue
        for k in range(levels):
            per_level[k].append(chain[k])
        done += 1
    if done == 0:
        raise ValueError("diffvar.limit_degree_estimate: could not realize "
                         "any specialization chain in F_(p^%d); the system "
                         "may be inconsistent" % W.N)
    generic = [max(v) for v in per_level]
    if generic[-1] != generic[-2]:
        return None
    return min(generic)


def _chain_attempt(sys, eqs, W, emb, rng, levels):
    """Grow one chain; per-level continuation counts, or None on a dead
    branch (bad random choice, or a needed root missing from W)."""
    values = {}
    if _solve_level(sys, eqs, W, emb, rng, values, 0) is None:
        return None
    counts = []
    for k in range(1, levels + 1):
        d_k = _solve_level(sys, eqs, W, emb, rng, values, k)
        if not d_k:
            return None
        counts.append(d_k)
    return counts


def _solve_level(sys, eqs, W, emb, rng, values, k):
    """Solve for the shift-k coordinates given all lower ones in `values`.

    Propagates univariate constraints to a fixpoint, gcd-accumulating the
    radical of every constraint per variable. Returns the product of the
    distinct-continuation counts, None on a dead branch, and raises when the
    level system never becomes triangular or a variable stays unconstrained
    (positive sigma-dimension). Level 0 assigns free variables at random,
    one at a time, and returns 1.
    """
    e0 = sys.q0_exp
    pending = []
    for P in eqs:
        s = P.max_shift
        if s <= k:
            Pk = P.shifted(k - s, coeff_twist=e0)
            if Pk.max_shift == k:
                pending.append(Pk)
    state = {}  # (var_j, k) -> [value, monic radical of the constraint gcd]

    def propagate():
        nonlocal pending
        progress = True
        while pending and progress:
            progress = False
            rest = []
            for P in pending:
                got = _specialize(P, W, emb, values, state)
                if got is None:
                    rest.append(P)
                    continue
                progress = True
                var_key, dense = got
                if var_key is None:
                    if dense_trim(W, dense):
                        return False  # inconsistent branch
                    continue
                rad = _dense_radical(W, dense)
                if len(rad) <= 1:
                    return False
                prev = state.get(var_key)
                if prev is None:
                    roots = dense_roots(W, rad)
                    if not roots:
                        return False  # roots exist but not inside W
                    state[var_key] = [rng.choice(sorted(roots,
                                                        key=W.to_int)), rad]
                else:
                    joint = dense_gcd(W, prev[1], rad)
                    if len(joint) <= 1 or \
                            dense_eval(W, joint, prev[0]) != W.zero:
                        return False
                    prev[1] = joint
            pending = rest
        return True

    if not propagate():
        return None
    if k == 0:
        for j in range(len(sys.vars)):
            if (j, 0) not in state:
                val = W.from_int(rng.randrange(W.order))
                state[(j, 0)] = [val, [W.neg(val), W.one]]
                if not propagate():
                    return None
        if pending:
            raise ValueError("diffvar.limit_degree_estimate: system is not "
                             "triangularizable")
        for j in range(len(sys.vars)):
            values[(j, 0)] = state[(j, 0)][0]
        return 1
    if pending:
        raise ValueError("diffvar.limit_degree_estimate: system is not "
                         "triangularizable")
    d = 1
    for j in range(len(sys.vars)):
        got = state.get((j, k))
        if got is None:
            raise DimensionError(
                "diffvar.limit_degree_estimate: variable %r is "
                "unconstrained at shift %d; apparent positive "
                "sigma-dimension" % (sys.vars[j], k))
        values[(j, k)] = got[0]
        d *= len(got[1]) - 1
    return d


def _specialize(P, W, emb, values, state):
    """Substitute known coordinates; allow at most one unknown variable.

    Returns (unknown_key_or_None, dense poly in the unknown), or None while
    two or more coordinates of P are still unknown.
    """
    unknown = None
    for mono in P.terms:
        for key, _e in mono:
            if key in values or key in state:
                continue
            if unknown is None or unknown == key:
                unknown = key
            else:
                return None
    coeffs = {}
    for mono, c in P.terms.items():
        acc = emb(c)
        e_unknown = 0
        for key, e in mono:
            if key == unknown:
                e_unknown += e
                continue
            val = values[key] if key in values else state[key][0]
            acc = W.mul(acc, W.pow(val, e))
        coeffs[e_unknown] = W.add(coeffs.get(e_unknown, W.zero), acc)
    deg = max(coeffs)
    dense = [coeffs.get(i, W.zero) for i in range(deg + 1)]
    return unknown, dense


# ---------------------------------------------------------------------------
# Lang-Weil fitting
# ---------------------------------------------------------------------------


def _lsq_slope(xs, ys):
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    den = sum((x - mx) ** 2 for x in xs)
    if den == 0:
        return None
    return sum((x - mx) * (y - my) for x, y in zip(xs, ys)) / den


class LangWeilFit:
    """Outcome of fitting |a_n - mu Q_n^d| <= C Q_n^(d - 1/2)."""

    def __init__(self, d, mu, C, residual_exponent, window_constants,
                 inferred, warnings):
        self.d = d
        self.mu = mu
        self.C = C
        self.residual_exponent = residual_exponent
        self.window_constants = window_constants
        self.inferred = inferred
        self.warnings = warnings

    def __repr__(self):
        return ("LangWeilFit(d=%s, mu=%s, C=%s, residual_exponent=%s)"
                % (self.d, self.mu, self.C, self.residual_exponent))


def lang_weil_fit(rows, q, q0, d=None, mu=None):
    """Fit the count bound with Q_n = q^n q0 from rows of (n, a_n).

    With (d, mu) declared the residuals are exact rationals, C is the
    maximum normalized residual and residual_exponent the least-squares
    slope of log|r_n| against n log q over the nonzero residuals (None when
    fewer than two). Leaving (d, mu) out infers them by log-regression,
    which is a convenience carrying a health warning.
    """
    rows = list(rows)
    if len(rows) < 4:
        raise ValueError("diffvar.lang_weil_fit: needs at least 4 data "
                         "points, got %d" % len(rows))
    if all(a == 0 for _, a in rows):
        raise ValueError("diffvar.lang_weil_fit: all counts are zero")
    warnings = []
    inferred = d is None or mu is None
    if inferred:
        pos = [(n, a) for n, a in rows if a > 0]
        d = _lsq_slope([n * math.log(q) for n, _ in pos],
                       [math.log(a) for _, a in pos])
        n_last, a_last = pos[-1]
        mu = a_last / float(q ** n_last * q0) ** d
        warnings.append("health warning: (d, mu) inferred by "
                        "log-regression; declare them for exact residuals")
        residuals = [(n, a - mu * float(q ** n * q0) ** d) for n, a in rows]
    else:
        mu = Fraction(mu)
        residuals = [(n, Fraction(a) - mu * Fraction(q ** n * q0) ** d)
                     for n, a in rows]

    def log_abs(r):
        if isinstance(r, Fraction):
            return math.log(abs(r.numerator)) - math.log(r.denominator)
        return math.log(abs(r))

    def norm_c(pairs):
        best = 0.0
        for n, r in pairs:
            if r == 0:
                continue
            log_q_pow = n * math.log(q) + math.log(q0)
            best = max(best, math.exp(log_abs(r) - (d - 0.5) * log_q_pow))
        return best

    C = norm_c(residuals)
    half = max(4, (len(residuals) + 1) // 2)
    window_constants = [(residuals[half - 1][0], norm_c(residuals[:half])),
                        (residuals[-1][0], C)]
    nz = [(n, r) for n, r in residuals if r != 0]
    if len(nz) >= 2:
        exponent = _lsq_slope([n * math.log(q) for n, _ in nz],
                              [log_abs(r) for _, r in nz])
    else:
        exponent = None
    return LangWeilFit(d, mu, C, exponent, window_constants, inferred,
                       warnings)
