"""Bounded difference-ideal calculus in truncated shift rings.

A sigma-ideal of F_q{x_1,...,x_m} is an ideal stable under the shift
endomorphism sigma (which moves x@i to x@i+1 and twists coefficients by
the base Frobenius power).  Everything here works in the truncation
F_q[x_j@i : i <= k]: generators are closed under formal shifting as far
as the truncation allows, and membership in the resulting ordinary
polynomial ideal is decided exactly by Buchberger's algorithm over the
exact field arithmetic.

The perfect closure adjoins every f with f^nu in the ideal for some
nu = sum n_i sigma^i with natural coefficients, where
f^nu = prod (sigma^i f)^(n_i).  We search the finitely many nu inside
declared bounds (truncation k, support size L, total weight M) and
return either a witness or an explicit bounded no.  Budgets that run
out raise BudgetError rather than guessing; enlarging any bound can
only turn no into yes, never the reverse.
"""

import heapq
from itertools import combinations_with_replacement

from .fields import BudgetError, embedding
from .diffpoly import DifferencePolynomial, evaluate_twisted, to_string
from .diffvar import points as level_points

BASIS_CAP = 256


# ---------------------------------------------------------------------------
# truncated ideals
# ---------------------------------------------------------------------------


class TruncatedIdeal:
    """Ideal of F_q[x_j@i, i <= k] with difference-polynomial generators."""

    def __init__(self, field, vars_, gens, k):
        vars_ = tuple(vars_)
        if k < 0:
            raise ValueError("ideals: truncation order k must be >= 0")
        gens = tuple(gens)
        for g in gens:
            if not isinstance(g, DifferencePolynomial) or g.vars != vars_ \
                    or (g.field.p, g.field.N) != (field.p, field.N):
                raise ValueError("ideals: generator is not over the ideal's "
                                 "ring")
            if g.max_shift > k:
                raise ValueError("ideals: generator shift %d exceeds the "
                                 "truncation order %d" % (g.max_shift, k))
        self.field = field
        self.vars = vars_
        self.gens = gens
        self.k = k

    def __repr__(self):
        return "TruncatedIdeal(k=%d, %d generators)" % (self.k, len(self.gens))


def shift_closure(gens, k, q0_exp=0):
    """Close the generators under formal shifting within truncation k.

    sigma^j adds j to every variable shift and raises coefficients to
    p^(q0_exp * j).  Input shifts above k are an error: the closure is
    only meaningful when the generators already live in the truncated
    ring.
    """
    gens = list(gens)
    if not gens:
        raise ValueError("ideals.shift_closure: need at least one generator "
                         "to determine the ring")
    field, vars_ = gens[0].field, gens[0].vars
    out, seen = [], set()
    for g in gens:
        if g.is_zero():
            continue
        if g.max_shift > k:
            raise ValueError("ideals.shift_closure: truncation k=%d is below "
                             "an input shift %d" % (k, g.max_shift))
        for j in range(k - g.max_shift + 1):
            h = g.shifted(j, coeff_twist=q0_exp) if j else g
            hk = h.key()
            if hk not in seen:
                seen.add(hk)
                out.append(h)
    return TruncatedIdeal(field, vars_, out, k)


# ---------------------------------------------------------------------------
# Groebner machinery
# ---------------------------------------------------------------------------
#
# Monomials are the diffpoly tuples ((var index, shift), exponent), sorted.
# The truncated variables are ordered x@0 > x@1 > ... > y@0 > ... (variable
# index before shift); the term order is graded reverse lexicographic with
# respect to that sequence.  Keys pad the exponent vector over the full
# k-grid, which leaves the comparison of any two actually occurring
# monomials independent of the padding width.


def _deg(mono):
    return sum(e for _, e in mono)


# key functions are shared per ring shape so the per-monomial memo
# survives across membership queries
_KEY_CACHE = {}


def _key_fn(nvars, k):
    got = _KEY_CACHE.get((nvars, k))
    if got is not None:
        return got
    grid = [(j, i) for j in range(nvars) for i in range(k + 1)]
    grid.reverse()
    memo = {}

    def key(mono):
        kk = memo.get(mono)
        if kk is None:
            exp = dict(mono)
            kk = memo[mono] = (_deg(mono),
                               tuple(-exp.get(cell, 0) for cell in grid))
        return kk

    _KEY_CACHE[(nvars, k)] = key
    return key


def _mono_divides(d, m):
    exp = dict(m)
    return all(exp.get(v, 0) >= e for v, e in d)


def _mono_quot(m, d):
    exp = dict(m)
    for v, e in d:
        exp[v] -= e
    return tuple(sorted((v, e) for v, e in exp.items() if e))


def _mono_lcm(a, b):
    exp = dict(a)
    for v, e in b:
        if exp.get(v, 0) < e:
            exp[v] = e
    return tuple(sorted(exp.items()))


def _mono_times(m, q):
    if not q:
        return m
    exp = dict(m)
    for v, e in q:
        exp[v] = exp.get(v, 0) + e
    return tuple(sorted(exp.items()))


def _monic_row(terms, key, field):
    """Split terms into (lead monomial, tail dict), scaled monic."""
    lm = max(terms, key=key)
    c = terms[lm]
    if c != field.one:
        ci = field.inv(c)
        terms = {m: field.mul(cc, ci) for m, cc in terms.items()}
    tail = {m: cc for m, cc in terms.items() if m != lm}
    return lm, tail


def _normal_form(terms, rows, key, field):
    """Fully reduce terms against monic rows; returns the remainder dict."""
    work = {m: c for m, c in terms.items() if c != field.zero}
    rem = {}
    meta = [(_deg(lm), lm, tail) for lm, tail in rows]
    while work:
        m = max(work, key=key)
        c = work.pop(m)
        mexp = dict(m)
        mdeg = key(m)[0]
        hit = None
        for dlm, lm, tail in meta:
            if dlm <= mdeg and all(mexp.get(v, 0) >= e for v, e in lm):
                hit = (lm, tail)
                break
        if hit is None:
            rem[m] = c
            continue
        lm, tail = hit
        q = _mono_quot(m, lm)
        # the lead term cancels exactly; only the tail lands back in work
        for tm, tc in tail.items():
            mm = _mono_times(tm, q)
            nc = field.sub(work.get(mm, field.zero), field.mul(c, tc))
            if nc == field.zero:
                work.pop(mm, None)
            else:
                work[mm] = nc
    return rem


def _spoly(row_a, row_b, field):
    """S-polynomial of two monic rows; the lcm heads cancel up front."""
    (la, ta), (lb, tb) = row_a, row_b
    lcm = _mono_lcm(la, lb)
    qa, qb = _mono_quot(lcm, la), _mono_quot(lcm, lb)
    out = {}
    for m, c in ta.items():
        out[_mono_times(m, qa)] = c
    for m, c in tb.items():
        mm = _mono_times(m, qb)
        nc = field.sub(out.get(mm, field.zero), c)
        if nc == field.zero:
            out.pop(mm, None)
        else:
            out[mm] = nc
    return out


# completed bases keyed by ring and generator sequence; the truncation
# order is omitted deliberately since the grevlex comparison of occurring
# monomials does not depend on the padding width
_BASIS_CACHE = {}


def _basis_rows(ideal, basis_cap):
    ck = (ideal.field.p, ideal.field.N, ideal.vars,
          tuple(g.key() for g in ideal.gens))
    got = _BASIS_CACHE.get(ck)
    if got is not None:
        return got
    field = ideal.field
    key = _key_fn(len(ideal.vars), ideal.k)
    rows = []
    for g in ideal.gens:
        t = {m: c for m, c in g.terms.items() if c != field.zero}
        if t:
            rows.append(_monic_row(t, key, field))

    heap = []

    def push_pairs(j):
        lj = rows[j][0]
        dj = _deg(lj)
        for i in range(j):
            li = rows[i][0]
            lcm_deg = _deg(_mono_lcm(li, lj))
            if lcm_deg == _deg(li) + dj:
                continue  # coprime heads, S-polynomial reduces to zero
            heapq.heappush(heap, (lcm_deg, i, j))

    for j in range(len(rows)):
        push_pairs(j)
    while heap:
        _, i, j = heapq.heappop(heap)
        s = _spoly(rows[i], rows[j], field)
        r = _normal_form(s, rows, key, field)
        if r:
            if len(rows) >= basis_cap:
                raise BudgetError("ideals: Groebner basis exceeded the cap "
                                  "of %d rows" % basis_cap)
            rows.append(_monic_row(r, key, field))
            push_pairs(len(rows) - 1)
    # minimize: drop rows whose head is a multiple of another kept head,
    # then reduce the surviving tails so membership scans stay short
    rows.sort(key=lambda row: key(row[0]))
    keep = []
    for lm, tail in rows:
        if not any(_mono_divides(km, lm) for km, _ in keep):
            keep.append((lm, tail))
    basis = tuple((lm, _normal_form(tail, keep, key, field))
                  for lm, tail in keep)
    _BASIS_CACHE[ck] = basis
    return basis


def groebner_basis(ideal, basis_cap=BASIS_CAP):
    """The computed basis as polynomials, mainly for inspection."""
    out = []
    for lm, tail in _basis_rows(ideal, basis_cap):
        terms = dict(tail)
        terms[lm] = ideal.field.one
        out.append(DifferencePolynomial(ideal.field, ideal.vars, terms))
    return out


def groebner_membership(f, ideal, basis_cap=BASIS_CAP):
    """Decide f in <gens> inside the truncated ring, exactly."""
    if not isinstance(f, DifferencePolynomial) or f.vars != ideal.vars \
            or (f.field.p, f.field.N) != (ideal.field.p, ideal.field.N):
        raise ValueError("ideals.groebner_membership: f is not over the "
                         "ideal's ring")
    if f.max_shift > ideal.k:
        raise ValueError("ideals.groebner_membership: f has shift %d beyond "
                         "the truncation order %d" % (f.max_shift, ideal.k))
    if f.is_zero():
        return True
    rows = _basis_rows(ideal, basis_cap)
    key = _key_fn(len(ideal.vars), ideal.k)
    return not _normal_form(f.terms, rows, key, ideal.field)


# ---------------------------------------------------------------------------
# perfect closure within bounds
# ---------------------------------------------------------------------------


def power_of(f, nu, q0_exp=0):
    """f^nu for nu given as ((shift, multiplicity), ...)."""
    out = None
    for i, n in nu:
        if i < 0 or n < 1:
            raise ValueError("ideals.power_of: malformed nu term (%r, %r)"
                             % (i, n))
        piece = f.shifted(i, coeff_twist=q0_exp) ** n
        out = piece if out is None else out * piece
    if out is None:
        raise ValueError("ideals.power_of: nu must have at least one term")
    return out


def nu_string(nu):
    """Readable form of a witness exponent, e.g. '1 + sigma'."""
    parts = []
    for i, n in nu:
        if i == 0:
            parts.append(str(n))
            continue
        base = "sigma" if i == 1 else "sigma^%d" % i
        parts.append(base if n == 1 else "%d*%s" % (n, base))
    return " + ".join(parts)


def _nu_vectors(nslots, L, M):
    """Exponent vectors ordered by total weight, then colexicographically."""
    for w in range(1, M + 1):
        batch = set()
        for picks in combinations_with_replacement(range(nslots), w):
            if len(set(picks)) > L:
                continue
            vec = [0] * nslots
            for i in picks:
                vec[i] += 1
            batch.add(tuple(vec))
        for vec in sorted(batch, key=lambda v: tuple(reversed(v))):
            yield vec


def perfect_membership_bounded(f, gens, k, L, M, q0_exp=0,
                               basis_cap=BASIS_CAP):
    """Search for nu with f^nu in the shift closure of gens.

    nu = sum n_i sigma^i runs over support size <= L and total weight
    |nu| = sum n_i <= M, with every shift of f kept inside the
    truncation k.  The first witness in (weight, colex) order is
    returned; its power is rebuilt from the witness tuple and reduced
    again before reporting, so a reported yes never leans on the search
    path alone.
    """
    closure = shift_closure(gens, k, q0_exp)
    if f.vars != closure.vars \
            or (f.field.p, f.field.N) != (closure.field.p, closure.field.N):
        raise ValueError("ideals.perfect_membership_bounded: f is not over "
                         "the generators' ring")
    if f.max_shift > k:
        raise ValueError("ideals.perfect_membership_bounded: f has shift %d "
                         "beyond the truncation order %d" % (f.max_shift, k))
    if L < 1 or M < 1:
        raise ValueError("ideals.perfect_membership_bounded: bounds L and M "
                         "must be >= 1")
    bounds = {"k": k, "L": L, "M": M}
    smax = k - f.max_shift
    shifts = [f.shifted(i, coeff_twist=q0_exp) for i in range(smax + 1)]
    for vec in _nu_vectors(smax + 1, L, M):
        power = None
        for i, n in enumerate(vec):
            if n:
                piece = shifts[i] ** n
                power = piece if power is None else power * piece
        if groebner_membership(power, closure, basis_cap):
            witness = tuple((i, n) for i, n in enumerate(vec) if n)
            check = power_of(f, witness, q0_exp)
            if not groebner_membership(check, closure, basis_cap):
                raise RuntimeError("ideals: witness failed independent "
                                   "re-verification")
            return {"member": True, "witness": witness,
                    "nu": nu_string(witness), "bounds": bounds}
    return {"member": False, "witness": None,
            "reason": "no witness within bounds", "bounds": bounds}


# ---------------------------------------------------------------------------
# cross-checks against point sets and intersections
# ---------------------------------------------------------------------------


def perfect_point_check(system, f, n_range, k=None, L=2, M=3,
                        basis_cap=BASIS_CAP, field_cap=12):
    """Membership versus vanishing on the system's twisted points.

    A bounded yes asserts f^nu lies in the shift closure of the system's
    equations, which forces f to vanish at every twisted point of the
    system.  The check enumerates the points at each level in n_range
    and reports any point where a yes-membership f fails to vanish; a
    bounded no makes the implication vacuous and the verdict stays
    consistent.
    """
    if k is None:
        k = max([f.max_shift] + [g.max_shift for g in system.equations]) + 1
    member = perfect_membership_bounded(f, system.equations, k, L, M,
                                        q0_exp=system.q0_exp,
                                        basis_cap=basis_cap)
    levels = []
    bad = []
    for n in n_range:
        pts = level_points(system, n, field_cap=field_cap)
        Q = system.twist_order(n)
        emb = embedding(system.field, pts.ctx)
        vanish = 0
        for pt in pts.points:
            pd = dict(zip(system.vars, pt))
            if evaluate_twisted(f, pd, Q, pts.ctx, emb) == pts.ctx.zero:
                vanish += 1
            elif member["member"]:
                bad.append({"n": n,
                            "point": [pts.ctx.to_int(c) for c in pt]})
        levels.append({"n": n, "points": len(pts.points),
                       "vanishing": vanish})
    consistent = not member["member"] or not bad
    return {"check": "perfect-point", "membership": member, "levels": levels,
            "counterexamples": bad,
            "verdict": "consistent" if consistent else "inconsistent"}


def _dedupe(polys):
    out, seen = [], set()
    for g in polys:
        if g.is_zero():
            continue
        gk = g.key()
        if gk not in seen:
            seen.add(gk)
            out.append(g)
    return out


def perfect_intersection_check(S, T, k, L, M, q0_exp=0, candidates=None,
                               basis_cap=BASIS_CAP):
    """Cross-check the intersection law for perfect closures within bounds.

    ST multiplies the generator sets pairwise.  For every candidate f:
    a bounded yes for both S and T must give a bounded yes for ST at the
    enlarged bounds (k+1, L+1, M+1), since the intersection argument
    spends one extra closure step; and a bounded yes for ST at the
    original bounds must give a bounded yes for S and for T there, since
    every shifted product generator is a multiple of the matching
    shifted factor.

    The default candidates are the generators, their pairwise products,
    and one common shift of each product.  Sums of generators are left
    out on purpose: a single bounded perfection stage can miss them even
    when the unbounded closure contains them, and the checker must not
    report that gap as a violation of the law.
    """
    S, T = _dedupe(S), _dedupe(T)
    if not S or not T:
        raise ValueError("ideals.perfect_intersection_check: S and T must "
                         "both be nonempty")
    for g in S + T:
        if g.vars != S[0].vars \
                or (g.field.p, g.field.N) != (S[0].field.p, S[0].field.N):
            raise ValueError("ideals.perfect_intersection_check: generators "
                             "come from different rings")
    products = _dedupe([s * t for s in S for t in T])
    if candidates is None:
        shifted = [g.shifted(1, coeff_twist=q0_exp) for g in products
                   if g.max_shift + 1 <= k]
        candidates = _dedupe(S + T + products + shifted)
    cases = []
    violations = []
    for f in candidates:
        if f.max_shift > k:
            continue
        in_s = perfect_membership_bounded(f, S, k, L, M, q0_exp, basis_cap)
        in_t = perfect_membership_bounded(f, T, k, L, M, q0_exp, basis_cap)
        in_st_wide = perfect_membership_bounded(f, products, k + 1, L + 1,
                                                M + 1, q0_exp, basis_cap)
        in_st = perfect_membership_bounded(f, products, k, L, M, q0_exp,
                                           basis_cap)
        forward_ok = not (in_s["member"] and in_t["member"]) \
            or in_st_wide["member"]
        reverse_ok = not in_st["member"] \
            or (in_s["member"] and in_t["member"])
        case = {"f": to_string(f), "in_S": in_s, "in_T": in_t,
                "in_ST_wide": in_st_wide, "in_ST": in_st,
                "forward_ok": forward_ok, "reverse_ok": reverse_ok}
        cases.append(case)
        if not forward_ok:
            violations.append({"f": case["f"], "leg": "forward"})
        if not reverse_ok:
            violations.append({"f": case["f"], "leg": "reverse"})
    return {"check": "perfect-intersection",
            "bounds": {"k": k, "L": L, "M": M},
            "cases": cases, "violations": violations,
            "verdict": "consistent" if not violations else "violated"}
