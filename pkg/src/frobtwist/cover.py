"""Explicit Galois covers of difference varieties and Frobenius substitutions.

A cover adds fiber coordinates and shift-free fiber equations to a base
system, together with a finite group G of deck transformations (shift-free
coordinate endomorphisms fixing the base coordinates) and a distinguished
lift sigma_tilde of the base substitution. The level substitutions are the
coset Sigma = G.sigma_tilde; conjugation twisted by the operator g -> g^sigma
makes Sigma a difference structure, and the Frobenius substitution of a
level-n base point is the unique tau in Sigma acting as z -> z^Q on a fiber
point above it, Q = q^n q0.

Every level is materialized inside one big field: the base points are found
first, then the field is grown by integer factors until every fiber splits
completely. Fibers are checked to be G-torsors (size |G|, one free orbit),
and the substitution found at one fiber point is cross-checked at a second;
points whose fibers fail these checks raise instead of being dropped.
"""

from .fields import (BudgetError, make_field, embedding, dense_roots,
                     dense_trim, all_nth_roots)
from .diffpoly import (DifferencePolynomial, EndoSpec, identity_endo,
                       compose_plain, evaluate_plain, variable)
from .diffvar import points as level_points
from .quandle import (GroupWithOperators, coset_quandle, DiffMorphism,
                      trivial_structure, pushforward)


class LevelData:
    """Everything materialized at one level: big field, points, fibers,
    substitution index per base point.

    embq is the base-field-to-big-field homomorphism the level was built
    with. It is the composite of the embedding used to materialize the base
    points with the one that grew the big field, so coefficients and points
    stay in a single compatible tower; two independently chosen embeddings
    need not agree on a non-prime base field.
    """

    __slots__ = ("n", "Q", "ctx", "xpoints", "fibers", "subst", "embq")

    def __init__(self, n, Q, ctx, xpoints, fibers, subst, embq):
        self.n = n
        self.Q = Q
        self.ctx = ctx
        self.xpoints = xpoints
        self.fibers = fibers
        self.subst = subst
        self.embq = embq


class DifferenceCover:
    """Base system + fiber data + deck group + substitution structure.

    Built through build_cover; holds the derived coset structure and a
    per-level materialization cache.
    """

    def __init__(self, base, fiber_vars, fiber_equations, group, gwo,
                 sigma_tilde, sigma_elements, operator, structure,
                 const_field_degree, validation_level):
        self.base = base
        self.fiber_vars = fiber_vars
        self.fiber_equations = fiber_equations
        self.all_vars = base.vars + fiber_vars
        self.group = group
        self.gwo = gwo
        self.sigma_tilde = sigma_tilde
        self.sigma_elements = sigma_elements
        self.operator = operator
        self.structure = structure
        self.const_field_degree = const_field_degree
        self.validation_level = validation_level
        self._levels = {}

    @property
    def degree(self):
        return len(self.group)

    def level(self, n, field_cap=12):
        got = self._levels.get(n)
        if got is None:
            got = _materialize_level(self, n, field_cap)
            self._levels[n] = got
        return got

    def __repr__(self):
        return ("DifferenceCover(|G|=%d, fibers=%r over %r)"
                % (len(self.group), list(self.fiber_vars),
                   list(self.base.vars)))


def build_cover(base, fiber_vars, fiber_equations, generators, sigma_tilde,
                const_field_degree=1, validation_level="basic",
                group_cap=64):
    """Assemble and validate a cover.

    generators must fix the base coordinates and carry no constant twist;
    sigma_tilde must twist constants exactly like the base operator and its
    base-coordinate images must agree with the structural equations
    x@1 = g(x) where the base system has them.
    """
    if validation_level not in ("none", "basic", "full"):
        raise ValueError("cover.build_cover: validationLevel must be "
                         "'none', 'basic' or 'full'")
    fiber_vars = tuple(fiber_vars)
    if not fiber_vars or set(fiber_vars) & set(base.vars):
        raise ValueError("cover.build_cover: fiber variables must be "
                         "nonempty and disjoint from the base variables")
    all_vars = base.vars + fiber_vars
    for P in fiber_equations:
        if P.vars != all_vars:
            raise ValueError("cover.build_cover: fiber equation is not "
                             "over base+fiber variables")
        if P.max_shift != 0:
            raise ValueError("cover.build_cover: fiber equations must be "
                             "shift-free (fibers are geometric)")
        if not (set(P.used_vars()) & set(fiber_vars)):
            raise ValueError("cover.build_cover: fiber equation involves "
                             "no fiber variable")
    if not isinstance(sigma_tilde, EndoSpec) or sigma_tilde.vars != all_vars:
        raise ValueError("cover.build_cover: sigma_tilde must be an "
                         "endomorphism of the total coordinate ring")
    if sigma_tilde.const_twist != base.q0_exp:
        raise ValueError(
            "cover.build_cover: sigma_tilde twists constants by p^%d but "
            "the base operator twists by p^%d"
            % (sigma_tilde.const_twist, base.q0_exp))
    _check_structural_images(base, all_vars, sigma_tilde)

    group = _group_closure(base, all_vars, generators, group_cap)
    index = {g.key(): i for i, g in enumerate(group)}
    cayley = [[index[compose_plain(a, b).key()] for b in group]
              for a in group]
    gwo = GroupWithOperators(cayley)
    sigma_elements = tuple(compose_plain(g, sigma_tilde) for g in group)

    operator = _derive_operator(base, fiber_vars, fiber_equations, group,
                                sigma_tilde)
    gwo.add_operator("sigma", operator)
    structure = coset_quandle(gwo, "sigma")

    if const_field_degree < 1:
        raise ValueError("cover.build_cover: constFieldDegree must be >= 1")

    cover = DifferenceCover(base, fiber_vars, tuple(fiber_equations), group,
                            gwo, sigma_tilde, sigma_elements, operator,
                            structure, const_field_degree, validation_level)
    if validation_level != "none":
        levels = (1, 2) if validation_level == "full" else (1,)
        for n in levels:
            _validate_level(cover, n)
    return cover


def _check_structural_images(base, all_vars, sigma_tilde):
    """Base images of sigma_tilde must match x@1 = g(x) equations."""
    shifted_anywhere = set()
    for P in base.equations:
        for mono in P.terms:
            for (j, i), _e in mono:
                if i >= 1:
                    shifted_anywhere.add(base.vars[j])
    for jx, x in enumerate(base.vars):
        image = sigma_tilde.images[x]
        if x not in shifted_anywhere:
            # implicitly constant: the lift must leave it alone
            if image != variable(sigma_tilde.field, all_vars, x):
                raise ValueError(
                    "cover.build_cover: base variable %r is constant but "
                    "sigma_tilde moves it" % x)
            continue
        expected = structural_images(base, all_vars, jx)
        if expected and image not in expected:
            raise ValueError(
                "cover.build_cover: sigma_tilde image of %r does not match "
                "the structural equation %r@1 = ..." % (x, x))


def structural_images(base, all_vars, jx):
    """Every g from equations of the shape x@1 - g(shift-free)."""
    f = base.field
    out = []
    for P in base.equations:
        lead_coeff = None
        ok = True
        for mono, c in P.terms.items():
            has_shift = any(i >= 1 for (_j, i), _e in mono)
            if not has_shift:
                continue
            if mono == (((jx, 1), 1),) and lead_coeff is None:
                lead_coeff = c
            else:
                ok = False
                break
        if not ok or lead_coeff is None:
            continue
        rest = P - variable(f, base.vars, base.vars[jx], 1).scale(lead_coeff)
        if rest.max_shift != 0:
            continue
        g = rest.scale(f.neg(f.inv(lead_coeff)))
        # same indices: the base variables are a prefix of the total list
        out.append(DifferencePolynomial(f, all_vars, dict(g.terms)))
    return out


def _group_closure(base, all_vars, generators, cap):
    """BFS closure of the generators under composition, identity first."""
    f = base.field
    for g in generators:
        if not isinstance(g, EndoSpec) or g.vars != all_vars:
            raise ValueError("cover.build_cover: generator is not an "
                             "endomorphism of the total coordinate ring")
        if g.const_twist != 0:
            raise ValueError("cover.build_cover: deck generators must not "
                             "twist constants")
        for x in base.vars:
            if g.images[x] != variable(f, all_vars, x):
                raise ValueError("cover.build_cover: deck generator moves "
                                 "base variable %r" % x)
    ident = identity_endo(f, all_vars)
    group = [ident]
    seen = {ident.key()}
    frontier = [ident]
    while frontier:
        nxt = []
        for a in frontier:
            for g in generators:
                b = compose_plain(a, g)
                k = b.key()
                if k not in seen:
                    seen.add(k)
                    group.append(b)
                    nxt.append(b)
                    if len(group) > cap:
                        raise BudgetError(
                            "cover.build_cover: deck group closure "
                            "exceeded cap %d" % cap)
        frontier = nxt
    return tuple(group)


def _derive_operator(base, fiber_vars, fiber_equations, group, sigma_tilde):
    """Permutation i -> j with g_i . sigma = sigma . g_j.

    Formal coordinate match first; when images only agree modulo the fiber
    equations, fall back to comparing both sides on every level-1 fiber
    point.
    """
    right = {}
    for j, g in enumerate(group):
        right.setdefault(compose_plain(sigma_tilde, g).key(), []).append(j)
    out = []
    fallback = []
    for i, g in enumerate(group):
        js = right.get(compose_plain(g, sigma_tilde).key(), [])
        if len(js) == 1:
            out.append(js[0])
        else:
            out.append(None)
            fallback.append(i)
    if fallback:
        _derive_operator_points(base, fiber_vars, fiber_equations, group,
                                sigma_tilde, out, fallback)
    if sorted(out) != list(range(len(group))):
        raise ValueError("cover.build_cover: sigma action on the deck "
                         "group is not a bijection")
    return tuple(out)


def _derive_operator_points(base, fiber_vars, fiber_equations, group,
                            sigma_tilde, out, fallback):
    """Resolve operator images by evaluation on level-1 fiber points."""

    class _Shim:
        pass

    shim = _Shim()
    shim.base = base
    shim.fiber_vars = fiber_vars
    shim.fiber_equations = tuple(fiber_equations)
    shim.all_vars = base.vars + fiber_vars
    shim.group = group
    ctx, _xpts, fibers, emb = _fibers_for_level(shim, 1, 12)
    zs = [dict(zip(shim.all_vars, z)) for fib in fibers for z in fib]
    if not zs:
        raise ValueError("cover.build_cover: cannot derive the sigma "
                         "action, level 1 has no points")

    def images_at(endo, z):
        return tuple(evaluate_plain(endo.images[v], z, ctx, emb)
                     for v in shim.all_vars)

    left = {i: compose_plain(group[i], sigma_tilde) for i in fallback}
    rights = [compose_plain(sigma_tilde, g) for g in group]
    for i in fallback:
        hits = [j for j in range(len(group))
                if all(images_at(left[i], z) == images_at(rights[j], z)
                       for z in zs)]
        if len(hits) != 1:
            raise ValueError(
                "cover.build_cover: could not derive the sigma action on "
                "deck element %d (%d point-level matches); the group may "
                "not be normalized by the lift" % (i, len(hits)))
        out[i] = hits[0]


# ---------------------------------------------------------------------------
# level materialization
# ---------------------------------------------------------------------------


def _materialize_level(cover, n, field_cap):
    """Big field, base points, fibers and substitutions for one level."""
    xset = level_points(cover.base, n)
    return level_over(cover, n, xset.ctx, xset.points, field_cap)


def _fibers_for_level(cover, n, field_cap):
    xset = level_points(cover.base, n)
    return _fibers_over(cover, n, xset.ctx, xset.points, field_cap)


def _fibers_over(cover, n, base_ctx, base_points, field_cap):
    """Find one field splitting every fiber; grow it by integer factors
    starting from the field the base points live in.

    All base-field coefficients go through the same composite map as the
    points themselves, so the level is internally consistent even when the
    base field has several embeddings into the big field."""
    base = cover.base
    emb_q = embedding(base.field, base_ctx)
    d_x = base_ctx.N
    last_err = None
    for k in range(1, field_cap + 1):
        ctx = make_field(base.p, d_x * k)
        emb_x = embedding(base_ctx, ctx)
        embq = (lambda c, _ex=emb_x, _eq=emb_q: _ex(_eq(c)))
        xpoints = [tuple(emb_x(c) for c in pt) for pt in base_points]
        try:
            fibers = [_solve_fiber(cover, ctx, embq,
                                   dict(zip(base.vars, pt)))
                      for pt in xpoints]
        except _FieldTooSmall as e:
            last_err = e
            continue
        return ctx, xpoints, fibers, embq
    raise BudgetError(
        "cover.level: no field of degree up to %d x %d splits every fiber "
        "at level %d (%s)" % (d_x, field_cap, n, last_err))


def level_over(cover, n, base_ctx, base_points, field_cap=12):
    """LevelData for an externally supplied list of level-n base points.

    The points must satisfy the base system at level n; they are embedded
    into whatever extension of their field splits every fiber. Used to
    restrict a cover to a stratum without re-deriving the point set.
    """
    ctx, xpoints, fibers, embq = _fibers_over(cover, n, base_ctx,
                                              base_points, field_cap)
    subst = [_substitution_at(cover, n, ctx, embq,
                              dict(zip(cover.base.vars, xpoints[i])),
                              fibers[i])
             for i in range(len(xpoints))]
    return LevelData(n, cover.base.twist_order(n), ctx, xpoints, fibers,
                     subst, embq)


class _FieldTooSmall(Exception):
    pass


def _solve_fiber(cover, ctx, emb, xpt):
    """Fiber points above one base point, as sorted tuples over all_vars.

    Solves the fiber equations triangularly, then checks the G-torsor
    property: exactly |G| points forming one free orbit.
    """
    partials = [dict(xpt)]
    remaining = list(cover.fiber_equations)
    unsolved = set(cover.fiber_vars)
    while unsolved:
        progress = False
        for P in list(remaining):
            var, dense_by_partial = _fiber_specialize(P, cover, ctx, emb,
                                                      partials, unsolved)
            if var is None:
                continue
            progress = True
            remaining.remove(P)
            unsolved.discard(var)
            new_partials = []
            for sol, dense in zip(partials, dense_by_partial):
                for r in _fiber_roots(ctx, dense):
                    ext = dict(sol)
                    ext[var] = r
                    new_partials.append(ext)
            partials = new_partials
            if not partials:
                raise _FieldTooSmall("fiber over %r has no point in "
                                     "F_(p^%d)" % (xpt, ctx.N))
        if not progress:
            raise ValueError("cover: fiber equations are not triangular "
                             "over %r" % (sorted(unsolved),))
    for P in remaining:
        for sol in partials:
            if evaluate_plain(P, sol, ctx, emb) != ctx.zero:
                raise ValueError("cover: fiber point fails a non-triangular "
                                 "fiber equation")
    pts = sorted((tuple(sol[v] for v in cover.all_vars) for sol in partials),
                 key=lambda t: tuple(ctx.to_int(c) for c in t))
    _check_torsor(cover, ctx, emb, xpt, pts)
    return tuple(pts)


def _fiber_specialize(P, cover, ctx, emb, partials, unsolved):
    """Dense image of P under each partial solution when P has exactly one
    unsolved variable; (None, None) otherwise."""
    used = set(P.used_vars()) & unsolved
    if len(used) != 1:
        return None, None
    var = used.pop()
    jv = cover.all_vars.index(var)
    denses = []
    for sol in partials:
        coeffs = {}
        for mono, c in P.terms.items():
            acc = emb(c)
            e_var = 0
            for (j, _i), e in mono:
                if j == jv:
                    e_var += e
                else:
                    acc = ctx.mul(acc, ctx.pow(sol[cover.all_vars[j]], e))
            coeffs[e_var] = ctx.add(coeffs.get(e_var, ctx.zero), acc)
        deg = max(coeffs)
        dense = dense_trim(ctx, [coeffs.get(i, ctx.zero)
                                 for i in range(deg + 1)])
        if len(dense) <= 1:
            raise ValueError("cover: fiber equation degenerates over a "
                             "base point")
        denses.append(dense)
    return var, denses


def _fiber_roots(ctx, dense):
    """Roots in ctx; binomial fast path, dense splitting otherwise."""
    support = [i for i, c in enumerate(dense) if c != ctx.zero]
    if support == [0]:
        return []
    if len(support) == 2 and support[0] == 0:
        a = dense[support[1]]
        c = ctx.neg(ctx.mul(dense[0], ctx.inv(a)))
        return all_nth_roots(ctx, c, support[1])
    if len(support) == 1:
        return [ctx.zero]
    return dense_roots(ctx, dense)


def _check_torsor(cover, ctx, emb, xpt, pts):
    if len(pts) > len(cover.group):
        # growing the field can only add points; this cover is wrong
        raise ValueError(
            "cover: fiber over %r has %d points but the deck group has "
            "only %d elements" % (xpt, len(pts), len(cover.group)))
    if len(pts) < len(cover.group):
        raise _FieldTooSmall(
            "fiber over %r has %d points in F_(p^%d), deck group has %d"
            % (xpt, len(pts), ctx.N, len(cover.group)))
    z0 = dict(zip(cover.all_vars, pts[0]))
    orbit = set()
    for g in cover.group:
        img = tuple(evaluate_plain(g.images[v], z0, ctx, emb)
                    for v in cover.all_vars)
        orbit.add(img)
    if len(orbit) != len(cover.group):
        raise ValueError("cover: deck group does not act freely on the "
                         "fiber over %r" % (xpt,))
    if orbit != set(pts):
        raise ValueError("cover: deck group is not transitive on the fiber "
                         "over %r" % (xpt,))


def _substitution_at(cover, n, ctx, emb, xpt, fiber_pts):
    """Index of the unique tau in Sigma with tau(z) = z^Q at the canonical
    fiber point; cross-checked at a second point when one exists."""
    i0 = _match_substitution(cover, n, ctx, emb, fiber_pts[0])
    if len(fiber_pts) > 1:
        i1 = _match_substitution(cover, n, ctx, emb, fiber_pts[1])
        if cover.structure.domain_of(i0) != cover.structure.domain_of(i1):
            raise ValueError(
                "cover: substitutions at two fiber points over %r live in "
                "different conjugacy domains (%d vs %d)" % (xpt, i0, i1))
    return i0


def _match_substitution(cover, n, ctx, emb, zpt):
    z = dict(zip(cover.all_vars, zpt))
    e = cover.base.twist_exp(n) % ctx.N
    target = tuple(ctx.frobenius(z[v], e) for v in cover.all_vars)
    hits = []
    for i, tau in enumerate(cover.sigma_elements):
        img = tuple(evaluate_plain(tau.images[v], z, ctx, emb)
                    for v in cover.all_vars)
        if img == target:
            hits.append(i)
    if not hits:
        raise ValueError(
            "cover: no substitution matches z -> z^Q on a fiber point; "
            "the cover is not etale here or the big field is wrong")
    if len(hits) > 1:
        raise ValueError(
            "cover: %d substitutions match one fiber point; the deck "
            "action does not separate them" % len(hits))
    return hits[0]


def _validate_level(cover, n):
    """Point checks behind validationLevel: torsors and substitutions come
    free with materialization; 'full' additionally checks that Frobenius
    maps fibers onto fibers."""
    lv = cover.level(n)
    if cover.validation_level != "full":
        return
    ctx = lv.ctx
    e = cover.base.twist_exp(n) % ctx.N
    xindex = {pt: i for i, pt in enumerate(lv.xpoints)}
    kx = len(cover.base.vars)
    for i, pt in enumerate(lv.xpoints):
        xq = tuple(ctx.frobenius(c, e) for c in pt)
        j = xindex.get(xq)
        if j is None:
            raise ValueError("cover: level-%d base points are not stable "
                             "under z -> z^Q" % n)
        fiber_q = set(lv.fibers[j])
        for zpt in lv.fibers[i]:
            zq = tuple(ctx.frobenius(c, e) for c in zpt)
            if zq not in fiber_q:
                raise ValueError("cover: Frobenius does not map the fiber "
                                 "over point %d onto the fiber over its "
                                 "image" % i)


# ---------------------------------------------------------------------------
# public queries
# ---------------------------------------------------------------------------


def fiber(cover, n, x_index):
    """Sorted fiber points (tuples over base+fiber vars) above one base
    point of the materialized level."""
    lv = cover.level(n)
    return lv.fibers[x_index]


def frobenius_substitution(cover, n, x_index):
    """Index into Sigma of the substitution at the canonical fiber point."""
    lv = cover.level(n)
    return lv.subst[x_index]


def inertia_check(cover, n):
    """Every fiber is a free orbit: distinct substitution images per fiber
    point. Returns the number of points checked."""
    lv = cover.level(n)
    checked = 0
    for fib in lv.fibers:
        per_point = [_match_substitution(cover, n, lv.ctx, lv.embq, z)
                     for z in fib]
        dom = {cover.structure.domain_of(i) for i in per_point}
        if len(dom) != 1:
            raise ValueError("cover.inertia_check: one fiber meets %d "
                             "conjugacy domains" % len(dom))
        checked += len(fib)
    return checked


def component_equity(cover, n):
    """Per-substitution point counts over the whole level; their sum must be
    |G| * |X_n| (every total-space point carries exactly one substitution)."""
    lv = cover.level(n)
    counts = {}
    for fib in lv.fibers:
        for z in fib:
            i = _match_substitution(cover, n, lv.ctx, lv.embq, z)
            counts[i] = counts.get(i, 0) + 1
    total = sum(counts.values())
    expected = len(cover.group) * len(lv.xpoints)
    if total != expected:
        raise ValueError("cover.component_equity: %d substitution hits for "
                         "%d total-space points" % (total, expected))
    return counts


def substitution_histogram(cover, n):
    """Rows (n, domain_id, domain_size, count) over all conjugacy domains."""
    lv = cover.level(n)
    domains = cover.structure.domains()
    counts = [0] * len(domains)
    for i in lv.subst:
        counts[cover.structure.domain_of(i)] += 1
    return [(n, d, len(domains[d]), counts[d]) for d in range(len(domains))]


def histogram_csv(rows):
    lines = ["n,domain_id,domain_size,count"]
    for n, d, size, c in rows:
        lines.append("%d,%d,%d,%d" % (n, d, size, c))
    return "\n".join(lines) + "\n"


def pushforward_to_base(cover, n_range, alpha=None):
    """Project Sigma onto the trivial structure of the constant-field cycle.

    The base structure has m = constFieldDegree elements; a substitution
    observed at level n sits over n mod m. Every element of Sigma must be
    observed across n_range, and an element observed at two incompatible
    levels is an error. Returns (T, pi, pushforward(pi, alpha)) with the
    last entry None when alpha is None.
    """
    m = cover.const_field_degree
    placed = {}
    for n in n_range:
        lv = cover.level(n)
        for i in lv.subst:
            prev = placed.get(i)
            if prev is None:
                placed[i] = n % m
            elif prev != n % m:
                raise ValueError(
                    "cover.pushforward_to_base: substitution %d observed "
                    "at levels %d and %d mod %d; constFieldDegree is "
                    "inconsistent" % (i, prev, n % m, m))
    missing = [i for i in range(len(cover.sigma_elements))
               if i not in placed]
    if missing:
        raise ValueError(
            "cover.pushforward_to_base: substitutions %r never observed "
            "over the sampled levels; cannot place them over the base"
            % (missing,))
    T = trivial_structure(m)
    for s in range(cover.structure.n):
        for t in range(cover.structure.n):
            if placed[cover.structure.conj[s][t]] != placed[s]:
                raise ValueError(
                    "cover.pushforward_to_base: conjugation moves a "
                    "substitution across base levels; constFieldDegree "
                    "is wrong")
    pi = DiffMorphism(cover.structure, T,
                      tuple(placed[i] for i in range(cover.structure.n)))
    beta = pushforward(pi, alpha) if alpha is not None else None
    return T, pi, beta
