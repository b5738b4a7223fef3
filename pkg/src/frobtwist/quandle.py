"""Finite difference structures (quandles) and their central-function calculus.

A difference structure is a finite set with a conjugation operation
(s, t) -> s^t satisfying s^s = s and the translation-morphism law
(s^r)^t = (s^t)^(r^t). Elements are indices 0..n-1 and the operation is a
table, so every axiom is an exhaustive check. Central functions take exact
Gaussian-rational values constant on conjugacy domains; pullback, pushforward
and the inner product are implemented with exact arithmetic so structural
identities hold as equalities.
"""

from fractions import Fraction

from .gaussian import GaussianRational, ZERO, ONE


class DiffStructure:
    """Validated conjugation table. conj[s][t] = s^t."""

    def __init__(self, conj, _validated=False):
        conj = tuple(tuple(row) for row in conj)
        n = len(conj)
        if not _validated:
            for i, row in enumerate(conj):
                if len(row) != n:
                    raise ValueError("quandle.build_structure: table is not square")
                for v in row:
                    if not (0 <= v < n):
                        raise ValueError(
                            "quandle.build_structure: entry %r out of range at row %d"
                            % (v, i))
            for s in range(n):
                if conj[s][s] != s:
                    raise ValueError(
                        "quandle.build_structure: sigma^sigma != sigma at index %d" % s)
            for s in range(n):
                for r in range(n):
                    sr = conj[s][r]
                    for t in range(n):
                        if conj[sr][t] != conj[conj[s][t]][conj[r][t]]:
                            raise ValueError(
                                "quandle.build_structure: translation-morphism axiom "
                                "violated at (sigma, rho, tau) = (%d, %d, %d)" % (s, r, t))
        self.n = n
        self.conj = conj
        self._domains = None

    def op(self, s, t):
        return self.conj[s][t]

    def domains(self):
        if self._domains is None:
            self._domains = conjugacy_domains(self)
        return self._domains

    def domain_of(self, s):
        for i, d in enumerate(self.domains()):
            if s in d:
                return i
        raise ValueError("quandle: element %d not in any domain" % s)

    def __eq__(self, other):
        return isinstance(other, DiffStructure) and self.conj == other.conj

    def __hash__(self):
        return hash(self.conj)

    def __repr__(self):
        return "DiffStructure(n=%d)" % self.n

    def to_json(self):
        return {"n": self.n, "conj": [list(row) for row in self.conj]}

    @classmethod
    def from_json(cls, obj):
        if obj.get("n") != len(obj.get("conj", [])):
            raise ValueError("quandle: JSON n does not match table size")
        return build_structure(obj["conj"])


def build_structure(table):
    return DiffStructure(table)


def trivial_structure(n):
    """s^t = s for all s, t: the conjugation quandle of an abelian action."""
    return DiffStructure([[s] * n for s in range(n)], _validated=True)


def is_regular(S):
    """True iff every right translation ()^t is a bijection."""
    for t in range(S.n):
        seen = set(S.conj[s][t] for s in range(S.n))
        if len(seen) != S.n:
            return False
    return True


def is_full(S):
    """Regular structures: search generalized-conjugation witnesses.

    For every pair (tau, tau2) we need a bijection s -> w with
    ()^s o ()^tau2 = ()^tau o ()^w; the witness table maps each pair to the
    lexicographically smallest such assignment. Returns (flag, witness).
    """
    if not is_regular(S):
        raise ValueError("quandle.is_full: structure is not regular")
    n = S.n
    conj = S.conj
    witness = {}
    for tau in range(n):
        for tau2 in range(n):
            feas = []
            for s in range(n):
                ok = []
                for w in range(n):
                    if all(conj[conj[r][tau2]][s] == conj[conj[r][w]][tau]
                           for r in range(n)):
                        ok.append(w)
                feas.append(ok)
            assign = _smallest_matching(feas, n)
            if assign is None:
                return False, None
            witness[(tau, tau2)] = tuple(assign)
    return True, witness


def _smallest_matching(feas, n):
    # lexicographically smallest system of distinct representatives
    used = [False] * n
    out = []

    def rec(i):
        if i == n:
            return True
        for w in feas[i]:
            if not used[w]:
                used[w] = True
                out.append(w)
                if rec(i + 1):
                    return True
                out.pop()
                used[w] = False
        return False

    if rec(0):
        return out
    return None


def conjugacy_domains(S):
    """Connected components of s ~ s^t, each sorted, ordered by least element."""
    n = S.n
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for s in range(n):
        for t in range(n):
            a, b = find(s), find(S.conj[s][t])
            if a != b:
                parent[a] = b
    groups = {}
    for s in range(n):
        groups.setdefault(find(s), []).append(s)
    return sorted((sorted(g) for g in groups.values()), key=lambda g: g[0])


class DiffMorphism:
    """Map of difference structures; compatibility checked exhaustively."""

    def __init__(self, source, target, mapping):
        mapping = tuple(mapping)
        if len(mapping) != source.n:
            raise ValueError("quandle.DiffMorphism: map length != source size")
        for v in mapping:
            if not (0 <= v < target.n):
                raise ValueError("quandle.DiffMorphism: image %r outside target" % (v,))
        for s in range(source.n):
            for t in range(source.n):
                if target.conj[mapping[s]][mapping[t]] != mapping[source.conj[s][t]]:
                    raise ValueError(
                        "quandle.DiffMorphism: (s^t)^phi != (s^phi)^(t^phi) "
                        "at (s, t) = (%d, %d)" % (s, t))
        self.source = source
        self.target = target
        self.map = mapping

    def __call__(self, s):
        return self.map[s]

    def is_injective(self):
        return len(set(self.map)) == len(self.map)

    def is_surjective(self):
        return len(set(self.map)) == self.target.n

    def compose(self, other):
        """self after other: (self o other)(s) = self(other(s))."""
        if other.target is not self.source and other.target != self.source:
            raise ValueError("quandle: morphisms not composable")
        return DiffMorphism(other.source, self.target,
                            tuple(self.map[other.map[s]] for s in range(other.source.n)))


def identity_morphism(S):
    return DiffMorphism(S, S, tuple(range(S.n)))


class CentralFunction:
    """Exact Gaussian-rational function constant on conjugacy domains."""

    def __init__(self, structure, values):
        values = tuple(v if isinstance(v, GaussianRational) else GaussianRational(v)
                       for v in values)
        if len(values) != structure.n:
            raise ValueError("quandle.CentralFunction: value count != structure size")
        for s in range(structure.n):
            for t in range(structure.n):
                if values[structure.conj[s][t]] != values[s]:
                    raise ValueError(
                        "quandle.CentralFunction: not constant on conjugacy domains "
                        "(differs along %d^%d)" % (s, t))
        self.structure = structure
        self.values = values

    def __call__(self, s):
        return self.values[s]

    def __eq__(self, other):
        return (isinstance(other, CentralFunction)
                and self.structure.conj == other.structure.conj
                and self.values == other.values)

    def __add__(self, other):
        if self.structure.conj != other.structure.conj:
            raise ValueError("quandle.CentralFunction: structure mismatch")
        return CentralFunction(
            self.structure,
            [a + b for a, b in zip(self.values, other.values)])

    def __mul__(self, other):
        if isinstance(other, GaussianRational):
            return CentralFunction(self.structure,
                                   [a * other for a in self.values])
        if self.structure.conj != other.structure.conj:
            raise ValueError("quandle.CentralFunction: structure mismatch")
        return CentralFunction(
            self.structure,
            [a * b for a, b in zip(self.values, other.values)])

    def __repr__(self):
        return "CentralFunction(%r)" % (list(self.values),)

    def to_json(self):
        return {"values": [v.to_quad() for v in self.values]}

    @classmethod
    def from_json(cls, structure, obj):
        return cls(structure, [GaussianRational.from_quad(q) for q in obj["values"]])


def indicator(structure, domain_index):
    """Indicator central function of one conjugacy domain."""
    dom = set(structure.domains()[domain_index])
    return CentralFunction(structure,
                           [GaussianRational(1 if s in dom else 0)
                            for s in range(structure.n)])


def constant_function(structure, value=ONE):
    """Central function with the same value everywhere."""
    return CentralFunction(structure, [value] * structure.n)


def inner_product(alpha, gamma):
    """(alpha, gamma) = 1/|S| * sum alpha(s) * conj(gamma(s))."""
    if alpha.structure.conj != gamma.structure.conj:
        raise ValueError("quandle.inner_product: structure mismatch")
    total = ZERO
    for a, g in zip(alpha.values, gamma.values):
        total = total + a * g.conjugate()
    return total * GaussianRational(Fraction(1, alpha.structure.n))


def pullback(psi, beta):
    """psi^* beta = beta o psi; centrality of the result is re-validated."""
    if beta.structure.conj != psi.target.conj:
        raise ValueError("quandle.pullback: function does not live on the target")
    return CentralFunction(psi.source, [beta.values[psi.map[s]] for s in range(psi.source.n)])


def pushforward(psi, alpha):
    """psi_* alpha, via the surjection-then-injection factorization.

    The surjective step averages over fibers; the injective step uses
    psi_* a(t) = (1/|image|) * sum over r in T with t^r in the image of
    a(t^r). The image must be closed under ambient conjugation in the
    target, otherwise no factorization in the sense of the calculus exists
    and we refuse rather than guess.
    """
    if alpha.structure.conj != psi.source.conj:
        raise ValueError("quandle.pushforward: function does not live on the source")
    T = psi.target
    image = sorted(set(psi.map))
    # fiber averages on the image
    avg = {}
    for t in image:
        fiber = [s for s in range(psi.source.n) if psi.map[s] == t]
        total = ZERO
        for s in fiber:
            total = total + alpha.values[s]
        avg[t] = total * GaussianRational(Fraction(1, len(fiber)))
    img_set = set(image)
    for t in image:
        for r in range(T.n):
            if T.conj[t][r] not in img_set:
                raise ValueError(
                    "quandle.pushforward: image of the morphism is not "
                    "conjugation-closed in the target (element %d escapes via %d)"
                    % (t, r))
    m = len(image)
    out = []
    for t in range(T.n):
        total = ZERO
        for r in range(T.n):
            tr = T.conj[t][r]
            if tr in img_set:
                total = total + avg[tr]
        out.append(total * GaussianRational(Fraction(1, m)))
    return CentralFunction(T, out)


class FiberProduct:
    """Quandle fiber product with its two projections."""

    def __init__(self, structure, proj1, proj2, pairs, empty):
        self.structure = structure
        self.proj1 = proj1
        self.proj2 = proj2
        self.pairs = pairs
        self.empty = empty


def quandle_fiber_product(psi1, psi2):
    """Pairs (s1, s2) with psi1(s1) = psi2(s2), componentwise conjugation."""
    if psi1.target.conj != psi2.target.conj:
        raise ValueError("quandle.quandle_fiber_product: targets differ")
    pairs = [(s1, s2)
             for s1 in range(psi1.source.n)
             for s2 in range(psi2.source.n)
             if psi1.map[s1] == psi2.map[s2]]
    index = {pr: i for i, pr in enumerate(pairs)}
    table = []
    for (a1, a2) in pairs:
        row = []
        for (b1, b2) in pairs:
            row.append(index[(psi1.source.conj[a1][b1], psi2.source.conj[a2][b2])])
        table.append(row)
    S = DiffStructure(table) if pairs else DiffStructure([], _validated=True)
    if pairs:
        p1 = DiffMorphism(S, psi1.source, tuple(pr[0] for pr in pairs))
        p2 = DiffMorphism(S, psi2.source, tuple(pr[1] for pr in pairs))
    else:
        p1 = DiffMorphism(S, psi1.source, ())
        p2 = DiffMorphism(S, psi2.source, ())
    return FiberProduct(S, p1, p2, tuple(pairs), not pairs)


class GroupWithOperators:
    """Finite group as a Cayley table plus named endomorphism operators."""

    def __init__(self, cayley, operators=None):
        cayley = tuple(tuple(row) for row in cayley)
        n = len(cayley)
        for row in cayley:
            if len(row) != n or any(not (0 <= v < n) for v in row):
                raise ValueError("quandle.GroupWithOperators: bad Cayley table")
        # latin square
        for i in range(n):
            if len(set(cayley[i])) != n or len(set(cayley[j][i] for j in range(n))) != n:
                raise ValueError("quandle.GroupWithOperators: table is not a Latin square")
        identity = None
        for e in range(n):
            if all(cayley[e][x] == x and cayley[x][e] == x for x in range(n)):
                identity = e
                break
        if identity is None:
            raise ValueError("quandle.GroupWithOperators: no identity element")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if cayley[cayley[a][b]][c] != cayley[a][cayley[b][c]]:
                        raise ValueError("quandle.GroupWithOperators: not associative")
        self.order = n
        self.cayley = cayley
        self.identity = identity
        self.operators = {}
        for name, perm in (operators or {}).items():
            self.add_operator(name, perm)

    def add_operator(self, name, images):
        images = tuple(images)
        if len(images) != self.order:
            raise ValueError("quandle.GroupWithOperators: operator size mismatch")
        for a in range(self.order):
            for b in range(self.order):
                if images[self.cayley[a][b]] != self.cayley[images[a]][images[b]]:
                    raise ValueError(
                        "quandle.GroupWithOperators: operator %r is not a homomorphism"
                        % (name,))
        self.operators[name] = images

    def mul(self, a, b):
        return self.cayley[a][b]

    def inv(self, a):
        for b in range(self.order):
            if self.cayley[a][b] == self.identity:
                return b
        raise ValueError("quandle.GroupWithOperators: no inverse (unreachable)")


def coset_quandle(G, operator):
    """Structure on the coset G*sigma with twisted conjugation.

    (g sigma)^(h sigma) = k sigma where k = c^{-1}(h^{-1} * g * c(h)) and c is
    the chosen operator; c must be bijective. The result is validated against
    the quandle axioms, so an operator that fails to produce a difference
    structure is rejected rather than silently accepted.
    """
    if isinstance(operator, str):
        c = G.operators.get(operator)
        if c is None:
            raise ValueError("quandle.coset_quandle: unknown operator %r" % (operator,))
    else:
        c = tuple(operator)
    if sorted(c) != list(range(G.order)):
        raise ValueError("quandle.coset_quandle: operator is not bijective on G")
    c_inv = [0] * G.order
    for i, v in enumerate(c):
        c_inv[v] = i
    table = []
    for g in range(G.order):
        row = []
        for h in range(G.order):
            k = c_inv[G.mul(G.mul(G.inv(h), g), c[h])]
            row.append(k)
        table.append(row)
    return DiffStructure(table)
