"""Difference polynomials in shifted variables, with parser and endomorphisms.

A difference polynomial lives in F_q[x_j@i] where x@i denotes the i-th shift
(sigma^i applied to x). Terms map monomials to nonzero F_q coefficients;
a monomial is a sorted tuple of ((variable index, shift), exponent).

Coefficients are elements of a FieldCtx for F_q. In source text an integer
literal v denotes the canonical element with base-p digit expansion of
v mod q, so over a prime field this is the usual residue while over F_4 the
literal 2 names the generator. That keeps every element of every base field
expressible inside the integer-only grammar.

Grammar (whitespace insensitive):

    expr   := term (("+"|"-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" NAT)?
    atom   := NAT | VAR ("@" NAT)? | "(" expr ")" | "-" atom
    VAR    := [a-zA-Z][a-zA-Z0-9_]*
    NAT    := [0-9]+

Unary minus sits at the atom level, so "-x^2" squares the negated atom.
"""


class DifferencePolynomial:
    """Immutable normalized difference polynomial over a field context."""

    __slots__ = ("field", "vars", "terms")

    def __init__(self, field, vars_, terms):
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vars", tuple(vars_))
        clean = {}
        for mono, c in terms.items():
            if c != field.zero:
                clean[tuple(sorted(mono))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, *a):
        raise AttributeError("DifferencePolynomial is immutable")

    # -- queries -------------------------------------------------------------

    @property
    def max_shift(self):
        m = 0
        for mono in self.terms:
            for (_, i), _e in mono:
                m = max(m, i)
        return m

    def is_zero(self):
        return not self.terms

    def used_vars(self):
        out = set()
        for mono in self.terms:
            for (j, _), _e in mono:
                out.add(self.vars[j])
        return out

    def shifts_of(self, name):
        j = self.vars.index(name)
        out = set()
        for mono in self.terms:
            for (jj, i), _e in mono:
                if jj == j:
                    out.add(i)
        return out

    def constant_value(self):
        """The coefficient of the empty monomial (field zero if absent)."""
        return self.terms.get((), self.field.zero)

    # -- ring operations -----------------------------------------------------

    def _compat(self, other):
        if (self.field.p, self.field.N) != (other.field.p, other.field.N) \
                or self.vars != other.vars:
            raise ValueError("diffpoly: polynomials from different rings")

    def __add__(self, other):
        self._compat(other)
        terms = dict(self.terms)
        f = self.field
        for mono, c in other.terms.items():
            terms[mono] = f.add(terms.get(mono, f.zero), c)
        return DifferencePolynomial(f, self.vars, terms)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        f = self.field
        return DifferencePolynomial(f, self.vars,
                                    {m: f.neg(c) for m, c in self.terms.items()})

    def __mul__(self, other):
        self._compat(other)
        f = self.field
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                c = f.mul(c1, c2)
                if mono in out:
                    out[mono] = f.add(out[mono], c)
                else:
                    out[mono] = c
        return DifferencePolynomial(f, self.vars, out)

    def scale(self, c):
        f = self.field
        return DifferencePolynomial(f, self.vars,
                                    {m: f.mul(cc, c) for m, cc in self.terms.items()})

    def __pow__(self, e):
        if e < 0:
            raise ValueError("diffpoly: negative exponent")
        result = DifferencePolynomial(self.field, self.vars, {(): self.field.one})
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shifted(self, j, coeff_twist=0):
        """sigma^j applied formally: shifts + j, coefficients ^(p^(twist*j))."""
        f = self.field
        out = {}
        for mono, c in self.terms.items():
            nm = tuple(((vj, i + j), e) for (vj, i), e in mono)
            out[nm] = f.frobenius(c, coeff_twist * j) if coeff_twist else c
        return DifferencePolynomial(f, self.vars, out)

    def twist_coefficients(self, e):
        if e == 0:
            return self
        f = self.field
        return DifferencePolynomial(f, self.vars,
                                    {m: f.frobenius(c, e) for m, c in self.terms.items()})

    # -- identity ------------------------------------------------------------

    def key(self):
        return (self.vars, tuple(sorted(self.terms.items())))

    def __eq__(self, other):
        if not isinstance(other, DifferencePolynomial):
            return NotImplemented
        return (self.field.p, self.field.N) == (other.field.p, other.field.N) \
            and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return "DifferencePolynomial(%s)" % to_string(self)


def _mono_mul(m1, m2):
    d = dict(m1)
    for k, e in m2:
        d[k] = d.get(k, 0) + e
    return tuple(sorted(d.items()))


def constant(field, vars_, c):
    return DifferencePolynomial(field, vars_, {(): c})


def variable(field, vars_, name, shift=0, exp=1):
    j = vars_.index(name)
    return DifferencePolynomial(field, vars_, {(((j, shift), exp),): field.one})


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


class _Tokens:
    def __init__(self, text):
        self.text = text
        self.items = []
        i = 0
        n = len(text)
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            col = i + 1
            if ch.isdigit():
                j = i
                while j < n and text[j].isdigit():
                    j += 1
                self.items.append(("NAT", int(text[i:j]), col))
                i = j
            elif ch.isalpha():
                j = i
                while j < n and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.items.append(("VAR", text[i:j], col))
                i = j
            elif ch in "+-*^()@":
                self.items.append((ch, ch, col))
                i += 1
            else:
                raise ValueError(
                    "diffpoly.parse_poly: syntax error at column %d: "
                    "unexpected character %r" % (col, ch))
        self.pos = 0

    def peek(self):
        if self.pos < len(self.items):
            return self.items[self.pos]
        return ("EOF", None, len(self.text) + 1)

    def next(self):
        t = self.peek()
        self.pos += 1
        return t


class _Parser:
    def __init__(self, text, field, vars_):
        self.toks = _Tokens(text)
        self.field = field
        self.vars = tuple(vars_)

    def parse(self):
        p = self.expr()
        kind, _, col = self.toks.peek()
        if kind != "EOF":
            raise ValueError("diffpoly.parse_poly: syntax error at column %d: "
                             "unexpected %r" % (col, kind))
        return p

    def expr(self):
        p = self.term()
        while True:
            kind, _, _ = self.toks.peek()
            if kind == "+":
                self.toks.next()
                p = p + self.term()
            elif kind == "-":
                self.toks.next()
                p = p - self.term()
            else:
                return p

    def term(self):
        p = self.factor()
        while self.toks.peek()[0] == "*":
            self.toks.next()
            p = p * self.factor()
        return p

    def factor(self):
        a = self.atom()
        if self.toks.peek()[0] == "^":
            self.toks.next()
            kind, val, col = self.toks.next()
            if kind != "NAT":
                raise ValueError("diffpoly.parse_poly: syntax error at column %d: "
                                 "exponent must be a number" % col)
            return a ** val
        return a

    def atom(self):
        kind, val, col = self.toks.next()
        if kind == "NAT":
            return constant(self.field, self.vars, self.field.from_int(val))
        if kind == "VAR":
            if val not in self.vars:
                raise ValueError("diffpoly.parse_poly: unknown variable %r "
                                 "at column %d" % (val, col))
            shift = 0
            if self.toks.peek()[0] == "@":
                _, _, at_col = self.toks.next()
                k2, v2, _ = self.toks.peek()
                if k2 != "NAT":
                    raise ValueError(
                        "diffpoly.parse_poly: syntax error at column %d: "
                        "shift suffix '@' must be followed by a nonnegative "
                        "integer" % at_col)
                self.toks.next()
                shift = v2
            return variable(self.field, self.vars, val, shift)
        if kind == "(":
            p = self.expr()
            k2, _, col2 = self.toks.next()
            if k2 != ")":
                raise ValueError("diffpoly.parse_poly: syntax error at column %d: "
                                 "expected ')'" % col2)
            return p
        if kind == "-":
            return -self.atom()
        raise ValueError("diffpoly.parse_poly: syntax error at column %d: "
                         "unexpected %r" % (col, kind if kind != "EOF" else "end of input"))


def parse_poly(text, field, vars_):
    """Parse source text to a canonical DifferencePolynomial."""
    return _Parser(text, field, vars_).parse()


def to_string(poly):
    """Canonical rendering that re-parses to the same polynomial."""
    if not poly.terms:
        return "0"
    allvars = sorted({vk for m in poly.terms for vk, _ in m})
    def key(mono):
        d = dict(mono)
        return (sum(e for _, e in mono), tuple(d.get(vk, 0) for vk in allvars))
    parts = []
    for mono in sorted(poly.terms, key=key, reverse=True):
        c = poly.terms[mono]
        label = poly.field.to_int(c)
        factors = []
        for (j, i), e in sorted(mono, key=lambda t: (t[0][0], -t[0][1])):
            v = poly.vars[j] if i == 0 else "%s@%d" % (poly.vars[j], i)
            factors.append(v if e == 1 else "%s^%d" % (v, e))
        if not factors:
            parts.append(str(label))
        elif label == 1:
            parts.append("*".join(factors))
        else:
            parts.append("%d*%s" % (label, "*".join(factors)))
    return " + ".join(parts)


# ---------------------------------------------------------------------------
# endomorphism specifications
# ---------------------------------------------------------------------------


class EndoSpec:
    """Variable images (shift-free polynomials) plus a constant twist.

    As a ring endomorphism: constants map by u -> u^(p^constTwist) and each
    variable x@i maps to the image of x shifted by i. The coordinate-formula
    view (images as plain polynomial maps on points) is what covers compose;
    see compose_plain.
    """

    __slots__ = ("field", "vars", "images", "const_twist")

    def __init__(self, field, vars_, images, const_twist=0):
        vars_ = tuple(vars_)
        if set(images) != set(vars_):
            missing = sorted(set(vars_) - set(images))
            extra = sorted(set(images) - set(vars_))
            if missing:
                raise ValueError("diffpoly.parse_endo: missing image for "
                                 "variable(s) %s" % ", ".join(missing))
            raise ValueError("diffpoly.parse_endo: unknown variable(s) %s"
                             % ", ".join(extra))
        for name, img in images.items():
            if img.max_shift > 0:
                raise ValueError("diffpoly.parse_endo: image of %r contains "
                                 "shifted variables" % name)
            if img.vars != vars_:
                raise ValueError("diffpoly.parse_endo: image of %r uses a "
                                 "different variable list" % name)
        if const_twist < 0:
            raise ValueError("diffpoly.parse_endo: constTwist must be >= 0")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "vars", vars_)
        object.__setattr__(self, "images", dict(images))
        object.__setattr__(self, "const_twist", const_twist)

    def __setattr__(self, *a):
        raise AttributeError("EndoSpec is immutable")

    def key(self):
        return (tuple(sorted((v, p.key()) for v, p in self.images.items())),
                self.const_twist)

    def __eq__(self, other):
        if not isinstance(other, EndoSpec):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        imgs = ", ".join("%s -> %s" % (v, to_string(self.images[v]))
                         for v in self.vars)
        if self.const_twist:
            return "EndoSpec(%s; constTwist=%d)" % (imgs, self.const_twist)
        return "EndoSpec(%s)" % imgs

    def is_identity(self):
        if self.const_twist:
            return False
        for v in self.vars:
            if self.images[v] != variable(self.field, self.vars, v):
                return False
        return True


def identity_endo(field, vars_):
    return EndoSpec(field, vars_,
                    {v: variable(field, vars_, v) for v in vars_}, 0)


def parse_endo(mapping, field, vars_):
    """Build an EndoSpec from {var: expression, ..., "constTwist": e}."""
    mapping = dict(mapping)
    e = mapping.pop("constTwist", 0)
    if not isinstance(e, int):
        raise ValueError("diffpoly.parse_endo: constTwist must be an integer")
    images = {}
    for name, text in mapping.items():
        if name not in vars_:
            raise ValueError("diffpoly.parse_endo: unknown variable %r" % (name,))
        images[name] = parse_poly(text, field, vars_)
    return EndoSpec(field, vars_, images, e)


def substitute_plain(poly, images):
    """Plain substitution of shift-free images for shift-0 variables.

    No coefficient twisting. The polynomial must itself be shift-free; this
    is the coordinate-formula composition used by covers.
    """
    if poly.max_shift > 0:
        raise ValueError("diffpoly.substitute_plain: polynomial has shifts")
    f = poly.field
    out = constant(f, poly.vars, f.zero)
    for mono, c in poly.terms.items():
        piece = constant(f, poly.vars, c)
        for (j, _i), e in mono:
            piece = piece * (images[poly.vars[j]] ** e)
        out = out + piece
    return out


def compose_plain(a, b):
    """Coordinate formulas of 'a then b' as maps on points.

    (a * b).image[v] = b.image[v] with each variable w replaced by a.image[w],
    coefficients untouched; constant twists add. This is the word composition
    under which the covering relation g sigma~ = sigma~ g^sigma~ is read.
    """
    images = {v: substitute_plain(b.images[v], a.images) for v in b.vars}
    return EndoSpec(a.field, a.vars, images, a.const_twist + b.const_twist)


def apply_endo(f, P):
    """Ring-endomorphism action of f on P.

    Constants of P are twisted by p^constTwist; x@i goes to f's image of x
    with all shifts raised by i. Together with compose_endo this satisfies
    apply(compose(f, g), P) = apply(f, apply(g, P)) exactly.
    """
    if set(P.vars) != set(f.vars):
        raise ValueError("diffpoly.apply_endo: variable mismatch")
    fld = P.field
    shifted_cache = {}
    out = constant(fld, P.vars, fld.zero)
    for mono, c in P.terms.items():
        piece = constant(fld, P.vars, fld.frobenius(c, f.const_twist)
                         if f.const_twist else c)
        for (j, i), e in mono:
            keyv = (j, i)
            img = shifted_cache.get(keyv)
            if img is None:
                img = f.images[P.vars[j]].shifted(i) if i else f.images[P.vars[j]]
                shifted_cache[keyv] = img
            piece = piece * (img ** e)
        out = out + piece
    return out


def compose_endo(f, g):
    """Ring-endomorphism composition: apply f to g's images, add twists."""
    if f.vars != g.vars:
        raise ValueError("diffpoly.compose_endo: variable mismatch")
    images = {v: apply_endo(f, g.images[v]) for v in g.vars}
    return EndoSpec(f.field, f.vars, images, f.const_twist + g.const_twist)


def twist_substitute(P, Q):
    """Replace every x@i by x^(Q^i); coefficients unchanged.

    The result is a plain polynomial (max shift 0) whose exponents may be
    astronomically large integers; callers evaluate or convert, never expand.
    """
    if Q < 1:
        raise ValueError("diffpoly.twist_substitute: Q must be >= 1")
    f = P.field
    out = {}
    for mono, c in P.terms.items():
        d = {}
        for (j, i), e in mono:
            k = (j, 0)
            d[k] = d.get(k, 0) + e * (Q ** i)
        nm = tuple(sorted(d.items()))
        if nm in out:
            out[nm] = f.add(out[nm], c)
        else:
            out[nm] = c
    return DifferencePolynomial(f, P.vars, out)


def evaluate_plain(P, point, ctx, embed):
    """Evaluate a shift-free polynomial at a point with coordinates in ctx.

    point: dict var -> ctx element; embed: maps base-field coefficients into
    ctx. Exponents may be big integers (pow is logarithmic).
    """
    total = ctx.zero
    for mono, c in P.terms.items():
        acc = embed(c)
        for (j, i), e in mono:
            if i != 0:
                raise ValueError("diffpoly.evaluate_plain: polynomial has shifts")
            acc = ctx.mul(acc, ctx.pow(point[P.vars[j]], e))
        total = ctx.add(total, acc)
    return total


def evaluate_twisted(P, point, Q, ctx, embed):
    """Evaluate P at a point of the Q-twisted system: x@i reads as x^(Q^i)."""
    total = ctx.zero
    for mono, c in P.terms.items():
        acc = embed(c)
        for (j, i), e in mono:
            acc = ctx.mul(acc, ctx.pow(point[P.vars[j]], e * (Q ** i)))
        total = ctx.add(total, acc)
    return total
