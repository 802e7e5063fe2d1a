"""Exact scalar arithmetic for the superfield engine.

Three layers live here:

  * QI           -- Gaussian rationals a + b*i with Fraction components.
  * CoeffFunction -- truncated multivariate power series over QI, the
                     coefficient functions f(B^1, ..., B^n) of the algebra.
  * super-monomials -- exponent bookkeeping for polynomials in pairs
                     (lambda_p, chi_p) of one even and one odd variable,
                     subject to chi_p^2 = -lambda_p and anticommutation
                     of the odd variables of distinct pairs.

Everything is immutable and hashable so results can be memoized.
No floating point is used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb


class QI:
    """A Gaussian rational re + im*i."""

    __slots__ = ("re", "im", "_hash")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("QI is immutable")

    def __repr__(self):
        return "QI(%s, %s)" % (self.re, self.im)

    def __str__(self):
        return render_qi(self)

    def __eq__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.re, self.im))
            object.__setattr__(self, "_hash", h)
        return h

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        return QI(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __sub__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        return QI(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        return QI(self.re * other.re - self.im * other.im,
                  self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        n = other.re * other.re + other.im * other.im
        if n == 0:
            raise ZeroDivisionError("division by zero in QI")
        return QI((self.re * other.re + self.im * other.im) / n,
                  (self.im * other.re - self.re * other.im) / n)

    def __rtruediv__(self, other):
        other = as_qi(other)
        if other is None:
            return NotImplemented
        return other / self

    def conj(self):
        return QI(self.re, -self.im)

    def is_rational(self):
        return self.im == 0


ZERO = QI(0)
ONE = QI(1)
I = QI(0, 1)


def as_qi(x):
    """Coerce ints, Fractions and QI to QI; return None when impossible."""
    if isinstance(x, QI):
        return x
    if isinstance(x, (int, Fraction)):
        return QI(x)
    return None


def parse_qi(text):
    """Parse scalars like '2', '-1/3', 'i', '-i', '1/2 i', '1/2 + 1/3 i'."""
    s = text.strip()
    if not s:
        raise ValueError("empty scalar literal")
    # split a trailing additive imaginary part if present; the sign must
    # follow a completed term, not an operator (skip spaces to see it)
    depth_split = None
    for k in range(len(s) - 1, 0, -1):
        if s[k] in "+-":
            j = k - 1
            while j > 0 and s[j] == " ":
                j -= 1
            if s[j] not in "+-/*( ":
                depth_split = k
                break
    if depth_split is not None and "i" in s[depth_split:]:
        head = parse_qi(s[:depth_split])
        sign = 1 if s[depth_split] == "+" else -1
        tail = parse_qi(s[depth_split + 1:])
        return head + QI(sign) * tail
    if s.endswith("i"):
        body = s[:-1].strip()
        if body in ("", "+"):
            return I
        if body == "-":
            return -I
        if body.endswith("*"):
            body = body[:-1].strip()
        return QI(0, Fraction(body))
    return QI(Fraction(s))


def render_qi(q):
    """Canonical text for a QI scalar, e.g. '1/2', '-i', '1/2 - 1/3 i'."""
    if q.im == 0:
        return str(q.re)
    if q.im == 1:
        im = "i"
    elif q.im == -1:
        im = "-i"
    else:
        im = "%s i" % q.im
    if q.re == 0:
        return im
    if q.im > 0:
        return "%s + %s" % (q.re, im if q.im != 1 else "i")
    return "%s - %s" % (q.re, im[1:] if im.startswith("-") else im)


def _min_exact(a, b):
    """Combine guaranteed-exact degrees; None means exact at all degrees."""
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class CoeffFunction:
    """Truncated power series in n variables with QI coefficients.

    terms maps exponent tuples (length dim, total degree <= cutoff) to
    nonzero QI values.  exact_to is None when the series is known exactly
    as stored, or an integer d when the stored coefficients are only
    guaranteed complete through total degree d.  Arithmetic that drops a
    nonzero term of degree > cutoff lowers exact_to to cutoff; the flag
    never improves under further operations.
    """

    __slots__ = ("dim", "cutoff", "terms", "exact_to", "_hash")

    def __init__(self, dim, cutoff, terms, exact_to=None):
        clean = {}
        for e, c in terms.items():
            if not isinstance(c, QI):
                c = QI(c)
            if not c:
                continue
            if len(e) != dim:
                raise ValueError("exponent length %d != dim %d" % (len(e), dim))
            if sum(e) > cutoff:
                raise ValueError("stored exponent exceeds cutoff")
            clean[e] = c
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "exact_to", exact_to)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("CoeffFunction is immutable")

    # -- constructors -------------------------------------------------

    @staticmethod
    def constant(dim, cutoff, value):
        return CoeffFunction(dim, cutoff, {(0,) * dim: as_qi(value)})

    @staticmethod
    def zero(dim, cutoff):
        return CoeffFunction(dim, cutoff, {})

    @staticmethod
    def coordinate(dim, cutoff, i):
        """The coordinate function x_i, 1-based index."""
        if not 1 <= i <= dim:
            raise ValueError("coordinate index out of range")
        e = [0] * dim
        e[i - 1] = 1
        return CoeffFunction(dim, cutoff, {tuple(e): ONE})

    @staticmethod
    def monomial(dim, cutoff, exponents, value=ONE):
        return CoeffFunction(dim, cutoff, {tuple(exponents): as_qi(value)})

    # -- basic queries ------------------------------------------------

    @property
    def truncated_flag(self):
        return self.exact_to is not None

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        if not self.terms:
            return True
        return len(self.terms) == 1 and (0,) * self.dim in self.terms

    def constant_term(self):
        return self.terms.get((0,) * self.dim, ZERO)

    def is_zero_through(self, degree):
        """True when every stored term of total degree <= degree vanishes."""
        if degree is None:
            return not self.terms
        return all(sum(e) > degree for e in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, CoeffFunction):
            return NotImplemented
        return (self.dim == other.dim and self.cutoff == other.cutoff
                and self.terms == other.terms and self.exact_to == other.exact_to)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.dim, self.cutoff, self.exact_to,
                      tuple(sorted(self.terms.items(), key=lambda t: t[0]))))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return "CoeffFunction(%d, %d, %r, exact_to=%r)" % (
            self.dim, self.cutoff, self.terms, self.exact_to)

    def _check_compat(self, other):
        if self.dim != other.dim or self.cutoff != other.cutoff:
            raise ValueError("dimension or cutoff mismatch")

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        self._check_compat(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, ZERO) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return CoeffFunction(self.dim, self.cutoff, terms,
                             _min_exact(self.exact_to, other.exact_to))

    def __neg__(self):
        return CoeffFunction(self.dim, self.cutoff,
                             {e: -c for e, c in self.terms.items()},
                             self.exact_to)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, q):
        q = as_qi(q)
        if not q:
            return CoeffFunction(self.dim, self.cutoff, {}, self.exact_to)
        return CoeffFunction(self.dim, self.cutoff,
                             {e: c * q for e, c in self.terms.items()},
                             self.exact_to)

    def __mul__(self, other):
        self._check_compat(other)
        terms = {}
        dropped = False
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in other.terms.items():
                if d1 + sum(e2) > self.cutoff:
                    dropped = True
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, ZERO) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    terms.pop(e, None)
        exact = _min_exact(self.exact_to, other.exact_to)
        if dropped:
            exact = _min_exact(exact, self.cutoff)
        return CoeffFunction(self.dim, self.cutoff, terms, exact)

    def partial(self, i):
        """Formal partial derivative in x_i (1-based)."""
        if not 1 <= i <= self.dim:
            raise ValueError("coordinate index out of range")
        k = i - 1
        terms = {}
        for e, c in self.terms.items():
            if e[k] == 0:
                continue
            ne = list(e)
            ne[k] -= 1
            terms[tuple(ne)] = c * e[k]
        exact = self.exact_to if self.exact_to is None else self.exact_to - 1
        return CoeffFunction(self.dim, self.cutoff, terms, exact)

    def compose(self, subs, recenter=False):
        """Substitute subs[k] for x_{k+1}; subs are series in some other
        coordinate system sharing one cutoff.

        Substituted series must have zero constant term unless recenter
        is set, in which case the (polynomially stored) outer series is
        re-expanded around the constant point.  Recentering a truncated
        outer series is refused since low degrees would become unknown.
        """
        if len(subs) != self.dim:
            raise ValueError("need %d substituted series" % self.dim)
        if not subs:
            raise ValueError("zero-dimensional composition")
        tdim = subs[0].dim
        cutoff = subs[0].cutoff
        consts = [s.constant_term() for s in subs]
        if any(consts):
            if not recenter:
                raise ValueError("substituted series has a constant term; "
                                 "pass recenter=True to allow it")
            if self.exact_to is not None:
                raise ValueError("cannot recenter a truncated series")
        exact = self.exact_to
        for s in subs:
            exact = _min_exact(exact, s.exact_to)
        one = CoeffFunction.constant(tdim, cutoff, ONE)
        # Horner-style evaluation over the (finitely many) stored terms.
        result = CoeffFunction.zero(tdim, cutoff)
        powers = [{0: one} for _ in range(self.dim)]

        def power(k, p):
            cache = powers[k]
            if p not in cache:
                cache[p] = power(k, p - 1) * subs[k]
            return cache[p]

        for e, c in self.terms.items():
            term = one.scale(c)
            for k, p in enumerate(e):
                if p:
                    term = term * power(k, p)
            result = result + term
        return CoeffFunction(result.dim, result.cutoff, result.terms,
                             _min_exact(result.exact_to, exact))

    def eval_at_zero(self):
        return self.constant_term()

    def max_degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def truncate(self, degree):
        """Drop stored terms of total degree > degree (bookkeeping view)."""
        terms = {e: c for e, c in self.terms.items() if sum(e) <= degree}
        return CoeffFunction(self.dim, self.cutoff, terms, self.exact_to)


# -- series helpers ---------------------------------------------------


def cf_mul(a, b):
    return a * b


def cf_partial(a, i):
    return a.partial(i)


def cf_compose(f, subs, recenter=False):
    return f.compose(subs, recenter=recenter)


def series_inverse(f):
    """Multiplicative inverse 1/f for f with invertible constant term."""
    c = f.constant_term()
    if not c:
        raise ValueError("series has no invertible constant term")
    u = f.scale(ONE / c) - CoeffFunction.constant(f.dim, f.cutoff, ONE)
    # 1/f = (1/c) * sum (-u)^k
    acc = CoeffFunction.constant(f.dim, f.cutoff, ONE / c)
    if u.is_zero():
        return CoeffFunction(f.dim, f.cutoff, acc.terms,
                             _min_exact(acc.exact_to, f.exact_to))
    term = CoeffFunction.constant(f.dim, f.cutoff, ONE / c)
    for _ in range(f.cutoff):
        term = term * (-u)
        acc = acc + term
    # the geometric tail is nonzero beyond the cutoff
    return CoeffFunction(f.dim, f.cutoff, acc.terms,
                         _min_exact(_min_exact(acc.exact_to, f.exact_to),
                                    f.cutoff))


def log_series_normalized(f):
    """log(f / f(0)) as a series with zero constant term.

    Only derivatives of the result are ever used by the engine, so the
    additive constant log f(0), which is not rational in general, is
    dropped.
    """
    c = f.constant_term()
    if not c:
        raise ValueError("log of a series with zero constant term")
    u = f.scale(ONE / c) - CoeffFunction.constant(f.dim, f.cutoff, ONE)
    acc = CoeffFunction.zero(f.dim, f.cutoff)
    if u.is_zero():
        return CoeffFunction(f.dim, f.cutoff, {},
                             _min_exact(acc.exact_to, f.exact_to))
    term = CoeffFunction.constant(f.dim, f.cutoff, ONE)
    for k in range(1, f.cutoff + 1):
        term = term * u
        acc = acc + term.scale(QI(Fraction((-1) ** (k + 1), k)))
    return CoeffFunction(f.dim, f.cutoff, acc.terms,
                         _min_exact(_min_exact(acc.exact_to, f.exact_to),
                                    f.cutoff))


def functional_inverse(forward, cutoff=None):
    """Compositional inverse of a coordinate change x~ = g(x).

    forward is a list of n series in n variables with zero constant term
    and invertible linear part; the result f satisfies f(g(x)) = x and
    g(f(y)) = y through the cutoff.
    """
    n = len(forward)
    if n == 0:
        raise ValueError("empty coordinate change")
    dim = forward[0].dim
    if dim != n:
        raise ValueError("coordinate change must be square")
    D = forward[0].cutoff if cutoff is None else cutoff
    for g in forward:
        if g.constant_term():
            raise ValueError("coordinate change must fix the origin")
    # linear part and its inverse over QI
    A = [[g.terms.get(_unit(dim, j), ZERO) for j in range(dim)]
         for g in forward]
    Ainv = _matrix_inverse_qi(A)
    # iterate f <- f - Ainv (g(f) - id); each pass gains one degree
    coords = [CoeffFunction.coordinate(dim, D, j + 1) for j in range(dim)]
    f = [sum_cf([coords[j].scale(Ainv[i][j]) for j in range(dim)],
                dim, D) for i in range(dim)]
    for _ in range(D + 1):
        err = [forward[i].compose(f) - coords[i] for i in range(dim)]
        if all(e.is_zero() for e in err):
            break
        f = [f[i] - sum_cf([err[j].scale(Ainv[i][j]) for j in range(dim)],
                           dim, D) for i in range(dim)]
    exact = None
    for g in forward:
        exact = _min_exact(exact, g.exact_to)
    # a generic inverse is an infinite series even for polynomial input
    linear_only = all(all(sum(e) <= 1 for e in g.terms) for g in forward)
    if not linear_only:
        exact = _min_exact(exact, D)
    return [CoeffFunction(dim, D, fi.terms, _min_exact(fi.exact_to, exact))
            for fi in f]


def sum_cf(items, dim, cutoff):
    acc = CoeffFunction.zero(dim, cutoff)
    for it in items:
        acc = acc + it
    return acc


def _unit(dim, j):
    e = [0] * dim
    e[j] = 1
    return tuple(e)


def _matrix_inverse_qi(A):
    """Exact inverse of a square QI matrix by Gauss-Jordan elimination."""
    n = len(A)
    M = [[A[i][j] for j in range(n)] + [ONE if i == j else ZERO
                                        for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if M[r][col]), None)
        if pivot is None:
            raise ValueError("singular matrix")
        M[col], M[pivot] = M[pivot], M[col]
        inv = ONE / M[col][col]
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col and M[r][col]:
                fac = M[r][col]
                M[r] = [a - fac * b for a, b in zip(M[r], M[col])]
    return [row[n:] for row in M]


# -- super-monomials --------------------------------------------------
#
# A monomial over the pairs p = 0, 1, ... is stored as a tuple of
# (j_p, J_p) with J_p in {0, 1}, meaning the canonically ordered word
#
#     lambda_0^{j_0} lambda_1^{j_1} ... chi_0^{J_0} chi_1^{J_1} ...
#
# The even generators lambda_p are central; the odd generators satisfy
# chi_p^2 = -lambda_p and chi_p chi_q = -chi_q chi_p for p != q.
# Trailing (0, 0) entries are trimmed so equal monomials hash equally.


def hmono_trim(m):
    k = len(m)
    while k and m[k - 1] == (0, 0):
        k -= 1
    return tuple(m[:k])


def hmono_pad(m, npairs):
    return tuple(m) + ((0, 0),) * (npairs - len(m))


HMONO_ONE = ()


def hmono_parity(m):
    return sum(J for _, J in m) & 1


def hmono_mul(m1, m2):
    """Product of two monomials; returns (sign, monomial)."""
    n = max(len(m1), len(m2))
    a = hmono_pad(m1, n)
    b = hmono_pad(m2, n)
    P = [p for p in range(n) if a[p][1]]
    Q = [q for q in range(n) if b[q][1]]
    inv = 0
    for q in Q:
        inv += sum(1 for p in P if p > q)
    collapsed = [p for p in P if p in Q]
    sign = (-1) ** (inv + len(collapsed))
    odd = set(P) ^ set(Q)
    out = []
    for p in range(n):
        j = a[p][0] + b[p][0] + (1 if p in collapsed else 0)
        out.append((j, 1 if p in odd else 0))
    return sign, hmono_trim(out)


def hmono_lambda(pair, power=1):
    m = [(0, 0)] * (pair + 1)
    m[pair] = (power, 0)
    return tuple(m)


def hmono_chi(pair):
    m = [(0, 0)] * (pair + 1)
    m[pair] = (0, 1)
    return tuple(m)


def hmono_get(m, pair):
    return m[pair] if pair < len(m) else (0, 0)


def hmono_render(m):
    """Text like 'lambda^2 chi' or 'gamma eta'; '1' for the empty word."""
    names_even = ["lambda", "gamma"]
    names_odd = ["chi", "eta"]
    parts = []
    for p, (j, _) in enumerate(m):
        if j:
            name = names_even[p] if p < 2 else "lambda_%d" % p
            parts.append(name if j == 1 else "%s^%d" % (name, j))
    for p, (_, J) in enumerate(m):
        if J:
            name = names_odd[p] if p < 2 else "chi_%d" % p
            parts.append(name)
    return " ".join(parts) if parts else "1"


def binomial(n, k):
    return comb(n, k)
