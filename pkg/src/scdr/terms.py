"""States of the free superfield algebra and their PBW normal form.

A state is a Q(i)-linear combination of monomials

    :f(B) g_1 g_2 ... g_k:

where f is a CoeffFunction of the even superfields B^1..B^n, each g_m is
a derived generator T^t S^s B^i or T^t S^s Psi^i, the product is the
left-nested normally ordered product, factors are sorted in a fixed
canonical order, and odd factors never repeat (even factors may).  An
underived B^i is absorbed into the coefficient as the coordinate
function x_i, so it never appears as a factor.

Reordering uses quasi-commutativity and quasi-associativity of the
normally ordered product, whose correction terms involve Lambda-brackets;
the bracket module and this one are mutually recursive, so bracket
imports are deferred to call time.

Lambda-bracket values are HPoly: polynomials in formal pairs
(lambda_p, chi_p) with NormalForm coefficients, pair 0 playing Lambda
and pair 1 the auxiliary Gamma of iterated brackets.
"""

from __future__ import annotations

from fractions import Fraction
from typing import NamedTuple

from .scalars import (CoeffFunction, QI, ZERO, ONE, as_qi, render_qi,
                      _min_exact, hmono_trim, hmono_mul, hmono_parity,
                      hmono_get, hmono_render, binomial)

B_KIND = 0
PSI_KIND = 1


class Generator(NamedTuple):
    """A derived generator T^t S^s B^index or T^t S^s Psi^index."""
    kind: int
    index: int
    t: int
    s: int

    def parity(self):
        # B is even, Psi is odd, S flips parity, T preserves it
        return (self.kind + self.s) & 1

    def d_S(self):
        # S^2 = T on generators
        if self.s == 0:
            return Generator(self.kind, self.index, self.t, 1)
        return Generator(self.kind, self.index, self.t + 1, 0)

    def d_T(self):
        return Generator(self.kind, self.index, self.t + 1, self.s)

    def render(self):
        """Prefix form, e.g. "T S B1"; the derivation operators bind
        tightly to the generator so the form needs no parentheses even
        inside a normally ordered product."""
        base = ("B%d" if self.kind == B_KIND else "Psi%d") % self.index
        out = base
        if self.s:
            out = "S " + out
        for _ in range(self.t):
            out = "T " + out
        return out


def gens_parity(gens):
    return sum(g.parity() for g in gens) & 1


class NormalForm:
    """A state in PBW normal form.

    terms maps sorted generator tuples to nonzero CoeffFunctions.
    exact_to is None for exact states, or the total degree in the B
    variables through which the stored coefficients are certified.
    """

    __slots__ = ("dim", "cutoff", "terms", "exact_to", "_hash")

    def __init__(self, dim, cutoff, terms, exact_to=None):
        clean = {}
        for gens, cf in terms.items():
            if cf.is_zero():
                exact_to = _min_exact(exact_to, cf.exact_to)
                continue
            exact_to = _min_exact(exact_to, cf.exact_to)
            clean[gens] = cf
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "exact_to", exact_to)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("NormalForm is immutable")

    def __eq__(self, other):
        if not isinstance(other, NormalForm):
            return NotImplemented
        return (self.dim == other.dim and self.cutoff == other.cutoff
                and self.terms == other.terms
                and self.exact_to == other.exact_to)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.dim, self.cutoff, self.exact_to,
                      tuple(sorted(self.terms.items()))))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return "NormalForm(%s)" % render_nf(self)

    def is_zero(self):
        return not self.terms

    def is_zero_through(self, degree):
        if degree is None:
            return not self.terms
        return all(cf.is_zero_through(degree) for cf in self.terms.values())

    def guaranteed_zero(self):
        """True when the state is zero and certified exact."""
        return not self.terms and self.exact_to is None

    def parity(self):
        """0 or 1 for homogeneous states, None for mixed ones."""
        ps = {gens_parity(g) for g in self.terms}
        if not ps:
            return 0
        if len(ps) > 1:
            return None
        return ps.pop()

    def sorted_terms(self):
        return sorted(self.terms.items())


def nf_from_terms(dim, cutoff, terms, exact_to=None):
    return NormalForm(dim, cutoff, terms, exact_to)


def nf_zero(dim, cutoff):
    return NormalForm(dim, cutoff, {})


def nf_one(dim, cutoff):
    return NormalForm(dim, cutoff,
                      {(): CoeffFunction.constant(dim, cutoff, ONE)})


def nf_scalar(dim, cutoff, q):
    return NormalForm(dim, cutoff,
                      {(): CoeffFunction.constant(dim, cutoff, q)})


def nf_mono(dim, cutoff, cf, gens):
    return NormalForm(dim, cutoff, {tuple(gens): cf})


def nf_add(a, b):
    terms = dict(a.terms)
    for gens, cf in b.terms.items():
        if gens in terms:
            terms[gens] = terms[gens] + cf
        else:
            terms[gens] = cf
    return NormalForm(a.dim, a.cutoff, terms,
                      _min_exact(a.exact_to, b.exact_to))


def nf_neg(a):
    return NormalForm(a.dim, a.cutoff,
                      {g: -cf for g, cf in a.terms.items()}, a.exact_to)


def nf_sub(a, b):
    return nf_add(a, nf_neg(b))


def nf_scale(a, q):
    q = as_qi(q)
    if not q:
        return NormalForm(a.dim, a.cutoff, {}, a.exact_to)
    return NormalForm(a.dim, a.cutoff,
                      {g: cf.scale(q) for g, cf in a.terms.items()},
                      a.exact_to)


def nf_sum(items, dim, cutoff):
    acc = nf_zero(dim, cutoff)
    for it in items:
        acc = nf_add(acc, it)
    return acc


# -- the normally ordered product -------------------------------------
#
# mono arguments below are pairs (cf, gens) with gens a tuple of
# Generators; they denote the left-nested product (((cf g_1) g_2) ...).
# Caches are keyed on these pairs plus (dim, cutoff).

_MUL_CACHE = {}
_GEN_CACHE = {}


def clear_caches():
    _MUL_CACHE.clear()
    _GEN_CACHE.clear()
    from . import bracket
    bracket.clear_caches()


def mono_mul(dim, cutoff, m1, m2):
    """Normally ordered product of two monomials, as a NormalForm."""
    key = (dim, cutoff, m1, m2)
    hit = _MUL_CACHE.get(key)
    if hit is not None:
        return hit
    f1, g1 = m1
    f2, g2 = m2
    if g2:
        # m2 = rest . h: use a(bc) = (ab)c - quasi-associativity terms
        rest = (f2, g2[:-1])
        h = g2[-1]
        prod = nf_apply_gen(dim, cutoff, mono_mul(dim, cutoff, m1, rest), h)
        out = nf_sub(prod, qa_terms(dim, cutoff, m1, rest, h))
    elif g1:
        # m2 is a pure coefficient (even): commute it to the left,
        # m1 f2 = f2 m1 + integral of [m1_Lambda f2]
        swapped = mono_mul(dim, cutoff, (f2, ()), m1)
        out = nf_add(swapped, qc_integral(dim, cutoff, m1, m2))
    else:
        out = nf_mono(dim, cutoff, f1 * f2, ())
    _MUL_CACHE[key] = out
    return out


def nf_apply_gen(dim, cutoff, nf, h):
    out = nf_zero(dim, cutoff)
    out = NormalForm(dim, cutoff, out.terms, nf.exact_to)
    for gens, cf in nf.terms.items():
        out = nf_add(out, nf_mul_gen(dim, cutoff, (cf, gens), h))
    return out


def nf_mul_gen(dim, cutoff, mono, h):
    """Right-multiply a monomial by a single derived generator."""
    key = (dim, cutoff, mono, h)
    hit = _GEN_CACHE.get(key)
    if hit is not None:
        return hit
    out = _nf_mul_gen(dim, cutoff, mono, h)
    _GEN_CACHE[key] = out
    return out


def _nf_mul_gen(dim, cutoff, mono, h):
    f, gens = mono
    if h.kind == B_KIND and h.t == 0 and h.s == 0:
        # an underived B is the coordinate function x_i
        xi = CoeffFunction.coordinate(dim, cutoff, h.index)
        return mono_mul(dim, cutoff, mono, (xi, ()))
    if not gens:
        return nf_mono(dim, cutoff, f, (h,))
    g = gens[-1]
    if g < h or (g == h and g.parity() == 0):
        return nf_mono(dim, cutoff, f, gens + (h,))
    rest = (f, gens[:-1])
    rest_nf = nf_mono(dim, cutoff, f, gens[:-1])
    if g == h:
        # odd square: g g = (1/2) integral of [g_Lambda g]
        gg = nf_scale(qc_integral(dim, cutoff, (unit_cf(dim, cutoff), (g,)),
                                  (unit_cf(dim, cutoff), (g,))),
                      QI(Fraction(1, 2)))
        out = nf_mul(rest_nf, gg)
        return nf_add(out, qa_terms(dim, cutoff, rest,
                                    (unit_cf(dim, cutoff), (g,)), g))
    # h < g: swap the last two factors
    one = unit_cf(dim, cutoff)
    sign = QI((-1) ** (g.parity() * h.parity()))
    swapped = nf_apply_gen(dim, cutoff, nf_mul_gen(dim, cutoff, rest, h), g)
    out = nf_scale(swapped, sign)
    out = nf_sub(out, nf_scale(qa_terms(dim, cutoff, rest, (one, (h,)), g),
                               sign))
    out = nf_add(out, nf_mul(rest_nf,
                             qc_integral(dim, cutoff, (one, (g,)),
                                         (one, (h,)))))
    out = nf_add(out, qa_terms(dim, cutoff, rest, (one, (g,)), h))
    return out


def unit_cf(dim, cutoff):
    return CoeffFunction.constant(dim, cutoff, ONE)


def nf_mul(a, b):
    """Normally ordered product of two states (bilinear over Q(i))."""
    dim, cutoff = a.dim, a.cutoff
    out = NormalForm(dim, cutoff, {}, _min_exact(a.exact_to, b.exact_to))
    for g1, c1 in a.terms.items():
        for g2, c2 in b.terms.items():
            out = nf_add(out, mono_mul(dim, cutoff, (c1, g1), (c2, g2)))
    return out


def qa_terms(dim, cutoff, a_mono, b_mono, c_gen):
    """Quasi-associativity correction (ab)c - a(bc) for monomials a, b
    and a single generator c."""
    from .bracket import bracket_mono
    one = unit_cf(dim, cutoff)
    c_nf_mono = (one, (c_gen,))
    pb = bracket_mono(dim, cutoff, b_mono, c_nf_mono)
    pa = bracket_mono(dim, cutoff, a_mono, c_nf_mono)
    pa_par = gens_parity(a_mono[1])
    pb_par = gens_parity(b_mono[1])
    sign = QI((-1) ** (pa_par * pb_par))
    exact = None
    for nf in list(pa.terms.values()) + list(pb.terms.values()):
        exact = _min_exact(exact, nf.exact_to)
    out = NormalForm(dim, cutoff, {}, exact)
    ja = [j for ((j, J),) in _pair0_keys(pb) if J] if pb.terms else []
    jb = [j for ((j, J),) in _pair0_keys(pa) if J] if pa.terms else []
    jmax = max(ja + jb, default=-1)
    if jmax < 0:
        return out
    ta = nf_mono(dim, cutoff, a_mono[0], a_mono[1])
    tb = nf_mono(dim, cutoff, b_mono[0], b_mono[1])
    for j in range(jmax + 1):
        ta = nf_scale(apply_T(ta), QI(Fraction(1, j + 1)))
        tb = nf_scale(apply_T(tb), QI(Fraction(1, j + 1)))
        jfact = QI(_factorial(j))
        cb = pb.coeff(((j, 1),))
        if cb is not None and not cb.is_zero():
            out = nf_add(out, nf_mul(ta, nf_scale(cb, jfact)))
        ca = pa.coeff(((j, 1),))
        if ca is not None and not ca.is_zero():
            out = nf_add(out, nf_scale(nf_mul(tb, nf_scale(ca, jfact)),
                                       sign))
    return out


def _factorial(j):
    out = 1
    for k in range(2, j + 1):
        out *= k
    return out


def _pair0_keys(p):
    out = []
    for m in p.terms:
        jJ = hmono_get(m, 0)
        out.append((jJ,))
    return out


def qc_integral(dim, cutoff, m1, m2):
    """The quasi-commutativity correction: the bracket [m1_Lambda m2]
    integrated over Lambda from -grad to 0."""
    from .bracket import bracket_mono
    p = bracket_mono(dim, cutoff, m1, m2)
    return hp_integrate_qc(p)


# -- derivations ------------------------------------------------------


def apply_T(nf):
    """The even translation operator T, a derivation of the product."""
    dim, cutoff = nf.dim, nf.cutoff
    out = NormalForm(dim, cutoff, {}, nf.exact_to)
    for gens, cf in nf.terms.items():
        for j in range(1, dim + 1):
            d = cf.partial(j)
            if d.is_zero() and d.exact_to is None:
                continue
            tb = Generator(B_KIND, j, 1, 0)
            out = nf_add(out, mono_from_factors(dim, cutoff, d,
                                                (tb,) + gens))
        for i, g in enumerate(gens):
            repl = gens[:i] + (g.d_T(),) + gens[i + 1:]
            out = nf_add(out, mono_from_factors(dim, cutoff, cf, repl))
    return out


def apply_S(nf):
    """The odd derivation S with S^2 = T."""
    dim, cutoff = nf.dim, nf.cutoff
    out = NormalForm(dim, cutoff, {}, nf.exact_to)
    for gens, cf in nf.terms.items():
        for j in range(1, dim + 1):
            d = cf.partial(j)
            if d.is_zero() and d.exact_to is None:
                continue
            sb = Generator(B_KIND, j, 0, 1)
            out = nf_add(out, mono_from_factors(dim, cutoff, d,
                                                (sb,) + gens))
        sign = 1
        for i, g in enumerate(gens):
            repl = gens[:i] + (g.d_S(),) + gens[i + 1:]
            term = mono_from_factors(dim, cutoff, cf, repl)
            if sign < 0:
                term = nf_neg(term)
            out = nf_add(out, term)
            if g.parity():
                sign = -sign
    return out


def mono_from_factors(dim, cutoff, cf, factors):
    """Left-nested normally ordered product of cf and the given
    generator factors, in the given order."""
    nf = nf_mono(dim, cutoff, cf, ())
    for h in factors:
        nf = nf_apply_gen(dim, cutoff, nf, h)
    return nf


# -- lambda/chi polynomials with NormalForm coefficients --------------


class HPoly:
    """Polynomial in the pairs (lambda_p, chi_p) with state coefficients.

    Pair 0 is the Lambda of a bracket, pair 1 the auxiliary Gamma used
    inside iterated brackets.  Monomial keys are the tuples of
    scalars.hmono_*.
    """

    __slots__ = ("dim", "cutoff", "terms", "_hash")

    def __init__(self, dim, cutoff, terms):
        clean = {}
        for m, nf in terms.items():
            m = hmono_trim(m)
            if m in clean:
                raise ValueError("duplicate monomial key")
            if nf.is_zero() and nf.exact_to is None:
                continue
            clean[m] = nf
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "cutoff", cutoff)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("HPoly is immutable")

    def __eq__(self, other):
        if not isinstance(other, HPoly):
            return NotImplemented
        return (self.dim == other.dim and self.cutoff == other.cutoff
                and self.terms == other.terms)

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.dim, self.cutoff,
                      tuple(sorted(self.terms.items(),
                                   key=lambda t: t[0]))))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return "HPoly(%s)" % render_hpoly(self)

    def coeff(self, mono):
        return self.terms.get(hmono_trim(mono))

    def coeff_or_zero(self, mono):
        nf = self.terms.get(hmono_trim(mono))
        return nf if nf is not None else nf_zero(self.dim, self.cutoff)

    def is_zero(self):
        return all(nf.is_zero() for nf in self.terms.values())

    def is_zero_through(self, degree):
        return all(nf.is_zero_through(degree) for nf in self.terms.values())

    def exact_to(self):
        e = None
        for nf in self.terms.values():
            e = _min_exact(e, nf.exact_to)
        return e

    def parity(self):
        """Parity of the underlying bracket output: state parity plus
        the parity of the attached odd variables."""
        ps = set()
        for m, nf in self.terms.items():
            p = nf.parity()
            if p is None:
                return None
            ps.add((p + hmono_parity(m)) & 1)
        if not ps:
            return 0
        if len(ps) > 1:
            return None
        return ps.pop()


def hp_zero(dim, cutoff):
    return HPoly(dim, cutoff, {})


def hp_from(dim, cutoff, items):
    acc = {}
    exacts = {}
    for m, nf in items:
        m = hmono_trim(m)
        if m in acc:
            acc[m] = nf_add(acc[m], nf)
        else:
            acc[m] = nf
    return HPoly(dim, cutoff, acc)


def hp_add(a, b):
    terms = dict(a.terms)
    for m, nf in b.terms.items():
        if m in terms:
            terms[m] = nf_add(terms[m], nf)
        else:
            terms[m] = nf
    return HPoly(a.dim, a.cutoff, terms)


def hp_neg(a):
    return HPoly(a.dim, a.cutoff, {m: nf_neg(nf) for m, nf in a.terms.items()})


def hp_sub(a, b):
    return hp_add(a, hp_neg(b))


def hp_scale(a, q):
    return HPoly(a.dim, a.cutoff,
                 {m: nf_scale(nf, q) for m, nf in a.terms.items()})


def hp_op_T(p):
    return HPoly(p.dim, p.cutoff,
                 {m: apply_T(nf) for m, nf in p.terms.items()})


def hp_mul_mono(p, mono, extraction_parity=True):
    """Left-multiply every key by mono.  When extraction_parity is set
    the odd-slot rule applies: pulling an odd monomial out of a bracket
    slot costs a sign per odd variable."""
    items = []
    for m, nf in p.terms.items():
        sign, prod = hmono_mul(mono, m)
        if sign == 0:
            continue
        items.append((prod, nf_scale(nf, QI(sign))))
    q = hp_from(p.dim, p.cutoff, items)
    if extraction_parity and hmono_parity(mono):
        q = hp_neg(q)
    return q


def hp_mul_lambda(p, pair=0, power=1):
    mono = [(0, 0)] * (pair + 1)
    mono[pair] = (power, 0)
    return hp_mul_mono(p, tuple(mono), extraction_parity=False)


def hp_nf_mul_right(p, b):
    """Multiply every coefficient state on the right by the state b;
    the lambda/chi prefactors pass by with no sign."""
    return HPoly(p.dim, p.cutoff,
                 {m: nf_mul(nf, b) for m, nf in p.terms.items()})


def hp_nf_mul_left(p, b, b_parity):
    """Multiply every coefficient state on the left by the homogeneous
    state b; b passes the odd chi variables with the Koszul sign."""
    out = []
    for m, nf in p.terms.items():
        sgn = -1 if (b_parity and hmono_parity(m)) else 1
        term = nf_mul(b, nf)
        if sgn < 0:
            term = nf_neg(term)
        out.append((m, term))
    return hp_from(p.dim, p.cutoff, out)


def hp_op_S(p):
    """Left action of the odd derivation S on a bracket value.

    S passes the central even variables, satisfies S chi_0 =
    2 lambda_0 - chi_0 S against the Lambda pair, anticommutes with the
    odd variables of other pairs, and acts on the coefficient state."""
    dim, cutoff = p.dim, p.cutoff
    items = []
    for m, nf in p.terms.items():
        evens = tuple((j, 0) for j, _ in m)
        odd_pairs = [q for q, (_, J) in enumerate(m) if J]
        for word, coeff in _s_into_word(tuple(odd_pairs), nf):
            mono = evens
            for q in word:
                if q == -1:
                    sign, mono = hmono_mul(mono, ((1, 0),))
                else:
                    sign, mono = hmono_mul(mono, _chi_mono(q))
                    if sign < 0:
                        coeff = nf_neg(coeff)
            items.append((mono, coeff))
    return hp_from(dim, cutoff, items)


def _chi_mono(q):
    m = [(0, 0)] * (q + 1)
    m[q] = (0, 1)
    return tuple(m)


def _s_into_word(odd_pairs, nf):
    """Recursive expansion of S acting on chi_{p_1} ... chi_{p_k} (x) nf.

    Yields (word, coefficient) where word is a list of markers: -1 for a
    produced lambda_0 factor, q >= 0 for a surviving chi_q."""
    if not odd_pairs:
        return [((), apply_S(nf))]
    q0 = odd_pairs[0]
    rest = odd_pairs[1:]
    out = []
    if q0 == 0:
        # S chi_0 = 2 lambda_0 - chi_0 S
        out.append(((-1,) + rest, nf_scale(nf, QI(2))))
    for word, coeff in _s_into_word(rest, nf):
        out.append(((q0,) + word, nf_neg(coeff)))
    return out


def hp_op_lambda_plus_T(p, repeat=1):
    for _ in range(repeat):
        p = hp_add(hp_mul_lambda(p), hp_op_T(p))
    return p


def hp_op_chi_plus_S(p):
    chi = hp_mul_mono(p, _chi_mono(0), extraction_parity=False)
    return hp_add(chi, hp_op_S(p))


def hp_reindex_to_gamma(p):
    """Rename the Lambda pair into the Gamma pair; the poly must not
    use the Gamma pair yet."""
    out = {}
    for m, nf in p.terms.items():
        if hmono_get(m, 1) != (0, 0) or len(m) > 2:
            raise ValueError("poly already uses the auxiliary pair")
        j, J = hmono_get(m, 0)
        out[hmono_trim(((0, 0), (j, J)))] = nf
    return HPoly(p.dim, p.cutoff, out)


def hp_subst_gamma_plus_lambda(p):
    """Substitute gamma -> gamma + lambda, eta -> eta + chi."""
    dim, cutoff = p.dim, p.cutoff
    items = []
    for m, nf in p.terms.items():
        j, J = hmono_get(m, 0)
        k, K = hmono_get(m, 1)
        for i in range(k + 1):
            c = QI(binomial(k, i))
            base = ((j + i, 0), (k - i, 0))
            if K == 0:
                mono = ((j + i, J), (k - i, 0))
                items.append((mono, nf_scale(nf, c)))
            else:
                # (eta + chi) expands into two words
                for odd_new in ("eta", "chi"):
                    mono = base
                    coeff = nf_scale(nf, c)
                    factors = []
                    if J:
                        factors.append(_chi_mono(0))
                    factors.append(_chi_mono(1) if odd_new == "eta"
                                   else _chi_mono(0))
                    for f in factors:
                        sign, mono = hmono_mul(mono, f)
                        if sign == 0:
                            coeff = None
                            break
                        if sign < 0:
                            coeff = nf_neg(coeff)
                    if coeff is not None:
                        items.append((mono, coeff))
    return hp_from(dim, cutoff, items)


def hp_integrate_wick(p):
    """Integrate the Gamma pair over the segment from 0 to Lambda.

    Keys with no eta die; for the others eta is removed (a sign for
    passing chi_0) and gamma^k becomes lambda^{k+1}/(k+1)."""
    dim, cutoff = p.dim, p.cutoff
    items = [((), NormalForm(dim, cutoff, {}, p.exact_to()))]
    for m, nf in p.terms.items():
        j, J = hmono_get(m, 0)
        k, K = hmono_get(m, 1)
        if K == 0:
            continue
        sign = -1 if J else 1
        coeff = nf_scale(nf, QI(Fraction(sign, k + 1)))
        items.append((((j + k + 1, J),), coeff))
    return hp_from(dim, cutoff, items)


def hp_integrate_qc(p):
    """Integrate a pure-Lambda poly over Lambda from -grad to 0,
    yielding a state: chi must be present, lambda^j becomes
    (-1)^j T^{j+1}/(j+1) applied to the coefficient."""
    dim, cutoff = p.dim, p.cutoff
    out = NormalForm(dim, cutoff, {}, p.exact_to())
    for m, nf in p.terms.items():
        if len(m) > 1:
            raise ValueError("expected a pure-Lambda polynomial")
        j, J = hmono_get(m, 0)
        if not J:
            continue
        term = nf
        for _ in range(j + 1):
            term = apply_T(term)
        out = nf_add(out, nf_scale(term, QI(Fraction((-1) ** j, j + 1))))
    return out


def hp_chi_part(p):
    """The classical lambda-bracket: the chi-linear part as a map
    j -> state coefficient of lambda^j chi."""
    out = {}
    for m, nf in p.terms.items():
        j, J = hmono_get(m, 0)
        if len(hmono_trim(m)) > 1:
            raise ValueError("expected a pure-Lambda polynomial")
        if J:
            out[j] = nf
    return out


# -- expressions ------------------------------------------------------
#
# A tiny algebraic expression layer feeding normalize(); the parser and
# the geometry builders construct these.


class Vac:
    __slots__ = ()

    def __repr__(self):
        return "vac"


class GenE:
    __slots__ = ("gen",)

    def __init__(self, gen):
        self.gen = gen

    def __repr__(self):
        return self.gen.render()


class CoeffE:
    __slots__ = ("cf",)

    def __init__(self, cf):
        self.cf = cf


class SD:
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class TD:
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class Nop:
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left = left
        self.right = right


class Sum:
    __slots__ = ("items",)

    def __init__(self, items):
        # items: tuple of (QI scale, expression)
        self.items = tuple(items)


class Algebra:
    """Ambient configuration: number of superfields and series cutoff."""

    def __init__(self, dim, cutoff):
        self.dim = dim
        self.cutoff = cutoff

    def zero(self):
        return nf_zero(self.dim, self.cutoff)

    def one(self):
        return nf_one(self.dim, self.cutoff)

    def coordinate(self, i):
        return CoeffFunction.coordinate(self.dim, self.cutoff, i)

    def constant(self, q):
        return CoeffFunction.constant(self.dim, self.cutoff, q)

    def nf_gen(self, kind, index, t=0, s=0):
        g = Generator(kind, index, t, s)
        if kind == B_KIND and t == 0 and s == 0:
            return nf_mono(self.dim, self.cutoff, self.coordinate(index), ())
        return nf_mono(self.dim, self.cutoff,
                       unit_cf(self.dim, self.cutoff), (g,))

    def B(self, i):
        return self.nf_gen(B_KIND, i)

    def Psi(self, i):
        return self.nf_gen(PSI_KIND, i)

    def SB(self, i):
        return self.nf_gen(B_KIND, i, 0, 1)

    def SPsi(self, i):
        return self.nf_gen(PSI_KIND, i, 0, 1)

    def TB(self, i):
        return self.nf_gen(B_KIND, i, 1, 0)

    def TPsi(self, i):
        return self.nf_gen(PSI_KIND, i, 1, 0)

    def coeff_nf(self, cf):
        return nf_mono(self.dim, self.cutoff, cf, ())

    def normalize(self, expr):
        return normalize(expr, self)


def normalize(expr, alg):
    """Rewrite an expression into PBW normal form."""
    if isinstance(expr, NormalForm):
        return expr
    if isinstance(expr, Vac):
        return alg.one()
    if isinstance(expr, GenE):
        g = expr.gen
        return alg.nf_gen(g.kind, g.index, g.t, g.s)
    if isinstance(expr, CoeffE):
        return alg.coeff_nf(expr.cf)
    if isinstance(expr, SD):
        return apply_S(normalize(expr.arg, alg))
    if isinstance(expr, TD):
        return apply_T(normalize(expr.arg, alg))
    if isinstance(expr, Nop):
        return nf_mul(normalize(expr.left, alg), normalize(expr.right, alg))
    if isinstance(expr, Sum):
        out = alg.zero()
        for q, e in expr.items:
            out = nf_add(out, nf_scale(normalize(e, alg), q))
        return out
    raise TypeError("not a field expression: %r" % (expr,))


def expr_equal(e1, e2, alg):
    """Decide equality of two expressions.

    Returns (verdict, guaranteed_degree): guaranteed_degree None means
    the comparison is exact; an integer bounds the certified degree.
    """
    d = nf_sub(normalize(e1, alg), normalize(e2, alg))
    gd = d.exact_to
    return d.is_zero_through(gd), gd


# -- rendering --------------------------------------------------------


def render_cf_literal(cf):
    parts = []
    for e in sorted(cf.terms):
        parts.append('"%s": "%s"' % (",".join(str(x) for x in e),
                                     render_qi(cf.terms[e])))
    return "f{%s}" % ", ".join(parts)


def _scalar_addends(q):
    out = []
    if q.re:
        out.append(str(q.re))
    if q.im:
        out.append("i" if q.im == 1 else "%s * i" % q.im)
    return out or ["0"]


def _render_mono_addends(cf, gens):
    """Render one normal-form monomial as a list of DSL addend strings."""
    if not gens:
        if cf.is_constant():
            return _scalar_addends(cf.constant_term())
        if len(cf.terms) == 1:
            (e, q), = cf.terms.items()
            if sum(e) == 1 and q == ONE:
                return ["B%d" % (e.index(1) + 1)]
        return [render_cf_literal(cf)]
    gen_parts = [g.render() for g in gens]
    if not cf.is_constant():
        core = ":%s:" % " ".join([render_cf_literal(cf)] + gen_parts)
        return [core]
    core = gen_parts[0] if len(gen_parts) == 1 else \
        ":%s:" % " ".join(gen_parts)
    q = cf.constant_term()
    out = []
    if q.re:
        out.append(core if q.re == 1 else "%s * %s" % (q.re, core))
    if q.im:
        if q.im == 1:
            out.append("i * %s" % core)
        else:
            out.append("%s * i * %s" % (q.im, core))
    return out


def _join_addends(addends):
    """Join with explicit '-' so every rendered sum stays parseable."""
    out = [addends[0]]
    for a in addends[1:]:
        if a.startswith("-"):
            out.append(" - " + a[1:].lstrip())
        else:
            out.append(" + " + a)
    return "".join(out)


def render_nf(nf):
    if not nf.terms:
        return "0"
    addends = []
    for gens, cf in nf.sorted_terms():
        addends.extend(_render_mono_addends(cf, gens))
    return _join_addends(addends)


def render_hpoly(p):
    if not p.terms:
        return "0"
    parts = []
    for m in sorted(p.terms, key=lambda m: (hmono_parity(m), m)):
        nf = p.terms[m]
        head = hmono_render(m)
        body = render_nf(nf)
        if head == "1":
            parts.append(body)
        elif body == "1":
            parts.append(head)
        else:
            parts.append("%s * (%s)" % (head, body))
    return _join_addends(parts)
