"""The Lambda-bracket of the free superfield algebra.

Base brackets: [B^i_Lambda Psi^j] = delta_ij = [Psi^j_Lambda B^i], all
other generator pairs vanish, and [Psi^i_Lambda f(B)] = d_i f.  The
bracket extends by sesquilinearity in both slots (stripping S and T
derivatives), by the non-commutative Wick formula on normally ordered
products, and by skew-symmetry when only the left argument is composite.

Values are HPoly in the Lambda pair (lambda, chi); iterated brackets
temporarily use the Gamma pair (gamma, eta) and are integrated out.
"""

from __future__ import annotations

from .scalars import QI, ONE, hmono_parity, hmono_get, hmono_trim
from .terms import (B_KIND, PSI_KIND, Generator, NormalForm, gens_parity,
                    nf_zero, nf_one, nf_mono, nf_add, nf_neg, nf_scale,
                    nf_mul, nf_apply_gen, unit_cf, apply_S, apply_T,
                    HPoly, hp_zero, hp_from, hp_add, hp_sub, hp_neg,
                    hp_scale, hp_mul_lambda, hp_mul_mono, hp_op_T,
                    hp_op_S, hp_op_lambda_plus_T, hp_op_chi_plus_S,
                    hp_nf_mul_right, hp_nf_mul_left, hp_reindex_to_gamma,
                    hp_subst_gamma_plus_lambda, hp_integrate_wick,
                    hp_integrate_qc, nf_from_terms)

_BR_CACHE = {}


def clear_caches():
    _BR_CACHE.clear()


def lambda_bracket(a, b):
    """[a_Lambda b] for states a, b; bilinear over Q(i)."""
    dim, cutoff = a.dim, a.cutoff
    out = hp_zero(dim, cutoff)
    exact = None
    from .scalars import _min_exact
    exact = _min_exact(a.exact_to, b.exact_to)
    for g1, c1 in a.terms.items():
        for g2, c2 in b.terms.items():
            out = hp_add(out, bracket_mono(dim, cutoff, (c1, g1), (c2, g2)))
    if exact is not None:
        # carry the input truncation even if every term cancels
        marker = nf_from_terms(dim, cutoff, {}, exact)
        out = hp_add(out, HPoly(dim, cutoff, {(): marker}))
    return out


def bracket_mono(dim, cutoff, m1, m2):
    key = (dim, cutoff, m1, m2)
    hit = _BR_CACHE.get(key)
    if hit is not None:
        return hit
    out = _bracket_mono(dim, cutoff, m1, m2)
    _BR_CACHE[key] = out
    return out


def _is_atomic(m):
    f, gens = m
    return len(gens) <= 1 and f.is_constant()


def _bracket_mono(dim, cutoff, m1, m2):
    f1, g1 = m1
    f2, g2 = m2
    if not g1 and not g2:
        # two functions of the B fields commute
        return hp_zero(dim, cutoff)
    if g2 and (len(g2) >= 2 or not f2.is_constant()):
        return _wick(dim, cutoff, m1, (f2, g2[:-1]), g2[-1])
    if _is_atomic(m1):
        return _atomic_bracket(dim, cutoff, m1, m2)
    # left argument composite, right atomic: flip by skew-symmetry
    flipped = bracket_mono(dim, cutoff, m2, m1)
    return skew_transform(flipped, gens_parity(g1), gens_parity(g2))


def _atomic_bracket(dim, cutoff, m1, m2):
    """Left argument is a constant multiple of vacuum or of one derived
    generator; strip its derivatives, then the right ones."""
    f1, g1 = m1
    if not g1:
        # constants bracket to zero
        return hp_zero(dim, cutoff)
    scale = f1.constant_term()
    g = g1[0]
    p = _atomic_deriv_left(dim, cutoff, g, m2)
    if scale != ONE:
        p = hp_scale(p, scale)
    return p


def _atomic_deriv_left(dim, cutoff, g, m2):
    # [T a_L b] = -lambda [a_L b], [S a_L b] = chi [a_L b];
    # strip the outer T powers first, then S
    if g.t > 0:
        inner = _atomic_deriv_left(dim, cutoff,
                                   Generator(g.kind, g.index, g.t - 1, g.s),
                                   m2)
        return hp_scale(hp_mul_lambda(inner), QI(-1))
    if g.s:
        inner = _atomic_deriv_left(dim, cutoff,
                                   Generator(g.kind, g.index, 0, 0), m2)
        return hp_mul_mono(inner, ((0, 1),), extraction_parity=False)
    return _atomic_deriv_right(dim, cutoff, g, m2)


def _atomic_deriv_right(dim, cutoff, x, m2):
    # x is an underived generator; m2 is a pure coefficient or a
    # constant multiple of a single derived generator
    f2, g2 = m2
    if not g2:
        if x.kind == PSI_KIND:
            d = f2.partial(x.index)
            if d.is_zero() and d.exact_to is None:
                return hp_zero(dim, cutoff)
            return HPoly(dim, cutoff, {(): nf_mono(dim, cutoff, d, ())})
        return hp_zero(dim, cutoff)
    h = g2[0]
    p = _strip_right(dim, cutoff, x, h)
    scale = f2.constant_term()
    if scale != ONE:
        p = hp_scale(p, scale)
    return p


def _strip_right(dim, cutoff, x, h):
    # [a_L T b] = (lambda + T)[a_L b]
    # [a_L S b] = -(-1)^{p(a)} (S + chi)[a_L b]
    if h.t > 0:
        inner = _strip_right(dim, cutoff, x,
                             Generator(h.kind, h.index, h.t - 1, h.s))
        return hp_op_lambda_plus_T(inner)
    if h.s:
        inner = _strip_right(dim, cutoff, x,
                             Generator(h.kind, h.index, 0, 0))
        out = hp_op_chi_plus_S(inner)
        if x.parity() == 0:
            out = hp_neg(out)
        return out
    # base pairing of underived generators
    if x.kind != h.kind and x.index == h.index:
        return HPoly(dim, cutoff, {(): nf_one(dim, cutoff)})
    return hp_zero(dim, cutoff)


def _wick(dim, cutoff, a, b, c_gen):
    """[a_L b c] by the non-commutative Wick formula, c a generator."""
    one = unit_cf(dim, cutoff)
    c_mono = (one, (c_gen,))
    pa = gens_parity(a[1])
    pb = gens_parity(b[1])
    ab = bracket_mono(dim, cutoff, a, b)
    ac = bracket_mono(dim, cutoff, a, c_mono)
    # [a_L b] c
    c_nf = nf_mono(dim, cutoff, one, (c_gen,))
    t1 = HPoly(dim, cutoff,
               {m: nf_apply_gen(dim, cutoff, nf, c_gen)
                for m, nf in ab.terms.items()})
    # (-1)^{(p(a)+1) p(b)} b [a_L c]
    b_nf = nf_mono(dim, cutoff, b[0], b[1])
    t2 = hp_nf_mul_left(ac, b_nf, pb)
    if ((pa + 1) * pb) & 1:
        t2 = hp_neg(t2)
    # integral term: sum over monomials of [a_L b]
    t3 = hp_zero(dim, cutoff)
    for m, d_nf in ab.terms.items():
        inner = lambda_bracket(d_nf, c_nf)
        if not inner.terms:
            continue
        inner = hp_reindex_to_gamma(inner)
        inner = hp_mul_mono(inner, m, extraction_parity=True)
        t3 = hp_add(t3, inner)
    t3 = hp_integrate_wick(t3)
    return hp_add(hp_add(t1, t2), t3)


def skew_transform(p, parity_a, parity_b):
    """Given [a_Gamma b] computed in the Lambda pair, return
    (-1)^{p(a) p(b)} [a_{-Lambda-grad} b], the skew image [b_Lambda a].

    Each monomial lambda^k chi^K (x) c maps to
    (-1)^{k+K} (lambda+T)^k (chi+S)^K applied to c as left operators.
    """
    dim, cutoff = p.dim, p.cutoff
    out = hp_zero(dim, cutoff)
    for m, nf in p.terms.items():
        if len(hmono_trim(m)) > 1:
            raise ValueError("skew input must be a pure-Lambda polynomial")
        k, K = hmono_get(m, 0)
        q = HPoly(dim, cutoff, {(): nf})
        if K:
            q = hp_op_chi_plus_S(q)
        q = hp_op_lambda_plus_T(q, repeat=k)
        if (k + K) & 1:
            q = hp_neg(q)
        out = hp_add(out, q)
    if (parity_a * parity_b) & 1:
        out = hp_neg(out)
    return out


def skew(p, parity_a, parity_b):
    """Public alias of skew_transform."""
    return skew_transform(p, parity_a, parity_b)


def wick(a, b, c):
    """[a_L :bc:] assembled from the three Wick terms, for states whose
    product :bc: need not be reassociated first."""
    dim, cutoff = a.dim, a.cutoff
    pa = a.parity()
    pb = b.parity()
    if pa is None or pb is None:
        raise ValueError("wick needs homogeneous arguments")
    ab = lambda_bracket(a, b)
    ac = lambda_bracket(a, c)
    t1 = hp_nf_mul_right(ab, c)
    t2 = hp_nf_mul_left(ac, b, pb)
    if ((pa + 1) * pb) & 1:
        t2 = hp_neg(t2)
    t3 = hp_zero(dim, cutoff)
    for m, d_nf in ab.terms.items():
        inner = lambda_bracket(d_nf, c)
        if not inner.terms:
            continue
        inner = hp_reindex_to_gamma(inner)
        inner = hp_mul_mono(inner, m, extraction_parity=True)
        t3 = hp_add(t3, inner)
    t3 = hp_integrate_wick(t3)
    return hp_add(hp_add(t1, t2), t3)


def jacobi_defect(a, b, c):
    """[a_L [b_G c]] + (-1)^{p(a)} [[a_L b]_{G+L} c]
    - (-1)^{(p(a)+1)(p(b)+1)} [b_G [a_L c]]; zero when Jacobi holds."""
    dim, cutoff = a.dim, a.cutoff
    pa = a.parity()
    pb = b.parity()
    if pa is None or pb is None:
        raise ValueError("jacobi_defect needs homogeneous arguments")

    # X1 = [a_L [b_G c]]
    inner_bc = hp_reindex_to_gamma(lambda_bracket(b, c))
    x1 = hp_zero(dim, cutoff)
    for m, d_nf in inner_bc.terms.items():
        q = lambda_bracket(a, d_nf)
        q = hp_mul_mono(q, m, extraction_parity=False)
        if (hmono_parity(m) * ((pa + 1) & 1)) & 1:
            q = hp_neg(q)
        x1 = hp_add(x1, q)

    # X2 = [[a_L b]_{G+L} c]
    ab = lambda_bracket(a, b)
    x2 = hp_zero(dim, cutoff)
    for m, d_nf in ab.terms.items():
        q = lambda_bracket(d_nf, c)
        q = hp_reindex_to_gamma(q)
        q = hp_subst_gamma_plus_lambda(q)
        q = hp_mul_mono(q, m, extraction_parity=True)
        x2 = hp_add(x2, q)

    # X3 = [b_G [a_L c]]
    ac = lambda_bracket(a, c)
    x3 = hp_zero(dim, cutoff)
    for m, d_nf in ac.terms.items():
        q = hp_reindex_to_gamma(lambda_bracket(b, d_nf))
        q = hp_mul_mono(q, m, extraction_parity=False)
        if (hmono_parity(m) * ((pb + 1) & 1)) & 1:
            q = hp_neg(q)
        x3 = hp_add(x3, q)

    out = x1
    if pa & 1:
        out = hp_sub(out, x2)
    else:
        out = hp_add(out, x2)
    s3 = (pa + 1) * (pb + 1)
    if s3 & 1:
        out = hp_add(out, x3)
    else:
        out = hp_sub(out, x3)
    return out
