"""Independent mode-level oracle for the free superfield pair on the line.

States are polynomials in creation modes; annihilation modes act as
(super-)derivations.  Everything is spelled out from the classical mode
conventions: the weight-0 boson b and weight-1 boson a pair to
[a_(m), b_(k)] = delta_{m+k+1}, the weight-0 fermion phi and weight-1
fermion psi pair to {phi_(m), psi_(k)} = delta_{m+k+1}.  Nothing here
imports the engine, so agreement with it is evidence, not tautology.

Variable encoding: ("B", m) is b_(-m), ("A", m) is a_(-m), ("f", m) is
phi_(-m), ("p", m) is psi_(-m), all with m >= 1.  A monomial is a pair
(even, odd): even is a sorted tuple of (var, exponent), odd a sorted
tuple of distinct variables in canonical order.
"""

from fractions import Fraction


def fp_zero():
    return {}


def fp_term(even=(), odd=(), coeff=Fraction(1)):
    return {(tuple(even), tuple(odd)): coeff}


def fp_add(p, q):
    out = dict(p)
    for k, c in q.items():
        s = out.get(k, Fraction(0)) + c
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def fp_scale(p, c):
    if not c:
        return {}
    return {k: v * c for k, v in p.items()}


def fp_equal(p, q):
    return fp_add(p, fp_scale(q, Fraction(-1))) == {}


def _mul_even_mono(even, var):
    d = dict(even)
    d[var] = d.get(var, 0) + 1
    return tuple(sorted(d.items()))


def mul_even(p, var):
    out = {}
    for (even, odd), c in p.items():
        k = (_mul_even_mono(even, var), odd)
        out[k] = out.get(k, Fraction(0)) + c
    return out


def mul_odd(p, var):
    """Left multiplication by an odd creation mode."""
    out = {}
    for (even, odd), c in p.items():
        if var in odd:
            continue
        pos = 0
        while pos < len(odd) and odd[pos] < var:
            pos += 1
        sign = -1 if pos % 2 else 1
        new_odd = odd[:pos] + (var,) + odd[pos:]
        k = (even, new_odd)
        out[k] = out.get(k, Fraction(0)) + c * sign
    return out


def d_even(p, var):
    out = {}
    for (even, odd), c in p.items():
        d = dict(even)
        e = d.get(var, 0)
        if not e:
            continue
        if e == 1:
            del d[var]
        else:
            d[var] = e - 1
        k = (tuple(sorted(d.items())), odd)
        out[k] = out.get(k, Fraction(0)) + c * e
    return out


def d_odd(p, var):
    """Left superderivative by an odd mode."""
    out = {}
    for (even, odd), c in p.items():
        if var not in odd:
            continue
        pos = odd.index(var)
        sign = -1 if pos % 2 else 1
        k = (even, odd[:pos] + odd[pos + 1:])
        out[k] = out.get(k, Fraction(0)) + c * sign
    return out


def energy(key):
    even, odd = key
    e = 0
    for (kind, m), exp in even:
        e += (m if kind == "A" else m - 1) * exp
    for kind, m in odd:
        e += m if kind == "p" else m - 1
    return e


# -- free-field modes -------------------------------------------------

# mode(field, m) returns a state -> state map, or None when the mode
# can act only as zero in the window of interest

def mode(field, m):
    if field == "b":
        if m < 0:
            return lambda p: mul_even(p, ("B", -m))
        return lambda p: fp_scale(d_even(p, ("A", m + 1)), Fraction(-1))
    if field == "a":
        if m < 0:
            return lambda p: mul_even(p, ("A", -m))
        return lambda p: d_even(p, ("B", m + 1))
    if field == "phi":
        if m < 0:
            return lambda p: mul_odd(p, ("f", -m))
        return lambda p: d_odd(p, ("p", m + 1))
    if field == "psi":
        if m < 0:
            return lambda p: mul_odd(p, ("p", -m))
        return lambda p: d_odd(p, ("f", m + 1))
    raise ValueError(field)


# window of mode indices that can matter on low-energy states
WINDOW = range(-6, 6)


def poly_field_mode(coeffs, m, window=WINDOW):
    """The m-th mode of f(b) for f = sum coeffs[d] x^d.

    All b-modes commute, so f(b(z)) is the literal polynomial in the
    series; the z^{-1-m} coefficient of b(z)^d is the sum over ordered
    d-tuples with k_1 + ... + k_d = m - d + 1.
    """
    def act(p):
        out = fp_zero()
        for d, cd in enumerate(coeffs):
            if not cd:
                continue
            if d == 0:
                if m == -1:
                    out = fp_add(out, fp_scale(p, Fraction(cd)))
                continue
            for ks in _tuples(d, m - d + 1, window):
                q = p
                for k in ks:
                    q = mode("b", k)(q)
                    if not q:
                        break
                out = fp_add(out, fp_scale(q, Fraction(cd)))
        return out
    return act


def _tuples(d, total, window):
    if d == 1:
        if total in window:
            yield (total,)
        return
    for k in window:
        for rest in _tuples(d - 1, total - k, window):
            yield (k,) + rest


def nop_mode(u_mode, pu, v_mode, pv, m, window=WINDOW):
    """(:UV:)_{(m)} from the Borcherds sum: creation part of U to the
    left of V, annihilation part of U to the right, with the Koszul
    sign for odd U, V."""
    sgn = Fraction(-1 if (pu and pv) else 1)

    def act(p):
        out = fp_zero()
        for k in window:
            if k < 0:
                q = v_mode(m - 1 - k)(p)
                if q:
                    out = fp_add(out, u_mode(k)(q))
            else:
                q = u_mode(k)(p)
                if q:
                    out = fp_add(out, fp_scale(v_mode(m - 1 - k)(q), sgn))
        return out
    return act


def vector_field_zero_mode(coeffs):
    """Zero mode of the lift of f(x) d/dx: the normally ordered
    :f(b) a: plus the fermion correction :(:f'(b) phi:) psi:."""
    dcoeffs = [Fraction(d) * c for d, c in enumerate(coeffs)][1:]

    def f_mode(m):
        return poly_field_mode(coeffs, m)

    def df_mode(m):
        return poly_field_mode(dcoeffs, m)

    def a_mode(m):
        return mode("a", m)

    bos = nop_mode(f_mode, 0, a_mode, 0, 0)

    def dfphi_mode(m):
        return nop_mode(df_mode, 0, lambda k: mode("phi", k), 1, m)

    fer = nop_mode(dfphi_mode, 1, lambda k: mode("psi", k), 1, 0)

    def act(p):
        return fp_add(bos(p), fer(p))
    return act


def commutator(op1, op2, p):
    return fp_add(op1(op2(p)), fp_scale(op2(op1(p)), Fraction(-1)))
