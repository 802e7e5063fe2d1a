"""Classical-component view of the superfield algebra.

Every state decomposes into a bottom and a top component (the top is
the image under the odd derivation).  The classical lambda-bracket of
components is the chi-linear part of the full bracket, and the usual
N=1, N=2 and N=4 operator families arise by splitting the
superconformal currents with Gaussian-rational coefficients.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import QI, _min_exact
from .terms import (nf_zero, nf_add, nf_sub, nf_scale, nf_scalar, nf_sum,
                    apply_S, apply_T, hp_chi_part, render_nf)
from .bracket import lambda_bracket
from .superconf import StructureReport, check_ns, check_n2, check_n4

HALF = QI(Fraction(1, 2))
IMAG = QI(0, 1)


def expand(a):
    """(bottom, top) component pair of a state."""
    return a, apply_S(a)


def classical_bracket(a, b):
    """The lambda-bracket of the underlying classical vertex algebra:
    {j: coefficient of lambda^j}, together with the degree through
    which it is certified."""
    p = lambda_bracket(a, b)
    return hp_chi_part(p), p.exact_to()


def sres_action(f, a):
    """Zero-mode (super-residue) action of the current f on a state."""
    return lambda_bracket(f, a).coeff_or_zero(())


def _row_check(a, b, want, dim, cutoff):
    got, gd = classical_bracket(a, b)
    zero = nf_zero(dim, cutoff)
    ok = True
    worst = None
    for j in set(got) | set(want):
        d = nf_sub(got.get(j, zero), want.get(j, zero))
        gd = _min_exact(gd, d.exact_to)
        if not d.is_zero_through(_min_exact(gd, d.exact_to)):
            ok = False
            if worst is None:
                worst = d
    return ok, gd, worst


def _table_report(name, c, rows, dim, cutoff):
    details = []
    ok = True
    gd = None
    residual = None
    for label, a, b, want in rows:
        row_ok, row_gd, worst = _row_check(a, b, want, dim, cutoff)
        details.append("%s: %s" % (label, "pass" if row_ok else "FAIL"))
        gd = _min_exact(gd, row_gd)
        if not row_ok:
            ok = False
            if residual is None:
                residual = worst
    return StructureReport(name, ok, central_charge=c,
                           guaranteed_degree=gd, residual=residual,
                           details=details)


def _primary_row(label, l_state, x, weight, dim, cutoff):
    return (label, l_state, x,
            {0: apply_T(x), 1: nf_scale(x, weight)})


def _ns_rows(l_state, c, dim, cutoff):
    return [("[L_l L]", l_state, l_state,
             {0: apply_T(l_state), 1: nf_scale(l_state, 2),
              3: nf_scalar(dim, cutoff, c / QI(12))})]


def n1_components(h):
    """Virasoro pair (L, G) carried by an odd NS current: G is the
    current itself, L half its image under S."""
    return nf_scale(apply_S(h), HALF), h


def check_n1_components(h, name="components-n1"):
    """The (L, G) pair closes the standard N=1 relations with the
    central charge read off the superfield check."""
    dim, cutoff = h.dim, h.cutoff
    ns = check_ns(h)
    c = ns.central_charge
    l_state, g = n1_components(h)
    rows = _ns_rows(l_state, c, dim, cutoff)
    rows.append(_primary_row("[L_l G]", l_state, g, HALF * QI(3),
                             dim, cutoff))
    rows.append(("[G_l G]", g, g,
                 {0: nf_scale(l_state, 2),
                  2: nf_scalar(dim, cutoff, c / QI(3))}))
    rep = _table_report(name, c, rows, dim, cutoff)
    if not ns.verdict:
        rep.verdict = False
        rep.details = rep.details + ("superfield NS check: FAIL",)
    return rep


def n2_components(h, j_s):
    """N=2 quadruple (L, J, G+, G-) from the superconformal pair:
    J = i J_s, G+- = (H -+ i S J_s)/2, L = S H / 2."""
    sj = apply_S(j_s)
    return {
        "L": nf_scale(apply_S(h), HALF),
        "J": nf_scale(j_s, IMAG),
        "G+": nf_scale(nf_sub(h, nf_scale(sj, IMAG)), HALF),
        "G-": nf_scale(nf_add(h, nf_scale(sj, IMAG)), HALF),
    }


def check_n2_components(h, j_s, name="components-n2"):
    dim, cutoff = h.dim, h.cutoff
    susy = check_n2(h, j_s)
    c = susy.central_charge
    f = n2_components(h, j_s)
    L, J, Gp, Gm = f["L"], f["J"], f["G+"], f["G-"]
    rows = _ns_rows(L, c, dim, cutoff)
    rows.append(_primary_row("[L_l J]", L, J, QI(1), dim, cutoff))
    rows.append(_primary_row("[L_l G+]", L, Gp, HALF * QI(3), dim, cutoff))
    rows.append(_primary_row("[L_l G-]", L, Gm, HALF * QI(3), dim, cutoff))
    rows.append(("[J_l J]", J, J, {1: nf_scalar(dim, cutoff, c / QI(3))}))
    rows.append(("[J_l G+]", J, Gp, {0: Gp}))
    rows.append(("[J_l G-]", J, Gm, {0: nf_scale(Gm, -1)}))
    rows.append(("[G+_l G-]", Gp, Gm,
                 {0: nf_add(L, nf_scale(apply_T(J), HALF)), 1: J,
                  2: nf_scalar(dim, cutoff, c / QI(6))}))
    rows.append(("[G+_l G+]", Gp, Gp, {}))
    rows.append(("[G-_l G-]", Gm, Gm, {}))
    rep = _table_report(name, c, rows, dim, cutoff)
    if not susy.verdict:
        rep.verdict = False
        rep.details = rep.details + ("superfield N=2 check: FAIL",)
    return rep


def n4_components(h, j0_s, j1_s, j2_s):
    """N=4 family from the superconformal quadruple: the neutral pieces
    come from J0_s as in the N=2 case, the charged ones mix J1_s and
    J2_s with Gaussian-rational coefficients."""
    sj0 = apply_S(j0_s)
    sj1 = apply_S(j1_s)
    sj2 = apply_S(j2_s)
    return {
        "L": nf_scale(apply_S(h), HALF),
        "J0": nf_scale(j0_s, IMAG),
        "J+": nf_scale(nf_sub(j2_s, nf_scale(j1_s, IMAG)), HALF),
        "J-": nf_scale(nf_add(nf_scale(j1_s, -IMAG),
                              nf_scale(j2_s, -1)), HALF),
        "G+": nf_scale(nf_sub(h, nf_scale(sj0, IMAG)), HALF),
        "G-": nf_scale(nf_add(sj2, nf_scale(sj1, IMAG)), HALF),
        "Gb+": nf_scale(nf_sub(sj2, nf_scale(sj1, IMAG)), HALF),
        "Gb-": nf_scale(nf_add(h, nf_scale(sj0, IMAG)), HALF),
    }


def check_n4_components(h, j0_s, j1_s, j2_s, name="components-n4"):
    dim, cutoff = h.dim, h.cutoff
    susy = check_n4(h, j0_s, j1_s, j2_s)
    c = susy.central_charge
    f = n4_components(h, j0_s, j1_s, j2_s)
    L = f["L"]
    J0, Jp, Jm = f["J0"], f["J+"], f["J-"]
    Gp, Gm, Gbp, Gbm = f["G+"], f["G-"], f["Gb+"], f["Gb-"]
    rows = _ns_rows(L, c, dim, cutoff)
    for label, x, w in (("J0", J0, QI(1)), ("J+", Jp, QI(1)),
                        ("J-", Jm, QI(1)), ("G+", Gp, HALF * QI(3)),
                        ("G-", Gm, HALF * QI(3)), ("Gb+", Gbp, HALF * QI(3)),
                        ("Gb-", Gbm, HALF * QI(3))):
        rows.append(_primary_row("[L_l %s]" % label, L, x, w, dim, cutoff))
    rows.append(("[J0_l J+]", J0, Jp, {0: nf_scale(Jp, 2)}))
    rows.append(("[J0_l J-]", J0, Jm, {0: nf_scale(Jm, -2)}))
    rows.append(("[J0_l J0]", J0, J0,
                 {1: nf_scalar(dim, cutoff, c / QI(3))}))
    rows.append(("[J+_l J-]", Jp, Jm,
                 {0: J0, 1: nf_scalar(dim, cutoff, c / QI(6))}))
    rows.append(("[J0_l G+]", J0, Gp, {0: Gp}))
    rows.append(("[J0_l G-]", J0, Gm, {0: nf_scale(Gm, -1)}))
    rows.append(("[J0_l Gb+]", J0, Gbp, {0: Gbp}))
    rows.append(("[J0_l Gb-]", J0, Gbm, {0: nf_scale(Gbm, -1)}))
    rows.append(("[J+_l G-]", Jp, Gm, {0: Gp}))
    rows.append(("[J-_l G+]", Jm, Gp, {0: Gm}))
    rows.append(("[J+_l Gb-]", Jp, Gbm, {0: nf_scale(Gbp, -1)}))
    rows.append(("[J-_l Gb+]", Jm, Gbp, {0: nf_scale(Gbm, -1)}))
    rows.append(("[G+_l Gb+]", Gp, Gbp, {0: apply_T(Jp),
                                         1: nf_scale(Jp, 2)}))
    rows.append(("[G-_l Gb-]", Gm, Gbm, {0: apply_T(Jm),
                                         1: nf_scale(Jm, 2)}))
    rows.append(("[G+_l Gb-]", Gp, Gbm,
                 {0: nf_add(L, nf_scale(apply_T(J0), HALF)), 1: J0,
                  2: nf_scalar(dim, cutoff, c / QI(6))}))
    rows.append(("[G-_l Gb+]", Gm, Gbp,
                 {0: nf_sub(L, nf_scale(apply_T(J0), HALF)),
                  1: nf_scale(J0, -1),
                  2: nf_scalar(dim, cutoff, c / QI(6))}))
    for label, a, b in (("[G+_l G-]", Gp, Gm), ("[Gb+_l Gb-]", Gbp, Gbm),
                        ("[G+_l G+]", Gp, Gp), ("[G-_l G-]", Gm, Gm),
                        ("[Gb+_l Gb+]", Gbp, Gbp),
                        ("[Gb-_l Gb-]", Gbm, Gbm),
                        ("[J+_l J+]", Jp, Jp), ("[J-_l J-]", Jm, Jm)):
        rows.append((label + " = 0", a, b, {}))
    rep = _table_report(name, c, rows, dim, cutoff)
    if not susy.verdict:
        rep.verdict = False
        rep.details = rep.details + ("superfield N=4 check: FAIL",)
    return rep
