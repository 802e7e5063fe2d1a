"""Checkers for the N=1, N=2 and N=4 superconformal relations.

Each checker computes the relevant Lambda-brackets, subtracts the
required right-hand side, extracts the central charge from the vacuum
coefficient of the central monomial (lambda^2 chi for N=1, lambda chi
for N=2), and reports the residual together with the degree through
which the verdict is certified exact.
"""

from __future__ import annotations

from .scalars import QI, ZERO, CoeffFunction, render_qi, _min_exact
from .terms import (NormalForm, HPoly, nf_scale, apply_S, apply_T,
                    hp_from, hp_add, hp_sub, hp_scale,
                    render_hpoly, render_nf)
from .bracket import lambda_bracket


class StructureReport:
    """Outcome of one superconformal verification."""

    def __init__(self, name, verdict, central_charge=None,
                 guaranteed_degree=None, residual=None, details=()):
        self.name = name
        self.verdict = verdict
        self.central_charge = central_charge
        self.guaranteed_degree = guaranteed_degree
        self.residual = residual
        self.details = tuple(details)

    def residual_rendering(self):
        if self.residual is None:
            return None
        if isinstance(self.residual, HPoly):
            return render_hpoly(self.residual)
        return render_nf(self.residual)

    def to_json(self):
        return {
            "verdict": "pass" if self.verdict else "fail",
            "central_charge": (None if self.central_charge is None
                               else render_qi(self.central_charge)),
            "guaranteed_degree": self.guaranteed_degree,
            "residual_rendering": self.residual_rendering(),
        }

    def text_lines(self):
        gd = ("exact" if self.guaranteed_degree is None
              else "degree %d" % self.guaranteed_degree)
        cc = ("" if self.central_charge is None
              else ", c = %s" % render_qi(self.central_charge))
        head = "%s: %s%s (%s)" % (self.name,
                                  "pass" if self.verdict else "FAIL", cc, gd)
        lines = [head]
        for d in self.details:
            lines.append("  " + d)
        if not self.verdict and self.residual is not None:
            lines.append("  residual: %s" % self.residual_rendering())
        return lines


def _split_central(p, mono):
    """Remove the constant-vacuum part of the given monomial coefficient
    from the poly; returns (constant, remainder poly)."""
    nf = p.coeff(tuple(mono))
    if nf is None:
        return ZERO, p
    cf = nf.terms.get(())
    if cf is None:
        return ZERO, p
    const = cf.constant_term()
    if not const:
        return ZERO, p
    dim, cutoff = p.dim, p.cutoff
    removal = HPoly(dim, cutoff, {tuple(mono): NormalForm(
        dim, cutoff, {(): CoeffFunction.constant(dim, cutoff, const)})})
    return const, hp_sub(p, removal)


def _ns_rhs(h):
    """(2T + 3 lambda + chi S) H as a Lambda-polynomial."""
    dim, cutoff = h.dim, h.cutoff
    return hp_from(dim, cutoff, [
        ((), nf_scale(apply_T(h), 2)),
        (((1, 0),), nf_scale(h, 3)),
        (((0, 1),), apply_S(h)),
    ])


def check_ns(h, name="ns"):
    """Neveu-Schwarz shape: [H_L H] = (2T + chi S + 3 lambda) H plus a
    central lambda^2 chi term; central charge is 3x that constant."""
    if not isinstance(h, NormalForm):
        raise TypeError("check_ns expects a NormalForm state")
    if h.parity() != 1:
        raise ValueError("the NS candidate must be odd")
    p = lambda_bracket(h, h)
    r = hp_sub(p, _ns_rhs(h))
    c3, r = _split_central(r, ((2, 1),))
    c = c3 * QI(3)
    gd = r.exact_to()
    ok = r.is_zero_through(gd)
    return StructureReport(name, ok, central_charge=c,
                           guaranteed_degree=gd,
                           residual=None if ok else r)


def check_ns_against(h, target, name="ns-closure"):
    """Like check_ns but requires the bracket to close on the given
    target state: [H_L H] = (2T + chi S + 3 lambda) target + central."""
    if h.parity() != 1:
        raise ValueError("the NS candidate must be odd")
    p = lambda_bracket(h, h)
    r = hp_sub(p, _ns_rhs(target))
    c3, r = _split_central(r, ((2, 1),))
    c = c3 * QI(3)
    gd = r.exact_to()
    ok = r.is_zero_through(gd)
    return StructureReport(name, ok, central_charge=c,
                           guaranteed_degree=gd,
                           residual=None if ok else r)


def _weight_one_rhs(j):
    """(2T + 2 lambda + chi S) J, the primary-of-weight-one shape."""
    dim, cutoff = j.dim, j.cutoff
    return hp_from(dim, cutoff, [
        ((), nf_scale(apply_T(j), 2)),
        (((1, 0),), nf_scale(j, 2)),
        (((0, 1),), apply_S(j)),
    ])


def check_n2(h, j, name="n2"):
    """N=2 relations: J is primary of conformal weight one and
    [J_L J] = -(H + (c/3) lambda chi); c is cross-checked against the
    NS charge of H."""
    if h.parity() != 1:
        raise ValueError("H must be odd")
    if j.parity() != 0:
        raise ValueError("J must be even")
    details = []
    ns = check_ns(h, name="%s/ns" % name)
    r1 = hp_sub(lambda_bracket(h, j), _weight_one_rhs(j))
    gd1 = r1.exact_to()
    ok1 = r1.is_zero_through(gd1)
    details.append("[H_L J] weight-1 primary: %s" % ("pass" if ok1 else "FAIL"))

    p2 = lambda_bracket(j, j)
    dim, cutoff = h.dim, h.cutoff
    r2 = hp_add(p2, HPoly(dim, cutoff, {(): h}))
    cneg3, r2 = _split_central(r2, ((1, 1),))
    c = -(cneg3 * QI(3))
    gd2 = r2.exact_to()
    ok2 = r2.is_zero_through(gd2)
    details.append("[J_L J] = -(H + (c/3) lambda chi): %s"
                   % ("pass" if ok2 else "FAIL"))
    agree = (c == ns.central_charge)
    details.append("central charge agreement with NS: %s"
                   % ("pass" if agree else "FAIL"))
    gd = _deg_min(ns.guaranteed_degree, gd1, gd2)
    ok = ns.verdict and ok1 and ok2 and agree
    residual = None
    if not ok1:
        residual = r1
    elif not ok2:
        residual = r2
    return StructureReport(name, ok, central_charge=c,
                           guaranteed_degree=gd, residual=residual,
                           details=details)


def _deg_min(*degs):
    out = None
    for d in degs:
        out = _min_exact(out, d)
    return out


def _cross_rhs(jk, sign):
    """epsilon * (S + 2 chi) J^k."""
    dim, cutoff = jk.dim, jk.cutoff
    p = hp_from(dim, cutoff, [
        ((), apply_S(jk)),
        (((0, 1),), nf_scale(jk, 2)),
    ])
    return hp_scale(p, QI(sign))


_EPS = {(0, 1): (2, 1), (1, 2): (0, 1), (2, 0): (1, 1),
        (1, 0): (2, -1), (2, 1): (0, -1), (0, 2): (1, -1)}


def check_n4(h, j0, j1, j2, name="n4"):
    """N=4 relations: (H, J^i) is an N=2 for each i and
    [J^i_L J^j] = eps^{ijk} (S + 2 chi) J^k for i != j, both orderings."""
    js = [j0, j1, j2]
    details = []
    charges = []
    gds = []
    ok = True
    residual = None
    for i, j in enumerate(js):
        sub = check_n2(h, j, name="%s/pair%d" % (name, i))
        details.append("pair (H, J%d): %s, c = %s" % (
            i, "pass" if sub.verdict else "FAIL",
            render_qi(sub.central_charge)))
        charges.append(sub.central_charge)
        gds.append(sub.guaranteed_degree)
        if not sub.verdict:
            ok = False
            residual = residual or sub.residual
    if len({render_qi(c) for c in charges}) != 1:
        ok = False
        details.append("central charges disagree across pairs: FAIL")
    for (i, jj), (k, sign) in sorted(_EPS.items()):
        r = hp_sub(lambda_bracket(js[i], js[jj]), _cross_rhs(js[k], sign))
        gd = r.exact_to()
        sub_ok = r.is_zero_through(gd)
        gds.append(gd)
        details.append("[J%d_L J%d] = %s(S+2chi) J%d: %s" % (
            i, jj, "" if sign > 0 else "-", k,
            "pass" if sub_ok else "FAIL"))
        if not sub_ok:
            ok = False
            residual = residual or r
    return StructureReport(name, ok, central_charge=charges[0],
                           guaranteed_degree=_deg_min(*gds),
                           residual=residual, details=details)
