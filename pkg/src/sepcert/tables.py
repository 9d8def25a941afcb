"""Threshold tables regenerated from closed forms.

Rational thresholds are kept as :class:`fractions.Fraction`; entropy
values are floats accompanied by a closed-form expression.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .detectors import (
    NEG_ENTROPY,
    PURITY,
    _exact_min_on_family,
    exact_critical_bracket,
    improved_family_spectrum,
    lower_spectrum,
    partial_sum_spec,
    upper_spectrum,
)
from .modulus import is_ppt_decisive, l_constant
from .state import DimsLike, as_dims

DECIMALS = 12

# Tidy forms of the entropy bracket ends where they are known; the generic
# expression from _entropy_expr is used elsewhere.
_ENTROPY_FORMS = {
    (2, 2): {"C_L+": "ln(6/sqrt(3))", "C_L-": "ln(6) - (5/6) ln(5/3)"},
    (2, 3): {"C_L+": "3 ln(2) - (3/8) ln(3)", "C_L-": "3 ln(2) - (3/4) ln(3/2)"},
}


def format_number(x) -> dict:
    """``{"fraction": "p/q" or None, "decimal": 12-digit string}``."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        frac = f"{x.numerator}/{x.denominator}" if x.denominator != 1 else str(x.numerator)
        return {"fraction": frac, "decimal": f"{float(x):.{DECIMALS}f}"}
    return {"fraction": None, "decimal": f"{float(x):.{DECIMALS}f}"}


def _entropy_expr(lam) -> str:
    """``S = -sum m p ln p`` over the distinct rational entries."""
    terms = []
    for p, m in sorted(Counter(lam).items(), reverse=True):
        if p == 0:
            continue
        coef = m * p
        terms.append(f"({coef}) ln({1 / p})")
    return " + ".join(terms)


@dataclass(frozen=True)
class TableEntry:
    quantity: str
    lower: object
    upper: object
    lower_source: str
    upper_source: str
    expression: tuple = ()

    @property
    def exact(self) -> bool:
        return self.lower == self.upper

    def to_dict(self) -> dict:
        d = {
            "quantity": self.quantity,
            "lower": format_number(self.lower),
            "upper": format_number(self.upper),
            "lower_source": self.lower_source,
            "upper_source": self.upper_source,
            "exact": self.exact,
        }
        if self.expression:
            d["expression"] = dict(self.expression)
        return d


def threshold_table(dims: DimsLike) -> list:
    """All thresholds for ``dims`` in a fixed order.

    Contains ``L``, the minimal-eigenvalue threshold, the two-eigenvalue
    condition (2x2 and 2x3 only), the purity bracket with the
    improved-family value, every ``C[k]`` and the entropy bracket.
    """
    dims = as_dims(dims)
    D = dims.total
    lb = l_constant(dims)
    L = lb.fraction
    rows = [
        TableEntry("L", L, L if lb.exact else Fraction(2, 2 + D), lb.provenance,
                   lb.provenance if lb.exact else "bipartite-cut"),
        TableEntry("min-eigenvalue threshold (1-L)/D", (1 - L) / D, (1 - L) / D,
                   "closed-form", "closed-form"),
    ]
    if is_ppt_decisive(dims):
        c = (1 - L) * (D - 1) / D
        rhs = (1 - L) / D
        # scale to integer coefficients: a*lam_D + b*lam_{D-1} >= 1
        a, b = (1 - c) / rhs, c / rhs
        rows.append(TableEntry(
            f"two-eigenvalue condition {a} lam_{D} + {b} lam_{D - 1} >= 1",
            c, c, "closed-form", "closed-form",
        ))
    if dims.n_factors >= 2 and D >= 3:
        br = exact_critical_bracket(PURITY, dims)
        rows.append(TableEntry("C_F purity", br.lower, br.upper,
                               br.lower_source, br.upper_source))
        if is_ppt_decisive(dims):
            v = _exact_min_on_family(PURITY, L, D)
            rows.append(TableEntry("purity improved-family infimum", v, v,
                                   "improved-family", "improved-family"))
    for k in range(D - 1, 0, -1):
        br = exact_critical_bracket(partial_sum_spec(k), dims)
        rows.append(TableEntry(f"C[{k}]", br.lower, br.upper,
                               br.lower_source, br.upper_source))
    rows.append(_entropy_entry(dims, L, D))
    return rows


def _entropy_entry(dims, L: Fraction, D: int) -> TableEntry:
    """``C_S`` in the physical orientation: ``S(rho) >= C_S`` certifies."""
    lb = l_constant(dims)
    L_up = L if lb.exact else Fraction(2, 2 + D)
    forms = _ENTROPY_FORMS.get(tuple(dims.factors), {})
    expr = {
        "C_L+": forms.get("C_L+", _entropy_expr(upper_spectrum(L_up, D))),
        "C_L-": forms.get("C_L-", _entropy_expr(lower_spectrum(L, D))),
    }
    br = exact_critical_bracket(NEG_ENTROPY, dims)
    return TableEntry("C_S entropy", -br.upper, -br.lower, br.upper_source,
                      br.lower_source, tuple(sorted(expr.items())))


def table_document(dims: DimsLike) -> dict:
    dims = as_dims(dims)
    return {
        "dims": list(dims.factors),
        "entries": [e.to_dict() for e in threshold_table(dims)],
    }


def improved_family_point(t: Fraction, dims: DimsLike) -> list:
    """Exact spectrum of the improved family at ``t`` (for inspection)."""
    dims = as_dims(dims)
    return improved_family_spectrum(Fraction(t), l_constant(dims).fraction, dims.total)
