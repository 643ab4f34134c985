"""Reference closed forms of every functional, used as golden values.

Strings are parsed with :func:`hankelcert.exactalg.parse_poly` over the listed
variable tuples.  ``g``/``gc`` stand for gamma and its conjugate, ``e``/``ec``
for eta and its conjugate, ``r`` for rho.
"""

from __future__ import annotations

from fractions import Fraction

from .exactalg import MultiPoly, parse_poly

C_VARS = ("c1", "c2", "c3", "c4", "t")
GROUP_VARS = ("p", "g", "gc", "e", "ec", "t")
MAJ_VARS = ("p", "x", "y", "t")
G_VARS = ("p", "x", "t")
PX_VARS = ("p", "x")
PXU_VARS = ("p", "x", "u")

COEFF_FORMULAS = {
    "a2": "c1/2",
    "a3": "((1+t)*c1^2 + c2)/6",
    "a4": "((1+3*t)*c1^3 + (3+4*t)*c1*c2 + 2*c3)/24",
    "a5": "((1+6*t+3*t^2)*c1^4 + 2*(3+11*t)*c1^2*c2 + (3+6*t)*c2^2 + 4*(2+3*t)*c1*c3 + 6*c4)/120",
}

H2_TIMES_144 = "(4*t+1)*c1^2*c2 + 6*c1*c3 - 4*c2^2 - (4*t^2-t+1)*c1^4"

H3_TIMES_8640 = (
    "-(1-6*t+21*t^2+4*t^3)*c1^6 + 6*(1-3*t+10*t^2)*c1^4*c2 + (-4+72*t)*c2^3"
    " + 12*(1-3*t+12*t^2)*c1^3*c3 + 12*(3-8*t)*c1*c2*c3 - 60*c3^2 + 72*c2*c4"
    " - 3*c1^2*((7-8*t+56*t^2)*c2^2 + 12*(1-2*t)*c4)"
)

GROUPED = {
    "A1": (
        "-(1-6*t+21*t^2+4*t^3)*p^6 - 6*(1-3*t+10*t^2)*g*p^4*(-1+p^2)"
        " + 12*g^4*p^2*(-1+p^2)^2"
        " - 3*g^2*p^2*(-1+p^2)*(-7+3*p^2+8*t^2*(-7+p^2)+4*t*(2+p^2))"
        " - 4*g^3*(-1+p^2)*(-1-7*p^2-p^4+6*t*(3-2*p^2+2*p^4))"
    ),
    "B1": (
        "12*(-1+g*gc)*p*(-1+p^2)*((1-3*t+12*t^2)*p^2 + 2*g^2*(-1+p^2)"
        " + 3*g*(1+p^2) - 4*t*g*(2+p^2))"
    ),
    "C1": (
        "-12*(-1+g*gc)*(-1+p^2)*(5-5*p^2+5*g*gc*(-1+p^2)"
        " - 3*((1-2*t)*p^2+2*g*(-1+p^2))*gc)"
    ),
    "D1": "36*(-1+g*gc)*(-1+e*ec)*(-1+p^2)*((1-2*t)*p^2+2*g*(-1+p^2))",
}

LINEAR_Y_TERM = (
    "12*(1-x^2)*p*(1-p^2)*((1-3*t+12*t^2)*p^2 + 2*x^2*(1-p^2) + 3*x*(1+p^2) + 4*t*x*(2+p^2))"
)

_H_COMMON = (
    "(1-6*t+21*t^2+4*t^3)*p^6 + x*(6*(1-3*t+10*t^2)*p^4*(1-p^2))"
    " + x^2*(3*p^2*(1-p^2)*(7-3*p^2+8*t^2*(7-p^2)-4*t*(2+p^2)))"
    " + x^3*(4*(1-p^2)*(1+7*p^2+p^4+6*t*(3-2*p^2+2*p^4)))"
    " + x^4*(12*p^2*(-1+p^2)^2)"
)
_H_TAIL = (
    " + y^2*(12*(1-x^2)*(1-p^2)*(5*(1-x^2)*(1-p^2) + 3*((1-2*t)*p^2+2*x*(1-p^2))*x))"
    " + 36*(1-x^2)*(1-y^2)*(1-p^2)*((1-2*t)*p^2+2*x*(1-p^2))"
)
H_MAJORANT = _H_COMMON + " + y*(" + LINEAR_Y_TERM + ")" + _H_TAIL
H1_LIFTED = _H_COMMON + " + " + LINEAR_Y_TERM + _H_TAIL

G2_REFERENCE = (
    "p^6*(1-6*t+21*t^2+4*t^3) + 6*p^4*(1-p^2)*(1-3*t+10*t^2)*x"
    " + 3*p^2*(1-p^2)*(7-3*p^2-4*(2+p^2)*t+8*(7-p^2)*t^2)*x^2"
    " + 4*(1-p^2)*(1+7*p^2+p^4+6*(3-2*p^2+2*p^4)*t)*x^3 + 12*p^2*(-1+p^2)^2*x^4"
    " + 36*(1-p^2)*(p^2*(1-2*t)+2*(1-p^2)*x)*(1-x^2)"
    " + 12*p*(1-p^2)*(1-x^2)*(p^2*(1-3*t+12*t^2)+3*(1+p^2)*x+4*(2+p^2)*t*x+2*(1-p^2)*x^2)"
)

G0_EXTENDED = (
    "12*p^6*x^4-4*p^6*x^3+9*p^6*x^2-6*p^6*x+p^6-24*p^5*x^4+36*p^5*x^3"
    "+36*p^5*x^2-36*p^5*x-12*p^5-36*p^4*x^4+12*p^4*x^3-78*p^4*x^2"
    "-30*p^4*x+60*p^4+48*p^3*x^4-60*p^3*x^2+12*p^3+36*p^2*x^4-12*p^2*x^3"
    "+117*p^2*x^2+36*p^2*x-120*p^2-24*p*x^4-36*p*x^3+24*p*x^2+36*p*x"
    "-12*x^4+4*x^3-48*x^2+60"
)

GHALF_EXTENDED = (
    "12*p^6*x^4-28*p^6*x^3+21*p^6*x^2-12*p^6*x+15/4*p^6-24*p^5*x^4+60*p^5*x^3+54*p^5*x^2"
    "-60*p^5*x-30*p^5-36*p^4*x^4+24*p^4*x^3-120*p^4*x^2+12*p^4*x+60*p^4+48*p^3*x^4"
    "+24*p^3*x^3-78*p^3*x^2-24*p^3*x+30*p^3+36*p^2*x^4-36*p^2*x^3+147*p^2*x^2"
    "-120*p^2-24*p*x^4-84*p*x^3+24*p*x^2+84*p*x-12*x^4+40*x^3-48*x^2+60"
)

G2_OF_U_EXPANDED = (
    "1/2*p^6*u^3+6*p^6*u^2*x^2-15*p^6*u^2*x+21/4*p^6*u^2-24*p^6*u*x^3+6*p^6*u*x^2+9*p^6*u*x"
    "-3*p^6*u+12*p^6*x^4-4*p^6*x^3+9*p^6*x^2-6*p^6*x+p^6+36*p^5*u^2*x^2-36*p^5*u^2"
    "+24*p^5*u*x^3-18*p^5*u*x^2-24*p^5*u*x+18*p^5*u-24*p^5*x^4+36*p^5*x^3+36*p^5*x^2"
    "-36*p^5*x-12*p^5-48*p^4*u^2*x^2+15*p^4*u^2*x+48*p^4*u*x^3-30*p^4*u*x^2-9*p^4*u*x"
    "+36*p^4*u-24*p^4*x^4-96*p^4*x^3+6*p^4*x^2+78*p^4*x-36*p^4-36*p^3*u^2*x^2"
    "+36*p^3*u^2+24*p^3*u*x^3+18*p^3*u*x^2-24*p^3*u*x-18*p^3*u+48*p^3*x^4-60*p^3*x^2"
    "+12*p^3+42*p^2*u^2*x^2-60*p^2*u*x^3+24*p^2*u*x^2-36*p^2*u+12*p^2*x^4+168*p^2*x^3"
    "-15*p^2*x^2-144*p^2*x+36*p^2-48*p*u*x^3+48*p*u*x-24*p*x^4-36*p*x^3+24*p*x^2"
    "+36*p*x+36*u*x^3-68*x^3+72*x"
)

D2G1_DT2 = (
    "6*p^2*(4*p^4*t+8*p^4*x^2-20*p^4*x+7*p^4+48*p^3*x^2-48*p^3-64*p^2*x^2"
    "+20*p^2*x-48*p*x^2+48*p+56*x^2)"
)
D2G1_BRACKET_PARTS = (
    "8*(p-1)^2*(p+1)*(p+7)*x^2",
    "20*p^2*(1-p^2)*x",
    "p*(4*p^3*t+7*p^3-48*p^2+48)",
)

# H2 reduction, variables (x, y, t)
F1_VARS = ("x", "y", "t")
F1 = "(4*t^2-t+1)*x^4 + (4*t+1)*x^2*(1-x^2)*y + (1-x^2)*(4+2*x^2-6*x)*y^2 + 6*x*(1-x^2)"
F1_PRIME = "(4*t+1)*x^2*(1-x^2) + 2*(1-x^2)*(4+2*x^2-6*x)*y"
PSI_VARS = ("s", "t")
PSI = "4 + (4*t-1)*s + (4*t^2-5*t-2)*s^2"

# Taylor coefficients for w(z) = z (x - z)/(1 - x z), variables (x, t)
BLASCHKE_VARS = ("x", "t")
BLASCHKE_TAYLOR = {
    "a2": "x/2",
    "a3": "((2+t)*x^2-1)/6",
    "a4": "x*((6+7*t)*x^2-(5+4*t))/24",
}

# Hand ledgers of the Q11 endgame: residual quadratic (alpha, beta, delta) before
# and after the AM-GM step.  Commentary only; the engine derives its own.
DOMINATION_LEDGERS = {
    "g0": {
        "before_amgm": (Fraction(-96), Fraction(-47), Fraction(42)),
        "lambda": Fraction(1, 2),
        "final": (Fraction(-75), Fraction(-26)),
    },
    "ghalf": {
        "before_amgm": (Fraction(-97), Fraction(-38), Fraction(90)),
        "lambda": Fraction(2, 3),
        "final": (Fraction(-37), Fraction(-17, 4)),
    },
}


def golden_poly(expr: str, variables: tuple[str, ...]) -> MultiPoly:
    return parse_poly(expr, variables)
