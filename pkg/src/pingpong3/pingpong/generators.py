"""The commuting diagonal generators and their affine-chart ratios.

The rank-2 factor is generated by two diagonal matrices a, b of determinant
one.  What the exclusion argument consumes is not the entries but the chart
ratios

    alpha = (a_00 / a_22, a_11 / a_22),    beta = (b_00 / b_22, b_11 / b_22):

acting on the affine chart z = 1, a^m b^n scales the x-coordinate by
alpha_1^m beta_1^n and the y-coordinate by alpha_2^m beta_2^n.  The standard
profile-(s, s') pair is

    a = diag(u^2s, u^-s, u^-s)^P,   b = diag(u^-s', u^2s', u^-s')^P,

with P = q(q - 1), so that every ratio is a power of u whose exponent is a
positive multiple of p = q: alpha = (u^3sP, 1) and beta = (1, u^3s'P).
Raising to the q-th power makes unit parts of ratios land in 1 + um
automatically (Frobenius kills first-order terms), and the extra (q - 1)
forces residue digits to 1; both are preconditions the exclusion cases
verify rather than assume, so arbitrary diagonal pairs are accepted here.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..field import Laurent
from ..linalg import Mat

# general inverses of non-monomial diagonal entries carry this tail length
RATIO_PRECISION = 32


def _ratio(x, y):
    """x / y, exact for monomials, else correct modulo u^RATIO_PRECISION."""
    if y.is_monomial():
        return x * y.inv(0)
    return x * y.inv(RATIO_PRECISION + abs(y.lead))


@dataclass(frozen=True)
class DiagPair:
    """Two diagonal determinant-one matrices plus their chart ratios."""

    a: Mat
    b: Mat
    a_ratios: tuple
    b_ratios: tuple

    @property
    def q(self):
        return self.a.q

    @property
    def a_stretch(self):
        """val(alpha_1): how fast a^m separates the x-coordinate."""
        return self.a_ratios[0].val()

    @property
    def b_stretch(self):
        """val(beta_2): how fast b^n separates the y-coordinate."""
        return self.b_ratios[1].val()

    def gamma(self, m, n):
        """The element a^m b^n (exact for monomial diagonals)."""
        return (self.a ** m) * (self.b ** n)


def _check_diagonal_det_one(mat, name):
    zero_ok = all(
        mat.rows[i][j].is_exact_zero
        for i in range(3)
        for j in range(3)
        if i != j
    )
    if not zero_ok:
        raise ValueError(f"{name} must be diagonal")
    one = Laurent(mat.q, 0, (1,))
    if not (mat.det() == one):
        raise ValueError(f"{name} must have determinant exactly 1")


def make_pair(a, b):
    """Package two diagonal SL_3 elements with their chart ratios."""
    _check_diagonal_det_one(a, "a")
    _check_diagonal_det_one(b, "b")
    if a.q != b.q:
        raise ValueError("mixed residue fields")
    a_ratios = (_ratio(a.rows[0][0], a.rows[2][2]), _ratio(a.rows[1][1], a.rows[2][2]))
    b_ratios = (_ratio(b.rows[0][0], b.rows[2][2]), _ratio(b.rows[1][1], b.rows[2][2]))
    return DiagPair(a, b, a_ratios, b_ratios)


def make_generators(q, profile=(1, 1)):
    """The standard commuting pair for the given (s, s') profile."""
    s, s_prime = profile
    if s < 1 or s_prime < 1:
        raise ValueError("profile exponents must be positive")
    p_exp = q * (q - 1)
    u = lambda e: Laurent(q, e, (1,))
    a = Mat.diagonal([u(2 * s * p_exp), u(-s * p_exp), u(-s * p_exp)])
    b = Mat.diagonal([u(-s_prime * p_exp), u(2 * s_prime * p_exp), u(-s_prime * p_exp)])
    return make_pair(a, b)
