"""Fixed-flag witness for irreducibility of the generated group.

A separated diagonal pair fixes exactly three points of the projective
plane -- the coordinate points -- and, dually, exactly the three coordinate
planes.  Any subspace invariant under the whole group is in particular
invariant under the pair, hence spanned by coordinate flags; so if the
extra generator g fixes none of the six, the group generated by the pair
and g leaves no proper subspace invariant and the standard representation
restricted to it is irreducible.

Everything is decided by exact matrix action: g fixes the i-th coordinate
point iff the i-th column of g is supported on the diagonal, and preserves
the plane spanned by the other two coordinates iff the i-th row is.
"""

from __future__ import annotations

__all__ = ["irreducibility_witness"]


def _require_separating(pair):
    """The pair must split every coordinate pair, or the fixed-point set of
    the diagonal subgroup is larger than the three coordinate points."""
    a, b = pair.a, pair.b
    for i in range(3):
        for j in range(i + 1, 3):
            if a.rows[i][i] == a.rows[j][j] and b.rows[i][i] == b.rows[j][j]:
                raise ValueError(
                    f"the diagonal pair does not separate coordinates {i} and {j}; "
                    "its fixed flags are not just the coordinate ones"
                )


def irreducibility_witness(pair, g):
    """True iff g fixes no coordinate point and no coordinate plane."""
    if not g.exact:
        raise ValueError("the irreducibility witness needs an exact matrix")
    _require_separating(pair)
    for i in range(3):
        if all(g.rows[k][i].is_exact_zero for k in range(3) if k != i):
            return False  # the i-th coordinate point is fixed
        if all(g.rows[i][k].is_exact_zero for k in range(3) if k != i):
            return False  # the plane spanned by the other two is preserved
    return True
