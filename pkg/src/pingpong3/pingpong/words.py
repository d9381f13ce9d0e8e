"""Survey of all short reduced words of the free product.

The verified group is generated by the diagonal pair (rank two, written
multiplicatively as a^m b^n) and the cyclic subgroup of c = g^R', where R'
is the syllable power from the constants.  A reduced word is an alternating
product of nontrivial syllables

    w = s_1 s_2 ... s_k,   s_i = a^m b^n  (|m| + |n| >= 1)  or  c^r  (r != 0),

no two consecutive syllables from the same factor.  Its length is the free
product word length: |a^m b^n| = |m| + |n| and |c^r| = |r|, summed over the
syllables.  For every word up to a length bound the survey records

  (a) the word is not the identity matrix,
  (b) log_q ||w|| + log_q ||w^-1||  >=  alpha |w| - c_total,
  (c) max(log_q ||w||, log_q ||w^-1||)  >=  (alpha |w| - c_total) / 2,

where (c) is the sup-norm of the Cartan projection: for determinant-one
matrices mu_1 = lognorm(w) and mu_3 = -lognorm(w^-1), so
||mu(w)|| = max(mu_1, -mu_3).  (The identity mu_1 - mu_3 =
lognorm(w) + lognorm(w^-1) is tested against the minor-based Cartan oracle
separately.)

Every word is an exact Laurent polynomial matrix, so the survey runs on
plain integer digit planes: a matrix is (lead, arr) with arr of shape
(3, 3, D) holding base-q digits of each entry starting at exponent
``lead``.  Products are 27 digit convolutions mod q; the depth-first walk
down the alternation tree reuses each prefix product (and prefix inverse
product) for all of its extensions.  Inverses stay exact because every
syllable has determinant one, so the inverse of a syllable is its
adjugate.  Exact Mat arithmetic remains the reference semantics; tests
replay sampled words through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..field import Laurent
from ..linalg import Mat

__all__ = ["WordRecord", "WordSurvey", "word_survey"]

_EYE = np.eye(3, dtype=np.int64)


# -- digit-plane matrices ----------------------------------------------------


def _trim(lead, arr):
    """Drop all-zero leading and trailing digit planes."""
    nz = np.flatnonzero(arr.reshape(9, -1).any(axis=0))
    if nz.size == 0:
        raise ValueError("word evaluation produced a zero matrix")
    return lead + int(nz[0]), np.ascontiguousarray(arr[:, :, nz[0] : nz[-1] + 1])


def _digit_planes(mat):
    """An exact Mat as (lead, int64 digit array of shape (3, 3, D))."""
    if not mat.exact:
        raise ValueError("word evaluation requires exact matrices")
    entries = [x for r in mat.rows for x in r if not x.is_exact_zero]
    if not entries:
        raise ValueError("word evaluation requires an invertible matrix")
    lead = min(x.lead for x in entries)
    width = max(x.lead + len(x.digits) for x in entries) - lead
    arr = np.zeros((3, 3, width), dtype=np.int64)
    for i, row in enumerate(mat.rows):
        for j, x in enumerate(row):
            if not x.is_exact_zero:
                arr[i, j, x.lead - lead : x.lead - lead + len(x.digits)] = x.digits
    return _trim(lead, arr)


def _mul(q, a, b):
    """Digit-plane matrix product, exact mod q."""
    la, aa = a
    lb, bb = b
    out = np.zeros((3, 3, aa.shape[2] + bb.shape[2] - 1), dtype=np.int64)
    for i in range(3):
        for k in range(3):
            left = aa[i, k]
            if not left.any():
                continue
            for j in range(3):
                right = bb[k, j]
                if right.any():
                    out[i, j, : left.size + right.size - 1] += np.convolve(left, right)
    out %= q
    return _trim(la + lb, out)


def _power(q, pm, e):
    result = (0, _EYE[:, :, None].copy())
    base = pm
    while e:
        if e & 1:
            result = _mul(q, result, base)
        base = _mul(q, base, base)
        e >>= 1
    return result


def _is_identity(pm):
    lead, arr = pm
    return lead == 0 and arr.shape[2] == 1 and np.array_equal(arr[:, :, 0], _EYE)


# -- syllable tables ---------------------------------------------------------


def _exponent_label(symbol, e):
    return symbol if e == 1 else f"{symbol}^{e}"


def _diag_label(m, n):
    parts = []
    if m:
        parts.append(_exponent_label("a", m))
    if n:
        parts.append(_exponent_label("b", n))
    return " ".join(parts)


def _diagonal_syllables(pair, bound):
    """(label, weight, planes, inverse planes), ordered by (weight, m, n)."""
    out = []
    for weight in range(1, bound + 1):
        for m in range(-weight, weight + 1):
            rest = weight - abs(m)
            for n in sorted({-rest, rest}):
                if (m, n) == (0, 0):
                    continue
                out.append(
                    (
                        _diag_label(m, n),
                        weight,
                        _digit_planes(pair.gamma(m, n)),
                        _digit_planes(pair.gamma(-m, -n)),
                    )
                )
    return out


def _cyclic_syllables(q, g, r_prime, bound):
    """(label, weight, planes, inverse planes) for c^r, c = g^r_prime."""
    one = Laurent(q, 0, (1,))
    if not (g.exact and g.det() == one):
        raise ValueError("the cyclic generator must be exact with determinant 1")
    c = _power(q, _digit_planes(g), r_prime)
    c_inv = _power(q, _digit_planes(g.adjugate()), r_prime)
    plus = [c]
    minus = [c_inv]
    for _ in range(bound - 1):
        plus.append(_mul(q, plus[-1], c))
        minus.append(_mul(q, minus[-1], c_inv))
    out = []
    for weight in range(1, bound + 1):
        for r in (-weight, weight):
            mat = minus[weight - 1] if r < 0 else plus[weight - 1]
            inv = plus[weight - 1] if r < 0 else minus[weight - 1]
            out.append((_exponent_label("c", r), weight, mat, inv))
    return out


# -- survey -------------------------------------------------------------------


@dataclass(frozen=True)
class WordRecord:
    """One surveyed word: its size data and the two margin checks."""

    label: str
    length: int
    syllables: int
    lognorm: int
    lognorm_inv: int
    growth_margin: Fraction
    cartan_margin: Fraction
    is_identity: bool


@dataclass
class WordSurvey:
    """Aggregates over all surveyed words; ``passed`` means zero violations."""

    q: int
    bound: int
    r_prime: int
    alpha: Fraction
    c_total: int
    words: int = 0
    min_growth_margin: Fraction | None = None
    min_cartan_margin: Fraction | None = None
    tightest_word: str | None = None
    by_length: dict = field(default_factory=dict)
    violation_counts: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    MAX_EXAMPLES = 20

    @property
    def total_violations(self):
        return sum(self.violation_counts.values())

    @property
    def passed(self):
        return self.total_violations == 0

    def add_violation(self, kind, label, detail=""):
        self.violation_counts[kind] = self.violation_counts.get(kind, 0) + 1
        if len(self.examples) < self.MAX_EXAMPLES:
            self.examples.append(f"{kind}: {label}" + (f" ({detail})" if detail else ""))

    def record(self, rec):
        self.words += 1
        self.by_length[rec.length] = self.by_length.get(rec.length, 0) + 1
        if rec.is_identity:
            self.add_violation("identity", rec.label)
        if rec.growth_margin < 0:
            self.add_violation("growth", rec.label, f"margin {rec.growth_margin}")
        if rec.cartan_margin < 0:
            self.add_violation("cartan", rec.label, f"margin {rec.cartan_margin}")
        if self.min_growth_margin is None or rec.growth_margin < self.min_growth_margin:
            self.min_growth_margin = rec.growth_margin
            self.tightest_word = rec.label
        if self.min_cartan_margin is None or rec.cartan_margin < self.min_cartan_margin:
            self.min_cartan_margin = rec.cartan_margin

    def summary(self):
        verdict = (
            "PASS" if self.passed else f"FAIL ({self.total_violations} violations)"
        )
        lines = [
            f"word survey to length {self.bound} (c = g^{self.r_prime}): {verdict}",
            f"  words {self.words}, min growth margin {self.min_growth_margin}"
            f" (at '{self.tightest_word}'), min cartan margin {self.min_cartan_margin}",
        ]
        for kind, count in sorted(self.violation_counts.items()):
            lines.append(f"  {kind}: {count}")
        lines.extend(f"    {text}" for text in self.examples)
        return "\n".join(lines)

    def as_dict(self):
        return {
            "q": self.q,
            "bound": self.bound,
            "r_prime": self.r_prime,
            "alpha": str(self.alpha),
            "c_total": self.c_total,
            "words": self.words,
            "by_length": {str(k): v for k, v in sorted(self.by_length.items())},
            "min_growth_margin": str(self.min_growth_margin),
            "min_cartan_margin": str(self.min_cartan_margin),
            "tightest_word": self.tightest_word,
            "violations": dict(sorted(self.violation_counts.items())),
            "passed": self.passed,
        }


def word_survey(pair, g, bound, constants, sink=None):
    """Check every nonempty reduced word of length <= bound.

    ``constants`` supplies alpha, c_total and r_prime.  The walk is
    depth-first in a fixed syllable order, so the survey (and any table
    written through ``sink``) is deterministic.  ``sink``, when given, is
    called with each WordRecord in that order.
    """
    if bound < 1:
        raise ValueError("the word length bound must be at least 1")
    q = pair.q
    alpha = Fraction(constants.alpha)
    c_total = constants.c_total
    survey = WordSurvey(
        q=q,
        bound=bound,
        r_prime=constants.r_prime,
        alpha=alpha,
        c_total=c_total,
    )
    tables = (
        _diagonal_syllables(pair, bound),
        _cyclic_syllables(q, g, constants.r_prime, bound),
    )

    def emit(label_parts, length, syllables, w, w_inv):
        lognorm = -w[0]
        lognorm_inv = -w_inv[0]
        required = alpha * length - c_total
        rec = WordRecord(
            label=" ".join(label_parts),
            length=length,
            syllables=syllables,
            lognorm=lognorm,
            lognorm_inv=lognorm_inv,
            growth_margin=lognorm + lognorm_inv - required,
            cartan_margin=max(lognorm, lognorm_inv) - required / 2,
            is_identity=_is_identity(w),
        )
        survey.record(rec)
        if sink is not None:
            sink(rec)

    def walk(prefix, prefix_inv, label_parts, length, syllables, last):
        for kind, table in enumerate(tables):
            if kind == last:
                continue
            for label, weight, planes, planes_inv in table:
                if length + weight > bound:
                    continue
                w = _mul(q, prefix, planes)
                w_inv = _mul(q, planes_inv, prefix_inv)
                parts = label_parts + [label]
                emit(parts, length + weight, syllables + 1, w, w_inv)
                walk(w, w_inv, parts, length + weight, syllables + 1, kind)

    identity = (0, _EYE[:, :, None].copy())
    walk(identity, identity, [], 0, 0, None)
    return survey
