"""Exhaustive residue-ball verification of the two ping-pong moves.

The free product sits on two inclusions over the level-M ball partition of
the projective plane:

* C1 sweep: every ball whose representative avoids the window U and both
  slope-u cones must be sent into U by every nonzero power of g.  The
  powers +1 and -1 are checked concretely (window membership, refined
  image level, norm loss within the epsilon budget); all higher powers
  follow from a per-ball certificate: in eigencoordinates the dominant
  coefficient is pinned exactly by the representative, the others are
  floored, and the eigenvalue gaps only widen with the power.
* C2 sweep: every ball inside U, hit by every nontrivial a^m b^n with
  |m|, |n| <= gamma_bound, must land outside U and outside both cones,
  with the exact ultrametric norm identity (theta-exactness).

Everything runs on integer digit arrays in bulk: a chunk of balls is an
(n, 3, M) array of base-q digits, matrix action is shift-and-add mod q,
the window test reads two digit columns, and the cone test compares
first-nonzero positions of cross-product digit rows.  Verdicts transfer
from representatives to whole balls only where a perturbation bound says
they must -- those bounds are themselves checked per ball and reported as
violations when they fail, never assumed.  The scalar predicates in
projgeom stay the reference semantics; the tests cross-check both routes
on samples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import (
    InsufficientLevel,
    InsufficientPrecision,
    NotSimpleSegment,
    SingularOrUndecidable,
)
from ..linalg import vec_min_val
from ..projgeom import in_unit_window
from ..spectral import eigen_flags

CHUNK = 1 << 16
_EXAMPLE_CAP = 8


# -- exact digit windows ----------------------------------------------------


def _digit_row(x, start, stop):
    """Digits of ``x`` at u^start .. u^(stop-1) as an int16 row.

    Raises InsufficientPrecision when the window is not fully known.
    """
    if not x.exact and x.known_to < stop:
        raise InsufficientPrecision(
            f"need digits up to u^{stop}, element known to u^{x.known_to}"
        )
    row = np.zeros(stop - start, dtype=np.int16)
    for k, d in enumerate(x.digits):
        p = x.lead + k
        if start <= p < stop:
            row[p - start] = d
    return row


def _taps(x, start, stop):
    """(position, digit) pairs of ``x`` inside the window, for shift-adds."""
    row = _digit_row(x, start, stop)
    return [(start + int(p), int(row[p])) for p in np.nonzero(row)[0]]


def _support(mat):
    """Smallest [lo, hi) covering every digit of the exact matrix."""
    lo = hi = None
    for r in mat.rows:
        for e in r:
            if e.is_exact_zero:
                continue
            if lo is None or e.lead < lo:
                lo = e.lead
            end = e.lead + len(e.digits)
            if hi is None or end > hi:
                hi = end
    return lo, hi


def _first_nonzero(arr, none_value):
    """Per-row position of the first nonzero entry (none_value if none)."""
    nz = arr != 0
    idx = np.argmax(nz, axis=1).astype(np.int64)
    idx[~nz.any(axis=1)] = none_value
    return idx


# -- ball enumeration in bulk ------------------------------------------------


def _decode(q, sel, width):
    """Digit rows of the flat indices ``sel``, first digit most significant
    (the lexicographic order of itertools.product(range(q), repeat=width))."""
    out = np.empty((sel.size, width), dtype=np.int8)
    for j in range(width):
        out[:, j] = (sel // q ** (width - 1 - j)) % q
    return out


def _ball_chunks(q, level, chunk):
    """Yield (stratum, reps) blocks covering the level-M partition.

    Mirrors the deterministic order of projgeom.enumerate_balls: pivot z
    (x, y free), pivot y (x free, z in uO), pivot x (y, z in uO).  ``reps``
    is (n, 3, level) int8 in coordinate order x, y, z.
    """
    one = np.zeros(level, dtype=np.int8)
    one[0] = 1
    free = q**level
    sub = q ** (level - 1)

    def blocks(total):
        for lo in range(0, total, chunk):
            yield np.arange(lo, min(lo + chunk, total), dtype=np.int64)

    for idx in blocks(free * free):
        reps = np.empty((idx.size, 3, level), dtype=np.int8)
        reps[:, 0] = _decode(q, idx // free, level)
        reps[:, 1] = _decode(q, idx % free, level)
        reps[:, 2] = one
        yield 2, reps
    for idx in blocks(free * sub):
        reps = np.zeros((idx.size, 3, level), dtype=np.int8)
        reps[:, 0] = _decode(q, idx // sub, level)
        reps[:, 1] = one
        reps[:, 2, 1:] = _decode(q, idx % sub, level - 1)
        yield 1, reps
    for idx in blocks(sub * sub):
        reps = np.zeros((idx.size, 3, level), dtype=np.int8)
        reps[:, 0] = one
        reps[:, 1, 1:] = _decode(q, idx // sub, level - 1)
        reps[:, 2, 1:] = _decode(q, idx % sub, level - 1)
        yield 0, reps


def _text(level, reps, row):
    groups = ("".join(str(int(d)) for d in reps[row, c]) for c in range(3))
    return f"{level}:" + "/".join(groups)


# -- bulk predicates ---------------------------------------------------------


def _window_mask(img, vm_col):
    """Pairwise digit agreement at columns vm, vm+1 (the level-2 window)."""
    gather = vm_col[:, None, None] + np.arange(2)[None, None, :]
    cols = np.take_along_axis(img, gather, axis=2)
    return (
        (cols[:, 0] == cols[:, 1]).all(axis=1)
        & (cols[:, 0] == cols[:, 2]).all(axis=1)
        & (cols[:, 1] == cols[:, 2]).all(axis=1)
    )


class _ConeTest:
    """Bulk form of in_slope_u_cone against a fixed apex.

    The apex digits are exact on [0, depth), so cross-product digit rows
    are trusted on columns [0, depth) only; a verdict that would need
    digits at or beyond the horizon raises InsufficientPrecision.
    ``verdicts`` returns (in_cone, val_n1, val_comb) with the two
    valuations as column indices (depth meaning "at least depth").  Rows
    marked ``ignore`` may stay undecided without raising -- the caller
    uses that for balls it excludes on other grounds (the apex's own
    window ball has an identically zero cross product).
    """

    def __init__(self, q, apex, depth):
        self.q = q
        self.depth = depth
        self.taps = [_taps(c, 0, depth) for c in apex]

    def verdicts(self, img, ignore=None):
        n, _, w = img.shape
        d = self.depth
        n0 = np.zeros((n, d + w), dtype=np.int32)
        n1 = np.zeros((n, d + w), dtype=np.int32)
        # cross(apex, y): n0 = a1 y2 - a2 y1, n1 = a2 y0 - a0 y2
        for pos, dig in self.taps[1]:
            n0[:, pos : pos + w] += dig * img[:, 2]
        for pos, dig in self.taps[2]:
            n0[:, pos : pos + w] -= dig * img[:, 1]
            n1[:, pos : pos + w] += dig * img[:, 0]
        for pos, dig in self.taps[0]:
            n1[:, pos : pos + w] -= dig * img[:, 2]
        n0 = n0[:, :d] % self.q
        n1 = n1[:, :d] % self.q
        # slope congruent to u: val(n0 + u n1) >= val(n1) + 2 (the sign the
        # scalar route puts on -n0 - u*n1 does not move valuations)
        comb = n0
        comb[:, 1:] += n1[:, :-1]
        comb %= self.q
        v1 = _first_nonzero(n1, d)
        vc = _first_nonzero(comb, d)
        undecided = (vc >= d) & (v1 >= d - 1)
        if ignore is not None:
            undecided &= ~ignore
        if undecided.any():
            raise InsufficientPrecision(
                "cone verdict ran past the apex digit horizon; raise the depth"
            )
        return vc >= v1 + 2, v1, vc


# -- report ------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    kind: str
    element: str
    ball: str
    detail: str = ""

    def __str__(self):
        tail = f" ({self.detail})" if self.detail else ""
        return f"{self.kind}: {self.element} on {self.ball}{tail}"


@dataclass
class PingPongReport:
    """Outcome of the exhaustive sweep; ``passed`` means zero violations."""

    q: int
    level: int
    gamma_bound: int
    epsilon_exponent: int = 0
    domain_balls: int = 0
    window_balls: int = 0
    gamma_elements: int = 0
    checked_images: int = 0
    min_growth_margin: int | None = None
    min_cert_slack: int | None = None
    min_image_level: int | None = None
    violation_counts: dict = field(default_factory=dict)
    examples: list = field(default_factory=list)

    MAX_EXAMPLES = 20

    @property
    def total_violations(self):
        return sum(self.violation_counts.values())

    @property
    def passed(self):
        return self.total_violations == 0

    def add_violation(self, kind, element, ball, detail=""):
        self.violation_counts[kind] = self.violation_counts.get(kind, 0) + 1
        if len(self.examples) < self.MAX_EXAMPLES:
            self.examples.append(Violation(kind, element, ball, detail))

    def merge_min(self, name, value):
        old = getattr(self, name)
        if old is None or value < old:
            setattr(self, name, int(value))

    def summary(self):
        verdict = (
            "PASS" if self.passed else f"FAIL ({self.total_violations} violations)"
        )
        lines = [
            f"level {self.level} sweep, gamma bound {self.gamma_bound}: {verdict}",
            f"  domain balls {self.domain_balls}, window balls {self.window_balls}, "
            f"gamma elements {self.gamma_elements}, images checked {self.checked_images}",
            f"  growth margin slack >= {self.min_growth_margin}, "
            f"certificate slack >= {self.min_cert_slack}, "
            f"image level >= {self.min_image_level}",
        ]
        for kind, count in sorted(self.violation_counts.items()):
            lines.append(f"  {kind}: {count}")
        lines.extend(f"    {v}" for v in self.examples)
        return "\n".join(lines)

    def as_dict(self):
        return {
            "q": self.q,
            "level": self.level,
            "gamma_bound": self.gamma_bound,
            "epsilon_exponent": self.epsilon_exponent,
            "domain_balls": self.domain_balls,
            "window_balls": self.window_balls,
            "gamma_elements": self.gamma_elements,
            "checked_images": self.checked_images,
            "min_growth_margin": self.min_growth_margin,
            "min_cert_slack": self.min_cert_slack,
            "min_image_level": self.min_image_level,
            "violations": dict(sorted(self.violation_counts.items())),
            "passed": self.passed,
        }


def _flag(report, kind, element, mask, text_fn, detail_fn=None):
    rows = np.nonzero(mask)[0]
    if rows.size == 0:
        return
    for r in rows[:_EXAMPLE_CAP]:
        detail = detail_fn(int(r)) if detail_fn else ""
        report.add_violation(kind, element, text_fn(int(r)), detail)
    extra = int(rows.size) - min(_EXAMPLE_CAP, int(rows.size))
    if extra:
        report.violation_counts[kind] += extra


# -- the verifier ------------------------------------------------------------


def _epsilon_budget(eigen):
    """Worst-case norm-loss exponent of the conjugated action (the theta'
    budget): dominant-coordinate cap plus both change-of-basis norms."""
    basis = eigen.basis
    adj = basis.adjugate()
    val_det = basis.det().val()
    r = max(vec_min_val(adj.rows[0]), vec_min_val(adj.rows[2]))
    return (2 + r - val_det) + basis.lognorm() + 2 * (val_det - adj.min_val())


def _gamma_table(pair, gamma_bound):
    """Diagonal valuation triples of every nontrivial a^m b^n in the box."""
    table = []
    for m in range(-gamma_bound, gamma_bound + 1):
        for n in range(-gamma_bound, gamma_bound + 1):
            if m == 0 and n == 0:
                continue
            gamma = pair.gamma(m, n)
            vals = []
            for i in range(3):
                for j in range(3):
                    e = gamma.rows[i][j]
                    if i == j:
                        if not (e.is_monomial() and e.digits[0] == 1):
                            raise ValueError(
                                "gamma sweep needs monic monomial diagonals"
                            )
                        vals.append(int(e.val()))
                    elif not e.is_exact_zero:
                        raise ValueError("gamma sweep needs diagonal elements")
            table.append((f"a^{m} b^{n}", vals))
    return table


def verify_pingpong(pair, g, level, gamma_bound, eigen=None, epsilon_exponent=None):
    """Sweep every level-M ball and check both ping-pong inclusions.

    ``g`` generates the cyclic factor (the pipeline passes the already
    powered element); ``pair`` the rank-two diagonal factor.  Returns a
    PingPongReport.  Raises InsufficientLevel only for globally infeasible
    levels; every data-dependent failure is a reported violation.
    """
    q = pair.q
    if level < 3:
        raise InsufficientLevel(
            "sweep levels below 3 cannot transfer cone verdicts to balls"
        )
    if not g.exact:
        raise ValueError("the cyclic generator must be exact")
    report = PingPongReport(q, level, gamma_bound)

    # a non-proximal or misplaced g is a reported failure, not a crash
    if eigen is None:
        try:
            eigen = eigen_flags(g, precision=2 * level + 24)
        except (NotSimpleSegment, SingularOrUndecidable, InsufficientPrecision) as e:
            report.add_violation("not-proximal", "g", "-", str(e))
            return report
    apex_plus, apex_minus = eigen.vectors[0], eigen.vectors[2]
    for label, apex in (("attracting", apex_plus), ("repelling", apex_minus)):
        if in_unit_window(apex) is not True:
            report.add_violation(
                "flags-out-of-position", "g", "-", f"{label} point not in the window"
            )
    if not report.passed:
        return report

    if epsilon_exponent is None:
        epsilon_exponent = _epsilon_budget(eigen)
    report.epsilon_exponent = int(epsilon_exponent)

    w1, w2, w3 = eigen.valuations
    basis = eigen.basis
    adj = basis.adjugate()
    vm_adj = adj.min_val()
    r_plus = vec_min_val(adj.rows[0])
    r_minus = vec_min_val(adj.rows[2])
    floor_cap = level + vm_adj  # dot digits from here on are ball-dependent
    if floor_cap <= 2 + max(r_plus, r_minus):
        raise InsufficientLevel(
            f"level {level} cannot pin dominant eigencoordinates "
            f"(cap {floor_cap} vs margin bound {2 + max(r_plus, r_minus)})"
        )

    g_inv = g.inverse()
    if not g_inv.exact:
        raise ValueError("the cyclic generator must have an exact inverse")
    sides = []
    for label, mat in (("g", g), ("g^-1", g_inv)):
        lo, hi = _support(mat)
        sides.append(
            dict(
                label=label,
                lead=lo,
                width=hi - lo + level - 1,
                taps=[
                    [_taps(mat.rows[i][j], lo, hi) for j in range(3)] for i in range(3)
                ],
                lognorm=mat.lognorm(),
                lognorm_compound=mat.second_compound().lognorm(),
            )
        )

    depth = level + 8
    cones = (_ConeTest(q, apex_plus, depth), _ConeTest(q, apex_minus, depth))

    dot_stop = floor_cap + 2
    adj_taps = [
        [_taps(adj.rows[i][j], vm_adj, dot_stop) for j in range(3)] for i in range(3)
    ]

    window_chunks = []
    for stratum, reps in _ball_chunks(q, level, CHUNK):
        n = reps.shape[0]
        texts = lambda r: _text(level, reps, r)  # noqa: E731

        if stratum == 2:
            in_u = (
                (reps[:, 0, 0] == 1)
                & (reps[:, 0, 1] == 0)
                & (reps[:, 1, 0] == 1)
                & (reps[:, 1, 1] == 0)
            )
            if in_u.any():
                window_chunks.append(reps[in_u].copy())
        else:
            in_u = np.zeros(n, dtype=bool)

        in_cone = np.zeros(n, dtype=bool)
        for cone, side_name in zip(cones, ("+", "-")):
            verdict, v1, vc = cone.verdicts(reps, ignore=in_u)
            in_cone |= verdict
            # verdicts must be constant on each non-window ball (window
            # balls leave the domain regardless): perturbations enter the
            # cross product at column >= level
            _flag(
                report,
                "cone-transfer",
                f"cone{side_name}",
                ~in_u
                & (
                    (verdict & ((v1 + 2 > level) | (v1 >= depth)))
                    | (~verdict & (vc + 1 > level))
                ),
                texts,
                lambda r, v1=v1, vc=vc: f"v1 {int(v1[r])}, vcomb {int(vc[r])}",
            )

        domain = ~in_u & ~in_cone
        report.domain_balls += int(domain.sum())
        dom = reps[domain]
        m = dom.shape[0]
        if m == 0:
            continue
        dom_texts = lambda r: _text(level, dom, r)  # noqa: E731

        # eigencoordinate valuations VAL_i = val(adj_i . y), trusted up to
        # dot_stop; beyond floor_cap they are ball-dependent, so floor them
        vals = []
        for i in range(3):
            acc = np.zeros((m, dot_stop - vm_adj + level), dtype=np.int32)
            for j in range(3):
                for pos, dig in adj_taps[i][j]:
                    col = pos - vm_adj
                    acc[:, col : col + level] += dig * dom[:, j]
            acc %= q
            vals.append(
                _first_nonzero(acc[:, : dot_stop - vm_adj], dot_stop - vm_adj) + vm_adj
            )
        val1, val2, val3 = vals
        f1 = np.minimum(val1, floor_cap)
        f2 = np.minimum(val2, floor_cap)
        f3 = np.minimum(val3, floor_cap)

        # outside the cones the outer eigencoordinates must stay large;
        # these margins carry the uniform norm-loss budget to all powers
        _flag(
            report,
            "margin",
            "adj row +",
            val1 > 2 + r_plus,
            dom_texts,
            lambda r: f"val {int(val1[r])} > {2 + r_plus}",
        )
        _flag(
            report,
            "margin",
            "adj row -",
            val3 > 2 + r_minus,
            dom_texts,
            lambda r: f"val {int(val3[r])} > {2 + r_minus}",
        )
        margin = np.minimum((2 + r_plus) - val1, (2 + r_minus) - val3)
        report.merge_min("min_growth_margin", margin.min())

        # power certificates: the dominant coordinate is pinned exactly,
        # the gaps to the others only widen as the power grows
        cert_plus = np.minimum(f2 + (w2 - w1), f3 + (w3 - w1)) - val1
        cert_minus = np.minimum(f2 + (w3 - w2), f1 + (w3 - w1)) - val3
        _flag(
            report,
            "cert",
            "g^N, N >= 1",
            (cert_plus < 2) | (val1 >= floor_cap),
            dom_texts,
            lambda r: f"slack {int(cert_plus[r]) - 2}",
        )
        _flag(
            report,
            "cert",
            "g^N, N <= -1",
            (cert_minus < 2) | (val3 >= floor_cap),
            dom_texts,
            lambda r: f"slack {int(cert_minus[r]) - 2}",
        )
        report.merge_min("min_cert_slack", min(cert_plus.min(), cert_minus.min()) - 2)

        # concrete images under g and g^-1
        for side in sides:
            width = side["width"]
            img = np.zeros((m, 3, width), dtype=np.int32)
            for i in range(3):
                for j in range(3):
                    for pos, dig in side["taps"][i][j]:
                        col = pos - side["lead"]
                        img[:, i, col : col + level] += dig * dom[:, j]
            img %= q
            vm_col = _first_nonzero((img != 0).any(axis=1), width)
            if (vm_col >= width - 1).any():
                raise InsufficientPrecision("image lost inside its digit window")
            vm = vm_col + side["lead"]
            report.checked_images += m

            in_window = _window_mask(img, vm_col)
            level_img = (
                level
                - side["lognorm_compound"]
                - vm
                - np.minimum(vm, level - side["lognorm"])
            )
            report.merge_min("min_image_level", level_img.min())
            loss = vm + side["lognorm"]

            _flag(report, "image-window", side["label"], ~in_window, dom_texts)
            _flag(
                report,
                "image-level",
                side["label"],
                level_img < 2,
                dom_texts,
                lambda r: f"level {int(level_img[r])}",
            )
            _flag(
                report,
                "epsilon",
                side["label"],
                loss > epsilon_exponent,
                dom_texts,
                lambda r: f"loss {int(loss[r])} > {epsilon_exponent}",
            )

    # -- C2: window balls under the rank-two factor --------------------------
    if window_chunks:
        wreps = np.concatenate(window_chunks)
    else:
        wreps = np.empty((0, 3, level), dtype=np.int8)
    report.window_balls = wreps.shape[0]
    expected = q ** (2 * (level - 2))
    if report.window_balls != expected:
        raise AssertionError(
            f"window enumeration found {report.window_balls} balls, expected {expected}"
        )

    gammas = _gamma_table(pair, gamma_bound)
    report.gamma_elements = len(gammas)

    for lo in range(0, wreps.shape[0], CHUNK):
        w = wreps[lo : lo + CHUNK]
        n = w.shape[0]
        w_texts = lambda r: _text(level, w, r)  # noqa: E731
        for label, dvals in gammas:
            dmin = min(dvals)
            width = max(dvals) - dmin + level
            img = np.zeros((n, 3, width), dtype=np.int8)
            for k in range(3):
                off = dvals[k] - dmin
                img[:, k, off : off + level] = w[:, k]
            report.checked_images += n

            # theta-exactness: window points have unit coordinates, so the
            # image norm is exactly the largest diagonal norm
            vm_col = _first_nonzero((img != 0).any(axis=1), width)
            _flag(report, "theta-exactness", label, vm_col != 0, w_texts)

            svals = sorted(dvals)
            report.merge_min("min_image_level", level + svals[1] - svals[0])
            if level + svals[1] - svals[0] < 3:
                report.add_violation(
                    "image-level",
                    label,
                    "all window balls",
                    f"level {level + svals[1] - svals[0]}",
                )

            # ball points perturb the free coordinates x, y at u^level, so
            # image digits are ball-independent below this column:
            pert = level + min(dvals[0], dvals[1]) - dmin

            in_window = _window_mask(img, vm_col)
            _flag(report, "gamma-window", label, in_window, w_texts)
            if pert < 2:
                report.add_violation(
                    "ball-transfer",
                    label,
                    "all window balls",
                    f"window verdicts need 2 stable columns, have {pert}",
                )
            for cone, side_name in zip(cones, ("+", "-")):
                # images already flagged as window violations may sit in the
                # apex ball where the cone test cannot decide; skip those
                verdict, v1, vc = cone.verdicts(img, ignore=in_window)
                _flag(
                    report,
                    f"gamma-cone{side_name}",
                    label,
                    ~in_window & verdict,
                    w_texts,
                )
                _flag(
                    report,
                    "ball-transfer",
                    label,
                    ~in_window & ~verdict & (vc + 1 > pert),
                    w_texts,
                    lambda r, vc=vc: f"vcomb {int(vc[r])} vs stable columns {pert}",
                )

    return report
