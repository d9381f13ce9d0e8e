"""Acceptance gate: nine end-to-end criteria, one test and pass line each.

Each test prints a single ``criterion N: PASS -- ...`` line (visible under
``pytest -s``); the heavy construction runs are shared through module
fixtures.  Expected wall time for the whole gate is a few minutes, dominated
by the two full-parameter constructions, the 8x10^4 Monte-Carlo exclusion
cross-check, and the lattice-strategy pipeline.
"""

import copy
import random
from fractions import Fraction

import pytest

from pingpong3.certificate import construct_pipeline, verify_certificate
from pingpong3.errors import ExclusionFailed, SearchExhausted
from pingpong3.field import Field
from pingpong3.linalg import (
    Mat,
    random_lattice_element,
    vec_cross,
    vec_min_val,
)
from pingpong3.pingpong.constants import qi_constants
from pingpong3.pingpong.generators import make_generators, make_pair
from pingpong3.pingpong.regular import find_regular
from pingpong3.pingpong.sigma import monte_carlo_check, sigma_exclusion
from pingpong3.pingpong.verify import verify_pingpong
from pingpong3.pingpong.witness import irreducibility_witness
from pingpong3.pingpong.words import word_survey
from pingpong3.projgeom import (
    ProjLine,
    ProjPoint,
    ball_of_point,
    enumerate_balls,
    image_ball,
    in_unit_window,
    line_has_slope_u,
)
from pingpong3.spectral import eigen_flags, is_regular

F2 = Field(2)


def _line(tag, text):
    print(f"criterion {tag}: PASS -- {text}")


def expected_word_total(bound):
    """Count reduced alternating words of weight <= bound.

    Nontrivial diagonal syllables of weight w: the (m, n) with |m|+|n| = w,
    of which there are 4w; cyclic syllables of weight w: c^{+-w}, 2 of them.
    Adjacent syllables must alternate kinds.
    """
    d_end = [0] * (bound + 1)
    c_end = [0] * (bound + 1)
    for l in range(1, bound + 1):
        d_end[l] = sum(4 * w * (c_end[l - w] + (l == w)) for w in range(1, l + 1))
        c_end[l] = sum(2 * (d_end[l - w] + (l == w)) for w in range(1, l + 1))
    return sum(d_end[l] + c_end[l] for l in range(1, bound + 1))


@pytest.fixture(scope="module")
def result_q2():
    return construct_pipeline(2, level=10, gamma_bound=3, word_bound=8)


@pytest.fixture(scope="module")
def result_q3():
    return construct_pipeline(3, level=6, gamma_bound=3, word_bound=8)


def test_criterion_1_end_to_end_construction(result_q2, result_q3):
    for result, level in ((result_q2, 10), (result_q3, 6)):
        report, survey = result.report, result.survey
        assert report.passed and report.total_violations == 0
        assert report.level == level and report.gamma_bound == 3
        assert survey.passed and not survey.violation_counts
        assert survey.bound == 8
        assert survey.min_growth_margin >= 0
        assert result.certificate["reports"]["irreducible"] is True
    _line(
        1,
        f"q=2 level 10 swept {result_q2.report.checked_images} images, "
        f"q=3 level 6 swept {result_q3.report.checked_images}; both surveys of "
        f"{result_q2.survey.words} words non-identity with growth margin >= 0",
    )


def test_criterion_2_symbolic_exclusion_with_monte_carlo():
    for q in (2, 3):
        pair = make_generators(q)
        exclusion = sigma_exclusion(pair)
        assert len(exclusion.cases) == 8
        assert len(exclusion.digest) == 64
        hits = monte_carlo_check(
            pair, random.Random(7 * q), trials_per_case=10_000, exponent_bound=5
        )
        assert len(hits) == 8
        assert all(t == 10_000 and h == 0 for t, h in hits.values())
    _line(2, "8 sign cases certified at q=2 and q=3; 2x8x10^4 samples, zero hits")


def test_criterion_3_norm_cartan_identity():
    checked = 0
    for q in (2, 3):
        rng = random.Random(101 * q)
        for _ in range(1000):
            m = random_lattice_element(q, rng)
            mu = m.cartan_projection()
            assert m.lognorm() + m.adjugate().lognorm() == mu[0] - mu[2]
            checked += 1
    _line(3, f"lognorm(A) + lognorm(A^-1) = mu_1 - mu_3 for {checked} elements")


def test_criterion_4_operator_norm_against_brute_force():
    # all 511 nonzero vectors with coordinate digits at levels 0..2
    grid = []
    for cx in range(8):
        for cy in range(8):
            for cz in range(8):
                if cx == cy == cz == 0:
                    continue
                grid.append(tuple(
                    F2.from_int_poly([(c >> k) & 1 for k in range(3)], lead=0)
                    for c in (cx, cy, cz)))
    rng = random.Random(404)
    for _ in range(100):
        m = random_lattice_element(2, rng)
        sup = max(vec_min_val(v) - vec_min_val(m.matvec(v)) for v in grid)
        assert sup == m.lognorm()
    _line(4, "sup ||Av||/||v|| over the level-3 grid = q^lognorm, 100 matrices")


def test_criterion_5_spectral_correctness():
    for q in (2, 3):
        field = Field(q)
        rng = random.Random(1009 * q)
        found = tried = 0
        while found < 50:
            tried += 1
            assert tried < 2000, "regular elements should be plentiful"
            m = random_lattice_element(q, rng, n_factors=5)
            if not is_regular(m):
                continue
            found += 1
            es = eigen_flags(m)
            precision = min(x.known_to for x in es.eigenvalues)
            w = es.valuations
            f = m.char_poly()
            for i, lam in enumerate(es.eigenvalues):
                r = f(lam)
                if r.is_exact_zero:
                    continue
                # the sharp residual floor: lift precision plus
                # val f'(lam_i) = sum_{j != i} min(w_i, w_j)
                floor = precision + sum(min(w[i], w[j]) for j in range(3) if j != i)
                assert r.val_lower_bound() == r.known_to  # no visible digit
                assert r.val_lower_bound() >= floor
            prod = es.eigenvalues[0] * es.eigenvalues[1] * es.eigenvalues[2]
            assert prod.known_to >= precision - w[2] > 0
            assert prod.equal_mod(field.one(), prod.known_to) is True
            # conjugation equivariance: flags of SmS^-1 are S times flags of m
            s = Mat.identity(q)
            for _ in range(3):
                i, j = rng.sample(range(3), 2)
                s = s * Mat.elementary(q, i, j, field.from_int_poly(
                    [rng.randrange(q) for _ in range(2)], lead=0))
            es2 = eigen_flags(s * m * s.inverse())
            assert es2.valuations == es.valuations
            for i in range(3):
                for x in vec_cross(es2.vectors[i], s.matvec(es.vectors[i])):
                    if not x.is_exact_zero:
                        assert x.val_lower_bound() == x.known_to >= 8
    _line(5, "100 lattice-filtered regular elements: residuals at the sharp "
             "floor, eigenvalue product = 1, flags conjugation-equivariant")


def test_criterion_6_ball_partition_and_image_containment():
    # exhaustive partition at q = 2, M <= 3
    for level, want in ((1, 7), (2, 28), (3, 112)):
        balls = list(enumerate_balls(2, level))
        assert len(balls) == len(set(balls)) == want
        counts = dict.fromkeys(balls, 0)
        for cx in range(2 ** level):
            for cy in range(2 ** level):
                for cz in range(2 ** level):
                    if cx % 2 == 0 and cy % 2 == 0 and cz % 2 == 0:
                        continue  # not a projective point mod u^level
                    point = ProjPoint(tuple(
                        F2.from_int_poly([(c >> k) & 1 for k in range(level)], lead=0)
                        for c in (cx, cy, cz)))
                    counts[ball_of_point(point, level)] += 1
        # each point has exactly (q-1) q^(M-1) vector representatives
        assert all(c == 2 ** (level - 1) for c in counts.values())

    # Lipschitz soundness: image_ball contains the image, 10^3 points per pair
    pair = make_generators(2)
    cand = find_regular(2)
    mats = [pair.a, pair.b, pair.a * pair.b, cand.h, cand.h ** cand.contraction.n0]
    rng = random.Random(5)
    pairs = points = 0
    for m in mats:
        spread = m.lognorm() + m.adjugate().lognorm()
        level = spread + 2
        for _ in range(2):
            while True:
                coords = tuple(
                    F2.from_int_poly([rng.randrange(2) for _ in range(level)], lead=0)
                    for _ in range(3))
                if any(x.digit_at(0) for x in coords):
                    break
            src = ball_of_point(ProjPoint(coords), level)
            img = image_ball(m, src)
            assert img.level == level - spread
            base = src.vector()
            for _ in range(1000):
                pert = tuple(
                    x + F2.from_int_poly([rng.randrange(2) for _ in range(6)], lead=level)
                    for x in base)
                assert ball_of_point(ProjPoint(m.matvec(pert)), img.level) == img
                points += 1
            pairs += 1
    _line(6, f"partition exhaustive at levels 1-3 (7/28/112); image containment "
             f"on {pairs} (g, ball) pairs x 1000 points, zero violations")


def test_criterion_7_word_growth_bound(result_q2):
    survey = result_q2.survey
    cert = result_q2.certificate
    assert survey.words == expected_word_total(8)  # full enumeration, no gaps
    assert survey.alpha == Fraction(cert["constants"]["alpha"])
    assert survey.c_total == cert["constants"]["c_total"]
    assert survey.violation_counts.get("growth", 0) == 0
    assert survey.min_growth_margin >= 0
    _line(7, f"all {survey.words} reduced words of length <= 8 satisfy "
             f"log_q(|w||w^-1|) >= {survey.alpha}|w| - {survey.c_total} "
             f"(tightest: {survey.tightest_word!r}, margin {survey.min_growth_margin})")


def test_criterion_8_lattice_strategy_realization():
    cand = find_regular(2, "lattice", seed=11, budget=100_000)
    assert cand.trials <= 100_000
    h = cand.h
    assert h.exact and h.det() == F2.one()
    # entries are polynomials in t (no positive powers of u)
    assert all(
        x.is_exact_zero or x.lead + len(x.digits) - 1 <= 0
        for row in h.rows for x in row)
    assert is_regular(h)
    es = cand.eigen
    assert in_unit_window(es.vectors[0]) is True
    assert in_unit_window(es.vectors[2]) is True
    assert line_has_slope_u(ProjLine(es.attracting_line_dual())) is True
    assert line_has_slope_u(ProjLine(es.repelling_line_dual())) is True

    # the found element must pass the same verification as criterion 1
    pair = make_generators(2)
    constants = qi_constants(pair, cand)
    g = h ** cand.contraction.n0
    report = verify_pingpong(
        pair, g, 10, 3, epsilon_exponent=constants.epsilon_exponent)
    assert report.passed
    survey = word_survey(pair, g, 8, constants)
    assert survey.passed
    assert irreducibility_witness(pair, g) is True

    # a too-small budget is reported as exhaustion, not retried
    with pytest.raises(SearchExhausted):
        find_regular(2, "lattice", seed=11, budget=3)
    _line(8, f"lattice search found h in {cand.trials} trials (budget 10^5); "
             f"level 10 sweep and {survey.words}-word survey pass on it")


def test_criterion_9_negative_controls():
    result = construct_pipeline(2, level=5, gamma_bound=2, word_bound=3)
    bad = copy.deepcopy(result.certificate)
    bad["g"] = Mat.identity(2).to_text()
    outcome = verify_certificate(bad)
    assert not outcome.passed
    assert "verify_pingpong" in {stage for stage, _ in outcome.failures}

    bad_a = Mat.diagonal([F2.u(1), F2.one(), F2.u(-1)])
    bad_b = Mat.diagonal([F2.u(-1), F2.u(2), F2.u(-1)])
    with pytest.raises(ExclusionFailed):
        sigma_exclusion(make_pair(bad_a, bad_b))
    _line(9, "tampered certificate (g -> I) rejected; off-pattern diagonal "
             "pair fails the sign-case exclusion")
