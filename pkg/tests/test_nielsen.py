import random

import pytest

from markoffmodp.nielsen import (
    commutator_trace,
    generates,
    group_table,
    mat_inv,
    mat_mul,
    nielsen_orbits,
    pair_for_triple,
    sl2_elements,
    trace_triple,
)
from markoffmodp.orbits import classify_nonessential, surface_points, vieta_move


def test_group_order():
    for p in (3, 5, 7):
        els = sl2_elements(p)
        assert len(els) == p * (p * p - 1)
        assert len(set(els)) == len(els)


def test_trace_triple_examples():
    assert trace_triple((1, 0, 0, 1), (1, 0, 0, 1), 5) == (2, 2, 2)
    assert trace_triple((1, 1, 0, 1), (1, 0, 1, 1), 5) == (2, 2, 3)


def test_fricke_identity():
    rng = random.Random(1)
    els = sl2_elements(7)
    for _ in range(300):
        A, B = rng.choice(els), rng.choice(els)
        x, y, z = trace_triple(A, B, 7)
        k = commutator_trace(A, B, 7)
        assert (x * x + y * y + z * z - x * y * z - k - 2) % 7 == 0


def test_moves_project_to_coordinate_moves():
    # (A, B) -> (A, AB) projects to (x, y, z) -> (x, z, xz - y) and the
    # inversion move projects to the third-coordinate involution
    rng = random.Random(2)
    p = 7
    els = sl2_elements(p)
    for _ in range(200):
        A, B = rng.choice(els), rng.choice(els)
        x, y, z = trace_triple(A, B, p)
        t1 = trace_triple(A, mat_mul(A, B, p), p)
        assert t1 == (x, z, (x * z - y) % p)
        t2 = trace_triple(B, A, p)
        assert t2 == (y, x, z)
        t3 = trace_triple(mat_inv(A, p), B, p)
        assert t3 == vieta_move((x, y, z), 2, p)


def test_generates():
    assert not generates((1, 0, 0, 1), (1, 0, 0, 1), 5)
    assert generates((1, 1, 0, 1), (1, 0, 1, 1), 5)


def test_generates_bound():
    with pytest.raises(ResourceWarning):
        generates((1, 0, 0, 1), (1, 0, 0, 1), 17)


def test_commutator_trace_constant_on_orbits():
    g = group_table(5)
    rng = random.Random(3)
    for _ in range(50):
        A, B = rng.choice(g.elements), rng.choice(g.elements)
        k = commutator_trace(A, B, 5)
        moves = [
            (A, mat_mul(A, B, 5)),
            (B, A),
            (mat_inv(A, 5), B),
        ]
        for A2, B2 in moves:
            assert commutator_trace(A2, B2, 5) == k


def test_orbit_counts_p5():
    assert nielsen_orbits(5, 0)["orbit_count"] == 2  # p = 1 mod 4 doubling
    assert nielsen_orbits(5, 3)["orbit_count"] == 1
    assert nielsen_orbits(5, 2)["orbit_count"] == 0  # no generating pairs


def test_orbit_counts_p7():
    for kappa in range(7):
        if kappa == 4:
            continue
        res = nielsen_orbits(7, kappa)
        expect = 2 if kappa == 0 and 7 % 4 == 1 else 1
        assert res["orbit_count"] in (0, expect), res


def test_orbits_bound():
    with pytest.raises(ResourceWarning):
        nielsen_orbits(13, 0)


def test_kappa_four_rejected():
    with pytest.raises(ValueError):
        nielsen_orbits(5, 4)


def test_pair_lift_and_essentiality():
    rng = random.Random(4)
    for p in (5, 7):
        for kappa in (0, 1, 2, 3):
            if kappa == 4 % p:
                continue
            pts = surface_points(p, kappa)
            rng.shuffle(pts)
            for t in pts[:10]:
                A, B = pair_for_triple(t, p)
                assert trace_triple(A, B, p) == t
                if generates(A, B, p):
                    assert classify_nonessential(t, p, kappa) == "essential"


def test_category_one_triples_never_generate():
    # any pair over an axis triple generates a proper subgroup
    p = 13
    F_sq = 3  # 3^2 = 9: use kappa = 9 so (3, 0, 0) is on the surface
    A, B = pair_for_triple((3, 0, 0), p)
    assert trace_triple(A, B, p) == (3, 0, 0)
    assert not generates(A, B, p)
