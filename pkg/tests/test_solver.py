import random
from fractions import Fraction as F

import pytest

from kisindim import bounds as bd
from kisindim.kisin_model import (KisinInstance, MuTriangle, cone_q, dim_phi,
                                  mu_from_q, q_from_mu)
from kisindim.solver import (BudgetExceeded, DimQuery, DimResult, dim_d2_closed,
                             dim_d3_closed, dim_exact, consistency_suite,
                             mu_constraints_ok, _enumerate_dominated_tops,
                             _self_test)


def test_query_validation():
    inst = KisinInstance(2, 2)
    with pytest.raises(ValueError):
        DimQuery(inst, "mu", mu=(0, 3))  # not nonincreasing
    with pytest.raises(ValueError):
        DimQuery(inst, "le_e", e=-1)
    with pytest.raises(ValueError):
        DimQuery(inst, "nope", e=1)
    with pytest.raises(ValueError):
        dim_exact(DimQuery(KisinInstance(5, 2), "mu", mu=(1, 1, 1, 1, 1)))


def test_worked_examples():
    r = dim_exact(DimQuery(KisinInstance(2, 2), "mu", mu=(3, 0)))
    assert r.status == "exact" and r.dim == 1
    assert r.witness[(2, 2)] == 2
    r = dim_exact(DimQuery(KisinInstance(2, 3), "mu", mu=(2, 0)))
    assert r.status == "exact" and r.dim == 0
    assert r.witness[(2, 2)] == 2  # forced
    r = dim_exact(DimQuery(KisinInstance(2, 3), "mu", mu=(3, 0)))
    assert r.status == "empty"  # 2 does not divide 3


def test_d1_cases():
    assert dim_exact(DimQuery(KisinInstance(1, 5), "mu", mu=(4,))).dim == 0
    assert dim_exact(DimQuery(KisinInstance(1, 5), "mu", mu=(3,))).status == "empty"


def test_h_zero_gives_interval():
    inst = KisinInstance(3, 2, h_zero=True)
    r = dim_exact(DimQuery(inst, "mu", mu=(4, 2, 0)))
    assert r.status == "interval"
    lo, hi = r.interval
    assert hi - lo == 3  # d(d-1)/2
    exact = dim_exact(DimQuery(KisinInstance(3, 2), "mu", mu=(4, 2, 0)))
    assert lo == exact.dim


def test_budget_refusal_is_typed():
    inst = KisinInstance(4, 2)
    with pytest.raises(BudgetExceeded):
        dim_exact(DimQuery(inst, "le_e", e=14), budget=50)


def test_witness_checks_always_verified():
    for d, b, mu in [(2, 2, (5, 1)), (3, 2, (6, 3, 0)), (3, 3, (7, 2, 1)),
                     (4, 3, (6, 2, 2, 0))]:
        r = dim_exact(DimQuery(KisinInstance(d, b), "mu", mu=mu))
        if r.status == "empty":
            continue
        assert r.checks["witness_in_Q"] and r.checks["witness_in_R"]
        tri = r.witness
        assert tri.top_row == tuple(map(F, mu))
        assert dim_phi(tri) == r.max_dim_phi


def test_mu_constraint_system_self_test():
    for d, b in [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3)]:
        assert _self_test(d, b)


def test_mu_constraints_match_cone_on_feasible_triangle():
    inst = KisinInstance(3, 2)
    rows = [[6, 3, 0], [4, 2], [3]]
    tri = MuTriangle(inst, {(i, j): rows[i - 1][j - i]
                            for (i, j) in inst.cells})
    assert mu_constraints_ok(inst, rows) == cone_q(inst).contains(
        q_from_mu(tri).values)


def test_shift_invariance_of_dim():
    rng = random.Random(40)
    for _ in range(12):
        b = rng.choice((2, 3))
        d = rng.choice((2, 3))
        inst = KisinInstance(d, b)
        gaps = sorted((rng.randint(0, 6) for _ in range(d - 1)), reverse=True)
        mu = [rng.randint(0, 3)]
        for g in gaps:
            mu.append(mu[-1] - g)
        mu = tuple(sorted(mu, reverse=True))
        if sum(mu) % (b - 1):
            continue
        t = (b - 1) * rng.randint(1, 3)
        r1 = dim_exact(DimQuery(inst, "mu", mu=mu))
        r2 = dim_exact(DimQuery(inst, "mu", mu=tuple(x + t for x in mu)))
        assert r1.status == r2.status
        if r1.status != "empty":
            assert r1.dim == r2.dim


def test_le_e_monotone_and_nonnegative():
    for d, b in [(2, 2), (2, 3), (3, 2)]:
        inst = KisinInstance(d, b)
        prev = -1
        for e in range(0, 9):
            r = dim_exact(DimQuery(inst, "le_e", e=e))
            assert r.status == "exact" and r.dim >= max(prev, 0)
            prev = r.dim


def test_le_mu_equals_max_over_dominated():
    rng = random.Random(41)
    for _ in range(10):
        d = rng.choice((2, 3))
        b = rng.choice((2, 3))
        inst = KisinInstance(d, b)
        mu = tuple(sorted((rng.randint(0, 5) for _ in range(d)), reverse=True))
        if sum(mu) % (b - 1):
            continue
        r = dim_exact(DimQuery(inst, "le_mu", mu=mu))
        best = None
        for mu2 in _enumerate_dominated_tops(mu, b):
            r2 = dim_exact(DimQuery(inst, "mu", mu=mu2))
            if r2.status != "empty":
                best = r2.dim if best is None else max(best, r2.dim)
        if best is None:
            assert r.status == "empty"
        else:
            assert r.dim == best


def test_dominated_tops_enumeration():
    tops = set(_enumerate_dominated_tops((2, 0), 2))
    assert tops == {(2, 0), (1, 1)}
    tops = set(_enumerate_dominated_tops((3, 1, 0), 2))
    assert (2, 1, 1) in tops and (3, 1, 0) in tops and (2, 2, 0) in tops
    assert all(sum(t) == 4 and list(t) == sorted(t, reverse=True) for t in tops)


def test_congruence_of_exact_dims():
    rng = random.Random(42)
    for _ in range(15):
        d = rng.choice((2, 3))
        b = rng.choice((2, 3, 4))
        inst = KisinInstance(d, b)
        mu = tuple(sorted((rng.randint(0, 8) for _ in range(d)), reverse=True))
        r = dim_exact(DimQuery(inst, "mu", mu=mu))
        if r.status == "empty":
            continue
        assert (r.dim + sum(j * m for j, m in enumerate(mu, 1))) % (b - 1) == 0


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def test_d2_closed_worked():
    assert dim_d2_closed(3, 0, KisinInstance(2, 2)) == 1
    assert dim_d2_closed(2, 0, KisinInstance(2, 3)) == 0
    assert dim_d2_closed(3, 0, KisinInstance(2, 3)) is None


def test_d2_closed_symmetric_case():
    # (t, t) with (b-1) | 2t: dimension 0 when feasible
    for b in (2, 3, 5):
        inst = KisinInstance(2, b)
        for t in range(0, 12):
            if (2 * t) % (b - 1):
                continue
            v = dim_d2_closed(t, t, inst)
            r = dim_exact(DimQuery(inst, "mu", mu=(t, t)))
            if t % (b - 1) == 0:
                assert v == 0 and r.dim == 0
            else:
                assert (v is None or v < 0) == (r.status == "empty")


def test_d3_closed_validity_flag():
    inst = KisinInstance(3, 2)
    val, valid = dim_d3_closed(30, 15, 0, inst)
    assert valid
    assert val == dim_exact(DimQuery(inst, "mu", mu=(30, 15, 0))).dim
    _, valid = dim_d3_closed(4, 4, 4, inst)
    assert not valid


def test_d3_closed_congruence_when_valid():
    rng = random.Random(43)
    for _ in range(30):
        b = rng.choice((2, 3))
        inst = KisinInstance(3, b)
        m3 = rng.randint(0, 2)
        m2 = m3 + rng.randint(8, 20)
        m1 = m2 + rng.randint(8, 20)
        if (m1 + m2 + m3) % (b - 1):
            continue
        val, valid = dim_d3_closed(m1, m2, m3, inst)
        if valid:
            assert (val + m1 + 2 * m2 + 3 * m3) % (b - 1) == 0


# ---------------------------------------------------------------------------
# periodicity and the suite
# ---------------------------------------------------------------------------

def test_d2_periodicity():
    for b in (2, 3):
        inst = KisinInstance(2, b)
        dims = [dim_exact(DimQuery(inst, "le_e", e=e)).dim
                for e in range(0, 10 + b * b)]
        for e in range(0, 10):
            assert dims[e + b * b - 1] == dims[e] + (b - 1)


def test_sandwich_small_grid():
    for d, b in [(2, 2), (3, 2), (2, 3)]:
        inst = KisinInstance(d, b)
        for e in range(0, 8):
            r = dim_exact(DimQuery(inst, "le_e", e=e))
            tb = bd.theorem_bounds("le_e", e, inst)
            assert tb["lower"] <= r.dim and F(r.dim) <= tb["upper"]


def test_consistency_suite_passes():
    rep = consistency_suite(d_values=(2, 3), b_values=(2, 3), e_max=6,
                            mu_samples=3, seed=1)
    assert rep["passed"], rep["failures"]
    assert rep["checks"] > 40


def test_result_serialization():
    r = dim_exact(DimQuery(KisinInstance(2, 2), "mu", mu=(3, 0)))
    payload = r.to_dict()
    assert payload["status"] == "exact" and payload["dim"] == 1
    assert payload["witness"]["2,2"] == "2"
