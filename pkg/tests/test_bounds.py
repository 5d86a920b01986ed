import random
from fractions import Fraction as F
from math import inf

import pytest

from kisindim import perm as pm
from kisindim.bounds import (DualityData, KTables, UnsupportedRegime, a_set,
                             b_value, chain_cone_gens, dominance_polytope,
                             extremal_points_a_qmax, f_T, f_T_halfspace,
                             k_polytopes, min_over_permutations, orthant_pm_gens,
                             regularity, theorem_bounds, two_rho, witness_le_e,
                             witness_le_mu)
from kisindim.kisin_model import (KisinInstance, chain_dual_generators,
                                  cone_chain, cone_q, cone_regular, dim_phi,
                                  mu_from_q, mu_vec, q_from_mu,
                                  regular_dual_generators)
from kisindim.polyhedra import (dot, dual_cone, enumerate_vertices,
                                minkowski_sum_cone, polyhedra_set_equal, vec)


# ---------------------------------------------------------------------------
# A-sets
# ---------------------------------------------------------------------------

def test_a_set_qmin_f_form_is_a_halfline():
    # the two-sided form pins y_1 + y_d = 0 and y_1 >= floor(d^2/4)/(b+1)
    for d in (2, 3, 4, 5):
        for b in (2, 3, 7):
            inst = KisinInstance(d, b)
            A = a_set(inst, "Qmin", "f")
            V = enumerate_vertices(A)
            t = F(d * d // 4, b + 1)
            assert V.vertices == (vec((t, -t)),)
            assert V.rays == (vec((1, -1)),)


def test_a_set_qmin_g_form_is_shifted_regular_dual():
    # A for Q_min equals 2rho/(b+1) + Reg*
    for d in (2, 3, 4):
        for b in (2, 5):
            inst = KisinInstance(d, b)
            A = a_set(inst, "Qmin", "g")
            V = enumerate_vertices(A)
            apex = tuple(F(x, b + 1) for x in two_rho(d))
            assert V.vertices == (apex,)
            gens = [vec(g) for g in regular_dual_generators(inst)]
            from kisindim.polyhedra import cone_hull, in_cone

            for r in V.rays:
                assert in_cone(gens, r)
            for g in gens:
                assert A.contains_ray(g)


def test_a_set_qw0_equals_qmin():
    for d in (2, 3, 4):
        inst = KisinInstance(d, 3)
        assert polyhedra_set_equal(a_set(inst, ("Qw", pm.w0(d)), "g"),
                                   a_set(inst, "Qmin", "g"))


def test_a_set_full_q_refuses_small_b():
    inst = KisinInstance(4, 2)  # b0 = 3
    with pytest.raises(UnsupportedRegime):
        a_set(inst, "Q", "g")


def test_a_set_qmax_matches_f_T_halfspaces():
    d, b = 4, 5
    inst = KisinInstance(d, b)
    A = a_set(inst, "Qmax", "g")
    hs = {(h.normal, h.offset) for h in A.ineqs}
    expected = set()
    for mask in range(1, 2 ** d - 1):
        T = {t for t in range(1, d + 1) if mask & (1 << (t - 1))}
        expected.add(f_T_halfspace(inst, T))
    assert hs == expected


def test_prop_a_q_equals_a_qmax_plus_chain_dual():
    # the full-cone A-set is the Minkowski sum of the Q_max one with C*
    for d, b in [(2, 3), (3, 4), (3, 17), (4, 5), (4, 17)]:
        inst = KisinInstance(d, b)
        AQ = a_set(inst, "Q", "g")
        S = minkowski_sum_cone(a_set(inst, "Qmax", "g"), chain_dual_generators(d))
        assert polyhedra_set_equal(AQ, S)


def test_a_q_cap_chain_equals_a_qmin_cap_chain():
    for d, b in [(2, 3), (3, 4), (4, 5)]:
        inst = KisinInstance(d, b)
        C = cone_chain(d)
        assert polyhedra_set_equal(a_set(inst, "Q", "g").intersect(C),
                                   a_set(inst, "Qmin", "g").intersect(C))


def test_lemma_neighbour_slack():
    # every y in the Q_min A-set with y_i <= y_{i+1} + 1 lies in the Q_max one
    rng = random.Random(31)
    for d, b in [(3, 3), (4, 5)]:
        inst = KisinInstance(d, b)
        Amin = a_set(inst, "Qmin", "g")
        Amax = a_set(inst, "Qmax", "g")
        apex = tuple(F(x, b + 1) for x in two_rho(d))
        gens = [vec(g) for g in regular_dual_generators(inst)]
        found = 0
        for _ in range(400):
            y = list(apex)
            for g in gens:
                c = F(rng.randint(0, 4), 16)
                y = [a + c * x for a, x in zip(y, g)]
            assert Amin.contains(tuple(y))
            if all(y[i] <= y[i + 1] + 1 for i in range(d - 1)):
                found += 1
                assert Amax.contains(tuple(y))
        assert found > 10


# ---------------------------------------------------------------------------
# extremal points
# ---------------------------------------------------------------------------

def test_extremal_points_d2():
    inst = KisinInstance(2, 5)
    pts = extremal_points_a_qmax(inst)
    assert set(pts.values()) == {(F(1), F(-1)), (F(1, 6), F(-1, 6))}


def test_extremal_points_d3():
    inst = KisinInstance(3, 5)
    pts = extremal_points_a_qmax(inst)
    assert len(pts) == 6
    assert all(sum(v) == 0 for v in pts.values())
    for w, v in pts.items():
        assert v == pm.rho_w(w, 5)


def test_extremal_points_refuse_small_b():
    with pytest.raises(UnsupportedRegime):
        extremal_points_a_qmax(KisinInstance(4, 2))


def test_extremal_points_strictness_from_b0_plus_one():
    # the off-chain facet forms are strictly positive once b > b0 (at
    # (d, b) = (4, 3) some vanish, which extremal_points_a_qmax tolerates)
    for d, b in [(2, 3), (3, 3), (3, 17), (4, 4), (4, 17)]:
        extremal_points_a_qmax(KisinInstance(d, b))
    extremal_points_a_qmax(KisinInstance(4, 3))  # vertex set still exact


def test_extremal_points_d5():
    # the full 120-vertex family at d = 5, at the threshold and beyond
    for b in (5, 17):
        pts = extremal_points_a_qmax(KisinInstance(5, b))
        assert len(set(pts.values())) == 120


def test_prefix_sum_bounds_at_vertices():
    # -m(n-m) <= y_{m+1} + ... + y_n <= (n-m)(d-n) at every vertex
    for d, b in [(3, 2), (4, 3), (4, 17)]:
        inst = KisinInstance(d, b)
        for v in extremal_points_a_qmax(inst).values():
            for m in range(0, d):
                for n in range(m + 1, d + 1):
                    seg = sum(v[m:n])
                    assert -m * (n - m) <= seg <= (n - m) * (d - n)


def test_apex_of_qmax_a_set_membership():
    # 2rho/(b+1) lies in the Q_max A-set
    for d, b in [(2, 2), (3, 3), (4, 5)]:
        inst = KisinInstance(d, b)
        apex = tuple(F(x, b + 1) for x in two_rho(d))
        assert a_set(inst, "Qmax", "g").contains(apex)


# ---------------------------------------------------------------------------
# b-value evaluators
# ---------------------------------------------------------------------------

def test_b_value_qmin_two_sided():
    for d, b in [(2, 2), (3, 3), (4, 2), (5, 3)]:
        inst = KisinInstance(d, b)
        dd = DualityData(inst, "Qmin", "f", orthant_pm_gens())
        quarter = d * d // 4
        for (y1, yd) in [(F(5), F(0)), (F(7), F(2)), (F(3), F(-1))]:
            if y1 < yd:
                continue
            assert b_value(dd, (y1, yd)) == F(quarter) * (y1 - yd) / (b + 1)


def test_b_value_qmax_two_sided_needs_b_ge_d_minus_1():
    for d, b in [(3, 2), (4, 3), (5, 4), (4, 17)]:
        assert b >= d - 1
        inst = KisinInstance(d, b)
        dd = DualityData(inst, "Qmax", "f", orthant_pm_gens())
        e = F(9)
        assert b_value(dd, (e, F(0))) == F(d * d // 4) * e / (b + 1)


def test_b_value_outside_D_is_minus_infinity():
    inst = KisinInstance(2, 2)
    dd = DualityData(inst, "Qmin", "f", orthant_pm_gens(),
                     D_gens=(vec((1, 0)),))  # D = the nonnegative x-axis
    assert b_value(dd, (F(1), F(-1))) == -inf


def test_b_value_outside_image_is_minus_infinity():
    # mu_top <= e and mu_bottom >= 0 bound the image f(Q) + C from one side:
    # a point with y_d > y_1 is unreachable
    inst = KisinInstance(2, 2)
    dd = DualityData(inst, "Qmin", "f", orthant_pm_gens())
    assert b_value(dd, (F(0), F(5))) == -inf


# ---------------------------------------------------------------------------
# regularity and the permutation minimum
# ---------------------------------------------------------------------------

def test_regularity_d2():
    inst = KisinInstance(2, 3)
    for m1 in range(-3, 6):
        for m2 in range(-3, m1 + 1):
            assert regularity((F(m1), F(m2)), inst).b_regular


def test_regularity_worked_example():
    inst = KisinInstance(3, 2)
    r = regularity((F(4), F(2), F(0)), inst)
    assert r.b_regular and r.integrally_b_regular and not r.strongly_integrally_b_regular


def test_regularity_nesting_random():
    rng = random.Random(33)
    inst = KisinInstance(4, 3)
    for _ in range(300):
        mu = tuple(sorted((F(rng.randint(-20, 20)) for _ in range(4)), reverse=True))
        r = regularity(mu, inst)
        if r.strongly_integrally_b_regular:
            assert r.integrally_b_regular
        if r.integrally_b_regular:
            assert r.b_regular
        if r.b_regular:
            assert list(mu) == sorted(mu, reverse=True)


def test_min_over_permutations_regular_case():
    inst = KisinInstance(3, 4)
    mu = (F(9), F(5), F(1))
    assert regularity(mu, inst).b_regular
    val, argmin = min_over_permutations(mu, inst)
    assert val == F(dot(two_rho(3), mu), 5)
    assert pm.w0(3) in argmin


def test_min_over_permutations_constant_mu_is_zero():
    inst = KisinInstance(4, 3)
    val, argmin = min_over_permutations((F(5),) * 4, inst)
    assert val == 0 and len(argmin) == 24


def test_min_over_permutations_nonregular_two_routes():
    # brute force over the vertex list against the defining series, summed
    # in closed form over one period times the geometric factor
    inst = KisinInstance(3, 2)
    mu = (F(10), F(0), F(0))
    assert not regularity(mu, inst).b_regular
    val, argmin = min_over_permutations(mu, inst)

    def series(w, b, mu):
        d = w.d
        total = F(0)
        for i in range(1, d + 1):
            L = next(len(c) for c in w.cycles() if i in c)
            s = F(0)
            j = i
            for n in range(1, L + 1):
                j = w(j)
                s += F(d + 1 - i - j, b ** n)
            total += mu[i - 1] * s * F(b ** L, b ** L - 1)
        return (b - 1) * total

    direct = min(series(w, 2, mu) for w in pm.all_permutations(3))
    assert val == direct
    assert val < F(dot(two_rho(3), mu), 3)  # w0 is beaten here


# ---------------------------------------------------------------------------
# theorem bounds
# ---------------------------------------------------------------------------

def test_theorem_bounds_le_e_worked():
    inst = KisinInstance(2, 2)
    tb = theorem_bounds("le_e", 3, inst)
    assert tb["lower"] == 1 and tb["upper"] == 1


def test_theorem_bounds_h_zero_slack():
    inst = KisinInstance(4, 3, h_zero=True)
    tb = theorem_bounds("le_e", 10, inst)
    assert tb["upper"] == 6 + F(4 * 10, 4)
    tb2 = theorem_bounds("le_e", 10, KisinInstance(4, 3))
    assert tb["upper"] - tb2["upper"] == 6  # d(d-1)/2


def test_theorem_bounds_le_e_clamps_negative():
    inst = KisinInstance(3, 5)
    tb = theorem_bounds("le_e", 1, inst)  # e < b - 2
    assert tb["lower_raw"] < 0 and tb["lower"] == 0


def test_theorem_bounds_mu_congruence_and_refusal():
    inst = KisinInstance(3, 3)
    tb = theorem_bounds("mu", (4, 2, 0), inst)
    assert tb["congruence_mod_b_minus_1"] == (-(4 + 4 + 0)) % 2
    with pytest.raises(UnsupportedRegime):
        theorem_bounds("mu", (4, 2, 0), KisinInstance(4, 2))


def test_theorem_bounds_le_mu_relaxed_sup_at_strongly_regular():
    # when mu itself is strongly regular the dominance sup sits at mu
    inst = KisinInstance(3, 2)
    mu = (12, 5, 0)
    assert regularity(tuple(map(F, mu)), inst).strongly_integrally_b_regular
    tb = theorem_bounds("le_mu", mu, inst)
    assert tb["lower_sup_relaxed"]
    assert tb["lower"] == F(dot(two_rho(3), vec(mu)), 3) - 4 - F(1, 4)


def test_dominance_polytope_empty_when_no_regular_point():
    inst = KisinInstance(3, 2)
    P = dominance_polytope((2, 0, -2), inst, strong=True)
    assert enumerate_vertices(P).is_empty


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def test_witness_le_e_worked_example():
    inst = KisinInstance(2, 2)
    q, rep = witness_le_e(inst, 3)
    assert (q[(1, 1)], q[(1, 2)], q[(2, 2)]) == (2, 1, 2)
    m = mu_from_q(q)
    assert (m[(1, 1)], m[(1, 2)]) == (3, 0)
    assert rep["objective"] == 1 and rep["ok"]


def test_witness_le_e_edge_e0():
    for b in (2, 3, 5):
        for d in (2, 3, 4):
            q, rep = witness_le_e(KisinInstance(d, b), 0)
            assert rep["ok"]
            assert rep["objective"] >= rep["objective_lower_target"]


def test_witness_le_e_full_grid():
    for b in (2, 3, 4, 5):
        for d in (2, 3, 4, 5):
            inst = KisinInstance(d, b)
            for e in range(0, 41):
                _, rep = witness_le_e(inst, e)
                assert rep["ok"], (d, b, e, rep)


def test_witness_le_mu_postconditions_random():
    rng = random.Random(34)
    for b in (2, 3):
        for d in (2, 3, 4):
            inst = KisinInstance(d, b)
            shift = d * (b * b - 1)
            for _ in range(12):
                gaps = [rng.randint(shift, 2 * shift) for _ in range(d - 1)]
                mu = [0]
                for g in reversed(gaps):
                    mu.append(mu[-1] + g)
                mu = list(reversed(mu))
                t = next((t for t in range(b - 1)
                          if (sum(mu) + d * t) % (b - 1) == 0), None)
                if t is None:
                    continue
                mu = tuple(F(x + t) for x in mu)
                if not regularity(mu, inst).strongly_integrally_b_regular:
                    continue
                q, rep = witness_le_mu(inst, mu)
                assert rep["ok"], (d, b, mu, rep)
                # the level sequence satisfies the announced growth
                qq = rep["q_levels"]
                assert all(x <= y for x, y in zip(qq, qq[1:]))
                assert qq[-1] - qq[-2] >= d - 1  # after rounding, can lose < 1


def test_witness_le_mu_exact_when_integral():
    # all unrounded levels integral: the objective meets the target exactly
    inst = KisinInstance(2, 2)
    mu = (F(9), F(0))  # q' = (3, 6): integral
    assert regularity(mu, inst).strongly_integrally_b_regular
    q, rep = witness_le_mu(inst, mu)
    assert rep["exact_when_integral"]
    assert rep["objective"] == F(dot(two_rho(2), mu), 3)


def test_witness_le_mu_stated_constant_counterexample():
    # regression: the rounded point loses 4/3 > (d-1)^2 + (d-2)^2/4 = 1
    # here, so the often-quoted slack constant is not met by the
    # construction; the provable d(d-1) slack is
    inst = KisinInstance(2, 2)
    q, rep = witness_le_mu(inst, (F(10), F(0)))
    assert rep["ok"] and not rep["meets_stated_constant"]
    assert rep["objective"] == 2 and rep["objective_stated_target"] == F(7, 3)


def test_witness_le_mu_rejects_non_regular():
    inst = KisinInstance(3, 2)
    with pytest.raises(ValueError):
        witness_le_mu(inst, (F(2), F(1), F(0)))


# ---------------------------------------------------------------------------
# the K polytopes
# ---------------------------------------------------------------------------

def test_k_polytope_small_counts():
    expect = {2: (1, 1), 3: (3, 3), 4: (6, 5), 5: (15, 9)}
    for d, counts in expect.items():
        kt = k_polytopes(KisinInstance(d, 10000))
        assert kt.counts == counts


def test_k_polytope_apex_always_survives():
    for d, b in [(2, 2), (3, 7), (4, 3), (5, 6)]:
        kt = k_polytopes(KisinInstance(d, b))
        apex = tuple(F(x, b + 1) for x in two_rho(d))
        assert apex in kt.Kp_vertices
        assert apex in kt.K_vertices


def test_k_polytope_vertices_lie_in_chain_cone():
    kt = k_polytopes(KisinInstance(4, 7))
    C = cone_chain(4)
    for v in kt.K_vertices:
        assert C.contains(v)
    assert set(kt.Kp_vertices) <= set(kt.K_vertices)


def test_k_polytope_csv_and_json():
    kt = k_polytopes(KisinInstance(3, 5))
    csv = kt.coords_csv()
    assert csv.splitlines()[0] == "polytope,y1,y2,y3"
    assert "K+C*" in csv
    import json

    payload = json.loads(kt.to_json())
    assert payload["K_vertex_count"] == 3
