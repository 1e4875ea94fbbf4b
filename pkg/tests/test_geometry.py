import math

import pytest

from loiterlane.geometry import (Arc, CorridorParams, Path, Segment,
                                 build_layout, loiter_radius,
                                 loiter_separation, patch_bounds,
                                 patch_length_from_separation, wrap_pi,
                                 wrap_two_pi)

# Reference corridor design row used throughout the suite.
V_MIN, V_MAX, V_M = 15.0, 35.0, 25.0
R_T, D_S, N = 80.0, 50.0, 6


def table_params(**overrides):
    kwargs = dict(v_min=V_MIN, v_max=V_MAX, v_m=V_M, v_s=V_M, n_slots=N,
                  d_safe=D_S, r_transit=R_T, patch_length=420.0)
    kwargs.update(overrides)
    return CorridorParams(**kwargs)


def solve_separation_by_bisection(patch_length, v_m, v_min, v_max, r_transit,
                                  r_loiter):
    # Independent oracle: invert the forward patch-length map numerically
    # instead of using the closed form under test.
    def forward(d_l):
        return v_m * (math.pi * r_transit / 2.0 + d_l + r_loiter) \
            * (1.0 / v_min - 1.0 / v_max)

    lo, hi = 1e-9, 1e7
    assert forward(lo) < patch_length < forward(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if forward(mid) < patch_length:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Angle helpers
# ---------------------------------------------------------------------------

def test_wrap_pi_range():
    for k in range(-8, 9):
        for frac in (0.0, 0.3, 0.9999):
            a = wrap_pi(k * 2.0 * math.pi + frac)
            assert -math.pi < a <= math.pi
            assert math.isclose(math.sin(a), math.sin(frac), abs_tol=1e-12)


def test_wrap_two_pi_range():
    assert wrap_two_pi(0.0) == 0.0
    assert wrap_two_pi(-0.1) == pytest.approx(2.0 * math.pi - 0.1)
    assert wrap_two_pi(7.0 * math.pi) == pytest.approx(math.pi)


# ---------------------------------------------------------------------------
# Loiter radius
# ---------------------------------------------------------------------------

def test_loiter_radius_reference_row():
    assert loiter_radius(6, 50.0) == pytest.approx(100.0, abs=1e-9)


def test_loiter_radius_two_slots():
    # sin(pi/2) = 1 forces d_safe / 2.
    assert loiter_radius(2, 50.0) == pytest.approx(25.0, abs=1e-12)


def test_loiter_radius_four_slots():
    # sin^2(pi/4) = 1/2.
    assert loiter_radius(4, 50.0) == pytest.approx(50.0, abs=1e-9)


def test_loiter_radius_rejects_bad_inputs():
    with pytest.raises(ValueError):
        loiter_radius(1, 50.0)
    with pytest.raises(ValueError):
        loiter_radius(6, 0.0)
    with pytest.raises(ValueError):
        loiter_radius(6, -1.0)


@pytest.mark.parametrize("n", range(2, 65))
def test_adjacent_slot_chord_at_least_d_safe(n):
    r = loiter_radius(n, D_S)
    chord = 2.0 * r * math.sin(math.pi / n)
    assert chord >= D_S - 1e-9
    assert chord == pytest.approx(D_S / math.sin(math.pi / n), rel=1e-12)


# ---------------------------------------------------------------------------
# Loiter separation and patch length
# ---------------------------------------------------------------------------

def test_loiter_separation_reference_row():
    r_l = loiter_radius(N, D_S)
    got = loiter_separation(420.0, V_M, V_MIN, V_MAX, R_T, r_l)
    oracle = solve_separation_by_bisection(420.0, V_M, V_MIN, V_MAX, R_T, r_l)
    assert got == pytest.approx(oracle, abs=1e-9)
    assert got == pytest.approx(215.336293856408, abs=1e-9)
    # The reference design sheet lists 215.330 for this cell; rounding the
    # patch length to 420 m only pins it to about a centimetre.
    assert got == pytest.approx(215.330, abs=0.01)


def test_loiter_separation_scales_linearly_in_patch_length():
    r_l = loiter_radius(N, D_S)
    base = loiter_separation(420.0, V_M, V_MIN, V_MAX, R_T, r_l)
    doubled = loiter_separation(840.0, V_M, V_MIN, V_MAX, R_T, r_l)
    fixed = math.pi * R_T / 2.0 + r_l
    assert doubled == pytest.approx(656.336293856408, abs=1e-9)
    assert doubled == pytest.approx(2.0 * base + fixed, rel=1e-12)


def test_loiter_separation_zero_boundary_is_rejected():
    r_l = loiter_radius(N, D_S)
    boundary = V_M * (math.pi * R_T / 2.0 + r_l) * (1.0 / V_MIN - 1.0 / V_MAX)
    with pytest.raises(ValueError, match="infeasible"):
        loiter_separation(boundary, V_M, V_MIN, V_MAX, R_T, r_l)
    with pytest.raises(ValueError, match="infeasible"):
        loiter_separation(0.9 * boundary, V_M, V_MIN, V_MAX, R_T, r_l)
    assert loiter_separation(boundary + 1.0, V_M, V_MIN, V_MAX, R_T, r_l) > 0.0


def test_separation_patch_length_round_trip():
    r_l = loiter_radius(N, D_S)
    cases = [(420.0, 25.0), (600.0, 20.0), (1000.0, 33.0), (250.0, 16.0)]
    for patch_length, v_m in cases:
        d_l = loiter_separation(patch_length, v_m, V_MIN, V_MAX, R_T, r_l)
        back = patch_length_from_separation(d_l, v_m, V_MIN, V_MAX, R_T, r_l)
        assert back == pytest.approx(patch_length, rel=1e-9)


def test_patch_bounds_reference_row():
    params = table_params(patch_length=None, d_loiter=215.330)
    layout = build_layout(params)
    d_p_min, d_p_max = patch_bounds(layout, params)
    assert d_p_min == pytest.approx(315.0, abs=0.05)
    assert d_p_max == pytest.approx(735.0, abs=0.05)
    assert d_p_max - d_p_min == pytest.approx(420.0, abs=0.01)
    # Bound difference equals the forward patch-length map, tightly.
    direct = patch_length_from_separation(215.330, V_M, V_MIN, V_MAX, R_T,
                                          params.r_loiter)
    assert d_p_max - d_p_min == pytest.approx(direct, rel=1e-9)


def test_patch_bounds_degenerate_speed_band():
    params = CorridorParams(v_min=25.0, v_max=25.0000001, v_m=25.0, v_s=25.0,
                            n_slots=N, d_safe=D_S, r_transit=R_T,
                            d_loiter=215.330)
    layout = build_layout(params)
    d_p_min, d_p_max = patch_bounds(layout, params)
    assert d_p_max - d_p_min == pytest.approx(0.0, abs=1e-3)
    assert d_p_min == pytest.approx(layout.l_out, rel=1e-6)


def test_patch_bounds_scale_with_path_length():
    short = table_params(patch_length=None, d_loiter=100.0)
    # Doubling every length doubles l_out, hence both bounds.
    r_l = short.r_loiter
    double = CorridorParams(v_min=V_MIN, v_max=V_MAX, v_m=V_M, v_s=V_M,
                            n_slots=N, d_safe=2.0 * D_S, r_transit=2.0 * R_T,
                            d_loiter=2.0 * (100.0 + r_l) - 2.0 * r_l)
    lay_a, lay_b = build_layout(short), build_layout(double)
    assert lay_b.l_out == pytest.approx(2.0 * lay_a.l_out, rel=1e-12)
    a = patch_bounds(lay_a, short)
    b = patch_bounds(lay_b, double)
    assert b[0] == pytest.approx(2.0 * a[0], rel=1e-12)
    assert b[1] == pytest.approx(2.0 * a[1], rel=1e-12)


# ---------------------------------------------------------------------------
# Corridor parameters
# ---------------------------------------------------------------------------

def test_params_fill_patch_length_from_separation():
    params = table_params(patch_length=None, d_loiter=215.330)
    assert params.patch_length == pytest.approx(419.994005851, abs=1e-6)


def test_params_reject_inconsistent_pair():
    with pytest.raises(ValueError, match="inconsistent"):
        table_params(d_loiter=300.0)  # alongside patch_length=420


def test_params_accept_consistent_pair():
    d_l = loiter_separation(420.0, V_M, V_MIN, V_MAX, R_T, loiter_radius(N, D_S))
    params = table_params(d_loiter=d_l)
    assert params.patch_length == 420.0


def test_params_reject_bad_speed_band():
    with pytest.raises(ValueError):
        table_params(v_min=35.0, v_max=15.0)
    with pytest.raises(ValueError):
        table_params(v_m=40.0)
    with pytest.raises(ValueError):
        table_params(v_s=10.0)


def test_params_reject_infeasible_separation():
    # Patch too short to clear the transit link and loiter radius.
    with pytest.raises(ValueError, match="infeasible"):
        table_params(patch_length=50.0)


def test_params_require_one_length():
    with pytest.raises(ValueError, match="required"):
        table_params(patch_length=None)


def test_params_reject_nonpositive_separation_input():
    with pytest.raises(ValueError, match="positive"):
        table_params(patch_length=None, d_loiter=0.0)
    with pytest.raises(ValueError, match="positive"):
        table_params(patch_length=None, d_loiter=-5.0)


# ---------------------------------------------------------------------------
# Layout construction
# ---------------------------------------------------------------------------

def test_layout_reference_points():
    layout = build_layout(table_params(patch_length=None, d_loiter=215.330))
    assert layout.point_d[0] == pytest.approx(-100.0, abs=1e-9)
    assert layout.point_d[1] == pytest.approx(0.0, abs=1e-12)
    assert layout.point_f[0] == pytest.approx(-100.0, abs=1e-9)
    assert layout.point_f[1] == pytest.approx(-315.330, abs=1e-9)
    assert layout.center_a[0] == pytest.approx(-20.0, abs=1e-9)
    assert layout.center_a[1] == pytest.approx(-315.330, abs=1e-9)
    assert layout.point_q[0] == pytest.approx(-20.0, abs=1e-9)
    assert layout.point_q[1] == pytest.approx(-395.330, abs=1e-9)
    assert layout.l_out == pytest.approx(440.994, abs=1e-3)
    assert layout.l_out == pytest.approx(
        math.pi * R_T / 2.0 + 215.330 + layout.r_loiter, rel=1e-12)


def test_layout_entry_side_mirrors_outgoing_side():
    layout = build_layout(table_params())
    assert layout.point_i == pytest.approx((-layout.point_d[0], layout.point_d[1]))
    assert layout.point_c == pytest.approx((-layout.point_f[0], layout.point_f[1]))
    assert layout.point_e == pytest.approx((-layout.point_q[0], layout.point_q[1]))
    assert layout.entry_path.length == pytest.approx(layout.l_out, rel=1e-12)


def test_layout_tangent_continuity():
    layout = build_layout(table_params())
    path = layout.outgoing_path
    seg_len = path.primitives[0].length
    for s in (seg_len, path.length):
        before = path.point_at(s - 1e-7)
        after = path.point_at(min(s + 1e-7, path.length))
        assert before[0][0] == pytest.approx(after[0][0], abs=1e-6)
        assert before[0][1] == pytest.approx(after[0][1], abs=1e-6)
        assert before[1][0] == pytest.approx(after[1][0], abs=1e-5)
        assert before[1][1] == pytest.approx(after[1][1], abs=1e-5)
    # Departure tangent continues the counterclockwise loiter tangent at D.
    pos, tan, _ = path.point_at(0.0)
    assert pos == pytest.approx(layout.point_d)
    assert tan == pytest.approx((0.0, -1.0), abs=1e-12)
    # Arrival tangent matches the +x main lane at Q.
    pos, tan, _ = path.point_at(path.length)
    assert pos == pytest.approx(layout.point_q)
    assert tan == pytest.approx((1.0, 0.0), abs=1e-12)


def test_layout_lateral_separation_reading():
    params = table_params()
    layout = build_layout(params)
    # The transit-link centre sits d_loiter below the loiter circle.
    assert abs(layout.center_a[1]) - layout.r_loiter == pytest.approx(
        params.d_loiter, rel=1e-12)


def test_layout_degenerate_transit_link():
    params = table_params(patch_length=None, d_loiter=215.330, r_transit=1e-6)
    layout = build_layout(params)
    dist = math.hypot(layout.point_q[0] - layout.point_f[0],
                      layout.point_q[1] - layout.point_f[1])
    assert dist <= 2e-6
    assert layout.point_q[1] < layout.point_f[1]


# ---------------------------------------------------------------------------
# Path evaluation
# ---------------------------------------------------------------------------

def test_point_at_start_junction_end():
    params = table_params(patch_length=None, d_loiter=215.330)
    layout = build_layout(params)
    path = layout.outgoing_path

    pos, tan, kappa = path.point_at(0.0)
    assert pos == pytest.approx(layout.point_d)
    assert tan == pytest.approx((0.0, -1.0))
    assert kappa == 0.0

    junction = params.d_loiter + layout.r_loiter
    pos, _, _ = path.point_at(junction)
    assert pos == pytest.approx(layout.point_f, abs=1e-9)

    pos, tan, kappa = path.point_at(path.length)
    assert pos == pytest.approx(layout.point_q, abs=1e-9)
    assert tan == pytest.approx((1.0, 0.0))
    assert kappa == pytest.approx(1.0 / R_T, rel=1e-12)


def test_point_at_rejects_out_of_range():
    path = build_layout(table_params()).outgoing_path
    with pytest.raises(ValueError):
        path.point_at(-1.0)
    with pytest.raises(ValueError):
        path.point_at(path.length + 1.0)


def test_point_at_tangent_matches_numerical_derivative():
    layout = build_layout(table_params())
    for path in (layout.outgoing_path, layout.loiter_circle):
        total = path.length
        eps = 1e-4
        for frac in (0.05, 0.3, 0.5, 0.71, 0.9, 0.99):
            s = frac * total
            (x0, y0), tan, _ = path.point_at(s)
            (xa, ya), _, _ = path.point_at(s - eps)
            (xb, yb), _, _ = path.point_at(s + eps)
            dx, dy = (xb - xa) / (2.0 * eps), (yb - ya) / (2.0 * eps)
            norm = math.hypot(dx, dy)
            assert dx / norm == pytest.approx(tan[0], abs=1e-6)
            assert dy / norm == pytest.approx(tan[1], abs=1e-6)


def test_closed_path_wraps():
    circle = Path((Arc((0.0, 0.0), 100.0, 0.0, 2.0 * math.pi),), closed=True)
    p1, t1, k1 = circle.point_at(50.0)
    p2, t2, k2 = circle.point_at(50.0 + circle.length)
    assert p1 == pytest.approx(p2)
    assert t1 == pytest.approx(t2)
    assert k1 == k2 == pytest.approx(0.01)


def test_segment_and_arc_lengths():
    seg = Segment((0.0, 0.0), (3.0, 4.0))
    assert seg.length == pytest.approx(5.0)
    arc = Arc((0.0, 0.0), 80.0, math.pi, 0.5 * math.pi)
    assert arc.length == pytest.approx(40.0 * math.pi)
    # Negative sweep turns clockwise.
    cw = Arc((0.0, 0.0), 10.0, 0.0, -0.5 * math.pi)
    _, tan, kappa = cw.point_at(0.0)
    assert tan == pytest.approx((0.0, -1.0))
    assert kappa == pytest.approx(-0.1)
