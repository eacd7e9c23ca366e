import cmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dirapprox.errors import InvalidInputError
from dirapprox.geometry import (
    SampleDensity,
    annulus,
    contains,
    contour_integral,
    disc,
    discretize,
    jordan_polygon,
    max_real_part,
    rectangle,
    spec_from_json_dict,
    spec_to_json_dict,
    translate,
    union_of_disjoint,
)

COARSE = SampleDensity(boundary_spacing=0.05, interior_spacing=0.15)


def all_specs():
    return [
        disc(-1 + 0.5j, 0.75),
        rectangle(-1 - 1j, 0 + 1j),
        annulus(0.5j, 0.5, 1.25),
        jordan_polygon([0, 2, 2 + 1j, 1 + 0.3j, 1j]),
        union_of_disjoint([disc(0, 0.5), disc(4, 0.5)]),
    ]


# --- constructors -----------------------------------------------------------


def test_invalid_geometry_rejected():
    with pytest.raises(InvalidInputError):
        disc(0, -1)
    with pytest.raises(InvalidInputError):
        rectangle(1 + 1j, 0)
    with pytest.raises(InvalidInputError):
        annulus(0, 2, 1)
    with pytest.raises(InvalidInputError):
        jordan_polygon([0, 1])
    with pytest.raises(InvalidInputError):
        jordan_polygon([0, 1, 1 + 1j, 1j, 0.5 - 0.5j + 0.5j * 1j])  # still simple? force a bowtie below
    with pytest.raises(InvalidInputError):
        jordan_polygon([0, 1 + 1j, 1, 1j])  # bowtie


def test_union_screens_overlap_and_nesting():
    with pytest.raises(InvalidInputError):
        union_of_disjoint([disc(0, 1), disc(1, 1)])
    with pytest.raises(InvalidInputError):
        union_of_disjoint([disc(0, 2), disc(0.2, 0.3)])
    u = union_of_disjoint([disc(0, 1), rectangle(3 - 1j, 4 + 1j)])
    assert len(u.members) == 2
    assert not u.declared_complement_connected


def test_polygon_stored_counterclockwise():
    p = jordan_polygon([0, 1j, 1 + 1j, 1])  # given clockwise
    vs = p.vertices
    area2 = sum(
        vs[i].real * vs[(i + 1) % 4].imag - vs[(i + 1) % 4].real * vs[i].imag
        for i in range(4)
    )
    assert area2 > 0


# --- discretize -------------------------------------------------------------


def test_disc_boundary_sample_count():
    ds = discretize(disc(-1, 0.5), SampleDensity(boundary_spacing=0.01))
    assert len(ds.boundary_samples) >= 314


def test_rectangle_boundary_traces_perimeter():
    r = rectangle(-1 - 1j, 0 + 1j)
    ds = discretize(r, COARSE)
    b = ds.boundary_samples
    on_edge = (
        np.isclose(b.real, -1)
        | np.isclose(b.real, 0)
        | np.isclose(b.imag, -1)
        | np.isclose(b.imag, 1)
    )
    assert on_edge.all()
    # all four edges show up
    assert np.isclose(b.real, -1).any() and np.isclose(b.real, 0).any()
    assert np.isclose(b.imag, -1).any() and np.isclose(b.imag, 1).any()


def test_annulus_two_contours_opposite_orientation():
    ds = discretize(annulus(0, 1, 2), COARSE)
    assert len(ds.contours) == 2
    assert sorted(c.orientation for c in ds.contours) == [-1, 1]
    roles = {c.role for c in ds.contours}
    assert roles == {"outer", "hole"}


@pytest.mark.parametrize("spec", all_specs())
def test_membership_of_every_sample(spec):
    ds = discretize(spec, COARSE)
    assert contains(spec, ds.all_samples(), tol=1e-12).all()


@pytest.mark.parametrize("spec", all_specs())
def test_contours_closed_with_positive_weight(spec):
    ds = discretize(spec, COARSE)
    assert len(ds.contours) >= 1
    for c in ds.contours:
        assert c.points[0] == c.points[-1]
        assert c.total_weight > 0


def test_cauchy_two_pi_i_default_density():
    cases = [
        (disc(-1, 0.5), -1 + 0.1j),
        (rectangle(-1 - 1j, 0 + 1j), -0.4 - 0.2j),
        (annulus(0, 1, 2), 1.5),
        (jordan_polygon([0, 2, 2 + 1j, 1j]), 1 + 0.5j),
    ]
    for spec, c in cases:
        ds = discretize(spec)  # default densities, per the stated guarantee
        total = sum(contour_integral(ct, lambda z: 1.0 / (z - c)) for ct in ds.contours)
        assert abs(total - 2j * cmath.pi) < 1e-8


def test_interior_points_excluded_by_annulus_hole():
    ds = discretize(annulus(0, 1, 2), COARSE)
    assert (np.abs(ds.interior_samples) >= 1 - 1e-9).all()


# --- translate / extent -------------------------------------------------------


@pytest.mark.parametrize("spec", all_specs())
def test_translate_action_composes(spec):
    u, v = 1.5 - 2j, -0.25 + 1j
    assert translate(translate(spec, u), v) == translate(spec, u + v)
    assert translate(spec, 0) == spec


def test_translate_moves_max_real_part():
    spec = disc(0, 1)
    assert max_real_part(translate(spec, -3)) == pytest.approx(-2)


def test_max_real_part_examples():
    assert max_real_part(disc(-1, 0.5)) == pytest.approx(-0.5)
    for m in (1, 2, 3):
        assert max_real_part(rectangle(complex(-m, -m), complex(0, m))) == 0.0


def test_max_real_part_polygon_matches_dense_sampling():
    p = jordan_polygon([0, 1 - 1j, 2 + 0.5j, 0.5 + 2j])
    ds = discretize(p, SampleDensity(boundary_spacing=0.002, interior_spacing=0.5))
    sampled = ds.boundary_samples.real.max()
    assert abs(max_real_part(p) - sampled) <= 0.002


def test_translate_into_left_halfplane():
    spec = rectangle(-1 - 1j, 0 + 1j)
    moved = translate(spec, complex(-0.5, 0))
    assert max_real_part(moved) < 0
    ds = discretize(moved, COARSE)
    assert ds.boundary_samples.real.max() < 0


# --- serialization -------------------------------------------------------------


@pytest.mark.parametrize("spec", all_specs())
def test_json_round_trip(spec):
    assert spec_from_json_dict(spec_to_json_dict(spec)) == spec


def test_malformed_json_rejected():
    with pytest.raises(InvalidInputError):
        spec_from_json_dict({"kind": "disc", "radius": 1.0})
    with pytest.raises(InvalidInputError):
        spec_from_json_dict({"kind": "blob"})


def test_csv_export_has_all_roles():
    csv = discretize(disc(0, 1), COARSE).to_csv()
    assert csv.splitlines()[0] == "role,re,im,weight_re,weight_im"
    assert "interior," in csv and "boundary," in csv and "contour-outer," in csv


# --- randomized membership consistency -----------------------------------------


@given(
    st.floats(-2, 2),
    st.floats(-2, 2),
    st.floats(0.1, 1.5),
    st.integers(0, 10**6),
)
@settings(max_examples=40, deadline=None)
def test_disc_membership_agrees_with_distance(cx, cy, r, seed):
    spec = disc(complex(cx, cy), r)
    rng = np.random.default_rng(seed)
    pts = complex(cx, cy) + (rng.standard_normal(50) + 1j * rng.standard_normal(50)) * r
    got = contains(spec, pts, tol=0)
    want = np.abs(pts - complex(cx, cy)) <= r
    assert (got == want).all()
