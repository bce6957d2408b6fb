import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulertop import catalog
from eulertop.model import InertiaParams
from eulertop.perturbation import (
    SEMISPHERE_NAMES,
    CrossProductSpec,
    DomainError,
    PerturbedSystem,
    SemisphereSpec,
    SpecError,
    TangencyError,
    TangentFieldSpec,
    dump_spec,
    load_spec,
    split_x3_form,
    system_from_dict,
    system_to_dict,
    tangency_residual,
)
from eulertop.polynomial import Poly3

P3 = InertiaParams(3, 2, 1)


def test_non_tangent_field_rejected():
    A, B, C = catalog.nontangent_control()
    with pytest.raises(TangencyError):
        TangentFieldSpec(A, B, C)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_cross_products_are_tangent(seed, m):
    rng = np.random.default_rng(seed)
    L, M, N = (catalog.random_poly(rng, m - 1) for _ in range(3))
    A, B, C = CrossProductSpec(L, M, N).components()
    assert tangency_residual(A, B, C).is_zero()


def test_named_fields_are_tangent():
    for spec in (catalog.example2_field(3), catalog.example1_field(2, -1)):
        assert tangency_residual(*spec.components()).is_zero()


def test_semisphere_flux_vanishes_only_on_its_sphere():
    rng = np.random.default_rng(0)
    spec = catalog.random_semisphere(rng, 4, Fraction(3, 2))
    spec = SemisphereSpec(spec.P, spec.Q, Poly3.parse("1 + x1*z", SEMISPHERE_NAMES), spec.c)
    flux = spec.flux()
    v = rng.normal(size=3)
    on = 1.5 * v / np.linalg.norm(v)
    off = 1.9 * v / np.linalg.norm(v)
    assert abs(flux.eval(tuple(on))) < 1e-12
    assert abs(flux.eval(tuple(off))) > 1e-3
    # the float field agrees with the polynomial form of x3*C
    f = spec.field(off)
    assert off[2] * f[2] == pytest.approx(spec.x3_times_c().eval(tuple(off)), rel=1e-12)
    assert off @ f == pytest.approx(flux.eval(tuple(off)), rel=1e-10)


def test_semisphere_domain():
    spec = SemisphereSpec(Poly3.parse("x1"), Poly3(), Poly3.parse("1"), 1)
    with pytest.raises(DomainError):
        spec.field(np.array([0.5, 0.5, 0.0]))
    with pytest.raises(DomainError):
        spec.field(np.array([0.5, 0.5, 1e-14]))
    with pytest.raises(SpecError):
        SemisphereSpec(Poly3(), Poly3(), Poly3(), 0)


def test_split_x3_form():
    A = Poly3.parse("x1*x3 + 2*x2*x3^3")
    assert split_x3_form(A) == Poly3.parse("x1 + 2*x2*x3")
    with pytest.raises(ValueError):
        split_x3_form(Poly3.parse("x1*x3^2"))


def test_perturbed_system_field():
    spec = catalog.example2_field(1)
    s = np.array([0.2, -0.4, 0.9])
    sys0 = PerturbedSystem(P3, spec)
    sys1 = sys0.with_epsilon(0.5)
    np.testing.assert_allclose(sys1.field(s) - sys0.field(s), 0.5 * spec.field(s))
    assert sys1.rhs(0.0, s) is not None
    with pytest.raises(SpecError):
        PerturbedSystem(P3, SemisphereSpec(Poly3(), Poly3(), Poly3(), 1), c=2)


@pytest.mark.parametrize("system", [
    PerturbedSystem(P3, catalog.example2_field(Fraction(1, 10)), 0.01, Fraction(3, 2)),
    PerturbedSystem(P3, catalog.example1_field(1, 2)),
    PerturbedSystem(P3, CrossProductSpec(Poly3.parse("x1*x2"), Poly3.parse("x3^2"), Poly3.parse("1/3*x3"))),
    PerturbedSystem(P3, SemisphereSpec(Poly3.parse("x1*z - 2", SEMISPHERE_NAMES), Poly3.parse("x2^2"),
                                       Poly3.parse("z", SEMISPHERE_NAMES),
                                       Fraction(5, 2))),
])
def test_spec_round_trip(system, tmp_path):
    text = dump_spec(system, tmp_path / "s.json")
    back = load_spec(tmp_path / "s.json")
    assert back == system
    assert dump_spec(back) == text
    assert system_from_dict(json.loads(text)) == system


@pytest.mark.parametrize("payload, match", [
    ({"kind": "tangent", "A": "x1", "B": "x2", "C": "x3", "params": {"mu": [3, 2, 1]}}, "not identically zero"),
    ({"kind": "blob", "params": {"mu": [3, 2, 1]}}, "unknown"),
    ({"kind": "semisphere", "P": "0", "Q": "0", "R": "0", "params": {"mu": [3, 2, 1]}}, "radius"),
    ({"kind": "cross_product", "L": "x1", "M": "0", "params": {"mu": [3, 2, 1]}}, "missing"),
    ({"kind": "cross_product", "L": "x1", "M": "0", "N": "0", "params": {"mu": [1, 3, 2]}}, "saddle"),
    ({"kind": "cross_product", "L": "x1", "M": "0", "N": "0", "params": {"mu": [1, 3]}}, "three"),
    ({"kind": "cross_product", "L": "x1 +", "M": "0", "N": "0", "params": {"mu": [3, 2, 1]}}, "polynomial"),
    ({"kind": "tangent", "A": "0", "B": "0", "C": "0", "c": -1, "params": {"mu": [3, 2, 1]}}, "radius"),
])
def test_invalid_specs(payload, match):
    with pytest.raises(SpecError, match=match):
        system_from_dict(payload)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(SpecError):
        load_spec(p)


def test_system_dict_carries_params():
    d = system_to_dict(PerturbedSystem(P3, catalog.example2_field(1), 0.25, 2))
    assert d["params"]["mu"] == [3, 2, 1] and d["epsilon"] == 0.25 and d["c"] == 2
