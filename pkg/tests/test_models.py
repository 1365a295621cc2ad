import numpy as np
import pytest

from memenergy.constitutive import affine, polynomial, table
from memenergy.models import (
    KINDS,
    MemelementModel,
    SingularityError,
    firestone_memcapacitor,
    mem_inerter,
    memcapacitor_charge_controlled,
    memcapacitor_voltage_controlled,
    meminductor_current_controlled,
    meminductor_flux_controlled,
    model_from_dict,
)
from memenergy.signals import fourier
from memenergy.sim import integrate


def all_models():
    return [
        memcapacitor_voltage_controlled(polynomial([0, 1, 0, 0.2], (-2, 2), "rho-of-phi")),
        memcapacitor_charge_controlled(polynomial([0, 1, 0, 1], (-2, 2), "phi-of-rho")),
        meminductor_current_controlled(polynomial([0, 2, 0.1], (-2, 2), "sigma-of-q")),
        meminductor_flux_controlled(table([(-2, -3), (0, 0), (2, 3)], "q-of-sigma")),
        mem_inerter(9381.7, 0.1),
    ]


def test_inerter_drift_and_output(inerter):
    # B(0) = 469.085 kg, so p = 469.085 N s gives v = 1 m/s
    d = inerter.drift((0.0, 469.085))
    assert d[0] == pytest.approx(1.0, rel=1e-12)
    assert d[1] == 0.0
    assert inerter.output((0.0, 469.085)) == pytest.approx(1.0, rel=1e-12)


def test_charge_controlled_zero_charge():
    m = memcapacitor_charge_controlled(polynomial([0, 1, 0, 1], (-10, 10), "phi-of-rho"))
    assert list(m.drift((5.0, 0.0))) == [0.0, 0.0]


def test_flux_controlled_rate():
    m = meminductor_flux_controlled(polynomial([0, 1, 0.5], (-3, 3), "q-of-sigma"))
    assert list(m.drift((1.0, 2.0))) == [2.0, 0.0]


def test_linear_capacitor_output():
    m = memcapacitor_charge_controlled(affine(0.0, 0.5, (-10, 10), "phi-of-rho"))
    assert m.output((3.3, 2.0)) == 1.0


def test_linear_inductor_output():
    m = meminductor_current_controlled(affine(0.0, 2.0, (-10, 10), "sigma-of-q"))
    assert m.output((7.0, 4.0)) == 2.0


@pytest.mark.parametrize("model", all_models(), ids=lambda m: m.kind)
def test_structure(model):
    assert np.array_equal(model.input_direction(), [0.0, 1.0])
    assert len(model.state_labels) == 2
    x = (0.01, 0.3)
    assert model.drift(x).shape == (2,)
    assert model.drift(x)[1] == 0.0


def test_labels():
    assert KINDS["memcap-voltage-controlled"].states == (("phi", "Wb"), ("q", "C"))
    assert KINDS["mem-inerter"].input == ("F", "N")
    assert KINDS["memind-flux-controlled"].output == ("I", "A")


def test_role_mismatch_rejected():
    with pytest.raises(ValueError, match="role"):
        MemelementModel("memcap-charge-controlled", affine(0, 1, (0, 1), "rho-of-phi"))


def test_singularity_reports_state(inerter):
    with pytest.raises(SingularityError) as err:
        inerter.drift((0.06, 1.0))
    assert err.value.state == (0.06, 1.0)
    # non-positive capacitance inside the domain
    m = memcapacitor_voltage_controlled(polynomial([0, -1, 0, 1], (-2, 2), "rho-of-phi"))
    with pytest.raises(SingularityError, match="not positive"):
        m.output((0.0, 1.0))


def test_affine_models_are_linear():
    m = memcapacitor_charge_controlled(affine(0.3, 1.7, (-10, 10), "phi-of-rho"))
    for q in (-2.0, 0.5, 3.0):
        assert m.output((1.0, q)) == pytest.approx(1.7 * q)
        assert m.output((-4.0, q)) == pytest.approx(1.7 * q)


def test_firestone_mapping_bit_identical(inerter, rng):
    cap = firestone_memcapacitor(inerter)
    assert cap.kind == "memcap-voltage-controlled"
    z = rng.uniform(-0.05, 0.0499, 500)
    p = rng.uniform(-10, 10, 500)
    ri, yi = inerter.rates(z, p)
    rc, yc = cap.rates(z, p)
    assert np.array_equal(ri, rc) and np.array_equal(yi, yc)
    assert np.array_equal(inerter.input_direction(), cap.input_direction())


def test_duality_voltage_memcap_current_memind():
    coeffs = [0.0, 1.0, 0.0, 0.3]
    cap = memcapacitor_voltage_controlled(polynomial(coeffs, (-2, 2), "rho-of-phi"))
    ind = meminductor_current_controlled(polynomial(coeffs, (-2, 2), "sigma-of-q"))
    sig = fourier(1.0, [(1, 0.0, 0.4), (2, 0.2, -0.1)]).with_duration(2 * np.pi)
    a = integrate(cap, sig, (0.1, 0.0), 2 * np.pi / 2000)
    b = integrate(ind, sig, (0.1, 0.0), 2 * np.pi / 2000)
    assert np.array_equal(a.x, b.x)
    assert np.array_equal(a.energy, b.energy)
    assert a.labels == ("phi", "q", "I", "V") and b.labels == ("q", "phi", "V", "I")


def test_model_from_dict():
    m = model_from_dict({"kind": "mem-inerter", "b0_kg": 9381.7, "w_m": 0.1})
    assert m == mem_inerter(9381.7, 0.1)
    m = model_from_dict({"kind": "memcap-charge-controlled",
                         "curve": {"form": "polynomial", "coeffs": [0, 1, 0, 1], "domain": [-2, 2]}})
    assert m.curve.role == "phi-of-rho"
    with pytest.raises(ValueError, match="kind"):
        model_from_dict({"kind": "memristor"})
    with pytest.raises(ValueError, match="unknown key"):
        model_from_dict({"kind": "mem-inerter", "b0_kg": 1, "w_m": 1, "mass": 3})
