"""
모델 파라미터, 드리프트/확산 계수, 형태 상수 테스트
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from tools.errors import DeterministicLimit, DomainError
from tools.models import (DriftScheme, ModelKind, ModelParams, diffusion_b, drift_a, load_model_config,
                          parse_kind, parse_scheme, shape_constants)


def test_drift_a_examples():
    assert drift_a(0.5, DriftScheme.ITO) == pytest.approx(0.25)
    assert drift_a(0.5, DriftScheme.ZERO) == 0.0
    assert drift_a(0.0, "ito") == 0.0


def test_diffusion_b_examples():
    assert diffusion_b(4.0, ModelKind.HESTON, ModelParams(gamma=1, theta=1, kappa=1)) == pytest.approx(2.0)
    assert diffusion_b(4.0, ModelKind.HULL_WHITE, ModelParams(gamma=1, theta=1, kappa=0.5)) == pytest.approx(2.0)
    for kind in ModelKind:
        assert diffusion_b(0.0, kind, ModelParams(gamma=1, theta=1, kappa=0.7)) == 0.0


def test_negative_variance_is_domain_error():
    params = ModelParams(gamma=1, theta=1, kappa=1)
    with pytest.raises(DomainError):
        drift_a(-0.1, DriftScheme.ITO)
    with pytest.raises(DomainError):
        diffusion_b(np.array([0.1, -0.1]), ModelKind.HESTON, params)


def test_drift_and_diffusion_monotone():
    v = np.linspace(0.0, 10.0, 101)
    params = ModelParams(gamma=1, theta=1, kappa=0.8)
    assert np.all(np.diff(drift_a(v, "ito")) >= 0)
    for kind in ModelKind:
        assert np.all(np.diff(diffusion_b(v, kind, params)) >= 0)


def test_shape_constants_examples():
    assert shape_constants(ModelParams(gamma=1, theta=1, kappa=math.sqrt(2)), ModelKind.HESTON) == pytest.approx(1.0)
    assert shape_constants(ModelParams(gamma=2, theta=0.5, kappa=1), ModelKind.HESTON) == pytest.approx(2.0)
    for kappa in (0.1, 1.0, 3.0):
        params = ModelParams(gamma=0.861 * kappa ** 2 / 2, theta=1.03, kappa=kappa)
        assert shape_constants(params, ModelKind.HULL_WHITE) == pytest.approx(0.861)


def test_shape_constants_rescaling_invariance():
    base = ModelParams(gamma=0.3, theta=0.7, kappa=0.4)
    for c in (0.01, 2.0, 50.0):
        scaled = ModelParams(gamma=c * base.gamma, theta=base.theta, kappa=math.sqrt(c) * base.kappa)
        for kind in ModelKind:
            assert shape_constants(scaled, kind) == pytest.approx(shape_constants(base, kind), rel=1e-12)


def test_kappa_zero_is_deterministic_limit():
    params = ModelParams(gamma=1, theta=0.5, kappa=0)
    assert params.deterministic
    with pytest.raises(DeterministicLimit) as info:
        shape_constants(params, ModelKind.HESTON)
    assert info.value.theta == 0.5


@pytest.mark.parametrize("field, value", [("gamma", 0.0), ("theta", -1.0), ("kappa", -0.1)])
def test_invalid_params_rejected(field, value):
    kwargs = {"gamma": 1.0, "theta": 1.0, "kappa": 1.0, field: value}
    with pytest.raises(ValidationError):
        ModelParams(**kwargs)


def test_flat_round_trip():
    params = ModelParams(gamma=0.2, theta=1.03, kappa=0.5, mu=4.35e-4, kind="heston", scheme="ito")
    flat = params.to_flat()
    assert flat["kind"] == "heston" and flat["scheme"] == "ito"
    assert ModelParams.from_flat(flat) == params


def test_from_flat_accepts_strings_and_rejects_unknown_keys():
    params = ModelParams.from_flat({"gamma": "1", "theta": "2", "kappa": "0.5", "kind": "HullWhite"})
    assert params.kind is ModelKind.HULL_WHITE
    with pytest.raises(ValueError):
        ModelParams.from_flat({"gamma": 1, "theta": 1, "kappa": 1, "sigma": 2})


def test_from_shape_inverts_shape_constants():
    hw = ModelParams.from_shape("hullwhite", 0.861, theta=1.03, kappa=0.3)
    assert hw.beta == pytest.approx(0.861)
    heston = ModelParams.from_shape("heston", 2.0, theta=0.5, kappa=0.8)
    assert heston.alpha == pytest.approx(2.0)


def test_parse_kind_rejects_unknown():
    with pytest.raises(ValueError):
        parse_kind("sabr")


@pytest.mark.parametrize("name", ["stratonovich", "hanggi"])
def test_parse_scheme_rejects_unimplemented_prescriptions(name):
    with pytest.raises(ValueError, match="supported: ito, zero"):
        parse_scheme(name)
    with pytest.raises(ValidationError):
        ModelParams(gamma=1.0, theta=1.0, kappa=1.0, kind="hullwhite", scheme=name)


def test_parse_scheme_aliases():
    assert parse_scheme("Zero-Drift") is DriftScheme.ZERO
    assert parse_scheme(" ITO ") is DriftScheme.ITO


def test_load_model_config_key_value_and_yaml(tmp_path):
    kv = tmp_path / "model.cfg"
    kv.write_text("# hull-white\ngamma=0.5\ntheta=1.03\nkappa=1\nscheme=zero\n", encoding="utf-8")
    params = load_model_config(kv)
    assert params.gamma == 0.5 and params.scheme is DriftScheme.ZERO

    yml = tmp_path / "model.yaml"
    yml.write_text("gamma: 1\ntheta: 1\nkappa: 1.4142135623730951\nkind: heston\n", encoding="utf-8")
    assert load_model_config(yml).alpha == pytest.approx(1.0)
