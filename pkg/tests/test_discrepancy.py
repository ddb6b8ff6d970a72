import numpy as np
import pytest

from thinbrink.discrepancy import (discrepancy_report, literal_flow_factor, literal_smooth_temperature,
                                   literal_temperature_fixed_top, literal_V1, literal_V2, reference_temperature)
from thinbrink.params import make_params
from thinbrink.profile import flow_factor


def test_literal_flow_factor_differs():
    # the two numerators differ by 2 e^{-Mh}-type terms; relative gap is huge for thin films
    assert literal_flow_factor(1.0, 1.0) != pytest.approx(flow_factor(1.0, 1.0), rel=1e-2)
    assert literal_flow_factor(100.0, 1.0) == pytest.approx(flow_factor(100.0, 1.0), rel=1e-6)


def test_reference_temperature_bcs():
    p = make_params(1, 1, 1, 1, b=1.0)
    T = reference_temperature(np.array([0.0, 1.0]), 1.0, 0.0, p)
    np.testing.assert_allclose(T, [1.0, 0.0], atol=1e-14)


def test_literal_temperature_structure():
    p = make_params(1, 1, 1, 1, b=1.0)
    # with no dissipation the fixed-top form is the constant -b/k instead of (b/k)(h - z3)
    np.testing.assert_allclose(literal_temperature_fixed_top(np.array([0.0, 0.5]), 1.0, 0.0, p), -1.0)
    np.testing.assert_allclose(literal_smooth_temperature(np.array([0.0, 0.5]), 1.0, 0.0, p), 0.0)
    assert literal_V2(1.0, 1.0, 1.0) == pytest.approx(0.0, abs=1e-15)
    assert literal_V1(1.0, 1.0, 0.0) == 0.0


def test_report_rows_frozen():
    rows = {r[0]: r for r in discrepancy_report(make_params(1, 1, 1, 1, b=0.0))}
    assert set(rows) == {"flow_factor_minus2", "temperature_fixed_top", "smooth_temperature_V1V2",
                         "smooth_temperature_V1V2_corrected"}
    assert rows["temperature_fixed_top"][3] == pytest.approx(0.07576568547998033, rel=1e-8)
    assert rows["smooth_temperature_V1V2"][3] == pytest.approx(4.129739392808106, rel=1e-8)
    assert rows["smooth_temperature_V1V2_corrected"][3] == pytest.approx(0.6931757358900147, rel=1e-8)
