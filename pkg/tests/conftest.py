import math
import warnings

import pytest
from hypothesis import settings

from irsfso import (BeamParams, FootprintCenter, IrsConfig, Scenario, SphericalPose,
                    default_scenario, gain_coeffs)

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


def scaled_scenario(zeta=0.1):
    """2 cm IRS, 10 m / 20 m legs, lens radius chosen for a given ``zeta``.

    ``zeta`` is linear in the lens radius, so one evaluation at a0 = 1 fixes it.
    """
    base = Scenario(source=SphericalPose(10.0, math.pi / 8, 0.0),
                    lens=SphericalPose(20.0, math.pi / 2, math.pi),
                    irs=IrsConfig(0.02, 0.02), lens_radius=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        per_metre = gain_coeffs(base).zeta
    return base.replace(lens_radius=zeta / per_metre)


def collimated_scenario(theta_i, theta_r, d_r=None):
    """1 cm waist, 2 m source leg, 10 cm IRS: a beam that stays narrow."""
    s = Scenario(beam=BeamParams(w0=1e-2), source=SphericalPose(2.0, theta_i, 0.0),
                 lens=SphericalPose(1.0, theta_r, math.pi), irs=IrsConfig(0.1, 0.1),
                 footprint=FootprintCenter())
    if theta_i == theta_r:
        s = s.replace(irs=IrsConfig(0.1, 0.1, 0.0, 0.0))
    return s if d_r is None else s.with_lens_distance(d_r)


@pytest.fixture
def ref():
    return default_scenario()


@pytest.fixture
def scaled():
    return scaled_scenario()


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    def record(label, checks):
        ok = all(passed for _, passed in checks)
        detail = "; ".join(f"{text} [{'ok' if passed else 'FAIL'}]" for text, passed in checks)
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _VERDICTS.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
