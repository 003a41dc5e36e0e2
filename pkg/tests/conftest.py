import random
from fractions import Fraction

import pytest

from leviflat.bipoly import BiForm, GaussianRational, parse_form
from leviflat.cones import (Hypersurface, grassmann_cone_from_plane_curve, parse_curve,
                            pencil_cone, umbrella)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config._criteria = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        num, title = marker.args
        item.config._criteria.append((num, title, rep.outcome, rep.duration))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    rows = sorted(getattr(config, "_criteria", []))
    if not rows:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, outcome, duration in rows:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {num}: {status}  {title}  ({duration:.2f} s)")


# shared hypersurfaces ------------------------------------------------------------

@pytest.fixture(scope="session")
def pencil():
    return pencil_cone(parse_form("(1)*z1*w1 + (-1)*z2*w2", 3))


@pytest.fixture(scope="session")
def circle_cone():
    return grassmann_cone_from_plane_curve(parse_curve("implicit: x^2 + y^2 - 1"))


@pytest.fixture(scope="session")
def quartic_cone():
    return grassmann_cone_from_plane_curve(parse_curve("implicit: x*(x-1)*(x-2)*(x-3) + y^2"))


@pytest.fixture(scope="session")
def umb():
    return umbrella()


@pytest.fixture(scope="session")
def sphere():
    return Hypersurface(2, parse_form("(1)*z1*w1 + (1)*z2*w2 + (-1)", 3), 0, "sphere")


# random exact forms -------------------------------------------------------------------

def random_gaussian(rng, size=3):
    return GaussianRational(Fraction(rng.randint(-size, size), rng.randint(1, 3)),
                            Fraction(rng.randint(-size, size), rng.randint(1, 3)))


def random_exponent(rng, nvars, degree):
    exps = [0] * nvars
    for _ in range(degree):
        exps[rng.randrange(nvars)] += 1
    return tuple(exps)


def random_form(rng, nvars=3, terms=4, maxdeg=2):
    out = []
    for _ in range(terms):
        h = random_exponent(rng, nvars, rng.randint(0, maxdeg))
        a = random_exponent(rng, nvars, rng.randint(0, maxdeg))
        out.append(((h, a), random_gaussian(rng)))
    return BiForm(nvars, out)


def random_hermitian(rng, nvars, d, terms=4, support=None):
    """Hermitian (d, d) form; ``support`` restricts the variables used."""
    idx = list(range(nvars)) if support is None else list(support)
    f = BiForm.zero(nvars)
    for _ in range(terms):
        h = [0] * nvars
        a = [0] * nvars
        for _ in range(d):
            h[rng.choice(idx)] += 1
            a[rng.choice(idx)] += 1
        f = f + BiForm.monomial(tuple(h), tuple(a), random_gaussian(rng))
    return f + f.conj_transpose()


@pytest.fixture
def rng():
    return random.Random(20240611)
