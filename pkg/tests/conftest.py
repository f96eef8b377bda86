import numpy as np
import pytest

from qaugment.qcore import embed

STANDARD_IMAGES = ("camera", "astronaut", "coins", "moon", "page")


def random_state(rng, n, complex_=True):
    amps = rng.standard_normal(1 << n)
    if complex_:
        amps = amps + 1j * rng.standard_normal(1 << n)
    return embed(amps.reshape(1, -1))


def product_state(rng, n):
    factors = [rng.standard_normal(2) + 1j * rng.standard_normal(2) for _ in range(n)]
    amps = np.ones(1, dtype=complex)
    for f in factors:  # qubit i ends up as bit i
        amps = np.kron(f, amps)
    return embed(amps.reshape(1, -1))


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def standard_images():
    """Five public test images as 256x256 grayscale float channels."""
    data = pytest.importorskip("skimage.data")
    from qaugment.spectral import prepare_image

    return {name: prepare_image(getattr(data, name)(), 256) for name in STANDARD_IMAGES}


@pytest.fixture(scope="session")
def cameraman():
    data = pytest.importorskip("skimage.data")
    from qaugment.spectral import prepare_image

    return prepare_image(data.camera(), 256)


ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def record_criterion(request):
    """Print and keep one PASS/FAIL line per acceptance criterion."""
    lines = request.config.stash.setdefault(ACCEPTANCE_KEY, [])

    def record(label, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=_criterion_order):
            terminalreporter.write_line(line)


def _criterion_order(line):
    label = line.split("criterion ", 1)[1].split(":", 1)[0]
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label
