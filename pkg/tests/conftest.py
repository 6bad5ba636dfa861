import numpy as np
import pytest
from scipy.stats import unitary_group

from multient.gaussian import passive_symplectic, symplectic_form


def eig_spectrum(v):
    """Independent route: moduli of the eigenvalues of i Omega V, each pair counted once."""
    v = np.asarray(v, dtype=float)
    n = v.shape[0] // 2
    ev = np.abs(np.linalg.eigvals(1j * symplectic_form(n) @ v))
    return np.sort(ev)[::-1][::2]


def random_unitary(n, rng):
    if n == 1:
        return np.exp(1j * rng.uniform(0, 2 * np.pi, (1, 1)))
    return unitary_group.rvs(n, random_state=rng)


def random_symplectic(n, rng, max_squeeze=1.0):
    """Passive * squeeze * passive, the general form of a symplectic matrix."""
    u1 = random_unitary(n, rng)
    u2 = random_unitary(n, rng)
    r = rng.uniform(-max_squeeze, max_squeeze, n)
    sq = np.diag(np.r_[np.exp(r), np.exp(-r)])
    return passive_symplectic(u1) @ sq @ passive_symplectic(u2)


def random_physical(n, rng, max_squeeze=1.0):
    """Random mixed Gaussian covariance S diag(nu, nu) S^T with nu >= 1."""
    s = random_symplectic(n, rng, max_squeeze)
    nu = 1.0 + rng.exponential(1.0, n)
    v = s @ np.diag(np.r_[nu, nu]) @ s.T
    return 0.5 * (v + v.T), np.sort(nu)[::-1]


def epr(r):
    """Two-mode squeezed vacuum in the xxyy ordering."""
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    return np.array([[c, s, 0, 0], [s, c, 0, 0], [0, 0, c, -s], [0, 0, -s, c]])


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


ACCEPTANCE_LINES = []


def record_acceptance(number, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number:>2}: {detail}"
    ACCEPTANCE_LINES.append((number, line))
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
