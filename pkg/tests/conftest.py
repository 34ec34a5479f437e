import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

from qcorr.linalg import PAULI_PAIRS


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_hermitian(rng, n=4, scale=1.0):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (x + x.conj().T) / 2


def random_density(rng, rank=4):
    a = rng.normal(size=(4, rank)) + 1j * rng.normal(size=(4, rank))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_local_unitary(rng):
    ua = unitary_group.rvs(2, random_state=rng)
    ub = unitary_group.rvs(2, random_state=rng)
    return np.kron(ua, ub)


def unitary_conjugation(h, rho, t):
    u = expm(-1j * h * t)
    return u @ rho @ u.conj().T


def w_matrix_fano_bloch(rho):
    """W from the coefficients of sqrt(rho) in the Pauli product basis."""
    vals, vecs = np.linalg.eigh(rho)
    s = (vecs * np.sqrt(np.clip(vals, 0, None))) @ vecs.conj().T
    big = np.einsum("ij,abji->ab", s, PAULI_PAIRS).real
    common = 0.25 * sum(big[0, b] ** 2 - sum(big[k, b] ** 2 for k in (1, 2, 3)) for b in range(4))
    w = np.empty((3, 3))
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            if i == j:
                w[i - 1, j - 1] = common + 0.5 * np.sum(big[i] ** 2)
            else:
                w[i - 1, j - 1] = 0.5 * np.sum(big[i] * big[j])
    return w


def charpoly_roots(m):
    """Eigenvalues via Faddeev-LeVerrier coefficients and polynomial root finding."""
    n = m.shape[0]
    coeffs = [1.0 + 0j]
    mk = np.zeros_like(m)
    for k in range(1, n + 1):
        mk = m @ mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(m @ mk) / k)
    return np.sort(np.roots(coeffs).real)



# -- acceptance summary -------------------------------------------------------

# criterion number -> {"title", "ok", "notes"}
_CRITERIA_TABLE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    table = _CRITERIA_TABLE.setdefault(props["criterion"], {"title": props["title"], "ok": True, "notes": []})
    table["ok"] = table["ok"] and report.outcome == "passed"
    table["notes"].extend(v for k, v in report.user_properties if k == "detail")
    if report.outcome != "passed":
        table["notes"].append(f"{report.head_line.split('.')[-1]} failed")


@pytest.fixture
def criterion(request, record_property):
    """Tag a test with its acceptance criterion; returns a callback for a detail note."""
    marker = request.node.get_closest_marker("criterion")
    record_property("criterion", marker.args[0])
    record_property("title", marker.args[1])

    def note(text):
        record_property("detail", text)

    return note


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA_TABLE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA_TABLE):
        row = _CRITERIA_TABLE[num]
        status = "PASS" if row["ok"] else "FAIL"
        line = f"criterion {num}: {status}  {row['title']}"
        if row["notes"]:
            line += "  [" + "; ".join(row["notes"]) + "]"
        terminalreporter.write_line(line)
