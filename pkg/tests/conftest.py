import numpy as np
import pytest

# Dense reference matrices written out by hand; qubit 0 is the leftmost kron factor.
I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1, -1]).astype(complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S = np.diag([1, 1j])
SDG = np.diag([1, -1j])
SX = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]]) / 2
LETTER = {"I": I2, "X": X, "Y": Y, "Z": Z}
ONE_QUBIT = {"I": I2, "X": X, "Y": Y, "Z": Z, "H": H, "S": S, "SDG": SDG, "SX": SX}


def kron_all(mats):
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def embed(u, qubits, n):
    """Dense operator of a 1- or 2-qubit gate ``u`` on ``qubits`` of ``n``."""
    if len(qubits) == 1:
        return kron_all([u if q == qubits[0] else I2 for q in range(n)])
    c, t = qubits
    p0 = np.diag([1, 0]).astype(complex)
    p1 = np.diag([0, 1]).astype(complex)
    a = kron_all([p0 if q == c else I2 for q in range(n)])
    b = kron_all([p1 if q == c else (X if q == t else I2) for q in range(n)])
    return a + b


def gate_unitary(name, qubits, n, param=None):
    if name == "CNOT":
        return embed(None, qubits, n)
    if name == "RZ":
        u = np.diag([np.exp(-0.5j * param), np.exp(0.5j * param)])
        return embed(u, qubits, n)
    return embed(ONE_QUBIT[name], qubits, n)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
