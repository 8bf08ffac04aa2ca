from pathlib import Path

import numpy as np
import pytest

from partialqec.circuit import PhysicalCircuit
from partialqec.codes import steane_code
from partialqec.compiler import (CompileError, LogicalCircuit, LogicalGate, clifford_to_natives, compile_circuit,
                                 gate_depth)
from partialqec.density import dense_survival, ideal_logical_ptm, logical_process_tomography
from partialqec.experiments.mirror import mirrored_circuit

GOLDEN = Path(__file__).parent / "golden"
MIXED = "tags clean noisy noisy noisy\nCNOT@0,1 CNOT@2,3\nH@0 X@1 S@2 Y@3\n"


@pytest.mark.parametrize("kind,tags,depth", [
    ("H", ("noisy",), 1), ("X", ("noisy",), 2), ("Y", ("noisy",), 2), ("Z", ("noisy",), 0),
    ("S", ("noisy",), 0), ("Z", ("clean",), 0), ("S", ("clean",), 0), ("H", ("clean",), 1),
    ("X", ("clean",), 2), ("I", ("clean",), 1), ("CNOT", ("noisy", "noisy"), 1),
    ("CNOT", ("clean", "noisy"), 7), ("CNOT", ("noisy", "clean"), 7), ("CNOT", ("clean", "clean"), 7),
])
def test_gate_depths(kind, tags, depth):
    assert gate_depth(kind, tags) == depth


def test_native_decompositions():
    assert clifford_to_natives("X") == [("SX", None), ("SX", None)]
    assert [n for n, _ in clifford_to_natives("H")] == ["RZ", "SX", "RZ"]
    assert clifford_to_natives("S") == [("RZ", np.pi / 2)]
    with pytest.raises(CompileError):
        clifford_to_natives("T")


def test_golden_mixed_layers():
    phys = compile_circuit(LogicalCircuit.from_text(MIXED), steane_code())
    assert phys.to_text() == (GOLDEN / "mixed_two_layers.txt").read_text()
    assert PhysicalCircuit.from_text(phys.to_text()).to_text() == phys.to_text()


def test_tilde_layer_pads_the_noisy_cnot():
    phys = compile_circuit(LogicalCircuit.from_text("tags clean noisy noisy noisy\nCNOT@0,1 CNOT@2,3\n"))
    assert phys.depth == 7
    # noisy pair (8, 9) runs in step 0 and idles the other six
    assert [any(g.name == "CNOT" and g.qubits == (8, 9) for g in s.gates) for s in phys.steps] == [True] + [False] * 6
    assert sum(g.name == "I" and g.qubits[0] in (8, 9) for g in phys.gates()) == 12


def test_idle_count_matches_depth_difference():
    circ = LogicalCircuit(("noisy",) * 3, [[LogicalGate("X", (0,)), LogicalGate("H", (1,))]])
    phys = compile_circuit(circ)
    # layer depth 2; H idles 1 step, the untouched register idles 2
    assert phys.depth == 2 and phys.count("I") == 3
    assert compile_circuit(circ, idle_accounting=False).count("I") == 0


def test_compilation_is_deterministic():
    a = compile_circuit(LogicalCircuit.from_text(MIXED)).to_text()
    b = compile_circuit(LogicalCircuit.from_text(MIXED)).to_text()
    assert a == b


def test_noiseless_mirrors_survive(rng):
    for n_c in (0, 1):
        for _ in range(3):
            circ = mirrored_circuit(3, n_c, 2, rng)
            assert dense_survival(compile_circuit(circ)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kind", ["X", "Y", "Z", "H", "S", "SDG", "I"])
def test_noiseless_clean_gates_are_exact(kind):
    phys = compile_circuit(LogicalCircuit(("clean",), [[LogicalGate(kind, (0,))]]))
    R = logical_process_tomography(phys)
    np.testing.assert_allclose(R, ideal_logical_ptm(kind), atol=1e-9)


def test_noiseless_tilde_is_logical_cnot():
    phys = compile_circuit(LogicalCircuit(("noisy", "clean"), [[LogicalGate("CNOT", (0, 1))]]))
    np.testing.assert_allclose(logical_process_tomography(phys), ideal_logical_ptm("CNOT"), atol=1e-9)


def test_text_format_errors():
    with pytest.raises(CompileError):
        LogicalCircuit.from_text("H@0\n")
    with pytest.raises(CompileError):
        LogicalCircuit.from_text("tags noisy\nH0\n")
    with pytest.raises(CompileError):
        LogicalCircuit.from_text("tags noisy noisy\nH@0 CNOT@0,1\n")
    with pytest.raises(CompileError):
        LogicalCircuit(("fuzzy",))
    with pytest.raises(CompileError):
        compile_circuit(LogicalCircuit(("clean",), [[LogicalGate("SX", (0,))]]))
