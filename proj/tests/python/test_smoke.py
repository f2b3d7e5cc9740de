# Copyright 2026 The statematch developers
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import math
import os
import subprocess

import numpy as np
import pytest

import statematch as sm


def test_version():
    assert sm.__version__


def test_u_epsilon_is_unitary():
    u = sm.build_u_epsilon(0.8)
    assert np.allclose(u.conj().T @ u, np.eye(4), atol=1e-12)
    with pytest.raises(Exception):
        sm.build_u_epsilon(0.0)


def test_map_and_projection():
    z = sm.project_to_plane(sm.BlochState(math.pi / 2, 0.0))
    assert abs(z - 1.0) < 1e-12
    assert sm.project_to_plane(sm.BlochState(math.pi, 0.0)) is None  # infinity
    fz = sm.apply_map(0.5j, 0.5)
    assert abs(fz - (-0.5)) < 1e-15
    assert sm.apply_map(None, 0.5) is None


def test_ideal_state_after():
    state, p = sm.ideal_state_after(sm.BlochState(math.pi / 2, 0.0), 0.7, 1)
    assert abs(p - 0.3725) < 1e-12
    assert abs(state.theta - 2 * math.atan(1 / 0.7)) < 1e-12


def test_decomposition_roundtrip():
    kak = sm.decompose_epsilon(0.8)
    assert abs(kak.k0) < 1e-10
    assert abs(kak.k[0]) < 1e-10
    assert kak.k[1] < 0 and kak.k[2] < 0
    seq = sm.synthesize(kak, 0.8)
    assert seq.cnot_count == 2
    assert sm.verify_decomposition(seq, sm.build_u_epsilon(0.8)) <= 1e-9


def test_simulation_and_post_selection():
    circuit = sm.build_protocol_circuit(0.7, 1)
    state = sm.simulate_statevector(circuit, sm.BlochState(math.pi / 2, 0.0))
    p, (p00, p10) = sm.post_select_exact(np.abs(state) ** 2, circuit)
    assert abs(p - 0.3725) < 1e-12
    assert abs(sm.estimate_theta1(500, 500) - math.pi / 2) < 1e-12

    counts = sm.run_statevector(circuit, sm.BlochState(1.0, 0.3), 4096, 11)
    assert sum(counts.counts.values()) == 4096
    again = sm.run_statevector(circuit, sm.BlochState(1.0, 0.3), 4096, 11)
    assert counts.counts == again.counts


def test_density_damping_monotonicity():
    circuit = sm.build_protocol_circuit(0.7, 1)
    state = sm.BlochState(1.0, 0.2)
    clean, _ = sm.post_select_exact(
        sm.run_density_exact(circuit, state, 0.0), circuit)
    noisy, _ = sm.post_select_exact(
        sm.run_density_exact(circuit, state, 0.05), circuit)
    assert noisy > clean


def test_mitigation_roundtrip():
    q = 0.03
    per_qubit = np.array([[1 - q, q], [q, 1 - q]])
    confusion = np.kron(per_qubit, per_qubit)
    p = np.array([0.4, 0.1, 0.3, 0.2])
    corrected = sm.mitigate(confusion @ p, confusion)
    assert np.allclose(corrected, p, atol=1e-9)


def test_sweep_csv_from_config():
    csv = sm.run_sweep_config_json(json.dumps({
        "epsilon": 0.7,
        "theta0": {"count": 2, "min": 0.2, "max": 1.0},
        "phi0": {"count": 2},
        "shots": 128,
        "seed": 7,
    }))
    lines = csv.strip().split("\n")
    assert lines[0] == "# statematch-sweep/1"
    assert len(lines) == 2 + 4  # schema, header, 4 records


@pytest.mark.skipif("STATEMATCH_CLI" not in os.environ,
                    reason="CLI path not provided")
def test_cli_determinism(tmp_path):
    cli = os.environ["STATEMATCH_CLI"]
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "epsilon": [0.7],
        "theta0": {"count": 3, "min": 0.0, "max": 1.5},
        "phi0": {"policy": "random", "count": 2},
        "shots": 512,
        "seed": 20220804,
    }))
    for run in ("a", "b"):
        result = subprocess.run(
            [cli, "sweep", "--config", str(config), "--out",
             str(tmp_path / run)],
            capture_output=True, text=True)
        assert result.returncode == 0, result.stderr
    csv_a = (tmp_path / "a" / "sweep.csv").read_bytes()
    csv_b = (tmp_path / "b" / "sweep.csv").read_bytes()
    assert csv_a == csv_b

    plot = subprocess.run(
        [cli, "plot", "--input", str(tmp_path / "a" / "sweep.csv"),
         "--kind", "success", "--out", str(tmp_path / "plot.svg")],
        capture_output=True, text=True)
    assert plot.returncode == 0, plot.stderr
    svg = (tmp_path / "plot.svg").read_text()
    assert "statematch-data" in svg


@pytest.mark.skipif("STATEMATCH_CLI" not in os.environ,
                    reason="CLI path not provided")
def test_cli_usage_errors(tmp_path):
    cli = os.environ["STATEMATCH_CLI"]
    bad = subprocess.run([cli, "decompose", "--epsilon", "0.0"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
    good = subprocess.run(
        [cli, "decompose", "--epsilon", "0.9", "--out",
         str(tmp_path / "g.json")],
        capture_output=True, text=True)
    assert good.returncode == 0
    payload = json.loads((tmp_path / "g.json").read_text())
    assert payload["cnot_count"] == 2
    assert payload["residual"] <= 1e-9
