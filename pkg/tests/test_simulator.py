import io
import math

import numpy as np
import pytest
import scipy.linalg

from lrfanout import simulator
from lrfanout.exceptions import CapacityError
from lrfanout.lattice import assign_qubits, build_lattice
from lrfanout.protocols import plan_broadcast, plan_fanout, reverse_schedule
from lrfanout.schedule import (
    ProtocolSchedule,
    Pulse,
    ScheduleLayer,
    cnot_pulse,
    local_pulse,
    multicontrol_pulse,
)

LAY4 = build_lattice(1, [4])


def dense_pulse_hamiltonian(pulse, n):
    """Independent oracle: build sum_i h_i |1><1|_i (x) X_t as a dense matrix."""
    dim = 1 << n
    h = np.zeros((dim, dim), dtype=complex)
    tshift = n - 1 - pulse.target
    for y in range(dim):
        coeff = 0.0
        for site, strength in zip(pulse.control_sites, pulse.control_strengths):
            if (y >> (n - 1 - int(site))) & 1:
                coeff += strength
        h[y ^ (1 << tshift), y] += coeff
    return h


def correction_matrix(pulse, n):
    dim = 1 << n
    d = np.ones(dim, dtype=complex)
    shift = n - 1 - pulse.designated_control
    for y in range(dim):
        if (y >> shift) & 1:
            d[y] = 1j
    return np.diag(d)


def test_completed_cnot_truth_table():
    p = cnot_pulse(0, 1, LAY4, 1.0)
    for x in range(2):
        for y in range(2):
            state = simulator.basis_state(4, (x << 3) | (y << 2))
            out = simulator.apply_pulse(state, p)
            expect = simulator.basis_state(4, (x << 3) | ((y ^ x) << 2))
            assert simulator.state_fidelity(out, expect) == pytest.approx(1.0, abs=1e-14)


def test_half_duration_pulse_value():
    p = cnot_pulse(0, 1, build_lattice(1, [2]), 1.0)
    half = Pulse(
        kind="cx",
        control_sites=p.control_sites,
        control_strengths=p.control_strengths,
        target=p.target,
        duration=p.duration / 2,
        phase_fix=False,
    )
    out = simulator.apply_pulse(simulator.basis_state(2, 0b10), half)
    expect = np.zeros(4, dtype=complex)
    expect[0b10] = 1 / math.sqrt(2)
    expect[0b11] = -1j / math.sqrt(2)
    assert np.abs(out.amps - expect).max() < 1e-14


@pytest.mark.parametrize("seed", range(5))
def test_pulse_against_expm_oracle(seed):
    rng = np.random.default_rng(seed)
    n = 5
    lay = build_lattice(1, [n])
    target = int(rng.integers(n))
    others = [s for s in range(n) if s != target]
    controls = rng.choice(others, size=rng.integers(1, 4), replace=False)
    p = multicontrol_pulse(controls, target, lay, 1.3)
    partial = Pulse(
        kind="cx",
        control_sites=p.control_sites,
        control_strengths=p.control_strengths,
        target=p.target,
        duration=p.duration * float(rng.uniform(0.2, 1.0)),
        phase_fix=bool(rng.integers(2)),
    )
    h = dense_pulse_hamiltonian(partial, n)
    u = scipy.linalg.expm(-1j * partial.duration * h)
    if partial.phase_fix:
        u = correction_matrix(partial, n) @ u
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    state = simulator.StateVector(n, amps)
    out = simulator.apply_pulse(state, partial)
    assert np.abs(out.amps - u @ amps).max() < 1e-12


def test_run_schedule_fanout_basis_input():
    lay = build_lattice(1, [6])
    asgn = assign_qubits(lay, 3, ancillas=True)
    sched = plan_fanout(asgn, 1.0).to_schedule()
    # data qubits at sites 0, 2, 4; control d1 = site 0 set to |1>
    state = simulator.basis_state(6, 1 << 5)
    out = simulator.run_schedule(state, sched)
    expect_index = (1 << 5) | (1 << 3) | (1 << 1)  # all data 1, ancillae 0
    expect = simulator.basis_state(6, expect_index)
    assert simulator.state_fidelity(out, expect) == pytest.approx(1.0, abs=1e-12)


def test_run_schedule_broadcast_map():
    asgn = assign_qubits(build_lattice(1, [6]), 6)
    sched = plan_broadcast(asgn, 1.0, root=0).to_schedule()
    rng = np.random.default_rng(7)
    pair = rng.normal(size=2) + 1j * rng.normal(size=2)
    pair /= np.linalg.norm(pair)
    state = simulator.product_state([pair] + [(1, 0)] * 5)
    out = simulator.run_schedule(state, sched)
    target = np.zeros(64, dtype=complex)
    target[0] = pair[0]
    target[63] = pair[1]
    assert abs(np.vdot(target, out.amps)) ** 2 >= 1 - 1e-10


def test_empty_schedule_is_identity():
    state = simulator.basis_state(3, 5)
    out = simulator.run_schedule(state, ProtocolSchedule([]))
    assert np.array_equal(out.amps, state.amps)


def test_schedule_unitary_single_cnot():
    lay = build_lattice(1, [2])
    sched = ProtocolSchedule([ScheduleLayer([cnot_pulse(0, 1, lay, 1.0)])])
    u = simulator.schedule_unitary(sched, 2)
    cnot = np.eye(4)[:, [0, 1, 3, 2]]
    assert np.abs(u - cnot).max() < 1e-12


def test_schedule_then_reverse_is_identity():
    asgn = assign_qubits(build_lattice(1, [6]), 6)
    plan = plan_broadcast(asgn, 4.0, root=2)  # cascade: exact inverse everywhere
    sched = plan.to_schedule()
    combined = sched.concat(reverse_schedule(sched))
    u = simulator.schedule_unitary(combined, 6)
    assert simulator.operator_norm(u - np.eye(64)) < 1e-10


@pytest.mark.parametrize("n", [2, 3])
def test_fanout_unitary_matches_ideal(n):
    lay = build_lattice(1, [2 * n])
    asgn = assign_qubits(lay, n, ancillas=True)
    sched = plan_fanout(asgn, 1.0).to_schedule()
    u = simulator.schedule_unitary(sched, 2 * n)
    restricted = simulator.restrict_to_zero(u, 2 * n, [int(s) for s in asgn.data_sites])
    err = simulator.phase_aligned_error(restricted, simulator.ideal_fanout(n))
    assert err < 1e-10


@pytest.mark.parametrize("dim,extents,n", [(2, [4, 2], 4), (3, [2, 2, 2], 4)])
def test_fanout_unitary_matches_ideal_higher_dim(dim, extents, n):
    lay = build_lattice(dim, extents)
    asgn = assign_qubits(lay, n, ancillas=True)
    sched = plan_fanout(asgn, 1.5).to_schedule()
    u = simulator.schedule_unitary(sched, lay.n_sites)
    restricted = simulator.restrict_to_zero(u, lay.n_sites, [int(s) for s in asgn.data_sites])
    err = simulator.phase_aligned_error(restricted, simulator.ideal_fanout(n))
    assert err < 1e-10


def test_ideal_fanout_actions():
    f = simulator.ideal_fanout(3)
    v = np.zeros(8)
    v[0b100] = 1.0
    assert np.argmax(np.abs(f @ v)) == 0b111
    v2 = np.zeros(8)
    v2[0b001] = 1.0
    assert np.argmax(np.abs(f @ v2)) == 0b001
    plus = np.zeros(8)
    plus[0b000] = plus[0b100] = 1 / math.sqrt(2)
    ghz = f @ plus
    expect = np.zeros(8)
    expect[0b000] = expect[0b111] = 1 / math.sqrt(2)
    assert np.abs(ghz - expect).max() < 1e-15


def test_state_fidelity_properties():
    a = simulator.basis_state(3, 2)
    assert simulator.state_fidelity(a, a) == 1.0
    b = simulator.basis_state(3, 5)
    assert simulator.state_fidelity(a, b) == 0.0
    phased = simulator.StateVector(3, np.exp(1j * 0.37) * a.amps)
    assert simulator.state_fidelity(a, phased) == pytest.approx(1.0, abs=1e-14)
    with pytest.raises(ValueError):
        simulator.state_fidelity(a, simulator.basis_state(2, 0))


@pytest.mark.parametrize("n,alpha", [(6, 1.0), (8, 0.5), (10, 2.0)])
def test_norm_preservation(n, alpha):
    rng = np.random.default_rng(n)
    asgn = assign_qubits(build_lattice(1, [n]), n)
    sched = plan_broadcast(asgn, alpha, root=0).to_schedule()
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    out = simulator.run_schedule(simulator.StateVector(n, amps), sched)
    assert abs(np.linalg.norm(out.amps) - 1.0) < 1e-10


def test_layer_order_independence():
    lay = build_lattice(1, [6])
    pulses = [
        multicontrol_pulse([0, 1], 2, lay, 1.0),
        multicontrol_pulse([0, 1], 3, lay, 1.0),
        multicontrol_pulse([0, 1], 4, lay, 1.0),
    ]
    rng = np.random.default_rng(9)
    amps = rng.normal(size=64) + 1j * rng.normal(size=64)
    amps /= np.linalg.norm(amps)
    ref = None
    for perm in ([0, 1, 2], [2, 1, 0], [1, 2, 0]):
        sched = ProtocolSchedule([ScheduleLayer([pulses[i] for i in perm])])
        out = simulator.run_schedule(simulator.StateVector(6, amps.copy()), sched)
        if ref is None:
            ref = out.amps
        else:
            assert np.linalg.norm(out.amps - ref) < 1e-12


def test_ancilla_uncomputation_random_products():
    lay = build_lattice(1, [8])
    asgn = assign_qubits(lay, 4, ancillas=True)
    sched = plan_fanout(asgn, 1.5).to_schedule()
    rng = np.random.default_rng(21)
    data = {int(s) for s in asgn.data_sites}
    for _ in range(10):
        pairs = [
            rng.normal(size=2) + 1j * rng.normal(size=2) if s in data else (1, 0)
            for s in range(8)
        ]
        out = simulator.run_schedule(simulator.product_state(pairs), sched)
        prob = simulator.ancilla_zero_probability(out, asgn.ancilla_sites)
        assert prob >= 1 - 1e-10


def test_caps():
    with pytest.raises(CapacityError):
        simulator.schedule_unitary(ProtocolSchedule([]), 13)
    with pytest.raises(CapacityError):
        simulator.zero_state(25)
    with pytest.raises(IndexError):
        simulator.apply_pulse(simulator.zero_state(2), cnot_pulse(1, 3, LAY4, 1.0))


def test_local_gate_actions():
    state = simulator.basis_state(2, 0b10)
    out = simulator.apply_pulse(state, local_pulse("h", 0))
    expect = np.zeros(4, dtype=complex)
    expect[0b00] = 1 / math.sqrt(2)
    expect[0b10] = -1 / math.sqrt(2)
    assert np.abs(out.amps - expect).max() < 1e-14
    out2 = simulator.apply_pulse(state, local_pulse("s", 0))
    assert out2.amps[0b10] == pytest.approx(1j)
    out3 = simulator.apply_pulse(out2, local_pulse("sdg", 0))
    assert simulator.state_fidelity(out3, state) == pytest.approx(1.0, abs=1e-14)
    out4 = simulator.apply_pulse(state, local_pulse("x", 0))
    assert abs(out4.amps[0b00]) == pytest.approx(1.0, abs=1e-14)


def test_dump_formats():
    state = simulator.product_state([(1, 1j)])
    buf = io.StringIO()
    simulator.dump_state(state, buf)
    lines = buf.getvalue().strip().splitlines()
    assert len(lines) == 2
    idx, re, im = lines[1].split()
    assert idx == "1" and float(re) == pytest.approx(0.0) and float(im) == pytest.approx(1 / math.sqrt(2))
    buf2 = io.StringIO()
    simulator.dump_matrix(np.eye(2, dtype=complex), buf2)
    assert len(buf2.getvalue().strip().splitlines()) == 4


def test_restrict_to_zero_block():
    # 2-qubit unitary acting as X on qubit 1 when qubit 0 is |0>:
    # restriction to qubit 1 (qubit 0 pinned to |0>) picks the X block
    u = np.zeros((4, 4), dtype=complex)
    u[0b01, 0b00] = u[0b00, 0b01] = 1.0
    u[0b10, 0b10] = u[0b11, 0b11] = 1.0
    block = simulator.restrict_to_zero(u, 2, [1])
    assert np.array_equal(block, np.array([[0, 1], [1, 0]], dtype=complex))
