"""
Statevector basics: registers, gates, encoding, expectations
=============================================================

A walk through the simulator core: how amplitudes are ordered, what the
rotation gates do, and how a classical vector becomes a quantum state.
"""

import numpy as np

from oniq.qsim import (
    Statevector,
    amplitude_encode,
    apply_cnot,
    apply_rx,
    apply_ry,
    expect_all_z,
    expect_z,
)

# A register starts in |0...0>. Amplitude index bits are ordered with
# qubit 0 as the MOST significant bit, so for two qubits the amplitude
# order is |00>, |01>, |10>, |11>.
state = Statevector.zero(2)
print("initial amplitudes:", state.amps.real)

# RY(pi) maps |0> to |1>. Flipping qubit 0 moves the amplitude to
# index 2 = binary 10, demonstrating the bit order.
apply_ry(state, 0, np.pi)
print("after RY(pi) on qubit 0:", np.round(state.amps.real, 12))

# CNOT with control 0 copies the flip onto qubit 1: |10> -> |11>.
apply_cnot(state, 0, 1)
print("after CNOT(0, 1):", np.round(state.amps.real, 12))

# <Z> is +1 on |0>, -1 on |1>; both qubits now read -1.
print("per-qubit <Z>:", expect_all_z(state))

# A half-turn RX puts a qubit on the equator: <Z> falls to 0.
state = Statevector.zero(1)
apply_rx(state, 0, np.pi / 2.0)
print("equator <Z>:", round(expect_z(state, 0), 12))

# Amplitude encoding: x / ||x|| becomes the state, zero-padded up to
# 2**n entries. The classic 3-4-5 triangle gives exact amplitudes.
enc = amplitude_encode([3.0, 4.0], 1)
print("encode([3, 4]) ->", enc.amps.real)

# Scaling the input leaves the encoded state unchanged: only the
# direction of the vector matters.
enc2 = amplitude_encode([6.0, 8.0], 1)
print("encode([6, 8]) ->", enc2.amps.real)

# Padding: three features on a two-qubit register leave amplitude 4 at 0.
enc3 = amplitude_encode([1.0, 2.0, 2.0], 2)
print("encode([1, 2, 2]) ->", enc3.amps.real)
print("norm:", np.linalg.norm(enc3.amps))
