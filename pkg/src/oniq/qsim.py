"""Exact statevector simulation of the variational circuit block.

Conventions used throughout the package:

* Qubit 0 is the MOST significant bit of the amplitude index, i.e. for an
  n-qubit register, basis index ``i`` assigns qubit ``q`` the bit
  ``(i >> (n - 1 - q)) & 1``.
* Angles are radians; rotations are ``exp(-i * theta * P / 2)`` for
  P in {X, Y, Z}.
* ``Rot(phi, theta, omega)`` applies RZ(phi), then RY(theta), then RZ(omega),
  in that temporal order (matrix product RZ(omega) @ RY(theta) @ RZ(phi)).
* Everything is double precision (complex128 states, float64 angles).

Array-level helpers (prefixed ``_``) accept a stack of statevectors with an
arbitrary number of leading axes; the public operations work on a single
:class:`Statevector`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import cos, pi, sin

import numpy as np

from .errors import (
    ControlEqualsTargetError,
    InvalidRangeError,
    ParamLengthMismatchError,
    QubitCountMismatchError,
    QubitOutOfRangeError,
    TooManyFeaturesError,
    ZeroVectorError,
)

MAX_QUBITS = 20  # hard cap: 2**20 amplitudes

BASIC = "basic"
STRONGLY = "strongly"
RANDOM = "random"
ANSATZ_KINDS = (BASIC, STRONGLY, RANDOM)

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG, used to materialize random circuits bit-exactly.

    next_u64: state += 0x9E3779B97F4A7C15 (mod 2**64); z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) *
    0x94D049BB133111EB; return z ^ (z >> 31), all mod 2**64.
    Floats take the top 53 bits: (z >> 11) * 2**-53.  Bounded draws use
    next_u64() % k.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return (z ^ (z >> 31)) & _MASK64

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def next_below(self, k: int) -> int:
        return self.next_u64() % k


@dataclass
class Statevector:
    """Complex amplitude vector of an n-qubit register."""

    n_qubits: int
    amps: np.ndarray

    @classmethod
    def zero(cls, n_qubits: int) -> "Statevector":
        """|0...0> on n_qubits."""
        _check_n_qubits(n_qubits)
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probs(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "Statevector":
        return Statevector(self.n_qubits, self.amps.copy())


@dataclass(frozen=True)
class AnsatzSpec:
    """Declarative circuit family: kind, depth, width, and seed.

    ``ranges`` holds the per-layer entangling offsets of the strongly
    entangled family; when omitted it defaults to
    ``(l % (n_qubits - 1)) + 1`` for layer l.
    """

    kind: str
    n_layers: int
    n_qubits: int
    seed: int = 0
    ranges: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.kind not in ANSATZ_KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}")
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        _check_n_qubits(self.n_qubits)
        if self.ranges is not None:
            object.__setattr__(self, "ranges", tuple(int(r) for r in self.ranges))

    def layer_ranges(self) -> tuple[int, ...]:
        """Entangling offsets, one per layer (strongly kind only)."""
        if self.n_qubits == 1:
            return (0,) * self.n_layers
        if self.ranges is None:
            return tuple(l % (self.n_qubits - 1) + 1 for l in range(self.n_layers))
        if len(self.ranges) != self.n_layers:
            raise InvalidRangeError(
                f"need {self.n_layers} ranges, got {len(self.ranges)}"
            )
        for r in self.ranges:
            if not 1 <= r <= self.n_qubits - 1:
                raise InvalidRangeError(
                    f"range {r} outside 1..{self.n_qubits - 1}"
                )
        return self.ranges


@dataclass(frozen=True)
class Gate:
    """One gate record: name in {rx, ry, rz, rot, cnot}.

    ``qubits`` is (qubit,) for rotations and (control, target) for cnot;
    ``params`` holds the consumed parameter indices (3 for rot, 1 for a
    primitive rotation, 0 for cnot).
    """

    name: str
    qubits: tuple[int, ...]
    params: tuple[int, ...] = field(default=())


GateSequence = tuple[Gate, ...]


def _check_n_qubits(n_qubits: int):
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise ValueError(f"n_qubits must be in 1..{MAX_QUBITS}, got {n_qubits}")


def _check_qubit(qubit: int, n_qubits: int):
    if not 0 <= qubit < n_qubits:
        raise QubitOutOfRangeError(f"qubit {qubit} out of range for {n_qubits} qubits")


# Single-qubit matrices


def rx_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def ry_matrix(theta: float) -> np.ndarray:
    c, s = cos(theta / 2), sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def rz_matrix(theta: float) -> np.ndarray:
    e = np.exp(-0.5j * theta)
    return np.array([[e, 0], [0, np.conj(e)]], dtype=np.complex128)


def rot_matrix(phi: float, theta: float, omega: float) -> np.ndarray:
    """RZ(phi) then RY(theta) then RZ(omega) as a single 2x2 matrix."""
    return rz_matrix(omega) @ ry_matrix(theta) @ rz_matrix(phi)


_ROTATION_MATS = {"rx": rx_matrix, "ry": ry_matrix, "rz": rz_matrix}


# Array-level core.  amps has shape lead + (2**n,); lead may be empty.


def _apply_1q(amps: np.ndarray, n: int, qubit: int, mat: np.ndarray) -> np.ndarray:
    tail = 1 << (n - qubit - 1)
    t = amps.reshape(-1, 2, tail)
    out = np.einsum("ij,bjq->biq", mat, t)
    return out.reshape(amps.shape)

def _apply_cnot_inplace(amps: np.ndarray, n: int, control: int, target: int) -> np.ndarray:
    # amps must be C-contiguous so the reshape is a view
    a, b = sorted((control, target))
    t = amps.reshape(-1, 1 << a, 2, 1 << (b - a - 1), 2, 1 << (n - b - 1))
    if control < target:
        lo = t[:, :, 1, :, 0, :].copy()
        t[:, :, 1, :, 0, :] = t[:, :, 1, :, 1, :]
        t[:, :, 1, :, 1, :] = lo
    else:
        lo = t[:, :, 0, :, 1, :].copy()
        t[:, :, 0, :, 1, :] = t[:, :, 1, :, 1, :]
        t[:, :, 1, :, 1, :] = lo
    return amps


def _run_gates(
    amps: np.ndarray,
    n: int,
    gates: GateSequence,
    values: np.ndarray,
    reverse: bool = False,
) -> np.ndarray:
    """Apply the bound gate sequence to a fresh copy of ``amps``.

    ``reverse=True`` applies the inverse circuit (reversed order, negated
    angles), i.e. the adjoint of the forward unitary.
    """
    amps = np.array(amps, dtype=np.complex128, copy=True, order="C")
    seq = reversed(gates) if reverse else gates
    for g in seq:
        if g.name == "cnot":
            amps = _apply_cnot_inplace(amps, n, g.qubits[0], g.qubits[1])
        elif g.name == "rot":
            phi, th, om = (values[i] for i in g.params)
            mat = rot_matrix(-om, -th, -phi) if reverse else rot_matrix(phi, th, om)
            amps = _apply_1q(amps, n, g.qubits[0], mat)
        else:
            theta = values[g.params[0]]
            mat = _ROTATION_MATS[g.name](-theta if reverse else theta)
            amps = _apply_1q(amps, n, g.qubits[0], mat)
    return amps


def _expect_all_z(amps: np.ndarray, n: int) -> np.ndarray:
    """Per-qubit <Z>, shape lead + (n,)."""
    lead = amps.shape[:-1]
    p = (amps.real**2 + amps.imag**2).reshape(lead + (2,) * n)
    out = np.empty(lead + (n,))
    nlead = len(lead)
    for q in range(n):
        axes = tuple(i for i in range(nlead, nlead + n) if i != nlead + q)
        pq = p.sum(axis=axes)
        out[..., q] = pq[..., 0] - pq[..., 1]
    return out


def _z_diag(n: int, qubit: int) -> np.ndarray:
    """Diagonal of Z on ``qubit``: +1 where the bit is 0, -1 where it is 1."""
    idx = np.arange(1 << n)
    bits = (idx >> (n - 1 - qubit)) & 1
    return 1.0 - 2.0 * bits


def _encode_rows(x: np.ndarray, n_qubits: int) -> np.ndarray:
    """Amplitude-encode each row of ``x`` (shape (B, m)) into (B, 2**n) reals."""
    m = x.shape[-1]
    dim = 1 << n_qubits
    if m > dim:
        raise TooManyFeaturesError(f"{m} features exceed 2**{n_qubits} amplitudes")
    norms = np.linalg.norm(x, axis=-1)
    if np.any(norms <= 1e-12):
        raise ZeroVectorError("input norm below 1e-12 cannot be amplitude-encoded")
    out = np.zeros(x.shape[:-1] + (dim,))
    out[..., :m] = x / norms[..., None]
    return out


# Public operations


def amplitude_encode(x, n_qubits: int) -> Statevector:
    """Encode a real feature vector into the amplitudes of n qubits.

    Amplitudes are x / ||x||_2 padded with zeros up to 2**n_qubits.
    """
    _check_n_qubits(n_qubits)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("x must be a non-empty 1-D real vector")
    amps = _encode_rows(x, n_qubits).astype(np.complex128)
    return Statevector(n_qubits, amps)


def apply_rx(state: Statevector, qubit: int, theta: float) -> Statevector:
    _check_qubit(qubit, state.n_qubits)
    state.amps = _apply_1q(state.amps, state.n_qubits, qubit, rx_matrix(theta))
    return state


def apply_ry(state: Statevector, qubit: int, theta: float) -> Statevector:
    _check_qubit(qubit, state.n_qubits)
    state.amps = _apply_1q(state.amps, state.n_qubits, qubit, ry_matrix(theta))
    return state


def apply_rz(state: Statevector, qubit: int, theta: float) -> Statevector:
    _check_qubit(qubit, state.n_qubits)
    state.amps = _apply_1q(state.amps, state.n_qubits, qubit, rz_matrix(theta))
    return state


def apply_rot(
    state: Statevector, qubit: int, phi: float, theta: float, omega: float
) -> Statevector:
    """General single-qubit rotation: RZ(phi), RY(theta), RZ(omega)."""
    _check_qubit(qubit, state.n_qubits)
    state.amps = _apply_1q(state.amps, state.n_qubits, qubit, rot_matrix(phi, theta, omega))
    return state


def apply_cnot(state: Statevector, control: int, target: int) -> Statevector:
    if control == target:
        raise ControlEqualsTargetError("control and target must differ")
    _check_qubit(control, state.n_qubits)
    _check_qubit(target, state.n_qubits)
    amps = np.ascontiguousarray(state.amps)
    state.amps = _apply_cnot_inplace(amps, state.n_qubits, control, target)
    return state


@lru_cache(maxsize=128)
def build_sequence(spec: AnsatzSpec) -> GateSequence:
    """Materialize the gate list for a spec; deterministic in the spec.

    basic layer:    RX on every qubit, then a CNOT ring (single CNOT for
                    n=2, none for n=1).
    strongly layer: Rot on every qubit, then CNOT(q, (q + range_l) % n)
                    for every q (none for n=1).
    random:         n_qubits slots per layer drawn from SplitMix64(seed);
                    u < 0.3 (and n > 1) gives a CNOT on a drawn ordered
                    pair, otherwise a uniform draw from {RX, RY, RZ} on a
                    drawn qubit consuming the next parameter index.
    """
    n = spec.n_qubits
    gates: list[Gate] = []
    next_param = 0

    if spec.kind == BASIC:
        for _ in range(spec.n_layers):
            for q in range(n):
                gates.append(Gate("rx", (q,), (next_param,)))
                next_param += 1
            if n == 2:
                gates.append(Gate("cnot", (0, 1)))
            elif n >= 3:
                for q in range(n):
                    gates.append(Gate("cnot", (q, (q + 1) % n)))
    elif spec.kind == STRONGLY:
        ranges = spec.layer_ranges()
        for l in range(spec.n_layers):
            for q in range(n):
                gates.append(Gate("rot", (q,), (next_param, next_param + 1, next_param + 2)))
                next_param += 3
            if n >= 2:
                for q in range(n):
                    gates.append(Gate("cnot", (q, (q + ranges[l]) % n)))
    else:
        rng = SplitMix64(spec.seed)
        names = ("rx", "ry", "rz")
        for _ in range(spec.n_layers):
            for _ in range(n):
                u = rng.next_float()
                if u < 0.3 and n > 1:
                    control = rng.next_below(n)
                    t = rng.next_below(n - 1)
                    target = t if t < control else t + 1
                    gates.append(Gate("cnot", (control, target)))
                else:
                    name = names[rng.next_below(3)]
                    qubit = rng.next_below(n)
                    gates.append(Gate(name, (qubit,), (next_param,)))
                    next_param += 1
    return tuple(gates)


def param_count(spec: AnsatzSpec) -> int:
    """Number of trainable angles the spec consumes."""
    if spec.kind == BASIC:
        return spec.n_layers * spec.n_qubits
    if spec.kind == STRONGLY:
        spec.layer_ranges()  # validate
        return spec.n_layers * spec.n_qubits * 3
    return sum(len(g.params) for g in build_sequence(spec))


def _check_run_args(state_n: int, spec: AnsatzSpec, params: np.ndarray) -> np.ndarray:
    params = np.asarray(params, dtype=np.float64)
    if params.shape != (param_count(spec),):
        raise ParamLengthMismatchError(
            f"spec needs {param_count(spec)} params, got shape {params.shape}"
        )
    if state_n != spec.n_qubits:
        raise QubitCountMismatchError(
            f"state has {state_n} qubits, spec wants {spec.n_qubits}"
        )
    return params


def run_ansatz(state: Statevector, spec: AnsatzSpec, params) -> Statevector:
    """Apply the materialized circuit with bound angles (mutates ``state``)."""
    params = _check_run_args(state.n_qubits, spec, params)
    state.amps = _run_gates(state.amps, state.n_qubits, build_sequence(spec), params)
    return state


def expect_z(state: Statevector, qubit: int) -> float:
    """<Z> on one qubit, in [-1, 1]."""
    _check_qubit(qubit, state.n_qubits)
    return float(_expect_all_z(state.amps, state.n_qubits)[qubit])


def expect_all_z(state: Statevector) -> np.ndarray:
    """<Z> on every qubit."""
    return _expect_all_z(state.amps, state.n_qubits)


def _param_shift_table(
    spec: AnsatzSpec, params: np.ndarray, amps0: np.ndarray
) -> np.ndarray:
    """Shift-rule derivative of every <Z_q> w.r.t. every angle.

    ``amps0`` has shape lead + (2**n,); the result has shape
    (param_count,) + lead + (n_qubits,).  Exact because every gate
    generator has eigenvalues +-1/2.
    """
    gates = build_sequence(spec)
    n = spec.n_qubits
    out = np.empty((len(params),) + amps0.shape[:-1] + (n,))
    for k in range(len(params)):
        shifted = params.copy()
        shifted[k] += pi / 2
        e_plus = _expect_all_z(_run_gates(amps0, n, gates, shifted), n)
        shifted[k] -= pi
        e_minus = _expect_all_z(_run_gates(amps0, n, gates, shifted), n)
        out[k] = (e_plus - e_minus) / 2.0
    return out


def param_shift_grad(spec: AnsatzSpec, params, input: Statevector, qubit: int) -> np.ndarray:
    """d<Z_qubit>/d(angles) by the two-point parameter-shift rule."""
    params = _check_run_args(input.n_qubits, spec, params)
    _check_qubit(qubit, input.n_qubits)
    return _param_shift_table(spec, params, input.amps)[:, qubit]


def _observable_backprop(
    spec: AnsatzSpec, params: np.ndarray, amps: np.ndarray, diag: np.ndarray
) -> np.ndarray:
    """U^dag diag U applied to ``amps`` without materializing the matrix."""
    gates = build_sequence(spec)
    n = spec.n_qubits
    psi = _run_gates(amps, n, gates, params)
    psi *= diag
    return _run_gates(psi, n, gates, params, reverse=True)


def input_grad(spec: AnsatzSpec, params, x, n_qubits: int, qubit: int) -> np.ndarray:
    """Gradient of <Z_qubit> w.r.t. the raw (pre-encoding) feature vector.

    With a = encode(x) and M = U^dag Z_q U, the amplitude gradient is
    2 Re(M a); it is then pushed through the normalization Jacobian
    (I - a a^T) / ||x||_2 restricted to the first len(x) coordinates.
    """
    params = _check_run_args(n_qubits, spec, params)
    _check_qubit(qubit, n_qubits)
    x = np.asarray(x, dtype=np.float64)
    a = _encode_rows(x, n_qubits)
    ma = _observable_backprop(spec, params, a.astype(np.complex128), _z_diag(n_qubits, qubit))
    g = 2.0 * ma.real
    m = x.size
    return (g[:m] - (g @ a) * a[:m]) / np.linalg.norm(x)


def sequence_to_json(spec: AnsatzSpec) -> dict:
    """JSON-ready description of the materialized circuit.

    Layout: {"kind", "n_qubits", "n_layers", "seed", "ranges", "param_count",
    "gates": [{"gate", "qubit", "params"} | {"gate": "cnot", "control",
    "target"}]}.
    """
    gates = []
    for g in build_sequence(spec):
        if g.name == "cnot":
            gates.append({"gate": "cnot", "control": g.qubits[0], "target": g.qubits[1]})
        else:
            gates.append({"gate": g.name, "qubit": g.qubits[0], "params": list(g.params)})
    return {
        "kind": spec.kind,
        "n_qubits": spec.n_qubits,
        "n_layers": spec.n_layers,
        "seed": spec.seed,
        "ranges": list(spec.layer_ranges()) if spec.kind == STRONGLY else None,
        "param_count": param_count(spec),
        "gates": gates,
    }
