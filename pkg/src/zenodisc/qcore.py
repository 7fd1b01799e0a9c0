"""Exact finite-dimensional quantum mechanics on small dense vectors.

State vectors, Hermitian operators, unitary evolution under the two-coupled-
pairs Hamiltonian, and binary projective measurement that keeps both outcome
branches. Everything is double precision, immutable after construction, and
pure, so any of it can be called concurrently without locking.

The Hamiltonian family used throughout is the 5-level real symmetric matrix

    [[e0, delta, 0,     0,     0 ],
     [delta, e0, 0,     0,     0 ],
     [0,     0,  e0,    delta, 0 ],
     [0,     0,  delta, e0,    0 ],
     [0,     0,  0,     0,     e1]]

whose spectrum is known in closed form: e0 + delta and e0 - delta (each
doubly degenerate) and e1. Time evolution is computed through that closed
eigensystem rather than a generic matrix exponential; a dense exponential is
used only as an independent oracle in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Absolute tolerance for unit-norm and hermiticity checks: comfortable
# double-precision headroom at d = 5.
ATOL = 1e-12
# Branch probabilities below this floor cannot be renormalized meaningfully.
PRUNE_FLOOR = 1e-30
# Dense-matrix guard; this laboratory never needs large spaces.
MAX_DIM = 64


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class DegenerateVectorError(ArithmeticError):
    """A vector is too close to zero to normalize."""


class DegenerateBranchError(ArithmeticError):
    """A measurement branch has probability too small to condition on."""


def _as_complex_vector(values) -> np.ndarray:
    vec = np.asarray(values, dtype=np.complex128)
    if vec.ndim != 1:
        raise ValidationError(f"expected a 1-d amplitude vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec.view(np.float64))):
        raise ValidationError("amplitudes must be finite")
    return vec


@dataclass(frozen=True)
class PureState:
    """A normalized complex amplitude vector.

    Construction validates unit norm to within ATOL; use :func:`normalize`
    to build one from an unnormalized vector. The underlying array is made
    read-only so instances can be shared freely.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        vec = _as_complex_vector(self.amplitudes)
        if not (2 <= vec.size <= MAX_DIM):
            raise ValidationError(f"dimension must be in [2, {MAX_DIM}], got {vec.size}")
        nrm = np.linalg.norm(vec)
        if abs(nrm - 1.0) > ATOL:
            raise ValidationError(f"state norm {nrm!r} deviates from 1 beyond {ATOL}")
        vec.setflags(write=False)
        object.__setattr__(self, "amplitudes", vec)

    @property
    def dim(self) -> int:
        return self.amplitudes.size


@dataclass(frozen=True)
class HamiltonianSpec:
    """The scalar triple (e0, e1, delta) generating the 5-level Hamiltonian.

    Energies are in units with hbar = 1, so they carry inverse-time units.
    """

    e0: float
    e1: float
    delta: float

    def __post_init__(self):
        for name in ("e0", "e1", "delta"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val)):
                raise ValidationError(f"{name} must be a finite real number, got {val!r}")


@dataclass(frozen=True)
class HermitianOperator:
    """A dense d x d matrix validated to equal its own conjugate transpose."""

    entries: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.entries, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {mat.shape}")
        if mat.shape[0] > MAX_DIM:
            raise ValidationError(f"dimension {mat.shape[0]} exceeds guard {MAX_DIM}")
        if not np.all(np.isfinite(mat.view(np.float64))):
            raise ValidationError("matrix entries must be finite")
        if np.max(np.abs(mat - mat.conj().T)) > ATOL:
            raise ValidationError("matrix is not Hermitian within tolerance")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class MeasurementDirection:
    """A unit vector defining a rank-one projective (yes/no) measurement."""

    vector: np.ndarray

    def __post_init__(self):
        vec = _as_complex_vector(self.vector)
        if abs(np.linalg.norm(vec) - 1.0) > ATOL:
            raise ValidationError("measurement direction must be unit norm")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    @property
    def dim(self) -> int:
        return self.vector.size


@dataclass(frozen=True)
class MeasurementOutcome:
    """Both branches of a binary projective measurement.

    click_prob + survive_prob == 1 by construction, and the branch vectors
    weighted by the square roots of their probabilities sum back to the
    measured state exactly (the phase of post_click_state is fixed to make
    that reconstruction hold, which also makes branch trees reproducible).
    """

    click_prob: float
    survive_prob: float
    post_click_state: PureState
    post_survive_state: PureState


def build_hamiltonian(spec: HamiltonianSpec) -> HermitianOperator:
    """Assemble the 5x5 two-coupled-pairs Hamiltonian for ``spec``.

    Levels (1,2) and (3,4) form identical 2x2 blocks with diagonal e0 and
    off-diagonal delta; level 5 sits alone at energy e1.
    """
    mat = np.zeros((5, 5), dtype=np.complex128)
    mat[0, 0] = mat[1, 1] = mat[2, 2] = mat[3, 3] = spec.e0
    mat[4, 4] = spec.e1
    mat[0, 1] = mat[1, 0] = mat[2, 3] = mat[3, 2] = spec.delta
    return HermitianOperator(mat)


_SQRT1_2 = 1.0 / math.sqrt(2.0)


def eigendecompose(spec: HamiltonianSpec) -> list[tuple[float, np.ndarray]]:
    """Closed-form eigensystem of the 5-level Hamiltonian.

    Returns five (eigenvalue, eigenvector) pairs in a fixed order:
    e0 + delta with (1,1,0,0,0)/sqrt(2) and (0,0,1,1,0)/sqrt(2), then
    e0 - delta with (1,-1,0,0,0)/sqrt(2) and (0,0,1,-1,0)/sqrt(2), then
    e1 with (0,0,0,0,1). The basis is orthonormal for every spec, including
    the fourfold-degenerate delta = 0 limit.
    """
    plus_a = np.array([_SQRT1_2, _SQRT1_2, 0, 0, 0], dtype=np.complex128)
    plus_b = np.array([0, 0, _SQRT1_2, _SQRT1_2, 0], dtype=np.complex128)
    minus_a = np.array([_SQRT1_2, -_SQRT1_2, 0, 0, 0], dtype=np.complex128)
    minus_b = np.array([0, 0, _SQRT1_2, -_SQRT1_2, 0], dtype=np.complex128)
    top = np.array([0, 0, 0, 0, 1], dtype=np.complex128)
    return [
        (spec.e0 + spec.delta, plus_a),
        (spec.e0 + spec.delta, plus_b),
        (spec.e0 - spec.delta, minus_a),
        (spec.e0 - spec.delta, minus_b),
        (spec.e1, top),
    ]


def evolve(spec: HamiltonianSpec, t: float, psi: PureState) -> PureState:
    """Apply exp(-i H t) to ``psi`` through the closed-form eigensystem.

    The forward sign convention is -i; every quantity reported by this
    package (probabilities, overlap magnitudes) is insensitive to it.
    """
    if not math.isfinite(t):
        raise ValidationError("evolution time must be finite")
    if psi.dim != 5:
        raise ValidationError(f"evolution is defined on dimension 5, got {psi.dim}")
    out = np.zeros(5, dtype=np.complex128)
    for lam, vec in eigendecompose(spec):
        out += np.exp(-1j * lam * t) * np.vdot(vec, psi.amplitudes) * vec
    return PureState(out)


def inner_product(phi: PureState, psi: PureState) -> complex:
    """Return <phi|psi>, conjugating the first argument."""
    if phi.dim != psi.dim:
        raise ValidationError(f"dimension mismatch: {phi.dim} vs {psi.dim}")
    return complex(np.vdot(phi.amplitudes, psi.amplitudes))


def normalize(vector) -> PureState:
    """Scale a raw complex vector to unit norm."""
    vec = _as_complex_vector(vector)
    nrm = np.linalg.norm(vec)
    if nrm <= PRUNE_FLOOR:
        raise DegenerateVectorError(f"vector norm {nrm!r} is below the renormalization floor")
    return PureState(vec / nrm)


def density(psi: PureState) -> np.ndarray:
    """Rank-one density matrix |psi><psi| as a plain array."""
    return np.outer(psi.amplitudes, psi.amplitudes.conj())


def measure_binary(m: MeasurementDirection, psi: PureState) -> MeasurementOutcome:
    """Binary projective measurement of ``psi`` along ``m``, keeping both branches.

    The click branch projects onto m: click_prob = |<m|psi>|^2 and the
    post-click state is m times the phase of <m|psi>, so that
    sqrt(click_prob) * post_click + sqrt(survive_prob) * post_survive
    reconstructs psi exactly. The survive (null-result) branch is the
    renormalized projection of psi onto the complement of m.

    Raises DegenerateBranchError when survive_prob falls below the pruning
    floor, signalling the caller that the null branch cannot be conditioned
    on any further.
    """
    if m.dim != psi.dim:
        raise ValidationError(f"dimension mismatch: {m.dim} vs {psi.dim}")
    amp = complex(np.vdot(m.vector, psi.amplitudes))
    click = min(abs(amp) ** 2, 1.0)
    survive = 1.0 - click
    residual = psi.amplitudes - amp * m.vector
    # Either signal means the null branch is numerically dead: a survival
    # probability below the floor, or a residual too short to renormalize
    # even when roundoff leaves survive marginally positive.
    if survive < PRUNE_FLOOR or float(np.real(np.vdot(residual, residual))) < PRUNE_FLOOR:
        raise DegenerateBranchError("survival probability underflow; branch cannot be renormalized")
    if abs(amp) > 0.0:
        post_click = PureState((amp / abs(amp)) * m.vector)
    else:
        post_click = PureState(m.vector.copy())  # zero-probability branch, phase immaterial
    post_survive = normalize(residual)
    return MeasurementOutcome(
        click_prob=click,
        survive_prob=survive,
        post_click_state=post_click,
        post_survive_state=post_survive,
    )
