from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import InvalidInputError, NotPositiveSemidefiniteError

# Tolerances used by every validated value below.
HERMITIAN_ATOL = 1e-12
TRACE_ATOL = 1e-12
NORM_ATOL = 1e-12
UNITARY_ATOL = 1e-12
EIGEN_CLAMP = 1e-10


class MeasureKind(enum.Enum):
    TRACE = "T"
    BURES = "B"
    HELLINGER = "H"
    JENSEN_SHANNON = "J"

    @property
    def symbol(self) -> str:
        return self.value


# Column order used everywhere a per-measure table is written.
MEASURES: Tuple[MeasureKind, ...] = (
    MeasureKind.TRACE,
    MeasureKind.BURES,
    MeasureKind.HELLINGER,
    MeasureKind.JENSEN_SHANNON,
)


class StateFamily(enum.Enum):
    ORIGINAL = "original"
    SWAPPED = "swapped"
    SIGMA_X = "sigmax"
    HAAR_RANDOM = "haar"


class Model(enum.Enum):
    DEPHASING = "dephasing"
    SPINSTAR = "spinstar"


class Keep(enum.Enum):
    SYSTEM = "system"
    ENVIRONMENT = "environment"


def _square(entries, name: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    return arr


def _check_hermitian(arr: np.ndarray, name: str, atol: float = HERMITIAN_ATOL) -> None:
    dev = float(np.max(np.abs(arr - arr.conj().T)))
    if dev > atol:
        raise InvalidInputError(f"{name} is not Hermitian (max |A - A^dagger| = {dev:.3e})")


# -----------------------------
# Hilbert-space values
# -----------------------------

@dataclass(frozen=True, eq=False)
class StateVector:
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.ndim != 1 or amp.size == 0:
            raise InvalidInputError(f"state vector must be 1-D and non-empty, got shape {amp.shape}")
        norm2 = float(np.vdot(amp, amp).real)
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise InvalidInputError(f"state vector is not normalized (|psi|^2 = {norm2:.15f})")
        object.__setattr__(self, "amplitudes", amp)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(amp)
        if norm == 0.0:
            raise InvalidInputError("cannot normalize the zero vector")
        return cls(amp / norm)

    def projector(self) -> "DensityMatrix":
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite matrix (checked on construction)."""

    entries: np.ndarray

    def __post_init__(self):
        rho = _square(self.entries, "density matrix")
        _check_hermitian(rho, "density matrix")
        tr = complex(np.trace(rho))
        if abs(tr - 1.0) > TRACE_ATOL:
            raise InvalidInputError(f"density matrix trace must be 1, got {tr.real:.15f}{tr.imag:+.3e}j")
        w_min = float(np.linalg.eigvalsh(rho)[0])
        if w_min < -EIGEN_CLAMP:
            raise NotPositiveSemidefiniteError(f"density matrix has eigenvalue {w_min:.3e} < -{EIGEN_CLAMP:g}")
        object.__setattr__(self, "entries", rho)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    entries: np.ndarray

    def __post_init__(self):
        arr = _square(self.entries, "operator")
        _check_hermitian(arr, "operator")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])


@dataclass(frozen=True)
class Bipartition:
    dim_system: int
    dim_environment: int

    def __post_init__(self):
        if self.dim_system < 1 or self.dim_environment < 1:
            raise InvalidInputError(
                f"bipartition dimensions must be positive, got ({self.dim_system}, {self.dim_environment})"
            )

    @property
    def dim(self) -> int:
        return self.dim_system * self.dim_environment


# -----------------------------
# Model parameters and initial states
# -----------------------------

@dataclass(frozen=True)
class DephasingParams:
    epsilon: float = 1.0
    omega: float = 1.0
    g0: float = 0.1
    z: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not self.omega > 0.0:
            raise InvalidInputError(f"omega must be positive, got {self.omega}")
        object.__setattr__(self, "z", complex(self.z))

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omega


@dataclass(frozen=True)
class SpinStarParams:
    a0: float = 1.0
    n_bath: int = 20

    def __post_init__(self):
        if int(self.n_bath) != self.n_bath or self.n_bath < 2:
            raise InvalidInputError(f"bath size N must be an integer >= 2, got {self.n_bath}")
        if self.a0 == 0.0:
            raise InvalidInputError("coupling A0 must be nonzero")
        object.__setattr__(self, "n_bath", int(self.n_bath))

    @property
    def rabi_frequency(self) -> float:
        return abs(self.a0) * float(np.sqrt(self.n_bath))


@dataclass(frozen=True, eq=False)
class CorrelatedStateSpec:
    """(b1, b2, lambda, U) parameterizing b1 U|e>|R0> + b2 U|g>|R_lambda>.

    The same parameterization serves the bosonic model (R0 = vacuum, R_lambda = Omega_lambda)
    and the spin star (R0 = chi_+, R_lambda = F_lambda).
    """

    b1: complex
    b2: complex
    lam: float
    unitary: np.ndarray = field(default_factory=lambda: np.eye(2, dtype=complex))

    def __post_init__(self):
        b1, b2 = complex(self.b1), complex(self.b2)
        norm2 = abs(b1) ** 2 + abs(b2) ** 2
        if abs(norm2 - 1.0) > NORM_ATOL:
            raise InvalidInputError(f"|b1|^2 + |b2|^2 must be 1, got {norm2:.15f}")
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidInputError(f"lambda must lie in [0, 1], got {self.lam}")
        u = np.asarray(self.unitary, dtype=complex)
        if u.shape != (2, 2):
            raise InvalidInputError(f"local unitary must be 2x2, got shape {u.shape}")
        dev = float(np.max(np.abs(u.conj().T @ u - np.eye(2))))
        if dev > UNITARY_ATOL:
            raise InvalidInputError(f"local unitary is not unitary (max |U^dagger U - 1| = {dev:.3e})")
        object.__setattr__(self, "b1", b1)
        object.__setattr__(self, "b2", b2)
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "unitary", u)

    def with_lambda(self, lam: float) -> "CorrelatedStateSpec":
        return CorrelatedStateSpec(self.b1, self.b2, lam, self.unitary)

    def uncorrelated(self) -> "CorrelatedStateSpec":
        return self.with_lambda(0.0)


# Same (b1, b2, lambda, U) parameterization for the spin-star states.
SpinStarStateSpec = CorrelatedStateSpec


@dataclass(frozen=True)
class FockCutoff:
    n_max: int = 40

    def __post_init__(self):
        if int(self.n_max) != self.n_max or self.n_max < 1:
            raise InvalidInputError(f"Fock cutoff must be an integer >= 1, got {self.n_max}")

    @property
    def dim(self) -> int:
        return self.n_max + 1

    def doubled(self) -> "FockCutoff":
        return FockCutoff(2 * self.n_max)


# -----------------------------
# Experiment configuration and results
# -----------------------------

@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    samples: int
    master_seed: int
    lambda_grid: np.ndarray
    time_grid: np.ndarray
    increase_tolerance: float = 1e-9
    js_log_base: float = 2.0

    def __post_init__(self):
        if int(self.samples) != self.samples or self.samples < 1:
            raise InvalidInputError(f"samples must be a positive integer, got {self.samples}")
        lam = np.asarray(self.lambda_grid, dtype=float)
        times = np.asarray(self.time_grid, dtype=float)
        for name, grid in (("lambda grid", lam), ("time grid", times)):
            if grid.ndim != 1 or grid.size == 0:
                raise InvalidInputError(f"{name} must be a non-empty 1-D sequence")
            if np.any(np.diff(grid) < 0.0):
                raise InvalidInputError(f"{name} must be sorted ascending")
        if lam[0] < 0.0 or lam[-1] > 1.0:
            raise InvalidInputError(f"lambda grid must lie in [0, 1], got [{lam[0]}, {lam[-1]}]")
        if not self.increase_tolerance > 0.0:
            raise InvalidInputError(f"increase tolerance must be positive, got {self.increase_tolerance}")
        object.__setattr__(self, "samples", int(self.samples))
        object.__setattr__(self, "master_seed", int(self.master_seed))
        object.__setattr__(self, "lambda_grid", lam)
        object.__setattr__(self, "time_grid", times)


@dataclass(eq=False)
class TimeTrace:
    measure: MeasureKind
    lam: float
    times: np.ndarray
    delta_values: np.ndarray

    def __post_init__(self):
        if len(self.times) != len(self.delta_values):
            raise InvalidInputError("time trace needs one delta value per time")


@dataclass(eq=False)
class FrequencyCurve:
    family: str
    lambdas: np.ndarray
    counts: Dict[MeasureKind, np.ndarray]
    samples: int
    master_seed: int

    @property
    def frequencies(self) -> Dict[MeasureKind, np.ndarray]:
        return {k: np.asarray(c, dtype=float) / self.samples for k, c in self.counts.items()}

    def standard_errors(self) -> Dict[MeasureKind, np.ndarray]:
        """Binomial standard error sqrt(f (1 - f) / n) per measure and lambda."""
        return {k: np.sqrt(f * (1.0 - f) / self.samples) for k, f in self.frequencies.items()}


@dataclass(eq=False)
class ConcurrenceMap:
    lambdas: np.ndarray
    times: np.ndarray
    values: np.ndarray  # shape (len(lambdas), len(times))
    threshold_lambda: Optional[float]


@dataclass
class BoundViolation:
    sample: int
    lam: float
    measure: MeasureKind
    lhs: float
    rhs: float


@dataclass
class WitnessReport:
    checked: int = 0
    max_lhs_minus_rhs: float = float("-inf")
    violations: List[BoundViolation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class RunManifest:
    command: str
    config: Dict[str, object]
    master_seed: Optional[int]
    version: str
    outputs: List[str]


@dataclass
class CheckResult:
    """One verification check: the worst observed value against its limit.

    status is "PASS" when worst <= limit, "FAIL" otherwise.
    """

    suite: str
    name: str
    worst: float
    limit: float
    status: str
    detail: str = ""
