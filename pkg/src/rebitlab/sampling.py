"""Random two-rebit / two-qubit states under the product measure Haar x Lebesgue.

Every sampler draws a *batch* from a ``numpy.random.Generator``. Reproducible
parallel runs split the sample index range into fixed-size chunks; chunk ``k``
always draws from :func:`derive_stream` ``(seed, k)``, so the output never
depends on how chunks are scheduled across workers.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from rebitlab import states

DEFAULT_CHUNK_SIZE = 4096


class EnsembleKind(enum.Enum):
    REAL_MIXED = "real-mixed"
    REAL_PURE = "real-pure"
    COMPLEX_MIXED = "complex-mixed"
    COMPLEX_PURE = "complex-pure"

    @property
    def is_real(self) -> bool:
        return self in (EnsembleKind.REAL_MIXED, EnsembleKind.REAL_PURE)

    @property
    def is_pure(self) -> bool:
        return self in (EnsembleKind.REAL_PURE, EnsembleKind.COMPLEX_PURE)


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    chunk_size: int = DEFAULT_CHUNK_SIZE

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")

    def chunks(self, n_samples: int) -> list[tuple[int, int]]:
        """``(chunk_index, size)`` pairs covering ``n_samples`` in order."""
        full, rest = divmod(n_samples, self.chunk_size)
        out = [(k, self.chunk_size) for k in range(full)]
        if rest:
            out.append((full, rest))
        return out


def derive_stream(seed: SeedSpec, chunk_index: int) -> np.random.Generator:
    """Philox (counter-based) generator keyed on ``(master_seed, chunk_index)`` only."""
    if chunk_index < 0:
        raise ValueError("chunk_index must be non-negative")
    ss = np.random.SeedSequence(seed.master_seed, spawn_key=(chunk_index,))
    return np.random.Generator(np.random.Philox(ss))


def _haar_from_gaussian(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=-2, axis2=-1)
    if np.iscomplexobj(d):
        phase = d / np.abs(d)
    else:
        phase = np.sign(d)
    # Without this correction QR output is not Haar distributed.
    return q * phase[..., None, :]


def sample_orthogonal_haar(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    shape = (4, 4) if size is None else (size, 4, 4)
    return _haar_from_gaussian(rng.standard_normal(shape))


def sample_unitary_haar(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    shape = (4, 4) if size is None else (size, 4, 4)
    z = rng.standard_normal(shape + (2,)).view(np.complex128)[..., 0]
    return _haar_from_gaussian(z)


def sample_simplex(rng: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Flat Dirichlet(1, 1, 1, 1) point, i.e. Lebesgue-uniform on the 3-simplex."""
    shape = (4,) if size is None else (size, 4)
    e = rng.standard_exponential(shape)
    return e / e.sum(axis=-1, keepdims=True)


def sample_sphere(rng: np.random.Generator, size: int | None = None, complex_: bool = False) -> np.ndarray:
    shape = (4,) if size is None else (size, 4)
    if complex_:
        g = rng.standard_normal(shape + (2,)).view(np.complex128)[..., 0]
    else:
        g = rng.standard_normal(shape)
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def sample_pure_rebit(rng: np.random.Generator) -> states.PureRebitState:
    c = sample_sphere(rng)
    # one more normalisation pass pins the norm to within an ulp
    c = c / np.sqrt(np.sum(c * c))
    return states.PureRebitState(tuple(c))


def sample_states(kind: EnsembleKind, rng: np.random.Generator, size: int) -> np.ndarray:
    """Batch of ``size`` density matrices, shape ``(size, 4, 4)``.

    Real ensembles return float arrays, complex ensembles complex arrays. The
    simplex point is used unsorted.
    """
    kind = EnsembleKind(kind)
    if kind is EnsembleKind.REAL_MIXED:
        rot = sample_orthogonal_haar(rng, size)
        return states.assemble(rot, sample_simplex(rng, size))
    if kind is EnsembleKind.COMPLEX_MIXED:
        rot = sample_unitary_haar(rng, size)
        return states.assemble(rot, sample_simplex(rng, size))
    if kind is EnsembleKind.REAL_PURE:
        c = sample_sphere(rng, size)
        return states.projector(c @ states.MAGIC_BASIS.T)
    return states.projector(sample_sphere(rng, size, complex_=True))


def sample_state(kind: EnsembleKind, rng: np.random.Generator):
    """Single validated draw (``RebitDensityMatrix`` or ``QubitDensityMatrix``)."""
    kind = EnsembleKind(kind)
    m = sample_states(kind, rng, 1)[0]
    if kind.is_real:
        return states.RebitDensityMatrix(m)
    return states.QubitDensityMatrix(m)


def chunk_states(kind: EnsembleKind, seed: SeedSpec, chunk_index: int, size: int) -> np.ndarray:
    return sample_states(kind, derive_stream(seed, chunk_index), size)
