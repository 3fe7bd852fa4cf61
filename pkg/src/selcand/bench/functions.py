"""Shifted, optionally rotated test functions with known optimum 0.

Every function is evaluated on ``z = R (x - shift)`` (Rosenbrock and
Schwefel add their own offsets so that ``z = 0`` is the optimum) and
accepts arrays of shape ``(..., D)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Problem

SCHWEFEL_OPT = 420.9687462275036


def sphere(z):
    return np.sum(z**2, axis=-1)


def ellipsoid(z):
    d = z.shape[-1]
    w = 10.0 ** (6.0 * np.arange(d) / max(d - 1, 1))
    return np.sum(w * z**2, axis=-1)


def rosenbrock(z):
    z = z + 1.0
    return np.sum(100.0 * (z[..., 1:] - z[..., :-1] ** 2) ** 2 + (z[..., :-1] - 1.0) ** 2, axis=-1)


def rastrigin(z):
    return np.sum(z**2 - 10.0 * np.cos(2.0 * np.pi * z) + 10.0, axis=-1)


def ackley(z):
    d = z.shape[-1]
    a = -20.0 * np.exp(-0.2 * np.sqrt(np.sum(z**2, axis=-1) / d))
    b = -np.exp(np.sum(np.cos(2.0 * np.pi * z), axis=-1) / d)
    return a + b + 20.0 + np.e


def griewank(z):
    j = np.sqrt(np.arange(1, z.shape[-1] + 1))
    return np.sum(z**2, axis=-1) / 4000.0 - np.prod(np.cos(z / j), axis=-1) + 1.0


def _schwefel_term(z):
    az = np.abs(z)
    inside = z * np.sin(np.sqrt(az))
    # beyond +-500 the landscape folds back with a quadratic penalty
    m = 500.0 - np.mod(az, 500.0)
    outside = np.sign(z) * m * np.sin(np.sqrt(m)) - (az - 500.0) ** 2 / (10000.0 * z.shape[-1])
    return np.where(az <= 500.0, inside, outside)


_SCHWEFEL_PEAK = SCHWEFEL_OPT * np.sin(np.sqrt(SCHWEFEL_OPT))


def schwefel(z):
    d = z.shape[-1]
    return _SCHWEFEL_PEAK * d - np.sum(_schwefel_term(z + SCHWEFEL_OPT), axis=-1)


BASES = {
    "sphere": (sphere, 100.0),
    "rotated-ellipsoid": (ellipsoid, 100.0),
    "rosenbrock": (rosenbrock, 30.0),
    "rastrigin": (rastrigin, 5.12),
    "ackley": (ackley, 32.768),
    "griewank": (griewank, 600.0),
    "schwefel": (schwefel, 500.0),
}
ALIASES = {"schwefel-2.26": "schwefel", "ellipsoid": "rotated-ellipsoid"}


def canonical_base(name: str) -> str:
    name = ALIASES.get(name.lower(), name.lower())
    if name not in BASES:
        raise ValueError(f"unknown function {name!r}; available: {', '.join(BASES)}")
    return name


def random_rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix from the QR of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


@dataclass(frozen=True, eq=False)
class BenchFunction:
    base: str
    dim: int
    shift: np.ndarray
    rotation: np.ndarray | None
    bound: float
    optimum_value: float = 0.0
    label: str = ""

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        return self.base + ("-r" if self.rotation is not None and self.base != "rotated-ellipsoid" else "")

    def __call__(self, x):
        y = np.asarray(x, dtype=float) - self.shift
        if self.rotation is not None:
            y = y @ self.rotation.T
        return BASES[self.base][0](y)

    def problem(self) -> Problem:
        return Problem(self.name, self.dim, -self.bound, self.bound, self, self.optimum_value)


def make_function(base: str, dim: int, rng: np.random.Generator | None = None,
                  shift: bool = True, rotate: bool = False) -> BenchFunction:
    """Instantiate ``base`` in ``dim`` dimensions.

    The shift is uniform over the central 80% of the box and drawn before the
    rotation. The ellipsoid is always rotated.
    """
    base = canonical_base(base)
    if dim < 2:
        raise ValueError("benchmark functions need dim >= 2")
    bound = BASES[base][1]
    if (shift or rotate or base == "rotated-ellipsoid") and rng is None:
        raise ValueError("a random generator is needed for shifted or rotated functions")
    o = rng.uniform(-0.8 * bound, 0.8 * bound, size=dim) if shift else np.zeros(dim)
    R = random_rotation(rng, dim) if (rotate or base == "rotated-ellipsoid") else None
    return BenchFunction(base, dim, o, R, bound)
