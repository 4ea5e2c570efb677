"""Non-interpolatory recovery maps: Kansa unsymmetric collocation with a
pseudoinverse coefficient map, pseudo-Lagrangians and their power function,
and the SVD/Tikhonov linear-system case."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import NoBumpExists
from .functionals import FunctionalSet, LaplacianEval, PointEval

# sigma_k counts as zero below this fraction of sigma_max
RANK_RTOL = 1e-12


def unit_square_perimeter(t) -> np.ndarray:
    """Arc-length parametrization of the boundary of [0,1]^2, t in [0,4)."""
    t = np.mod(np.asarray(t, dtype=float), 4.0)
    out = np.empty(t.shape + (2,))
    for lo, xy in ((0, lambda s: (s, 0.0 * s)), (1, lambda s: (1.0 + 0 * s, s - 1)),
                   (2, lambda s: (3.0 - s, 1.0 + 0 * s)), (3, lambda s: (0.0 * s, 4.0 - s))):
        m = (t >= lo) & (t < lo + 1)
        x, y = xy(t[m])
        out[m, 0], out[m, 1] = x, y
    return out


def _on_boundary(p, tol=1e-12) -> bool:
    x, y = p
    if not (-tol <= x <= 1 + tol and -tol <= y <= 1 + tol):
        return False
    return min(abs(x), abs(1 - x), abs(y), abs(1 - y)) <= tol


@dataclass(frozen=True)
class PoissonSetup:
    """Dirichlet Poisson discretization on the unit square: Laplacian data
    functionals at interior points, point-value data on the boundary, and
    kernel translates at trial points."""

    kernel: object
    interior: np.ndarray
    boundary: np.ndarray
    trial: np.ndarray

    def __post_init__(self):
        for name in ("interior", "boundary", "trial"):
            pts = np.asarray(getattr(self, name), dtype=float)
            if pts.ndim != 2 or pts.shape[1] != 2:
                raise ValueError(f"{name} points must be an (n, 2) array")
            object.__setattr__(self, name, pts)
        if np.any(self.interior <= 0.0) or np.any(self.interior >= 1.0):
            raise ValueError("interior points must lie strictly inside (0,1)^2")
        for p in self.boundary:
            if not _on_boundary(p):
                raise ValueError(f"boundary point {p} is not on the unit-square edge")

    @classmethod
    def regular(cls, kernel, n_side: int = 11, n_boundary: int = 16,
                include_corners: bool = True, trial_points=None) -> "PoissonSetup":
        """The regular layout: an n_side x n_side tensor grid strictly inside
        the square, boundary points equally spaced along the perimeter
        (starting at the origin corner when include_corners is set), and
        trial points defaulting to the interior grid."""
        h = np.arange(1, n_side + 1) / (n_side + 1.0)
        interior = np.array([[x, y] for x in h for y in h])
        t0 = 0.0 if include_corners else 2.0 / n_boundary
        boundary = unit_square_perimeter(t0 + np.arange(n_boundary) * 4.0 / n_boundary)
        trial = interior if trial_points is None else np.asarray(trial_points, float)
        return cls(kernel=kernel, interior=interior, boundary=boundary, trial=trial)

    def functionals(self) -> FunctionalSet:
        fs = [LaplacianEval(tuple(p)) for p in self.interior]
        fs += [PointEval(tuple(p)) for p in self.boundary]
        return FunctionalSet(fs)

    def trial_functionals(self) -> list[PointEval]:
        return [PointEval(tuple(p)) for p in self.trial]

    def to_json(self) -> dict:
        return {
            "kernel": self.kernel.to_spec(),
            "interior": self.interior.tolist(),
            "boundary": self.boundary.tolist(),
            "trial": self.trial.tolist(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "PoissonSetup":
        from .kernels import kernel_from_spec
        return cls(kernel=kernel_from_spec(d["kernel"]),
                   interior=np.asarray(d["interior"]),
                   boundary=np.asarray(d["boundary"]),
                   trial=np.asarray(d["trial"]))


@dataclass(frozen=True)
class UnsymmetricRecovery:
    """Recovery f -> v^T C Lambda(f) with trial functions v_k = K(z_k, .)."""

    kernel: object
    functionals: FunctionalSet
    trial: np.ndarray
    coefficient_map: np.ndarray  # C, N x M
    rtol: float
    rank: int
    vandermonde: np.ndarray = field(repr=False, default=None)  # A, M x N

    @property
    def m(self) -> int:
        return len(self.functionals)

    @property
    def n(self) -> int:
        return len(self.trial)

    def trial_functionals(self) -> list[PointEval]:
        return [PointEval(tuple(p)) for p in self.trial]


def build_kansa(setup: PoissonSetup, rtol: float | None = None) -> UnsymmetricRecovery:
    """Assemble the generalized Vandermonde A with entries lambda_j(v_k) and
    take C as its tolerance-cut pseudoinverse."""
    lam_set = setup.functionals()
    trial = setup.trial_functionals()
    a = setup.kernel.cross(lam_set, trial)  # M x N
    if rtol is None:
        rtol = linalg.default_pinv_rtol(a)
    dec = linalg.svd(a)
    return UnsymmetricRecovery(
        kernel=setup.kernel, functionals=lam_set, trial=setup.trial,
        coefficient_map=dec.pinv(rtol), rtol=rtol, rank=dec.rank(rtol),
        vandermonde=a)


def pseudo_lagrangian_b(rec: UnsymmetricRecovery, mus) -> np.ndarray:
    """Rows b with b_k = sum_j mu(v_j) C_{jk} = mu of the pseudo-Lagrangians."""
    mu_v = rec.kernel.cross(mus, rec.trial_functionals())
    return mu_v @ rec.coefficient_map


def kansa_power_squared(rec: UnsymmetricRecovery, mu) -> float:
    """Squared power of the unsymmetric recovery at mu:
    K_mumu - 2 b^T K_{Lambda,mu} + b^T K_{Lambda,Lambda} b, clamped at 0."""
    return float(kansa_power_squared_batch(rec, [mu])[0])


def kansa_power_squared_batch(rec: UnsymmetricRecovery, mus) -> np.ndarray:
    mus = list(mus)
    kmm = rec.kernel.diag(mus)
    if rec.n == 0:
        return np.maximum(kmm, 0.0)
    kml = rec.kernel.cross(mus, rec.functionals)
    gram = rec.kernel.cross(rec.functionals, rec.functionals)
    gram = np.triu(gram) + np.triu(gram, 1).T
    b = pseudo_lagrangian_b(rec, mus)
    p2 = (kmm - 2.0 * np.einsum("ij,ij->i", b, kml)
          + np.einsum("ij,jk,ik->i", b, gram, b))
    return np.maximum(p2, 0.0)


def pseudo_lagrangian_norms(rec: UnsymmetricRecovery) -> np.ndarray:
    """Squared norms ||a_k||^2, the diagonal of C^T K_{T,T} C."""
    c = rec.coefficient_map
    if rec.n == 0:
        return np.zeros(rec.m)
    k_tt = rec.kernel.cross(rec.trial_functionals(), rec.trial_functionals())
    k_tt = np.triu(k_tt) + np.triu(k_tt, 1).T
    return np.einsum("ji,jk,ki->i", c, k_tt, c)


# ---------------------------------------------------------------------------
# SVD / Tikhonov coefficient maps for overdetermined linear systems

@dataclass(frozen=True)
class SvdRecovery:
    """Diagonalized M x N system: nonincreasing singular values padded with
    zeros to length M, plus an optional Tikhonov parameter."""

    sigma: np.ndarray
    tau: float = 0.0

    def __init__(self, singular_values, m: int | None = None, tau: float = 0.0):
        s = np.atleast_1d(np.asarray(singular_values, dtype=float))
        if np.any(s < 0) or np.any(np.diff(s) > 0):
            raise ValueError("singular values must be nonincreasing and >= 0")
        if tau < 0:
            raise ValueError("Tikhonov parameter must be >= 0")
        if m is not None:
            if m < s.size:
                raise ValueError(f"cannot pad {s.size} singular values to length {m}")
            s = np.concatenate([s, np.zeros(m - s.size)])
        object.__setattr__(self, "sigma", s)
        object.__setattr__(self, "tau", float(tau))

    def zero_mask(self) -> np.ndarray:
        smax = self.sigma[0] if self.sigma.size else 0.0
        return self.sigma <= RANK_RTOL * smax


def svd_power_squared(rec: SvdRecovery, mu) -> float:
    """Squared power of the (possibly regularized) diagonal solver.

    Without regularization this sums mu_k^2 over the zero singular values;
    with tau > 0 it is sum_k mu_k^2 tau^2 / (sigma_k + tau)^2.
    """
    mu = np.asarray(mu, dtype=float)
    if mu.shape != rec.sigma.shape:
        raise ValueError(f"need {rec.sigma.size} coefficients, got {mu.shape}")
    if rec.tau > 0.0:
        return float(np.sum(mu ** 2 * rec.tau ** 2 / (rec.sigma + rec.tau) ** 2))
    return float(np.sum(mu[rec.zero_mask()] ** 2))


def svd_bump_min(rec: SvdRecovery, mu) -> tuple[np.ndarray, float]:
    """Minimum-norm bump vector: supported on the zero-sigma coordinates,
    f_k = mu_k / sum(mu_j^2), with norm the reciprocal root of that sum."""
    mu = np.asarray(mu, dtype=float)
    mask = rec.zero_mask()
    tail = mu[mask]
    denom = float(np.sum(tail ** 2))
    if not mask.any() or denom == 0.0:
        raise NoBumpExists(
            "no zero singular value carries a nonzero mu component "
            "(the excluded 1 <= 0*inf case)")
    f = np.zeros_like(mu)
    f[mask] = tail / denom
    return f, math.sqrt(float(np.sum(f ** 2)))
