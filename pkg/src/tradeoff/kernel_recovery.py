"""Optimal kernel recovery: generalized interpolation, Lagrangians, the
bordered-Gram power function, and the equality form of the trade-off
principle (power times Lagrangian norm equals one)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import ExcludedCase
from .functionals import Functional, FunctionalSet
from .report import FLAG_EXCLUDED, FLAG_OK, LAGRANGIAN, TradeoffReport

# mu counts as reproduced (excluded case) below this fraction of K_mu_mu
EXCLUDED_RTOL = 1e-12

# the two power-function routes must agree this closely, with an absolute
# floor so roundoff near the excluded case cannot trip the check
_AGREE_RTOL = 1e-7


@dataclass(frozen=True)
class KernelInterpolant:
    """Generalized kernel interpolant sum_j c_j lambda_j^y K(y, .)."""

    kernel: object
    functionals: FunctionalSet
    coefficients: np.ndarray
    jitter: float
    residual: float

    def evaluate(self, mu: Functional) -> float:
        return float((self.kernel.cross([mu], self.functionals) @ self.coefficients)[0])

    def evaluate_many(self, mus) -> np.ndarray:
        return self.kernel.cross(mus, self.functionals) @ self.coefficients

    def data(self) -> np.ndarray:
        """The data reproduced by the interpolant (Gram times coefficients)."""
        g = self.kernel.cross(self.functionals, self.functionals)
        return g @ self.coefficients


@dataclass(frozen=True)
class PowerEvaluation:
    """Squared add-one-in power of one evaluation functional, with the
    Lagrange values mu(u_j) produced along the way."""

    mu: Functional
    power_squared: float
    lagrange_values: np.ndarray
    k_mu_mu: float
    clamped: bool = False

    @property
    def excluded(self) -> bool:
        return self.power_squared <= EXCLUDED_RTOL * self.k_mu_mu


class PowerContext:
    """Factorization of the dual Gram of a functional set, reused across
    many evaluation functionals."""

    def __init__(self, kernel, lam_set: FunctionalSet | None):
        self.kernel = kernel
        self.lam_set = lam_set
        if lam_set is None or len(lam_set) == 0:
            self.gram = np.zeros((0, 0))
            self.factor = None
        else:
            g = kernel.cross(lam_set, lam_set)
            self.gram = np.triu(g) + np.triu(g, 1).T
            self.factor = linalg.factor_spd(self.gram)

    @property
    def jitter(self) -> float:
        return self.factor.jitter if self.factor is not None else 0.0

    def power_batch(self, mus) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Schur-complement powers for a batch of evaluation functionals.

        Returns (power_squared, lagrange_values, k_mu_mu); lagrange_values
        has one row per functional.
        """
        mus = list(mus)
        kmm = self.kernel.diag(mus)
        if self.factor is None:
            return np.maximum(kmm, 0.0), np.zeros((len(mus), 0)), kmm
        kml = self.kernel.cross(mus, self.lam_set)
        w = self.factor.solve(kml.T)
        p2 = kmm - np.einsum("ij,ji->i", kml, w)
        return np.maximum(p2, 0.0), w.T, kmm

    def power_squared(self, mu: Functional, cross_check: bool = True) -> PowerEvaluation:
        """Squared power via the Schur complement, cross-checked against the
        bordered quadratic form with coefficients (1, -mu(u_1), ..., -mu(u_N))."""
        kmm = float(self.kernel.diag([mu])[0])
        if self.factor is None:
            return PowerEvaluation(mu, max(kmm, 0.0), np.zeros(0), kmm)
        kml = self.kernel.cross([mu], self.lam_set)[0]
        w = self.factor.solve(kml)
        schur = kmm - float(kml @ w)
        if cross_check:
            bordered = kmm - 2.0 * float(w @ kml) + float(w @ self.gram @ w)
            # the routes differ by w^T (G w - k); allow the backward-error
            # level of that residual besides the relative tolerance
            floor = 1e-13 * len(w) * (abs(kmm)
                                      + float(w @ w) * np.max(np.abs(np.diag(self.gram))))
            tol = _AGREE_RTOL * max(abs(schur), abs(bordered)) + floor
            if abs(bordered - schur) > tol:
                raise ArithmeticError(
                    f"power-function routes disagree: schur={schur:.6e} "
                    f"bordered={bordered:.6e}")
        clamped = schur < 0.0
        return PowerEvaluation(mu, max(schur, 0.0), w, kmm, clamped)

    def bordered_power_squared(self, mu: Functional) -> float:
        """The bordered quadratic form route on its own."""
        kmm = float(self.kernel.diag([mu])[0])
        if self.factor is None:
            return kmm
        kml = self.kernel.cross([mu], self.lam_set)[0]
        w = self.factor.solve(kml)
        return kmm - 2.0 * float(w @ kml) + float(w @ self.gram @ w)

    def lagrangian_norm_squared(self, mu: Functional) -> float:
        """Squared norm of the add-one-in Lagrangian u_{mu,Lambda}.

        The Lagrangian is the representer of mu - sum_j mu(u_j) lambda_j
        scaled by 1/P^2; its norm comes from the bordered quadratic form
        over the extended Gram, so the product with the Schur-route P^2
        is a genuine two-route consistency check.
        """
        ev = self.power_squared(mu, cross_check=False)
        if ev.excluded:
            raise ExcludedCase(
                f"power vanishes at {mu!r}; no bump function exists")
        c = np.concatenate(([1.0], -ev.lagrange_values)) / ev.power_squared
        kmm = ev.k_mu_mu
        kml = self.kernel.cross([mu], self.lam_set)[0]
        quad = (c[0] * c[0] * kmm
                + 2.0 * c[0] * float(c[1:] @ kml)
                + float(c[1:] @ self.gram @ c[1:]))
        return max(quad, 0.0)


def fit(kernel, lam_set: FunctionalSet, data) -> KernelInterpolant:
    """Solve the Gram system for the generalized interpolant of the data."""
    data = np.asarray(data, dtype=float)
    if data.shape != (len(lam_set),):
        raise ValueError(
            f"need {len(lam_set)} data values, got shape {data.shape}")
    ctx = PowerContext(kernel, lam_set)
    coeff = ctx.factor.solve(data)
    res = np.linalg.norm(ctx.gram @ coeff - data)
    scale = np.linalg.norm(data)
    return KernelInterpolant(
        kernel=kernel, functionals=lam_set, coefficients=coeff,
        jitter=ctx.jitter, residual=float(res / scale) if scale else float(res))


def power_squared(kernel, lam_set: FunctionalSet | None, mu: Functional) -> PowerEvaluation:
    return PowerContext(kernel, lam_set).power_squared(mu)


def lagrangian_norm_squared(kernel, lam_set: FunctionalSet | None, mu: Functional) -> float:
    if lam_set is None or len(lam_set) == 0:
        kmm = float(kernel.diag([mu])[0])
        if kmm <= 0.0:
            raise ExcludedCase("zero evaluation functional")
        return 1.0 / kmm
    return PowerContext(kernel, lam_set).lagrangian_norm_squared(mu)


def tradeoff_report(kernel, lam_set: FunctionalSet | None, eval_set) -> list[TradeoffReport]:
    """One report per evaluation functional: power, Lagrangian norm, product.
    Excluded (reproduced) functionals are flagged, not fatal."""
    ctx = PowerContext(kernel, lam_set)
    out = []
    for mu in eval_set:
        ev = ctx.power_squared(mu)
        if ev.excluded:
            out.append(TradeoffReport(
                mu=mu, power=math.sqrt(ev.power_squared), stability_norm=math.nan,
                provenance=LAGRANGIAN, flag=FLAG_EXCLUDED))
            continue
        if ctx.factor is None:
            norm2 = 1.0 / ev.k_mu_mu
        else:
            norm2 = ctx.lagrangian_norm_squared(mu)
        out.append(TradeoffReport(
            mu=mu, power=math.sqrt(ev.power_squared),
            stability_norm=math.sqrt(norm2), provenance=LAGRANGIAN,
            flag=FLAG_OK))
    return out
