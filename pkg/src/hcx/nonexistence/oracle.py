"""Float cross-check that the lemma polynomials have no common real zero.

Batched Levenberg-Marquardt from many random starts on the sum of squares
of the twelve polynomials.  Independent of the exact certificate: it only
reads the transcribed reference polynomials.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..scalarpoly import Polynomial
from .system import coeff_names, reference_lemma_polynomials


class _Quadratic:
    """Polynomials of degree <= 2 as c + L x + x^T Q x, evaluated in batches."""

    def __init__(self, polys: list[Polynomial], names: list[str]):
        index = {v: i for i, v in enumerate(names)}
        self.n = n = len(names)
        r = len(polys)
        self.c = np.zeros(r)
        self.L = np.zeros((r, n))
        self.Q = np.zeros((r, n, n))
        for p_idx, p in enumerate(polys):
            for mono, coef in p.items():
                flat = [index[v] for v, e in mono for _ in range(e)]
                if len(flat) > 2:
                    raise ValueError("only polynomials of degree at most 2 are supported")
                if not flat:
                    self.c[p_idx] += float(coef)
                elif len(flat) == 1:
                    self.L[p_idx, flat[0]] += float(coef)
                else:
                    self.Q[p_idx, flat[0], flat[1]] += float(coef)
        self.S = self.Q + self.Q.transpose(0, 2, 1)

    def values_and_jacobian(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        z, (r, n) = x.shape[0], self.L.shape
        Qx = (x @ self.Q.reshape(r * n, n).T).reshape(z, r, n)
        F = self.c + x @ self.L.T + (Qx @ x[:, :, None])[:, :, 0]
        Jac = self.L + (x @ self.S.reshape(r * n, n).T).reshape(z, r, n)
        return F, Jac


@dataclass
class OracleResult:
    starts: int
    minimum: float
    argmin: np.ndarray

    def exceeds(self, threshold: float) -> bool:
        return self.minimum > threshold


def levenberg_marquardt(model: _Quadratic, x: np.ndarray, iterations: int = 100,
                        lam0: float = 1e-2) -> tuple[np.ndarray, np.ndarray]:
    x = x.copy()
    lam = np.full(x.shape[0], lam0)
    F, Jac = model.values_and_jacobian(x)
    f = (F * F).sum(axis=1)
    eye = np.eye(model.n)
    for _ in range(iterations):
        Jt = Jac.transpose(0, 2, 1)
        JtJ = Jt @ Jac
        g = (Jt @ F[:, :, None])[:, :, 0]
        A = JtJ + lam[:, None, None] * (eye + JtJ * eye)
        step = np.linalg.solve(A, -g[:, :, None])[:, :, 0]
        xt = x + step
        Ft, Jact = model.values_and_jacobian(xt)
        ft = (Ft * Ft).sum(axis=1)
        ok = np.isfinite(ft) & (ft < f)
        x[ok], F[ok], Jac[ok], f[ok] = xt[ok], Ft[ok], Jact[ok], ft[ok]
        lam = np.where(ok, lam * 0.3, lam * 10.0)
        lam = np.clip(lam, 1e-12, 1e12)
    return x, f


def lemma_minimum(starts: int = 100_000, seed: int = 0, scale: float = 2.0,
                  chunk: int = 5000, iterations: int = 100) -> OracleResult:
    """Smallest sum of squares found over `starts` random starting points."""
    model = _Quadratic(reference_lemma_polynomials("j"), coeff_names("j"))
    rng = np.random.default_rng(seed)
    best, arg = np.inf, None
    for lo in range(0, starts, chunk):
        x0 = scale * rng.standard_normal((min(chunk, starts - lo), model.n))
        x, f = levenberg_marquardt(model, x0, iterations)
        i = int(np.argmin(f))
        if f[i] < best:
            best, arg = float(f[i]), x[i]
    return OracleResult(starts, best, arg)
