"""Adaptive piecewise-Chebyshev representation of integrands.

Each panel carries a degree-``deg`` Chebyshev interpolant of every
integrand; panels are bisected until the trailing coefficients fall below
``rtol`` times the mean magnitude of the integrand.  The interpolants are
integrated exactly, which gives continuous cumulative integrals and, for
positive integrands, a monotone function that can be inverted by Newton's
method inside a single panel.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as npcheb

from .errors import QuadratureFailure

_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _nodes(deg: int):
    if deg not in _CACHE:
        k = np.arange(deg + 1)
        x = np.cos(np.pi * (k + 0.5) / (deg + 1))[::-1]
        vinv = np.linalg.inv(npcheb.chebvander(x, deg))
        _CACHE[deg] = (x, vinv)
    return _CACHE[deg]


def clenshaw(coef: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Evaluate sum_k coef[i, k] T_k(x[i]) row by row."""
    b1 = np.zeros_like(x)
    b2 = np.zeros_like(x)
    two_x = 2.0 * x
    for k in range(coef.shape[1] - 1, 0, -1):
        b1, b2 = coef[:, k] + two_x * b1 - b2, b1
    return coef[:, 0] + x * b1 - b2


class PiecewiseChebyshev:
    """Piecewise Chebyshev interpolants of ``nfuncs`` integrands on [a, b]."""

    def __init__(self, breaks: np.ndarray, coeffs: np.ndarray):
        self.breaks = breaks
        self.coeffs = coeffs  # (nfuncs, npanels, deg + 1)
        self.mid = 0.5 * (breaks[1:] + breaks[:-1])
        self.half = 0.5 * (breaks[1:] - breaks[:-1])
        self._anti = None
        k = np.arange(coeffs.shape[-1])
        # integral of T_k over [-1, 1]
        weights = np.where(k % 2 == 0, 2.0 / (1.0 - k * k + (k == 1)), 0.0)
        panel_int = self.half * (coeffs @ weights)
        self.offsets = np.concatenate(
            [np.zeros((coeffs.shape[0], 1)), np.cumsum(panel_int, axis=-1)], axis=-1
        )

    @classmethod
    def adapt(cls, func, a: float, b: float, nfuncs: int, *, deg: int = 24,
              rtol: float = 1e-13, init_panels: int = 8, max_panels: int = 200_000,
              max_levels: int = 80) -> "PiecewiseChebyshev":
        nodes, vinv = _nodes(deg)
        edges = np.linspace(a, b, init_panels + 1)
        pend_lo, pend_hi = edges[:-1], edges[1:]
        acc_lo, acc_hi, acc_c = [], [], []
        acc_mass = np.zeros(nfuncs)
        for _ in range(max_levels):
            mid = 0.5 * (pend_lo + pend_hi)
            half = 0.5 * (pend_hi - pend_lo)
            x = mid[:, None] + half[:, None] * nodes[None, :]
            vals = np.asarray(func(x.ravel()), dtype=float).reshape(nfuncs, *x.shape)
            if not np.all(np.isfinite(vals)):
                raise QuadratureFailure("integrand produced non-finite values")
            coef = vals @ vinv.T
            mass = acc_mass + np.sum(2.0 * half * np.abs(vals).mean(axis=-1), axis=-1)
            scale = mass / (b - a)
            tail = np.abs(coef[..., -1]) + np.abs(coef[..., -2])
            # round-off floor: coefficients cannot resolve below ~eps * local magnitude
            floor = 64 * np.finfo(float).eps * np.abs(vals).max(axis=-1)
            ok = np.all(tail <= np.maximum(rtol * scale[:, None], floor) + 1e-300, axis=0)
            if np.any(ok):
                acc_lo.append(pend_lo[ok])
                acc_hi.append(pend_hi[ok])
                acc_c.append(coef[:, ok, :])
                acc_mass = acc_mass + np.sum(
                    2.0 * half[ok] * np.abs(vals[:, ok, :]).mean(axis=-1), axis=-1
                )
            bad = ~ok
            if not np.any(bad):
                break
            lo, hi = pend_lo[bad], pend_hi[bad]
            m = 0.5 * (lo + hi)
            pend_lo = np.concatenate([lo, m])
            pend_hi = np.concatenate([m, hi])
            n_total = sum(len(v) for v in acc_lo) + len(pend_lo)
            if n_total > max_panels or np.min(pend_hi - pend_lo) < 1e-15 * (b - a):
                raise QuadratureFailure("adaptive refinement did not reach tolerance")
        else:
            raise QuadratureFailure("adaptive refinement exceeded the level limit")
        lo = np.concatenate(acc_lo)
        hi = np.concatenate(acc_hi)
        coef = np.concatenate(acc_c, axis=1)
        order = np.argsort(lo)
        breaks = np.concatenate([lo[order], hi[order][-1:]])
        return cls(breaks, coef[:, order, :])

    @property
    def anti(self) -> np.ndarray:
        """Panel antiderivatives, zero at the left end of each panel."""
        if self._anti is None:
            self._anti = npcheb.chebint(self.coeffs, m=1, lbnd=-1, axis=-1)
        return self._anti

    @property
    def npanels(self) -> int:
        return len(self.half)

    def total(self, k: int = 0) -> float:
        return float(self.offsets[k, -1])

    def _locate(self, x):
        x = np.asarray(x, dtype=float)
        idx = np.clip(np.searchsorted(self.breaks, x, side="right") - 1, 0, self.npanels - 1)
        xh = (x - self.mid[idx]) / self.half[idx]
        return idx, xh

    def integrand(self, x, k: int = 0):
        idx, xh = self._locate(np.ravel(x))
        return clenshaw(self.coeffs[k, idx], xh).reshape(np.shape(x))

    def cumulative(self, x, k: int = 0):
        """Integral of integrand k from a to x."""
        idx, xh = self._locate(np.ravel(x))
        # exact at panel left edges, where Clenshaw leaves a rounding residue
        part = np.where(xh == -1.0, 0.0, clenshaw(self.anti[k, idx], xh))
        val = self.offsets[k, idx] + self.half[idx] * part
        return val.reshape(np.shape(x))

    def invert(self, y, k: int = 0, iters: int = 60):
        """Solve cumulative(x, k) = y for a positive integrand k."""
        y = np.ravel(np.asarray(y, dtype=float))
        off = self.offsets[k]
        idx = np.clip(np.searchsorted(off, y, side="right") - 1, 0, self.npanels - 1)
        target = (y - off[idx]) / self.half[idx]
        anti = self.anti[k, idx]
        coef = self.coeffs[k, idx]
        lo = -np.ones_like(y)
        hi = np.ones_like(y)
        total = off[idx + 1] - off[idx]
        x = np.clip(2.0 * target * self.half[idx] / np.where(total > 0, total, 1.0) - 1.0, -1, 1)
        act = np.arange(len(y))
        for _ in range(iters):
            xa = x[act]
            F = clenshaw(anti[act], xa) - target[act]
            lo[act] = np.where(F < 0, xa, lo[act])
            hi[act] = np.where(F > 0, xa, hi[act])
            dF = clenshaw(coef[act], xa)
            step = np.where(dF > 0, F / np.where(dF > 0, dF, 1.0), np.inf)
            xn = xa - step
            outside = ~((xn > lo[act]) & (xn < hi[act]))
            xn = np.where(outside, 0.5 * (lo[act] + hi[act]), xn)
            # a Newton step this small means the previous iterate was already
            # within a few ulps; one more step is taken, then the point retires
            done = (np.abs(xn - xa) <= 1e-14) | (F == 0.0)
            x[act] = xn
            act = act[~done]
            if not len(act):
                break
        x = np.where(target <= 0.0, -1.0, x)
        return self.mid[idx] + self.half[idx] * x
