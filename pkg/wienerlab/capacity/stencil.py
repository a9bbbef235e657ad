# -*- coding: utf-8 -*-
# License: GNU General Public License v3

"""
Difference Stencils

Sparse forward-difference operators on a cell-centred grid. The symmetric
scheme averages the 2^N one-sided orientations: orientation ``v`` evaluates
the gradient on cells with index range [0, n-2] along forward axes and
[1, n-1] along backward axes, each weighted h^N / 2^N.

For a flux coefficient vector ``a`` the regularized operator is

    L(u) = sum_v sum_k D_k^T (w a_k s^{(p-2)/2} g_k),   s = |g|^2 + eps^2,

the gradient of (1/p) sum w s^{p/2}; ``-L(u) / h^N`` approximates
div(|Du|^{p-2} Du).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

SCHEMES = ("symmetric", "forward")


def _difference_1d(n: int, h: float) -> sp.csr_matrix:
    return sp.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n), format="csr") / h


def _restriction_1d(n: int, backward: bool) -> sp.csr_matrix:
    return sp.eye(n - 1, n, k=1 if backward else 0, format="csr")


def _kron_all(factors: list[sp.spmatrix]) -> sp.csr_matrix:
    out = factors[0]
    for f in factors[1:]:
        out = sp.kron(out, f, format="csr")
    return sp.csr_matrix(out)


@dataclass
class Orientation:
    """One one-sided variant: per-axis difference operators and the restriction to its cells"""
    backward: tuple[bool, ...]
    differences: list[sp.csr_matrix]
    restriction: sp.csr_matrix


@dataclass
class GridStencil:
    """Difference operators for a grid of ``shape`` cells with spacing ``h``"""
    shape: tuple[int, ...]
    h: float
    scheme: str = "symmetric"
    orientations: list[Orientation] = field(init=False, repr=False)

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown stencil scheme {self.scheme!r}")
        if min(self.shape) < 2:
            raise ValueError("stencil needs at least two cells per axis")
        dim = len(self.shape)
        variants = itertools.product((False, True), repeat=dim) if self.scheme == "symmetric" else [(False,) * dim]
        self.orientations = []
        for backward in variants:
            restrict = [_restriction_1d(n, b) for n, b in zip(self.shape, backward)]
            diffs = []
            for k in range(dim):
                factors = list(restrict)
                factors[k] = _difference_1d(self.shape[k], self.h)
                diffs.append(_kron_all(factors))
            self.orientations.append(Orientation(tuple(backward), diffs, _kron_all(restrict)))

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def weight(self) -> float:
        """Quadrature weight of one evaluation cell"""
        return self.h ** self.dim / len(self.orientations)

    def gradients(self, u: np.ndarray) -> list[list[np.ndarray]]:
        flat = np.ravel(u)
        return [[d @ flat for d in o.differences] for o in self.orientations]

    def energy(self, u: np.ndarray, p: float, eps: float = 0.0) -> float:
        """sum w (|g|^2 + eps^2)^{p/2}"""
        total = 0.0
        for grads in self.gradients(u):
            s = sum(g * g for g in grads) + eps * eps
            total += float(np.sum(s ** (p / 2)))
        return self.weight * total

    def energy_and_gradient(self, u: np.ndarray, p: float, eps: float) -> tuple[float, np.ndarray]:
        """Regularized energy and its gradient with respect to every cell value"""
        flat = np.ravel(u)
        total = 0.0
        grad = np.zeros_like(flat, dtype=float)
        for o in self.orientations:
            grads = [d @ flat for d in o.differences]
            s = sum(g * g for g in grads) + eps * eps
            total += float(np.sum(s ** (p / 2)))
            factor = p * s ** ((p - 2) / 2)
            for d, g in zip(o.differences, grads):
                grad += d.T @ (factor * g)
        return self.weight * total, self.weight * grad

    def operator(
        self,
        u: np.ndarray,
        p: float,
        eps: float,
        coefficients: list[np.ndarray] | None = None
    ) -> np.ndarray:
        """L(u); ``coefficients[k]`` is a_k on the full grid (default 1)"""
        flat = np.ravel(u)
        out = np.zeros_like(flat, dtype=float)
        for o in self.orientations:
            grads = [d @ flat for d in o.differences]
            s = sum(g * g for g in grads) + eps * eps
            factor = s ** ((p - 2) / 2)
            for k, (d, g) in enumerate(zip(o.differences, grads)):
                a = 1.0 if coefficients is None else o.restriction @ np.ravel(coefficients[k])
                out += d.T @ (a * factor * g)
        return self.weight * out

    def jacobian(
        self,
        u: np.ndarray,
        p: float,
        eps: float,
        coefficients: list[np.ndarray] | None = None
    ) -> sp.csr_matrix:
        """dL/du = sum D_k^T diag(a_k (s^{(p-2)/2} delta_kl + (p-2) s^{(p-4)/2} g_k g_l)) D_l"""
        flat = np.ravel(u)
        jac = sp.csr_matrix((self.size, self.size))
        for o in self.orientations:
            grads = [d @ flat for d in o.differences]
            s = sum(g * g for g in grads) + eps * eps
            base = s ** ((p - 2) / 2)
            cross = (p - 2) * s ** ((p - 4) / 2)
            for k, dk in enumerate(o.differences):
                a = 1.0 if coefficients is None else o.restriction @ np.ravel(coefficients[k])
                for l_, dl in enumerate(o.differences):
                    entry = cross * grads[k] * grads[l_]
                    if k == l_:
                        entry = entry + base
                    jac = jac + dk.T @ sp.diags(a * entry) @ dl
        return sp.csr_matrix(self.weight * jac)

    def laplacian(self) -> sp.csr_matrix:
        """The p = 2 operator matrix (no regularization)"""
        lap = sp.csr_matrix((self.size, self.size))
        for o in self.orientations:
            for d in o.differences:
                lap = lap + d.T @ d
        return sp.csr_matrix(self.weight * lap)
