"""Orthonormal polynomial bases, transforms, and spectral differentiation.

For the plain measure dnu_n the basis is the Gegenbauer family: orthonormal
polynomials P_k with P_0 = 1, P_1 proportional to z, satisfying

    L P_k = -k (k + n - 1) P_k,

so the operator module diagonalizes in this basis.  The recurrence
coefficients are computed by the Stieltjes procedure directly on the Gauss
rule (discrete inner products), which reproduces the classical three-term
recurrence to rounding for every real n > 0 and extends verbatim to the
regularized measures, whose orthonormal families have no classical closed
form.

A function on [-1, 1] is carried either as a ``GridFn`` (values at the
nodes of a quadrature rule) or as a ``SpectralFn`` (coefficients in the
orthonormal basis).  Transforms are exact for polynomials of degree <= K
because the Gauss rules integrate products of basis elements exactly.
Derivatives are computed in spectral space; second derivatives apply the
first-derivative operator twice, so the top two modes carry no accuracy
guarantee.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import AccuracyWarning, AliasingError, DomainError, ShapeError
from .measure import DEFAULT_NODES, Quadrature, UltraParams, build_quadrature, refined_quadrature

#: A function represented by its values at quadrature nodes.
GridFn = np.ndarray

#: Relative spectral tail energy beyond which differentiation warns.
TAIL_WARN_FRACTION = 1e-8


def eigenvalue(n: float, k: int) -> float:
    """Eigenvalue k (k + n - 1) of -L on the degree-k basis element."""
    if k < 0 or k != int(k):
        raise DomainError(f"mode index must be a nonnegative integer, got {k}")
    return float(k) * (float(k) + n - 1.0)


@dataclass(frozen=True)
class SpectralFn:
    """Coefficients of a function in the orthonormal basis of dnu_n.

    ``coeffs[k]`` multiplies the degree-k orthonormal element; ``n`` names
    the measure (the ceiling dimension d when the sample grid belongs to a
    regularized rule).
    """

    coeffs: np.ndarray = field(repr=False)
    n: float

    def __post_init__(self):
        self.coeffs.setflags(write=False)

    @property
    def K(self) -> int:
        return self.coeffs.shape[0] - 1

    def __repr__(self):
        return f"SpectralFn(n={self.n}, K={self.K})"


class OrthoBasis:
    """Orthonormal polynomials of a discrete measure, with derivatives.

    Built by the Stieltjes recurrence on ``quad``: with b_0 = 0,

        b_{k+1} Q_{k+1}(z) = (z - a_k) Q_k(z) - b_k Q_{k-1}(z),

    where a_k and b_k are discrete inner products against ``quad``.  The
    same recurrence, differentiated once and twice, evaluates Q_k' and
    Q_k'' anywhere without finite differencing.

    Parameters
    ----------
    quad : Quadrature
        Discrete measure defining the inner product.  Must be fine enough
        that moments up to degree 2K+1 are integrated accurately.
    K : int
        Highest retained degree; K <= order - 2.
    """

    def __init__(self, quad: Quadrature, K: int):
        if K + 2 > quad.order:
            raise AliasingError(
                f"truncation K={K} needs at least K+2={K + 2} nodes, rule has {quad.order}"
            )
        self.quad = quad
        self.K = K
        z, w = quad.nodes, quad.weights
        a = np.zeros(K + 1)
        b = np.zeros(K + 1)  # b[0] unused
        V = np.empty((z.size, K + 1))
        V[:, 0] = 1.0 / np.sqrt(w.sum())
        for k in range(K):
            a[k] = np.dot(w, z * V[:, k] ** 2)
            q = (z - a[k]) * V[:, k]
            if k > 0:
                q -= b[k] * V[:, k - 1]
            b[k + 1] = np.sqrt(np.dot(w, q * q))
            V[:, k + 1] = q / b[k + 1]
        a[K] = np.dot(w, z * V[:, K] ** 2)
        self.alpha = a
        self.offdiag = b
        self.V = V
        self.V1 = self._derivative_values(z, V, 1)
        # coefficient-space first-derivative operator; second derivatives
        # apply it twice, so modes K-1 and K are outside accuracy claims
        self.D = V.T @ (w[:, None] * self.V1)

    def _derivative_values(self, z: np.ndarray, V: np.ndarray, order: int) -> np.ndarray:
        a, b, K = self.alpha, self.offdiag, self.K
        out = np.zeros_like(V)
        if K == 0:
            return out
        if order == 1:
            out[:, 1] = V[:, 0] / b[1]
            for k in range(1, K):
                q = (z - a[k]) * out[:, k] + V[:, k] - b[k] * out[:, k - 1]
                out[:, k + 1] = q / b[k + 1]
        else:
            raise ValueError("only first-derivative tables are stored")
        return out

    def evaluate(self, nodes: np.ndarray, order: int = 0) -> np.ndarray:
        """Values (order 0), Q_k' (order 1) or Q_k'' (order 2) at ``nodes``.

        Returns an array of shape (len(nodes), K+1).  The recurrence is
        numerically stable on [-1, 1] for all supported measures.
        """
        z = np.asarray(nodes, dtype=float)
        a, b, K = self.alpha, self.offdiag, self.K
        V = np.empty((z.size, K + 1))
        V[:, 0] = 1.0
        if K >= 1:
            V[:, 1] = (z - a[0]) / b[1]
        for k in range(1, K):
            V[:, k + 1] = ((z - a[k]) * V[:, k] - b[k] * V[:, k - 1]) / b[k + 1]
        if order == 0:
            return V
        V1 = np.zeros_like(V)
        if K >= 1:
            V1[:, 1] = 1.0 / b[1]
        for k in range(1, K):
            V1[:, k + 1] = ((z - a[k]) * V1[:, k] + V[:, k] - b[k] * V1[:, k - 1]) / b[k + 1]
        if order == 1:
            return V1
        V2 = np.zeros_like(V)
        for k in range(1, K):
            V2[:, k + 1] = ((z - a[k]) * V2[:, k] + 2.0 * V1[:, k] - b[k] * V2[:, k - 1]) / b[k + 1]
        if order == 2:
            return V2
        raise ValueError(f"order must be 0, 1 or 2, got {order}")

    def analyze(self, values: GridFn, K: int | None = None) -> np.ndarray:
        """Project node values onto the basis, returning coefficients 0..K."""
        values = np.asarray(values, dtype=float)
        if values.shape != self.quad.nodes.shape:
            raise ShapeError(
                f"expected {self.quad.nodes.size} node values, got shape {values.shape}"
            )
        if K is None:
            K = self.K
        if K > self.K:
            raise AliasingError(f"requested K={K} exceeds basis truncation {self.K}")
        return self.V[:, : K + 1].T @ (self.quad.weights * values)

    def synthesize(self, coeffs: np.ndarray, nodes: np.ndarray | None = None) -> GridFn:
        """Evaluate a coefficient vector at ``nodes`` (defaults to the rule's)."""
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape[0] > self.K + 1:
            raise AliasingError(
                f"coefficient vector of length {coeffs.shape[0]} exceeds basis size {self.K + 1}"
            )
        table = self.V if nodes is None else self.evaluate(nodes)
        return table[:, : coeffs.shape[0]] @ coeffs

    def derivative_values(self, coeffs: np.ndarray, nodes: np.ndarray | None = None) -> GridFn:
        table = self.V1 if nodes is None else self.evaluate(nodes, order=1)
        return table[:, : coeffs.shape[0]] @ coeffs

    def second_derivative_values(self, coeffs: np.ndarray, nodes: np.ndarray | None = None) -> GridFn:
        c1 = self.D[: coeffs.shape[0], : coeffs.shape[0]] @ coeffs
        return self.derivative_values(c1, nodes)


@lru_cache(maxsize=64)
def get_basis(n: float, N: int = DEFAULT_NODES) -> OrthoBasis:
    """Shared read-only Gegenbauer basis for the plain measure dnu_n."""
    quad = build_quadrature(UltraParams(n=n), N, kind="plain")
    return OrthoBasis(quad, K=N - 2)


@lru_cache(maxsize=16)
def get_regularized_basis(n: float, eps: float, N: int = DEFAULT_NODES) -> OrthoBasis:
    """Orthonormal basis of the regularized measure, built on its refined rule.

    Truncation is K = N - 2 as for plain bases, but the discrete inner
    product uses the eps-adapted refined rule so that the folded weight is
    integrated to full precision.
    """
    params = UltraParams(n=n, eps=eps)
    fine = refined_quadrature(params, N, kind="regularized")
    return OrthoBasis(fine, K=N - 2)


def interpolation_basis(q: Quadrature) -> OrthoBasis:
    """The polynomial family interpolating GridFn samples on ``q``.

    Plain rules carry the Gegenbauer basis of their own measure.  A
    regularized rule shares its nodes with the plain rule of the ceiling
    dimension d, so values on it are interpreted through the d-basis.
    """
    if q.kind == "plain":
        return get_basis(q.n, q.order)
    import math

    return get_basis(float(math.ceil(q.n)), q.order)


def to_spectral(f: GridFn, q: Quadrature, K: int | None = None) -> SpectralFn:
    """Forward transform of node values to basis coefficients.

    Exact (to rounding) whenever f is a polynomial of degree <= K sampled
    on its own rule; the default truncation is K = N - 2.
    """
    basis = interpolation_basis(q)
    if K is None:
        K = basis.K
    if K >= q.order:
        raise AliasingError(f"K={K} modes cannot be resolved on an N={q.order} rule")
    coeffs = basis.analyze(np.asarray(f, dtype=float), K=min(K, basis.K))
    return SpectralFn(coeffs=coeffs, n=basis.quad.n)


def from_spectral(s: SpectralFn, nodes: np.ndarray) -> GridFn:
    """Evaluate a SpectralFn at arbitrary points of [-1, 1]."""
    N = max(DEFAULT_NODES, s.K + 2)
    basis = get_basis(s.n, N)
    return basis.synthesize(s.coeffs, np.asarray(nodes, dtype=float))


def spectral_derivative(f: GridFn, q: Quadrature, order: int = 1) -> GridFn:
    """Derivative of the spectral interpolant of f, at the nodes of ``q``.

    Emits :class:`AccuracyWarning` when the top two modes carry more than
    ``TAIL_WARN_FRACTION`` of the coefficient energy, which signals that f
    is not resolved on this rule and the derivative is untrustworthy.
    """
    if order not in (1, 2):
        raise DomainError(f"order must be 1 or 2, got {order}")
    basis = interpolation_basis(q)
    c = basis.analyze(np.asarray(f, dtype=float))
    total = float(np.dot(c, c))
    if total > 0:
        tail = float(np.dot(c[-2:], c[-2:])) / total
        if tail > TAIL_WARN_FRACTION:
            warnings.warn(
                f"spectral tail fraction {tail:.2e} exceeds {TAIL_WARN_FRACTION:.0e}; "
                "derivative accuracy is degraded",
                AccuracyWarning,
                stacklevel=2,
            )
    if order == 1:
        return basis.derivative_values(c)
    return basis.second_derivative_values(c)
