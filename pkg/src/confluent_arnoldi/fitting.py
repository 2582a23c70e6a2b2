"""Least-squares fitting in confluent Arnoldi bases, plus the monomial baseline."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from .arnoldi_core import (
    NodeSet,
    as_nodes,
    confluent_arnoldi,
    confluent_eval_matrix,
    naive_confluent_matrix,
    split_blocks,
)

HERMITE = "hermite"
VALUES = "values"
BASIS_KINDS = (HERMITE, VALUES)


def lstsq(A: np.ndarray, b: np.ndarray):
    """Dense least squares by pivoted QR.  Returns ``(x, residual_norm)``.

    Column-pivoted QR (LAPACK ``gelsy``) with rank cut ``max(M, N) * eps``
    relative to the leading diagonal of ``R``.  For the full-rank Arnoldi
    systems this is ordinary Householder QR; for numerically rank-deficient
    ones (the real/imaginary splits of Fourier extension) the dropped
    directions are zeroed, giving the minimum-norm solution of the truncated
    problem instead of amplified noise.
    """
    A = np.asarray(A)
    b = np.asarray(b)
    cond = max(A.shape) * np.finfo(float).eps
    x, *_ = scipy.linalg.lstsq(A, b, cond=cond, lapack_driver="gelsy")
    return x, float(np.linalg.norm(A @ x - b))


def check_basis_kind(kind: str) -> str:
    if kind not in BASIS_KINDS:
        raise ValueError(f"basis kind must be one of {BASIS_KINDS}, got {kind!r}")
    return kind


@dataclass(frozen=True)
class HermiteData:
    """Function values and derivatives of orders 1..l at common nodes."""

    nodes: NodeSet
    values: np.ndarray
    derivs: Sequence[np.ndarray] = ()

    def __post_init__(self):
        nodes = as_nodes(self.nodes)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", np.asarray(self.values))
        object.__setattr__(self, "derivs", tuple(np.asarray(d) for d in self.derivs))
        for v in (self.values,) + self.derivs:
            if v.shape != (nodes.m,):
                raise ValueError(f"data of shape {v.shape} does not match {nodes.m} nodes")

    @property
    def order(self) -> int:
        return len(self.derivs)

    def stacked(self) -> np.ndarray:
        return np.concatenate((self.values,) + self.derivs)


@dataclass(frozen=True)
class PolyModel:
    """Coefficients ``d`` in the Arnoldi basis described by the Hessenberg ``h``."""

    d: np.ndarray
    h: np.ndarray
    order_fit: int
    basis_kind: str
    residual: float = float("nan")
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.d.shape[0] != self.h.shape[1] + 1:
            raise ValueError("len(d) must equal cols(h) + 1")
        if not np.all(np.isfinite(self.d)):
            raise ValueError("non-finite coefficients")

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def field(self) -> str:
        complex_ = np.iscomplexobj(self.d) or np.iscomplexobj(self.h)
        return "complex" if complex_ else "real"


def fit_hermite(data: HermiteData, n: int, reorthogonalize: bool = False) -> PolyModel:
    """Fit values and derivatives with a degree-``n`` polynomial.

    The basis is orthogonalized on the stacked Hermite data (order
    ``data.order``), and ``d`` solves ``Q d ~ (f; f'; ...)`` in least squares.
    """
    basis = confluent_arnoldi(data.nodes, data.order, n, reorthogonalize=reorthogonalize)
    d, res = lstsq(basis.q, data.stacked())
    kind = HERMITE if data.order > 0 else VALUES
    return PolyModel(d=d, h=basis.h, order_fit=data.order, basis_kind=kind, residual=res)


def fit_values_only(nodes, values, n: int, reorthogonalize: bool = False) -> PolyModel:
    """Vandermonde with Arnoldi on function values only.

    The resulting model still evaluates derivatives of any order through
    :func:`evaluate`.
    """
    X = as_nodes(nodes)
    basis = confluent_arnoldi(X, 0, n, reorthogonalize=reorthogonalize)
    d, res = lstsq(basis.q, np.asarray(values))
    return PolyModel(d=d, h=basis.h, order_fit=0, basis_kind=VALUES, residual=res)


def fit_hermite_with_values_basis(data: HermiteData, n: int, basis_nodes=None) -> PolyModel:
    """Hermite fit in the values-orthogonalized basis.

    The basis is orthogonalized on function values at ``basis_nodes``
    (default: the data nodes, which then need ``m >= n + 1``); the
    derivative rows come from replaying ``h`` with the confluent operator.
    """
    basis = confluent_arnoldi(data.nodes if basis_nodes is None else basis_nodes, 0, n)
    W = confluent_eval_matrix(basis.h, data.nodes, data.order).w
    d, res = lstsq(W, data.stacked())
    return PolyModel(d=d, h=basis.h, order_fit=0, basis_kind=VALUES, residual=res)


def fit_indefinite_integral(nodes, integrand, n: int, basis_kind: str = HERMITE) -> PolyModel:
    """Fit ``p`` of degree ``n`` with ``p' ~ integrand`` and ``d_0 = 0``.

    Only the derivative block and the non-constant columns enter the solve;
    the constant coefficient is pinned to zero, so ``p`` is an antiderivative
    up to an (unknown, basis dependent) additive constant.
    """
    check_basis_kind(basis_kind)
    X = as_nodes(nodes)
    f = np.asarray(integrand)
    if X.m < n:
        raise ValueError(f"need at least n = {n} nodes, got {X.m}")
    if basis_kind == HERMITE:
        basis = confluent_arnoldi(X, 1, n)
        h = basis.h
        D = basis.block(1)
    else:
        h = confluent_arnoldi(X, 0, n).h
        D = confluent_eval_matrix(h, X, 1).block(1)
    dt = np.result_type(D, f)
    if n == 0:
        return PolyModel(d=np.zeros(1, dtype=dt), h=h, order_fit=1 if basis_kind == HERMITE else 0,
                         basis_kind=basis_kind, residual=float(np.linalg.norm(f)))
    dhat, res = lstsq(D[:, 1:], f)
    d = np.concatenate([np.zeros(1, dtype=dhat.dtype), dhat])
    return PolyModel(d=d, h=h, order_fit=1 if basis_kind == HERMITE else 0,
                     basis_kind=basis_kind, residual=res)


def evaluate(model: PolyModel, s, order_out: int = 1) -> list:
    """Values and derivatives ``[p(s), p'(s), ..., p^(order_out)(s)]``."""
    E = confluent_eval_matrix(model.h, as_nodes(s), order_out)
    return split_blocks(E.w @ model.d, order_out)


def naive_fit(data: HermiteData, n: int) -> np.ndarray:
    """Monomial coefficients from the raw confluent Vandermonde system.

    Pivoted-QR least squares; rank deficiency at large ``n`` is expected.
    """
    A = naive_confluent_matrix(data.nodes, n, data.order)
    c, _ = lstsq(A, data.stacked())
    return c


def naive_eval(c: np.ndarray, s, order_out: int = 1) -> list:
    n = len(c) - 1
    A = naive_confluent_matrix(as_nodes(s), n, order_out)
    return split_blocks(A @ c, order_out)


def max_error(approx, exact) -> float:
    return float(np.max(np.abs(np.asarray(approx) - np.asarray(exact))))


def hermite_data(f, fprimes, nodes) -> HermiteData:
    """Sample ``f`` and each callable in ``fprimes`` at ``nodes``."""
    x = as_nodes(nodes)
    return HermiteData(x, f(x.nodes), tuple(g(x.nodes) for g in fprimes))

