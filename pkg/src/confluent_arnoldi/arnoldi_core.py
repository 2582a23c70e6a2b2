"""Confluent Krylov operator and Arnoldi orthogonalization.

The confluent Vandermonde matrix ``[V; V_(1); ...; V_(l)]`` (monomials and
their derivatives up to order ``l`` sampled at ``m`` nodes) has the Krylov
structure

    column k+1 = M^k (e; 0; ...; 0),

where ``M`` is block lower bidiagonal with ``X = diag(x)`` on the diagonal and
``i*I`` on the i-th subdiagonal block.  Running Arnoldi on that Krylov space
gives a well conditioned basis ``Q`` together with a Hessenberg matrix ``H``
satisfying ``M Q[:, :-1] = Q H``.  ``H`` encodes the three-term-like
polynomial recursion and can be replayed at any other node set, for any
derivative order, to evaluate the basis and its derivatives.

Inner products are scaled by the node count ``m`` (not the stacked length),
so that the first basis vector ``(e; 0)`` has unit norm.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from typing import Optional, Union

import numpy as np

__all__ = [
    "BreakdownError",
    "NodeSet",
    "ConfluentOperator",
    "ArnoldiBasis",
    "EvalMatrix",
    "as_nodes",
    "apply_confluent",
    "krylov_column",
    "confluent_arnoldi",
    "confluent_eval_matrix",
    "naive_confluent_matrix",
    "derivative_recursion_matrix",
    "split_blocks",
    "monomial_coefficients",
]

BREAKDOWN_FACTOR = 1e3


class BreakdownError(ArithmeticError):
    """Raised when the Arnoldi recursion hits a (numerically) zero subdiagonal."""

    def __init__(self, step: int, value: float, threshold: float):
        self.step = step
        self.value = value
        self.threshold = threshold
        super().__init__(
            f"Arnoldi breakdown at step {step}: h[{step + 1},{step}] = {value:.3e} "
            f"<= {threshold:.3e} (duplicate nodes or degree too high?)"
        )


@dataclass(frozen=True)
class NodeSet:
    """Sample nodes, real or complex.

    Acts as the diagonal matrix ``X`` (or ``S`` for evaluation nodes).
    """

    nodes: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        x = np.asarray(self.nodes)
        if x.dtype.kind not in "fc":
            x = x.astype(float)
        x = np.ravel(x)
        if x.size < 1:
            raise ValueError("a node set needs at least one node")
        if not np.all(np.isfinite(x)):
            raise ValueError("nodes must be finite")
        x.setflags(write=False)
        object.__setattr__(self, "nodes", x)

    def __len__(self) -> int:
        return self.nodes.size

    @property
    def m(self) -> int:
        return self.nodes.size

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.nodes)


NodesLike = Union[NodeSet, np.ndarray, list, tuple, float, complex]


def as_nodes(x: NodesLike) -> NodeSet:
    return x if isinstance(x, NodeSet) else NodeSet(np.atleast_1d(x))


@dataclass(frozen=True)
class ConfluentOperator:
    """Block lower-bidiagonal operator of order ``order`` on ``base`` nodes.

    Never formed densely; see :func:`apply_confluent`.
    """

    base: NodeSet
    order: int = 1

    def __post_init__(self):
        object.__setattr__(self, "base", as_nodes(self.base))
        if self.order < 0:
            raise ValueError("derivative order must be >= 0")

    @property
    def size(self) -> int:
        return (self.order + 1) * self.base.m

    def __matmul__(self, v):
        return apply_confluent(self, v)

    def dense(self) -> np.ndarray:
        """Explicit matrix, for testing only."""
        m, ell = self.base.m, self.order
        x = self.base.nodes
        M = np.zeros((self.size, self.size), dtype=np.result_type(x, float))
        for i in range(ell + 1):
            M[i * m:(i + 1) * m, i * m:(i + 1) * m] = np.diag(x)
            if i > 0:
                M[i * m:(i + 1) * m, (i - 1) * m:i * m] = i * np.eye(m)
        return M


def apply_confluent(op: ConfluentOperator, v: np.ndarray) -> np.ndarray:
    """Apply the confluent operator to ``v`` (or to each column of ``v``).

    Block 0 of the result is ``X v_0``; block ``i >= 1`` is
    ``i v_{i-1} + X v_i``.
    """
    v = np.asarray(v)
    m, ell = op.base.m, op.order
    if v.shape[0] != (ell + 1) * m:
        raise ValueError(
            f"vector length {v.shape[0]} does not match (order+1)*m = {(ell + 1) * m}"
        )
    x = op.base.nodes
    if v.ndim == 2:
        x = x[:, None]
    blocks = v.reshape((ell + 1, m) + v.shape[1:])
    out = x * blocks
    out[1:] += np.arange(1, ell + 1).reshape((-1,) + (1,) * (v.ndim)) * blocks[:-1]
    return out.reshape(v.shape)


def _start_vector(m: int, order: int, dtype) -> np.ndarray:
    e = np.zeros((order + 1) * m, dtype=dtype)
    e[:m] = 1
    return e


def krylov_column(nodes: NodesLike, order: int, k: int) -> np.ndarray:
    """``M^k (e; 0; ...; 0)``, i.e. column ``k+1`` of the confluent Vandermonde matrix."""
    if k < 0:
        raise ValueError("k must be >= 0")
    op = ConfluentOperator(as_nodes(nodes), order)
    v = _start_vector(op.base.m, order, np.result_type(op.base.nodes, float))
    for _ in range(k):
        v = apply_confluent(op, v)
    return v


def naive_confluent_matrix(nodes: NodesLike, n: int, order: int = 1) -> np.ndarray:
    """Row-stacked monomial Vandermonde matrix and its derivative rows.

    Block ``i`` holds ``d^i/dx^i x^k = k!/(k-i)! x^(k-i)`` at every node.
    """
    x = as_nodes(nodes).nodes
    m = x.size
    dtype = np.result_type(x, float)
    A = np.zeros(((order + 1) * m, n + 1), dtype=dtype)
    V = x[:, None] ** np.arange(n + 1)
    for i in range(order + 1):
        for k in range(i, n + 1):
            # falling factorial k (k-1) ... (k-i+1)
            A[i * m:(i + 1) * m, k] = np.prod(np.arange(k - i + 1, k + 1)) * V[:, k - i]
    return A


@dataclass(frozen=True)
class ArnoldiBasis:
    """Orthonormal (in ``<u, v> = u^H v / m``) basis ``q`` and Hessenberg ``h``."""

    q: np.ndarray
    h: np.ndarray
    order: int
    m: int
    nodes: NodeSet = dc_field(repr=False, default=None)

    @property
    def n(self) -> int:
        return self.q.shape[1] - 1

    @property
    def field(self) -> str:
        return "complex" if np.iscomplexobj(self.q) else "real"

    def block(self, i: int) -> np.ndarray:
        return self.q[i * self.m:(i + 1) * self.m]


@dataclass(frozen=True)
class EvalMatrix:
    w: np.ndarray
    order: int
    M: int

    def block(self, i: int) -> np.ndarray:
        return self.w[i * self.M:(i + 1) * self.M]


def split_blocks(v: np.ndarray, order: int) -> list:
    """Split a stacked vector/matrix into its ``order + 1`` row blocks."""
    return np.split(np.asarray(v), order + 1, axis=0)


def confluent_arnoldi(nodes: NodesLike, order: int, n: int,
                      reorthogonalize: bool = False) -> ArnoldiBasis:
    """Arnoldi process on the confluent Krylov space of degree ``n``.

    Parameters
    ----------
    nodes : NodeSet or array_like
        Fitting nodes ``x_1..x_m`` (real or complex).
    order : int
        Highest derivative order ``l`` in the stacked data.  ``order=0``
        is plain Vandermonde with Arnoldi.
    n : int
        Polynomial degree; ``q`` gets ``n + 1`` columns.
    reorthogonalize : bool
        Run a second Gram-Schmidt sweep at every step.

    Returns
    -------
    ArnoldiBasis

    Raises
    ------
    BreakdownError
        If a new direction has (numerically) vanished.
    """
    X = as_nodes(nodes)
    m = X.m
    if n < 0:
        raise ValueError("degree must be >= 0")
    if order < 0:
        raise ValueError("derivative order must be >= 0")
    if (order + 1) * m < n + 1:
        raise ValueError(
            f"(order+1)*m = {(order + 1) * m} rows cannot support degree {n}"
        )
    if order == 0 and np.unique(X.nodes).size < m:
        warnings.warn("duplicate nodes with order 0: Arnoldi will break down "
                      "once the degree reaches the number of distinct nodes",
                      RuntimeWarning, stacklevel=2)

    op = ConfluentOperator(X, order)
    dtype = np.result_type(X.nodes, float)
    Q = np.zeros(((order + 1) * m, n + 1), dtype=dtype)
    H = np.zeros((n + 1, n), dtype=dtype)
    Q[:, 0] = _start_vector(m, order, dtype)
    sqm = np.sqrt(m)
    scale = 1.0
    for k in range(n):
        q = apply_confluent(op, Q[:, k])
        scale = max(scale, np.linalg.norm(q) / sqm)
        for j in range(k + 1):
            H[j, k] = np.vdot(Q[:, j], q) / m
            q = q - H[j, k] * Q[:, j]
        if reorthogonalize:
            for j in range(k + 1):
                c = np.vdot(Q[:, j], q) / m
                H[j, k] += c
                q = q - c * Q[:, j]
        hk = np.linalg.norm(q) / sqm
        threshold = BREAKDOWN_FACTOR * np.finfo(float).eps * scale
        if hk <= threshold:
            raise BreakdownError(k, hk, threshold)
        H[k + 1, k] = hk
        Q[:, k + 1] = q / hk
    return ArnoldiBasis(q=Q, h=H, order=order, m=m, nodes=X)


def _hessenberg(h) -> np.ndarray:
    return h.h if isinstance(h, ArnoldiBasis) else np.asarray(h)


def confluent_eval_matrix(h, eval_nodes: NodesLike, order: int) -> EvalMatrix:
    """Replay the Arnoldi recursion stored in ``h`` at new nodes.

    Column ``k+1`` is ``(M w_k - sum_j h[j,k] w_j) / h[k+1,k]`` with ``M`` the
    confluent operator of the given order on ``eval_nodes``.  ``h`` may come
    from a run of any order; replaying with ``order >= 1`` yields the
    derivatives of the same polynomial basis.
    """
    H = _hessenberg(h)
    S = as_nodes(eval_nodes)
    M = S.m
    n = H.shape[1]
    if H.shape[0] != n + 1:
        raise ValueError("h must have shape (n+1, n)")
    op = ConfluentOperator(S, order)
    dtype = np.result_type(S.nodes, H, float)
    W = np.zeros(((order + 1) * M, n + 1), dtype=dtype)
    W[:M, 0] = 1
    for k in range(n):
        if H[k + 1, k] == 0:
            raise ZeroDivisionError(f"h[{k + 1},{k}] is zero")
        w = apply_confluent(op, W[:, k])
        for j in range(k + 1):
            w = w - H[j, k] * W[:, j]
        W[:, k + 1] = w / H[k + 1, k]
    return EvalMatrix(w=W, order=order, M=M)


def derivative_recursion_matrix(h, eval_nodes: NodesLike) -> np.ndarray:
    """First derivatives of the Arnoldi basis via the differentiated recursion.

    Uses ``p_{k+1} = (x p_k - sum_j h_jk p_j) / h_{k+1,k}`` and its derivative
    ``p'_{k+1} = (p_k + x p'_k - sum_j h_jk p'_j) / h_{k+1,k}``.  Written
    independently of :func:`confluent_eval_matrix` so that the two can
    certify each other.
    """
    H = _hessenberg(h)
    x = as_nodes(eval_nodes).nodes
    n = H.shape[1]
    dtype = np.result_type(x, H, float)
    P = np.zeros((x.size, n + 1), dtype=dtype)
    D = np.zeros((x.size, n + 1), dtype=dtype)
    P[:, 0] = 1
    for k in range(n):
        if H[k + 1, k] == 0:
            raise ZeroDivisionError(f"h[{k + 1},{k}] is zero")
        p = x * P[:, k]
        dp = P[:, k] + x * D[:, k]
        for j in range(k + 1):
            p = p - H[j, k] * P[:, j]
            dp = dp - H[j, k] * D[:, j]
        P[:, k + 1] = p / H[k + 1, k]
        D[:, k + 1] = dp / H[k + 1, k]
    return D


def monomial_coefficients(h) -> np.ndarray:
    """Monomial coefficients of the basis polynomials (column k is ``p_k``).

    Only sensible for small degrees: the monomial basis is what Arnoldi is
    there to avoid.
    """
    H = _hessenberg(h)
    n = H.shape[1]
    C = np.zeros((n + 1, n + 1), dtype=np.result_type(H, float))
    C[0, 0] = 1
    for k in range(n):
        c = np.zeros(n + 1, dtype=C.dtype)
        c[1:] = C[:-1, k]
        c -= C[:, :k + 1] @ H[:k + 1, k]
        C[:, k + 1] = c / H[k + 1, k]
    return C
