"""Rectangular generalized eigenproblems from Steklov-type boundary conditions.

A harmonic function ``u = Re sum_k (a_k + i b_k) p_k(z)`` sampled on the
boundary gives tall matrices ``A`` (outer normal derivative rows) and ``B``
(value rows) acting on ``beta = (a; -b_1..-b_n)``.  The eigenproblem
``A beta = lambda B beta`` is rectangular; it is projected to a square pencil
either through an economic QR of ``B`` or, when ``B`` is rank deficient,
through the leading left singular vectors of ``[A, B]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .arnoldi_core import ArnoldiBasis, confluent_eval_matrix
from .complex_extension import BoundaryCurve, eval_blocks

LAMBDA_MAX = 1e12
IMAG_TOL = 1e-6
RESIDUAL_TOL = 1e-8
RANK_TOL = 1e-12


class RankDeficientError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class RectGEVP:
    A: np.ndarray
    B: np.ndarray
    reduction: str = "qr"
    keep: Optional[int] = None

    def __post_init__(self):
        if self.A.shape != self.B.shape:
            raise ValueError(f"A {self.A.shape} and B {self.B.shape} differ in shape")
        if self.A.ndim != 2 or self.A.shape[0] < self.A.shape[1]:
            raise ValueError(f"need a tall or square problem, got shape {self.A.shape}")
        if self.reduction not in ("qr", "svd"):
            raise ValueError(f"unknown reduction {self.reduction!r}")

    @property
    def p(self) -> int:
        return self.A.shape[1]


@dataclass(frozen=True)
class EigPairs:
    """Eigenvalues in ascending order, real eigenvectors as columns, residuals."""

    lambdas: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray

    def __len__(self) -> int:
        return self.lambdas.size


def _basis_blocks(basis: ArnoldiBasis):
    if basis.order >= 1:
        return basis.block(0), basis.block(1)
    E = confluent_eval_matrix(basis.h, basis.nodes, 1)
    return E.block(0), E.block(1)


def steklov_matrices(Q0: np.ndarray, Q1: np.ndarray, normal: np.ndarray):
    """Real ``(A, B)`` for unknowns ``beta = (a; -b_1..-b_n)``.

    ``A = [Re(nu Q1), Im(nu Q1)[:, 1:]]`` samples the outer normal derivative
    and ``B = [Re Q0, Im Q0[:, 1:]]`` the boundary values.
    """
    normal = np.asarray(normal, dtype=complex)
    if normal.shape != (Q0.shape[0],) or Q1.shape != Q0.shape:
        raise ValueError(f"{normal.size} normals, value block {Q0.shape}, "
                         f"derivative block {Q1.shape}")
    nQ1 = normal[:, None] * Q1
    A = np.hstack([nQ1.real, nQ1.imag[:, 1:]])
    B = np.hstack([Q0.real, Q0.imag[:, 1:]])
    return A, B


def _normal_and_value_matrices(basis: ArnoldiBasis, normal: np.ndarray):
    return steklov_matrices(*_basis_blocks(basis), normal)


def steklov_assemble(basis: ArnoldiBasis, curve: BoundaryCurve, normal=None) -> RectGEVP:
    """``d_nu u = lambda u`` at the basis nodes.

    ``basis`` is a complex Arnoldi basis on ``curve.z``; order 1 for the
    Hermite-orthogonalized variant, order 0 for values-orthogonalized (the
    derivative block is then replayed from ``h``).  ``normal`` overrides the
    curve normals.
    """
    nu = curve.normal if normal is None else np.asarray(normal, dtype=complex)
    A, B = _normal_and_value_matrices(basis, nu)
    return RectGEVP(A, B, reduction="qr")


def sloshing_assemble(basis: ArnoldiBasis, curve: BoundaryCurve, top_mask) -> RectGEVP:
    """``d_nu u = lambda B u`` with ``B`` the identity on masked rows, zero elsewhere."""
    mask = np.asarray(top_mask, dtype=bool)
    if not mask.any():
        raise ValueError("sloshing mask selects no boundary points")
    A, B = _normal_and_value_matrices(basis, curve.normal)
    B = np.where(mask[:, None], B, 0.0)
    return RectGEVP(A, B, reduction="svd", keep=A.shape[1])


def _realify(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest entry is real, then drop the imaginary part."""
    idx = np.argmax(np.abs(vectors), axis=0)
    phase = vectors[idx, np.arange(vectors.shape[1])]
    phase = phase / np.abs(phase)
    return (vectors / phase).real


def _square_pencil(F, G, problem: RectGEVP, tol: Optional[float]) -> EigPairs:
    with np.errstate(divide="ignore", invalid="ignore"):
        w, V = scipy.linalg.eig(F, G)
    keep = np.isfinite(w) & (np.abs(w) <= LAMBDA_MAX)
    keep &= np.abs(w.imag) <= IMAG_TOL * (1 + np.abs(w.real))
    lam = w.real[keep]
    vec = _realify(V[:, keep]) if keep.any() else np.zeros((F.shape[1], 0))
    A, B = problem.A, problem.B
    res = np.linalg.norm(A @ vec - (B @ vec) * lam, axis=0) / np.linalg.norm(vec, axis=0)
    if tol is not None and lam.size:
        nA = np.linalg.norm(A, 2)
        nB = np.linalg.norm(B, 2)
        ok = res <= tol * (nA + np.abs(lam) * nB)
        lam, vec, res = lam[ok], vec[:, ok], res[ok]
    order = np.argsort(lam, kind="stable")
    return EigPairs(lam[order], vec[:, order], res[order])


def rect_eig_qr(problem: RectGEVP, tol: Optional[float] = RESIDUAL_TOL,
                check_rank: bool = True) -> EigPairs:
    """Project with the economic QR of ``B``: ``Qb^H A beta = lambda Rb beta``.

    ``tol=None`` disables residual filtering (non-finite, huge and clearly
    complex eigenvalues are always dropped).  ``check_rank=False`` skips the
    rank test, for baselines that are expected to be ill conditioned.
    """
    Qb, Rb = np.linalg.qr(problem.B, mode="reduced")
    d = np.abs(np.diag(Rb))
    if check_rank and d.size and d.min() <= RANK_TOL * max(d.max(), np.finfo(float).tiny):
        raise RankDeficientError("B is rank deficient; use rect_eig_svd")
    return _square_pencil(Qb.conj().T @ problem.A, Rb, problem, tol)


def rect_eig_svd(problem: RectGEVP, keep: Optional[int] = None,
                 tol: Optional[float] = RESIDUAL_TOL) -> EigPairs:
    """Project onto the leading ``keep`` left singular vectors of ``[A, B]``."""
    keep = keep or problem.keep or problem.p
    AB = np.hstack([problem.A, problem.B])
    if keep > min(AB.shape):
        raise ValueError(f"keep = {keep} exceeds min dimension {min(AB.shape)} of [A, B]")
    U, _, _ = np.linalg.svd(AB, full_matrices=False)
    U = U[:, :keep]
    return _square_pencil(U.conj().T @ problem.A, U.conj().T @ problem.B, problem, tol)


def solve(problem: RectGEVP, tol: Optional[float] = RESIDUAL_TOL) -> EigPairs:
    if problem.reduction == "qr":
        return rect_eig_qr(problem, tol)
    return rect_eig_svd(problem, problem.keep, tol)


def beta_to_coefficients(beta: np.ndarray) -> np.ndarray:
    """``beta = (a; -b_1..-b_n)`` to complex ``c = a + i b`` (``b_0 = 0``)."""
    beta = np.asarray(beta)
    n = (beta.shape[0] - 1) // 2
    b = np.concatenate([np.zeros((1,) + beta.shape[1:]), -beta[n + 1:]])
    return beta[:n + 1] + 1j * b


def eigenfunction_values(h: Optional[np.ndarray], beta: np.ndarray, z) -> np.ndarray:
    """``u = Re sum_k c_k p_k(z)`` for each eigenvector column of ``beta``.

    ``h = None`` means the monomial basis.
    """
    c = beta_to_coefficients(beta)
    (W0,) = eval_blocks(h, z, c.shape[0] - 1, 0)
    return (W0 @ c).real


def normalize_max(u: np.ndarray) -> np.ndarray:
    """Scale to ``max|u| = 1`` with the (first) extreme value positive."""
    u = np.asarray(u, dtype=float)
    i = np.argmax(np.abs(u))
    return u / u[i]


def eigenfunction_error(u: np.ndarray, ref: np.ndarray) -> float:
    """Max-norm distance between max-normalized functions, minimized over sign."""
    u = normalize_max(u)
    ref = normalize_max(ref)
    return float(min(np.abs(u - ref).max(), np.abs(u + ref).max()))


def sloshing_eigenvalue(k: int) -> float:
    """Analytic sloshing eigenvalue ``k pi tanh(k pi)`` of the unit square cup."""
    return k * np.pi * np.tanh(k * np.pi)
