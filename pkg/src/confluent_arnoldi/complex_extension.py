"""Complex-node applications: Hermite Fourier extension and harmonic fits.

Both problems approximate a real quantity by the real part of a complex
polynomial ``h(z) = sum_k c_k p_k(z)`` with ``c_k = a_k + i b_k``.  Splitting
into real unknowns ``(a, b_1..b_n)`` gives real least-squares systems;
``b_0`` never influences ``Re h`` because the constant basis function is
real, so it is fixed to zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .arnoldi_core import (
    as_nodes,
    confluent_arnoldi,
    confluent_eval_matrix,
    naive_confluent_matrix,
    split_blocks,
)
from .fitting import HERMITE, check_basis_kind, lstsq
from .grids import chebyshev_points_first_kind

NAIVE = "naive"


# ---------------------------------------------------------------- curves

@dataclass(frozen=True)
class BoundaryCurve:
    """Samples ``z_j = z(t_j)`` of a counterclockwise boundary with outer normals."""

    z: np.ndarray
    dz: np.ndarray
    t: np.ndarray
    label: str = ""

    def __post_init__(self):
        z = np.asarray(self.z, dtype=complex)
        dz = np.asarray(self.dz, dtype=complex)
        if z.shape != dz.shape or z.ndim != 1:
            raise ValueError("z and dz must be 1-d arrays of equal length")
        if np.any(np.abs(dz) == 0):
            raise ValueError("parametrization has a vanishing derivative")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "dz", dz)
        object.__setattr__(self, "t", np.asarray(self.t, dtype=float))

    @classmethod
    def from_parametrization(cls, z: Callable, dz: Callable, t, label: str = ""):
        t = np.asarray(t, dtype=float)
        return cls(z(t), dz(t), t, label)

    @property
    def m(self) -> int:
        return self.z.size

    @property
    def normal(self) -> np.ndarray:
        """Unit outer normal ``nu_1 + i nu_2`` (``-i z'/|z'|`` for ccw orientation)."""
        return -1j * self.dz / np.abs(self.dz)


def periodic_parameters(m: int) -> np.ndarray:
    return 2 * np.pi * np.arange(m) / m


def circle(m: int, radius: float = 1.0) -> BoundaryCurve:
    return BoundaryCurve.from_parametrization(
        lambda t: radius * np.exp(1j * t), lambda t: 1j * radius * np.exp(1j * t),
        periodic_parameters(m), "circle")


def ellipse(m: int, a: float = 1.0, b: float = 0.2) -> BoundaryCurve:
    """``z = a cos t + i b sin t`` at ``m`` equispaced elliptic angles."""
    return BoundaryCurve.from_parametrization(
        lambda t: a * np.cos(t) + 1j * b * np.sin(t),
        lambda t: -a * np.sin(t) + 1j * b * np.cos(t),
        periodic_parameters(m), "ellipse")


def blob(m: int) -> BoundaryCurve:
    """``z = e^{it} (0.7 + 0.25 cos(4t - 2) + 0.05 cos(8t - 4))``."""
    def r(t):
        return 0.7 + 0.25 * np.cos(4 * t - 2) + 0.05 * np.cos(8 * t - 4)

    def dr(t):
        return -np.sin(4 * t - 2) - 0.4 * np.sin(8 * t - 4)

    return BoundaryCurve.from_parametrization(
        lambda t: np.exp(1j * t) * r(t),
        lambda t: np.exp(1j * t) * (1j * r(t) + dr(t)),
        periodic_parameters(m), "blob")


SQUARE_SIDES = ("bottom", "right", "top", "left")


def unit_square(points_per_side: int, spacing: str = "chebyshev1") -> BoundaryCurve:
    """Boundary of ``(0, 1)^2``, counterclockwise from the origin.

    The parameter ``t`` runs through ``[0, 4)``; side ``k`` covers ``[k, k+1)``
    in the order bottom, right, top, left.  Per-side samples are Chebyshev
    points of the first kind (``spacing="chebyshev1"``) or equispaced
    interior points (``"uniform"``).
    """
    if spacing == "chebyshev1":
        s = chebyshev_points_first_kind(points_per_side, 0.0, 1.0)
    elif spacing == "uniform":
        s = (np.arange(points_per_side) + 0.5) / points_per_side
    else:
        raise ValueError(f"unknown spacing {spacing!r}")
    corners = np.array([0, 1, 1 + 1j, 1j])
    directions = np.array([1, 1j, -1, -1j])
    z = np.concatenate([corners[k] + directions[k] * s for k in range(4)])
    dz = np.repeat(directions, points_per_side)
    t = np.concatenate([k + s for k in range(4)])
    return BoundaryCurve(z, dz, t, "square")


def side_mask(curve: BoundaryCurve, side: str) -> np.ndarray:
    """Boolean mask of the square-boundary samples lying on ``side``."""
    k = SQUARE_SIDES.index(side)
    return (curve.t >= k) & (curve.t < k + 1)


BUILTIN_CURVES = {"circle": circle, "ellipse": ellipse, "blob": blob}


# ---------------------------------------------------------------- shared

def basis_blocks(z, n: int, basis_kind: str):
    """``(Q0, Q1, h)``: basis values and z-derivatives at the nodes ``z``.

    ``basis_kind="naive"`` gives monomials ``z^k`` and ``k z^(k-1)`` with
    ``h = None``.
    """
    if basis_kind == NAIVE:
        A = naive_confluent_matrix(np.asarray(z, dtype=complex), n, 1)
        Q0, Q1 = split_blocks(A, 1)
        return Q0, Q1, None
    check_basis_kind(basis_kind)
    if basis_kind == HERMITE:
        basis = confluent_arnoldi(z, 1, n)
        return basis.block(0), basis.block(1), basis.h
    h = confluent_arnoldi(z, 0, n).h
    E = confluent_eval_matrix(h, z, 1)
    return E.block(0), E.block(1), h


def eval_blocks(h, z, n: int, order: int = 1) -> list:
    """Value and derivative blocks of the basis (Arnoldi if ``h`` given, else monomial)."""
    z = np.asarray(z, dtype=complex)
    if h is None:
        return split_blocks(naive_confluent_matrix(z, n, order), order)
    return split_blocks(confluent_eval_matrix(h, z, order).w, order)


def _real_part_matrix(Q0: np.ndarray) -> np.ndarray:
    # Re(Q0 (a + i b)) = Re Q0 a - Im Q0 b, b_0 dropped
    return np.hstack([Q0.real, -Q0.imag[:, 1:]])


def _assemble_c(x: np.ndarray, n: int) -> tuple:
    a = x[:n + 1]
    b = np.concatenate([[0.0], x[n + 1:]])
    return a, b


# ---------------------------------------------------------------- Fourier extension

def fourier_nodes(x) -> np.ndarray:
    """Map ``x`` in ``[-1, 1]`` to ``z = exp(i pi x / 2)`` (period-4 extension)."""
    return np.exp(0.5j * np.pi * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class FourierModel:
    """``f(x) ~ Re sum_k (a_k + i b_k) p_k(e^{i pi x/2})`` with ``b_0 = 0``."""

    a: np.ndarray
    b: np.ndarray
    h: Optional[np.ndarray]
    basis_kind: str
    residual: float = float("nan")

    @property
    def c(self) -> np.ndarray:
        return self.a + 1j * self.b

    @property
    def n(self) -> int:
        return self.a.size - 1


def fourier_fit_hermite(x, f, fp_scaled: Optional[np.ndarray], n: int,
                        basis_kind: str = HERMITE) -> FourierModel:
    """Fourier extension fit of values and scaled derivatives on ``[-1, 1]``.

    ``fp_scaled`` holds ``-(2/pi) f'(x_j)``.  With ``z = e^{i pi x/2}``,
    ``d/dx z^k = (i pi/2) k z^k``, so the scaled derivative of ``Re h`` is
    ``Im sum_k c_k k z^k``; since ``k z^k = z (z^k)'`` the derivative rows are
    the z-derivative block of the basis multiplied by ``z``.
    Pass ``fp_scaled=None`` to fit function values only.
    """
    x = as_nodes(x).nodes
    z = fourier_nodes(x)
    f = np.asarray(f, dtype=float)
    Q0, Q1, h = basis_blocks(z, n, basis_kind)
    A = _real_part_matrix(Q0)
    rhs = f
    if fp_scaled is not None:
        ZQ1 = z[:, None] * Q1
        # Im(z Q1 (a + i b)) = Im(zQ1) a + Re(zQ1) b
        A = np.vstack([A, np.hstack([ZQ1.imag, ZQ1.real[:, 1:]])])
        rhs = np.concatenate([f, np.asarray(fp_scaled, dtype=float)])
    sol, res = lstsq(A, rhs)
    a, b = _assemble_c(sol, n)
    return FourierModel(a=a, b=b, h=h, basis_kind=basis_kind, residual=res)


def fourier_eval(model: FourierModel, s) -> tuple:
    """``(values, scaled derivatives)`` at ``s``; the latter are ``-(2/pi) p'(s)``."""
    z = fourier_nodes(as_nodes(s).nodes)
    W0, W1 = eval_blocks(model.h, z, model.n, 1)
    c = model.c
    y = (W0 @ c).real
    yp = (z * (W1 @ c)).imag
    return y, yp


# ---------------------------------------------------------------- Laplace / DtN

@dataclass(frozen=True)
class HarmonicModel:
    """``u(z) ~ Re sum_k (a_k + i b_k) p_k(z)`` with ``b_0 = 0``."""

    a: np.ndarray
    b: np.ndarray
    h: Optional[np.ndarray]
    basis_kind: str
    residual: float = float("nan")

    @property
    def c(self) -> np.ndarray:
        return self.a + 1j * self.b

    @property
    def n(self) -> int:
        return self.a.size - 1


def harmonic_fit(curve: BoundaryCurve, f, n: int, basis_kind: str = HERMITE) -> HarmonicModel:
    """Least-squares fit of boundary data by the real part of a degree-``n`` polynomial.

    ``basis_kind="hermite"`` orthogonalizes values and z-derivatives
    together (order 1); ``"values"`` orthogonalizes values only.  Only the
    value rows enter the fit either way.
    """
    Q0, _, h = basis_blocks(curve.z, n, basis_kind)
    sol, res = lstsq(_real_part_matrix(Q0), np.asarray(f, dtype=float))
    a, b = _assemble_c(sol, n)
    return HarmonicModel(a=a, b=b, h=h, basis_kind=basis_kind, residual=res)


def harmonic_eval(model: HarmonicModel, z) -> np.ndarray:
    (W0,) = eval_blocks(model.h, z, model.n, 0)
    return (W0 @ model.c).real


def dtn_evaluate(model: HarmonicModel, curve: BoundaryCurve) -> np.ndarray:
    """Outer normal derivative ``Re(nu(z) h'(z))`` of the fitted harmonic function."""
    _, W1 = eval_blocks(model.h, curve.z, model.n, 1)
    return (curve.normal * (W1 @ model.c)).real
