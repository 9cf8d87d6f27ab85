"""Radial Hamiltonians: discrete spectra and the massless continuous transform.

Witten sector n (Fourier mode in psi), mass M, radial variable x = arcsinh r:

    L_{M,n} u = -(1/sinh 2x) (sinh 2x u')' + (M^2 cosh^2 x + n^2 cosh^4 x / sinh^2 x) u

on L^2((0, inf), r dr) = L^2((0, inf), sinh(2x)/2 dx).  The wormhole operator is
L_M v = -v'' + M^2 cosh^2 x v on L^2(R).  The n = 0, M = 0 Witten operator has
purely continuous spectrum [1, inf) and is diagonalized by a Legendre Q kernel.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import ConvergenceError, DomainError
from .specfun import olver_q_x

__all__ = [
    "RadialOperatorSpec",
    "DiscreteSpectrum",
    "ContinuousTransform",
    "x_grid",
    "liouville_map",
    "liouville_inverse",
    "schrodinger_potential",
    "radial_potential",
    "solve_discrete",
    "kernel",
    "build_transform",
    "forward_transform",
    "inverse_transform",
    "apply_l0",
    "operator_matrix",
    "apply_operator",
    "quadratic_form",
    "mass_form",
    "spectral_norm2",
    "radial_norm2",
    "hardy_defect",
    "angular_hardy_defect",
    "TAIL_MASS_MAX",
]

TAIL_MASS_MAX = 1e-10


@dataclass(frozen=True)
class RadialOperatorSpec:
    spacetime: str = "witten"
    M: float = 1.0
    n: int = 0
    x_max: float = None
    N: int = None

    def __post_init__(self):
        if self.spacetime not in ("witten", "wormhole"):
            raise DomainError(f"unknown spacetime {self.spacetime!r}")
        if not self.M >= 0:
            raise DomainError("mass must be non-negative")
        if int(self.n) != self.n:
            raise DomainError("n must be an integer")
        if self.x_max is None:
            xm = 12.0 if self.spacetime == "witten" else 20.0 / np.sqrt(1.0 + self.M)
            object.__setattr__(self, "x_max", xm)
        if self.N is None:
            object.__setattr__(self, "N", 16384 if self.spacetime == "witten" else 16385)
        if self.x_max <= 0 or self.N < 16:
            raise DomainError("grid needs x_max > 0 and N >= 16")
        if self.spacetime == "wormhole":
            object.__setattr__(self, "n", 0)


@dataclass
class DiscreteSpectrum:
    spec: RadialOperatorSpec
    x: np.ndarray
    weights: np.ndarray  # quadrature weights of the inner product
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, orthonormal for `weights`
    tail_mass: np.ndarray

    def gram(self):
        W = self.eigenvectors * self.weights[:, None]
        return self.eigenvectors.T @ W


@dataclass
class ContinuousTransform:
    mu: np.ndarray  # spectral samples, lambda = 1 + mu^2
    lam_weights: np.ndarray  # trapezoid weights for d lambda = 2 mu d mu
    x: np.ndarray  # cell centres, r = sinh x
    h: float
    table: np.ndarray  # phi(lambda_j; x_i), the kernel acting on v = T u

    @property
    def lambdas(self):
        return 1.0 + self.mu**2

    @property
    def r(self):
        return np.sinh(self.x)


def x_grid(x_max, N):
    """Cell centres (i + 1/2) h of a uniform grid on (0, x_max]."""
    h = x_max / N
    return (np.arange(N) + 0.5) * h, h


def _half_sinh2(x):
    return 0.5 * np.sinh(2.0 * x)


def liouville_map(u, x):
    """v = (sinh(2x)/2)^{1/2} u, an isometry L^2(r dr) -> L^2(dx)."""
    u, x = np.asarray(u), np.asarray(x, dtype=float)
    if u.shape != x.shape:
        raise DomainError("u and x grids do not match")
    return np.sqrt(_half_sinh2(x)) * u


def liouville_inverse(v, x):
    v, x = np.asarray(v), np.asarray(x, dtype=float)
    if v.shape != x.shape:
        raise DomainError("v and x grids do not match")
    if np.any(x <= 0):
        raise DomainError("the inverse map needs x > 0")
    return v / np.sqrt(_half_sinh2(x))


def radial_potential(spec, x):
    """Potential of L_{M,n} in the u variable (without the Liouville terms)."""
    x = np.asarray(x, dtype=float)
    c2 = np.cosh(x) ** 2
    if spec.spacetime == "wormhole":
        return spec.M**2 * c2
    if np.any(x <= 0):
        raise DomainError("witten potential is evaluated for x > 0")
    return spec.M**2 * c2 + spec.n**2 * c2 * c2 / np.sinh(x) ** 2


def schrodinger_potential(spec, x):
    """Potential after the Liouville map: the operator becomes -d^2/dx^2 + V."""
    x = np.asarray(x, dtype=float)
    if spec.spacetime == "wormhole":
        return spec.M**2 * np.cosh(x) ** 2
    if np.any(x <= 0):
        raise DomainError("witten potential is evaluated for x > 0")
    return radial_potential(spec, x) + 1.0 - 1.0 / np.sinh(2.0 * x) ** 2


# --------------------------------------------------------------------------
# discrete spectra
# --------------------------------------------------------------------------


def _witten_matrix(spec):
    x, h = x_grid(spec.x_max, spec.N)
    faces = np.arange(1, spec.N) * h
    rho_f = _half_sinh2(faces)
    edges = np.arange(spec.N + 1) * h
    # exact cell measure of sinh(2x)/2 dx
    m = 0.25 * (np.cosh(2.0 * edges[1:]) - np.cosh(2.0 * edges[:-1]))
    stiff = rho_f / h
    diag = np.zeros(spec.N)
    diag[:-1] += stiff
    diag[1:] += stiff
    # Dirichlet face at x_max: ghost value -u_N
    diag[-1] += 2.0 * _half_sinh2(spec.x_max) / h
    diag = diag / m + radial_potential(spec, x)
    off = -stiff / np.sqrt(m[:-1] * m[1:])
    return x, m, diag, off


def _wormhole_matrix(spec):
    x = np.linspace(-spec.x_max, spec.x_max, spec.N)[1:-1]
    h = x[1] - x[0]
    diag = 2.0 / h**2 + radial_potential(spec, x)
    off = -np.ones(len(x) - 1) / h**2
    return x, np.full(len(x), h), diag, off


@lru_cache(maxsize=32)
def operator_matrix(spec):
    """(x, weights, diag, off): the symmetric tridiagonal form of the discrete operator.

    A grid function u corresponds to psi = sqrt(weights) u, and the operator acts
    on psi as the tridiagonal matrix.
    """
    if spec.spacetime == "witten":
        return _witten_matrix(spec)
    return _wormhole_matrix(spec)


def _tri_apply(diag, off, psi):
    out = diag[:, None] * psi if psi.ndim == 2 else diag * psi
    if psi.ndim == 2:
        out[:-1] += off[:, None] * psi[1:]
        out[1:] += off[:, None] * psi[:-1]
    else:
        out[:-1] += off * psi[1:]
        out[1:] += off * psi[:-1]
    return out


def apply_operator(spec, u):
    """L u on the grid of ``spec`` (same discretization as solve_discrete)."""
    _, m, diag, off = operator_matrix(spec)
    s = np.sqrt(m)
    return _tri_apply(diag, off, s * u) / s


def quadratic_form(spec, u):
    """<u, L u> in the discrete inner product (the Dirichlet form plus the potential term)."""
    _, m, diag, off = operator_matrix(spec)
    psi = np.sqrt(m) * u
    return float(np.real(np.vdot(psi, _tri_apply(diag, off, psi))))


def mass_form(spec, u):
    """<u, u> in the discrete inner product."""
    _, m, _, _ = operator_matrix(spec)
    return float(np.sum(m * np.abs(u) ** 2))


def solve_discrete(spec, count):
    """Lowest ``count`` eigenpairs of L_{M,n} (witten) or L_M (wormhole)."""
    if spec.spacetime == "witten" and spec.M == 0 and spec.n == 0:
        raise DomainError("the massless n = 0 witten operator has continuous spectrum; use the transform")
    if spec.spacetime == "wormhole" and spec.M == 0:
        raise DomainError("the massless wormhole operator has continuous spectrum")
    if not 1 <= count <= spec.N // 4:
        raise DomainError("count must satisfy 1 <= count <= N/4")
    x, m, diag, off = operator_matrix(spec)
    try:
        # the default bisection tolerance scales with the matrix norm (~e^{2 x_max});
        # a tiny absolute tolerance leaves only the relative stopping test
        lam, psi = eigh_tridiagonal(diag, off, select="i", select_range=(0, count - 1), tol=4 * np.finfo(float).tiny)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigensolver failed: {exc}") from exc
    # Rayleigh-Ritz on the returned subspace restores orthonormality to rounding level
    q, _ = np.linalg.qr(psi)
    lam, rot = np.linalg.eigh(q.T @ _tri_apply(diag, off, q))
    psi = q @ rot
    vec = psi / np.sqrt(m)[:, None]
    # fix signs: positive near the left end of the support
    for k in range(count):
        j = np.argmax(np.abs(vec[:, k]) > 1e-3 * np.abs(vec[:, k]).max())
        if vec[j, k] < 0:
            vec[:, k] = -vec[:, k]
    mass = vec**2 * m[:, None]
    edge = np.abs(x) > 0.9 * spec.x_max
    tail = mass[edge].sum(axis=0)
    if np.any(tail > TAIL_MASS_MAX):
        k = int(np.argmax(tail))
        raise ConvergenceError(
            f"eigenvector {k} has tail mass {tail[k]:.2e} near x_max={spec.x_max}; increase x_max"
        )
    if count > 1 and np.min(np.diff(lam)) < 1e-10:
        raise ConvergenceError("near-degenerate eigenvalues; the radial spectrum should be simple")
    return DiscreteSpectrum(spec, x, m, lam, vec, tail)


# --------------------------------------------------------------------------
# continuous transform (M = 0, n = 0)
# --------------------------------------------------------------------------


def kernel(mu, x):
    """phi(lambda; x) with lambda = 1 + mu^2, the normalized generalized eigenfunction
    of -d^2/dx^2 + 1 - 1/sinh^2(2x) on (0, inf) with the Friedrichs condition at 0:

        phi = (tanh(pi mu / 2) / (2 pi))^{1/2} Q_{-1/2}^{i mu/2}(coth 2x).

    The kernel in the u variable is phi / (sinh(2x)/2)^{1/2}.
    """
    mu = float(mu)
    if mu < 0:
        raise DomainError("mu must be non-negative")
    return np.sqrt(np.tanh(0.5 * np.pi * mu) / (2.0 * np.pi)) * olver_q_x(mu, x)


def build_transform(x_max=8.0, N_r=8192, N_lambda=2048, lambda_max=200.0, delta=0.0):
    """Tabulate the kernel on a cell-centred x grid and a mu grid.

    lambda = 1 + mu^2 with mu uniform on [sqrt(delta), sqrt(lambda_max - 1)]; the
    square-root edge at lambda = 1 becomes a smooth endpoint in mu.
    """
    if not lambda_max > 1.0 + delta or delta < 0:
        raise DomainError("need 0 <= delta < lambda_max - 1")
    x, h = x_grid(x_max, N_r)
    mu = np.linspace(np.sqrt(delta), np.sqrt(lambda_max - 1.0), N_lambda)
    dmu = mu[1] - mu[0]
    w = np.full(N_lambda, dmu)
    w[0] = w[-1] = 0.5 * dmu
    table = np.empty((N_lambda, N_r))
    for j, m in enumerate(mu):
        table[j] = kernel(m, x)
    return ContinuousTransform(mu, 2.0 * mu * w, x, h, table)


def forward_transform(u, tr, tail_tol=1e-8):
    """u_hat(lambda) = int u(r) w(lambda; r) r dr on the transform's grids."""
    u = np.asarray(u)
    if u.shape != tr.x.shape:
        raise DomainError("u must be sampled on the transform's x grid")
    v = liouville_map(u, tr.x)
    mass = np.abs(v) ** 2
    tail = mass[tr.x > 0.95 * tr.x[-1]].sum() / max(mass.sum(), 1e-300)
    if tail > tail_tol:
        raise ConvergenceError(f"u is not small near r_max (relative tail mass {tail:.1e}); enlarge x_max")
    return tr.table @ v * tr.h


def inverse_transform(u_hat, tr):
    """u(r) = int u_hat(lambda) w(lambda; r) d lambda on the transform's grids."""
    u_hat = np.asarray(u_hat)
    if u_hat.shape != tr.mu.shape:
        raise DomainError("u_hat must be sampled on the transform's lambda grid")
    v = (u_hat * tr.lam_weights) @ tr.table
    return liouville_inverse(v, tr.x)


def spectral_norm2(u_hat, tr):
    return float(np.sum(np.abs(u_hat) ** 2 * tr.lam_weights))


def radial_norm2(u, tr):
    return float(np.sum(np.abs(liouville_map(u, tr.x)) ** 2) * tr.h)


def apply_l0(u, x):
    """Second-order finite-difference L_0 u at the interior points of a uniform grid."""
    u, x = np.asarray(u), np.asarray(x, dtype=float)
    h = x[1] - x[0]
    sp_ = np.sinh(2.0 * (x[1:-1] + 0.5 * h))
    sm = np.sinh(2.0 * (x[1:-1] - 0.5 * h))
    return -(sp_ * (u[2:] - u[1:-1]) - sm * (u[1:-1] - u[:-2])) / (h * h * np.sinh(2.0 * x[1:-1]))


# --------------------------------------------------------------------------
# Hardy-type quadratic form inequalities
# --------------------------------------------------------------------------


def _radial_forms(u, du, x_max, N):
    x, h = x_grid(x_max, N)
    rho = _half_sinh2(x)
    return x, h, rho, u(x), du(x)


def hardy_defect(u, du, x_max=10.0, N=200000):
    """RHS - LHS of the rotation-invariant Hardy inequality in the x variable:

        int (1 + V) |u|^2 dmu <= int |u'|^2 dmu,  dmu = sinh(2x)/2 dx,
        V = 1/(4x^2) - 1/sinh^2(2x).

    ``u``, ``du`` are callables (profile and x-derivative) supported in (0, x_max).
    """
    x, h, rho, uu, dd = _radial_forms(u, du, x_max, N)
    V = 0.25 / x**2 - 1.0 / np.sinh(2.0 * x) ** 2
    lhs = np.sum((1.0 + V) * np.abs(uu) ** 2 * rho) * h
    rhs = np.sum(np.abs(dd) ** 2 * rho) * h
    return float(rhs - lhs), float(rhs)


def angular_hardy_defect(u, du, n, x_max=10.0, N=200000):
    """RHS - LHS of int cosh^2 x |u|^2 dmu <= int |u'|^2 + n^2 (cosh^2 x + coth^2 x)|u|^2 dmu
    for a profile carrying the psi-dependence e^{i n psi}, n != 0."""
    if n == 0:
        raise DomainError("the angular inequality concerns n != 0")
    x, h, rho, uu, dd = _radial_forms(u, du, x_max, N)
    c2 = np.cosh(x) ** 2
    lhs = np.sum(c2 * np.abs(uu) ** 2 * rho) * h
    rhs = np.sum((np.abs(dd) ** 2 + n * n * (c2 + 1.0 / np.tanh(x) ** 2) * np.abs(uu) ** 2) * rho) * h
    return float(rhs - lhs), float(rhs)
