"""Independent oracles and the invariant suite.

Rotationally symmetric solutions in dimension ``n`` satisfy the first integral

    r^(n-1) u' / W = -H r^n / n + c,      W = sqrt(1 + u'^2),

so with ``q(r) = -H r / n + c r^(1-n)`` the profile is ``u' = q / sqrt(1 - q^2)``.
``c = 0`` for a disk (regularity at the centre); on an annulus ``c`` is found by
bisection so that both boundary values are met.
"""
from __future__ import annotations

import warnings

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import IntegrationWarning, quad, solve_ivp
from scipy.optimize import bisect

from .errors import ConvergenceError
from .fem import assemble_residual, gradient_norms, load_vector
from .solver import harmonic_extension, newton_solve, solve_dirichlet

ODE_RTOL = 1e-11
ODE_ATOL = 1e-13


@dataclass(frozen=True)
class CapValue:
    value: np.ndarray
    slope: np.ndarray
    H: float


def spherical_cap(R, rho, n=2):
    """Upper hemisphere ``sqrt(R^2 - rho^2)`` and its radial slope.

    The cap solves ``Q_H = 0`` with ``H = n / R``.
    """
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) >= R):
        raise ValueError("rho must be smaller than R")
    s = np.sqrt(R * R - rho * rho)
    return CapValue(s, -rho / s, n / R)


def cap_field(points, R, shift=0.0):
    """Cap ``sqrt(R^2 - |x|^2) + shift`` and its gradient at plane points."""
    x = np.asarray(points, dtype=float)
    s = np.sqrt(R * R - np.sum(x * x, axis=-1))
    return s + shift, -x / s[..., None]


@dataclass
class RadialProfile:
    n: int
    H: float
    c: float
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    q: np.ndarray
    first_integral_residual: float
    boundary_mismatch: float
    _sol: object = field(default=None, repr=False)

    def __call__(self, radius):
        radius = np.asarray(radius, dtype=float)
        return self._sol(radius.ravel())[0].reshape(radius.shape)

    @property
    def graph_margin(self):
        """``1 - max |q|``; positive iff the profile has no vertical slope."""
        return float(1.0 - np.max(np.abs(self.q)))

    def to_csv(self, path):
        data = np.column_stack([self.r, self.u, self.du, self.q])
        np.savetxt(path, data, delimiter=",", fmt="%.17g", header="r,u,u',q", comments="")


def _q(r, n, H, c):
    return -H * r / n + c * r ** (1 - n)


def _slope(r, n, H, c):
    q = _q(r, n, H, c)
    return q / np.sqrt(1.0 - q * q)


def _admissible_c(n, H, r_in, r_out):
    r = np.linspace(r_in, r_out, 4001)
    lo = np.max((-1.0 + H * r / n) * r ** (n - 1))
    hi = np.min((1.0 + H * r / n) * r ** (n - 1))
    return lo, hi


def radial_shoot(n, H, r_out, u_out=0.0, r_in=0.0, u_in=None, n_points=401):
    """Rotationally symmetric solution of ``Q_H = 0`` on a disk or annulus.

    Parameters
    ----------
    n : int
        Dimension of the base domain (``n >= 2``).
    H : float
    r_out, u_out : float
        Outer radius and boundary value.
    r_in, u_in : float
        Inner radius and value for an annulus; ``r_in = 0`` means a disk.

    The profile ``(u, u')`` is integrated from the second order equation with
    an adaptive eighth-order Runge-Kutta scheme; the first integral is then an
    independent check.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    annulus = r_in > 0
    if annulus:
        if u_in is None:
            raise ValueError("annulus needs u_in")
        lo, hi = _admissible_c(n, H, r_in, r_out)
        if not lo < hi:
            raise ConvergenceError("no admissible flux constant: no radial graph solution")
        target = u_out - u_in

        def F(c):
            with warnings.catch_warnings():
                # integrable 1/sqrt singularities at the ends of the admissible range
                warnings.simplefilter("ignore", IntegrationWarning)
                return quad(_slope, r_in, r_out, args=(n, H, c), epsabs=1e-14, epsrel=1e-13, limit=200)[0] - target

        eps = 1e-12 * max(1.0, abs(hi - lo))
        a, b = lo + eps, hi - eps
        Fa, Fb = F(a), F(b)
        if not Fa < 0 < Fb:
            raise ConvergenceError("boundary values unattainable by a radial graph")
        c = bisect(F, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        start_u = u_in
    else:
        if H * r_out / n >= 1.0:
            raise ConvergenceError("no radial graph over the disk: H r / n >= 1")
        c = 0.0
        start_u = u_out - quad(_slope, 0.0, r_out, args=(n, H, 0.0), epsabs=1e-14, epsrel=1e-13, limit=200)[0]

    def rhs(r, y):
        p = y[1]
        W = np.sqrt(1.0 + p * p)
        if r == 0.0:
            return [p, -H / n]
        return [p, W ** 3 * (-H - (n - 1) * p / (r * W))]

    p0 = 0.0 if not annulus else float(_slope(r_in, n, H, c))
    sol = solve_ivp(rhs, (r_in, r_out), [start_u, p0], method="DOP853",
                    rtol=ODE_RTOL, atol=ODE_ATOL, dense_output=True)
    if not sol.success:
        raise ConvergenceError(f"radial integration failed: {sol.message}")
    r = np.linspace(r_in, r_out, n_points)
    u, du = sol.sol(r)
    q = _q(np.where(r > 0, r, 1.0), n, H, c) if annulus else -H * r / n
    W = np.sqrt(1.0 + du * du)
    fi = np.abs(r ** (n - 1) * du / W - (-H * r ** n / n + c))
    mismatch = abs(u[-1] - u_out)
    return RadialProfile(n, H, float(c), r, u, du, q, float(np.max(fi)), float(mismatch), sol.sol)


@dataclass
class SuiteItem:
    name: str
    passed: bool
    value: float
    threshold: float
    margin: float

    def to_dict(self):
        return dict(self.__dict__)


@dataclass
class SuiteReport:
    status: str
    items: list = field(default_factory=list)

    @property
    def all_passed(self):
        return self.status == "ok" and all(i.passed for i in self.items)

    def __getitem__(self, name):
        for i in self.items:
            if i.name == name:
                return i
        raise KeyError(name)

    def to_dict(self):
        return {"status": self.status, "all_passed": self.all_passed,
                "items": [i.to_dict() for i in self.items]}


def _item(name, value, threshold, upper=True):
    margin = threshold - value if upper else value - threshold
    return SuiteItem(name, bool(margin >= 0), float(value), float(threshold), float(margin))


def run_invariant_suite(solution, mesh=None, H=None, psi=None, boundary_values=None,
                        rtol=1e-10, unique_tol=1e-8):
    """Report-only checks of a computed solution.

    Items: ``sandwich`` (``0 <= v <= psi``, when ``psi`` is given),
    ``height`` (``max|v| <= max|phi| + 4/H``), ``gradient_max_on_boundary``,
    ``uniqueness`` (re-solve from an independent start) and ``residual``.
    ``solution=None`` yields the status ``"no solution to validate"``.
    """
    if solution is None:
        return SuiteReport("no solution to validate")
    v = np.asarray(solution, dtype=float)
    bv = v[mesh.boundary_vertices] if boundary_values is None else np.asarray(boundary_values)
    items = []
    if psi is not None:
        lower = float(np.min(v))
        upper = float(np.min(psi - v))
        items.append(SuiteItem("sandwich", bool(min(lower, upper) >= 0), min(lower, upper), 0.0, min(lower, upper)))
    bound = float(np.max(np.abs(bv))) + 4.0 / H
    items.append(_item("height", float(np.max(np.abs(v))), bound))

    g = gradient_norms(mesh, v)
    layer = mesh.boundary_layer_elements
    bmax = float(np.max(g[layer]))
    imax = float(np.max(g[~layer])) if np.any(~layer) else 0.0
    items.append(_item("gradient_max_on_boundary", imax, bmax * (1.0 + 10.0 * mesh.h)))

    start = psi if psi is not None else harmonic_extension(mesh, bv)
    if np.array_equal(start, v):
        start = harmonic_extension(mesh, bv)
    res = newton_solve(mesh, start, H, bv, rtol=rtol)
    try:
        other = res.v if res.converged else solve_dirichlet(mesh, H, bv, rtol=rtol)
        diff = float(np.max(np.abs(other - v)))
    except ConvergenceError:
        diff = float("inf")
    items.append(_item("uniqueness", diff, unique_tol))

    r = np.linalg.norm(assemble_residual(mesh, v, H))
    ref = np.linalg.norm(load_vector(mesh, H)[mesh.interior])
    items.append(_item("residual", r, rtol * ref * (1.0 + 1e-6)))
    return SuiteReport("ok", items)
