"""P1 finite element discretisation of ``div(grad v / W) + H = 0``.

Weak residual for an interior nodal basis function ``phi_i``::

    r_i(v) = - sum_T |T| (grad v . grad phi_i) / W_T  +  int H phi_i

with ``W_T = sqrt(1 + |grad v|^2)`` constant on each triangle.  A nodal field
``v`` with prescribed boundary values is a discrete solution iff ``r = 0``.
Sums over elements use ``np.bincount`` so results are bit-reproducible.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

_LOCAL_MASS = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


def _check_field(mesh, v, name="field"):
    v = np.asarray(v, dtype=float)
    if v.shape != (mesh.n_vertices,):
        raise ValueError(f"{name} has shape {v.shape}, expected ({mesh.n_vertices},)")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} contains NaN or inf")
    return v


def element_gradients(mesh, v):
    """Constant gradient of the P1 interpolant of ``v`` on each triangle."""
    return np.einsum("eik,ei->ek", mesh.basis_gradients, np.asarray(v)[mesh.triangles])


def _scatter(mesh, local):
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_vertices)


def load_vector(mesh, H_field, quadrature=3):
    """``int H phi_i`` for every node, ``H_field`` nodal (or a scalar).

    ``quadrature=3`` (edge midpoints) is exact for P1 ``H``; ``quadrature=1``
    uses the centroid value.
    """
    H = np.broadcast_to(np.asarray(H_field, dtype=float), (mesh.n_vertices,))
    He = H[mesh.triangles]
    A = mesh.areas[:, None]
    if quadrature == 3:
        local = A * (He @ _LOCAL_MASS.T)
    elif quadrature == 1:
        local = A * np.repeat(He.mean(axis=1, keepdims=True), 3, axis=1) / 3.0
    else:
        raise ValueError("quadrature must be 1 or 3")
    return _scatter(mesh, local)


def flux_vector(mesh, v):
    """``sum_T |T| (grad v . grad phi_i) / W_T`` for every node."""
    g = element_gradients(mesh, v)
    W = np.sqrt(1.0 + np.sum(g * g, axis=1))
    local = mesh.areas[:, None] * np.einsum("eik,ek->ei", mesh.basis_gradients, g) / W[:, None]
    return _scatter(mesh, local)


def full_residual(mesh, v, H_field, quadrature=3):
    """Residual at every node, boundary rows included."""
    v = _check_field(mesh, v, "v")
    return load_vector(mesh, H_field, quadrature) - flux_vector(mesh, v)


def assemble_residual(mesh, v, H_field, quadrature=3):
    """Residual over interior vertices (ordered as ``mesh.interior``)."""
    return full_residual(mesh, v, H_field, quadrature)[mesh.interior]


def _element_matrices(mesh, v):
    g = element_gradients(mesh, v)
    W = np.sqrt(1.0 + np.sum(g * g, axis=1))
    C = np.eye(2)[None] / W[:, None, None] - np.einsum("ei,ej->eij", g, g) / (W ** 3)[:, None, None]
    G = mesh.basis_gradients
    return -mesh.areas[:, None, None] * np.einsum("eik,ekl,ejl->eij", G, C, G)


def full_jacobian(mesh, v):
    """Derivative of :func:`full_residual` with respect to all nodal values."""
    v = _check_field(mesh, v, "v")
    Ke = _element_matrices(mesh, v)
    T = mesh.triangles
    rows = np.repeat(T, 3, axis=1).ravel()
    cols = np.tile(T, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((Ke.ravel(), (rows, cols)), shape=(n, n))


def assemble_jacobian(mesh, v):
    """Jacobian of :func:`assemble_residual` (interior rows and columns).

    Elementwise coefficient tensor ``I/W - grad v grad v^T / W^3``; the matrix is
    symmetric and negative semidefinite.
    """
    J = full_jacobian(mesh, v)
    I = mesh.interior
    return J[I][:, I].tocsc()


def stiffness_matrix(mesh):
    """Standard P1 Laplacian stiffness matrix (all nodes)."""
    return -full_jacobian(mesh, np.zeros(mesh.n_vertices))


def mass_matrix(mesh):
    T = mesh.triangles
    Me = mesh.areas[:, None, None] * _LOCAL_MASS[None]
    rows = np.repeat(T, 3, axis=1).ravel()
    cols = np.tile(T, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((Me.ravel(), (rows, cols)), shape=(n, n))


def gradient_norms(mesh, v):
    """``|grad v|`` per triangle."""
    return np.linalg.norm(element_gradients(mesh, v), axis=1)
