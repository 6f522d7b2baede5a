# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled projected-SOR sweep kernels for the obstacle solves.

Same contracts as the pure-Python versions in _psor_py; selected at
import time by necrotumor.kernels.
"""

import numpy as np
cimport numpy as cnp


def psor_tridiag(double[::1] lower, double[::1] diag, double[::1] upper,
                 double[::1] rhs, double[::1] x, double obstacle,
                 double omega, double tol, long max_sweeps):
    """Projected SOR for a tridiagonal system A x = rhs with lower
    obstacle; symmetric (forward+backward) sweeps.

    lower[i] multiplies x[i-1], upper[i] multiplies x[i+1]; lower[0] and
    upper[n-1] are ignored.  Returns (sweeps, last max update).
    """
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t i
    cdef long sweep
    cdef double xi, xnew, upd, maxupd = 0.0
    for sweep in range(1, max_sweeps + 1):
        maxupd = 0.0
        for i in range(n):
            xi = rhs[i]
            if i > 0:
                xi -= lower[i] * x[i - 1]
            if i < n - 1:
                xi -= upper[i] * x[i + 1]
            xnew = xi / diag[i]
            xnew = x[i] + omega * (xnew - x[i])
            if xnew < obstacle:
                xnew = obstacle
            upd = xnew - x[i]
            if upd < 0.0:
                upd = -upd
            if upd > maxupd:
                maxupd = upd
            x[i] = xnew
        for i in range(n - 1, -1, -1):
            xi = rhs[i]
            if i > 0:
                xi -= lower[i] * x[i - 1]
            if i < n - 1:
                xi -= upper[i] * x[i + 1]
            xnew = xi / diag[i]
            xnew = x[i] + omega * (xnew - x[i])
            if xnew < obstacle:
                xnew = obstacle
            upd = xnew - x[i]
            if upd < 0.0:
                upd = -upd
            if upd > maxupd:
                maxupd = upd
            x[i] = xnew
        if maxupd < tol:
            return sweep, maxupd
    return max_sweeps, maxupd


def psor_grid(double[:, :, ::1] coef, long[::1] jm, long[::1] jp,
              double[:, ::1] u, double[::1] center_coef, double center_diag,
              double obstacle, double omega, double tol, long max_sweeps):
    """Projected SOR for the mapped axisymmetric obstacle problem.

    u has shape (ns+1, nt); row 0 is the shared center value (stored
    uniformly across j), row ns is the fixed outer boundary.  coef has
    shape (ns-1, nt, 9): for interior row i (1..ns-1) the A-coefficients
    of neighbors (i-1,jm) (i-1,j) (i-1,jp) (i,jm) (i,j) (i,jp) (i+1,jm)
    (i+1,j) (i+1,jp); entry 4 is the diagonal.  center_coef[j] holds the
    off-diagonal coupling of the center to (1,j); center_diag its
    diagonal.  Returns (sweeps, last max update).
    """
    cdef Py_ssize_t ns = u.shape[0] - 1
    cdef Py_ssize_t nt = u.shape[1]
    cdef Py_ssize_t i, j, jmm, jpp
    cdef long sweep
    cdef double acc, xnew, upd, maxupd = 0.0, c0
    for sweep in range(1, max_sweeps + 1):
        maxupd = 0.0
        # center (row 0): A u = 0  ->  center_diag*u0 + sum_j c_j u1j = 0
        acc = 0.0
        for j in range(nt):
            acc += center_coef[j] * u[1, j]
        xnew = -acc / center_diag
        xnew = u[0, 0] + omega * (xnew - u[0, 0])
        if xnew < obstacle:
            xnew = obstacle
        upd = xnew - u[0, 0]
        if upd < 0.0:
            upd = -upd
        if upd > maxupd:
            maxupd = upd
        for j in range(nt):
            u[0, j] = xnew
        for i in range(1, ns):
            for j in range(nt):
                jmm = jm[j]
                jpp = jp[j]
                acc = (coef[i - 1, j, 0] * u[i - 1, jmm]
                       + coef[i - 1, j, 1] * u[i - 1, j]
                       + coef[i - 1, j, 2] * u[i - 1, jpp]
                       + coef[i - 1, j, 3] * u[i, jmm]
                       + coef[i - 1, j, 5] * u[i, jpp]
                       + coef[i - 1, j, 6] * u[i + 1, jmm]
                       + coef[i - 1, j, 7] * u[i + 1, j]
                       + coef[i - 1, j, 8] * u[i + 1, jpp])
                xnew = -acc / coef[i - 1, j, 4]
                xnew = u[i, j] + omega * (xnew - u[i, j])
                if xnew < obstacle:
                    xnew = obstacle
                upd = xnew - u[i, j]
                if upd < 0.0:
                    upd = -upd
                if upd > maxupd:
                    maxupd = upd
                u[i, j] = xnew
        for i in range(ns - 1, 0, -1):
            for j in range(nt - 1, -1, -1):
                jmm = jm[j]
                jpp = jp[j]
                acc = (coef[i - 1, j, 0] * u[i - 1, jmm]
                       + coef[i - 1, j, 1] * u[i - 1, j]
                       + coef[i - 1, j, 2] * u[i - 1, jpp]
                       + coef[i - 1, j, 3] * u[i, jmm]
                       + coef[i - 1, j, 5] * u[i, jpp]
                       + coef[i - 1, j, 6] * u[i + 1, jmm]
                       + coef[i - 1, j, 7] * u[i + 1, j]
                       + coef[i - 1, j, 8] * u[i + 1, jpp])
                xnew = -acc / coef[i - 1, j, 4]
                xnew = u[i, j] + omega * (xnew - u[i, j])
                if xnew < obstacle:
                    xnew = obstacle
                upd = xnew - u[i, j]
                if upd < 0.0:
                    upd = -upd
                if upd > maxupd:
                    maxupd = upd
                u[i, j] = xnew
        if maxupd < tol:
            return sweep, maxupd
    return max_sweeps, maxupd
