"""Pure-Python fallback for the projected-SOR sweep kernels.

Functionally identical to the compiled _psor extension (same sweep
order, same projection), just slow.  Used when the extension is not
built; the benchmark script compares the two.
"""

from __future__ import annotations


def psor_tridiag(lower, diag, upper, rhs, x, obstacle, omega, tol, max_sweeps):
    n = x.shape[0]
    maxupd = 0.0
    for sweep in range(1, max_sweeps + 1):
        maxupd = 0.0
        for i in range(n):
            xi = rhs[i]
            if i > 0:
                xi -= lower[i] * x[i - 1]
            if i < n - 1:
                xi -= upper[i] * x[i + 1]
            xnew = x[i] + omega * (xi / diag[i] - x[i])
            if xnew < obstacle:
                xnew = obstacle
            upd = abs(xnew - x[i])
            if upd > maxupd:
                maxupd = upd
            x[i] = xnew
        for i in range(n - 1, -1, -1):
            xi = rhs[i]
            if i > 0:
                xi -= lower[i] * x[i - 1]
            if i < n - 1:
                xi -= upper[i] * x[i + 1]
            xnew = x[i] + omega * (xi / diag[i] - x[i])
            if xnew < obstacle:
                xnew = obstacle
            upd = abs(xnew - x[i])
            if upd > maxupd:
                maxupd = upd
            x[i] = xnew
        if maxupd < tol:
            return sweep, maxupd
    return max_sweeps, maxupd


def psor_grid(coef, jm, jp, u, center_coef, center_diag, obstacle, omega,
              tol, max_sweeps):
    ns = u.shape[0] - 1
    nt = u.shape[1]
    maxupd = 0.0

    def update(i, j):
        nonlocal maxupd
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
        xnew = u[i, j] + omega * (-acc / coef[i - 1, j, 4] - u[i, j])
        if xnew < obstacle:
            xnew = obstacle
        upd = abs(xnew - u[i, j])
        if upd > maxupd:
            maxupd = upd
        u[i, j] = xnew

    for sweep in range(1, max_sweeps + 1):
        maxupd = 0.0
        acc = 0.0
        for j in range(nt):
            acc += center_coef[j] * u[1, j]
        xnew = u[0, 0] + omega * (-acc / center_diag - u[0, 0])
        if xnew < obstacle:
            xnew = obstacle
        upd = abs(xnew - u[0, 0])
        if upd > maxupd:
            maxupd = upd
        u[0, :] = xnew
        for i in range(1, ns):
            for j in range(nt):
                update(i, j)
        for i in range(ns - 1, 0, -1):
            for j in range(nt - 1, -1, -1):
                update(i, j)
        if maxupd < tol:
            return sweep, maxupd
    return max_sweeps, maxupd
