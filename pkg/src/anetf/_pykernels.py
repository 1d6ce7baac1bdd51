"""NumPy implementation of the hot kernels.

Same signatures and semantics as the compiled ``_ckernels`` module; used
when the extension is not built or ``ANETF_PURE_PYTHON`` is set.
"""

import numpy as np


def simulate(d, xc, xs, gt_re, gt_im, ge_re, ge_im, out_w, pcoef, ucoef, mu,
             multiple, w, e_out, ep_out, snap, decimation, limit):
    """Run the quadrature filtered-x LMS loop over ``len(d)`` samples.

    ``w`` (L, J, 2) is updated in place.  Returns ``(steps_done, l, j)``;
    ``l = j = -1`` unless a coefficient left the finite range ``|w| <= limit``.
    """
    steps = d.shape[0]
    gt = gt_re + 1j * gt_im
    ge = ge_re + 1j * ge_im
    ow = out_w[:, :, None]
    two_mu = 2.0 * mu[:, None]
    for n in range(steps):
        if snap is not None and n % decimation == 0:
            snap[n // decimation] = w
        p = (xc[n] + 1j * xs[n])[:, None, None]
        w0 = w[:, :, 0, None]
        w1 = w[:, :, 1, None]
        xt = gt * p
        e = d[n] + (ow * (xt.real * w0 + xt.imag * w1)).sum(axis=(0, 1))
        xe = ge * p
        xe_re = xe.real
        xe_im = xe.imag
        corr = (pcoef * (xe_re * w0 + xe_im * w1)).sum(axis=1)
        if multiple:
            ep = e[None, :] + corr
        else:
            ep = (e + corr.sum(axis=0))[None, :]
        e_out[n] = e
        if ep_out is not None:
            ep_out[n] = ep
        w[:, :, 0] -= two_mu * (ucoef * xe_re * ep[:, None, :]).sum(axis=2)
        w[:, :, 1] -= two_mu * (ucoef * xe_im * ep[:, None, :]).sum(axis=2)
        bad = ~(np.abs(w) <= limit)
        if bad.any():
            l, j, _ = np.argwhere(bad)[0]
            return n + 1, int(l), int(j)
    return steps, -1, -1


def lu_factor(m, threshold):
    """In-place-style LU with partial pivoting by modulus.

    Returns ``(lu, piv, bad_step, bad_pivot)``; ``bad_step`` is -1 when
    every pivot modulus reached ``threshold``.
    """
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    piv = np.arange(n)
    for k in range(n):
        col = a[k:, k]
        p = k + int(np.argmax(col.real * col.real + col.imag * col.imag))
        if abs(a[p, k]) < threshold:
            return a, piv, k, abs(a[p, k])
        if p != k:
            a[[k, p]] = a[[p, k]]
            piv[[k, p]] = piv[[p, k]]
        if k + 1 < n:
            a[k + 1:, k] /= a[k, k]
            a[k + 1:, k + 1:] -= np.outer(a[k + 1:, k], a[k, k + 1:])
    return a, piv, -1, 0.0


def lu_solve(lu, piv, b):
    n = lu.shape[0]
    x = np.asarray(b, dtype=complex)[piv].copy()
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] = (x[i] - lu[i, i + 1:] @ x[i + 1:]) / lu[i, i]
    return x
