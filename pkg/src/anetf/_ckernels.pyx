# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: the adaptive simulation loop and complex LU."""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt

cnp.import_array()


def simulate(const double[:, ::1] d, const double[:, ::1] xc, const double[:, ::1] xs,
             const double[:, :, ::1] gt_re, const double[:, :, ::1] gt_im,
             const double[:, :, ::1] ge_re, const double[:, :, ::1] ge_im,
             const double[:, ::1] out_w, const double[:, :, ::1] pcoef,
             const double[:, :, ::1] ucoef, const double[::1] mu, bint multiple,
             double[:, :, ::1] w, double[:, ::1] e_out, double[:, :, ::1] ep_out,
             double[:, :, :, ::1] snap, Py_ssize_t decimation, double limit):
    cdef Py_ssize_t steps = d.shape[0]
    cdef Py_ssize_t L = gt_re.shape[0], J = gt_re.shape[1], K = gt_re.shape[2]
    cdef Py_ssize_t n, l, j, k, lp
    cdef double c, s, w0, w1, ow, re, im, g0, g1, acc, tm
    cdef bint keep_ep = ep_out is not None
    cdef bint keep_snap = snap is not None
    cdef double[:, :, ::1] xe_re = np.empty((L, J, K))
    cdef double[:, :, ::1] xe_im = np.empty((L, J, K))
    cdef double[::1] e = np.empty(K)
    cdef double[:, ::1] corr = np.empty((L, K))
    cdef double[:, ::1] ep = np.empty((L, K))

    for n in range(steps):
        if keep_snap and n % decimation == 0:
            snap[n // decimation, :, :, :] = w
        for k in range(K):
            e[k] = 0.0
        for l in range(L):
            c = xc[n, l]
            s = xs[n, l]
            for j in range(J):
                w0 = w[l, j, 0]
                w1 = w[l, j, 1]
                ow = out_w[l, j]
                for k in range(K):
                    re = gt_re[l, j, k] * c - gt_im[l, j, k] * s
                    im = gt_re[l, j, k] * s + gt_im[l, j, k] * c
                    e[k] += ow * (re * w0 + im * w1)
                    re = ge_re[l, j, k] * c - ge_im[l, j, k] * s
                    im = ge_re[l, j, k] * s + ge_im[l, j, k] * c
                    xe_re[l, j, k] = re
                    xe_im[l, j, k] = im
        for k in range(K):
            e[k] = d[n, k] + e[k]
            e_out[n, k] = e[k]
        for l in range(L):
            for k in range(K):
                acc = 0.0
                for j in range(J):
                    acc += pcoef[l, j, k] * (xe_re[l, j, k] * w[l, j, 0] + xe_im[l, j, k] * w[l, j, 1])
                corr[l, k] = acc
        if multiple:
            for l in range(L):
                for k in range(K):
                    ep[l, k] = e[k] + corr[l, k]
        else:
            for k in range(K):
                acc = corr[0, k]
                for l in range(1, L):
                    acc += corr[l, k]
                ep[0, k] = e[k] + acc
        if keep_ep:
            for lp in range(ep_out.shape[1]):
                for k in range(K):
                    ep_out[n, lp, k] = ep[lp, k]
        for l in range(L):
            lp = l if multiple else 0
            tm = 2.0 * mu[l]
            for j in range(J):
                g0 = 0.0
                g1 = 0.0
                for k in range(K):
                    g0 += ucoef[l, j, k] * xe_re[l, j, k] * ep[lp, k]
                    g1 += ucoef[l, j, k] * xe_im[l, j, k] * ep[lp, k]
                w[l, j, 0] -= tm * g0
                w[l, j, 1] -= tm * g1
                # NaN fails both comparisons
                if not (fabs(w[l, j, 0]) <= limit and fabs(w[l, j, 1]) <= limit):
                    return n + 1, l, j
    return steps, -1, -1


def lu_factor(m, double threshold):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] arr = np.array(m, dtype=complex, order="C")
    cdef double complex[:, ::1] a = arr
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.intp_t, ndim=1] piv_arr = np.arange(n, dtype=np.intp)
    cdef cnp.intp_t[::1] piv = piv_arr
    cdef Py_ssize_t i, j, k, p
    cdef double best, mag2
    cdef double complex t, f, pv
    cdef cnp.intp_t ti
    for k in range(n):
        p = k
        best = -1.0
        for i in range(k, n):
            mag2 = a[i, k].real * a[i, k].real + a[i, k].imag * a[i, k].imag
            if mag2 > best:
                best = mag2
                p = i
        if sqrt(best) < threshold:
            return arr, piv_arr, k, sqrt(best)
        if p != k:
            for j in range(n):
                t = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = t
            ti = piv[k]
            piv[k] = piv[p]
            piv[p] = ti
        pv = a[k, k]
        for i in range(k + 1, n):
            f = a[i, k] / pv
            a[i, k] = f
            for j in range(k + 1, n):
                a[i, j] = a[i, j] - f * a[k, j]
    return arr, piv_arr, -1, 0.0


def lu_solve(lu, piv, b):
    cdef double complex[:, ::1] a = np.ascontiguousarray(lu, dtype=complex)
    cdef cnp.intp_t[::1] pv = np.ascontiguousarray(piv, dtype=np.intp)
    cdef Py_ssize_t n = a.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] out = np.asarray(b, dtype=complex)[np.asarray(pv)].copy()
    cdef double complex[::1] x = out
    cdef Py_ssize_t i, j
    cdef double complex acc
    for i in range(1, n):
        acc = x[i]
        for j in range(i):
            acc = acc - a[i, j] * x[j]
        x[i] = acc
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for j in range(i + 1, n):
            acc = acc - a[i, j] * x[j]
        x[i] = acc / a[i, i]
    return out
