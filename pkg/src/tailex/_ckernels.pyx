# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Mirrors ``_pykernels`` function for function."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, fabs, NAN

cnp.import_array()

# Estimator codes, shared with _pykernels.
DEF HILL_SHIFTED = 0
DEF OLS = 1
DEF OLS_SHIFTED = 2
DEF OLS_GI = 3
DEF OLS_INTERCEPT = 4
DEF OLS_INTERCEPT_SHIFTED = 5
DEF WLS_D = 6
DEF K_ML = 7
DEF K_OLS = 8
DEF K_WLS = 9

BACKEND = "cython"


cdef struct KSum:
    double s
    double c


cdef inline void _add(KSum* acc, double x) noexcept nogil:
    # Neumaier compensated summation
    cdef double t = acc.s + x
    if fabs(acc.s) >= fabs(x):
        acc.c += (acc.s - t) + x
    else:
        acc.c += (x - t) + acc.s
    acc.s = t


cdef inline double _val(KSum* acc) noexcept nogil:
    return acc.s + acc.c


cdef void _corrections(Py_ssize_t n, const double* lni, double* fgh) noexcept nogil:
    cdef KSum sl, sll, prefix, dbl
    cdef Py_ssize_t i
    cdef double lnn = lni[n - 1]
    cdef double li, p, sl_v, sll_v, dbl_v
    sl.s = 0.0; sl.c = 0.0
    sll.s = 0.0; sll.c = 0.0
    prefix.s = 0.0; prefix.c = 0.0
    dbl.s = 0.0; dbl.c = 0.0
    for i in range(n):
        li = lni[i] - lnn
        _add(&sl, li)
        _add(&sll, li * li)
        _add(&prefix, li)
        p = _val(&prefix)
        _add(&dbl, p / (i + 1))
    sl_v = _val(&sl)
    sll_v = _val(&sll)
    dbl_v = _val(&dbl)
    fgh[0] = -sl_v / (n - 1)
    fgh[1] = sll_v / (sl_v / n - dbl_v)
    fgh[2] = (sll_v - sl_v * sl_v / n) / (sl_v - dbl_v)


cdef void _estimate_row(const double* a, Py_ssize_t m, const cnp.int64_t* codes, Py_ssize_t ncodes,
                        const double* lni, const double* lnh, double g, double h,
                        double* out) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double lnm = lni[m - 1]
    cdef double amin = a[m - 1]
    cdef double y, L, x, w, lbar, ybar, dl, dy
    cdef KSum sy, sly, sll, sxy, sxx, syy, wn, wd, kn, kd, sl_all, cxy, cxx
    cdef bint want_wls = False, want_kwls = False, want_int = False
    cdef bint tied = False
    cdef double hill, ols, code_val

    for j in range(ncodes):
        if codes[j] == WLS_D:
            want_wls = True
        elif codes[j] == K_WLS:
            want_kwls = True
        elif codes[j] == OLS_INTERCEPT or codes[j] == OLS_INTERCEPT_SHIFTED:
            want_int = True

    sy.s = 0.0; sy.c = 0.0
    sly.s = 0.0; sly.c = 0.0
    sll.s = 0.0; sll.c = 0.0
    sxy.s = 0.0; sxy.c = 0.0
    sxx.s = 0.0; sxx.c = 0.0
    syy.s = 0.0; syy.c = 0.0
    wn.s = 0.0; wn.c = 0.0
    wd.s = 0.0; wd.c = 0.0
    kn.s = 0.0; kn.c = 0.0
    kd.s = 0.0; kd.c = 0.0
    sl_all.s = 0.0; sl_all.c = 0.0
    cxy.s = 0.0; cxy.c = 0.0
    cxx.s = 0.0; cxx.c = 0.0

    for i in range(m - 1):
        y = amin - a[i]
        L = lni[i] - lnm
        x = lnh[i] - lnm
        _add(&sy, y)
        _add(&sly, L * y)
        _add(&sll, L * L)
        _add(&sxy, x * y)
        _add(&sxx, x * x)
        _add(&syy, y * y)
        _add(&sl_all, L)
        if want_wls:
            w = 1.0 / (-L)
            _add(&wn, w * L * y)
            _add(&wd, w * L * L)
        if want_kwls:
            if y == 0.0:
                tied = True
            else:
                w = 1.0 / (-y)
                _add(&kn, w * L * y)
                _add(&kd, w * y * y)
    # i = m: zero response, regressor ln(m/m) = 0, GI regressor ln((m - 1/2)/m)
    x = lnh[m - 1] - lnm
    _add(&sxx, x * x)

    if want_int:
        lbar = _val(&sl_all) / m
        ybar = _val(&sy) / m
        for i in range(m):
            dl = (lni[i] - lnm) - lbar
            dy = (amin - a[i]) - ybar
            _add(&cxy, dl * dy)
            _add(&cxx, dl * dl)

    hill = -_val(&sy) / (m - 1) + 0.0
    ols = _val(&sly) / _val(&sll) + 0.0

    for j in range(ncodes):
        if codes[j] == HILL_SHIFTED:
            code_val = hill
        elif codes[j] == OLS:
            code_val = ols
        elif codes[j] == OLS_SHIFTED:
            code_val = g * ols
        elif codes[j] == OLS_GI:
            code_val = _val(&sxy) / _val(&sxx) + 0.0
        elif codes[j] == OLS_INTERCEPT:
            code_val = _val(&cxy) / _val(&cxx) + 0.0
        elif codes[j] == OLS_INTERCEPT_SHIFTED:
            code_val = h * (_val(&cxy) / _val(&cxx) + 0.0)
        elif codes[j] == WLS_D:
            code_val = _val(&wn) / _val(&wd) + 0.0
        elif codes[j] == K_ML:
            code_val = NAN if hill == 0.0 else 1.0 / (((m - 1.0) / m) * hill)
        elif codes[j] == K_OLS:
            code_val = NAN if _val(&syy) == 0.0 else _val(&sly) / _val(&syy)
        elif codes[j] == K_WLS:
            code_val = NAN if tied else _val(&kn) / _val(&kd)
        else:
            code_val = NAN
        out[j] = code_val


cdef cnp.ndarray _log_tables(Py_ssize_t n):
    # libc log per element, so a table prefix never depends on the table length
    tab_arr = np.empty((2, n), dtype=np.float64)
    cdef double[:, ::1] tab = tab_arr
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            tab[0, i] = log(i + 1.0)
            tab[1, i] = log(i + 0.5)
    return tab_arr


def correction_factors(Py_ssize_t n):
    cdef double[:, ::1] tab = _log_tables(n)
    cdef double fgh[3]
    with nogil:
        _corrections(n, &tab[0, 0], fgh)
    return fgh[0], fgh[1], fgh[2]


def estimate_batch(const double[:, ::1] logs, const cnp.int64_t[::1] codes, double g, double h):
    cdef Py_ssize_t r, nrow = logs.shape[0], m = logs.shape[1], nc = codes.shape[0]
    cdef double[:, ::1] tab = _log_tables(m)
    out_arr = np.empty((nrow, nc), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for r in range(nrow):
            _estimate_row(&logs[r, 0], m, &codes[0], nc, &tab[0, 0], &tab[1, 0], g, h, &out[r, 0])
    return out_arr


def scan(const double[::1] logs, Py_ssize_t m_min, Py_ssize_t m_max, const cnp.int64_t[::1] codes):
    cdef Py_ssize_t m, nc = codes.shape[0]
    cdef double[:, ::1] tab = _log_tables(m_max)
    cdef double fgh[3]
    out_arr = np.empty((m_max - m_min + 1, nc), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    with nogil:
        for m in range(m_min, m_max + 1):
            _corrections(m, &tab[0, 0], fgh)
            _estimate_row(&logs[0], m, &codes[0], nc, &tab[0, 0], &tab[1, 0],
                          fgh[1], fgh[2], &out[m - m_min, 0])
    return out_arr


def kml_weight_sum(const double[:, ::1] logs):
    """Sum over rows of the normalized inverse log-ratio weights; returns (sums, first_bad_row)."""
    cdef Py_ssize_t r, i, nrow = logs.shape[0], m = logs.shape[1]
    cdef double amin, t, tot
    cdef Py_ssize_t bad = -1
    acc_arr = np.zeros(m - 1, dtype=np.float64)
    row_arr = np.empty(m - 1, dtype=np.float64)
    cdef double[::1] acc = acc_arr
    cdef double[::1] row = row_arr
    cdef KSum s
    with nogil:
        for r in range(nrow):
            amin = logs[r, m - 1]
            s.s = 0.0; s.c = 0.0
            for i in range(m - 1):
                t = logs[r, i] - amin
                if t <= 0.0:
                    bad = r
                    break
                row[i] = 1.0 / t
                _add(&s, row[i])
            if bad >= 0:
                break
            tot = _val(&s)
            for i in range(m - 1):
                acc[i] += row[i] / tot
    return acc_arr, bad
