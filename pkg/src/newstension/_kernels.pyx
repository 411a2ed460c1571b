# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled per-window prosody kernel.

Same contract as ``newstension._kernels_py.frame_features``; the
autocorrelation is computed directly over the searched lag range instead of
through an FFT.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport log10, sqrt, fmax as cfmax

cnp.import_array()


cdef inline double _dot(const double* a, const double* b, Py_ssize_t n) noexcept nogil:
    # four independent accumulators so the compiler can pipeline the loop
    cdef double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0
    cdef Py_ssize_t i = 0, m = n - n % 4
    while i < m:
        s0 += a[i] * b[i]
        s1 += a[i + 1] * b[i + 1]
        s2 += a[i + 2] * b[i + 2]
        s3 += a[i + 3] * b[i + 3]
        i += 4
    while i < n:
        s0 += a[i] * b[i]
        i += 1
    return (s0 + s1) + (s2 + s3)


cdef void _one_frame(const double[:] frame, double[:] x, double[:] energy, double[:] r,
                     int lag_min, int lag_max, double octave_ratio,
                     double voicing_threshold, double floor_db,
                     double* loud, double* lag, double* voicing) noexcept nogil:
    cdef Py_ssize_t width = frame.shape[0]
    cdef Py_ssize_t i, k, t, nr = lag_max - lag_min + 3
    cdef double s = 0.0, ss = 0.0, mean, denom, head, tail, total, best, a, b, c, curv
    cdef int first = -1, bi = 1

    for i in range(width):
        s += frame[i]
        ss += frame[i] * frame[i]
    ss /= width
    if ss > 0.0:
        loud[0] = 10.0 * log10(ss)
        if loud[0] < floor_db:
            loud[0] = floor_db
        if loud[0] > 0.0:
            loud[0] = 0.0
    else:
        loud[0] = floor_db

    mean = s / width
    energy[0] = 0.0
    for i in range(width):
        x[i] = frame[i] - mean
        energy[i + 1] = energy[i] + x[i] * x[i]
    total = energy[width]

    for k in range(nr):
        t = lag_min - 1 + k
        head = energy[width - t]
        tail = total - energy[t]
        denom = sqrt(head * tail)
        if denom > 1e-12 * cfmax(total, 1e-300):
            r[k] = _dot(&x[0], &x[t], width - t) / denom
        else:
            r[k] = 0.0

    best = r[1]
    for k in range(2, nr - 1):
        if r[k] > best:
            best = r[k]
            bi = k
    voicing[0] = 0.0 if best < 0.0 else (1.0 if best > 1.0 else best)
    if voicing[0] < voicing_threshold:
        lag[0] = 0.0
        return

    for k in range(1, nr - 1):
        if r[k] >= r[k - 1] and r[k] >= r[k + 1] and r[k] >= octave_ratio * best:
            first = <int>k
            break
    if first < 0:
        lag[0] = lag_min - 1 + bi
        return
    a = r[first - 1]
    b = r[first]
    c = r[first + 1]
    curv = a - 2.0 * b + c
    lag[0] = lag_min - 1 + first
    if curv < 0.0:
        lag[0] += 0.5 * (a - c) / curv


def frame_features(frames, int lag_min, int lag_max, double octave_ratio,
                   double voicing_threshold, double floor_db):
    cdef const double[:, :] fv = np.ascontiguousarray(frames, dtype=np.float64)
    cdef Py_ssize_t n = fv.shape[0], width = fv.shape[1], j
    loud_a = np.zeros(n)
    lag_a = np.zeros(n)
    voice_a = np.zeros(n)
    cdef double[:] loud = loud_a, lag = lag_a, voice = voice_a
    cdef double[:] x = np.empty(width)
    cdef double[:] energy = np.empty(width + 1)
    cdef double[:] r = np.empty(lag_max - lag_min + 3)
    with nogil:
        for j in range(n):
            _one_frame(fv[j], x, energy, r, lag_min, lag_max, octave_ratio,
                       voicing_threshold, floor_db, &loud[j], &lag[j], &voice[j])
    return loud_a, lag_a, voice_a
