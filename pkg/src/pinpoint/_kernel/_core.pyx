# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled numeric kernels; see pure.py for the reference semantics."""

from libc.math cimport log

import numpy as np


def posterior(const double[::1] prior, const double[::1] likelihood, double floor, bint square):
    cdef Py_ssize_t k = prior.shape[0]
    cdef Py_ssize_t i
    cdef double f, z = 0.0
    if likelihood.shape[0] != k:
        raise ValueError("prior and likelihood lengths differ")
    out = np.empty(k, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(k):
        f = likelihood[i]
        if f < floor:
            f = floor
        if square:
            f = f * f
        o[i] = prior[i] * f
        z += o[i]
    if z <= 0.0:
        raise ValueError("zero-mass posterior")
    for i in range(k):
        o[i] /= z
    return out


def eig_score(const double[::1] prior, const double[:, ::1] likelihoods):
    cdef Py_ssize_t k = prior.shape[0]
    cdef Py_ssize_t m = likelihoods.shape[1]
    cdef Py_ssize_t i, j
    cdef double w, z, total = 0.0
    if likelihoods.shape[0] != k:
        raise ValueError("prior and likelihood row counts differ")
    for j in range(m):
        z = 0.0
        for i in range(k):
            z += prior[i] * likelihoods[i, j]
        if z <= 0.0:
            continue
        for i in range(k):
            w = prior[i] * likelihoods[i, j]
            if w > 0.0:
                total += w * (-log(w / z))
    return total
