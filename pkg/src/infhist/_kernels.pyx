# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch prediction kernels (histogram gather + bump correction).

Kept in lockstep with ``_kernels_py``; the two must agree bitwise.
"""

from libc.math cimport floor, fabs


def hist_eval(const double[:, ::1] pts, const double[::1] offset, double width,
              const long long[::1] kmin, const long long[::1] strides,
              const double[::1] table, double[::1] out):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef Py_ssize_t p, i
    cdef long long flat, k
    for p in range(n):
        flat = 0
        for i in range(d):
            k = <long long>floor((pts[p, i] - offset[i]) / width)
            flat += (k - kmin[i]) * strides[i]
        out[p] = table[flat]
    return out


cdef Py_ssize_t _bisect_left(const double[:, ::1] centers, double value) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = centers.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if centers[mid, 0] < value:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef Py_ssize_t _bisect_right(const double[:, ::1] centers, double value) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = centers.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if centers[mid, 0] <= value:
            lo = mid + 1
        else:
            hi = mid
    return lo


def bump_adjust(const double[:, ::1] pts, const double[:, ::1] centers,
                const double[::1] amps, double t, double[::1] out):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef Py_ssize_t m = centers.shape[0]
    cdef Py_ssize_t p, j, i, lo, hi
    cdef double dist, coord
    cdef bint hit
    if m == 0:
        return out
    with nogil:
        for p in range(n):
            lo = _bisect_left(centers, pts[p, 0] - t)
            hi = _bisect_right(centers, pts[p, 0] + t)
            for j in range(lo, hi):
                hit = True
                for i in range(d):
                    coord = fabs(pts[p, i] - centers[j, i])
                    if coord > t:
                        hit = False
                        break
                if hit:
                    out[p] += amps[j]
                    break
    return out
