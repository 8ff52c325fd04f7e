# cython: language_level=3
"""Compiled step kernels; contract identical to pqwalk._kernels_py.

The coin rotation is written in explicit real components (the same
multiply/add order as numpy's complex product) so the C compiler can inline
and vectorize it instead of calling the library complex-multiply helper.
"""

BACKEND = "compiled"


cdef inline Py_ssize_t _coin(double complex[::1] down, double complex[::1] up,
                             double c, double s, Py_ssize_t n) except -1:
    cdef Py_ssize_t i
    cdef double dr, di, ur, ui
    for i in range(n):
        dr = down[i].real
        di = down[i].imag
        ur = up[i].real
        ui = up[i].imag
        # C(theta): new_d = c d - i s u, new_u = -i s d + c u
        down[i] = (c * dr + s * ui) + 1j * (c * di - s * ur)
        up[i] = (s * di + c * ur) + 1j * (c * ui - s * dr)
    return 0


cdef inline Py_ssize_t _shift_down_left(double complex[::1] down,
                                        Py_ssize_t n) except -1:
    cdef Py_ssize_t i
    if down[0] != 0:
        return 1
    for i in range(n - 1):
        down[i] = down[i + 1]
    down[n - 1] = 0
    return 0


cdef inline Py_ssize_t _shift_up_right(double complex[::1] up,
                                       Py_ssize_t n) except -1:
    cdef Py_ssize_t i
    if up[n - 1] != 0:
        return 2
    for i in range(n - 1, 0, -1):
        up[i] = up[i - 1]
    up[0] = 0
    return 0


def run_full_steps(double complex[::1] down, double complex[::1] up,
                   const double[::1] cos_table, const double[::1] sin_table,
                   Py_ssize_t nsteps):
    cdef Py_ssize_t n = down.shape[0]
    cdef Py_ssize_t s
    cdef Py_ssize_t code
    for s in range(nsteps):
        _coin(down, up, cos_table[s], sin_table[s], n)
        code = _shift_down_left(down, n)
        if code:
            return code
        code = _shift_up_right(up, n)
        if code:
            return code
    return 0


def run_split_steps(double complex[::1] down, double complex[::1] up,
                    double cos1, double sin1, double cos2, double sin2,
                    Py_ssize_t nsteps):
    cdef Py_ssize_t n = down.shape[0]
    cdef Py_ssize_t s
    cdef Py_ssize_t code
    for s in range(nsteps):
        _coin(down, up, cos1, sin1, n)
        code = _shift_down_left(down, n)
        if code:
            return code
        _coin(down, up, cos2, sin2, n)
        code = _shift_up_right(up, n)
        if code:
            return code
    return 0
