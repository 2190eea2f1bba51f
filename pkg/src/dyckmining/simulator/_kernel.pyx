# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled estimation kernel; mirrors ``_kernel_py`` draw for draw."""

from libc.stdint cimport int64_t

cdef enum:
    N_STATS = 9
    HIST_BINS = 64

cdef enum:
    SM = 1
    EFSM = 2
    LSM = 3
    ETH = 4

cdef int NO_PENDING = -1
cdef int OWNER_ATTACKER = 1
cdef int OWNER_HONEST = 0


cdef struct Cycle:
    long l
    long z
    int first_honest
    long k
    int after
    int kind


cdef Py_ssize_t _cycle_sm(const double[::1] u, Py_ssize_t i, Py_ssize_t n,
                          double q, double gamma, Cycle* out) noexcept nogil:
    cdef long k, lead, ns
    cdef int seen_h, after
    if i >= n:
        return -1
    if u[i] >= q:
        out.l = 1; out.z = 0; out.first_honest = 1; out.kind = 0
        return i + 1
    i += 1
    if i >= n:
        return -1
    if u[i] >= q:
        i += 1
        if i >= n:
            return -1
        if u[i] < q:
            out.l = 2; out.z = 2; out.first_honest = 0; out.kind = 1
            return i + 1
        i += 1
        if i >= n:
            return -1
        if u[i] < gamma:
            out.l = 2; out.z = 1; out.first_honest = 0; out.kind = 2
        else:
            out.l = 2; out.z = 0; out.first_honest = 1; out.kind = 3
        return i + 1
    i += 1
    k = 2
    lead = 2
    ns = 2
    seen_h = 0
    after = 0
    while True:
        if i >= n:
            return -1
        if u[i] < q:
            lead += 1
            ns += 1
            if seen_h:
                after = 1
            else:
                k += 1
        else:
            seen_h = 1
            if lead == 2:
                i += 1
                break
            lead -= 1
        i += 1
    out.l = ns; out.z = ns; out.first_honest = 0; out.k = k; out.after = after
    out.kind = 4 if after else 5
    return i


cdef Py_ssize_t _cycle_stubborn(const double[::1] u, Py_ssize_t i, Py_ssize_t n,
                                double q, double gamma, int lead_stubborn,
                                Cycle* out) noexcept nogil:
    cdef long lead = 0, nh = 0, zlast = 0
    if i >= n:
        return -1
    if lead_stubborn:
        if u[i] >= q:
            out.l = 1; out.z = 0
            return i + 1
        lead = 1
        i += 1
    while True:
        if i >= n:
            return -1
        if u[i] < q:
            lead += 1
            i += 1
            continue
        i += 1
        nh += 1
        if nh >= 2:
            if i >= n:
                return -1
            if u[i] < gamma:
                zlast = nh - 1
            i += 1
        lead -= 1
        if lead_stubborn and lead == 0:
            break
        if lead < 0:
            out.l = nh; out.z = zlast
            return i
    if i >= n:
        return -1
    if u[i] < q:
        out.l = nh + 1; out.z = nh + 1
        return i + 1
    i += 1
    if i >= n:
        return -1
    out.l = nh + 1
    out.z = nh if u[i] < gamma else zlast
    return i + 1


def run_cycles(int strategy, double q, double gamma, int n1, const double[::1] ku,
               double pi, const double[::1] u, Py_ssize_t pos, long max_cycles,
               int pending_age, int pending_owner, double[::1] sums,
               double[:, ::1] cross, int64_t[::1] hist):
    """Play up to ``max_cycles`` complete cycles from ``u[pos:]``.

    Same contract as ``_kernel_py.run_cycles``; releases the GIL while running.
    """
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t j
    cdef long done = 0
    cdef Cycle out
    cdef double x[N_STATS]
    cdef double uu, v, uh1, uh2, ru, rn
    cdef int a, b, d
    cdef int lsm = strategy == LSM
    out.k = 0
    out.after = 0
    out.first_honest = 0
    out.kind = 0
    with nogil:
        while done < max_cycles:
            if strategy == SM or strategy == ETH:
                j = _cycle_sm(u, pos, n, q, gamma, &out)
            else:
                j = _cycle_stubborn(u, pos, n, q, gamma, lsm, &out)
            if j < 0:
                break
            pos = j
            uu = 0.0; v = 0.0; uh1 = 0.0; uh2 = 0.0; ru = 0.0; rn = 0.0
            if strategy == ETH:
                if pending_age != NO_PENDING:
                    d = pending_age + 1
                    if d <= n1:
                        uu += 1.0
                        v += 1.0
                        if out.first_honest:
                            uh2 += 1.0
                        else:
                            rn += 1.0
                        if pending_owner == OWNER_ATTACKER:
                            ru += ku[d]
                pending_age = NO_PENDING
                if out.kind == 1:
                    uu += 1.0; rn += 1.0
                elif out.kind == 2:
                    uu += 1.0; uh1 += 1.0
                elif out.kind == 3:
                    uu += 1.0; uh1 += 1.0; ru += ku[1]
                elif out.kind == 4:
                    if out.k <= n1:
                        uu += 1.0; rn += 1.0
                elif out.kind == 5:
                    if out.k <= n1:
                        pending_age = <int>(out.k - 1)
                        pending_owner = OWNER_HONEST
            x[0] = <double>out.l; x[1] = <double>out.z; x[2] = uu; x[3] = v
            x[4] = uh1; x[5] = uh2; x[6] = ru; x[7] = rn
            x[8] = x[1] + ru + pi * rn
            for a in range(N_STATS):
                sums[a] += x[a]
                for b in range(a, N_STATS):
                    cross[a, b] += x[a] * x[b]
            if out.l < HIST_BINS:
                hist[out.l] += 1
            else:
                hist[HIST_BINS - 1] += 1
            done += 1
    return pos, done, pending_age, pending_owner
