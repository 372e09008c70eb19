# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dormand-Prince 5(4) stepper; mirrors _stepper_py exactly."""

from libc.math cimport fabs, sqrt, pow, isfinite
from libc.stdlib cimport malloc, free

BACKEND = "compiled"

cdef double C2 = 1.0/5.0, C3 = 3.0/10.0, C4 = 4.0/5.0, C5 = 8.0/9.0
cdef double A21 = 1.0/5.0
cdef double A31 = 3.0/40.0, A32 = 9.0/40.0
cdef double A41 = 44.0/45.0, A42 = -56.0/15.0, A43 = 32.0/9.0
cdef double A51 = 19372.0/6561.0, A52 = -25360.0/2187.0, A53 = 64448.0/6561.0, A54 = -212.0/729.0
cdef double A61 = 9017.0/3168.0, A62 = -355.0/33.0, A63 = 46732.0/5247.0, A64 = 49.0/176.0, A65 = -5103.0/18656.0
cdef double A71 = 35.0/384.0, A73 = 500.0/1113.0, A74 = 125.0/192.0, A75 = -2187.0/6784.0, A76 = 11.0/84.0
cdef double E1 = 71.0/57600.0, E3 = -71.0/16695.0, E4 = 71.0/1920.0, E5 = -17253.0/339200.0, E6 = 22.0/525.0, E7 = -1.0/40.0
cdef double D1 = -12715105075.0/11282082432.0
cdef double D3 = 87487479700.0/32700410799.0
cdef double D4 = -10690763975.0/1880347072.0
cdef double D5 = 701980252875.0/199316789632.0
cdef double D6 = -1453857185.0/822651844.0
cdef double D7 = 69997945.0/29380423.0


cdef bint _rhs(double* coeffs, long* exps, long* owner, int nterms, int n,
               double* y, double* out) nogil:
    cdef int i, k, j
    cdef long e
    cdef double term, yj
    for i in range(n):
        out[i] = 0.0
    for k in range(nterms):
        term = coeffs[k]
        for j in range(n):
            e = exps[k * n + j]
            if e == 0:
                continue
            yj = y[j]
            if yj == 0.0 and e < 0:
                return 0
            term *= pow(yj, <double> e)
        out[owner[k]] += term
    for i in range(n):
        if not isfinite(out[i]):
            return 0
    return 1


def solve(coeffs_in, exps_in, owner_in, int nstate, y0_in, double t0,
          double t_end, double rtol, double atol, double h0, double hmax,
          double safety, double min_scale, double max_scale, watch_in,
          long max_steps):
    """Adaptive DOPRI5 loop with Hairer dense-output coefficients."""
    cdef int n = nstate
    cdef int nterms = len(coeffs_in)
    cdef int i
    cdef long k
    cdef double* coeffs = <double*> malloc(nterms * sizeof(double))
    cdef long* exps = <long*> malloc(nterms * n * sizeof(long))
    cdef long* owner = <long*> malloc(nterms * sizeof(long))
    cdef double* y = <double*> malloc(n * sizeof(double))
    cdef double* y1 = <double*> malloc(n * sizeof(double))
    cdef double* ytmp = <double*> malloc(n * sizeof(double))
    cdef double* k1 = <double*> malloc(n * sizeof(double))
    cdef double* k2 = <double*> malloc(n * sizeof(double))
    cdef double* k3 = <double*> malloc(n * sizeof(double))
    cdef double* k4 = <double*> malloc(n * sizeof(double))
    cdef double* k5 = <double*> malloc(n * sizeof(double))
    cdef double* k6 = <double*> malloc(n * sizeof(double))
    cdef double* k7 = <double*> malloc(n * sizeof(double))
    cdef double* sign0 = <double*> malloc(n * sizeof(double))
    cdef int* watch = <int*> malloc(n * sizeof(int))
    cdef double* tmpswap

    for i in range(nterms):
        coeffs[i] = coeffs_in[i]
        owner[i] = owner_in[i]
    for k in range(nterms * n):
        exps[k] = exps_in[k]
    for i in range(n):
        y[i] = y0_in[i]
        watch[i] = 1 if watch_in[i] else 0

    ts = [t0]
    ys = list(y0_in)
    dense = []
    cdef long naccept = 0, nreject = 0, nfev = 0, steps = 0
    cdef double max_err = 0.0
    cdef double t = t0, h, err, e, sc, r, fac, span, ydiff, bspl
    cdef bint ok, crossed
    status = "running"

    try:
        if not _rhs(coeffs, exps, owner, nterms, n, y, k1):
            return ("blowup", ts, ys, dense, naccept, nreject, 1, max_err)
        nfev = 1
        span = t_end - t
        if hmax <= 0.0:
            hmax = fabs(span)
        if h0 > 0.0:
            h = h0
        else:
            h = _initial_step(coeffs, exps, owner, nterms, n, y, k1, rtol, atol,
                              hmax, ytmp, k2)
            nfev += 2
        if h > hmax:
            h = hmax
        if h > fabs(span):
            h = fabs(span)

        for i in range(n):
            if watch[i]:
                sign0[i] = 1.0 if y[i] > 0 else (-1.0 if y[i] < 0 else 0.0)
            else:
                sign0[i] = 0.0

        while status == "running":
            steps += 1
            if steps > max_steps:
                status = "max_steps"
                break
            if t + h >= t_end:
                h = t_end - t
            if h <= fabs(t) * 1e-16 + 1e-300:
                status = "underflow"
                break

            for i in range(n):
                ytmp[i] = y[i] + h * A21 * k1[i]
            ok = _rhs(coeffs, exps, owner, nterms, n, ytmp, k2)
            if ok:
                for i in range(n):
                    ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
                ok = _rhs(coeffs, exps, owner, nterms, n, ytmp, k3)
            if ok:
                for i in range(n):
                    ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
                ok = _rhs(coeffs, exps, owner, nterms, n, ytmp, k4)
            if ok:
                for i in range(n):
                    ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i])
                ok = _rhs(coeffs, exps, owner, nterms, n, ytmp, k5)
            if ok:
                for i in range(n):
                    ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i])
                ok = _rhs(coeffs, exps, owner, nterms, n, ytmp, k6)
            if ok:
                for i in range(n):
                    y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i])
                ok = _rhs(coeffs, exps, owner, nterms, n, y1, k7)
            nfev += 6

            if not ok:
                nreject += 1
                h *= 0.5
                if h <= fabs(t) * 1e-16 + 1e-300:
                    status = "blowup"
                continue

            err = 0.0
            for i in range(n):
                e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i])
                sc = atol + rtol * (fabs(y[i]) if fabs(y[i]) > fabs(y1[i]) else fabs(y1[i]))
                r = e / sc
                err += r * r
            err = sqrt(err / n)

            if err <= 1.0:
                for i in range(n):
                    ydiff = y1[i] - y[i]
                    bspl = h * k1[i] - ydiff
                    dense.append(y[i])
                    dense.append(ydiff)
                    dense.append(bspl)
                    dense.append(ydiff - h * k7[i] - bspl)
                    dense.append(h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                t += h
                naccept += 1
                if err > max_err:
                    max_err = err
                tmpswap = y
                y = y1
                y1 = tmpswap
                tmpswap = k1
                k1 = k7
                k7 = tmpswap
                ts.append(t)
                for i in range(n):
                    ys.append(y[i])

                crossed = 0
                for i in range(n):
                    if watch[i] and sign0[i] != 0.0 and y[i] * sign0[i] <= 0.0:
                        crossed = 1
                if crossed:
                    status = "sign_change"
                elif t >= t_end:
                    status = "done"
                else:
                    fac = safety * pow(err, -0.2) if err > 0.0 else max_scale
                    if fac > max_scale:
                        fac = max_scale
                    if fac < min_scale:
                        fac = min_scale
                    h = h * fac
                    if h > hmax:
                        h = hmax
            else:
                nreject += 1
                fac = safety * pow(err, -0.2)
                if fac > 1.0:
                    fac = 1.0
                if fac < min_scale:
                    fac = min_scale
                h = h * fac
    finally:
        free(coeffs)
        free(exps)
        free(owner)
        free(y)
        free(y1)
        free(ytmp)
        free(k1)
        free(k2)
        free(k3)
        free(k4)
        free(k5)
        free(k6)
        free(k7)
        free(sign0)
        free(watch)

    return (status, ts, ys, dense, naccept, nreject, nfev, max_err)


cdef double _initial_step(double* coeffs, long* exps, long* owner, int nterms,
                          int n, double* y, double* f0, double rtol,
                          double atol, double hmax, double* y1, double* f1):
    cdef int i
    cdef double d0 = 0.0, d1 = 0.0, d2 = 0.0, sc, h0, h1, dm
    for i in range(n):
        sc = atol + rtol * fabs(y[i])
        d0 += (y[i] / sc) * (y[i] / sc)
        d1 += (f0[i] / sc) * (f0[i] / sc)
    d0 = sqrt(d0 / n)
    d1 = sqrt(d1 / n)
    h0 = 1e-6 if (d0 < 1e-5 or d1 < 1e-5) else 0.01 * d0 / d1
    if h0 > hmax:
        h0 = hmax
    for i in range(n):
        y1[i] = y[i] + h0 * f0[i]
    if not _rhs(coeffs, exps, owner, nterms, n, y1, f1):
        return 1e-12 if 1e-12 > h0 * 1e-3 else h0 * 1e-3
    for i in range(n):
        sc = atol + rtol * fabs(y[i])
        d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc)
    d2 = sqrt(d2 / n) / h0
    dm = d1 if d1 > d2 else d2
    if dm > 1e-15:
        h1 = pow(0.01 / dm, 0.2)
    else:
        h1 = 1e-6 if 1e-6 > h0 * 1e-3 else h0 * 1e-3
    h0 = 100.0 * h0
    if h1 < h0:
        h0 = h1
    if h0 > hmax:
        h0 = hmax
    return h0
