# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled MPFR Taylor stepping kernel for the planar elliptic RTBP.

Same contract and the same operation order as ``_taylor_pure`` (see that
module for the algorithm); results are bit-identical between backends.
"""
from libc.stdlib cimport free, malloc

from .errors import CollisionSingularity

BACKEND = "compiled"

cdef extern from "mpfr.h" nogil:
    ctypedef long mpfr_prec_t
    ctypedef int mpfr_sign_t
    ctypedef long mpfr_exp_t
    ctypedef unsigned long mp_limb_t
    ctypedef struct __mpfr_struct:
        mpfr_prec_t _mpfr_prec
        mpfr_sign_t _mpfr_sign
        mpfr_exp_t _mpfr_exp
        mp_limb_t* _mpfr_d
    ctypedef __mpfr_struct* mpfr_ptr
    ctypedef const __mpfr_struct* mpfr_srcptr
    ctypedef enum mpfr_rnd_t:
        MPFR_RNDN
    void mpfr_init2(mpfr_ptr, mpfr_prec_t)
    void mpfr_clear(mpfr_ptr)
    int mpfr_set_str(mpfr_ptr, const char*, int, mpfr_rnd_t)
    int mpfr_set(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_set_si(mpfr_ptr, long, mpfr_rnd_t)
    char* mpfr_get_str(char*, mpfr_exp_t*, int, size_t, mpfr_srcptr, mpfr_rnd_t)
    void mpfr_free_str(char*)
    int mpfr_add(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sub(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_mul(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_div(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_mul_si(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t)
    int mpfr_div_si(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t)
    int mpfr_sub_si(mpfr_ptr, mpfr_srcptr, long, mpfr_rnd_t)
    int mpfr_si_sub(mpfr_ptr, long, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_ui_div(mpfr_ptr, unsigned long, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_neg(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_pow(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_sin_cos(mpfr_ptr, mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)
    int mpfr_less_p(mpfr_srcptr, mpfr_srcptr)
    int mpfr_zero_p(mpfr_srcptr)


cdef __mpfr_struct* _alloc(int n, mpfr_prec_t prec):
    cdef __mpfr_struct* arr = <__mpfr_struct*> malloc(n * sizeof(__mpfr_struct))
    cdef int i
    for i in range(n):
        mpfr_init2(&arr[i], prec)
        mpfr_set_si(&arr[i], 0, MPFR_RNDN)
    return arr


cdef void _release(__mpfr_struct* arr, int n):
    cdef int i
    for i in range(n):
        mpfr_clear(&arr[i])
    free(arr)


cdef str _to_str(mpfr_srcptr x):
    cdef mpfr_exp_t exp
    cdef char* raw
    if mpfr_zero_p(x):
        return "0"
    raw = mpfr_get_str(NULL, &exp, 10, 0, x, MPFR_RNDN)
    py = (<bytes> raw).decode("ascii")
    mpfr_free_str(raw)
    if py.startswith("-"):
        return f"-0.{py[1:]}e{exp}"
    return f"0.{py}e{exp}"


cdef void _set_from(mpfr_ptr x, s):
    b = str(s).encode("ascii")
    mpfr_set_str(x, <const char*> b, 10, MPFR_RNDN)


# workspace: all coefficient arrays plus scalar temporaries
cdef struct _WS:
    __mpfr_struct* TH
    __mpfr_struct* Z1
    __mpfr_struct* Z2
    __mpfr_struct* V1
    __mpfr_struct* V2
    __mpfr_struct* S
    __mpfr_struct* C
    __mpfr_struct* W
    __mpfr_struct* U
    __mpfr_struct* DX1
    __mpfr_struct* DX2
    __mpfr_struct* DY1
    __mpfr_struct* DY2
    __mpfr_struct* RX
    __mpfr_struct* RY
    __mpfr_struct* SX
    __mpfr_struct* SY
    __mpfr_struct* tmp   # scalars: t1 t2 ss cc uc us rx ry a1 a2 b1 b2 ww acc


cdef int _step_coeffs(_WS* w, int order, mpfr_srcptr e, mpfr_srcptr mu,
                      mpfr_srcptr cth, mpfr_srcptr m32, mpfr_srcptr ax,
                      mpfr_srcptr ay, mpfr_srcptr omm, mpfr_srcptr sign,
                      mpfr_srcptr floor2) noexcept nogil:
    """Fill coefficient arrays from the order-0 state already in place.

    Returns 1 on a collision-floor violation, 0 otherwise.
    """
    cdef int k, j, kp1
    cdef mpfr_ptr t1 = &w.tmp[0]
    cdef mpfr_ptr t2 = &w.tmp[1]
    cdef mpfr_ptr ss = &w.tmp[2]
    cdef mpfr_ptr cc = &w.tmp[3]
    cdef mpfr_ptr uc = &w.tmp[4]
    cdef mpfr_ptr us = &w.tmp[5]
    cdef mpfr_ptr rx = &w.tmp[6]
    cdef mpfr_ptr ry = &w.tmp[7]
    cdef mpfr_ptr a1 = &w.tmp[8]
    cdef mpfr_ptr a2 = &w.tmp[9]
    cdef mpfr_ptr b1 = &w.tmp[10]
    cdef mpfr_ptr b2 = &w.tmp[11]
    cdef mpfr_ptr ww = &w.tmp[12]
    for k in range(order + 1):
        if k == 0:
            mpfr_sin_cos(&w.S[0], &w.C[0], &w.TH[0], MPFR_RNDN)
            mpfr_mul(t1, e, &w.C[0], MPFR_RNDN)
            mpfr_si_sub(&w.W[0], 1, t1, MPFR_RNDN)
            mpfr_ui_div(&w.U[0], 1, &w.W[0], MPFR_RNDN)
            mpfr_mul(uc, &w.U[0], &w.C[0], MPFR_RNDN)
            mpfr_mul(us, &w.U[0], &w.S[0], MPFR_RNDN)
        else:
            mpfr_set_si(ss, 0, MPFR_RNDN)
            mpfr_set_si(cc, 0, MPFR_RNDN)
            for j in range(1, k + 1):
                mpfr_mul_si(t1, &w.TH[j], j, MPFR_RNDN)
                mpfr_mul(t2, t1, &w.C[k - j], MPFR_RNDN)
                mpfr_add(ss, ss, t2, MPFR_RNDN)
                mpfr_mul(t2, t1, &w.S[k - j], MPFR_RNDN)
                mpfr_add(cc, cc, t2, MPFR_RNDN)
            mpfr_div_si(&w.S[k], ss, k, MPFR_RNDN)
            mpfr_neg(t1, cc, MPFR_RNDN)
            mpfr_div_si(&w.C[k], t1, k, MPFR_RNDN)
            mpfr_neg(t1, e, MPFR_RNDN)
            mpfr_mul(&w.W[k], t1, &w.C[k], MPFR_RNDN)
            mpfr_set_si(ss, 0, MPFR_RNDN)
            for j in range(k):
                mpfr_mul_si(t1, &w.W[k - j], -k, MPFR_RNDN)
                mpfr_mul(t1, t1, &w.U[j], MPFR_RNDN)
                mpfr_add(ss, ss, t1, MPFR_RNDN)
            mpfr_mul_si(t1, &w.W[0], k, MPFR_RNDN)
            mpfr_div(&w.U[k], ss, t1, MPFR_RNDN)
            mpfr_set_si(uc, 0, MPFR_RNDN)
            mpfr_set_si(us, 0, MPFR_RNDN)
            for j in range(k + 1):
                mpfr_mul(t1, &w.U[j], &w.C[k - j], MPFR_RNDN)
                mpfr_add(uc, uc, t1, MPFR_RNDN)
                mpfr_mul(t1, &w.U[j], &w.S[k - j], MPFR_RNDN)
                mpfr_add(us, us, t1, MPFR_RNDN)
        mpfr_mul(t1, ax, uc, MPFR_RNDN)
        mpfr_sub(&w.DX1[k], t1, &w.Z1[k], MPFR_RNDN)
        mpfr_mul(t1, ax, us, MPFR_RNDN)
        mpfr_sub(&w.DX2[k], t1, &w.Z2[k], MPFR_RNDN)
        mpfr_mul(t1, ay, uc, MPFR_RNDN)
        mpfr_sub(&w.DY1[k], t1, &w.Z1[k], MPFR_RNDN)
        mpfr_mul(t1, ay, us, MPFR_RNDN)
        mpfr_sub(&w.DY2[k], t1, &w.Z2[k], MPFR_RNDN)
        mpfr_set_si(rx, 0, MPFR_RNDN)
        mpfr_set_si(ry, 0, MPFR_RNDN)
        for j in range(k + 1):
            mpfr_mul(t1, &w.DX1[j], &w.DX1[k - j], MPFR_RNDN)
            mpfr_mul(t2, &w.DX2[j], &w.DX2[k - j], MPFR_RNDN)
            mpfr_add(t1, t1, t2, MPFR_RNDN)
            mpfr_add(rx, rx, t1, MPFR_RNDN)
            mpfr_mul(t1, &w.DY1[j], &w.DY1[k - j], MPFR_RNDN)
            mpfr_mul(t2, &w.DY2[j], &w.DY2[k - j], MPFR_RNDN)
            mpfr_add(t1, t1, t2, MPFR_RNDN)
            mpfr_add(ry, ry, t1, MPFR_RNDN)
        mpfr_set(&w.RX[k], rx, MPFR_RNDN)
        mpfr_set(&w.RY[k], ry, MPFR_RNDN)
        if k == 0:
            if mpfr_less_p(&w.RX[0], floor2) or mpfr_less_p(&w.RY[0], floor2):
                return 1
            mpfr_pow(&w.SX[0], &w.RX[0], m32, MPFR_RNDN)
            mpfr_pow(&w.SY[0], &w.RY[0], m32, MPFR_RNDN)
        else:
            mpfr_set_si(a1, 0, MPFR_RNDN)
            mpfr_set_si(a2, 0, MPFR_RNDN)
            for j in range(k):
                mpfr_mul_si(t1, m32, k - j, MPFR_RNDN)
                mpfr_sub_si(t1, t1, j, MPFR_RNDN)
                mpfr_mul(t2, t1, &w.RX[k - j], MPFR_RNDN)
                mpfr_mul(t2, t2, &w.SX[j], MPFR_RNDN)
                mpfr_add(a1, a1, t2, MPFR_RNDN)
                mpfr_mul(t2, t1, &w.RY[k - j], MPFR_RNDN)
                mpfr_mul(t2, t2, &w.SY[j], MPFR_RNDN)
                mpfr_add(a2, a2, t2, MPFR_RNDN)
            mpfr_mul_si(t1, &w.RX[0], k, MPFR_RNDN)
            mpfr_div(&w.SX[k], a1, t1, MPFR_RNDN)
            mpfr_mul_si(t1, &w.RY[0], k, MPFR_RNDN)
            mpfr_div(&w.SY[k], a2, t1, MPFR_RNDN)
        if k == order:
            break
        mpfr_set_si(ww, 0, MPFR_RNDN)
        mpfr_set_si(a1, 0, MPFR_RNDN)
        mpfr_set_si(a2, 0, MPFR_RNDN)
        for j in range(k + 1):
            mpfr_mul(t1, &w.W[j], &w.W[k - j], MPFR_RNDN)
            mpfr_add(ww, ww, t1, MPFR_RNDN)
            mpfr_mul(t1, &w.SX[j], &w.DX1[k - j], MPFR_RNDN)
            mpfr_add(a1, a1, t1, MPFR_RNDN)
            mpfr_mul(t1, &w.SX[j], &w.DX2[k - j], MPFR_RNDN)
            mpfr_add(a2, a2, t1, MPFR_RNDN)
        mpfr_set_si(b1, 0, MPFR_RNDN)
        mpfr_set_si(b2, 0, MPFR_RNDN)
        for j in range(k + 1):
            mpfr_mul(t1, &w.SY[j], &w.DY1[k - j], MPFR_RNDN)
            mpfr_add(b1, b1, t1, MPFR_RNDN)
            mpfr_mul(t1, &w.SY[j], &w.DY2[k - j], MPFR_RNDN)
            mpfr_add(b2, b2, t1, MPFR_RNDN)
        kp1 = k + 1
        mpfr_mul(t1, cth, ww, MPFR_RNDN)
        mpfr_div_si(&w.TH[kp1], t1, kp1, MPFR_RNDN)
        mpfr_div_si(&w.Z1[kp1], &w.V1[k], kp1, MPFR_RNDN)
        mpfr_div_si(&w.Z2[kp1], &w.V2[k], kp1, MPFR_RNDN)
        mpfr_mul(t1, omm, a1, MPFR_RNDN)
        mpfr_mul(t2, mu, b1, MPFR_RNDN)
        mpfr_add(t1, t1, t2, MPFR_RNDN)
        mpfr_mul(t1, sign, t1, MPFR_RNDN)
        mpfr_div_si(&w.V1[kp1], t1, kp1, MPFR_RNDN)
        mpfr_mul(t1, omm, a2, MPFR_RNDN)
        mpfr_mul(t2, mu, b2, MPFR_RNDN)
        mpfr_add(t1, t1, t2, MPFR_RNDN)
        mpfr_mul(t1, sign, t1, MPFR_RNDN)
        mpfr_div_si(&w.V2[kp1], t1, kp1, MPFR_RNDN)
    return 0


cdef void _horner(mpfr_ptr out, __mpfr_struct* coeffs, int order,
                  mpfr_srcptr h, mpfr_ptr acc) noexcept nogil:
    cdef int k
    mpfr_set(acc, &coeffs[order], MPFR_RNDN)
    for k in range(order - 1, -1, -1):
        mpfr_mul(acc, acc, h, MPFR_RNDN)
        mpfr_add(acc, acc, &coeffs[k], MPFR_RNDN)
    mpfr_set(out, acc, MPFR_RNDN)


def advance(state, e, mu, h, long n_steps, tau, int order, long prec_bits,
            bint attractive=True, collision_floor="1e-12"):
    cdef int n = order + 1
    cdef _WS w
    cdef __mpfr_struct* consts = _alloc(12, prec_bits)
    cdef mpfr_ptr c_e = &consts[0]
    cdef mpfr_ptr c_mu = &consts[1]
    cdef mpfr_ptr c_h = &consts[2]
    cdef mpfr_ptr c_floor2 = &consts[3]
    cdef mpfr_ptr c_cth = &consts[4]
    cdef mpfr_ptr c_m32 = &consts[5]
    cdef mpfr_ptr c_sign = &consts[6]
    cdef mpfr_ptr c_ax = &consts[7]
    cdef mpfr_ptr c_ay = &consts[8]
    cdef mpfr_ptr c_omm = &consts[9]
    cdef mpfr_ptr c_tau = &consts[10]
    cdef mpfr_ptr c_t1 = &consts[11]
    cdef long i
    cdef int collided = 0
    cdef bint has_tau = tau is not None

    w.TH = _alloc(n, prec_bits); w.Z1 = _alloc(n, prec_bits)
    w.Z2 = _alloc(n, prec_bits); w.V1 = _alloc(n, prec_bits)
    w.V2 = _alloc(n, prec_bits); w.S = _alloc(n, prec_bits)
    w.C = _alloc(n, prec_bits); w.W = _alloc(n, prec_bits)
    w.U = _alloc(n, prec_bits); w.DX1 = _alloc(n, prec_bits)
    w.DX2 = _alloc(n, prec_bits); w.DY1 = _alloc(n, prec_bits)
    w.DY2 = _alloc(n, prec_bits); w.RX = _alloc(n, prec_bits)
    w.RY = _alloc(n, prec_bits); w.SX = _alloc(n, prec_bits)
    w.SY = _alloc(n, prec_bits); w.tmp = _alloc(14, prec_bits)

    try:
        _set_from(&w.TH[0], state[0])
        _set_from(&w.Z1[0], state[1])
        _set_from(&w.Z2[0], state[2])
        _set_from(&w.V1[0], state[3])
        _set_from(&w.V2[0], state[4])
        _set_from(c_e, e)
        _set_from(c_mu, mu)
        _set_from(c_h, h)
        _set_from(c_t1, collision_floor)
        mpfr_mul(c_floor2, c_t1, c_t1, MPFR_RNDN)
        _set_from(c_m32, "-1.5")
        mpfr_si_sub(c_t1, 1, c_e, MPFR_RNDN)
        mpfr_pow(c_cth, c_t1, c_m32, MPFR_RNDN)
        mpfr_neg(c_ax, c_t1, MPFR_RNDN)          # -(1-e)
        mpfr_mul(c_ax, c_ax, c_mu, MPFR_RNDN)    # -(1-e)*mu
        mpfr_si_sub(c_omm, 1, c_mu, MPFR_RNDN)
        mpfr_mul(c_ay, c_t1, c_omm, MPFR_RNDN)   # (1-e)*(1-mu)
        mpfr_set_si(c_sign, 1 if attractive else -1, MPFR_RNDN)
        if has_tau:
            _set_from(c_tau, tau)

        with nogil:
            for i in range(n_steps):
                collided = _step_coeffs(&w, order, c_e, c_mu, c_cth, c_m32,
                                        c_ax, c_ay, c_omm, c_sign, c_floor2)
                if collided:
                    break
                _horner(&w.TH[0], w.TH, order, c_h, &w.tmp[13])
                _horner(&w.Z1[0], w.Z1, order, c_h, &w.tmp[13])
                _horner(&w.Z2[0], w.Z2, order, c_h, &w.tmp[13])
                _horner(&w.V1[0], w.V1, order, c_h, &w.tmp[13])
                _horner(&w.V2[0], w.V2, order, c_h, &w.tmp[13])
            if not collided and has_tau:
                collided = _step_coeffs(&w, order, c_e, c_mu, c_cth, c_m32,
                                        c_ax, c_ay, c_omm, c_sign, c_floor2)
                if not collided:
                    _horner(&w.TH[0], w.TH, order, c_tau, &w.tmp[13])
                    _horner(&w.Z1[0], w.Z1, order, c_tau, &w.tmp[13])
                    _horner(&w.Z2[0], w.Z2, order, c_tau, &w.tmp[13])
                    _horner(&w.V1[0], w.V1, order, c_tau, &w.tmp[13])
                    _horner(&w.V2[0], w.V2, order, c_tau, &w.tmp[13])

        if collided:
            raise CollisionSingularity("trajectory reached the collision floor")
        return (_to_str(&w.TH[0]), _to_str(&w.Z1[0]), _to_str(&w.Z2[0]),
                _to_str(&w.V1[0]), _to_str(&w.V2[0]))
    finally:
        _release(w.TH, n); _release(w.Z1, n); _release(w.Z2, n)
        _release(w.V1, n); _release(w.V2, n); _release(w.S, n)
        _release(w.C, n); _release(w.W, n); _release(w.U, n)
        _release(w.DX1, n); _release(w.DX2, n); _release(w.DY1, n)
        _release(w.DY2, n); _release(w.RX, n); _release(w.RY, n)
        _release(w.SX, n); _release(w.SY, n); _release(w.tmp, 14)
        _release(consts, 12)
