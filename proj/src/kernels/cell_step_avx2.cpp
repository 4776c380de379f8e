#include "pra/kernels.hpp"

#include <immintrin.h>

namespace pra::kernels {

namespace {

inline double hsum(__m256d v)
{
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

Polarization cell_step_avx2(const ClassBlock& b, const Coupling& c)
{
    const __m256d cos_chi = _mm256_set1_pd(c.cos_chi);
    const __m256d cos_m1 = _mm256_set1_pd(c.cos_m1);
    const __m256d sin_chi = _mm256_set1_pd(c.sin_chi);
    const __m256d ugr = _mm256_set1_pd(c.ug_re);
    const __m256d ugi = _mm256_set1_pd(c.ug_im);
    const __m256d usr = _mm256_set1_pd(c.us_re);
    const __m256d usi = _mm256_set1_pd(c.us_im);
    __m256d acc_re = _mm256_setzero_pd();
    __m256d acc_im = _mm256_setzero_pd();

    std::size_t k = 0;
    for (; k + 4 <= b.n; k += 4) {
        const __m256d rr = _mm256_loadu_pd(b.rot_re + k);
        const __m256d ri = _mm256_loadu_pd(b.rot_im + k);
        const __m256d er0 = _mm256_loadu_pd(b.ce_re + k);
        const __m256d ei0 = _mm256_loadu_pd(b.ce_im + k);
        __m256d er = _mm256_fmsub_pd(er0, rr, _mm256_mul_pd(ei0, ri));
        __m256d ei = _mm256_fmadd_pd(er0, ri, _mm256_mul_pd(ei0, rr));

        const __m256d gr = _mm256_loadu_pd(b.cg_re + k);
        const __m256d gi = _mm256_loadu_pd(b.cg_im + k);
        const __m256d sr = _mm256_loadu_pd(b.cs_re + k);
        const __m256d si = _mm256_loadu_pd(b.cs_im + k);

        __m256d pr = _mm256_mul_pd(ugr, gr);
        pr = _mm256_fmadd_pd(ugi, gi, pr);
        pr = _mm256_fmadd_pd(usr, sr, pr);
        pr = _mm256_fmadd_pd(usi, si, pr);
        __m256d pi = _mm256_mul_pd(ugr, gi);
        pi = _mm256_fnmadd_pd(ugi, gr, pi);
        pi = _mm256_fmadd_pd(usr, si, pi);
        pi = _mm256_fnmadd_pd(usi, sr, pi);

        const __m256d tr = _mm256_fmsub_pd(cos_m1, pr, _mm256_mul_pd(sin_chi, ei));
        const __m256d ti = _mm256_fmadd_pd(cos_m1, pi, _mm256_mul_pd(sin_chi, er));
        const __m256d ner = _mm256_fmsub_pd(cos_chi, er, _mm256_mul_pd(sin_chi, pi));
        const __m256d nei = _mm256_fmadd_pd(cos_chi, ei, _mm256_mul_pd(sin_chi, pr));

        const __m256d ngr = _mm256_add_pd(gr, _mm256_fmsub_pd(ugr, tr, _mm256_mul_pd(ugi, ti)));
        const __m256d ngi = _mm256_add_pd(gi, _mm256_fmadd_pd(ugr, ti, _mm256_mul_pd(ugi, tr)));
        _mm256_storeu_pd(b.cs_re + k,
                         _mm256_add_pd(sr, _mm256_fmsub_pd(usr, tr, _mm256_mul_pd(usi, ti))));
        _mm256_storeu_pd(b.cs_im + k,
                         _mm256_add_pd(si, _mm256_fmadd_pd(usr, ti, _mm256_mul_pd(usi, tr))));
        _mm256_storeu_pd(b.cg_re + k, ngr);
        _mm256_storeu_pd(b.cg_im + k, ngi);

        er = _mm256_fmsub_pd(ner, rr, _mm256_mul_pd(nei, ri));
        ei = _mm256_fmadd_pd(ner, ri, _mm256_mul_pd(nei, rr));
        _mm256_storeu_pd(b.ce_re + k, er);
        _mm256_storeu_pd(b.ce_im + k, ei);

        const __m256d w = _mm256_loadu_pd(b.weight + k);
        const __m256d xr = _mm256_fmadd_pd(er, ngr, _mm256_mul_pd(ei, ngi));
        const __m256d xi = _mm256_fmsub_pd(ei, ngr, _mm256_mul_pd(er, ngi));
        acc_re = _mm256_fmadd_pd(w, xr, acc_re);
        acc_im = _mm256_fmadd_pd(w, xi, acc_im);
    }

    Polarization pol{hsum(acc_re), hsum(acc_im)};
    if (k < b.n) {
        ClassBlock tail = b;
        tail.cg_re += k;
        tail.cg_im += k;
        tail.cs_re += k;
        tail.cs_im += k;
        tail.ce_re += k;
        tail.ce_im += k;
        tail.rot_re += k;
        tail.rot_im += k;
        tail.weight += k;
        tail.n = b.n - k;
        const Polarization rest = cell_step_scalar(tail, c);
        pol.re += rest.re;
        pol.im += rest.im;
    }
    return pol;
}

} // namespace pra::kernels
