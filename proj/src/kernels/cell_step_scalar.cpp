#include "pra/kernels.hpp"

#include <cmath>

namespace pra::kernels {

Coupling make_coupling(double e_re, double e_im, double w_re, double w_im, double h)
{
    Coupling c;
    const double r = std::sqrt(e_re * e_re + e_im * e_im + w_re * w_re + w_im * w_im);
    if (r == 0.0)
        return c;
    const double chi = 0.5 * r * h;
    const double s_half = std::sin(0.5 * chi);
    c.cos_chi = std::cos(chi);
    c.cos_m1 = -2.0 * s_half * s_half;
    c.sin_chi = std::sin(chi);
    c.ug_re = e_re / r;
    c.ug_im = -e_im / r;
    c.us_re = w_re / r;
    c.us_im = w_im / r;
    return c;
}

Polarization cell_step_scalar(const ClassBlock& b, const Coupling& c)
{
    Polarization pol;
    for (std::size_t k = 0; k < b.n; ++k) {
        const double rr = b.rot_re[k], ri = b.rot_im[k];
        // half rotation of c_e
        double er = b.ce_re[k] * rr - b.ce_im[k] * ri;
        double ei = b.ce_re[k] * ri + b.ce_im[k] * rr;
        const double gr = b.cg_re[k], gi = b.cg_im[k];
        const double sr = b.cs_re[k], si = b.cs_im[k];
        // p = conj(u_g) c_g + conj(u_s) c_s
        const double pr = c.ug_re * gr + c.ug_im * gi + c.us_re * sr + c.us_im * si;
        const double pi = c.ug_re * gi - c.ug_im * gr + c.us_re * si - c.us_im * sr;
        // t = (cos - 1) p + i sin c_e
        const double tr = c.cos_m1 * pr - c.sin_chi * ei;
        const double ti = c.cos_m1 * pi + c.sin_chi * er;
        const double ner = c.cos_chi * er - c.sin_chi * pi;
        const double nei = c.cos_chi * ei + c.sin_chi * pr;
        const double ngr = gr + c.ug_re * tr - c.ug_im * ti;
        const double ngi = gi + c.ug_re * ti + c.ug_im * tr;
        b.cs_re[k] = sr + c.us_re * tr - c.us_im * ti;
        b.cs_im[k] = si + c.us_re * ti + c.us_im * tr;
        b.cg_re[k] = ngr;
        b.cg_im[k] = ngi;
        // second half rotation
        er = ner * rr - nei * ri;
        ei = ner * ri + nei * rr;
        b.ce_re[k] = er;
        b.ce_im[k] = ei;
        // w c_e conj(c_g)
        const double w = b.weight[k];
        pol.re += w * (er * ngr + ei * ngi);
        pol.im += w * (ei * ngr - er * ngi);
    }
    return pol;
}

} // namespace pra::kernels
