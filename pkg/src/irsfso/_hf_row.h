/* Row kernel of the diffraction sum: per-sample terms without branches so
 * the compiler can vectorise the loop. */
#ifndef IRSFSO_HF_ROW_H
#define IRSFSO_HF_ROW_H

#include <math.h>
#include <stddef.h>

/* pi/2 = P1 + P2 + P3 + P4; P1..P3 carry 26 significant bits, so n * Pi
 * is exact for |n| < 2^27. */
#define HF_PIO2_1 1.5707963407039642e+00
#define HF_PIO2_2 (-1.3909067675399456e-08)
#define HF_PIO2_3 6.123233932053594e-17
#define HF_PIO2_4 6.36831716351095e-25
#define HF_TWO_OVER_PI 0.63661977236758134308

/* sin and cos for |ph| < 1e8: four-part reduction by pi/2, Taylor
 * polynomials on [-pi/4, pi/4], quadrant chosen by arithmetic blends. */
static inline void hf_sincos(double ph, double *s, double *c)
{
    double n = floor(ph * HF_TWO_OVER_PI + 0.5);
    double r = (((ph - n * HF_PIO2_1) - n * HF_PIO2_2) - n * HF_PIO2_3) - n * HF_PIO2_4;
    double r2 = r * r;
    double ps = r * (1.0 + r2 * (-1.6666666666666666e-01 + r2 * (8.3333333333333332e-03
                + r2 * (-1.9841269841269841e-04 + r2 * (2.7557319223985893e-06
                + r2 * (-2.5052108385441720e-08 + r2 * (1.6059043836821613e-10
                + r2 * (-7.6471637318198164e-13))))))));
    double pc = 1.0 + r2 * (-0.5 + r2 * (4.1666666666666664e-02 + r2 * (-1.3888888888888889e-03
                + r2 * (2.4801587301587302e-05 + r2 * (-2.7557319223985888e-07
                + r2 * (2.0876756987868100e-09 + r2 * (-1.1470745597729725e-11)))))));
    double q = n - 4.0 * floor(0.25 * n);            /* 0..3 */
    double odd = q - 2.0 * floor(0.5 * q);           /* 1 for q = 1, 3 */
    double sgn_s = 1.0 - 2.0 * floor(0.5 * q);       /* -1 for q = 2, 3 */
    double q1 = q + 1.0;
    double sgn_c = 1.0 - 2.0 * (floor(0.5 * q1) - 2.0 * floor(0.25 * q1)); /* -1 for q = 1, 2 */
    *s = sgn_s * (odd * pc + (1.0 - odd) * ps);
    *c = sgn_c * (odd * ps + (1.0 - odd) * pc);
}

/* Terms A[j] exp(j k (|r_op| - d_p)) z_p / |r_op|^2 of one IRS row, exact
 * distance. `a` holds interleaved (re, im) pairs. */
static void hf_row_exact(const double *restrict a, const double *restrict ys, ptrdiff_t ny,
                         double x, double xp, double yp, double zp, double dp, double k,
                         double *restrict tr, double *restrict ti)
{
    double dx = x - xp;
    double base = dx * dx + zp * zp;
    double xx = x * x - 2.0 * x * xp;
    for (ptrdiff_t j = 0; j < ny; ++j) {
        double y = ys[j];
        double dy = y - yp;
        double r2 = base + dy * dy;
        double rop = sqrt(r2);
        double delta = (xx + y * y - 2.0 * y * yp) / (rop + dp);
        double amp = zp / r2;
        double s, c;
        hf_sincos(k * delta, &s, &c);
        double re = a[2 * j], im = a[2 * j + 1];
        tr[j] = (re * c - im * s) * amp;
        ti[j] = (re * s + im * c) * amp;
    }
}

/* Same with the second-order expansion of |r_op| about d_p. */
static void hf_row_expanded(const double *restrict a, const double *restrict ys, ptrdiff_t ny,
                            double x, double xp, double yp, double zp, double dp, double k,
                            double *restrict tr, double *restrict ti)
{
    double inv_dp = 1.0 / dp;
    double amp = zp * inv_dp * inv_dp;
    for (ptrdiff_t j = 0; j < ny; ++j) {
        double y = ys[j];
        double sp = x * xp + y * yp;
        double delta = (0.5 * (x * x + y * y) - sp - 0.5 * sp * sp * inv_dp * inv_dp) * inv_dp;
        double s, c;
        hf_sincos(k * delta, &s, &c);
        double re = a[2 * j], im = a[2 * j + 1];
        tr[j] = (re * c - im * s) * amp;
        ti[j] = (re * s + im * c) * amp;
    }
}

#endif
