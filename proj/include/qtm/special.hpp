#pragma once

#include <functional>
#include <vector>

#include "qtm/common.hpp"

namespace qtm {

cplx log_gamma(cplx z);
inline cplx gamma_fn(cplx z) { return std::exp(log_gamma(z)); }

// Euler-Maclaurin with N leading terms (raised for large |s|) and Bernoulli
// corrections through B_20; reflection for Re s < 0.
cplx zeta(cplx s, int N = 50);
cplx zeta2(cplx s);

// (8/pi)^{3s/2} prod_lambda Gamma((1/2+lambda+s)/2) / Gamma((1/2+lambda)/2)
cplx g_factor(cplx s, const ShiftTriple& shifts);
// (8/pi)^{-a} Gamma((1/2-a)/2) / Gamma((1/2+a)/2)
cplx gamma_ratio_shift(cplx a);

struct AFEWeightG {
    enum class Kind { constant_one, gaussian };
    Kind kind = Kind::gaussian;
    cplx operator()(cplx s) const { return kind == Kind::gaussian ? std::exp(s * s) : cplx(1.0); }
    static AFEWeightG one() { return {Kind::constant_one}; }
    static AFEWeightG gaussian() { return {Kind::gaussian}; }
};

struct ContourSpec {
    double real_part = 1.0;
    double im_cutoff = 40.0;
    double step = 0.1;
    static ContourSpec defaults(const AFEWeightG& g, double c = 1.0);
};

struct QuadratureResult {
    cplx value;
    double error_estimate;
};

// (1/2 pi i) int_{(c)} f(s) ds by trapezoid on |Im s| <= T with step halving.
QuadratureResult vertical_line_integral(const std::function<cplx(cplx)>& f, const ContourSpec& c,
                                        double tol = 1e-10, int max_halvings = 8);

// V_{a,b,c}(x) of the triple approximate functional equation.
cplx v_weight(double x, const ShiftTriple& shifts, const AFEWeightG& g, const ContourSpec& contour,
              double* err = nullptr);

// Inverse Mellin transform f(u) = (1/2 pi i) int K(s) e^{-u s} ds of a kernel with
// a simple pole of residue 1 at s = 0, tabulated on a uniform u-grid and
// interpolated by cubic Hermite. Right line for u >= 0, left line plus residue
// for u < 0.
class InverseMellinTable {
public:
    InverseMellinTable() = default;
    InverseMellinTable(const std::function<cplx(cplx)>& kernel, double u_min, double u_max, double du,
                       double c_right, double c_left, double im_cutoff, double step);

    cplx operator()(double u) const;
    // real part only; for kernels that are real on the real axis
    double real_at(double u) const {
        double pos = (u - u0_) / du_;
        if (pos < 0) pos = 0;
        int i = int(pos);
        if (i >= int(rv_.size()) - 1) return rv_.back();
        const double t = pos - i, t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * rv_[i] + (t3 - 2 * t2 + t) * rd_[i] + (-2 * t3 + 3 * t2) * rv_[i + 1] +
               (t3 - t2) * rd_[i + 1];
    }
    double u_min() const { return u0_; }
    double u_max() const { return u0_ + du_ * double(vals_.size() - 1); }

private:
    double u0_ = 0, du_ = 1;
    std::vector<cplx> vals_, ders_;
    std::vector<double> rv_, rd_;  // real parts, derivatives pre-scaled by du
};

// Table of V_{shifts}(e^u) for the triple sum.
InverseMellinTable make_v_table(const ShiftTriple& shifts, const AFEWeightG& g, double u_min, double u_max);
// Table of W_u(e^v) = (1/2 pi i) int G(s)/s Gamma((1/2+u+s)/2)/Gamma((1/2+u)/2) e^{-v s} ds.
InverseMellinTable make_single_w_table(cplx shift, const AFEWeightG& g, double u_min, double u_max);

// Bump F(x) = exp(-1/(t(1-t))), t = (x - X/2)/(5X/2), supported on [X/2, 3X].
class SmoothWeight {
public:
    explicit SmoothWeight(double X, int log2_nodes = 14);

    double X() const { return X_; }
    double lo() const { return 0.5 * X_; }
    double hi() const { return 3.0 * X_; }
    double operator()(double x) const;
    cplx mellin(cplx w) const;        // int F(x) x^{w-1} dx
    double cs_transform(double y) const;  // int (cos + sin)(2 pi x y) F(x) dx
    double mellin1() const { return mellin1_; }

private:
    double X_;
    std::vector<double> logx_, wF_, x_;  // quadrature nodes and weights*F
    double mellin1_ = 0;
};

// |LHS - RHS| / (|LHS| + |RHS|) for the archimedean identity.
double archimedean_identity_gap(cplx u);
cplx archimedean_lhs(cplx u);
cplx archimedean_rhs(cplx u);

struct ArchimedeanSweep {
    int samples = 0;
    int skipped = 0;  // draws rejected near poles
    double max_gap = 0;
    cplx worst;
};
// Uniform u in 0.1 <= Re u <= 2, |Im u| <= 10, plus the point u = 1.
ArchimedeanSweep archimedean_sweep(int samples, std::uint64_t seed = 1);

}  // namespace qtm
