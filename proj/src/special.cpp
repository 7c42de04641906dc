#include "qtm/special.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>

namespace qtm {

namespace {

// B_2, B_4, ..., B_20
constexpr std::array<double, 10> kB2j = {1.0 / 6.0,         -1.0 / 30.0,      1.0 / 42.0,
                                         -1.0 / 30.0,       5.0 / 66.0,       -691.0 / 2730.0,
                                         7.0 / 6.0,         -3617.0 / 510.0,  43867.0 / 798.0,
                                         -174611.0 / 330.0};

cplx log_gamma_stirling(cplx z) {
    const cplx zi = 1.0 / z, zi2 = zi * zi;
    cplx corr = 0, zp = zi;
    for (int j = 1; j <= 10; ++j) {
        corr += kB2j[j - 1] / double(2 * j * (2 * j - 1)) * zp;
        zp *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + corr;
}

bool near_nonpositive_integer(cplx z) {
    return z.real() <= 0.5 && std::abs(z.imag()) < 1e-14 && std::abs(z.real() - std::round(z.real())) < 1e-14;
}

}  // namespace

cplx log_gamma(cplx z) {
    if (near_nonpositive_integer(z)) throw DomainError("log_gamma: pole");
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        return std::log(kPi) - std::log(std::sin(kPi * z)) - log_gamma(1.0 - z);
    }
    cplx shift = 0;
    while (z.real() < 15.0) {
        shift += std::log(z);
        z += 1.0;
    }
    return log_gamma_stirling(z) - shift;
}

cplx zeta(cplx s, int N) {
    if (std::abs(s - 1.0) < 1e-300) throw DomainError("zeta: pole at s = 1");
    if (s.real() < 0.0) {
        // zeta(s) = 2^s pi^{s-1} sin(pi s / 2) Gamma(1-s) zeta(1-s)
        const cplx lg = log_gamma(1.0 - s);
        return std::exp(s * std::log(2.0) + (s - 1.0) * std::log(kPi) + lg) * std::sin(0.5 * kPi * s) *
               zeta(1.0 - s, N);
    }
    N = std::max<int>(N, int(std::ceil(std::abs(s))) + 10);
    cplx sum = 0;
    for (int n = N - 1; n >= 1; --n) sum += std::exp(-s * std::log(double(n)));
    const double lN = std::log(double(N));
    const cplx Ns = std::exp(-s * lN);
    sum += Ns * double(N) / (s - 1.0) + 0.5 * Ns;
    // sum_j B_2j/(2j)! (s)_{2j-1} N^{-s-2j+1}
    cplx rising = s;  // (s)_1
    cplx Npow = Ns / double(N);
    double fact = 2.0;  // (2j)!
    for (int j = 1; j <= 10; ++j) {
        sum += kB2j[j - 1] / fact * rising * Npow;
        rising *= (s + double(2 * j - 1)) * (s + double(2 * j));
        Npow /= double(N) * double(N);
        fact *= double(2 * j + 1) * double(2 * j + 2);
    }
    return sum;
}

cplx zeta2(cplx s) { return zeta(s) * (1.0 - std::exp(-s * std::log(2.0))); }

cplx g_factor(cplx s, const ShiftTriple& sh) {
    cplx acc = 1.5 * s * std::log(8.0 / kPi);
    for (int i = 0; i < 3; ++i) acc += log_gamma(0.5 * (0.5 + sh[i] + s)) - log_gamma(0.5 * (0.5 + sh[i]));
    return std::exp(acc);
}

cplx gamma_ratio_shift(cplx a) {
    return std::exp(-a * std::log(8.0 / kPi) + log_gamma(0.5 * (0.5 - a)) - log_gamma(0.5 * (0.5 + a)));
}

ContourSpec ContourSpec::defaults(const AFEWeightG& g, double c) {
    ContourSpec cs;
    cs.real_part = c;
    cs.im_cutoff = g.kind == AFEWeightG::Kind::gaussian ? std::max(10.0, std::sqrt(c * c + 45.0)) : 40.0;
    cs.step = 0.1;
    return cs;
}

QuadratureResult vertical_line_integral(const std::function<cplx(cplx)>& f, const ContourSpec& c, double tol,
                                        int max_halvings) {
    if (c.step <= 0) throw DomainError("contour step must be positive");
    double h = c.step;
    // level-0 sum, then add odd nodes at each halving
    // |f| is summed alongside f: cancellation from large integrands sets a
    // rounding floor that no amount of halving can beat
    double mag = 0;
    auto node_sum = [&](double start, double stride) {
        cplx acc = 0;
        const int J = int(std::floor((c.im_cutoff - start) / stride + 1e-12));
        for (int j = 0; j <= J; ++j) {
            const double t = start + stride * j;
            const cplx a = f(cplx(c.real_part, t));
            acc += a;
            mag += std::abs(a);
            if (t != 0.0) {
                const cplx b = f(cplx(c.real_part, -t));
                acc += b;
                mag += std::abs(b);
            }
        }
        return acc;
    };
    cplx raw = node_sum(0.0, h);
    cplx prev = raw * h / (2.0 * kPi);
    for (int k = 0; k < max_halvings; ++k) {
        raw += node_sum(0.5 * h, h);
        h *= 0.5;
        const cplx cur = raw * h / (2.0 * kPi);
        const double diff = std::abs(cur - prev);
        const double floor = 64.0 * 2.2e-16 * mag * h / (2.0 * kPi);
        if (diff < tol * std::max(1.0, std::abs(cur)) + floor) return {cur, std::max(diff, floor)};
        prev = cur;
    }
    throw ConvergenceError("vertical_line_integral: step halving did not converge");
}

cplx v_weight(double x, const ShiftTriple& shifts, const AFEWeightG& g, const ContourSpec& contour, double* err) {
    if (!(x > 0)) throw DomainError("v_weight: x must be positive");
    if (contour.real_part <= 0 || contour.real_part > 3) throw DomainError("v_weight: contour must have 0 < c <= 3");
    const double lx = std::log(x);
    auto f = [&](cplx s) { return g(s) / s * g_factor(s, shifts) * std::exp(-s * lx); };
    auto r = vertical_line_integral(f, contour);
    if (err) *err = r.error_estimate;
    return r.value;
}

InverseMellinTable::InverseMellinTable(const std::function<cplx(cplx)>& kernel, double u_min, double u_max,
                                       double du, double c_right, double c_left, double im_cutoff, double step)
    : u0_(u_min), du_(du) {
    const int n = int(std::ceil((u_max - u_min) / du)) + 1;
    vals_.assign(n, 0.0);
    ders_.assign(n, 0.0);
    const int J = int(std::floor(im_cutoff / step));
    // first grid index with u >= 0 uses the right line
    int split = 0;
    while (split < n && u0_ + du_ * split < 0.0) ++split;

    auto sweep = [&](double c, int i_begin, int i_end) {
        if (i_begin >= i_end) return;
        for (int j = -J; j <= J; ++j) {
            const cplx s(c, step * j);
            const cplx k = kernel(s) * (step / (2.0 * kPi));
            const cplx ratio = std::exp(-du_ * s);
            cplx e;
            for (int i = i_begin; i < i_end; ++i) {
                if ((i - i_begin) % 256 == 0) e = std::exp(-(u0_ + du_ * i) * s);
                vals_[i] += k * e;
                ders_[i] -= k * s * e;
                e *= ratio;
            }
        }
    };
    sweep(c_right, split, n);
    sweep(-c_left, 0, split);
    for (int i = 0; i < split; ++i) vals_[i] += 1.0;  // residue at s = 0
    rv_.resize(n);
    rd_.resize(n);
    for (int i = 0; i < n; ++i) {
        rv_[i] = vals_[i].real();
        rd_[i] = du_ * ders_[i].real();
    }
}

cplx InverseMellinTable::operator()(double u) const {
    const double pos = (u - u0_) / du_;
    if (pos < 0) throw DomainError("InverseMellinTable: argument below table range");
    const int n = int(vals_.size());
    if (pos >= n - 1) {
        if (pos > n - 1 + 1e-9) throw DomainError("InverseMellinTable: argument above table range");
        return vals_[n - 1];
    }
    const int i = int(pos);
    const double t = pos - i, t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * vals_[i] + h10 * du_ * ders_[i] + h01 * vals_[i + 1] + h11 * du_ * ders_[i + 1];
}

namespace {

double left_line(double min_re_shift) {
    const double pole = 0.5 + min_re_shift;  // nearest gamma pole sits at s = -pole
    if (pole <= 0.05) throw DomainError("shift too negative for the left contour");
    return 0.5 * pole;
}

}  // namespace

InverseMellinTable make_v_table(const ShiftTriple& shifts, const AFEWeightG& g, double u_min, double u_max) {
    double mre = std::min({shifts.alpha.real(), shifts.beta.real(), shifts.gamma.real()});
    const double cl = left_line(mre);
    const double step = std::min(0.05, 2.0 * kPi * cl / 40.0);
    const double T = g.kind == AFEWeightG::Kind::gaussian ? 9.0 : 40.0;
    std::array<cplx, 3> base;
    for (int i = 0; i < 3; ++i) base[i] = log_gamma(0.5 * (0.5 + shifts[i]));
    const double l8 = std::log(8.0 / kPi);
    auto kernel = [&](cplx s) {
        cplx acc = 1.5 * s * l8;
        for (int i = 0; i < 3; ++i) acc += log_gamma(0.5 * (0.5 + shifts[i] + s)) - base[i];
        return g(s) / s * std::exp(acc);
    };
    return InverseMellinTable(kernel, u_min, u_max, 0.002, 1.0, cl, T, step);
}

InverseMellinTable make_single_w_table(cplx shift, const AFEWeightG& g, double u_min, double u_max) {
    const double cl = left_line(shift.real());
    const double step = std::min(0.05, 2.0 * kPi * cl / 40.0);
    const double T = g.kind == AFEWeightG::Kind::gaussian ? 9.0 : 130.0;
    const cplx base = log_gamma(0.5 * (0.5 + shift));
    auto kernel = [&](cplx s) { return g(s) / s * std::exp(log_gamma(0.5 * (0.5 + shift + s)) - base); };
    return InverseMellinTable(kernel, u_min, u_max, 0.002, 1.0, cl, T, step);
}

SmoothWeight::SmoothWeight(double X, int log2_nodes) : X_(X) {
    if (!(X > 0)) throw DomainError("SmoothWeight: X must be positive");
    const int N = 1 << log2_nodes;
    const double h = 1.0 / N, L = 2.5 * X;
    for (int i = 1; i < N; ++i) {
        const double t = i * h;
        const double f = std::exp(-1.0 / (t * (1.0 - t)));
        if (f == 0.0) continue;
        const double x = 0.5 * X + L * t;
        x_.push_back(x);
        logx_.push_back(std::log(x));
        wF_.push_back(L * h * f);
    }
    for (double v : wF_) mellin1_ += v;
}

double SmoothWeight::operator()(double x) const {
    const double t = (x - 0.5 * X_) / (2.5 * X_);
    if (t <= 0.0 || t >= 1.0) return 0.0;
    return std::exp(-1.0 / (t * (1.0 - t)));
}

cplx SmoothWeight::mellin(cplx w) const {
    const cplx e = w - 1.0;
    cplx acc = 0;
    for (size_t i = 0; i < wF_.size(); ++i) acc += wF_[i] * std::exp(e * logx_[i]);
    return acc;
}

double SmoothWeight::cs_transform(double y) const {
    double acc = 0;
    for (size_t i = 0; i < wF_.size(); ++i) {
        const double th = 2.0 * kPi * x_[i] * y;
        acc += wF_[i] * (std::cos(th) + std::sin(th));
    }
    return acc;
}

cplx archimedean_lhs(cplx u) {
    const cplx cs = std::cos(0.5 * kPi * u) + std::sin(0.5 * kPi * u);
    return (std::exp((1.0 - 2.0 * u) * std::log(2.0)) - 1.0) * cs * std::exp(-u * std::log(kPi) + log_gamma(u));
}

cplx archimedean_rhs(cplx u) { return 2.0 * gamma_ratio_shift(u) * zeta2(1.0 - 2.0 * u) / zeta(2.0 * u); }

double archimedean_identity_gap(cplx u) {
    auto near = [](cplx a, cplx b) { return std::abs(a - b) < 1e-3; };
    for (int m = 0; m <= 60; ++m)
        if (near(u, cplx(-m, 0))) throw DomainError("archimedean_identity_gap: near a pole of Gamma(u)");
    if (near(u, 0.5)) throw DomainError("archimedean_identity_gap: u = 1/2");
    if (std::abs(zeta(2.0 * u)) < 1e-3) throw DomainError("archimedean_identity_gap: near a zero of zeta(2u)");
    const cplx l = archimedean_lhs(u), r = archimedean_rhs(u);
    return std::abs(l - r) / (std::abs(l) + std::abs(r));
}

ArchimedeanSweep archimedean_sweep(int samples, std::uint64_t seed) {
    ArchimedeanSweep r;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> re(0.1, 2.0), im(-10.0, 10.0);
    auto take = [&](cplx u) {
        try {
            const double g = archimedean_identity_gap(u);
            ++r.samples;
            if (!(g <= r.max_gap)) r.max_gap = g, r.worst = u;
            return true;
        } catch (const DomainError&) {
            ++r.skipped;
            return false;
        }
    };
    take(1.0);
    for (int got = 0; got < samples;)
        if (take({re(rng), im(rng)})) ++got;
    return r;
}

}  // namespace qtm
