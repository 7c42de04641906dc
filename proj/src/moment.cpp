#include "qtm/moment.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/distributions/students_t.hpp>

#include "qtm/gauss.hpp"
#include "qtm/mainterm.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qtm {

const char* lmethod_name(LMethod m) { return m == LMethod::single_afe ? "single_afe" : "triple_afe"; }

void require_odd_squarefree(std::uint64_t d) {
    if (d == 0 || d % 2 == 0) throw DomainError("d must be odd and positive");
    if (mobius(d) == 0) throw DomainError("d must be squarefree");
}

namespace {
void fill_chi(const SquarefreeSieve& sv, std::uint64_t d, std::uint64_t N, std::vector<std::int8_t>& chi) {
    chi.assign(N + 1, 0);
    if (N >= 1) chi[1] = 1;
    const std::int64_t a = 8 * static_cast<std::int64_t>(d);
    for (std::uint64_t n = 3; n <= N; n += 2) {
        const std::uint64_t p = sv.least_prime_factor(n);
        chi[n] = (p == n) ? static_cast<std::int8_t>(kronecker(a, static_cast<std::int64_t>(p)))
                          : static_cast<std::int8_t>(chi[p] * chi[n / p]);
    }
}
}  // namespace

void fill_chi8d(std::uint64_t d, std::uint64_t N, std::vector<std::int8_t>& chi) {
    fill_chi(default_sieve(static_cast<std::uint32_t>(std::max<std::uint64_t>(N + 1, 1000))), d, N, chi);
}

// ---------------------------------------------------------------- single AFE

SingleAFE::SingleAFE(cplx shift, const AFEWeightG& g, std::uint64_t d_max, double trunc)
    : shift_(shift), d_max_(d_max), trunc_(trunc), center_(shift == cplx(0.0)) {
    if (std::abs(shift) > 0.1 + 1e-12) throw DomainError("SingleAFE: |shift| must be <= 0.1");
    if (!(trunc > 0)) throw DomainError("SingleAFE: truncation must be positive");
    const double umin = -0.5 * std::log(8.0 * double(std::max<std::uint64_t>(d_max, 1)) / kPi) - 0.01;
    const double umax = std::log(2.0 * trunc) + 0.01;
    wp_ = make_single_w_table(shift, g, umin, umax);
    if (!center_) wm_ = make_single_w_table(-shift, g, umin, umax);
    gamma_ratio_ = gamma_ratio_shift(shift);
}

cplx SingleAFE::evaluate(std::uint64_t d, double trunc, std::vector<std::int8_t>& chi) const {
    require_odd_squarefree(d);
    if (d > d_max_) throw DomainError("SingleAFE: d exceeds the table range");
    if (trunc > 2.0 * trunc_ + 1e-12) throw DomainError("SingleAFE: truncation beyond table range");
    const double c = std::sqrt(8.0 * double(d) / kPi);
    const auto N = static_cast<std::uint64_t>(trunc * c);
    fill_chi8d(d, N, chi);
    const double logc = std::log(c);
    if (center_) {
        double acc = 0;
        for (std::uint64_t n = 1; n <= N; n += 2) {
            if (!chi[n]) continue;
            const double ln = std::log(double(n));
            acc += chi[n] * std::exp(-0.5 * ln) * wp_.real_at(ln - logc);
        }
        return 2.0 * acc;
    }
    cplx a1 = 0, a2 = 0;
    for (std::uint64_t n = 1; n <= N; n += 2) {
        if (!chi[n]) continue;
        const double ln = std::log(double(n));
        const double v = ln - logc;
        a1 += double(chi[n]) * std::exp(-(0.5 + shift_) * ln) * wp_(v);
        a2 += double(chi[n]) * std::exp(-(0.5 - shift_) * ln) * wm_(v);
    }
    return a1 + gamma_ratio_ * std::exp(-shift_ * std::log(double(d))) * a2;
}

cplx SingleAFE::operator()(std::uint64_t d) const {
    std::vector<std::int8_t> chi;
    return evaluate(d, trunc_, chi);
}

LValueRecord lvalue_single(std::uint64_t d, cplx shift, const AFEWeightG& g, double trunc) {
    require_odd_squarefree(d);
    SingleAFE afe(shift, g, d, trunc);
    std::vector<std::int8_t> chi;
    LValueRecord r;
    r.d = d;
    r.shift = shift;
    r.method = LMethod::single_afe;
    r.value = afe.evaluate(d, trunc, chi);
    r.error_bound = std::abs(afe.evaluate(d, 2.0 * trunc, chi) - r.value);
    return r;
}

// ---------------------------------------------------------------- triple AFE

namespace {

template <class T>
T to_scalar(cplx v);
template <>
double to_scalar<double>(cplx v) { return v.real(); }
template <>
cplx to_scalar<cplx>(cplx v) { return v; }

template <class T>
T table_at(const InverseMellinTable& t, double u);
template <>
double table_at<double>(const InverseMellinTable& t, double u) { return t.real_at(u); }
template <>
cplx table_at<cplx>(const InverseMellinTable& t, double u) { return t(u); }

template <class T>
T exp_scalar(T a) { return std::exp(a); }

template <class T>
std::pair<T, T> triple_sums(std::uint64_t d, const ShiftTriple& sh, std::uint64_t N, const InverseMellinTable& vp,
                            const InverseMellinTable& vm, bool parallel) {
    const auto root = static_cast<std::uint64_t>(std::sqrt(double(N))) + 1;
    const auto& sv = default_sieve(static_cast<std::uint32_t>(std::max<std::uint64_t>(root + 1, 1000)));
    std::vector<std::uint32_t> primes;
    for (auto p : sv.primes()) {
        if (p > root) break;
        if (p != 2) primes.push_back(p);
    }
    // sigma_{+-}(p^k) tables
    const ShiftTriple neg = sh.negated();
    std::vector<std::vector<T>> tp(primes.size()), tm(primes.size());
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const double lp = std::log(double(primes[i]));
        std::uint64_t pk = 1;
        for (int k = 0; pk <= N; ++k) {
            tp[i].push_back(to_scalar<T>(sigma_prime_power(lp, k, sh)));
            tm[i].push_back(to_scalar<T>(sigma_prime_power(lp, k, neg)));
            if (pk > N / primes[i]) break;
            pk *= primes[i];
        }
    }
    // chi_{8d} is periodic mod 8d
    const std::uint64_t mod = 8 * d;
    std::vector<std::int8_t> chi_tab(mod, 0);
    for (std::uint64_t r = 1; r < mod; r += 2)
        chi_tab[r] = static_cast<std::int8_t>(kronecker(static_cast<std::int64_t>(mod), static_cast<std::int64_t>(r)));

    const T la = to_scalar<T>(sh.alpha), lb = to_scalar<T>(sh.beta), lg = to_scalar<T>(sh.gamma);
    const double logd15 = 1.5 * std::log(double(d));
    constexpr std::uint64_t S = 1u << 15;  // odd numbers per segment
    const std::uint64_t n_odd = (N + 1) / 2;
    const std::uint64_t nseg = (n_odd + S - 1) / S;
    std::vector<T> part_p(nseg, T(0)), part_m(nseg, T(0));

#pragma omp parallel if (parallel)
    {
        std::vector<std::uint64_t> rem(S);
        std::vector<T> sp(S), sm(S);
#pragma omp for schedule(static)
        for (std::uint64_t s = 0; s < nseg; ++s) {
            const std::uint64_t lo = 2 * s * S + 1;  // first odd n of the segment
            const std::uint64_t cnt = std::min<std::uint64_t>(S, n_odd - s * S);
            const std::uint64_t hi = lo + 2 * (cnt - 1);
            for (std::uint64_t i = 0; i < cnt; ++i) {
                rem[i] = lo + 2 * i;
                sp[i] = T(1);
                sm[i] = T(1);
            }
            for (std::size_t j = 0; j < primes.size(); ++j) {
                const std::uint64_t p = primes[j];
                if (p > hi) break;
                std::uint64_t m0 = (lo + p - 1) / p * p;
                if (m0 % 2 == 0) m0 += p;
                for (std::uint64_t m = m0; m <= hi; m += 2 * p) {
                    const std::uint64_t i = (m - lo) / 2;
                    int k = 0;
                    while (rem[i] % p == 0) rem[i] /= p, ++k;
                    sp[i] *= tp[j][k];
                    sm[i] *= tm[j][k];
                }
            }
            T accp = T(0), accm = T(0);
            std::uint64_t r = lo % mod;
            for (std::uint64_t i = 0; i < cnt; ++i, r += 2) {
                if (r >= mod) r -= mod;
                const int c = chi_tab[r];
                if (!c) continue;
                const double n = double(lo + 2 * i);
                if (rem[i] > 1) {
                    const T lq = T(std::log(double(rem[i])));
                    const T xa = exp_scalar<T>(-la * lq), xb = exp_scalar<T>(-lb * lq), xg = exp_scalar<T>(-lg * lq);
                    sp[i] *= xa + xb + xg;
                    sm[i] *= T(1) / xa + T(1) / xb + T(1) / xg;
                }
                const double ln = std::log(n);
                const double w = double(c) / std::sqrt(n);
                const double v = ln - logd15;
                accp += w * sp[i] * table_at<T>(vp, v);
                accm += w * sm[i] * table_at<T>(vm, v);
            }
            part_p[s] = accp;
            part_m[s] = accm;
        }
    }
    T P = T(0), M = T(0);
    for (std::uint64_t s = 0; s < nseg; ++s) P += part_p[s], M += part_m[s];
    return {P, M};
}

}  // namespace

TripleAFEResult triple_product_afe_detail(std::uint64_t d, const ShiftTriple& shifts, const AFEWeightG& g,
                                          bool parallel) {
    require_odd_squarefree(d);
    for (int i = 0; i < 3; ++i)
        if (std::abs(shifts[i]) > 0.1 + 1e-12) throw DomainError("triple_product_afe: |shift| must be <= 0.1");
    const bool gauss = g.kind == AFEWeightG::Kind::gaussian;
    const double umin = -1.5 * std::log(double(d)) - 0.01;
    const double umax = gauss ? 15.0 : 6.0;
    const auto vp = make_v_table(shifts, g, umin, umax);
    const auto vm = make_v_table(shifts.negated(), g, umin, umax);
    const cplx gam = gamma_ratio_shift(shifts.alpha) * gamma_ratio_shift(shifts.beta) * gamma_ratio_shift(shifts.gamma);
    const cplx dpow = std::exp(-(shifts.alpha + shifts.beta + shifts.gamma) * std::log(double(d)));
    // truncate where both weights are below 1e-15
    double ucut = umax;
    const double scale_m = std::abs(gam * dpow);
    for (double u = umax; u > umin; u -= 0.01) {
        if (std::abs(vp(u)) > 1e-15 || scale_m * std::abs(vm(u)) > 1e-15) {
            ucut = u + 0.01;
            break;
        }
    }
    if (ucut > umax - 0.05) throw ConvergenceError("triple_product_afe: V weight does not decay within the table");
    TripleAFEResult r;
    r.v_cut = ucut;
    r.n_max = static_cast<std::uint64_t>(std::exp(ucut + 1.5 * std::log(double(d))));
    const bool real = shifts.alpha.imag() == 0 && shifts.beta.imag() == 0 && shifts.gamma.imag() == 0;
    cplx P, M;
    if (real) {
        auto [a, b] = triple_sums<double>(d, shifts, r.n_max, vp, vm, parallel);
        P = a, M = b;
    } else {
        auto [a, b] = triple_sums<cplx>(d, shifts, r.n_max, vp, vm, parallel);
        P = a, M = b;
    }
    r.value = P + gam * dpow * M;
    return r;
}

// ---------------------------------------------------------------- moment

MomentWeight MomentWeight::from(const SmoothWeight& F) {
    MomentWeight w;
    w.lo = F.lo();
    w.hi = F.hi();
    w.f = [F](double x) { return F(x); };
    return w;
}

void MomentConfig::validate() const {
    if (!(X >= 100)) throw DomainError("MomentConfig: X must be >= 100");
    if (workers < 1) throw DomainError("MomentConfig: workers must be >= 1");
    if (!(trunc > 0)) throw DomainError("MomentConfig: trunc must be positive");
    if (block == 0) throw DomainError("MomentConfig: block must be positive");
}

double pairwise_sum(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    std::vector<double> cur = v;
    while (cur.size() > 1) {
        std::vector<double> next((cur.size() + 1) / 2);
        for (std::size_t i = 0; i < next.size(); ++i)
            next[i] = (2 * i + 1 < cur.size()) ? cur[2 * i] + cur[2 * i + 1] : cur[2 * i];
        cur.swap(next);
    }
    return cur[0];
}

namespace {

// L(1/2, chi_{8d}) with G = 1, reusing log n and n^{-1/2} tables
class CentralKernel {
public:
    CentralKernel(std::uint64_t d_max, double trunc) : trunc_(trunc) {
        const double umin = -0.5 * std::log(8.0 * double(d_max) / kPi) - 0.01;
        w_ = make_single_w_table(0.0, AFEWeightG::one(), umin, std::log(trunc) + 0.01);
        const auto N = static_cast<std::uint64_t>(trunc * std::sqrt(8.0 * double(d_max) / kPi)) + 1;
        logn_.resize(N + 1);
        rsq_.resize(N + 1);
        for (std::uint64_t n = 1; n <= N; ++n) {
            logn_[n] = std::log(double(n));
            rsq_[n] = 1.0 / std::sqrt(double(n));
        }
        sieve_ = &default_sieve(static_cast<std::uint32_t>(std::max<std::uint64_t>(N + 1, 1000)));
    }

    double operator()(std::uint64_t d, std::vector<std::int8_t>& chi) const {
        const double c = std::sqrt(8.0 * double(d) / kPi);
        const auto N = static_cast<std::uint64_t>(trunc_ * c);
        fill_chi(*sieve_, d, N, chi);
        const double logc = std::log(c);
        double acc = 0;
        for (std::uint64_t n = 1; n <= N; n += 2)
            if (chi[n]) acc += chi[n] * rsq_[n] * w_.real_at(logn_[n] - logc);
        return 2.0 * acc;
    }

private:
    double trunc_;
    const SquarefreeSieve* sieve_ = nullptr;
    InverseMellinTable w_;
    std::vector<double> logn_, rsq_;
};

MomentSum moment_impl(const MomentConfig& cfg, const MomentWeight& w, bool parallel) {
    cfg.validate();
    MomentSum out;
    const auto lo = static_cast<std::uint64_t>(std::max(1.0, std::ceil(w.lo)));
    const auto hi = static_cast<std::uint64_t>(std::floor(w.hi));
    if (hi < lo) return out;
    const auto& sv = default_sieve(static_cast<std::uint32_t>(hi + 1));
    CentralKernel kern(hi, cfg.trunc);
    const std::uint64_t B = cfg.block;
    const std::uint64_t nb = (hi - lo + 1 + B - 1) / B;
    std::vector<double> sums(nb, 0.0);
    std::vector<std::uint64_t> counts(nb, 0);
#pragma omp parallel num_threads(cfg.workers) if (parallel)
    {
        std::vector<std::int8_t> chi;
#pragma omp for schedule(static)
        for (std::uint64_t b = 0; b < nb; ++b) {
            double acc = 0;
            std::uint64_t cnt = 0;
            const std::uint64_t d1 = lo + b * B, d2 = std::min(hi, d1 + B - 1);
            for (std::uint64_t d = d1; d <= d2; ++d) {
                if (d % 2 == 0 || sv.mobius(d) == 0) continue;
                const double f = w.f(double(d));
                if (f == 0.0) continue;
                const double L = kern(d, chi);
                acc += L * L * L * f;
                ++cnt;
            }
            sums[b] = acc;
            counts[b] = cnt;
        }
    }
    out.value = pairwise_sum(sums);
    for (auto c : counts) out.count += c;
    return out;
}

}  // namespace

MomentSum third_moment_empirical(const MomentConfig& cfg, const MomentWeight& w) { return moment_impl(cfg, w, true); }

MomentSum third_moment_empirical(const MomentConfig& cfg) {
    SmoothWeight F(cfg.X);
    return third_moment_empirical(cfg, MomentWeight::from(F));
}

MomentSum third_moment_serial(const MomentConfig& cfg, const MomentWeight& w) { return moment_impl(cfg, w, false); }

// ---------------------------------------------------------------- checks

PoissonResult poisson_check(std::uint64_t n, const SmoothWeight& F, int k_cutoff) {
    if (n == 0 || n % 2 == 0) throw DomainError("poisson_check: n must be odd and positive");
    PoissonResult r;
    r.ftilde1 = F.mellin1();
    const auto lo = static_cast<std::uint64_t>(std::ceil(F.lo()));
    const auto hi = static_cast<std::uint64_t>(std::floor(F.hi()));
    const auto nn = static_cast<std::int64_t>(n);
    for (std::uint64_t d = lo | 1; d <= hi; d += 2)
        r.lhs += kronecker(static_cast<std::int64_t>(d), nn) * F(double(d));
    const auto fn = factor_trial(n);
    auto term = [&](std::int64_t k) {
        const double g = gauss_formula(k, fn).to_double();
        const double sign = (k % 2) ? -1.0 : 1.0;
        return sign * g * F.cs_transform(double(k) / (2.0 * double(n)));
    };
    const double tiny = 1e-14 * r.ftilde1;
    double acc = term(0);
    int K = 0;
    if (k_cutoff >= 0) {
        for (int k = 1; k <= k_cutoff; ++k) acc += term(k) + term(-k);
        K = k_cutoff;
        const double last = std::max(std::abs(F.cs_transform(K / (2.0 * n))), std::abs(F.cs_transform(-K / (2.0 * n))));
        if (last > 1e-10 * r.ftilde1) throw ConvergenceError("poisson_check: k_cutoff too small for the tail");
    } else {
        int quiet = 0;
        for (int k = 1; k <= 100000 && quiet < 3; ++k) {
            const double a = F.cs_transform(k / (2.0 * n)), b = F.cs_transform(-k / (2.0 * n));
            acc += term(k) + term(-k);
            quiet = (std::abs(a) < tiny && std::abs(b) < tiny) ? quiet + 1 : 0;
            K = k;
        }
    }
    r.k_used = K;
    r.rhs = acc * kronecker(2, nn) / (2.0 * double(n));
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

namespace {
// sum_{m > M} (m + a)^{-s} by Euler-Maclaurin
cplx em_tail(cplx s, double a, double M) {
    const double x = M + a;
    auto xp = [&](cplx e) { return std::exp(-e * std::log(x)); };
    cplx t = xp(s - 1.0) / (s - 1.0) - 0.5 * xp(s) + s * xp(s + 1.0) / 12.0;
    t -= s * (s + 1.0) * (s + 2.0) * xp(s + 3.0) / 720.0;
    t += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * xp(s + 5.0) / 30240.0;
    return t;
}
}  // namespace

AlternatingResult alternating_sum_check(cplx z) {
    if (z.real() <= 1.0) throw DomainError("alternating_sum_check: Re z must exceed 1");
    AlternatingResult r;
    // Cohen-Villegas-Zagier on a_k = (k+1)^{-z}
    {
        const int n = 48;
        double dd = std::pow(3.0 + std::sqrt(8.0), n);
        dd = 0.5 * (dd + 1.0 / dd);
        double b = -1.0, c = -dd;
        cplx s = 0;
        for (int k = 0; k < n; ++k) {
            c = b - c;
            s += c * std::exp(-z * std::log(double(k + 1)));
            b = (double(k + n) * double(k - n) * b) / ((k + 0.5) * (k + 1.0));
        }
        r.lhs = -s / dd;  // sum_{k>=1} (-1)^k k^{-z}
    }
    const int J = 2000;
    cplx zeta2z = 0;
    for (int j = 1; j <= J; ++j) zeta2z += std::exp(-2.0 * z * std::log(double(j)));
    zeta2z += em_tail(2.0 * z, 0.0, J);
    // lambda(z) = sum_{j odd} j^{-z} = 2^{-z} sum_{m>=0} (m+1/2)^{-z}
    cplx lam = 0;
    for (int m = 0; m <= J; ++m) lam += std::exp(-z * std::log(m + 0.5));
    lam = (lam + em_tail(z, 0.5, J)) * std::exp(-z * std::log(2.0));
    // sum_{d odd} mu(d) d^{-2z}
    const std::uint32_t D = 400'000;
    const auto& sv = default_sieve(D + 1);
    cplx mob = 0;
    for (std::uint32_t d = 1; d <= D; d += 2) {
        const int mu = sv.mobius(d);
        if (mu) mob += double(mu) * std::exp(-2.0 * z * std::log(double(d)));
    }
    const cplx s_odd = mob * lam;  // squarefree odd k1
    const cplx two = std::exp(-z * std::log(2.0));
    r.rhs = (2.0 * two * two - 1.0) * zeta2z * s_odd + two * zeta2z * s_odd;
    r.gap = std::abs(r.lhs - r.rhs);
    return r;
}

OrthogonalityResult orthogonality_check(std::uint64_t m, const MomentConfig& cfg) {
    if (m == 0 || m % 2 == 0) throw DomainError("orthogonality_check: m must be odd");
    SmoothWeight F(cfg.X);
    OrthogonalityResult r;
    r.ftilde1 = F.mellin1();
    const auto lo = static_cast<std::uint64_t>(std::ceil(F.lo()));
    const auto hi = static_cast<std::uint64_t>(std::floor(F.hi()));
    const auto& sv = default_sieve(static_cast<std::uint32_t>(hi + 1));
    const auto mm = static_cast<std::int64_t>(m);
    for (std::uint64_t d = lo | 1; d <= hi; d += 2) {
        if (sv.mobius(d) == 0) continue;
        r.empirical += kronecker(8 * static_cast<std::int64_t>(d), mm) * F(double(d));
    }
    const auto root = static_cast<std::uint64_t>(std::llround(std::sqrt(double(m))));
    r.square = root * root == m;
    if (r.square) {
        double pred = r.ftilde1 / (2.0 * kPi * kPi / 8.0);
        for (auto [p, e] : factor_trial(m).factors) pred /= (1.0 + 1.0 / double(p));
        r.predicted = pred;
        r.ratio = r.empirical / pred;
    } else {
        r.ratio = r.empirical / r.ftilde1;
    }
    return r;
}

MomentReport moment_scaling_fit(const std::vector<double>& X_list, const MomentConfig& cfg) {
    MomentReport rep;
    std::vector<double> xs = X_list;
    std::sort(xs.begin(), xs.end());
    for (double X : xs) {
        MomentRow row;
        row.X = X;
        try {
            MomentConfig c = cfg;
            c.X = X;
            SmoothWeight F(X);
            auto e = third_moment_empirical(c, MomentWeight::from(F));
            row.empirical = e.value;
            row.count = e.count;
            row.predicted = main_term_at_zero(1, F).value;
            row.residual = row.empirical - row.predicted;
        } catch (const std::exception& ex) {
            row.failed = true;
            row.error = ex.what();
        }
        rep.rows.push_back(row);
    }
    std::vector<double> lx, ly;
    for (const auto& r : rep.rows)
        if (!r.failed && r.residual != 0.0) {
            lx.push_back(std::log(r.X));
            ly.push_back(std::log(std::abs(r.residual)));
        }
    const std::size_t n = lx.size();
    if (n >= 2) {
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
        mx /= double(n), my /= double(n);
        double sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < n; ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
        rep.slope = sxy / sxx;
        rep.fit_ok = true;
        if (n >= 3) {
            double sse = 0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = ly[i] - (my + rep.slope * (lx[i] - mx));
                sse += e * e;
            }
            const double se = std::sqrt(sse / double(n - 2) / sxx);
            boost::math::students_t dist(double(n - 2));
            const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
            rep.slope_lo = rep.slope - tq * se;
            rep.slope_hi = rep.slope + tq * se;
        } else {
            rep.slope_lo = rep.slope_hi = rep.slope;
        }
    }
    return rep;
}

}  // namespace qtm
