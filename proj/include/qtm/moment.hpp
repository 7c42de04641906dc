#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qtm/arith.hpp"
#include "qtm/common.hpp"
#include "qtm/special.hpp"

namespace qtm {

enum class LMethod { single_afe, triple_afe };
const char* lmethod_name(LMethod m);

struct LValueRecord {
    std::uint64_t d = 0;
    cplx value;
    LMethod method = LMethod::single_afe;
    cplx shift;
    double error_bound = 0;  // |value - value at doubled truncation|
};

// L(1/2+u, chi_{8d}) for every odd squarefree d <= d_max, from the smoothed
// approximate functional equation with one gamma factor. Holds the W_{+-u}
// tables; evaluation is thread-safe.
class SingleAFE {
public:
    SingleAFE(cplx shift, const AFEWeightG& g, std::uint64_t d_max, double trunc = 12.0);

    cplx operator()(std::uint64_t d) const;
    // truncation n <= trunc * sqrt(8d/pi); trunc may be up to twice the constructor value
    cplx evaluate(std::uint64_t d, double trunc, std::vector<std::int8_t>& chi) const;
    double trunc() const { return trunc_; }

private:
    cplx shift_;
    std::uint64_t d_max_;
    double trunc_;
    bool center_;
    InverseMellinTable wp_, wm_;
    cplx gamma_ratio_;
};

LValueRecord lvalue_single(std::uint64_t d, cplx shift = 0.0, const AFEWeightG& g = AFEWeightG::one(),
                           double trunc = 12.0);

// chi_{8d}(n) for n <= N by complete multiplicativity from the least prime factor table.
void fill_chi8d(std::uint64_t d, std::uint64_t N, std::vector<std::int8_t>& chi);
void require_odd_squarefree(std::uint64_t d);

struct TripleAFEResult {
    cplx value;
    std::uint64_t n_max = 0;
    double v_cut = 0;  // log(n_max / d^{3/2})
};

// prod_lambda L(1/2+lambda, chi_{8d}) from the two-sum triple AFE. Parallel
// over fixed n-segments, deterministic.
TripleAFEResult triple_product_afe_detail(std::uint64_t d, const ShiftTriple& shifts,
                                          const AFEWeightG& g = AFEWeightG::one(), bool parallel = true);
inline cplx triple_product_afe(std::uint64_t d, const ShiftTriple& shifts, const AFEWeightG& g = AFEWeightG::one()) {
    return triple_product_afe_detail(d, shifts, g).value;
}

// Weight with explicit support, so degenerate test weights can be used.
struct MomentWeight {
    double lo = 0, hi = 0;
    std::function<double(double)> f;
    static MomentWeight from(const SmoothWeight& F);
};

struct MomentConfig {
    double X = 1e4;
    int workers = 1;
    double trunc = 12.0;
    std::uint32_t block = 1024;  // d-values per block; fixes the reduction tree
    void validate() const;
};

struct MomentSum {
    double value = 0;
    std::uint64_t count = 0;
};

MomentSum third_moment_empirical(const MomentConfig& cfg, const MomentWeight& w);
MomentSum third_moment_empirical(const MomentConfig& cfg);  // smooth weight at cfg.X
// Same blocks and tree on one thread, without OpenMP.
MomentSum third_moment_serial(const MomentConfig& cfg, const MomentWeight& w);

// Fixed-shape pairwise reduction.
double pairwise_sum(const std::vector<double>& v);

struct PoissonResult {
    double lhs = 0, rhs = 0, gap = 0, ftilde1 = 0;
    int k_used = 0;
};
// k_cutoff < 0 picks the cutoff automatically.
PoissonResult poisson_check(std::uint64_t n, const SmoothWeight& F, int k_cutoff = -1);

struct AlternatingResult {
    cplx lhs, rhs;
    double gap = 0;
};
AlternatingResult alternating_sum_check(cplx z);

struct OrthogonalityResult {
    double empirical = 0;
    double predicted = 0;  // zero when m is not a square
    double ratio = 0;      // empirical/predicted, or empirical/F~(1) for non-squares
    double ftilde1 = 0;
    bool square = false;
};
OrthogonalityResult orthogonality_check(std::uint64_t m, const MomentConfig& cfg);

struct MomentRow {
    double X = 0, empirical = 0, predicted = 0, residual = 0;
    std::uint64_t count = 0;
    bool failed = false;
    std::string error;
};

struct MomentReport {
    std::vector<MomentRow> rows;
    double slope = 0, slope_lo = 0, slope_hi = 0;  // fit of log|residual| against log X, 95% interval
    bool fit_ok = false;
};

MomentReport moment_scaling_fit(const std::vector<double>& X_list, const MomentConfig& cfg);

}  // namespace qtm
