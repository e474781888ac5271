#include "bvs/gprior.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <vector>

#include "bvs/error.hpp"
#include "bvs/numeric.hpp"

namespace bvs {

void GPriorSpec::validate() const {
    if ((kind == GPriorKind::hyper_g || kind == GPriorKind::hyper_g_n) && !(a > 2.0))
        throw config_error("hyper-g prior needs a > 2 for a proper prior");
}

GPriorSpec parse_gprior(std::string_view text) {
    std::string_view name = text;
    std::string_view arg;
    if (const auto colon = text.find(':'); colon != std::string_view::npos) {
        name = text.substr(0, colon);
        arg = text.substr(colon + 1);
    }
    GPriorSpec spec;
    if (name == "uip") spec.kind = GPriorKind::uip;
    else if (name == "ric") spec.kind = GPriorKind::ric;
    else if (name == "bric") spec.kind = GPriorKind::bric;
    else if (name == "hq") spec.kind = GPriorKind::hq;
    else if (name == "ebl") spec.kind = GPriorKind::ebl;
    else if (name == "jzs") spec.kind = GPriorKind::jzs;
    else if (name == "hyper-g") spec.kind = GPriorKind::hyper_g;
    else if (name == "hyper-g-n") spec.kind = GPriorKind::hyper_g_n;
    else if (name == "robust") spec.kind = GPriorKind::robust;
    else throw config_error("unknown g-prior '" + std::string(text) + "'");

    if (!arg.empty()) {
        if (spec.kind != GPriorKind::hyper_g && spec.kind != GPriorKind::hyper_g_n)
            throw config_error("g-prior '" + std::string(name) + "' takes no parameter");
        const auto* end = arg.data() + arg.size();
        auto [ptr, ec] = std::from_chars(arg.data(), end, spec.a);
        if (ec != std::errc() || ptr != end) throw config_error("bad hyper-g parameter '" + std::string(arg) + "'");
    }
    spec.validate();
    return spec;
}

std::string to_string(const GPriorSpec& spec) {
    switch (spec.kind) {
        case GPriorKind::uip: return "uip";
        case GPriorKind::ric: return "ric";
        case GPriorKind::bric: return "bric";
        case GPriorKind::hq: return "hq";
        case GPriorKind::ebl: return "ebl";
        case GPriorKind::jzs: return "jzs";
        case GPriorKind::hyper_g: return "hyper-g:" + std::to_string(spec.a);
        case GPriorKind::hyper_g_n: return "hyper-g-n:" + std::to_string(spec.a);
        case GPriorKind::robust: return "robust";
    }
    return "?";
}

double log_bf_given_g(double g, const SufficientStats& s, int n) {
    const double k = s.p_gamma;
    return 0.5 * (n - 1 - k) * std::log1p(g) - 0.5 * (n - 1) * std::log1p(g * (1.0 - s.r2));
}

double ebl_ghat(const SufficientStats& s, int n) {
    if (s.p_gamma == 0) return 0.0;
    if (s.r2 >= 1.0) return std::numeric_limits<double>::infinity();
    const double f = (s.r2 / s.p_gamma) / ((1.0 - s.r2) / (n - 1 - s.p_gamma));
    return std::max(f - 1.0, 0.0);
}

double constant_g(const GPriorSpec& spec, int n, int p) {
    switch (spec.kind) {
        case GPriorKind::uip: return n;
        case GPriorKind::ric: return static_cast<double>(p) * p;
        case GPriorKind::bric: return std::max<double>(n, static_cast<double>(p) * p);
        case GPriorKind::hq: return std::log(static_cast<double>(n));
        default: throw config_error("constant_g called for a prior without a constant g");
    }
}

namespace {

double robust_lower(int n, int p_gamma) { return (1.0 + n) / (p_gamma + 1.0) - 1.0; }

}  // namespace

double log_g_density(const GPriorSpec& spec, double g, int n, int p_gamma) {
    if (!(g > 0)) return neg_inf<double>();
    switch (spec.kind) {
        case GPriorKind::jzs:
            // Inverse gamma(1/2, n/2).
            return 0.5 * std::log(0.5 * n) - std::lgamma(0.5) - 1.5 * std::log(g) - 0.5 * n / g;
        case GPriorKind::hyper_g:
            return std::log(0.5 * (spec.a - 2.0)) - 0.5 * spec.a * std::log1p(g);
        case GPriorKind::hyper_g_n:
            return std::log(0.5 * (spec.a - 2.0) / n) - 0.5 * spec.a * std::log1p(g / n);
        case GPriorKind::robust: {
            const double lower = robust_lower(n, p_gamma);
            if (g <= lower) return neg_inf<double>();
            return 0.5 * std::log1p(lower) - std::numbers::ln2 - 1.5 * std::log1p(g);
        }
        default: throw config_error("log_g_density called for a constant-g prior");
    }
}

namespace {

GPriorEvaluation integrate_random_g(const GPriorSpec& spec, const SufficientStats& s, int n,
                                    const QuadratureConfig& q, bool want_shrinkage) {
    // log of B(g) pi(g) as a function of u = log g (includes the dg = g du Jacobian).
    const auto h_u = [&](double u) {
        const double g = std::exp(u);
        return log_bf_given_g(g, s, n) + log_g_density(spec, g, n, s.p_gamma) + u;
    };
    double u_lo = -30.0;
    double t_lo = 0.0;
    if (spec.kind == GPriorKind::robust) {
        const double lower = robust_lower(n, s.p_gamma);
        u_lo = std::log(lower);
        t_lo = lower / (1.0 + lower);
    }
    const double u_hi = std::max(u_lo + 10.0, 60.0);

    // Coarse scan for the mode in log g, then golden-section refinement.
    double best_u = u_lo, best_h = neg_inf<double>();
    std::vector<double> scan;
    for (double u = u_lo + 1e-9; u <= u_hi; u += 0.5) {
        const double h = h_u(u);
        scan.push_back(u);
        if (h > best_h) {
            best_h = h;
            best_u = u;
        }
    }
    double lo = std::max(u_lo + 1e-12, best_u - 0.5), hi = std::min(u_hi, best_u + 0.5);
    constexpr double phi = 0.6180339887498949;
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = h_u(x1), f2 = h_u(x2);
    for (int it = 0; it < 60 && hi - lo > 1e-9; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = h_u(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = h_u(x1);
        }
    }
    const double mode = 0.5 * (lo + hi);
    constexpr double du = 1e-3;
    double width = 1.0;
    if (mode - du > u_lo) {
        const double curv = (h_u(mode + du) - 2.0 * h_u(mode) + h_u(mode - du)) / (du * du);
        if (curv < 0 && std::isfinite(curv)) width = std::clamp(1.0 / std::sqrt(-curv), 1e-6, 10.0);
    }

    const auto t_of_u = [](double u) { return u > 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u)); };
    // Integrand over t = g/(1+g): B(g) pi(g) (1+g)^2.
    const auto log_f_t = [&](double t) {
        const double g = t / (1.0 - t);
        return log_bf_given_g(g, s, n) + log_g_density(spec, g, n, s.p_gamma) - 2.0 * std::log1p(-t);
    };

    std::vector<double> breaks{t_lo, 1.0};
    for (double k : {-16.0, -8.0, -4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double t = t_of_u(mode + k * width);
        if (t > t_lo && t < 1.0) breaks.push_back(t);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    double shift = neg_inf<double>();
    for (double t : breaks)
        if (t > t_lo && t < 1.0) shift = std::max(shift, log_f_t(t));
    for (double u : scan) {
        const double t = t_of_u(u);
        if (t > t_lo && t < 1.0) shift = std::max(shift, log_f_t(t));
    }
    if (!std::isfinite(shift)) throw numeric_error("random-g integrand has no finite mass");

    const auto f = [&](double t) {
        const double v = log_f_t(t) - shift;
        return std::isfinite(v) ? std::exp(v) : 0.0;
    };
    const auto mass = integrate_adaptive(f, breaks, q);
    const auto fail = [&](const char* what) {
        return numeric_error(std::string(what) + " failed to converge for " + to_string(spec) +
                             " (p_gamma=" + std::to_string(s.p_gamma) + ", R2=" + std::to_string(s.r2) +
                             ", n=" + std::to_string(n) + ")");
    };
    if (!mass.converged || !(mass.value > 0)) throw fail("Bayes-factor quadrature");

    GPriorEvaluation out;
    out.log_bf = shift + std::log(mass.value);
    out.log_bf_error = mass.abs_error / mass.value;
    if (want_shrinkage) {
        const auto tf = [&](double t) { return t * f(t); };
        const auto num = integrate_adaptive(tf, breaks, q);
        if (!num.converged) throw fail("shrinkage quadrature");
        out.shrinkage = std::clamp(num.value / mass.value, 0.0, 1.0);
    }
    return out;
}

}  // namespace

GPriorEvaluation evaluate_gprior(const GPriorSpec& spec, const SufficientStats& s, int n, int p,
                                 const QuadratureConfig& q, bool want_shrinkage) {
    if (n <= s.p_gamma + 1)
        throw data_error("Bayes factor needs n > p_gamma + 1 (n=" + std::to_string(n) +
                         ", p_gamma=" + std::to_string(s.p_gamma) + ")");
    if (!(q.rel_tol > 0)) throw config_error("quadrature rel_tol must be positive");
    GPriorEvaluation out;
    if (spec.random_g()) {
        if (s.p_gamma == 0 && !want_shrinkage) return out;
        out = integrate_random_g(spec, s, n, q, want_shrinkage);
        if (s.p_gamma == 0) {
            out.log_bf = 0.0;
            out.log_bf_error = 0.0;
        }
        return out;
    }
    const double g = spec.kind == GPriorKind::ebl ? ebl_ghat(s, n) : constant_g(spec, n, p);
    if (std::isinf(g)) throw numeric_error("perfect fit (R2 = 1): empirical-Bayes g is unbounded");
    out.log_bf = s.p_gamma == 0 ? 0.0 : log_bf_given_g(g, s, n);
    out.shrinkage = g / (1.0 + g);
    return out;
}

}  // namespace bvs
