#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "mfdfa/core.hpp"
#include "mfdfa/synth.hpp"
#include "test_util.hpp"

using namespace mfdfa;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> d;
    std::vector<double> v(n);
    for (double& x : v) x = d(gen);
    return v;
}

// Reference F^2 by solving the (m+1)x(m+1) normal equations in long double.
double naive_variance(const std::vector<double>& y, int m) {
    const std::size_t n = y.size();
    const int k = m + 1;
    std::vector<long double> a(static_cast<std::size_t>(k * k), 0.0L), rhs(static_cast<std::size_t>(k), 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        const long double t = static_cast<long double>(i + 1) / static_cast<long double>(n);
        for (int r = 0; r < k; ++r) {
            rhs[r] += std::pow(t, r) * y[i];
            for (int c = 0; c < k; ++c) a[r * k + c] += std::pow(t, r + c);
        }
    }
    for (int p = 0; p < k; ++p) {
        for (int r = p + 1; r < k; ++r) {
            const long double f = a[r * k + p] / a[p * k + p];
            for (int c = p; c < k; ++c) a[r * k + c] -= f * a[p * k + c];
            rhs[r] -= f * rhs[p];
        }
    }
    std::vector<long double> coef(static_cast<std::size_t>(k));
    for (int r = k - 1; r >= 0; --r) {
        long double s = rhs[r];
        for (int c = r + 1; c < k; ++c) s -= a[r * k + c] * coef[c];
        coef[r] = s / a[r * k + r];
    }
    long double ss = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        const long double t = static_cast<long double>(i + 1) / static_cast<long double>(n);
        long double fit = 0.0L;
        for (int r = k - 1; r >= 0; --r) fit = fit * t + coef[r];
        ss += (y[i] - fit) * (y[i] - fit);
    }
    return static_cast<double>(ss / static_cast<long double>(n));
}

// Reference F_q(s) straight from the power-mean definition.
double naive_fq(const std::vector<double>& f2, double q) {
    long double acc = 0.0L;
    if (std::abs(q) < 1e-12) {
        for (double v : f2) acc += std::log(static_cast<long double>(v));
        return static_cast<double>(std::exp(acc / (2.0L * f2.size())));
    }
    for (double v : f2) acc += std::pow(static_cast<long double>(v), q / 2.0L);
    return static_cast<double>(std::pow(acc / f2.size(), 1.0L / q));
}

HurstCurve flat_curve(double h) {
    HurstCurve c;
    c.q_grid = MfdfaConfig::uniform_q_grid(-5, 5, 0.25);
    c.h.assign(c.q_grid.size(), h);
    c.intercepts.assign(c.q_grid.size(), 0.0);
    c.r_squared.assign(c.q_grid.size(), 1.0);
    return c;
}

}  // namespace

TEST_CASE("profile") {
    CHECK(compute_profile(std::vector<double>{5, 5, 5}).values == std::vector<double>{0, 0, 0});
    CHECK(compute_profile(std::vector<double>{1, 2, 3}).values == std::vector<double>{-1, -1, 0});
    CHECK(code_of([] { compute_profile(std::vector<double>{1, NAN}); }) == ErrorCode::Data);

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto x = gaussian(10000 + seed * 37, seed);
        for (double& v : x) v = 1e3 * v + 5e4;
        const auto p = compute_profile(x).values;
        REQUIRE(p.size() == x.size());
        double peak = 0.0;
        for (double v : x) peak = std::max(peak, std::abs(v));
        const double tol = 4.0 * static_cast<double>(x.size()) * std::numeric_limits<double>::epsilon() * peak;
        REQUIRE(std::abs(p.back()) <= tol);
    }
}

TEST_CASE("detrended variance") {
    std::vector<double> line(40), quad(40);
    for (std::size_t i = 0; i < 40; ++i) {
        const double t = static_cast<double>(i);
        line[i] = 3.0 - 0.25 * t;
        quad[i] = 1.0 + 2.0 * t - 0.5 * t * t;
    }
    CHECK(detrended_variance(line, 1) == 0.0);
    CHECK(detrended_variance(quad, 2) == 0.0);
    CHECK(detrended_variance(quad, 1) > 0.0);
    CHECK(detrended_variance(std::vector<double>{0, 1, 0}, 1) == Approx(2.0 / 9.0).epsilon(1e-14));

    for (int m = 1; m <= 3; ++m) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto y = gaussian(16 + seed * 11, seed + 100);
            const double got = detrended_variance(y, m);
            REQUIRE(got == Approx(naive_variance(y, m)).epsilon(1e-10));
        }
    }
}

TEST_CASE("segment_fluctuation directions") {
    const Profile p = compute_profile(gaussian(103, 9));
    const auto& y = p.values;
    // 103 = 6*17 + 1: forward segments start at 0, backward ones end at 103.
    const std::vector<double> first(y.begin(), y.begin() + 17);
    const std::vector<double> last(y.end() - 17, y.end());
    const std::vector<double> second_back(y.end() - 34, y.end() - 17);
    CHECK(segment_fluctuation(p, 17, 1, 1, Direction::Forward) == detrended_variance(first, 1));
    CHECK(segment_fluctuation(p, 17, 1, 1, Direction::Backward) == detrended_variance(last, 1));
    CHECK(segment_fluctuation(p, 17, 2, 1, Direction::Backward) == detrended_variance(second_back, 1));
    CHECK(code_of([&] { segment_fluctuation(p, 17, 7, 1, Direction::Forward); }) != ErrorCode::Ok);
    CHECK(code_of([&] { segment_fluctuation(p, 17, 0, 1, Direction::Forward); }) != ErrorCode::Ok);
    CHECK(code_of([&] { segment_fluctuation(p, 2, 1, 1, Direction::Forward); }) != ErrorCode::Ok);
}

TEST_CASE("q-order fluctuation") {
    const std::vector<double> constant(7, 2.5);
    for (double q : {-5.0, -1.0, 0.0, 0.5, 2.0, 5.0})
        CHECK(q_order_fluctuation(constant, q) == Approx(std::sqrt(2.5)).epsilon(1e-15));

    const std::vector<double> two{1.0, std::exp(2.0)};
    CHECK(std::abs(q_order_fluctuation(two, 0.0) - std::exp(0.5)) <= 1e-12);
    CHECK(std::abs(q_order_fluctuation(two, 1e-10) - std::exp(0.5)) <= 1e-12);

    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> logu(-20.0, 20.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> f2(30);
        for (double& v : f2) v = std::exp(logu(gen));
        for (double q : {-5.0, -2.0, -0.25, 0.0, 0.25, 2.0, 5.0})
            REQUIRE(q_order_fluctuation(f2, q) == Approx(naive_fq(f2, q)).epsilon(1e-12));
    }

    CHECK(code_of([] { q_order_fluctuation(std::vector<double>{1.0, 0.0}, -2.0); }) == ErrorCode::DegenerateSegment);
}

TEST_CASE("power mean is non-decreasing in q") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> logu(-30.0, 30.0);
    std::uniform_int_distribution<int> count(1, 200);
    const auto qs = MfdfaConfig::uniform_q_grid(-10, 10, 0.125);
    for (int rep = 0; rep < 1500; ++rep) {
        std::vector<double> f2(static_cast<std::size_t>(count(gen)));
        for (double& v : f2) v = std::exp(logu(gen) * (rep % 3 == 0 ? 0.01 : 1.0));
        double prev = -std::numeric_limits<double>::infinity();
        for (double q : qs) {
            const double f = q_order_fluctuation(f2, q);
            REQUIRE(std::isfinite(f));
            REQUIRE(f >= prev);
            prev = f;
        }
    }
}

TEST_CASE("fluctuation surface matches the definition") {
    const auto x = gaussian(2000, 17);
    const Profile p = compute_profile(x);
    MfdfaConfig cfg;
    cfg.q_grid = {-3, -1, 0, 1, 2, 3};
    cfg.scale_grid = {10, 23, 50, 101, 250, 500};
    for (bool bidir : {false, true}) {
        cfg.bidirectional = bidir;
        const auto surface = fluctuation_function(p, cfg);
        for (std::size_t si = 0; si < cfg.scale_grid.size(); ++si) {
            const std::size_t s = cfg.scale_grid[si];
            const std::size_t ns = x.size() / s;
            std::vector<double> f2;
            for (std::size_t v = 0; v < ns; ++v) {
                f2.push_back(naive_variance(std::vector<double>(p.values.begin() + v * s, p.values.begin() + (v + 1) * s), 1));
            }
            if (bidir) {
                for (std::size_t v = 0; v < ns; ++v) {
                    const auto end = p.values.end() - static_cast<std::ptrdiff_t>(v * s);
                    f2.push_back(naive_variance(std::vector<double>(end - static_cast<std::ptrdiff_t>(s), end), 1));
                }
            }
            CHECK(surface.segment_counts[si] == f2.size());
            for (std::size_t qi = 0; qi < cfg.q_grid.size(); ++qi)
                REQUIRE(surface.values[qi][si] == Approx(naive_fq(f2, cfg.q_grid[qi])).epsilon(1e-9));
        }
    }
}

TEST_CASE("silence is a degenerate segment") {
    const std::vector<double> zeros(4096, 0.0);
    try {
        analyze(zeros, MfdfaConfig{});
        FAIL("expected degenerate-segment");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateSegment);
        CHECK_THAT(e.what(), ContainsSubstring("v=1"));
        CHECK_THAT(e.what(), ContainsSubstring("s=16"));
    }
}

TEST_CASE("fit_hurst recovers exact power laws") {
    FluctuationSurface s;
    s.q_grid = MfdfaConfig::uniform_q_grid(-5, 5, 0.25);
    s.scale_grid = {16, 32, 64, 128};
    for (double q : s.q_grid) {
        (void)q;
        std::vector<double> row;
        for (auto sc : s.scale_grid) row.push_back(std::pow(static_cast<double>(sc), 0.5));
        s.values.push_back(row);
    }
    const HurstCurve c = fit_hurst(s);
    for (std::size_t i = 0; i < c.h.size(); ++i) {
        REQUIRE(std::abs(c.h[i] - 0.5) <= 1e-12);
        REQUIRE(std::abs(c.r_squared[i] - 1.0) <= 1e-12);
    }
    CHECK(code_of([&] { fit_hurst(s, FitRange{0, 2}); }) == ErrorCode::InsufficientScales);
}

TEST_CASE("tau") {
    const HurstCurve c = flat_curve(0.7);
    const auto tau = tau_from_h(c);
    for (std::size_t i = 0; i < tau.size(); ++i) {
        REQUIRE(tau[i] == Approx(c.q_grid[i] * 0.7 - 1.0).margin(1e-15));
        if (c.q_grid[i] == 0.0) REQUIRE(tau[i] == -1.0);
    }
}

TEST_CASE("legendre spectrum of a monofractal") {
    const auto sp = legendre_spectrum(flat_curve(0.6));
    for (std::size_t i = 0; i < sp.alpha.size(); ++i) {
        REQUIRE(sp.alpha[i] == Approx(0.6).margin(1e-15));
        REQUIRE(sp.f_alpha[i] == Approx(1.0).margin(1e-14));
    }
}

TEST_CASE("legendre spectrum uses central differences") {
    HurstCurve c = flat_curve(0.0);
    for (std::size_t i = 0; i < c.q_grid.size(); ++i) c.h[i] = 1.0 + 0.1 * c.q_grid[i] * c.q_grid[i];
    const auto sp = legendre_spectrum(c);
    // h' = 0.2 q is exact for central differences of a quadratic.
    for (std::size_t i = 1; i + 1 < c.q_grid.size(); ++i) {
        const double q = c.q_grid[i];
        REQUIRE(sp.alpha[i] == Approx(c.h[i] + q * 0.2 * q).margin(1e-12));
        REQUIRE(sp.f_alpha[i] == Approx(q * (sp.alpha[i] - c.h[i]) + 1.0).margin(1e-12));
    }
}

TEST_CASE("width of an exact parabola") {
    SingularitySpectrum sp;
    const double a0 = 0.7;
    for (int i = 0; i <= 10; ++i) {
        const double d = -1.0 + 0.2 * i;
        sp.q_grid.push_back(5.0 - i);
        sp.alpha.push_back(a0 + d);
        sp.f_alpha.push_back(1.0 - d * d);
        sp.tau.push_back(0.0);
    }
    const auto w = spectrum_width(sp, WidthMethod::QuadraticFit);
    REQUIRE(w.quadratic);
    CHECK(std::abs(w.quadratic->a + 1.0) <= 1e-12);
    CHECK(std::abs(w.quadratic->b) <= 1e-12);
    CHECK(std::abs(w.width - 2.0) <= 1e-12);
    CHECK(std::abs(w.alpha0 - a0) <= 1e-15);

    const auto e = spectrum_width(sp, WidthMethod::SpectrumEndpoints);
    CHECK(e.width == Approx(2.0).margin(1e-12));

    SECTION("skewed parabola keeps its coefficients") {
        for (std::size_t i = 0; i < sp.alpha.size(); ++i) {
            const double d = sp.alpha[i] - a0;
            sp.f_alpha[i] = 1.0 - 2.0 * d * d + 0.3 * d;
        }
        const auto s = spectrum_width(sp, WidthMethod::QuadraticFit);
        CHECK(std::abs(s.quadratic->a + 2.0) <= 1e-12);
        CHECK(std::abs(s.quadratic->b - 0.3) <= 1e-12);
        CHECK(std::abs(s.width - std::sqrt(0.09 + 8.0) / 2.0) <= 1e-12);
    }
    SECTION("convex spectrum is rejected") {
        for (std::size_t i = 0; i < sp.alpha.size(); ++i) {
            const double d = sp.alpha[i] - a0;
            sp.f_alpha[i] = 1.0 + d * d;
        }
        CHECK(code_of([&] { spectrum_width(sp, WidthMethod::QuadraticFit); }) != ErrorCode::Ok);
    }
    SECTION("too few points") {
        sp.alpha.resize(2);
        sp.f_alpha.resize(2);
        sp.q_grid.resize(2);
        sp.tau.resize(2);
        CHECK(code_of([&] { spectrum_width(sp, WidthMethod::QuadraticFit); }) == ErrorCode::InsufficientSpectrum);
    }
}

TEST_CASE("config validation") {
    MfdfaConfig c;
    CHECK_NOTHROW(c.validate(1u << 16));
    CHECK(code_of([&] { c.validate(63); }) == ErrorCode::Config);

    auto bad = c;
    bad.q_grid = {-1, 1, 3};
    CHECK(code_of([&] { bad.validate_static(); }) == ErrorCode::Config);
    bad = c;
    bad.scale_grid = {16, 32, 64};
    CHECK(code_of([&] { bad.validate_static(); }) == ErrorCode::InsufficientScales);
    bad = c;
    bad.detrend_order = 3;
    bad.scale_grid = {4, 8, 16, 32};
    CHECK(code_of([&] { bad.validate_static(); }) != ErrorCode::Ok);

    const auto grid = MfdfaConfig::uniform_q_grid(-5, 5, 0.25);
    CHECK(grid.size() == 41);
    CHECK(grid.front() == -5.0);
    CHECK(grid[20] == 0.0);
    CHECK(grid.back() == 5.0);

    const auto scales = log_spaced_scales(16, 16384, 20);
    CHECK(scales.front() == 16);
    CHECK(scales.back() == 16384);
    CHECK(std::is_sorted(scales.begin(), scales.end()));
}

TEST_CASE("pipeline stage errors name the stage") {
    try {
        analyze(gaussian(32, 1), MfdfaConfig{});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Config);
        CHECK_THAT(e.what(), ContainsSubstring("config"));
    }
}

TEST_CASE("white noise is monofractal with h(2) near 0.5") {
    const MfdfaConfig cfg;
    const auto cascade = analyze(synth::gen_binomial_cascade({16, 0.75}), cfg);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = analyze(synth::gen_white_noise(1u << 16, seed), cfg);
        const std::size_t i2 = r.hurst.index_of(2.0);
        CHECK(std::abs(r.hurst.h[i2] - 0.5) <= 0.05);
        CHECK(r.width.width < 0.5);
        CHECK(cascade.width.width > r.width.width);
    }
}

TEST_CASE("affine invariance") {
    MfdfaConfig cfg;
    cfg.width_method = WidthMethod::SpectrumEndpoints;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto x = gaussian(4096, seed + 50);
        std::vector<double> y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) y[i] = 1000.0 * x[i] + 7.0;
        const auto a = analyze(x, cfg);
        const auto b = analyze(y, cfg);
        for (std::size_t i = 0; i < a.hurst.h.size(); ++i) {
            REQUIRE(b.hurst.h[i] == Approx(a.hurst.h[i]).epsilon(1e-9));
            REQUIRE(b.spectrum.alpha[i] == Approx(a.spectrum.alpha[i]).epsilon(1e-9));
            REQUIRE(b.spectrum.f_alpha[i] == Approx(a.spectrum.f_alpha[i]).epsilon(1e-9));
        }
        REQUIRE(b.width.width == Approx(a.width.width).epsilon(1e-9));
    }
}

TEST_CASE("determinism") {
    const auto x = gaussian(8192, 77);
    const auto a = analyze(x, MfdfaConfig{});
    const auto b = analyze(x, MfdfaConfig{});
    CHECK(a.surface.values == b.surface.values);
    CHECK(a.hurst.h == b.hurst.h);
    CHECK(a.width.width == b.width.width);
}

TEST_CASE("monofractal collapse with growing N") {
    MfdfaConfig cfg;
    cfg.width_method = WidthMethod::SpectrumEndpoints;
    auto spread = [&](std::size_t n) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const auto r = analyze(synth::gen_fgn({0.7, n, seed}), cfg);
            const auto [lo, hi] = std::minmax_element(r.hurst.h.begin(), r.hurst.h.end());
            total += *hi - *lo;
        }
        return total / 4.0;
    };
    CHECK(spread(1u << 16) < spread(1u << 12));
}

TEST_CASE("cascade tau is concave") {
    const auto r = analyze(synth::gen_binomial_cascade({16, 0.75}), MfdfaConfig{});
    const auto& tau = r.spectrum.tau;
    for (std::size_t i = 2; i < tau.size(); ++i) REQUIRE(tau[i] - tau[i - 1] <= tau[i - 1] - tau[i - 2] + 1e-9);
}

TEST_CASE("music-like 6 s window lands in the tabulated width range") {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Signal w = synth::gen_cascade_modulated_noise(132300, 0.65, 22050.0, seed);
        const auto r = analyze(w, MfdfaConfig{});
        CHECK(r.width.width >= 0.2);
        CHECK(r.width.width <= 0.9);
    }
}

TEST_CASE("spectrum apex is near one on fGn") {
    for (double H : {0.3, 0.7}) {
        MfdfaConfig cfg;
        cfg.width_method = WidthMethod::SpectrumEndpoints;
        const auto r = analyze(synth::gen_fgn({H, 1u << 16, 2}), cfg);
        const double apex = *std::max_element(r.spectrum.f_alpha.begin(), r.spectrum.f_alpha.end());
        CHECK(std::abs(apex - 1.0) <= 0.05);
    }
}
