#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ecco/control.hpp"

using namespace ecco;

namespace {

SquareMatrix diag2(double a, double b) {
    SquareMatrix m(2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

ControlPolicy full_policy(bool normalize = false) {
    ControlPolicy p;
    p.kind = ControlKind::full_hessian;
    p.normalize = normalize;
    return p;
}

ControlPolicy approx_policy(bool normalize = false) {
    ControlPolicy p;
    p.kind = ControlKind::approximate;
    p.normalize = normalize;
    return p;
}

}  // namespace

TEST_CASE("identity_control") {
    CHECK(identity_control(1) == Vector{1.0});
    CHECK(identity_control(3) == Vector{1.0, 1.0, 1.0});
    CHECK_THROWS_AS(identity_control(0), std::invalid_argument);
}

TEST_CASE("normalize_diag") {
    CHECK(normalize_diag({180.0}, 10.0) == Vector{10.0});
    CHECK(normalize_diag({2.0, 4.0}, 10.0) == Vector{5.0, 10.0});
    CHECK(normalize_diag({0.0, -3.0}, 10.0) == Vector{0.0, -3.0});
    CHECK_THROWS_AS(normalize_diag({1.0}, 1.0), std::invalid_argument);
}

TEST_CASE("full_control_diag hand values") {
    SquareMatrix h1(1);
    h1(0, 0) = 5.0;
    CHECK(full_control_diag({6.0}, h1, full_policy()) == Vector{180.0});

    CHECK(full_control_diag({0.0, 0.0}, diag2(7.0, -3.0), full_policy()) == Vector{1.0, 1.0});
    CHECK(full_control_diag({1.0, -1.0}, diag2(2.0, 2.0), full_policy()) == Vector{2.0, 2.0});

    // normalization rescales to the cap before the floor
    const Vector z = full_control_diag({6.0}, h1, full_policy(true));
    CHECK(z == Vector{10.0});
}

TEST_CASE("approx_control_diag hand values") {
    CHECK(approx_control_diag({3.0, -1.0}, {}, approx_policy()) == Vector{1.0, 1.0});

    ControlState s;
    s.prev_gradient = Vector{2.0};
    s.prev_dt = 0.5;
    const Vector z = approx_control_diag({1.0}, s, approx_policy());
    CHECK(std::abs(z[0] - std::sqrt(2.0)) <= 1e-12);

    s.prev_gradient = Vector{0.5};
    CHECK(approx_control_diag({1.0}, s, approx_policy()) == Vector{1.0});

    s.prev_gradient = Vector{4.0, 0.0};
    s.prev_dt = 1.0;
    CHECK(approx_control_diag({2.0, 0.0}, s, approx_policy()) == Vector{2.0, 1.0});
}

TEST_CASE("stored_charge_sq") {
    CHECK(stored_charge_sq({0.0, 0.0}) == 0.0);
    CHECK(stored_charge_sq({3.0, 4.0}) == 25.0);
    CHECK(stored_charge_sq({-2.0}) == 4.0);
}

TEST_CASE("non-finite raw entries degrade to 1 with a flag, never throw") {
    const double huge = std::numeric_limits<double>::max();
    SquareMatrix h(2);
    h(0, 0) = huge;
    h(1, 1) = 2.0;
    ControlDiagnostics diag;
    const Vector z = full_control_diag({huge, 1.0}, h, full_policy(), &diag);
    CHECK(diag.degraded);
    CHECK(z[0] == 1.0);
    CHECK(z[1] >= 1.0);
    CHECK(all_finite(z));

    ControlState s;
    s.prev_gradient = Vector{-huge};
    s.prev_dt = 1e-300;
    ControlDiagnostics diag2;
    const Vector za = approx_control_diag({huge}, s, approx_policy(), &diag2);
    CHECK(diag2.degraded);
    CHECK(za == Vector{1.0});
}

TEST_CASE("boundedness of both policies on random inputs") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> mag(-1e4, 1e4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 6;
        Vector g(n);
        SquareMatrix h(n);
        for (auto& v : g) v = mag(rng);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) h(i, j) = mag(rng);

        for (bool norm : {false, true}) {
            const Vector zf = full_control_diag(g, h, full_policy(norm));
            for (double z : zf) {
                CHECK(z >= 1.0);
                CHECK(std::isfinite(z));
                if (norm) CHECK(z <= 10.0);
            }
            ControlState s;
            s.prev_gradient = Vector(n);
            for (auto& v : *s.prev_gradient) v = mag(rng);
            s.prev_dt = std::abs(mag(rng)) + 1e-6;
            const Vector za = approx_control_diag(g, s, approx_policy(norm));
            for (double z : za) {
                CHECK(z >= 1.0);
                CHECK(std::isfinite(z));
                if (norm) CHECK(z <= 10.0);
            }
        }
    }
}

TEST_CASE("zero gradient reduces both policies to identity exactly") {
    const Vector zero(4, 0.0);
    SquareMatrix h(4);
    for (int i = 0; i < 4; ++i) h(i, i) = 3.0 + i;
    CHECK(full_control_diag(zero, h, full_policy(true)) == Vector(4, 1.0));
    ControlState s;
    s.prev_gradient = Vector{1.0, -2.0, 0.5, 3.0};
    s.prev_dt = 0.25;
    CHECK(approx_control_diag(zero, s, approx_policy(true)) == Vector(4, 1.0));
}

// One forward-Euler step with Z = I on a quadratic makes the lagged-gradient
// control approach the full-Hessian one at a rate linear in dt.
TEST_CASE("approximate control is consistent with the full control") {
    SquareMatrix h(2);
    h(0, 0) = 30.0;
    h(0, 1) = 3.0;
    h(1, 0) = 3.0;
    h(1, 1) = 20.0;
    const Vector x_prev{2.0, 1.5};

    auto grad = [&](const Vector& v) { return h.matvec(v); };
    auto raw_gap = [&](double dt) {
        Vector x(2);
        const Vector gp = grad(x_prev);
        for (int i = 0; i < 2; ++i) x[i] = x_prev[i] - dt * gp[i];
        const Vector g = grad(x);
        const Vector zf = full_control_diag(g, h, full_policy());
        ControlState s;
        s.prev_gradient = gp;
        s.prev_dt = dt;
        const Vector za = approx_control_diag(g, s, approx_policy());
        double worst = 0.0;
        for (int i = 0; i < 2; ++i) {
            // invert the output transforms to recover the raw values
            worst = std::max(worst, std::abs(za[i] * za[i] - zf[i]));
        }
        return worst;
    };

    // K fit at the largest dt; factor-2 slack absorbs the second-order term.
    const double k = raw_gap(1e-2) / 1e-2;
    CHECK(k > 0.0);
    CHECK(raw_gap(1e-3) <= 2.0 * k * 1e-3);
    CHECK(raw_gap(1e-4) <= 2.0 * k * 1e-4);
    // and the gap contracts at least linearly per decade
    CHECK(raw_gap(1e-3) <= 0.2 * raw_gap(1e-2));
    CHECK(raw_gap(1e-4) <= 0.2 * raw_gap(1e-3));
}
