#include "ecco/problems.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ecco {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void verify_minima(const ObjectiveProblem& p) {
    for (const auto& [point, value] : p.known_minima) {
        const double gn = norm2(p.gradient(point));
        if (gn > 1e-8) {
            std::ostringstream os;
            os << "catalog: declared minimum of " << p.name << " has |grad|=" << gn;
            throw std::logic_error(os.str());
        }
        if (std::abs(p.value(point) - value) > 1e-10) {
            throw std::logic_error("catalog: declared minimum value mismatch for " + p.name);
        }
    }
    for (const auto& point : p.known_critical_points) {
        if (norm2(p.gradient(point)) > 1e-8)
            throw std::logic_error("catalog: declared critical point of " + p.name +
                                   " is not critical");
    }
}

void require_dim(const std::string& name, std::optional<int> n, int expected) {
    if (n && *n != expected) {
        std::ostringstream os;
        os << "catalog: " << name << " is fixed at dimension " << expected << ", got " << *n;
        throw std::invalid_argument(os.str());
    }
}

ObjectiveProblem make_rosenbrock() {
    ObjectiveProblem p;
    p.name = "rosenbrock";
    p.dim = 2;
    p.value = [](const Vector& v) {
        const double a = 1.0 - v[0];
        const double b = v[1] - v[0] * v[0];
        return a * a + 100.0 * b * b;
    };
    p.gradient = [](const Vector& v) {
        const double b = v[1] - v[0] * v[0];
        return Vector{-2.0 * (1.0 - v[0]) - 400.0 * v[0] * b, 200.0 * b};
    };
    p.hessian = [](const Vector& v) {
        SquareMatrix h(2);
        h(0, 0) = 2.0 - 400.0 * (v[1] - v[0] * v[0]) + 800.0 * v[0] * v[0];
        h(0, 1) = -400.0 * v[0];
        h(1, 0) = -400.0 * v[0];
        h(1, 1) = 200.0;
        return h;
    };
    p.known_minima = {{{1.0, 1.0}, 0.0}};
    p.known_critical_points = {{1.0, 1.0}};
    p.default_starts = {{-2.0, -2.0}, {0.0, 0.0}, {-5.0, -5.0}};
    return p;
}

ObjectiveProblem make_himmelblau() {
    ObjectiveProblem p;
    p.name = "himmelblau";
    p.dim = 2;
    p.value = [](const Vector& v) {
        const double a = v[0] * v[0] + v[1] - 11.0;
        const double b = v[0] + v[1] * v[1] - 7.0;
        return a * a + b * b;
    };
    p.gradient = [](const Vector& v) {
        const double a = v[0] * v[0] + v[1] - 11.0;
        const double b = v[0] + v[1] * v[1] - 7.0;
        return Vector{4.0 * v[0] * a + 2.0 * b, 2.0 * a + 4.0 * v[1] * b};
    };
    p.hessian = [](const Vector& v) {
        SquareMatrix h(2);
        h(0, 0) = 12.0 * v[0] * v[0] + 4.0 * v[1] - 42.0;
        h(0, 1) = 4.0 * (v[0] + v[1]);
        h(1, 0) = h(0, 1);
        h(1, 1) = 12.0 * v[1] * v[1] + 4.0 * v[0] - 26.0;
        return h;
    };
    p.known_minima = {{{3.0, 2.0}, 0.0},
                      {{-2.805118086952745, 3.131312518250573}, 0.0},
                      {{-3.779310253377747, -3.2831859912861696}, 0.0},
                      {{3.5844283403304917, -1.8481265269644036}, 0.0}};
    for (const auto& [pt, val] : p.known_minima) p.known_critical_points.push_back(pt);
    p.default_starts = {{1.0, 1.0}, {20.0, 20.0}, {-5.0, -5.0}};
    return p;
}

ObjectiveProblem make_booth() {
    ObjectiveProblem p;
    p.name = "booth";
    p.dim = 2;
    p.value = [](const Vector& v) {
        const double a = v[0] + 2.0 * v[1] - 7.0;
        const double b = 2.0 * v[0] + v[1] - 5.0;
        return a * a + b * b;
    };
    p.gradient = [](const Vector& v) {
        const double a = v[0] + 2.0 * v[1] - 7.0;
        const double b = 2.0 * v[0] + v[1] - 5.0;
        return Vector{2.0 * a + 4.0 * b, 4.0 * a + 2.0 * b};
    };
    p.hessian = [](const Vector&) {
        SquareMatrix h(2);
        h(0, 0) = 10.0;
        h(0, 1) = 8.0;
        h(1, 0) = 8.0;
        h(1, 1) = 10.0;
        return h;
    };
    p.known_minima = {{{1.0, 3.0}, 0.0}};
    p.known_critical_points = {{1.0, 3.0}};
    p.default_starts = {{5.0, 5.0}, {5.0, -5.0}, {-2.0, -2.0}};
    return p;
}

ObjectiveProblem make_three_hump() {
    ObjectiveProblem p;
    p.name = "three_hump";
    p.dim = 2;
    p.value = [](const Vector& v) {
        const double x = v[0], y = v[1];
        const double x2 = x * x;
        return 2.0 * x2 - 1.05 * x2 * x2 + x2 * x2 * x2 / 6.0 + x * y + y * y;
    };
    p.gradient = [](const Vector& v) {
        const double x = v[0], y = v[1];
        const double x2 = x * x;
        return Vector{4.0 * x - 4.2 * x2 * x + x2 * x2 * x + y, x + 2.0 * y};
    };
    p.hessian = [](const Vector& v) {
        const double x2 = v[0] * v[0];
        SquareMatrix h(2);
        h(0, 0) = 4.0 - 12.6 * x2 + 5.0 * x2 * x2;
        h(0, 1) = 1.0;
        h(1, 0) = 1.0;
        h(1, 1) = 2.0;
        return h;
    };
    const double lx = 1.747552345830289, ly = -0.8737761729151445;
    const double lf = 0.29863844223686054;
    const double sx = 1.0705422918236598, sy = -0.5352711459118299;
    p.known_minima = {{{0.0, 0.0}, 0.0}, {{lx, ly}, lf}, {{-lx, -ly}, lf}};
    p.known_critical_points = {{0.0, 0.0}, {lx, ly}, {-lx, -ly}, {sx, sy}, {-sx, -sy}};
    p.default_starts = {{1.0, 1.0}, {0.0, -1.0}, {-1.0, -1.0}};
    return p;
}

ObjectiveProblem make_rastrigin(int n) {
    if (n < 1) throw std::invalid_argument("catalog: rastrigin needs n >= 1");
    ObjectiveProblem p;
    p.name = "rastrigin";
    p.dim = n;
    p.value = [n](const Vector& v) {
        double s = 10.0 * n;
        for (int i = 0; i < n; ++i) s += v[i] * v[i] - 10.0 * std::cos(kTwoPi * v[i]);
        return s;
    };
    p.gradient = [n](const Vector& v) {
        Vector g(n);
        for (int i = 0; i < n; ++i)
            g[i] = 2.0 * v[i] + 10.0 * kTwoPi * std::sin(kTwoPi * v[i]);
        return g;
    };
    p.hessian = [n](const Vector& v) {
        SquareMatrix h(n);
        for (int i = 0; i < n; ++i)
            h(i, i) = 2.0 + 10.0 * kTwoPi * kTwoPi * std::cos(kTwoPi * v[i]);
        return h;
    };
    p.known_minima = {{Vector(n, 0.0), 0.0}};
    p.known_critical_points = {Vector(n, 0.0)};
    if (n == 2) {
        // Nearest off-origin local minima: per-coordinate critical value of
        // 2t + 20*pi*sin(2*pi*t) closest to 1.
        const double a = 0.9949586376523348;
        for (double cx : {-a, 0.0, a}) {
            for (double cy : {-a, 0.0, a}) {
                if (cx == 0.0 && cy == 0.0) continue;
                p.known_critical_points.push_back({cx, cy});
            }
        }
        p.default_starts = {{0.5, 0.5}};
    } else {
        p.default_starts = {Vector(n, 0.5)};
    }
    return p;
}

// Blocks of 4 with weights 100, 1, 90, 1, 10, 0.1 (Andrei's extended Wood),
// minimum 0 at the all-ones vector.
ObjectiveProblem make_ext_wood(int n) {
    if (n < 4 || n % 4 != 0)
        throw std::invalid_argument("catalog: ext_wood needs n to be a positive multiple of 4");
    ObjectiveProblem p;
    p.name = "ext_wood";
    p.dim = n;
    p.value = [n](const Vector& v) {
        double s = 0.0;
        for (int k = 0; k < n; k += 4) {
            const double a = v[k], b = v[k + 1], c = v[k + 2], d = v[k + 3];
            const double t1 = b - a * a;
            const double t2 = d - c * c;
            const double t3 = b + d - 2.0;
            const double t4 = b - d;
            s += 100.0 * t1 * t1 + (1.0 - a) * (1.0 - a) + 90.0 * t2 * t2 +
                 (1.0 - c) * (1.0 - c) + 10.0 * t3 * t3 + 0.1 * t4 * t4;
        }
        return s;
    };
    p.gradient = [n](const Vector& v) {
        Vector g(n);
        for (int k = 0; k < n; k += 4) {
            const double a = v[k], b = v[k + 1], c = v[k + 2], d = v[k + 3];
            const double t1 = b - a * a;
            const double t2 = d - c * c;
            const double t3 = b + d - 2.0;
            const double t4 = b - d;
            g[k] = -400.0 * a * t1 - 2.0 * (1.0 - a);
            g[k + 1] = 200.0 * t1 + 20.0 * t3 + 0.2 * t4;
            g[k + 2] = -360.0 * c * t2 - 2.0 * (1.0 - c);
            g[k + 3] = 180.0 * t2 + 20.0 * t3 - 0.2 * t4;
        }
        return g;
    };
    p.hessian = [n](const Vector& v) {
        SquareMatrix h(n);
        for (int k = 0; k < n; k += 4) {
            const double a = v[k], b = v[k + 1], c = v[k + 2], d = v[k + 3];
            h(k, k) = -400.0 * (b - a * a) + 800.0 * a * a + 2.0;
            h(k, k + 1) = -400.0 * a;
            h(k + 1, k) = -400.0 * a;
            h(k + 1, k + 1) = 220.2;
            h(k + 1, k + 3) = 19.8;
            h(k + 3, k + 1) = 19.8;
            h(k + 2, k + 2) = -360.0 * (d - c * c) + 720.0 * c * c + 2.0;
            h(k + 2, k + 3) = -360.0 * c;
            h(k + 3, k + 2) = -360.0 * c;
            h(k + 3, k + 3) = 200.2;
        }
        return h;
    };
    p.known_minima = {{Vector(n, 1.0), 0.0}};
    p.known_critical_points = {Vector(n, 1.0)};
    p.default_starts = {Vector(n, 2.0), Vector(n, 10.0)};
    return p;
}

}  // namespace

ObjectiveProblem demo_quadratic() {
    ObjectiveProblem p;
    p.name = "demo_quadratic";
    p.dim = 1;
    p.value = [](const Vector& v) { return 2.5 * v[0] * v[0] + v[0]; };
    p.gradient = [](const Vector& v) { return Vector{5.0 * v[0] + 1.0}; };
    p.hessian = [](const Vector&) {
        SquareMatrix h(1);
        h(0, 0) = 5.0;
        return h;
    };
    p.known_minima = {{{-0.2}, -0.1}};
    p.known_critical_points = {{-0.2}};
    p.default_starts = {{1.0}};
    return p;
}

ObjectiveProblem catalog(const std::string& name, std::optional<int> n) {
    ObjectiveProblem p;
    if (name == "rosenbrock") {
        require_dim(name, n, 2);
        p = make_rosenbrock();
    } else if (name == "himmelblau") {
        require_dim(name, n, 2);
        p = make_himmelblau();
    } else if (name == "booth") {
        require_dim(name, n, 2);
        p = make_booth();
    } else if (name == "three_hump") {
        require_dim(name, n, 2);
        p = make_three_hump();
    } else if (name == "rastrigin") {
        p = make_rastrigin(n.value_or(2));
    } else if (name == "ext_wood") {
        p = make_ext_wood(n.value_or(8));
    } else if (name == "demo_quadratic") {
        require_dim(name, n, 1);
        p = demo_quadratic();
    } else if (name == "toy_mlp") {
        const std::uint64_t seed = n ? static_cast<std::uint64_t>(*n) : 7u;
        return toy_mlp(seed, 200, 25).problem();
    } else {
        throw std::invalid_argument("catalog: unknown problem '" + name + "'");
    }
    verify_minima(p);
    return p;
}

std::vector<std::string> catalog_names() {
    return {"rosenbrock", "himmelblau", "booth",         "three_hump",
            "rastrigin",  "ext_wood",   "demo_quadratic", "toy_mlp"};
}

namespace {

// Deterministic RNG pinned in code so streams never depend on the standard
// library's distribution implementations.
struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        s += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform01() { return (next() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
    }
};

constexpr int kInput = 2;
constexpr int kHidden = 8;
constexpr int kClasses = 2;

struct MlpScratch {
    double z1[kHidden];
    double h[kHidden];
    double z2[kClasses];
    double prob[kClasses];
};

void mlp_forward(const Vector& p, const double* x, MlpScratch& s) {
    const double* w1 = p.data();               // kHidden x kInput
    const double* b1 = p.data() + 16;          // kHidden
    const double* w2 = p.data() + 24;          // kClasses x kHidden
    const double* b2 = p.data() + 40;          // kClasses
    for (int i = 0; i < kHidden; ++i) {
        s.z1[i] = w1[i * kInput] * x[0] + w1[i * kInput + 1] * x[1] + b1[i];
        s.h[i] = std::tanh(s.z1[i]);
    }
    for (int c = 0; c < kClasses; ++c) {
        double acc = b2[c];
        for (int i = 0; i < kHidden; ++i) acc += w2[c * kHidden + i] * s.h[i];
        s.z2[c] = acc;
    }
    const double m = std::max(s.z2[0], s.z2[1]);
    const double e0 = std::exp(s.z2[0] - m);
    const double e1 = std::exp(s.z2[1] - m);
    s.prob[0] = e0 / (e0 + e1);
    s.prob[1] = e1 / (e0 + e1);
}

}  // namespace

ToyMlp::ToyMlp(std::uint64_t seed, int n_samples, int batch_size)
    : n_samples_(n_samples), batch_size_(batch_size) {
    if (batch_size < 1 || n_samples < batch_size)
        throw std::invalid_argument("toy_mlp: need n_samples >= batch_size >= 1");
    if (n_samples % batch_size != 0)
        throw std::invalid_argument("toy_mlp: n_samples must be a multiple of batch_size");

    SplitMix64 rng(seed);
    xs_.resize(2 * static_cast<std::size_t>(n_samples));
    labels_.resize(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const int cls = i % 2;  // interleaved, so every contiguous batch is balanced
        const double cx = cls == 0 ? -2.0 : 2.0;
        xs_[2 * i] = cx + 0.6 * rng.normal();
        xs_[2 * i + 1] = 0.6 * rng.normal();
        labels_[i] = cls;
    }
    Vector init(kParamDim);
    for (double& w : init) w = 0.5 * rng.normal();

    // Shared data snapshot so the problem closures stay valid on copy.
    auto xs = std::make_shared<std::vector<double>>(xs_);
    auto labels = std::make_shared<std::vector<int>>(labels_);
    const int n = n_samples;
    const int bs = batch_size;

    auto subset_value = [xs, labels, n](const Vector& params, int first, int count) {
        double loss = 0.0;
        MlpScratch s;
        for (int k = 0; k < count; ++k) {
            const int i = (first + k) % n;
            mlp_forward(params, xs->data() + 2 * i, s);
            loss += -std::log(std::max(s.prob[(*labels)[i]], 1e-300));
        }
        return loss / count;
    };
    auto subset_gradient = [xs, labels, n](const Vector& params, int first, int count) {
        Vector g(kParamDim, 0.0);
        MlpScratch s;
        const double* w2 = params.data() + 24;
        for (int k = 0; k < count; ++k) {
            const int i = (first + k) % n;
            const double* x = xs->data() + 2 * i;
            mlp_forward(params, x, s);
            double dz2[kClasses];
            for (int c = 0; c < kClasses; ++c)
                dz2[c] = (s.prob[c] - (c == (*labels)[i] ? 1.0 : 0.0)) / count;
            for (int c = 0; c < kClasses; ++c) {
                for (int j = 0; j < kHidden; ++j) g[24 + c * kHidden + j] += dz2[c] * s.h[j];
                g[40 + c] += dz2[c];
            }
            for (int j = 0; j < kHidden; ++j) {
                const double dh = w2[j] * dz2[0] + w2[kHidden + j] * dz2[1];
                const double dz1 = dh * (1.0 - s.h[j] * s.h[j]);
                g[j * kInput] += dz1 * x[0];
                g[j * kInput + 1] += dz1 * x[1];
                g[16 + j] += dz1;
            }
        }
        return g;
    };

    problem_.name = "toy_mlp";
    problem_.dim = kParamDim;
    problem_.value = [subset_value, n](const Vector& params) {
        return subset_value(params, 0, n);
    };
    problem_.gradient = [subset_gradient, n](const Vector& params) {
        return subset_gradient(params, 0, n);
    };
    problem_.batch_value = [subset_value, n, bs](const Vector& params, std::uint64_t b) {
        return subset_value(params, static_cast<int>((b * bs) % n), bs);
    };
    problem_.batch_gradient = [subset_gradient, n, bs](const Vector& params, std::uint64_t b) {
        return subset_gradient(params, static_cast<int>((b * bs) % n), bs);
    };
    problem_.default_starts = {init};
}

double ToyMlp::accuracy(const Vector& params) const {
    int correct = 0;
    MlpScratch s;
    for (int i = 0; i < n_samples_; ++i) {
        mlp_forward(params, xs_.data() + 2 * i, s);
        const int pred = s.prob[1] > s.prob[0] ? 1 : 0;
        if (pred == labels_[i]) ++correct;
    }
    return static_cast<double>(correct) / n_samples_;
}

ToyMlp toy_mlp(std::uint64_t seed, int n_samples, int batch_size) {
    if (n_samples < 4 * batch_size)
        throw std::invalid_argument("toy_mlp: need n_samples >= 4*batch_size");
    return ToyMlp(seed, n_samples, batch_size);
}

}  // namespace ecco
