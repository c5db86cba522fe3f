#include "ecco/core.hpp"

#include <cmath>
#include <sstream>

namespace ecco {

bool all_finite(const Vector& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double dot(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

double norm_inf(const Vector& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

Vector SquareMatrix::matvec(const Vector& x) const {
    Vector y(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        const double* row = data_.data() + i * n_;
        for (std::size_t j = 0; j < n_; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

void SquareMatrix::symmetrize() {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double m = 0.5 * ((*this)(i, j) + (*this)(j, i));
            (*this)(i, j) = m;
            (*this)(j, i) = m;
        }
    }
}

double SquareMatrix::symmetry_error() const {
    double worst = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double denom = std::max(1.0, std::abs((*this)(i, j)));
            worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)) / denom);
        }
    }
    return worst;
}

namespace {

[[noreturn]] void throw_probe_failure(const char* what, const Vector& probe) {
    std::ostringstream os;
    os << "finite-difference oracle: non-finite " << what << " at probe [";
    for (std::size_t i = 0; i < probe.size(); ++i) {
        if (i) os << ",";
        os << probe[i];
    }
    os << "]";
    throw OracleError(os.str());
}

}  // namespace

Vector fd_gradient(const ObjectiveProblem& problem, const Vector& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_gradient: h must be positive");
    if (!all_finite(x)) throw std::invalid_argument("fd_gradient: x must be finite");
    Vector g(x.size(), 0.0);
    Vector probe = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + h;
        const double fp = problem.value(probe);
        if (!std::isfinite(fp)) throw_probe_failure("objective value", probe);
        probe[i] = x[i] - h;
        const double fm = problem.value(probe);
        if (!std::isfinite(fm)) throw_probe_failure("objective value", probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

SquareMatrix fd_hessian(const ObjectiveProblem& problem, const Vector& x, double h) {
    if (h <= 0.0) throw std::invalid_argument("fd_hessian: h must be positive");
    const std::size_t n = x.size();
    SquareMatrix hess(n);
    Vector probe = x;
    for (std::size_t j = 0; j < n; ++j) {
        probe[j] = x[j] + h;
        const Vector gp = problem.gradient(probe);
        if (!all_finite(gp)) throw_probe_failure("gradient", probe);
        probe[j] = x[j] - h;
        const Vector gm = problem.gradient(probe);
        if (!all_finite(gm)) throw_probe_failure("gradient", probe);
        probe[j] = x[j];
        for (std::size_t i = 0; i < n; ++i) hess(i, j) = (gp[i] - gm[i]) / (2.0 * h);
    }
    hess.symmetrize();
    return hess;
}

}  // namespace ecco
