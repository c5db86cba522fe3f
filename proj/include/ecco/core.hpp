#pragma once

// Dense vector/matrix primitives, the objective-function contract, evaluation
// counting, and finite-difference oracles used as ground truth in tests.

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ecco {

using Vector = std::vector<double>;

bool all_finite(const Vector& v);
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double norm_inf(const Vector& v);

/// Dense n-by-n matrix, row-major.
class SquareMatrix {
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    const std::vector<double>& data() const { return data_; }

    Vector matvec(const Vector& x) const;

    /// (A + A^T) / 2 in place.
    void symmetrize();

    /// Largest |A_ij - A_ji| relative to max(1, |A_ij|).
    double symmetry_error() const;

private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

struct EvalCounters {
    std::int64_t n_f = 0;
    std::int64_t n_grad = 0;
    std::int64_t n_hess = 0;
};

/// A minimization problem. value/gradient/hessian must be pure; hessian and
/// the batch interface are optional (empty std::function when absent).
/// Batched problems evaluate a deterministic sample identified by a batch
/// counter, cycling through the data.
struct ObjectiveProblem {
    std::string name;
    int dim = 0;
    std::function<double(const Vector&)> value;
    std::function<Vector(const Vector&)> gradient;
    std::function<SquareMatrix(const Vector&)> hessian;
    std::function<double(const Vector&, std::uint64_t)> batch_value;
    std::function<Vector(const Vector&, std::uint64_t)> batch_gradient;
    std::vector<std::pair<Vector, double>> known_minima;
    std::vector<Vector> known_critical_points;
    std::vector<Vector> default_starts;

    bool has_hessian() const { return static_cast<bool>(hessian); }
    bool has_batches() const { return batch_value && batch_gradient; }
};

/// Raised when a finite-difference probe hits a non-finite evaluation.
class OracleError : public std::runtime_error {
public:
    explicit OracleError(const std::string& what) : std::runtime_error(what) {}
};

/// Counting view over a problem; increments the shared counters on every call.
class CountedProblem {
public:
    CountedProblem(const ObjectiveProblem& p, EvalCounters& c) : p_(&p), c_(&c) {}

    double value(const Vector& x) const {
        ++c_->n_f;
        return p_->value(x);
    }
    Vector gradient(const Vector& x) const {
        ++c_->n_grad;
        return p_->gradient(x);
    }
    SquareMatrix hessian(const Vector& x) const {
        ++c_->n_hess;
        return p_->hessian(x);
    }
    double batch_value(const Vector& x, std::uint64_t b) const {
        ++c_->n_f;
        return p_->batch_value(x, b);
    }
    Vector batch_gradient(const Vector& x, std::uint64_t b) const {
        ++c_->n_grad;
        return p_->batch_gradient(x, b);
    }
    const ObjectiveProblem& problem() const { return *p_; }

private:
    const ObjectiveProblem* p_;
    EvalCounters* c_;
};

/// Central-difference gradient estimate, element i =
/// (f(x+h e_i) - f(x-h e_i)) / (2h).
Vector fd_gradient(const ObjectiveProblem& problem, const Vector& x, double h = 1e-5);

/// Central differences of the analytic gradient, symmetrized as (H+H^T)/2.
SquareMatrix fd_hessian(const ObjectiveProblem& problem, const Vector& x, double h = 1e-5);

}  // namespace ecco
