// Deterministic batch minimizer: L-BFGS with Armijo backtracking, falling
// back to steepest descent when the quasi-Newton direction stalls. Every
// accepted step strictly decreases the objective, so the recorded trace is
// monotone by construction.
#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <vector>

#include "sentikit/common.hpp"

namespace sentikit::optim {

struct ObjectiveFunction {
    virtual ~ObjectiveFunction() = default;
    virtual size_t size() const = 0;
    // Returns f(x) and fills grad (resized by the caller to size()).
    virtual double value_and_grad(const std::vector<double>& x, std::vector<double>& grad) const = 0;
};

struct MinimizeOptions {
    int max_iter = 1000;
    double rel_tol = 1e-6;   // relative objective decrease over the stall window
    double grad_tol = 1e-12; // absolute gradient-norm stop
    int history = 10;
    // Convergence looks at progress across this many accepted steps, which
    // keeps a single truncated step from masquerading as optimality.
    int stall_window = 10;
};

struct MinimizeResult {
    std::vector<double> x;
    double fx = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // accepted objective values, starting at f(x0)
};

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace detail

inline MinimizeResult minimize(const ObjectiveFunction& f, std::vector<double> x0,
                               const MinimizeOptions& opt = {}) {
    using detail::dot;
    using detail::norm2;
    const size_t n = f.size();
    MinimizeResult res;
    res.x = std::move(x0);
    res.x.resize(n, 0.0);

    std::vector<double> grad(n), new_grad(n), direction(n), trial(n);
    double fx = f.value_and_grad(res.x, grad);
    res.trace.push_back(fx);

    struct Pair {
        std::vector<double> s, y;
        double rho;
    };
    std::deque<Pair> history;

    const double c1 = 1e-4;
    int iter = 0;
    for (; iter < opt.max_iter; ++iter) {
        double gnorm = norm2(grad);
        if (gnorm <= opt.grad_tol) {
            res.converged = true;
            break;
        }

        // two-loop recursion
        direction = grad;
        std::vector<double> alpha(history.size());
        for (size_t k = history.size(); k-- > 0;) {
            alpha[k] = history[k].rho * dot(history[k].s, direction);
            for (size_t i = 0; i < n; ++i) direction[i] -= alpha[k] * history[k].y[i];
        }
        if (!history.empty()) {
            const Pair& last = history.back();
            double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (double& d : direction) d *= gamma;
        }
        for (size_t k = 0; k < history.size(); ++k) {
            double beta = history[k].rho * dot(history[k].y, direction);
            for (size_t i = 0; i < n; ++i) direction[i] += (alpha[k] - beta) * history[k].s[i];
        }
        for (double& d : direction) d = -d;

        // Backtracking Armijo search; on success `trial` holds the new point
        // and `new_grad` its gradient.
        double accepted_f = fx;
        auto line_search = [&](double t0) -> double {
            double slope = dot(grad, direction);
            if (slope >= 0) return -1.0;  // not a descent direction
            double t = t0;
            for (int ls = 0; ls < 60; ++ls) {
                for (size_t i = 0; i < n; ++i) trial[i] = res.x[i] + t * direction[i];
                double ft = f.value_and_grad(trial, new_grad);
                if (std::isfinite(ft) && ft <= fx + c1 * t * slope) {
                    accepted_f = ft;
                    return t;
                }
                t *= 0.5;
            }
            return -1.0;
        };

        double step = line_search(history.empty() ? 1.0 / std::max(1.0, gnorm) : 1.0);
        if (step < 0) {
            // quasi-Newton direction failed; retry along the negative gradient
            history.clear();
            for (size_t i = 0; i < n; ++i) direction[i] = -grad[i];
            step = line_search(1.0 / std::max(1.0, gnorm));
        }
        if (step < 0) {
            // No decrease along the gradient either: at numerical resolution
            // of a (possibly non-smooth) minimum.
            res.converged = true;
            break;
        }

        Pair pair;
        pair.s.resize(n);
        pair.y.resize(n);
        for (size_t i = 0; i < n; ++i) {
            pair.s[i] = trial[i] - res.x[i];
            pair.y[i] = new_grad[i] - grad[i];
        }
        res.x.swap(trial);
        double new_fx = accepted_f;
        double sy = dot(pair.s, pair.y);
        if (sy > 1e-12 * norm2(pair.s) * norm2(pair.y)) {
            pair.rho = 1.0 / sy;
            history.push_back(std::move(pair));
            if (history.size() > static_cast<size_t>(opt.history)) history.pop_front();
        }

        grad.swap(new_grad);
        res.trace.push_back(new_fx);
        fx = new_fx;
        const size_t k = res.trace.size();
        const size_t window = static_cast<size_t>(opt.stall_window);
        if (k > window) {
            double past = res.trace[k - 1 - window];
            if (past - fx <= opt.rel_tol * std::max(1.0, std::abs(fx))) {
                res.converged = true;
                ++iter;
                break;
            }
        }
    }

    res.fx = fx;
    res.grad_norm = norm2(grad);
    res.iterations = iter;
    return res;
}

}  // namespace sentikit::optim
