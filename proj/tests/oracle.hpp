#pragma once

// Deliberately naive reference computations used to cross-check the library:
// explicit transition matrices, full linear solves on the product chain and
// brute-force matrix powers. Small n only.

#include <Eigen/Dense>

#include "crw/graph.hpp"

namespace oracle {

inline Eigen::MatrixXd lazy_matrix(const crw::Graph& g) {
    const auto n = Eigen::Index(g.n());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (crw::Vertex u = 0; u < g.n(); ++u) {
        p(u, u) += 0.5;
        for (crw::Vertex v : g.neighbors(u)) {
            p(u, v) += 0.5 / double(g.degree(u));
        }
    }
    return p;
}

// Expected hitting times of `target` by solving (I - P) h = 1 off the target.
inline Eigen::VectorXd hitting(const crw::Graph& g, crw::Vertex target) {
    const Eigen::MatrixXd p = lazy_matrix(g);
    const auto n = p.rows();
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - p;
    Eigen::VectorXd b = Eigen::VectorXd::Ones(n);
    a.row(target).setZero();
    a(target, target) = 1.0;
    b(target) = 0.0;
    return a.fullPivLu().solve(b);
}

// Meeting times from the explicit (n^2 x n^2) product chain with absorbing diagonal.
inline Eigen::MatrixXd meeting(const crw::Graph& g) {
    const Eigen::MatrixXd p = lazy_matrix(g);
    const auto n = p.rows();
    const auto idx = [n](Eigen::Index u, Eigen::Index v) { return u * n + v; };
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n * n, n * n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n * n);
    for (Eigen::Index u = 0; u < n; ++u) {
        for (Eigen::Index v = 0; v < n; ++v) {
            if (u == v) {
                continue;
            }
            b(idx(u, v)) = 1.0;
            for (Eigen::Index x = 0; x < n; ++x) {
                for (Eigen::Index y = 0; y < n; ++y) {
                    a(idx(u, v), idx(x, y)) -= p(u, x) * p(v, y);
                }
            }
        }
    }
    // Diagonal states are absorbing with value 0; their rows read m = 0 and
    // their columns must not feed the off-diagonal equations.
    for (Eigen::Index u = 0; u < n; ++u) {
        const auto d = idx(u, u);
        a.col(d).setZero();
        a.row(d).setZero();
        a(d, d) = 1.0;
    }
    const Eigen::VectorXd m = a.fullPivLu().solve(b);
    return m.reshaped(n, n).transpose();
}

// First t with max over pairs of TV(P^t(u,.), P^t(v,.)) <= eps, by matrix powers.
inline std::size_t mixing(const crw::Graph& g, double eps, std::size_t limit = 100000) {
    const Eigen::MatrixXd p = lazy_matrix(g);
    const auto n = p.rows();
    Eigen::MatrixXd pt = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t t = 0; t <= limit; ++t) {
        double worst = 0.0;
        for (Eigen::Index u = 0; u < n; ++u) {
            for (Eigen::Index v = u + 1; v < n; ++v) {
                worst = std::max(worst, 0.5 * (pt.row(u) - pt.row(v)).cwiseAbs().sum());
            }
        }
        if (worst <= eps) {
            return t;
        }
        pt = pt * p;
    }
    return limit + 1;
}

} // namespace oracle
