// Expected meeting times of two independent lazy walks, as absorption times
// of the product chain on ordered pairs into the diagonal.
//
// With M(u,v) the expected meeting time and Q the product chain restricted to
// off-diagonal pairs, M solves M = J + Q(M) where J is 1 off the diagonal and
// Q(X) = offdiag(P X P^T). Both routes below operate on n x n matrices with
// a pinned zero diagonal, so the Kronecker-structured operator is applied in
// O(n (n + m)) instead of materialising the (n^2 - n)-state system.

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>

#include "crw/markov.hpp"

namespace crw {

namespace {

Eigen::SparseMatrix<double> sparse_transition(const Graph& g, bool symmetric) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.n() + 2 * g.m());
    for (Vertex u = 0; u < g.n(); ++u) {
        trips.emplace_back(u, u, 0.5);
        for (Vertex v : g.neighbors(u)) {
            const double w = symmetric ? 0.5 / std::sqrt(double(g.degree(u)) * g.degree(v))
                                       : 0.5 / g.degree(u);
            trips.emplace_back(u, v, w);
        }
    }
    Eigen::SparseMatrix<double> p(Eigen::Index(g.n()), Eigen::Index(g.n()));
    p.setFromTriplets(trips.begin(), trips.end());
    return p;
}

Eigen::MatrixXd off_diagonal_ones(Eigen::Index n) {
    Eigen::MatrixXd j = Eigen::MatrixXd::Ones(n, n);
    j.diagonal().setZero();
    return j;
}

// Q(X) = offdiag(P X P^T).
Eigen::MatrixXd apply_q(const Eigen::SparseMatrix<double>& p, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd px = p * x;
    Eigen::MatrixXd out = (p * px.transpose()).transpose();
    out.diagonal().setZero();
    return out;
}

double residual_of(const Eigen::SparseMatrix<double>& p, const Eigen::MatrixXd& m) {
    Eigen::MatrixXd r = m - off_diagonal_ones(m.rows()) - apply_q(p, m);
    r.diagonal().setZero();
    return r.cwiseAbs().maxCoeff();
}

// Substituting Y = W o M with W(u,v) = sqrt(pi(u) pi(v)) turns the system into
// Y - offdiag(S Y S) = W o J with S = D^{1/2} P D^{-1/2} symmetric (the chain is
// reversible), i.e. a symmetric positive definite operator on off-diagonal
// matrices under the Frobenius inner product.
std::size_t solve_cg(const Graph& g, const MeetingOptions& mopt, Eigen::MatrixXd& m) {
    const auto n = Eigen::Index(g.n());
    const auto s = sparse_transition(g, true);
    const auto p = sparse_transition(g, false);
    const Eigen::VectorXd root_pi = stationary(g).cwiseSqrt();
    Eigen::MatrixXd w = root_pi * root_pi.transpose();
    w.diagonal().setZero();
    const Eigen::MatrixXd b = w; // W o J

    auto op = [&](const Eigen::MatrixXd& y) {
        Eigen::MatrixXd out = y - apply_q(s, y);
        out.diagonal().setZero();
        return out;
    };

    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n);
    const double b_norm = b.norm();
    std::size_t iters = 0;

    // Restart from the true residual whenever the recurrence claims
    // convergence but the unscaled residual still exceeds the tolerance.
    while (iters < mopt.max_iterations) {
        Eigen::MatrixXd r = b - op(y);
        Eigen::MatrixXd d = r;
        double rr = r.squaredNorm();
        while (iters < mopt.max_iterations && std::sqrt(rr) > 1e-14 * b_norm) {
            const Eigen::MatrixXd ad = op(d);
            const double step = rr / (d.cwiseProduct(ad)).sum();
            y += step * d;
            r -= step * ad;
            const double rr_next = r.squaredNorm();
            d = r + (rr_next / rr) * d;
            rr = rr_next;
            ++iters;
            if (iters % 32 == 0) {
                // Unscaled residual of the original system, entrywise.
                Eigen::MatrixXd scaled = r.cwiseQuotient(w);
                scaled.diagonal().setZero();
                if (scaled.cwiseAbs().maxCoeff() < 0.1 * mopt.tolerance) {
                    break;
                }
            }
        }
        m = y.cwiseQuotient(w);
        m.diagonal().setZero();
        if (residual_of(p, m) <= mopt.tolerance) {
            return iters;
        }
        if (std::sqrt(rr) <= 1e-14 * b_norm) {
            break; // stagnated at machine precision
        }
    }
    return iters;
}

std::size_t solve_jacobi(const Graph& g, const MeetingOptions& mopt, Eigen::MatrixXd& m) {
    const auto n = Eigen::Index(g.n());
    const auto p = sparse_transition(g, false);
    const Eigen::MatrixXd j = off_diagonal_ones(n);
    m = j;
    for (std::size_t sweep = 1; sweep <= mopt.max_iterations; ++sweep) {
        Eigen::MatrixXd next = j + apply_q(p, m);
        const double change = (next - m).cwiseAbs().maxCoeff();
        m = std::move(next);
        if (change <= mopt.tolerance) {
            return sweep;
        }
    }
    return mopt.max_iterations;
}

} // namespace

MeetingResult meeting_exact(const Graph& g, const MarkovOptions& opt, const MeetingOptions& mopt) {
    if (g.n() > opt.meeting_limit) {
        throw TooLarge("meeting_exact: n=" + std::to_string(g.n()) + " exceeds limit " +
                       std::to_string(opt.meeting_limit));
    }
    const auto n = Eigen::Index(g.n());
    MeetingResult out;
    if (n == 1) {
        out.times = Eigen::MatrixXd::Zero(1, 1);
        return out;
    }

    Eigen::MatrixXd m;
    out.iterations = mopt.solver == MeetingSolver::conjugate_gradient ? solve_cg(g, mopt, m)
                                                                      : solve_jacobi(g, mopt, m);
    out.residual = residual_of(sparse_transition(g, false), m);
    if (!m.allFinite() || !(out.residual <= mopt.tolerance)) {
        throw SolverFailure("product-chain residual " + std::to_string(out.residual) +
                            " after " + std::to_string(out.iterations) + " iterations");
    }

    // Symmetrise: M(u,v) = M(v,u) exactly in law; average away solver noise.
    out.times = 0.5 * (m + m.transpose());
    Eigen::Index iu = 0;
    Eigen::Index iv = 0;
    out.t_meet = out.times.maxCoeff(&iu, &iv);
    out.argmax_u = static_cast<Vertex>(std::min(iu, iv));
    out.argmax_v = static_cast<Vertex>(std::max(iu, iv));
    const DistVector pi = stationary(g);
    out.t_meet_pi = pi.transpose() * out.times * pi;
    return out;
}

} // namespace crw
