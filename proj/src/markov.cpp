#include "crw/markov.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "crw/parallel.hpp"

namespace crw {

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw std::invalid_argument("eps must lie in (0, 1)");
    }
}

void check_vertex(const Graph& g, Vertex v) {
    if (v >= g.n()) {
        throw std::out_of_range("vertex " + std::to_string(v) + " out of range for n=" +
                                std::to_string(g.n()));
    }
}

// Row-distribution matrix stepped forward one lazy step at a time, with a
// budget on the total number of steps taken.
class RowEvolution {
public:
    RowEvolution(const Graph& g, const MarkovOptions& opt)
        : g_(g), budget_(opt.step_budget),
          rows_(Eigen::MatrixXd::Identity(Eigen::Index(g.n()), Eigen::Index(g.n()))) {}

    void step() {
        if (++taken_ > budget_) {
            throw BudgetExceeded("row evolution exceeded " + std::to_string(budget_) + " steps");
        }
        lazy_step_rows(g_, rows_);
        ++t_;
    }

    std::size_t t() const noexcept { return t_; }
    const Eigen::MatrixXd& rows() const noexcept { return rows_; }

    void restore(const Eigen::MatrixXd& rows, std::size_t t) {
        rows_ = rows;
        t_ = t;
    }

private:
    const Graph& g_;
    std::size_t budget_;
    std::size_t taken_ = 0;
    std::size_t t_ = 0;
    Eigen::MatrixXd rows_;
};

Eigen::SparseMatrix<double> symmetric_walk_matrix(const Graph& g) {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(g.n() + 2 * g.m());
    for (Vertex u = 0; u < g.n(); ++u) {
        trips.emplace_back(u, u, g.degree(u) == 0 ? 1.0 : 0.5);
        for (Vertex v : g.neighbors(u)) {
            trips.emplace_back(u, v, 0.5 / std::sqrt(double(g.degree(u)) * g.degree(v)));
        }
    }
    Eigen::SparseMatrix<double> s(Eigen::Index(g.n()), Eigen::Index(g.n()));
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

// Restarted Lanczos with full reorthogonalisation on the symmetric walk
// matrix, deflated against its top eigenvector sqrt(pi). All eigenvalues of
// the lazy chain are non-negative, so the top Ritz value of the deflated
// operator converges to lambda_2.
SpectralSummary spectral_iterative(const Graph& g) {
    const auto n = Eigen::Index(g.n());
    const auto s = symmetric_walk_matrix(g);
    const Eigen::VectorXd top = stationary(g).cwiseSqrt().normalized();
    auto deflate = [&](Eigen::VectorXd& x) { x -= top.dot(x) * top; };

    const Eigen::Index krylov = std::min<Eigen::Index>(n - 1, 120);
    Eigen::VectorXd start = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).array().sin();
    deflate(start);
    start.normalize();

    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 200; ++restart) {
        Eigen::MatrixXd basis(n, krylov);
        Eigen::VectorXd alpha = Eigen::VectorXd::Zero(krylov);
        Eigen::VectorXd beta = Eigen::VectorXd::Zero(krylov);
        basis.col(0) = start;
        Eigen::Index used = krylov;
        for (Eigen::Index j = 0; j < krylov; ++j) {
            Eigen::VectorXd w = s * basis.col(j);
            deflate(w);
            alpha(j) = basis.col(j).dot(w);
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            const double b = w.norm();
            if (j + 1 == krylov) {
                break;
            }
            if (b < 1e-14) {
                used = j + 1;
                break;
            }
            beta(j) = b;
            basis.col(j + 1) = w / b;
        }
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(used, used);
        for (Eigen::Index j = 0; j < used; ++j) {
            tri(j, j) = alpha(j);
            if (j + 1 < used) {
                tri(j, j + 1) = tri(j + 1, j) = beta(j);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(tri);
        lambda = small.eigenvalues()(used - 1);
        Eigen::VectorXd ritz = basis.leftCols(used) * small.eigenvectors().col(used - 1);
        deflate(ritz);
        ritz.normalize();
        Eigen::VectorXd r = s * ritz;
        deflate(r);
        residual = (r - lambda * ritz).norm();
        if (residual <= 1e-9) {
            break;
        }
        start = ritz;
    }
    if (!(residual <= 1e-8)) {
        throw ConvergenceFailure("Lanczos residual " + std::to_string(residual));
    }
    return {lambda, 1.0 - lambda, SpectralMethod::iterative, residual};
}

double hitting_residual(const Graph& g, Vertex target, const Eigen::VectorXd& h) {
    double worst = 0.0;
    for (Vertex u = 0; u < g.n(); ++u) {
        if (u == target) {
            continue;
        }
        double ph = 0.5 * h(u);
        for (Vertex w : g.neighbors(u)) {
            ph += h(w) / (2.0 * g.degree(u));
        }
        worst = std::max(worst, std::abs(h(u) - 1.0 - ph));
    }
    return worst;
}

} // namespace

DistVector stationary(const Graph& g) {
    const auto n = Eigen::Index(g.n());
    if (n == 1) {
        return DistVector::Ones(1);
    }
    DistVector pi(n);
    const double two_m = 2.0 * double(g.m());
    for (Vertex u = 0; u < g.n(); ++u) {
        pi(u) = double(g.degree(u)) / two_m;
    }
    return pi;
}

DistVector point_mass(std::size_t n, Vertex u) {
    DistVector d = DistVector::Zero(Eigen::Index(n));
    d(u) = 1.0;
    return d;
}

DistVector tstep_row(const Graph& g, Vertex u, std::size_t t) {
    check_vertex(g, u);
    DistVector d = point_mass(g.n(), u);
    for (std::size_t i = 0; i < t; ++i) {
        d = lazy_step(g, d);
    }
    return d;
}

bool is_distribution(const DistVector& d, double tol) {
    return d.size() > 0 && d.minCoeff() >= 0.0 && std::abs(d.sum() - 1.0) <= tol;
}

Eigen::MatrixXd transition_matrix(const Graph& g) {
    const auto n = Eigen::Index(g.n());
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (Vertex u = 0; u < g.n(); ++u) {
        if (g.degree(u) == 0) {
            p(u, u) = 1.0;
            continue;
        }
        p(u, u) = 0.5;
        for (Vertex v : g.neighbors(u)) {
            p(u, v) = 0.5 / g.degree(u);
        }
    }
    return p;
}

void lazy_step_rows(const Graph& g, Eigen::MatrixXd& rows) {
    if (g.n() == 1) {
        return;
    }
    // Column v of R P is R(:,v)/2 + sum_{u in N(v)} R(:,u) / (2 deg u).
    Eigen::MatrixXd scaled = rows;
    for (Vertex u = 0; u < g.n(); ++u) {
        scaled.col(u) *= 0.5 / g.degree(u);
    }
    rows *= 0.5;
    for (Vertex v = 0; v < g.n(); ++v) {
        for (Vertex u : g.neighbors(v)) {
            rows.col(v) += scaled.col(u);
        }
    }
}

double max_pairwise_tv(const Eigen::MatrixXd& rows) {
    const Eigen::MatrixXd cols = rows.transpose();
    double worst = 0.0;
    for (Eigen::Index u = 0; u < cols.cols(); ++u) {
        for (Eigen::Index v = u + 1; v < cols.cols(); ++v) {
            worst = std::max(worst, 0.5 * (cols.col(u) - cols.col(v)).lpNorm<1>());
        }
    }
    return worst;
}

double max_tv_to(const Eigen::MatrixXd& rows, const DistVector& pi) {
    return 0.5 * (rows.rowwise() - pi.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
}

double separation_distance(const Eigen::MatrixXd& rows, const DistVector& pi) {
    const double worst = (1.0 - (rows.array().rowwise() / pi.transpose().array())).maxCoeff();
    return std::max(0.0, worst);
}

std::string_view to_string(MixingMethod m) noexcept {
    return m == MixingMethod::pairwise ? "pairwise" : "bracket";
}

std::string_view to_string(SpectralMethod m) noexcept {
    return m == SpectralMethod::dense ? "dense" : "iterative";
}

MixingTime mixing_time(const Graph& g, double eps, const MarkovOptions& opt) {
    check_eps(eps);
    MixingTime out;
    out.eps = eps;
    if (g.n() == 1) {
        return out;
    }
    const DistVector pi = stationary(g);
    RowEvolution evo(g, opt);

    // d(t) <= dbar(t) <= 2 d(t): dbar cannot reach eps before d does, and has
    // reached it once d <= eps/2.
    while (max_tv_to(evo.rows(), pi) > eps) {
        evo.step();
    }
    const std::size_t first = evo.t();

    if (g.n() > opt.dense_mixing_limit) {
        while (max_tv_to(evo.rows(), pi) > eps / 2) {
            evo.step();
        }
        out.method = MixingMethod::bracket;
        out.lower = first;
        out.upper = evo.t();
        return out;
    }

    if (max_pairwise_tv(evo.rows()) <= eps) {
        out.lower = out.upper = first;
        return out;
    }
    Eigen::MatrixXd lo_rows = evo.rows();
    std::size_t lo = first;
    while (max_tv_to(evo.rows(), pi) > eps / 2) {
        evo.step();
    }
    std::size_t hi = evo.t();

    // dbar is non-increasing: bisect on (lo, hi] replaying steps from lo.
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        evo.restore(lo_rows, lo);
        while (evo.t() < mid) {
            evo.step();
        }
        if (max_pairwise_tv(evo.rows()) <= eps) {
            hi = mid;
        } else {
            lo = mid;
            lo_rows = evo.rows();
        }
    }
    out.lower = out.upper = hi;
    return out;
}

std::size_t separation_time(const Graph& g, double eps, const MarkovOptions& opt) {
    check_eps(eps);
    if (g.n() == 1) {
        return 0;
    }
    const DistVector pi = stationary(g);
    RowEvolution evo(g, opt);
    while (separation_distance(evo.rows(), pi) > eps) {
        evo.step();
    }
    return evo.t();
}

std::size_t mixing_time_stationary(const Graph& g, double eps, const MarkovOptions& opt) {
    check_eps(eps);
    if (g.n() == 1) {
        return 0;
    }
    const DistVector pi = stationary(g);
    RowEvolution evo(g, opt);
    while (max_tv_to(evo.rows(), pi) > eps) {
        evo.step();
    }
    return evo.t();
}

SpectralSummary spectral(const Graph& g, const MarkovOptions& opt) {
    if (g.n() == 1) {
        return {0.0, 1.0, SpectralMethod::dense, 0.0};
    }
    if (g.n() > opt.dense_spectral_limit) {
        return spectral_iterative(g);
    }
    const Eigen::MatrixXd s = symmetric_walk_matrix(g);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceFailure("dense symmetric eigensolver failed");
    }
    const auto n = Eigen::Index(g.n());
    const double lambda2 = solver.eigenvalues()(n - 2);
    const Eigen::VectorXd x = solver.eigenvectors().col(n - 2);
    const double residual = (s * x - lambda2 * x).norm();
    if (residual > 1e-8) {
        throw ConvergenceFailure("dense eigen residual " + std::to_string(residual));
    }
    return {lambda2, 1.0 - lambda2, SpectralMethod::dense, residual};
}

HittingProfile hitting_to(const Graph& g, Vertex target, const MarkovOptions& opt) {
    check_vertex(g, target);
    const auto n = Eigen::Index(g.n());
    HittingProfile out;
    out.target = target;
    out.h = Eigen::VectorXd::Zero(n);
    if (n == 1) {
        return out;
    }
    // Unknowns are the vertices other than the target, in order.
    auto index = [target](Vertex u) { return Eigen::Index(u < target ? u : u - 1); };

    Eigen::VectorXd x;
    if (g.n() <= opt.dense_hitting_limit) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n - 1, n - 1);
        for (Vertex u = 0; u < g.n(); ++u) {
            if (u == target) {
                continue;
            }
            a(index(u), index(u)) -= 0.5;
            for (Vertex w : g.neighbors(u)) {
                if (w != target) {
                    a(index(u), index(w)) -= 0.5 / g.degree(u);
                }
            }
        }
        x = a.partialPivLu().solve(Eigen::VectorXd::Ones(n - 1));
    } else {
        // 2 D (I - P) = D - A: the reduced Laplacian system (D - A) h = 2 deg
        // is symmetric positive definite.
        std::vector<Eigen::Triplet<double>> trips;
        Eigen::VectorXd rhs(n - 1);
        for (Vertex u = 0; u < g.n(); ++u) {
            if (u == target) {
                continue;
            }
            trips.emplace_back(index(u), index(u), double(g.degree(u)));
            rhs(index(u)) = 2.0 * g.degree(u);
            for (Vertex w : g.neighbors(u)) {
                if (w != target) {
                    trips.emplace_back(index(u), index(w), -1.0);
                }
            }
        }
        Eigen::SparseMatrix<double> lap(n - 1, n - 1);
        lap.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> chol(lap);
        if (chol.info() != Eigen::Success) {
            throw SolverFailure("reduced Laplacian factorisation failed");
        }
        x = chol.solve(rhs);
    }
    for (Vertex u = 0; u < g.n(); ++u) {
        if (u != target) {
            out.h(u) = x(index(u));
        }
    }
    if (!out.h.allFinite()) {
        throw SolverFailure("non-finite hitting times");
    }
    out.residual = hitting_residual(g, target, out.h);
    return out;
}

Eigen::MatrixXd hitting_matrix(const Graph& g) {
    const auto n = Eigen::Index(g.n());
    if (n == 1) {
        return Eigen::MatrixXd::Zero(1, 1);
    }
    const DistVector pi = stationary(g);
    Eigen::MatrixXd a = -transition_matrix(g);
    a.diagonal().array() += 1.0;
    a.rowwise() += pi.transpose();
    const Eigen::MatrixXd z = a.partialPivLu().inverse();
    Eigen::MatrixXd h(n, n);
    for (Eigen::Index v = 0; v < n; ++v) {
        h.col(v) = (z(v, v) - z.col(v).array()) / pi(v);
        h(v, v) = 0.0;
    }
    if (!h.allFinite()) {
        throw SolverFailure("non-finite fundamental matrix");
    }
    return h;
}

double t_hit(const Graph& g, const MarkovOptions& opt) {
    if (g.n() == 1) {
        return 0.0;
    }
    if (g.n() <= opt.fundamental_limit) {
        return hitting_matrix(g).maxCoeff();
    }
    std::vector<double> worst(g.n(), 0.0);
    parallel_for(g.n(), [&](std::size_t v) {
        worst[v] = hitting_to(g, static_cast<Vertex>(v), opt).h.maxCoeff();
    });
    return *std::max_element(worst.begin(), worst.end());
}

CollisionStats collision_stats(const Graph& g, std::size_t window) {
    CollisionStats cs;
    cs.t_mix_used = window;
    cs.pi_norm_sq = stationary(g).squaredNorm();
    const auto n = Eigen::Index(g.n());
    Eigen::VectorXd collisions = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd returns = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd rows = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t t = 0; t < window; ++t) {
        collisions += rows.rowwise().squaredNorm();
        returns += rows.diagonal();
        if (t + 1 < window) {
            lazy_step_rows(g, rows);
        }
    }
    cs.c_max = collisions.maxCoeff();
    cs.c_min = collisions.minCoeff();
    cs.r_max = returns.maxCoeff();
    return cs;
}

CollisionStats collision_stats(const Graph& g, const MarkovOptions& opt) {
    const MixingTime tm = mixing_time(g, kInvE, opt);
    // n = 1 mixes at t = 0; keep the t = 0 self-collision term regardless.
    CollisionStats cs = collision_stats(g, std::max<std::size_t>(tm.value(), 1));
    cs.t_mix_method = tm.method;
    return cs;
}

ExpanderSpectrum expander_spectrum(const Graph& g, const LowerBoundLayout& layout) {
    const Vertex begin = layout.expander_begin();
    const std::size_t size = 2 * layout.expander_side;
    if (begin + size > g.n()) {
        throw std::invalid_argument("layout does not match the graph");
    }
    const auto k = Eigen::Index(size);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    for (Vertex u = begin; u < begin + size; ++u) {
        for (Vertex v : g.neighbors(u)) {
            if (v >= begin && v < begin + size) {
                a(u - begin, v - begin) = 1.0;
            }
        }
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw ConvergenceFailure("expander eigensolver failed");
    }
    // Eigenvalues ascend; the extremes are -r and r for a connected bipartite block.
    const auto& ev = es.eigenvalues();
    ExpanderSpectrum out;
    out.degree = layout.expander_degree;
    out.lambda = std::max(std::abs(ev(1)), std::abs(ev(k - 2)));
    out.ramanujan_bound = 2.0 * std::sqrt(double(layout.expander_degree) - 1.0);
    return out;
}

} // namespace crw
