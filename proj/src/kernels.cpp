#include "l4dec/kernels.hpp"

#include <vector>

namespace l4dec::kernels {

namespace {

// Fixed block size: partial results are computed per block in index order and
// combined by a pairwise tree over block indices. Both the block boundaries
// and the combine topology are independent of the thread count, which is what
// makes Exec::Parallel bitwise reproducible.
constexpr Eigen::Index kBlock = 2048;

Eigen::Index block_count(Eigen::Index n) { return (n + kBlock - 1) / kBlock; }

double tree_combine(std::vector<double>& parts) {
    std::size_t m = parts.size();
    while (m > 1) {
        const std::size_t half = (m + 1) / 2;
        for (std::size_t i = 0; i < m / 2; ++i) parts[i] = parts[2 * i] + parts[2 * i + 1];
        if (m % 2) parts[half - 1] = parts[m - 1];
        m = half;
    }
    return parts.empty() ? 0.0 : parts[0];
}

Eigen::VectorXd tree_combine_vec(std::vector<Eigen::VectorXd>& parts) {
    std::size_t m = parts.size();
    while (m > 1) {
        const std::size_t half = (m + 1) / 2;
        for (std::size_t i = 0; i < m / 2; ++i) parts[i] = parts[2 * i] + parts[2 * i + 1];
        if (m % 2) parts[half - 1] = std::move(parts[m - 1]);
        m = half;
    }
    return parts[0];
}

Eigen::MatrixXd tree_combine_mat(std::vector<Eigen::MatrixXd>& parts) {
    std::size_t m = parts.size();
    while (m > 1) {
        const std::size_t half = (m + 1) / 2;
        for (std::size_t i = 0; i < m / 2; ++i) parts[i] = parts[2 * i] + parts[2 * i + 1];
        if (m % 2) parts[half - 1] = std::move(parts[m - 1]);
        m = half;
    }
    return parts[0];
}

double quartic_sum_block(const Eigen::MatrixXd& Y, const Eigen::VectorXd& q,
                         Eigen::Index lo, Eigen::Index hi) {
    double s = 0.0;
    for (Eigen::Index k = lo; k < hi; ++k) {
        const double t = Y.col(k).dot(q);
        const double t2 = t * t;
        s += t2 * t2;
    }
    return s;
}

void quartic_grad_block(const Eigen::MatrixXd& Y, const Eigen::VectorXd& q,
                        Eigen::Index lo, Eigen::Index hi, Eigen::VectorXd& c,
                        double& s4, Eigen::VectorXd& g) {
    s4 = 0.0;
    g.setZero(Y.rows());
    for (Eigen::Index k = lo; k < hi; ++k) {
        const double t = Y.col(k).dot(q);
        c(k) = t;
        const double t3 = t * t * t;
        s4 += t3 * t;
        g.noalias() += t3 * Y.col(k);
    }
}

void hessvec_block(const Eigen::MatrixXd& Y, const Eigen::VectorXd& c,
                   const Eigen::VectorXd& v, Eigen::Index lo, Eigen::Index hi,
                   Eigen::VectorXd& out) {
    out.setZero(Y.rows());
    for (Eigen::Index k = lo; k < hi; ++k) {
        const double u = Y.col(k).dot(v);
        out.noalias() += (3.0 * c(k) * c(k) * u) * Y.col(k);
    }
}

}  // namespace

double quartic_sum(const Eigen::MatrixXd& Y, const Eigen::VectorXd& q, Exec exec) {
    const Eigen::Index n = Y.cols();
    if (exec == Exec::Serial) return quartic_sum_block(Y, q, 0, n);
    if (exec == Exec::ParallelFast) {
        double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = Y.col(k).dot(q);
            const double t2 = t * t;
            s += t2 * t2;
        }
        return s;
    }
    const Eigen::Index nb = block_count(n);
    std::vector<double> parts(nb);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b)
        parts[b] = quartic_sum_block(Y, q, b * kBlock, std::min(n, (b + 1) * kBlock));
    return tree_combine(parts);
}

QuarticGrad quartic_grad(const Eigen::MatrixXd& Y, const Eigen::VectorXd& q, Exec exec) {
    const Eigen::Index n = Y.cols();
    QuarticGrad out;
    out.c.resize(n);
    if (exec == Exec::Serial) {
        quartic_grad_block(Y, q, 0, n, out.c, out.s4, out.g);
        return out;
    }
    if (n == 0) {
        out.s4 = 0.0;
        out.g = Eigen::VectorXd::Zero(Y.rows());
        return out;
    }
    const Eigen::Index nb = block_count(n);
    std::vector<double> s_parts(nb);
    std::vector<Eigen::VectorXd> g_parts(nb);
    if (exec == Exec::ParallelFast) {
        // Unordered accumulation; per-thread partials merged under a critical
        // section in arrival order.
        double s4 = 0.0;
        Eigen::VectorXd g = Eigen::VectorXd::Zero(Y.rows());
#pragma omp parallel
        {
            double ls = 0.0;
            Eigen::VectorXd lg = Eigen::VectorXd::Zero(Y.rows());
#pragma omp for schedule(static) nowait
            for (Eigen::Index k = 0; k < n; ++k) {
                const double t = Y.col(k).dot(q);
                out.c(k) = t;
                const double t3 = t * t * t;
                ls += t3 * t;
                lg.noalias() += t3 * Y.col(k);
            }
#pragma omp critical
            {
                s4 += ls;
                g += lg;
            }
        }
        out.s4 = s4;
        out.g = std::move(g);
        return out;
    }
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b)
        quartic_grad_block(Y, q, b * kBlock, std::min(n, (b + 1) * kBlock), out.c,
                           s_parts[b], g_parts[b]);
    out.s4 = tree_combine(s_parts);
    out.g = tree_combine_vec(g_parts);
    return out;
}

Eigen::VectorXd quartic_hessvec(const Eigen::MatrixXd& Y, const Eigen::VectorXd& c,
                                const Eigen::VectorXd& v, Exec exec) {
    const Eigen::Index n = Y.cols();
    if (exec == Exec::Serial) {
        Eigen::VectorXd out;
        hessvec_block(Y, c, v, 0, n, out);
        return out;
    }
    if (exec == Exec::ParallelFast) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(Y.rows());
#pragma omp parallel
        {
            Eigen::VectorXd local = Eigen::VectorXd::Zero(Y.rows());
#pragma omp for schedule(static) nowait
            for (Eigen::Index k = 0; k < n; ++k) {
                const double u = Y.col(k).dot(v);
                local.noalias() += (3.0 * c(k) * c(k) * u) * Y.col(k);
            }
#pragma omp critical
            out += local;
        }
        return out;
    }
    if (n == 0) return Eigen::VectorXd::Zero(Y.rows());
    const Eigen::Index nb = block_count(n);
    std::vector<Eigen::VectorXd> parts(nb);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b)
        hessvec_block(Y, c, v, b * kBlock, std::min(n, (b + 1) * kBlock), parts[b]);
    return tree_combine_vec(parts);
}

Eigen::MatrixXd weighted_gram(const Eigen::MatrixXd& Y, const Eigen::VectorXd& w, Exec exec) {
    const Eigen::Index n = Y.cols();
    const Eigen::Index p = Y.rows();
    if (exec == Exec::Serial) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p, p);
        for (Eigen::Index k = 0; k < n; ++k)
            G.noalias() += w(k) * (Y.col(k) * Y.col(k).transpose());
        return G;
    }
    if (n == 0) return Eigen::MatrixXd::Zero(p, p);
    const Eigen::Index nb = block_count(n);
    std::vector<Eigen::MatrixXd> parts(nb);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b) {
        const Eigen::Index lo = b * kBlock;
        const Eigen::Index len = std::min(n, (b + 1) * kBlock) - lo;
        const auto Yb = Y.middleCols(lo, len);
        parts[b].noalias() =
            Yb * w.segment(lo, len).asDiagonal() * Yb.transpose();
    }
    if (exec == Exec::ParallelFast) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p, p);
        for (auto& part : parts) G += part;
        return G;
    }
    return tree_combine_mat(parts);
}

double shifted_quartic_sum(const Eigen::VectorXd& c0, const Eigen::VectorXd& cd,
                           double alpha, double scale, Exec exec) {
    const Eigen::Index n = c0.size();
    auto block = [&](Eigen::Index lo, Eigen::Index hi) {
        double s = 0.0;
        for (Eigen::Index k = lo; k < hi; ++k) {
            const double t = scale * (c0(k) + alpha * cd(k));
            const double t2 = t * t;
            s += t2 * t2;
        }
        return s;
    };
    if (exec == Exec::Serial) return block(0, n);
    if (exec == Exec::ParallelFast) {
        double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double t = scale * (c0(k) + alpha * cd(k));
            const double t2 = t * t;
            s += t2 * t2;
        }
        return s;
    }
    const Eigen::Index nb = block_count(n);
    std::vector<double> parts(nb);
#pragma omp parallel for schedule(static)
    for (Eigen::Index b = 0; b < nb; ++b)
        parts[b] = block(b * kBlock, std::min(n, (b + 1) * kBlock));
    return tree_combine(parts);
}

}  // namespace l4dec::kernels
