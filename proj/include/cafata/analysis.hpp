#ifndef CAFATA_ANALYSIS_HPP
#define CAFATA_ANALYSIS_HPP

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "cafata/embedding_space.hpp"
#include "cafata/errors.hpp"
#include "cafata/model.hpp"

namespace cafata {

using Matrix = std::vector<std::vector<double>>;

/// One row per user, one column per contextual factor.
struct ImportanceMatrix {
    std::vector<std::string> users;
    std::vector<std::string> factors;
    Matrix rows;
};

/// Context-free factor importance of every user: the user's scores against
/// all factor embeddings, normalized over the whole factor set.
inline ImportanceMatrix importance_matrix(const EmbeddingSpace& space,
                                          std::span<const std::string> factors) {
    if (factors.empty()) throw InvalidArgument("empty factor schema");
    ImportanceMatrix m;
    m.factors.assign(factors.begin(), factors.end());
    std::vector<std::size_t> factor_rows;
    for (const auto& f : factors) factor_rows.push_back(space.factors().index_of(f));
    for (std::size_t r = 0; r < space.users().size(); ++r) {
        if (r == EmbeddingTable::unknown_index()) continue;
        const auto u = space.users().row(r);
        std::vector<double> scores;
        for (auto fr : factor_rows) scores.push_back(detail::dot<double>(u, space.factors().row(fr)));
        m.users.push_back(space.users().id(r));
        m.rows.push_back(leaky_softmax<double>(scores, space.leaky_slope()));
    }
    return m;
}

inline ImportanceMatrix importance_matrix(const EmbeddingSpace& space, const FactorSchema& schema) {
    std::vector<std::string> factors;
    for (const auto& [f, _] : schema) factors.push_back(f);
    return importance_matrix(space, factors);
}

struct KMeansResult {
    std::vector<std::size_t> assignments;
    Matrix centroids;
    double inertia = 0.0;
    std::vector<double> inertia_history;  // after every assignment step
    std::size_t iterations = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return s;
}

inline void check_rectangular(const Matrix& rows) {
    for (const auto& r : rows) {
        if (r.size() != rows.front().size()) throw InvalidArgument("ragged matrix");
    }
}

}  // namespace detail

/// Lloyd iterations from a seeded k-means++ start. Ties go to the lower
/// cluster index; an emptied cluster keeps its previous centroid.
inline KMeansResult kmeans_cluster(const Matrix& rows, std::size_t k, std::uint64_t seed,
                                   std::size_t max_iters = 100) {
    if (k == 0) throw InvalidArgument("k must be at least 1");
    if (k > rows.size()) {
        throw InvalidArgument("k = " + std::to_string(k) + " exceeds the number of rows (" +
                              std::to_string(rows.size()) + ")");
    }
    detail::check_rectangular(rows);
    const std::size_t n = rows.size();
    const std::size_t p = rows.front().size();
    std::mt19937_64 rng(seed);

    KMeansResult res;
    {
        std::uniform_int_distribution<std::size_t> first(0, n - 1);
        res.centroids.push_back(rows[first(rng)]);
        std::vector<double> d2(n);
        while (res.centroids.size() < k) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                d2[i] = std::numeric_limits<double>::infinity();
                for (const auto& c : res.centroids) d2[i] = std::min(d2[i], detail::squared_distance(rows[i], c));
                total += d2[i];
            }
            std::size_t chosen = 0;
            if (total > 0.0) {
                std::discrete_distribution<std::size_t> pick(d2.begin(), d2.end());
                chosen = pick(rng);
            } else {
                chosen = first(rng);
            }
            res.centroids.push_back(rows[chosen]);
        }
    }

    const auto assign = [&]() {
        double inertia = 0.0;
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = detail::squared_distance(rows[i], res.centroids[0]);
            for (std::size_t c = 1; c < k; ++c) {
                const double d = detail::squared_distance(rows[i], res.centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (res.assignments[i] != best) changed = true;
            res.assignments[i] = best;
            inertia += best_d;
        }
        if (!res.inertia_history.empty() &&
            inertia > res.inertia_history.back() * (1.0 + 1e-12) + 1e-15) {
            throw std::logic_error("k-means inertia increased between iterations");
        }
        res.inertia_history.push_back(inertia);
        res.inertia = inertia;
        return changed;
    };
    const auto update = [&]() {
        // Offsets from each cluster's first member, so coincident rows give an exact centroid.
        Matrix sums(k, std::vector<double>(p, 0.0));
        std::vector<std::size_t> counts(k, 0), anchor(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = res.assignments[i];
            if (counts[c]++ == 0) anchor[c] = i;
            for (std::size_t j = 0; j < p; ++j) sums[c][j] += rows[i][j] - rows[anchor[c]][j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) continue;
            for (std::size_t j = 0; j < p; ++j) {
                res.centroids[c][j] = rows[anchor[c]][j] + sums[c][j] / static_cast<double>(counts[c]);
            }
        }
    };

    res.assignments.assign(n, std::numeric_limits<std::size_t>::max());
    assign();
    for (res.iterations = 1; res.iterations <= max_iters; ++res.iterations) {
        update();
        if (!assign()) break;
    }
    res.iterations = std::min(res.iterations, max_iters);
    update();
    assign();
    return res;
}

/// Final inertia for k = 1..k_max, for elbow inspection.
inline std::vector<double> inertia_by_k(const Matrix& rows, std::size_t k_max, std::uint64_t seed,
                                        std::size_t max_iters = 100) {
    std::vector<double> out;
    for (std::size_t k = 1; k <= std::min(k_max, rows.size()); ++k) {
        out.push_back(kmeans_cluster(rows, k, seed, max_iters).inertia);
    }
    return out;
}

/// Mean row of each cluster; an empty cluster yields an empty row.
inline Matrix cluster_profiles(const Matrix& rows, std::span<const std::size_t> assignments, std::size_t k) {
    if (rows.size() != assignments.size()) throw InvalidArgument("assignment count mismatch");
    const std::size_t p = rows.empty() ? 0 : rows.front().size();
    Matrix sums(k, std::vector<double>(p, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto c = assignments[i];
        if (c >= k) throw InvalidArgument("assignment out of range");
        ++counts[c];
        for (std::size_t j = 0; j < p; ++j) sums[c][j] += rows[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            sums[c].clear();
            continue;
        }
        for (auto& x : sums[c]) x /= static_cast<double>(counts[c]);
    }
    return sums;
}

struct Projection {
    Matrix coords;                  // n x 2
    Matrix components;              // 2 x p, orthonormal
    std::array<double, 2> variance{};  // variance captured by each component
    double total_variance = 0.0;
};

namespace detail {

inline double norm(std::span<const double> v) { return std::sqrt(dot<double>(v, v)); }

/// Orthonormalizes b against a (a must be unit length); returns |b| after removal.
inline double orthogonalize(const std::vector<double>& a, std::vector<double>& b) {
    const double proj = dot<double>(std::span<const double>(a), std::span<const double>(b));
    for (std::size_t k = 0; k < b.size(); ++k) b[k] -= proj * a[k];
    const double nb = norm(b);
    if (nb > 0.0)
        for (auto& x : b) x /= nb;
    return nb;
}

inline std::vector<double> mat_vec(const Matrix& m, const std::vector<double>& v) {
    std::vector<double> out(m.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

/// Unit vector orthogonal to `a`, built from the axis least aligned with it.
inline std::vector<double> complement(const std::vector<double>& a) {
    std::size_t axis = 0;
    for (std::size_t k = 1; k < a.size(); ++k)
        if (std::abs(a[k]) < std::abs(a[axis])) axis = k;
    std::vector<double> e(a.size(), 0.0);
    e[axis] = 1.0;
    orthogonalize(a, e);
    return e;
}

}  // namespace detail

/// Mean-centred projection onto the top two principal directions, found by
/// block power iteration on the covariance followed by an exact 2x2
/// Rayleigh-Ritz step. Each component's largest-magnitude loading is positive.
inline Projection project_2d(const Matrix& rows, std::size_t max_iters = 10000) {
    if (rows.size() < 2 || rows.front().size() < 2) throw InvalidArgument("projection needs at least 2 rows and 2 columns");
    detail::check_rectangular(rows);
    const std::size_t n = rows.size();
    const std::size_t p = rows.front().size();

    std::vector<double> mean(p, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < p; ++j) mean[j] += r[j];
    for (auto& m : mean) m /= static_cast<double>(n);
    Matrix centred(n, std::vector<double>(p));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) centred[i][j] = rows[i][j] - mean[j];

    Matrix cov(p, std::vector<double>(p, 0.0));
    for (const auto& r : centred)
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) cov[a][b] += r[a] * r[b];
    double trace = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
        for (auto& x : cov[a]) x /= static_cast<double>(n - 1);
        trace += cov[a][a];
    }
    double scale = 0.0;
    for (const auto& r : rows)
        for (double x : r) scale = std::max(scale, std::abs(x));
    if (!(trace > 1e-24 * std::max(1.0, scale * scale))) throw InvalidArgument("degenerate rank-0 matrix");

    // Start from the two covariance columns with the largest norms.
    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return detail::norm(cov[a]) > detail::norm(cov[b]);
    });
    std::vector<double> q1 = cov[order[0]], q2 = cov[order[1]];
    const double n1 = detail::norm(q1);
    for (auto& x : q1) x /= n1;
    if (detail::orthogonalize(q1, q2) <= 1e-12 * n1) q2 = detail::complement(q1);

    for (std::size_t it = 0; it < max_iters; ++it) {
        auto z1 = detail::mat_vec(cov, q1);
        auto z2 = detail::mat_vec(cov, q2);
        const double nz1 = detail::norm(z1);
        if (nz1 == 0.0) break;
        for (auto& x : z1) x /= nz1;
        if (detail::orthogonalize(z1, z2) <= 1e-12 * nz1) z2 = detail::complement(z1);
        double change = 0.0;
        // Subspace distance via the projection of the old basis on the new one.
        const double c11 = detail::dot<double>(std::span<const double>(q1), std::span<const double>(z1));
        const double c12 = detail::dot<double>(std::span<const double>(q1), std::span<const double>(z2));
        const double c21 = detail::dot<double>(std::span<const double>(q2), std::span<const double>(z1));
        const double c22 = detail::dot<double>(std::span<const double>(q2), std::span<const double>(z2));
        change = std::abs(2.0 - (c11 * c11 + c12 * c12 + c21 * c21 + c22 * c22));
        q1 = std::move(z1);
        q2 = std::move(z2);
        if (change < 1e-15) break;
    }

    // Rayleigh-Ritz in span{q1, q2}.
    const auto cq1 = detail::mat_vec(cov, q1);
    const auto cq2 = detail::mat_vec(cov, q2);
    const double a = detail::dot<double>(std::span<const double>(q1), std::span<const double>(cq1));
    const double b = detail::dot<double>(std::span<const double>(q1), std::span<const double>(cq2));
    const double d = detail::dot<double>(std::span<const double>(q2), std::span<const double>(cq2));
    const double theta = 0.5 * std::atan2(2.0 * b, a - d);
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<double> v1(p), v2(p);
    for (std::size_t j = 0; j < p; ++j) {
        v1[j] = c * q1[j] + s * q2[j];
        v2[j] = -s * q1[j] + c * q2[j];
    }

    Projection proj;
    proj.total_variance = trace;
    for (auto* v : {&v1, &v2}) {
        std::size_t big = 0;
        for (std::size_t j = 1; j < p; ++j)
            if (std::abs((*v)[j]) > std::abs((*v)[big]) + 1e-12) big = j;
        if ((*v)[big] < 0.0)
            for (auto& x : *v) x = -x;
        proj.components.push_back(*v);
    }
    proj.coords.assign(n, std::vector<double>(2, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c2 = 0; c2 < 2; ++c2) {
            proj.coords[i][c2] = detail::dot<double>(std::span<const double>(centred[i]),
                                                     std::span<const double>(proj.components[c2]));
        }
    }
    for (std::size_t c2 = 0; c2 < 2; ++c2) {
        double var = 0.0;
        for (const auto& xy : proj.coords) var += xy[c2] * xy[c2];
        proj.variance[c2] = var / static_cast<double>(n - 1);
    }
    if (proj.variance[1] > proj.variance[0]) {
        std::swap(proj.components[0], proj.components[1]);
        std::swap(proj.variance[0], proj.variance[1]);
        for (auto& xy : proj.coords) std::swap(xy[0], xy[1]);
    }
    return proj;
}

inline void write_assignments_csv(std::ostream& out, std::span<const std::string> users,
                                  std::span<const std::size_t> assignments) {
    out << "user_id,cluster\n";
    for (std::size_t i = 0; i < users.size(); ++i) out << users[i] << ',' << assignments[i] << '\n';
}

inline void write_profiles_csv(std::ostream& out, std::span<const std::string> factors,
                               const Matrix& profiles) {
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "cluster";
    for (const auto& f : factors) out << ',' << f;
    out << '\n';
    for (std::size_t c = 0; c < profiles.size(); ++c) {
        if (profiles[c].empty()) continue;
        out << c;
        for (double x : profiles[c]) out << ',' << x;
        out << '\n';
    }
    out.precision(old);
}

inline void write_coords_csv(std::ostream& out, std::span<const std::string> users,
                             std::span<const std::size_t> assignments, const Matrix& coords) {
    const auto old = out.precision(std::numeric_limits<double>::max_digits10);
    out << "user_id,cluster,x,y\n";
    for (std::size_t i = 0; i < users.size(); ++i) {
        out << users[i] << ',' << assignments[i] << ',' << coords[i][0] << ',' << coords[i][1] << '\n';
    }
    out.precision(old);
}

}  // namespace cafata

#endif  // CAFATA_ANALYSIS_HPP
