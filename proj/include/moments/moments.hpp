#pragma once

// Total weight, first and second moments of a weighted system, the
// barycenter, and the identities relating them (Huygens-Leibniz-Koenig).

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "moments/types.hpp"

namespace moments {

namespace detail {

template <class T>
void require_point(const Configuration<T>& x, const Vector<T>& p) {
    if (p.size() != x.ambient_dimension())
        throw Error(ErrorCode::DimensionMismatch, "evaluation point has the wrong dimension");
    require_finite(p, "evaluation point");
}

template <class Derived>
double norm_magnitude(const Eigen::MatrixBase<Derived>& v) {
    double s = 0.0;
    for (Index i = 0; i < v.size(); ++i) {
        const double m = magnitude(v(i));
        s += m * m;
    }
    return std::sqrt(s);
}

template <class T>
double weight_scale(const WeightedSystem<T>& ws) {
    double s = 0.0;
    for (Index j = 0; j < ws.size(); ++j)
        s += magnitude(ws.weights(j));
    return s;
}

} // namespace detail

template <class T>
T total_weight(const WeightedSystem<T>& ws) {
    return ws.weights.sum();
}

/// mu1(p) = sum_x w(x) (x - p).
template <class T>
Vector<T> first_moment(const WeightedSystem<T>& ws, const Vector<T>& p) {
    detail::require_point(ws.configuration, p);
    const Matrix<T>& x = ws.configuration.points();
    Vector<T> m = x * ws.weights;
    m -= total_weight(ws) * p;
    return m;
}

/// mu2(p) = sum_x w(x) |x - p|^2.
template <class T>
T second_moment(const WeightedSystem<T>& ws, const Vector<T>& p) {
    detail::require_point(ws.configuration, p);
    T acc = 0;
    for (Index j = 0; j < ws.size(); ++j)
        acc += ws.weights(j) * (ws.configuration.point(j) - p).squaredNorm();
    return acc;
}

/// Total weight is zero: exact in rational mode, relative to sum |w| in float mode.
template <class T>
bool has_zero_total_weight(const WeightedSystem<T>& ws, const Tolerance& tol = {}) {
    return is_zero(total_weight(ws), detail::weight_scale(ws), tol);
}

/// The unique G with mu1(G) = 0, computed from the origin as reference point.
template <class T>
Vector<T> barycenter(const WeightedSystem<T>& ws, const Tolerance& tol = {}) {
    if (has_zero_total_weight(ws, tol))
        throw Error(ErrorCode::ZeroTotalWeight, "barycenter undefined when total weight is zero");
    const Vector<T> origin = Vector<T>::Zero(ws.configuration.ambient_dimension());
    return origin + first_moment(ws, origin) / total_weight(ws);
}

/// mu0 mu2(q) - |mu1(q)|^2 - sum_{pairs} w(x) w(y) |x - y|^2; identically zero.
template <class T>
T leibniz_identity_residual(const WeightedSystem<T>& ws, const Vector<T>& q) {
    const Vector<T> m1 = first_moment(ws, q);
    T pairs = 0;
    for (Index i = 0; i < ws.size(); ++i)
        for (Index j = i + 1; j < ws.size(); ++j)
            pairs += ws.weights(i) * ws.weights(j) * squared_distance(ws.configuration, i, j);
    return total_weight(ws) * second_moment(ws, q) - m1.squaredNorm() - pairs;
}

/// mu2(p) - mu2(q) - (q - p) . (mu1(p) + mu1(q)); identically zero.
template <class T>
T hlk_difference_residual(const WeightedSystem<T>& ws, const Vector<T>& p, const Vector<T>& q) {
    const Vector<T> pq = q - p;
    return second_moment(ws, p) - second_moment(ws, q) - pq.dot(first_moment(ws, p) + first_moment(ws, q));
}

/// With mu0 != 0: mu2(p) - mu2(G) - mu0 |p - G|^2.
template <class T>
T hlk_barycentric_residual(const WeightedSystem<T>& ws, const Vector<T>& p, const Tolerance& tol = {}) {
    const Vector<T> g = barycenter(ws, tol);
    return second_moment(ws, p) - second_moment(ws, g) - total_weight(ws) * (p - g).squaredNorm();
}

/// With mu0 = 0 the first moment is a constant vector v, and
/// mu2(p) - mu2(q) = 2 v . (q - p). Returns the difference of the two sides.
template <class T>
T hlk_zero_weight_residual(const WeightedSystem<T>& ws, const Vector<T>& p, const Vector<T>& q,
                           const Tolerance& tol = {}) {
    if (!has_zero_total_weight(ws, tol))
        throw Error(ErrorCode::PreconditionViolated, "total weight must vanish");
    const Vector<T> v = first_moment(ws, q);
    return second_moment(ws, p) - second_moment(ws, q) - T(2) * v.dot(q - p);
}

/// mu2_1(p) - mu2_2(p) for two systems with equal nonzero total weight and a
/// common barycenter. The difference is the same at every probe; it is
/// checked there and returned as its value at the common barycenter.
template <class T>
T second_moment_difference_constant(const WeightedSystem<T>& a, const WeightedSystem<T>& b,
                                    const std::vector<Vector<T>>& probes, const Tolerance& tol = {}) {
    if (a.configuration.ambient_dimension() != b.configuration.ambient_dimension())
        throw Error(ErrorCode::DimensionMismatch, "systems live in different ambient spaces");
    const T w0a = total_weight(a);
    const T w0b = total_weight(b);
    const double wscale = std::max(detail::weight_scale(a), detail::weight_scale(b));
    if (!is_zero(T(w0a - w0b), wscale, tol))
        throw Error(ErrorCode::PreconditionViolated, "total weights differ");
    if (has_zero_total_weight(a, tol))
        throw Error(ErrorCode::PreconditionViolated, "total weight must be nonzero");
    const Vector<T> ga = barycenter(a, tol);
    const Vector<T> gb = barycenter(b, tol);
    double gscale = 0.0;
    for (Index j = 0; j < a.size(); ++j)
        gscale = std::max(gscale, detail::norm_magnitude(a.configuration.point(j)));
    for (Index j = 0; j < b.size(); ++j)
        gscale = std::max(gscale, detail::norm_magnitude(b.configuration.point(j)));
    for (Index i = 0; i < ga.size(); ++i)
        if (!is_zero(T(ga(i) - gb(i)), gscale, tol))
            throw Error(ErrorCode::PreconditionViolated, "barycenters differ");

    const T at_center = second_moment(a, ga) - second_moment(b, ga);
    for (const auto& p : probes) {
        const T d = second_moment(a, p) - second_moment(b, p);
        const double scale = magnitude(second_moment(a, p)) + magnitude(second_moment(b, p));
        if (!is_zero(T(d - at_center), std::max(scale, magnitude(at_center)), tol))
            throw Error(ErrorCode::PreconditionViolated,
                        "second moment difference is not constant across probes");
    }
    return at_center;
}

template <class T>
struct MomentProbe {
    Vector<T> point;
    Vector<T> mu1;
    T mu2;
};

template <class T>
struct MomentSummary {
    T mu0;
    std::vector<MomentProbe<T>> probes;
    std::optional<Vector<T>> barycenter;

    /// Largest |mu1(p) - mu1(q) - mu0 (q - p)| over all stored probe pairs.
    double lemma_residual() const {
        double worst = 0.0;
        for (const auto& p : probes)
            for (const auto& q : probes) {
                const Vector<T> r = p.mu1 - q.mu1 - mu0 * (q.point - p.point);
                for (Index i = 0; i < r.size(); ++i)
                    worst = std::max(worst, magnitude(r(i)));
            }
        return worst;
    }
};

template <class T>
MomentSummary<T> summarize_moments(const WeightedSystem<T>& ws, const std::vector<Vector<T>>& probes,
                                   const Tolerance& tol = {}) {
    MomentSummary<T> s{total_weight(ws), {}, std::nullopt};
    for (const auto& p : probes)
        s.probes.push_back({p, first_moment(ws, p), second_moment(ws, p)});
    if (!has_zero_total_weight(ws, tol))
        s.barycenter = barycenter(ws, tol);
    return s;
}

} // namespace moments
