#include "beliefcert/metric_space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace beliefcert {

namespace {
std::string fmt(const char* pattern, std::size_t i, std::size_t j) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), pattern, i, j);
    return buf;
}
} // namespace

double FiniteMetricSpace::diameter() const {
    double d = 0.0;
    for (const auto& row : dist)
        for (double v : row) d = std::max(d, v);
    return d;
}

std::vector<std::string> FiniteMetricSpace::violations() const {
    std::vector<std::string> out;
    const std::size_t n = labels.size();
    if (dist.size() != n) {
        out.push_back("dist matrix row count does not match number of points");
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dist[i].size() != n) {
            out.push_back(fmt("dist row %zu has wrong length (expected %zu)", i, n));
            return out;
        }
    }
    constexpr double tol = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(dist[i][i]) > tol)
            out.push_back(fmt("dist[%zu][%zu] must be 0 on the diagonal", i, i));
        for (std::size_t j = 0; j < n; ++j) {
            if (!(dist[i][j] >= 0.0) || !std::isfinite(dist[i][j]))
                out.push_back(fmt("dist[%zu][%zu] is negative or non-finite", i, j));
            if (j > i && std::abs(dist[i][j] - dist[j][i]) > tol)
                out.push_back(fmt("dist asymmetric at (%zu,%zu)", i, j));
        }
    }
    if (!out.empty()) return out; // triangle check is meaningless on broken input
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
                if (dist[i][j] > dist[i][k] + dist[k][j] + 1e-9) {
                    out.push_back(fmt("triangle inequality fails at (%zu,%zu)", i, j));
                    j = n; // one report per (i,j) is enough
                    break;
                }
    return out;
}

FiniteMetricSpace FiniteMetricSpace::from_coords(std::vector<double> points,
                                                 std::vector<std::string> labels) {
    FiniteMetricSpace s;
    const std::size_t n = points.size();
    if (labels.empty()) {
        labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
    }
    if (labels.size() != n) throw std::invalid_argument("labels/points size mismatch");
    s.labels = std::move(labels);
    s.dist.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s.dist[i][j] = std::abs(points[i] - points[j]);
    s.coords = std::move(points);
    return s;
}

FiniteMetricSpace FiniteMetricSpace::from_matrix(std::vector<std::vector<double>> d,
                                                 std::vector<std::string> labels) {
    FiniteMetricSpace s;
    const std::size_t n = d.size();
    if (labels.empty()) {
        labels.reserve(n);
        for (std::size_t i = 0; i < n; ++i) labels.push_back("x" + std::to_string(i));
    }
    if (labels.size() != n) throw std::invalid_argument("labels/matrix size mismatch");
    s.labels = std::move(labels);
    s.dist = std::move(d);
    return s;
}

} // namespace beliefcert
