#include "kgrank/vec.hpp"

#include <cmath>
#include <stdexcept>

namespace kgrank {

double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("dot: dimension mismatch (" + std::to_string(a.size()) +
                                    " vs " + std::to_string(b.size()) + ")");
    }
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(const Vec& a) {
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

double cosine(const Vec& a, const Vec& b) {
    double d = dot(a, b);
    double na = norm(a);
    double nb = norm(b);
    if (na == 0.0 || nb == 0.0) return 0.0;
    return d / (na * nb);
}

void axpy(double s, const Vec& x, Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

void scale(Vec& v, double s) {
    for (double& x : v) x *= s;
}

}  // namespace kgrank
