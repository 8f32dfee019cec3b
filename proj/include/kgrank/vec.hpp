#pragma once

#include <cstddef>
#include <vector>

namespace kgrank {

using Vec = std::vector<double>;

// Throws std::invalid_argument on dimension mismatch.
double dot(const Vec& a, const Vec& b);

double norm(const Vec& a);

// a.b / (|a||b|); returns 0 when either norm is 0.
double cosine(const Vec& a, const Vec& b);

// y += s * x
void axpy(double s, const Vec& x, Vec& y);

void scale(Vec& v, double s);

}  // namespace kgrank
