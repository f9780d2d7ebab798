#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "attrlens/core/errors.hpp"

namespace attrlens {

/// Cosine similarity; a zero vector on either side yields 0.
inline double cosine_similarity(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size())
        throw LengthMismatch("cosine similarity needs vectors of equal dimension");
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted in
/// descending order. Sweeps stop once the off-diagonal norm falls below
/// tol times the Frobenius norm of the input. Plenty for the small dense
/// matrices this library works with.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a,
                                                 double tol = 1e-12, int max_sweeps = 64) {
    const std::size_t n = a.size();
    for (const auto& row : a)
        if (row.size() != n) throw LengthMismatch("eigensolver needs a square matrix");
    if (n == 0) return {};

    double frob2 = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) frob2 += a[i][j] * a[i][j];
    if (frob2 == 0.0) return std::vector<double>(n, 0.0);
    const double stop = tol * std::sqrt(frob2);

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off2 = 0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off2 += a[i][j] * a[i][j];
        if (std::sqrt(2.0 * off2) <= stop) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a[p][q];
                if (apq == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }

    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = a[i][i];
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
}

}  // namespace attrlens
