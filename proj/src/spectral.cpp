#include "barrierlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace barrierlab {

SymmetricMatrix::SymmetricMatrix(int n) : n_(n) {
    if (n < 1 || n > 8)
        throw DomainError("SymmetricMatrix: order must be between 1 and 8");
    a_.assign(static_cast<std::size_t>(n) * (n + 1) / 2, 0.0);
}

std::size_t SymmetricMatrix::idx(int i, int j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw DomainError("SymmetricMatrix: index out of range");
    if (i > j) std::swap(i, j);
    // row i of the packed upper triangle starts after i full rows of
    // decreasing length n, n-1, ...
    return static_cast<std::size_t>(i) * n_ - static_cast<std::size_t>(i) * (i - 1) / 2
         + static_cast<std::size_t>(j - i);
}

double SymmetricMatrix::operator()(int i, int j) const { return a_[idx(i, j)]; }

void SymmetricMatrix::set(int i, int j, double v) {
    if (!std::isfinite(v))
        throw DomainError("SymmetricMatrix: entries must be finite");
    a_[idx(i, j)] = v;
}

SymmetricMatrix SymmetricMatrix::diagonal(const std::vector<double>& d) {
    SymmetricMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, d[static_cast<std::size_t>(i)]);
    return m;
}

SymmetricMatrix SymmetricMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    SymmetricMatrix m(n);
    double scale = 0.0;
    for (const auto& r : rows) {
        if (static_cast<int>(r.size()) != n)
            throw DomainError("SymmetricMatrix: dense input is not square");
        for (double v : r) scale = std::max(scale, std::abs(v));
    }
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double up = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            const double lo = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (std::abs(up - lo) > 1e-12 * std::max(1.0, scale))
                throw DomainError("SymmetricMatrix: dense input is not symmetric");
            m.set(i, j, 0.5 * (up + lo));
        }
    return m;
}

double SymmetricMatrix::max_abs() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
}

double SymmetricMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

SymmetricMatrix SymmetricMatrix::operator-() const {
    SymmetricMatrix m(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = -a_[k];
    return m;
}

SymmetricMatrix SymmetricMatrix::operator+(const SymmetricMatrix& o) const {
    if (o.n_ != n_) throw DomainError("SymmetricMatrix: order mismatch");
    SymmetricMatrix m(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = a_[k] + o.a_[k];
    return m;
}

SymmetricMatrix SymmetricMatrix::operator-(const SymmetricMatrix& o) const {
    return *this + (-o);
}

SymmetricMatrix SymmetricMatrix::scaled(double c) const {
    SymmetricMatrix m(n_);
    for (std::size_t k = 0; k < a_.size(); ++k) m.a_[k] = c * a_[k];
    return m;
}

namespace {

/// One cyclic Jacobi pass over all upper off-diagonal entries of the dense
/// working copy `A`, accumulating rotations into `V`.
double jacobi_sweep(std::vector<std::vector<double>>& A, std::vector<std::vector<double>>& V) {
    const int n = static_cast<int>(A.size());
    double off = 0.0;
    for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const double apq = A[p][q];
            if (apq == 0.0) continue;
            const double app = A[p][p];
            const double aqq = A[q][q];
            const double tau = (aqq - app) / (2.0 * apq);
            // smaller-root tangent for stability
            const double t = (tau >= 0.0) ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                          : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
            const double c = 1.0 / std::sqrt(1.0 + t * t);
            const double s = t * c;

            for (int k = 0; k < n; ++k) {
                const double akp = A[k][p];
                const double akq = A[k][q];
                A[k][p] = c * akp - s * akq;
                A[k][q] = s * akp + c * akq;
            }
            for (int k = 0; k < n; ++k) {
                const double apk = A[p][k];
                const double aqk = A[q][k];
                A[p][k] = c * apk - s * aqk;
                A[q][k] = s * apk + c * aqk;
            }
            for (int k = 0; k < n; ++k) {
                const double vkp = V[k][p];
                const double vkq = V[k][q];
                V[k][p] = c * vkp - s * vkq;
                V[k][q] = s * vkp + c * vkq;
            }
        }
    }
    for (int p = 0; p < n - 1; ++p)
        for (int q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
    return off;
}

} // namespace

EigenDecomposition eigen_decompose(const SymmetricMatrix& X) {
    const int n = X.order();
    std::vector<std::vector<double>> A(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n)));
    std::vector<std::vector<double>> V(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (int i = 0; i < n; ++i) {
        V[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1.0;
        for (int j = 0; j < n; ++j)
            A[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = X(i, j);
    }

    const double scale = std::max(X.max_abs(), 1e-300);
    double off = 0.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        off = jacobi_sweep(A, V);
        if (off <= (1e-15 * scale) * (1e-15 * scale) * n * n) break;
    }
    if (!(off <= (1e-13 * scale) * (1e-13 * scale) * n * n))
        throw NumericalError("eigen_decompose: Jacobi iteration failed to converge");

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return A[static_cast<std::size_t>(a)][static_cast<std::size_t>(a)]
             < A[static_cast<std::size_t>(b)][static_cast<std::size_t>(b)];
    });

    EigenDecomposition dec;
    dec.values.reserve(static_cast<std::size_t>(n));
    dec.vectors.reserve(static_cast<std::size_t>(n));
    for (int k : order) {
        dec.values.push_back(A[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)]);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            v[static_cast<std::size_t>(i)] = V[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        dec.vectors.push_back(std::move(v));
    }
    return dec;
}

std::vector<double> eigenvalues(const SymmetricMatrix& X) {
    return eigen_decompose(X).values;
}

std::pair<SymmetricMatrix, SymmetricMatrix> split_signed_parts(const SymmetricMatrix& X) {
    const int n = X.order();
    const EigenDecomposition dec = eigen_decompose(X);
    const double tie = 1e-13 * X.max_abs();

    SymmetricMatrix plus(n), minus(n);
    for (int k = 0; k < n; ++k) {
        const double e = dec.values[static_cast<std::size_t>(k)];
        // near-zero eigenvalues land in the nonnegative part
        const double ep = (e >= -tie) ? e : 0.0;
        const double em = (e >= -tie) ? 0.0 : -e;
        const auto& v = dec.vectors[static_cast<std::size_t>(k)];
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const double vij = v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
                if (ep != 0.0) plus.set(i, j, plus(i, j) + ep * vij);
                if (em != 0.0) minus.set(i, j, minus(i, j) + em * vij);
            }
    }
    return {plus, minus};
}

double pucci(const SymmetricMatrix& X, const EllipticityPair& ell, PucciSign sign) {
    const std::vector<double> eig = eigenvalues(X);
    const double tie = 1e-13 * X.max_abs();
    double pos = 0.0, neg = 0.0; // Tr(X⁺) and Tr(X⁻), both nonnegative
    for (double e : eig) {
        if (e >= -tie)
            pos += std::max(e, 0.0);
        else
            neg += -e;
    }
    if (sign == PucciSign::Plus) return -ell.lambda * pos + ell.Lambda * neg;
    return -ell.Lambda * pos + ell.lambda * neg;
}

} // namespace barrierlab
