#pragma once

///
/// Small symmetric-matrix algebra: eigenvalues by cyclic Jacobi rotations,
/// the signed-part decomposition X = X⁺ − X⁻, and the Pucci extremal
/// operators
///
///   P⁺(X) = −λ Σ_{e≥0} e − Λ Σ_{e<0} e,    P⁻(X) = −Λ Σ_{e≥0} e − λ Σ_{e<0} e.
///
/// Orders up to 8 are all the library ever needs (barrier Hessians in ℝⁿ,
/// n ≤ 5, and test matrices).
///

#include <vector>

#include "barrierlab/errors.hpp"

namespace barrierlab {

/// Symmetric n×n matrix storing only the upper triangle, so symmetry is
/// exact by construction.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(int n);
    static SymmetricMatrix diagonal(const std::vector<double>& d);
    /// Build from a full row-major matrix; off-diagonal pairs must agree to
    /// within 1e-12 of the max entry or construction refuses.
    static SymmetricMatrix from_dense(const std::vector<std::vector<double>>& rows);

    int order() const { return n_; }
    double operator()(int i, int j) const;
    void set(int i, int j, double v);

    double max_abs() const;
    double trace() const;
    SymmetricMatrix operator-() const;
    SymmetricMatrix operator+(const SymmetricMatrix& o) const;
    SymmetricMatrix operator-(const SymmetricMatrix& o) const;
    SymmetricMatrix scaled(double c) const;

private:
    int n_;
    std::vector<double> a_; ///< packed upper triangle, row by row

    std::size_t idx(int i, int j) const;
};

struct EllipticityPair {
    double lambda;
    double Lambda;
    EllipticityPair(double lam, double Lam) : lambda(lam), Lambda(Lam) {
        if (!(lam > 0.0) || !(Lam >= lam))
            throw DomainError("EllipticityPair: need 0 < lambda <= Lambda");
    }
};

struct EigenDecomposition {
    std::vector<double> values;               ///< ascending
    std::vector<std::vector<double>> vectors; ///< vectors[k] pairs with values[k]
};

/// Ascending eigenvalues via cyclic Jacobi sweeps.
std::vector<double> eigenvalues(const SymmetricMatrix& X);

/// Full decomposition (used by the signed split and by tests that
/// reconstruct X).
EigenDecomposition eigen_decompose(const SymmetricMatrix& X);

/// X = X⁺ − X⁻ with both parts positive semidefinite and X⁺X⁻ = 0, obtained
/// by splitting the spectrum by sign.
std::pair<SymmetricMatrix, SymmetricMatrix> split_signed_parts(const SymmetricMatrix& X);

enum class PucciSign { Plus, Minus };

/// Pucci extremal operator. Eigenvalues within 1e-13·‖X‖ of zero count as
/// nonnegative; their coefficient is immaterial but the tie rule keeps
/// verdicts deterministic.
double pucci(const SymmetricMatrix& X, const EllipticityPair& ell, PucciSign sign);

} // namespace barrierlab
