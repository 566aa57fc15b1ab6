/// @file algebra.hpp
/// @brief so(r) structure-group kernels: inner products, brackets, the u⊗φ∗−φ⊗u∗ pairing,
///        antisymmetric packing and the standard so(3) basis.
#pragma once

#include "ymh/common.hpp"

#include <random>

namespace ymh::algebra {

/// ⟨φ,ψ⟩ = ½ Tr(φᵀψ); positive definite on antisymmetric matrices.
inline double inner(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("algebra::inner: dimension mismatch");
    return 0.5 * (a.transpose() * b).trace();
}

inline double norm2(const Mat& a) { return inner(a, a); }

inline Mat bracket(const Mat& a, const Mat& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("algebra::bracket: dimension mismatch");
    return a * b - b * a;
}

/// ad-action of so(r) on the fiber: plain matrix-vector product.
inline Vec apply(const Mat& phi, const Vec& u) {
    if (phi.cols() != u.rows()) throw std::invalid_argument("algebra::apply: dimension mismatch");
    return phi * u;
}

/// The pairing u,φ ↦ uφᵀ − φuᵀ ∈ so(r). Under ⟨·,·⟩ = ½Tr(·ᵀ·) it satisfies the
/// defining identity ⟨mu(u,φ), ϕ⟩ = −⟨φ, ϕu⟩ for every antisymmetric ϕ exactly;
/// this is the normalization that makes the coupled field equations the actual
/// L² gradient of the energy.
inline Mat mu(const Vec& u, const Vec& phi) {
    if (u.rows() != phi.rows()) throw std::invalid_argument("algebra::mu: dimension mismatch");
    return u * phi.transpose() - phi * u.transpose();
}

inline double antisymmetry_defect(const Mat& a) {
    return (a + a.transpose()).cwiseAbs().maxCoeff();
}

inline Mat antisym_part(const Mat& a) { return 0.5 * (a - a.transpose()); }

/// Standard so(3) basis with [L_a, L_b] = ε_abc L_c and ⟨L_a, L_b⟩ = δ_ab.
inline Mat so3_basis(int a) {
    Mat L = Mat::Zero(3, 3);
    // (L_a)_{bc} = -ε_{abc}
    const int b = (a + 1) % 3, c = (a + 2) % 3;
    L(b, c) = -1.0;
    L(c, b) = 1.0;
    return L;
}

/// Orthonormal-ish basis of so(r): E_ij − E_ji, i < j (norm 1 under ½Tr).
inline Mat so_basis(int r, int k) {
    int idx = 0;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j, ++idx)
            if (idx == k) {
                Mat L = Mat::Zero(r, r);
                L(i, j) = 1.0;
                L(j, i) = -1.0;
                return L;
            }
    throw std::invalid_argument("algebra::so_basis: index out of range");
}

inline int so_dim(int r) { return r * (r - 1) / 2; }

// Packing between so(r) matrices and their r(r-1)/2 independent entries
// (upper triangle, row-major). Lattice states store packed components.
inline void so_pack(const Mat& m, double* out) {
    const int r = static_cast<int>(m.rows());
    int k = 0;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) out[k++] = m(i, j);
}

inline void so_unpack(const double* in, int r, Mat& m) {
    m.resize(r, r);
    m.setZero();
    int k = 0;
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            m(i, j) = in[k];
            m(j, i) = -in[k];
            ++k;
        }
}

/// exp of an antisymmetric matrix by scaling-and-squaring Taylor; result is orthogonal.
inline Mat expm_antisym(const Mat& a) {
    const int r = static_cast<int>(a.rows());
    double nrm = a.cwiseAbs().maxCoeff();
    int squarings = 0;
    Mat x = a;
    while (nrm > 0.25) {
        x *= 0.5;
        nrm *= 0.5;
        ++squarings;
    }
    Mat result = Mat::Identity(r, r);
    Mat term = Mat::Identity(r, r);
    for (int k = 1; k <= 16; ++k) {
        term = term * x / static_cast<double>(k);
        result += term;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

inline Mat random_antisym(int r, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Mat m = Mat::Zero(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = i + 1; j < r; ++j) {
            m(i, j) = dist(rng);
            m(j, i) = -m(i, j);
        }
    return m;
}

inline Vec random_vec(int r, std::mt19937_64& rng, double scale = 1.0) {
    std::normal_distribution<double> dist(0.0, scale);
    Vec v(r);
    for (int i = 0; i < r; ++i) v(i) = dist(rng);
    return v;
}

} // namespace ymh::algebra
