/// @file smoothfields.hpp
/// @brief Pointwise differential operators on analytic configurations:
///        curvature, d∇, δ∇, ℜ∇, Hodge/rough Laplacians, Bochner and
///        Euler–Lagrange residuals. All derivatives are central finite
///        differences in chart coordinates (step h1; outer step h2 for
///        second derivatives), with closed-form Christoffel corrections.
#pragma once

#include "ymh/fields.hpp"

namespace ymh::smoothfields {

using fields::AnalyticPair;
using fields::Form1E;
using fields::Form1G;
using fields::Form2E;
using fields::Form2G;
using fields::Form3G;
using fields::HiggsVariant;
using geometry::CPoint;
using geometry::Geometry;
using geometry::QuadratureRule;

using AFn = std::function<Form1G(const CPoint&)>;
using UFn = std::function<Vec(const CPoint&)>;
using PFn = std::function<Mat(const CPoint&)>;
using F2Fn = std::function<Form2G(const CPoint&)>;
using W1Fn = std::function<Form1E(const CPoint&)>;

struct DiffCtx {
    const AnalyticPair* pair = nullptr;
    double h1 = 1e-4;
    double h2 = 1e-3;

    const Geometry& geom() const { return pair->geom; }
    int n() const { return pair->geom.n; }
    int r() const { return pair->rank; }
};

// ---------------------------------------------------------------------------
// metric norms and inner products (coordinate components, conformal metric)
// ---------------------------------------------------------------------------

inline double inv_g(const Geometry& g, const CPoint& p) {
    const double rho = geometry::conf_rho(g, p.y);
    return 1.0 / (rho * rho);
}

inline double norm2(const Geometry& g, const CPoint& p, const Form1G& B) {
    const double ig = inv_g(g, p);
    double s = 0.0;
    for (int i = 0; i < B.n; ++i) s += algebra::norm2(B.c[i]);
    return ig * s;
}

inline double norm2(const Geometry& g, const CPoint& p, const Form1E& W) {
    const double ig = inv_g(g, p);
    double s = 0.0;
    for (int i = 0; i < W.n; ++i) s += W.c[i].squaredNorm();
    return ig * s;
}

/// 1/p! convention: |F|² = ½ Σ_{ij} g^{ii}g^{jj} |F_ij|².
inline double norm2(const Geometry& g, const CPoint& p, const Form2G& F) {
    const double ig = inv_g(g, p);
    double s = 0.0;
    for (int i = 0; i < F.n; ++i)
        for (int j = 0; j < F.n; ++j) s += algebra::norm2(F.c[i][j]);
    return 0.5 * ig * ig * s;
}

inline double inner(const Geometry& g, const CPoint& p, const Form1G& a, const Form1G& b) {
    const double ig = inv_g(g, p);
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += algebra::inner(a.c[i], b.c[i]);
    return ig * s;
}

inline double inner(const Geometry& g, const CPoint& p, const Form1E& a, const Form1E& b) {
    const double ig = inv_g(g, p);
    double s = 0.0;
    for (int i = 0; i < a.n; ++i) s += a.c[i].dot(b.c[i]);
    return ig * s;
}

inline double inner(const Geometry& g, const CPoint& p, const Form2G& a, const Form2G& b) {
    const double ig = inv_g(g, p);
    double s = 0.0;
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < a.n; ++j) s += algebra::inner(a.c[i][j], b.c[i][j]);
    return 0.5 * ig * ig * s;
}

// ---------------------------------------------------------------------------
// first derivatives
// ---------------------------------------------------------------------------

/// (∇u)_i = ∂_i u + A_i u on Ω⁰(E).
Form1E dnabla_u(const DiffCtx& ctx, const UFn& u, const CPoint& p, double h);

/// (∇φ)_i = ∂_i φ + [A_i, φ] on Ω⁰(𝔤_E).
Form1G dnabla_phi(const DiffCtx& ctx, const PFn& phi, const CPoint& p, double h);

/// d∇B and δ∇B from one stencil of B-evaluations.
struct FirstDerivs1G {
    Form2G d;  // (dB)_ij = ∂_iB_j − ∂_jB_i + [A_i,B_j] − [A_j,B_i]
    Mat del;   // δB = −g^{ii}(∂_iB_i − Γ^k_{ii}B_k + [A_i,B_i])
};
FirstDerivs1G first_derivs_B(const DiffCtx& ctx, const AFn& B, const CPoint& p, double h);

inline Form2G dnabla_B(const DiffCtx& ctx, const AFn& B, const CPoint& p, double h) {
    return first_derivs_B(ctx, B, p, h).d;
}
inline Mat delta_B(const DiffCtx& ctx, const AFn& B, const CPoint& p, double h) {
    return first_derivs_B(ctx, B, p, h).del;
}

/// (dW)_ij = ∂_iW_j − ∂_jW_i + A_iW_j − A_jW_i on Ω¹(E).
Form2E dnabla_W(const DiffCtx& ctx, const W1Fn& W, const CPoint& p, double h);

/// δW = −g^{ii}(∂_iW_i − Γ^k_{ii}W_k + A_iW_i) on Ω¹(E).
Vec delta_W(const DiffCtx& ctx, const W1Fn& W, const CPoint& p, double h);

/// (δF)_j = −g^{ii}(∇_iF)_ij on Ω²(𝔤_E).
Form1G delta_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p, double h);

/// (dF)_ijk = (∇_iF)_jk − (∇_jF)_ik + (∇_kF)_ij on Ω²(𝔤_E) (Γ's cancel).
Form3G dnabla_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p, double h);

/// Gauge-covariant d of a 0-form: (dσ)_i = ∂_iσ + [A_i, σ].
Form1G dnabla_sigma(const DiffCtx& ctx, const PFn& s, const CPoint& p, double h);

// ---------------------------------------------------------------------------
// curvature and algebraic curvature action
// ---------------------------------------------------------------------------

/// R∇ = dA + ½[A∧A]: F_ij = ∂_iA_j − ∂_jA_i + [A_i, A_j].
Form2G curvature(const DiffCtx& ctx, const CPoint& p);
Form2G curvature_of(const DiffCtx& ctx, const AFn& A, const CPoint& p, double h);

/// ℜ∇(ψ)(X) = Σ_j [R(e_j, X), ψ(e_j)] for 1-forms.
Form1G rfrak_1(const Geometry& g, const CPoint& p, const Form2G& R, const Form1G& psi);

/// ℜ∇(φ)(X,Y) = Σ_j [R(e_j,X), φ(e_j,Y)] − [R(e_j,Y), φ(e_j,X)] for 2-forms.
Form2G rfrak_2(const Geometry& g, const CPoint& p, const Form2G& R, const Form2G& phi);

// ---------------------------------------------------------------------------
// second-order operators (nested differences, outer step ctx.h2)
// ---------------------------------------------------------------------------

/// Δ∇ψ = d∇δ∇ψ + δ∇d∇ψ on Ω¹(𝔤_E).
Form1G hodge_laplace_B(const DiffCtx& ctx, const AFn& B, const CPoint& p);

/// Δ∇φ on Ω²(𝔤_E) (via an internal rank-3 intermediate).
Form2G hodge_laplace_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p);

/// ∇∗∇ψ = −g^{jj}(∇_j(∇ψ))_j on Ω¹ / Ω² of 𝔤_E.
Form1G rough_laplace_B(const DiffCtx& ctx, const AFn& B, const CPoint& p);
Form2G rough_laplace_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p);

/// δ∇d∇ on Ω⁰(E) and Ω⁰(𝔤_E).
Vec delta_d_u(const DiffCtx& ctx, const UFn& u, const CPoint& p);
Mat delta_d_phi(const DiffCtx& ctx, const PFn& phi, const CPoint& p);

/// δ∇R∇ evaluated by differencing the curvature.
Form1G delta_curvature(const DiffCtx& ctx, const CPoint& p);

// ---------------------------------------------------------------------------
// named checks
// ---------------------------------------------------------------------------

/// |Δ∇ψ − ∇∗∇ψ − c(n,p)ψ − ℜ∇(ψ)| with c(n,1) = n−1, c(n,2) = 2(n−2) on Sⁿ.
double bochner_residual_1(const DiffCtx& ctx, const AFn& psi, const CPoint& p);
double bochner_residual_2(const DiffCtx& ctx, const F2Fn& phi, const CPoint& p);

/// Pointwise Euler–Lagrange residuals of the coupled system.
struct ElPointResidual {
    double eq_connection; // |δ∇R∇ + (d∇u⊗u∗−u⊗(d∇u)∗)-object|  (or − [d∇Φ,Φ])
    double eq_higgs;      // |δ∇d∇u − λ/2(1−|u|²)u|
};
ElPointResidual el_residual_at(const DiffCtx& ctx, const CPoint& p);

/// Sup-norm residuals over the quadrature nodes.
struct ElResidual {
    double eq_connection;
    double eq_higgs;
};
ElResidual el_residual(const AnalyticPair& pair, const QuadratureRule& rule, double h1,
                       double h2);

} // namespace ymh::smoothfields
