/// @file variational.hpp
/// @brief The energy functional, gauge-orthogonal slice, second-variation
///        operator 𝒮 and quadratic form 𝓛, conformal-Killing variations and
///        their closed-form identities, instability witnesses and Rayleigh
///        bounds. Fiber and adjoint Higgs variants share every surface.
#pragma once

#include "ymh/smoothfields.hpp"

#include <optional>

namespace ymh::variational {

using fields::AnalyticPair;
using fields::Form1G;
using fields::HiggsVariant;
using fields::VariationPair;
using geometry::CPoint;
using geometry::QuadratureRule;
using smoothfields::DiffCtx;

struct EnergyReport {
    double total = 0.0;
    double curvature = 0.0;  // ½∫|R∇|²
    double higgs_grad = 0.0; // ½∫|d∇u|²
    double potential = 0.0;  // (λ/8)∫(1−|u|²)²
};

EnergyReport energy(const AnalyticPair& pair, const QuadratureRule& rule, const DiffCtx& ctx);

/// L² norm of δ∇B − (w⊗u∗−u⊗w∗)-object (fiber) or δ∇B − [Φ,φ] (adjoint).
double slice_residual(const AnalyticPair& pair, const VariationPair& var,
                      const QuadratureRule& rule, const DiffCtx& ctx);

/// ζ(σ) = (−d∇σ, σu) (fiber) or (−d∇σ, [σ,Φ]) (adjoint).
VariationPair gauge_direction(const AnalyticPair& pair, const smoothfields::PFn& sigma,
                              double h);

/// Pointwise 𝒮(B,w); `higgs` carries w (fiber, column 0 of a matrix is not
/// used) — the fiber slot is returned in `w`, the adjoint slot in `phi`.
struct SValue {
    Form1G B;
    Vec w;
    Mat phi;
};
SValue second_variation_apply(const AnalyticPair& pair, const VariationPair& var,
                              const CPoint& p, const DiffCtx& ctx);

/// |∫⟨𝒮a,b⟩ − ∫⟨a,𝒮b⟩| plus both pairings, pointwise operator route.
struct SelfAdjointReport {
    double forward = 0.0;
    double backward = 0.0;
    double defect = 0.0;
};
SelfAdjointReport self_adjointness_defect(const AnalyticPair& pair, const VariationPair& a,
                                          const VariationPair& b, const QuadratureRule& rule,
                                          const DiffCtx& ctx);

struct QuadraticReport {
    double value = 0.0;
    double curvature_part = 0.0; // |d∇B|² + |δ∇B|² + ⟨ℜ∇B,B⟩
    double mixed_part = 0.0;     // Higgs–connection coupling terms
    double higgs_part = 0.0;     // pure Higgs-slot terms
    double norm2 = 0.0;          // ‖(B,w)‖²_{L²}
    int quad_order = 0;
    double fd_step = 0.0;
    bool el_admissible = true;   // pair passed the numerical YMH-pair gate
};

/// 𝓛(B,w) = ∫⟨𝒮(B,w),(B,w)⟩, evaluated through the first-order integrand
/// obtained by integrating 𝒮 by parts (exact on a closed manifold).
QuadraticReport quadratic_form(const AnalyticPair& pair, const VariationPair& var,
                               const QuadratureRule& rule, const DiffCtx& ctx);

/// (i_V R∇, ∇_V u) for V = v − (v·x)x.
VariationPair killing_variation(const AnalyticPair& pair, const Vec& v, const DiffCtx& ctx);

struct IdentityReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double defect = 0.0; // |lhs − rhs| / (1 + |rhs|)
};

/// 𝓛(i_VR, ∇_Vu) against ∫(4−n)|i_VR|² + (2−n)|∇_Vu|² − 2f_v(⟨i_VR,δ∇R⟩ + ⟨δ∇d∇u,∇_Vu⟩).
IdentityReport conformal_identity_check(const AnalyticPair& pair, const Vec& v,
                                        const QuadratureRule& rule, const DiffCtx& ctx);

/// Σᵢ 𝓛(i_{Vᵢ}R, ∇_{Vᵢ}u) against 2(4−n)∫|R|² + (2−n)∫|d∇u|².
IdentityReport trace_identity_check(const AnalyticPair& pair, const QuadratureRule& rule,
                                    const DiffCtx& ctx);

// ---------------------------------------------------------------------------
// trial families, slice projection, Rayleigh bounds
// ---------------------------------------------------------------------------

/// Deterministic trial family: tensor products of low-degree ambient
/// harmonics with constant algebra/fiber directions; contains the constant
/// Higgs witnesses, and the Killing variations are appended for sphere pairs.
std::vector<VariationPair> make_trials(const AnalyticPair& pair, int count,
                                       std::uint64_t seed, const DiffCtx& ctx);

struct RayleighReport {
    double min_quotient = 0.0;
    int argmin = -1;
    int evaluated = 0;
    std::vector<double> quotients;
};

/// Minimum of 𝓛(var)/‖var‖² over the trial family, each trial least-squares
/// projected against the gauge directions ζ(σ) over a monomial-times-algebra
/// σ-basis (ambient degree ≤ 3). Upper bound on λ₁.
RayleighReport rayleigh_min(const AnalyticPair& pair, const std::vector<VariationPair>& trials,
                            const QuadratureRule& rule, const DiffCtx& ctx);

struct WitnessReport {
    double value = 0.0;      // most negative 𝓛 found (or minimum if none negative)
    double rayleigh = 0.0;   // value / ‖var‖²
    std::string description;
    bool negative = false;
};

/// Theorem-style instability witness: for (numerically) flat connections a
/// covariantly constant section w; otherwise the minimizer of ∫|d∇w|²/∫|w|²
/// over a smooth trial basis. Requires u ≈ 0; λ ≤ 0 pairs report the minimum
/// Rayleigh value without claiming instability.
WitnessReport instability_witness(const AnalyticPair& pair, const QuadratureRule& rule,
                                  const DiffCtx& ctx, int trial_count = 200,
                                  std::uint64_t seed = 1);

/// Numerical YMH-pair gate used by 𝒮-based operations (sup EL residual at the
/// rule nodes vs threshold).
bool el_admissible(const AnalyticPair& pair, const QuadratureRule& rule, const DiffCtx& ctx,
                   double threshold = 5e-3);

} // namespace ymh::variational
