/// @file fields.hpp
/// @brief Matrix-valued form containers, analytic field pairs (the closed-form
///        catalog) and admissible-variation pairs.
#pragma once

#include "ymh/algebra.hpp"
#include "ymh/geometry.hpp"

#include <array>
#include <functional>
#include <optional>

namespace ymh::fields {

using geometry::CPoint;
using geometry::Geometry;

// Form containers hold coordinate components in the evaluation chart.
struct Form1G {
    int n = 0;
    std::array<Mat, 7> c{};
    static Form1G zero(int n, int r) {
        Form1G f;
        f.n = n;
        for (int i = 0; i < n; ++i) f.c[i] = Mat::Zero(r, r);
        return f;
    }
};

struct Form1E {
    int n = 0;
    std::array<Vec, 7> c{};
    static Form1E zero(int n, int r) {
        Form1E f;
        f.n = n;
        for (int i = 0; i < n; ++i) f.c[i] = Vec::Zero(r);
        return f;
    }
};

struct Form2G {
    int n = 0;
    std::array<std::array<Mat, 7>, 7> c{};
    static Form2G zero(int n, int r) {
        Form2G f;
        f.n = n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) f.c[i][j] = Mat::Zero(r, r);
        return f;
    }
    double antisymmetry_defect() const {
        double d = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                d = std::max(d, (c[i][j] + c[j][i]).cwiseAbs().maxCoeff());
        return d;
    }
};

struct Form2E {
    int n = 0;
    std::array<std::array<Vec, 7>, 7> c{};
    static Form2E zero(int n, int r) {
        Form2E f;
        f.n = n;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) f.c[i][j] = Vec::Zero(r);
        return f;
    }
};

// rank-3 antisymmetric intermediate for δ∇d∇ on 2-forms; not part of the
// public form algebra
struct Form3G {
    int n = 0;
    std::array<std::array<std::array<Mat, 7>, 7>, 7> c{};
};

enum class HiggsVariant { Fiber, Adjoint };

/// A closed-form configuration (∇, u) or (∇, Φ): connection components per
/// chart plus the Higgs field, with the bundle transition between sphere
/// charts when the two trivializations differ.
struct AnalyticPair {
    Geometry geom;
    int rank = 3;
    HiggsVariant variant = HiggsVariant::Fiber;
    double lambda = 0.0;
    std::string label;

    std::function<Form1G(const CPoint&)> A;   // null → flat
    std::function<Vec(const CPoint&)> u;      // fiber Higgs; null → 0
    std::function<Mat(const CPoint&)> phi;    // adjoint Higgs; null → 0

    /// g_{1←0}(y₁): gauge transition applied to chart-0 sections to obtain
    /// their chart-1 representation; identity when null.
    std::function<Mat(const Vec&)> transition;

    Form1G A_at(const CPoint& p) const {
        if (!A) return Form1G::zero(geom.n, rank);
        return A(p);
    }
    Vec u_at(const CPoint& p) const {
        if (!u) return Vec::Zero(rank);
        return u(p);
    }
    Mat phi_at(const CPoint& p) const {
        if (!phi) return Mat::Zero(rank, rank);
        return phi(p);
    }
    Mat transition_at(const Vec& y1) const {
        if (!transition) return Mat::Identity(rank, rank);
        return transition(y1);
    }
};

/// (B, w) ∈ Ω¹(𝔤_E) × Ω⁰(E), or (B, φ) in the adjoint variant.
struct VariationPair {
    std::function<Form1G(const CPoint&)> B;
    std::function<Vec(const CPoint&)> w;
    std::function<Mat(const CPoint&)> phi;

    Form1G B_at(const CPoint& p, int n, int r) const {
        if (!B) return Form1G::zero(n, r);
        return B(p);
    }
    Vec w_at(const CPoint& p, int r) const {
        if (!w) return Vec::Zero(r);
        return w(p);
    }
    Mat phi_at(const CPoint& p, int r) const {
        if (!phi) return Mat::Zero(r, r);
        return phi(p);
    }
};

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

struct BpstParams {
    double rho = 1.0;
    // sphere: center at the named pole; torus: center position
    int pole = 0; // 0 = north, 1 = south
    Vec center;   // torus center (size n) when base is a torus
    double lambda = 0.0;
    std::string higgs = "zero"; // zero | hedgehog (torus only)
};

AnalyticPair make_flat_unit(const Geometry& g, HiggsVariant v, double lambda = 1.0, int rank = 3);
AnalyticPair make_flat_zero(const Geometry& g, HiggsVariant v, double lambda = 1.0, int rank = 3);
AnalyticPair make_bpst(const Geometry& g, const BpstParams& params,
                       HiggsVariant v = HiggsVariant::Fiber);
AnalyticPair make_perturbed(const AnalyticPair& base, std::uint64_t seed, double amp);

/// Parse "name" or "name:key=value,key=value" into a catalog pair.
AnalyticPair parse_entry(const std::string& text, const Geometry& default_geom,
                         HiggsVariant v = HiggsVariant::Fiber);

struct CatalogEntry {
    std::string name;
    std::string params; // human-readable schema
};
std::vector<CatalogEntry> catalog_list();

/// Validate an entry string against the catalog schemas (throws on bad values).
void validate_entry(const std::string& text);

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

/// Pullback of the ambient 1-form f(x)·dx^m ⊗ M, conjugated by the pair's
/// bundle transition in chart 1 so the result is a global section.
VariationPair ambient_one_form(const AnalyticPair& pair,
                               std::function<double(const Vec&)> f, int m, const Mat& M);

/// Scalar section w(x) = f(x)·e (fiber) as a transition-consistent section.
VariationPair ambient_scalar_fiber(const AnalyticPair& pair,
                                   std::function<double(const Vec&)> f, const Vec& e);
VariationPair ambient_scalar_adjoint(const AnalyticPair& pair,
                                     std::function<double(const Vec&)> f, const Mat& M);

/// so(3) rotation of the (possibly non-unit) quaternion q, i.e. R(q/|q|)
/// assembled from the quadratic homogeneous form M(q)/|q|².
Mat quaternion_rotation(const Vec& q);

/// Gauge-transform a pair by an analytic gauge function g(chart point):
/// A ↦ gAgᵀ − (∂g)gᵀ (projected antisymmetric), u ↦ gu, Φ ↦ gΦgᵀ.
/// Derivatives of g are taken by central differences with step h.
AnalyticPair gauge_transformed(const AnalyticPair& base,
                               std::function<Mat(const CPoint&)> gauge, double h);

} // namespace ymh::fields
