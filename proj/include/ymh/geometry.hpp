/// @file geometry.hpp
/// @brief Charts, metrics and quadrature on Sⁿ (n = 2..7) and flat Tⁿ, plus the
///        conformal Killing fields V = grad(v·x) of the round sphere.
///
/// The sphere carries two stereographic charts, one centered at each pole
/// (chart 0 at +e_{n+1}, chart 1 at −e_{n+1}); a point is evaluated in the
/// chart whose center is nearer, so |y| ≤ 1 at every working point and the
/// handoff radius 1.5 is never approached by a finite-difference stencil.
/// The metric is g = ρ²δ with ρ(y) = 2/(1+|y|²).
#pragma once

#include "ymh/common.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace ymh::geometry {

enum class BaseKind { Sphere, Torus };

struct Geometry {
    BaseKind kind = BaseKind::Sphere;
    int n = 4;        // manifold dimension
    double L = 1.0;   // torus period (per axis)

    int ambient_dim() const { return kind == BaseKind::Sphere ? n + 1 : n; }
};

inline Geometry sphere(int n) { return Geometry{BaseKind::Sphere, n, 0.0}; }
inline Geometry torus(int n, double L = 1.0) { return Geometry{BaseKind::Torus, n, L}; }

/// A point in chart coordinates. For the torus there is a single chart (id 0)
/// and y is the position in [0,L)ⁿ.
struct CPoint {
    int chart = 0;
    Vec y;
};

// ---------------------------------------------------------------------------
// Stereographic charts
// ---------------------------------------------------------------------------

/// Conformal factor ρ(y) = 2/(1+|y|²); √g = ρⁿ.
inline double conf_rho(const Geometry& g, const Vec& y) {
    if (g.kind == BaseKind::Torus) return 1.0;
    return 2.0 / (1.0 + y.squaredNorm());
}

/// Chart → ambient. Chart c is centered at s_c·e_{n+1}, s_0 = +1, s_1 = −1.
Vec chart_embed(const Geometry& g, const CPoint& p);

/// Ambient → chart coordinates in the given chart.
Vec chart_project(const Geometry& g, const Vec& x, int chart);

/// Chart whose center is nearest to x (sphere); 0 for the torus.
int preferred_chart(const Geometry& g, const Vec& x);

CPoint chart_point(const Geometry& g, const Vec& x);

/// ∂x/∂yⁱ, an (n+1)×n matrix with JᵀJ = ρ²·Id.
Mat chart_jacobian(const Geometry& g, const CPoint& p);

/// Γᵏᵢⱼ of the conformal metric, closed form: −ρ(δₖᵢyⱼ + δₖⱼyᵢ − δᵢⱼyₖ).
inline double christoffel(const Geometry& g, const CPoint& p, int k, int i, int j) {
    if (g.kind == BaseKind::Torus) return 0.0;
    const double rho = conf_rho(g, p.y);
    double v = 0.0;
    if (k == i) v += p.y(j);
    if (k == j) v += p.y(i);
    if (i == j) v -= p.y(k);
    return -rho * v;
}

/// Components of an ambient tangent vector in the chart basis: ρ⁻²Jᵀw.
Vec chart_components(const Geometry& g, const CPoint& p, const Vec& w_ambient);

/// Chart-coordinate transition between the two sphere charts: inversion y ↦ y/|y|².
inline Vec chart_transition(const Vec& y) { return y / y.squaredNorm(); }

/// Orthonormal frame êᵢ = ρ⁻¹∂ᵢ at a point, with the Christoffel data needed
/// for covariant differencing.
struct PointFrame {
    Geometry geom;
    CPoint p;
    double rho;
    Mat frame; // columns = ambient frame vectors (sphere) or unit axes (torus)

    static PointFrame at(const Geometry& g, const CPoint& p);
    double gamma(int k, int i, int j) const { return christoffel(geom, p, k, i, j); }
};

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Nodes and positive weights realizing ∫_M · dV. Sphere nodes are stored as
/// ambient unit vectors, torus nodes as chart positions.
struct QuadratureRule {
    Geometry geom;
    int order = 24;                 // points per hyperspherical angle / sites per axis
    std::vector<double> nodes;      // flattened, node-major
    std::vector<double> weights;

    std::int64_t size() const { return static_cast<std::int64_t>(weights.size()); }
    int node_dim() const { return geom.ambient_dim(); }
    Vec node(std::int64_t i) const {
        const int d = node_dim();
        Vec v(d);
        for (int k = 0; k < d; ++k) v(k) = nodes[static_cast<size_t>(i) * d + k];
        return v;
    }
    CPoint chart_node(std::int64_t i) const;

    double weight_sum() const;

    std::string to_json() const;                       // nodes/weights base64(LE f64)
    static QuadratureRule from_json(const std::string& text);
};

/// Tensor-product Gauss–Legendre rule in hyperspherical angles (sphere) or a
/// uniform periodic grid (torus; exact for smooth periodic integrands).
QuadratureRule build_rule(const Geometry& g, int order);

/// Σᵢ wᵢ f(xᵢ) with a deterministic fixed-order reduction. Non-finite node
/// values are rejected with the node index.
double integrate(const QuadratureRule& rule, const std::function<double(const CPoint&)>& f);

/// Closed-form Vol(Sⁿ) = 2π^{(n+1)/2}/Γ((n+1)/2); torus volume Lⁿ.
double volume(const Geometry& g);

// ---------------------------------------------------------------------------
// Conformal Killing fields of Sⁿ
// ---------------------------------------------------------------------------

/// V(x) = v − (v·x)x, the gradient of f_v(x) = v·x restricted to the sphere.
struct KillingField {
    Vec v;

    Vec at(const Vec& x) const { return v - v.dot(x) * x; }
    double potential(const Vec& x) const { return v.dot(x); }
};

/// v − (v·x)x with a tolerance check on |x| = 1.
Vec killing_field(const Geometry& g, const Vec& v, const Vec& x);

/// Residuals of D_X V = −f_v X and D∗DV = V at x, evaluated by central
/// differences in the preferred chart (steps h1 for first, h2 for second
/// derivatives). Both decay at O(h²).
struct KillingResiduals {
    double first;  // |D_X V + f_v X|_g
    double second; // |D∗DV − V|_g
    double dxv_norm;
};
KillingResiduals killing_identities_residual(const Geometry& g, const Vec& v, const Vec& x,
                                             const Vec& X_ambient, double h1, double h2);

} // namespace ymh::geometry
