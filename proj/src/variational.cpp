#include "ymh/variational.hpp"

#include <random>

namespace ymh::variational {

using namespace smoothfields;
using algebra::bracket;
using algebra::mu;
using fields::Form1E;
using fields::Form2G;
using geometry::chart_components;
using geometry::chart_embed;
using geometry::integrate;

// ---------------------------------------------------------------------------
// pointwise data bundles
// ---------------------------------------------------------------------------

namespace {

struct PairData {
    double ig = 1.0; // ρ^{-2}
    Vec u;
    Form1E du;
    Mat Phi;
    Form1G dPhi;
    Form2G R;
    double lambda = 0.0;
    bool fiber = true;
};

PairData pair_data(const AnalyticPair& pair, const CPoint& p, const DiffCtx& ctx) {
    PairData d;
    const int n = pair.geom.n, r = pair.rank;
    d.ig = inv_g(pair.geom, p);
    d.lambda = pair.lambda;
    d.fiber = pair.variant == HiggsVariant::Fiber;
    d.R = curvature(ctx, p);
    if (d.fiber) {
        d.u = pair.u_at(p);
        UFn ufn = [&pair](const CPoint& q) { return pair.u_at(q); };
        d.du = pair.u ? dnabla_u(ctx, ufn, p, ctx.h1) : Form1E::zero(n, r);
        d.Phi = Mat::Zero(r, r);
        d.dPhi = Form1G::zero(n, r);
    } else {
        d.Phi = pair.phi_at(p);
        PFn pfn = [&pair](const CPoint& q) { return pair.phi_at(q); };
        d.dPhi = pair.phi ? dnabla_phi(ctx, pfn, p, ctx.h1) : Form1G::zero(n, r);
        d.u = Vec::Zero(r);
        d.du = Form1E::zero(n, r);
    }
    return d;
}

struct VarData {
    Form1G B;
    Form2G dB;
    Mat delB;
    Vec w;      // fiber slot
    Form1E dw;
    Mat phi;    // adjoint slot
    Form1G dphi;
};

VarData var_data(const AnalyticPair& pair, const VariationPair& var, const CPoint& p,
                 const DiffCtx& ctx) {
    VarData d;
    const int n = pair.geom.n, r = pair.rank;
    if (var.B) {
        AFn Bfn = var.B;
        d.B = var.B(p);
        const FirstDerivs1G fd = first_derivs_B(ctx, Bfn, p, ctx.h1);
        d.dB = fd.d;
        d.delB = fd.del;
    } else {
        d.B = Form1G::zero(n, r);
        d.dB = Form2G::zero(n, r);
        d.delB = Mat::Zero(r, r);
    }
    if (pair.variant == HiggsVariant::Fiber) {
        if (var.w) {
            d.w = var.w(p);
            d.dw = dnabla_u(ctx, var.w, p, ctx.h1);
        } else {
            d.w = Vec::Zero(r);
            d.dw = Form1E::zero(n, r);
        }
        d.phi = Mat::Zero(r, r);
        d.dphi = Form1G::zero(n, r);
    } else {
        if (var.phi) {
            d.phi = var.phi(p);
            d.dphi = dnabla_phi(ctx, var.phi, p, ctx.h1);
        } else {
            d.phi = Mat::Zero(r, r);
            d.dphi = Form1G::zero(n, r);
        }
        d.w = Vec::Zero(r);
        d.dw = Form1E::zero(n, r);
    }
    return d;
}

double l2_inner(const PairData& pd, const VarData& a, const VarData& b) {
    const int n = a.B.n;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += algebra::inner(a.B.c[i], b.B.c[i]);
    s *= pd.ig;
    if (pd.fiber)
        s += a.w.dot(b.w);
    else
        s += algebra::inner(a.phi, b.phi);
    return s;
}

/// Polarized first-order integrand of 𝓛; the diagonal reproduces
/// ∫⟨𝒮(B,w),(B,w)⟩ after integration by parts.
struct LTerms {
    double curvature = 0.0;
    double mixed = 0.0;
    double higgs = 0.0;
    double total() const { return curvature + mixed + higgs; }
};

LTerms l_bilinear(const PairData& pd, const VarData& a, const VarData& b) {
    const int n = a.B.n;
    const double ig = pd.ig;
    LTerms out;

    // ⟨d∇B_a, d∇B_b⟩ + ⟨δ∇B_a, δ∇B_b⟩ + ⟨ℜ∇(B_a), B_b⟩
    double s2 = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) s2 += algebra::inner(a.dB.c[i][j], b.dB.c[i][j]);
    out.curvature += 0.5 * ig * ig * s2;
    out.curvature += algebra::inner(a.delB, b.delB);
    double sr = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            sr += algebra::inner(bracket(pd.R.c[j][i], a.B.c[j]), b.B.c[i]);
    out.curvature += ig * ig * sr;

    if (pd.fiber) {
        double sBu = 0.0, cross = 0.0, sdw = 0.0;
        for (int i = 0; i < n; ++i) {
            sBu += (a.B.c[i] * pd.u).dot(b.B.c[i] * pd.u);
            cross += pd.du.c[i].dot(a.B.c[i] * b.w) + pd.du.c[i].dot(b.B.c[i] * a.w);
            sdw += a.dw.c[i].dot(b.dw.c[i]);
        }
        out.mixed += ig * sBu + 2.0 * ig * cross;
        const double uu = pd.u.squaredNorm();
        out.higgs += ig * sdw + uu * a.w.dot(b.w) - pd.u.dot(a.w) * pd.u.dot(b.w) +
                     pd.lambda * pd.u.dot(a.w) * pd.u.dot(b.w) -
                     0.5 * pd.lambda * (1.0 - uu) * a.w.dot(b.w);
    } else {
        double sBp = 0.0, cross = 0.0, sdp = 0.0, sPp = 0.0;
        for (int i = 0; i < n; ++i) {
            sBp += algebra::inner(bracket(a.B.c[i], pd.Phi), bracket(b.B.c[i], pd.Phi));
            cross += algebra::inner(pd.dPhi.c[i], bracket(a.B.c[i], b.phi)) +
                     algebra::inner(pd.dPhi.c[i], bracket(b.B.c[i], a.phi));
            sdp += algebra::inner(a.dphi.c[i], b.dphi.c[i]);
        }
        sPp = algebra::inner(bracket(pd.Phi, a.phi), bracket(pd.Phi, b.phi));
        out.mixed += ig * sBp + 2.0 * ig * cross;
        const double pp = algebra::norm2(pd.Phi);
        out.higgs += ig * sdp + sPp +
                     pd.lambda * algebra::inner(pd.Phi, a.phi) * algebra::inner(pd.Phi, b.phi) -
                     0.5 * pd.lambda * (1.0 - pp) * algebra::inner(a.phi, b.phi);
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

EnergyReport energy(const AnalyticPair& pair, const QuadratureRule& rule, const DiffCtx& ctx) {
    const auto& g = pair.geom;
    auto term = [&](const std::function<double(const CPoint&)>& f) {
        return integrate(rule, f);
    };
    EnergyReport rep;
    rep.curvature = 0.5 * term([&](const CPoint& p) {
        return norm2(g, p, curvature(ctx, p));
    });
    if (pair.variant == HiggsVariant::Fiber) {
        UFn ufn = [&pair](const CPoint& q) { return pair.u_at(q); };
        rep.higgs_grad = !pair.u ? 0.0 : 0.5 * term([&](const CPoint& p) {
            return norm2(g, p, dnabla_u(ctx, ufn, p, ctx.h1));
        });
        rep.potential = 0.125 * pair.lambda * term([&](const CPoint& p) {
            const double q = 1.0 - pair.u_at(p).squaredNorm();
            return q * q;
        });
    } else {
        PFn pfn = [&pair](const CPoint& q) { return pair.phi_at(q); };
        rep.higgs_grad = !pair.phi ? 0.0 : 0.5 * term([&](const CPoint& p) {
            return norm2(g, p, dnabla_phi(ctx, pfn, p, ctx.h1));
        });
        rep.potential = 0.125 * pair.lambda * term([&](const CPoint& p) {
            const double q = 1.0 - algebra::norm2(pair.phi_at(p));
            return q * q;
        });
    }
    rep.total = rep.curvature + rep.higgs_grad + rep.potential;
    return rep;
}

// ---------------------------------------------------------------------------
// slice
// ---------------------------------------------------------------------------

double slice_residual(const AnalyticPair& pair, const VariationPair& var,
                      const QuadratureRule& rule, const DiffCtx& ctx) {
    const auto& g = pair.geom;
    const double v = integrate(rule, [&](const CPoint& p) {
        Mat delB = Mat::Zero(pair.rank, pair.rank);
        if (var.B) delB = delta_B(ctx, var.B, p, ctx.h1);
        Mat target;
        if (pair.variant == HiggsVariant::Fiber) {
            target = mu(var.w_at(p, pair.rank), pair.u_at(p));
        } else {
            target = bracket(pair.phi_at(p), var.phi_at(p, pair.rank));
        }
        return algebra::norm2(Mat(delB - target));
    });
    (void)g;
    return std::sqrt(std::max(0.0, v));
}

VariationPair gauge_direction(const AnalyticPair& pair, const smoothfields::PFn& sigma,
                              double h) {
    VariationPair var;
    const AnalyticPair* pp = &pair;
    var.B = [pp, sigma, h](const CPoint& p) {
        DiffCtx c{pp, h, h * 10.0};
        Form1G ds = dnabla_phi(c, sigma, p, h);
        for (int i = 0; i < ds.n; ++i) ds.c[i] = -ds.c[i];
        return ds;
    };
    if (pair.variant == HiggsVariant::Fiber) {
        var.w = [pp, sigma](const CPoint& p) { return Vec(sigma(p) * pp->u_at(p)); };
    } else {
        var.phi = [pp, sigma](const CPoint& p) {
            return bracket(sigma(p), pp->phi_at(p));
        };
    }
    return var;
}

// ---------------------------------------------------------------------------
// the operator 𝒮
// ---------------------------------------------------------------------------

SValue second_variation_apply(const AnalyticPair& pair, const VariationPair& var,
                              const CPoint& p, const DiffCtx& ctx) {
    const int n = pair.geom.n, r = pair.rank;
    const double ig = inv_g(pair.geom, p);
    SValue out;
    out.B = Form1G::zero(n, r);
    out.w = Vec::Zero(r);
    out.phi = Mat::Zero(r, r);

    const Form2G R = curvature(ctx, p);
    Form1G B0 = var.B_at(p, n, r);

    // first slot: Δ∇B + ℜ∇(B) + coupling terms
    if (var.B) {
        out.B = hodge_laplace_B(ctx, var.B, p);
        const Form1G rf = rfrak_1(pair.geom, p, R, B0);
        for (int i = 0; i < n; ++i) out.B.c[i] += rf.c[i];
    }

    if (pair.variant == HiggsVariant::Fiber) {
        const Vec u0 = pair.u_at(p);
        UFn ufn = [&pair](const CPoint& q) { return pair.u_at(q); };
        const Form1E du = pair.u ? dnabla_u(ctx, ufn, p, ctx.h1) : Form1E::zero(n, r);
        const Vec w0 = var.w_at(p, r);
        for (int i = 0; i < n; ++i) {
            out.B.c[i] += mu(Vec(B0.c[i] * u0), u0);
            out.B.c[i] += 2.0 * mu(du.c[i], w0);
        }
        if (var.w) out.w = delta_d_u(ctx, var.w, p);
        out.w += mu(w0, u0) * u0;
        Vec contr = Vec::Zero(r);
        for (int i = 0; i < n; ++i) contr += B0.c[i] * du.c[i];
        out.w += -2.0 * ig * contr;
        out.w += pair.lambda * u0.dot(w0) * u0;
        out.w += -0.5 * pair.lambda * (1.0 - u0.squaredNorm()) * w0;
    } else {
        const Mat Phi0 = pair.phi_at(p);
        PFn pfn = [&pair](const CPoint& q) { return pair.phi_at(q); };
        const Form1G dPhi = pair.phi ? dnabla_phi(ctx, pfn, p, ctx.h1) : Form1G::zero(n, r);
        const Mat phi0 = var.phi_at(p, r);
        for (int i = 0; i < n; ++i) {
            out.B.c[i] -= bracket(bracket(B0.c[i], Phi0), Phi0);
            out.B.c[i] -= 2.0 * bracket(dPhi.c[i], phi0);
        }
        if (var.phi) out.phi = delta_d_phi(ctx, var.phi, p);
        out.phi += bracket(bracket(Phi0, phi0), Phi0);
        Mat contr = Mat::Zero(r, r);
        for (int i = 0; i < n; ++i) contr += bracket(dPhi.c[i], B0.c[i]);
        out.phi += 2.0 * ig * contr;
        out.phi += pair.lambda * algebra::inner(Phi0, phi0) * Phi0;
        out.phi += -0.5 * pair.lambda * (1.0 - algebra::norm2(Phi0)) * phi0;
    }
    return out;
}

SelfAdjointReport self_adjointness_defect(const AnalyticPair& pair, const VariationPair& a,
                                          const VariationPair& b, const QuadratureRule& rule,
                                          const DiffCtx& ctx) {
    const auto& g = pair.geom;
    const int n = g.n, r = pair.rank;
    auto pairing = [&](const VariationPair& x, const VariationPair& y) {
        return integrate(rule, [&](const CPoint& p) {
            const SValue sx = second_variation_apply(pair, x, p, ctx);
            const double ig = inv_g(g, p);
            double s = 0.0;
            const Form1G By = y.B_at(p, n, r);
            for (int i = 0; i < n; ++i) s += algebra::inner(sx.B.c[i], By.c[i]);
            s *= ig;
            if (pair.variant == HiggsVariant::Fiber)
                s += sx.w.dot(y.w_at(p, r));
            else
                s += algebra::inner(sx.phi, y.phi_at(p, r));
            return s;
        });
    };
    SelfAdjointReport rep;
    rep.forward = pairing(a, b);
    rep.backward = pairing(b, a);
    rep.defect = std::abs(rep.forward - rep.backward);
    return rep;
}

// ---------------------------------------------------------------------------
// quadratic form
// ---------------------------------------------------------------------------

QuadraticReport quadratic_form(const AnalyticPair& pair, const VariationPair& var,
                               const QuadratureRule& rule, const DiffCtx& ctx) {
    QuadraticReport rep;
    rep.quad_order = rule.order;
    rep.fd_step = ctx.h1;

    const std::int64_t count = rule.size();
    std::vector<double> cpart(static_cast<size_t>(count)), mpart(static_cast<size_t>(count)),
        hpart(static_cast<size_t>(count)), npart(static_cast<size_t>(count));
    parallel_for(count, [&](std::int64_t i) {
        const CPoint p = rule.chart_node(i);
        const PairData pd = pair_data(pair, p, ctx);
        const VarData vd = var_data(pair, var, p, ctx);
        const LTerms t = l_bilinear(pd, vd, vd);
        const double w = rule.weights[static_cast<size_t>(i)];
        cpart[static_cast<size_t>(i)] = w * t.curvature;
        mpart[static_cast<size_t>(i)] = w * t.mixed;
        hpart[static_cast<size_t>(i)] = w * t.higgs;
        npart[static_cast<size_t>(i)] = w * l2_inner(pd, vd, vd);
    });
    for (std::int64_t i = 0; i < count; ++i) {
        rep.curvature_part += cpart[static_cast<size_t>(i)];
        rep.mixed_part += mpart[static_cast<size_t>(i)];
        rep.higgs_part += hpart[static_cast<size_t>(i)];
        rep.norm2 += npart[static_cast<size_t>(i)];
    }
    rep.value = rep.curvature_part + rep.mixed_part + rep.higgs_part;
    return rep;
}

// ---------------------------------------------------------------------------
// Killing variations and the closed-form identities
// ---------------------------------------------------------------------------

VariationPair killing_variation(const AnalyticPair& pair, const Vec& v, const DiffCtx& ctx) {
    if (pair.geom.kind != geometry::BaseKind::Sphere)
        throw std::invalid_argument("killing_variation: sphere pairs only");
    VariationPair var;
    const AnalyticPair* pp = &pair;
    const double h1 = ctx.h1, h2 = ctx.h2;
    var.B = [pp, v, h1, h2](const CPoint& p) {
        DiffCtx c{pp, h1, h2};
        const int n = pp->geom.n;
        const Vec x = chart_embed(pp->geom, p);
        const Vec V = v - v.dot(x) * x;
        const Vec Vc = chart_components(pp->geom, p, V);
        const Form2G R = curvature(c, p);
        Form1G B = Form1G::zero(n, pp->rank);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) B.c[i] += Vc(j) * R.c[j][i];
        return B;
    };
    if (pair.variant == HiggsVariant::Fiber) {
        if (pair.u)
            var.w = [pp, v, h1, h2](const CPoint& p) {
                DiffCtx c{pp, h1, h2};
                const int n = pp->geom.n;
                const Vec x = chart_embed(pp->geom, p);
                const Vec V = v - v.dot(x) * x;
                const Vec Vc = chart_components(pp->geom, p, V);
                UFn ufn = [pp](const CPoint& q) { return pp->u_at(q); };
                const Form1E du = dnabla_u(c, ufn, p, c.h1);
                Vec w = Vec::Zero(pp->rank);
                for (int j = 0; j < n; ++j) w += Vc(j) * du.c[j];
                return w;
            };
    } else {
        if (pair.phi)
            var.phi = [pp, v, h1, h2](const CPoint& p) {
                DiffCtx c{pp, h1, h2};
                const int n = pp->geom.n;
                const Vec x = chart_embed(pp->geom, p);
                const Vec V = v - v.dot(x) * x;
                const Vec Vc = chart_components(pp->geom, p, V);
                PFn pfn = [pp](const CPoint& q) { return pp->phi_at(q); };
                const Form1G dphi = dnabla_phi(c, pfn, p, c.h1);
                Mat phi = Mat::Zero(pp->rank, pp->rank);
                for (int j = 0; j < n; ++j) phi += Vc(j) * dphi.c[j];
                return phi;
            };
    }
    return var;
}

IdentityReport conformal_identity_check(const AnalyticPair& pair, const Vec& v,
                                        const QuadratureRule& rule, const DiffCtx& ctx) {
    const int n = pair.geom.n, r = pair.rank;
    const VariationPair kv = killing_variation(pair, v, ctx);
    IdentityReport rep;
    rep.lhs = quadratic_form(pair, kv, rule, ctx).value;

    rep.rhs = integrate(rule, [&](const CPoint& p) {
        const double ig = inv_g(pair.geom, p);
        const Vec x = chart_embed(pair.geom, p);
        const double fv = v.dot(x);
        const Form1G Bv = kv.B_at(p, n, r);
        double iv2 = 0.0;
        for (int i = 0; i < n; ++i) iv2 += algebra::norm2(Bv.c[i]);
        iv2 *= ig;

        const Form1G dR = delta_curvature(ctx, p);
        double cross1 = 0.0;
        for (int i = 0; i < n; ++i) cross1 += algebra::inner(Bv.c[i], dR.c[i]);
        cross1 *= ig;

        double hv2 = 0.0, cross2 = 0.0;
        if (pair.variant == HiggsVariant::Fiber) {
            const Vec wv = kv.w_at(p, r);
            hv2 = wv.squaredNorm();
            if (pair.u) {
                UFn ufn = [&pair](const CPoint& q) { return pair.u_at(q); };
                cross2 = delta_d_u(ctx, ufn, p).dot(wv);
            }
        } else {
            const Mat pv = kv.phi_at(p, r);
            hv2 = algebra::norm2(pv);
            if (pair.phi) {
                PFn pfn = [&pair](const CPoint& q) { return pair.phi_at(q); };
                cross2 = algebra::inner(delta_d_phi(ctx, pfn, p), pv);
            }
        }
        return (4.0 - n) * iv2 + (2.0 - n) * hv2 - 2.0 * fv * (cross1 + cross2);
    });
    rep.defect = std::abs(rep.lhs - rep.rhs) / (1.0 + std::abs(rep.rhs));
    return rep;
}

IdentityReport trace_identity_check(const AnalyticPair& pair, const QuadratureRule& rule,
                                    const DiffCtx& ctx) {
    const int n = pair.geom.n;
    IdentityReport rep;
    for (int i = 0; i <= n; ++i) {
        Vec v = Vec::Zero(n + 1);
        v(i) = 1.0;
        const VariationPair kv = killing_variation(pair, v, ctx);
        rep.lhs += quadratic_form(pair, kv, rule, ctx).value;
    }
    const double curv2 = integrate(rule, [&](const CPoint& p) {
        return norm2(pair.geom, p, curvature(ctx, p));
    });
    double higgs2 = 0.0;
    if (pair.variant == HiggsVariant::Fiber && pair.u) {
        UFn ufn = [&pair](const CPoint& q) { return pair.u_at(q); };
        higgs2 = integrate(rule, [&](const CPoint& p) {
            return norm2(pair.geom, p, dnabla_u(ctx, ufn, p, ctx.h1));
        });
    } else if (pair.variant == HiggsVariant::Adjoint && pair.phi) {
        PFn pfn = [&pair](const CPoint& q) { return pair.phi_at(q); };
        higgs2 = integrate(rule, [&](const CPoint& p) {
            return norm2(pair.geom, p, dnabla_phi(ctx, pfn, p, ctx.h1));
        });
    }
    rep.rhs = 2.0 * (4.0 - n) * curv2 + (2.0 - n) * higgs2;
    rep.defect = std::abs(rep.lhs - rep.rhs) / (1.0 + std::abs(rep.rhs));
    return rep;
}

// ---------------------------------------------------------------------------
// trial families and Rayleigh bounds
// ---------------------------------------------------------------------------

std::vector<VariationPair> make_trials(const AnalyticPair& pair, int count,
                                       std::uint64_t seed, const DiffCtx& ctx) {
    std::vector<VariationPair> trials;
    trials.reserve(static_cast<size_t>(count) + pair.geom.n + 2);
    const int r = pair.rank;
    const int ad = pair.geom.ambient_dim();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> mono(0, ad - 1);
    std::uniform_int_distribution<int> degree(0, 2);
    std::uniform_int_distribution<int> fib(0, r - 1);
    std::uniform_int_distribution<int> alg(0, algebra::so_dim(r) - 1);

    auto monomial = [](int a, int b) {
        return [a, b](const Vec& x) {
            double v = 1.0;
            if (a >= 0) v *= x(a);
            if (b >= 0) v *= x(b);
            return v;
        };
    };

    for (int k = 0; k < count; ++k) {
        const int kind = k % 4;
        if (kind == 0) {
            // constant Higgs directions first: the Theorem-3.4 witnesses
            if (pair.variant == HiggsVariant::Fiber) {
                Vec e = Vec::Zero(r);
                e(k / 4 % r) = 1.0;
                trials.push_back(fields::ambient_scalar_fiber(
                    pair, [](const Vec&) { return 1.0; }, e));
            } else {
                trials.push_back(fields::ambient_scalar_adjoint(
                    pair, [](const Vec&) { return 1.0; }, algebra::so_basis(r, k / 4 % algebra::so_dim(r))));
            }
        } else if (kind == 1) {
            const int d = degree(rng);
            const int a = d >= 1 ? mono(rng) : -1;
            const int b = d >= 2 ? mono(rng) : -1;
            if (pair.variant == HiggsVariant::Fiber) {
                Vec e = Vec::Zero(r);
                e(fib(rng)) = 1.0;
                trials.push_back(fields::ambient_scalar_fiber(pair, monomial(a, b), e));
            } else {
                trials.push_back(fields::ambient_scalar_adjoint(pair, monomial(a, b),
                                                                algebra::so_basis(r, alg(rng))));
            }
        } else if (kind == 2) {
            const int d = degree(rng);
            const int a = d >= 1 ? mono(rng) : -1;
            const int b = d >= 2 ? mono(rng) : -1;
            trials.push_back(fields::ambient_one_form(pair, monomial(a, b), mono(rng),
                                                      algebra::so_basis(r, alg(rng))));
        } else {
            const int a = mono(rng);
            VariationPair one = fields::ambient_one_form(pair, monomial(a, -1), mono(rng),
                                                         algebra::so_basis(r, alg(rng)));
            VariationPair two;
            if (pair.variant == HiggsVariant::Fiber) {
                Vec e = Vec::Zero(r);
                e(fib(rng)) = 1.0;
                two = fields::ambient_scalar_fiber(pair, monomial(mono(rng), -1), e);
            } else {
                two = fields::ambient_scalar_adjoint(pair, monomial(mono(rng), -1),
                                                     algebra::so_basis(r, alg(rng)));
            }
            VariationPair both;
            both.B = one.B;
            both.w = two.w;
            both.phi = two.phi;
            trials.push_back(both);
        }
    }
    if (pair.geom.kind == geometry::BaseKind::Sphere) {
        for (int i = 0; i <= pair.geom.n; ++i) {
            Vec v = Vec::Zero(pair.geom.n + 1);
            v(i) = 1.0;
            trials.push_back(killing_variation(pair, v, ctx));
        }
    }
    return trials;
}

namespace {

// σ-basis for gauge projection: ambient monomials of degree ≤ 3 times the
// so(r) basis (least-squares redundancy absorbed by a ridge term).
struct SigmaBasis {
    std::vector<std::array<int, 3>> monos; // up to three ambient factors, -1 = none
    int alg_dim;
    int size() const { return static_cast<int>(monos.size()) * alg_dim; }
};

SigmaBasis sigma_basis(int ambient_dim, int r) {
    SigmaBasis b;
    b.alg_dim = algebra::so_dim(r);
    b.monos.push_back({-1, -1, -1});
    for (int a = 0; a < ambient_dim; ++a) {
        b.monos.push_back({a, -1, -1});
        for (int c = a; c < ambient_dim; ++c) {
            b.monos.push_back({a, c, -1});
            for (int d = c; d < ambient_dim; ++d) b.monos.push_back({a, c, d});
        }
    }
    return b;
}

double eval_mono(const std::array<int, 3>& m, const Vec& x) {
    double v = 1.0;
    for (int idx : m)
        if (idx >= 0) v *= x(idx);
    return v;
}

} // namespace

RayleighReport rayleigh_min(const AnalyticPair& pair, const std::vector<VariationPair>& trials,
                            const QuadratureRule& rule, const DiffCtx& ctx) {
    const int n = pair.geom.n, r = pair.rank;
    const SigmaBasis sb = sigma_basis(pair.geom.ambient_dim(), r);
    const int K = sb.size();
    const int T = static_cast<int>(trials.size());

    // σ_k as analytic functors (transition-consistent like all global sections)
    std::vector<smoothfields::PFn> sigmas;
    sigmas.reserve(static_cast<size_t>(K));
    const AnalyticPair* pp = &pair;
    for (size_t mi = 0; mi < sb.monos.size(); ++mi)
        for (int a = 0; a < sb.alg_dim; ++a) {
            const auto m = sb.monos[mi];
            const Mat M = algebra::so_basis(r, a);
            sigmas.push_back([pp, m, M](const CPoint& q) -> Mat {
                const Vec x = chart_embed(pp->geom, q);
                Mat Mq = M;
                if (pp->transition && q.chart == 1) {
                    const Mat g = pp->transition(q.y);
                    Mq = g * M * g.transpose();
                }
                return eval_mono(m, x) * Mq;
            });
        }

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd LZZ = Eigen::MatrixXd::Zero(K, K);
    Eigen::MatrixXd BT = Eigen::MatrixXd::Zero(K, T);
    Eigen::MatrixXd LZT = Eigen::MatrixXd::Zero(K, T);
    Eigen::VectorXd LTT = Eigen::VectorXd::Zero(T);
    Eigen::VectorXd NTT = Eigen::VectorXd::Zero(T);

    const std::int64_t count = rule.size();
    std::vector<VarData> zd(static_cast<size_t>(K));
    std::vector<VarData> td(static_cast<size_t>(T));
    for (std::int64_t node = 0; node < count; ++node) {
        const CPoint p = rule.chart_node(node);
        const double w = rule.weights[static_cast<size_t>(node)];
        const PairData pd = pair_data(pair, p, ctx);

        // gauge-direction values; dB is algebraic (d∇d∇σ = [R,σ]), δB nested FD
        for (int k = 0; k < K; ++k) {
            const auto& sig = sigmas[static_cast<size_t>(k)];
            VarData& d = zd[static_cast<size_t>(k)];
            const Mat s0 = sig(p);
            Form1G ds = dnabla_phi(ctx, sig, p, ctx.h1);
            d.B = Form1G::zero(n, r);
            for (int i = 0; i < n; ++i) d.B.c[i] = -ds.c[i];
            d.dB = Form2G::zero(n, r);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) d.dB.c[i][j] = -bracket(pd.R.c[i][j], s0);
            AFn Bfn = [&](const CPoint& q) {
                DiffCtx c2{pp, ctx.h1, ctx.h2};
                Form1G dd = dnabla_phi(c2, sig, q, ctx.h1);
                for (int i = 0; i < dd.n; ++i) dd.c[i] = -dd.c[i];
                return dd;
            };
            d.delB = delta_B(ctx, Bfn, p, ctx.h2);
            if (pair.variant == HiggsVariant::Fiber) {
                d.w = s0 * pd.u;
                d.dw = Form1E::zero(n, r);
                for (int i = 0; i < n; ++i) d.dw.c[i] = ds.c[i] * pd.u + s0 * pd.du.c[i];
                d.phi = Mat::Zero(r, r);
                d.dphi = Form1G::zero(n, r);
            } else {
                d.phi = bracket(s0, pd.Phi);
                d.dphi = Form1G::zero(n, r);
                for (int i = 0; i < n; ++i)
                    d.dphi.c[i] = bracket(ds.c[i], pd.Phi) + bracket(s0, pd.dPhi.c[i]);
                d.w = Vec::Zero(r);
                d.dw = Form1E::zero(n, r);
            }
        }
        for (int t = 0; t < T; ++t)
            td[static_cast<size_t>(t)] = var_data(pair, trials[static_cast<size_t>(t)], p, ctx);

        for (int k = 0; k < K; ++k) {
            const VarData& a = zd[static_cast<size_t>(k)];
            for (int l = k; l < K; ++l) {
                const VarData& b = zd[static_cast<size_t>(l)];
                const double gi = l2_inner(pd, a, b);
                const double li = l_bilinear(pd, a, b).total();
                G(k, l) += w * gi;
                LZZ(k, l) += w * li;
                if (l != k) {
                    G(l, k) += w * gi;
                    LZZ(l, k) += w * li;
                }
            }
            for (int t = 0; t < T; ++t) {
                const VarData& b = td[static_cast<size_t>(t)];
                BT(k, t) += w * l2_inner(pd, a, b);
                LZT(k, t) += w * l_bilinear(pd, a, b).total();
            }
        }
        for (int t = 0; t < T; ++t) {
            const VarData& b = td[static_cast<size_t>(t)];
            LTT(t) += w * l_bilinear(pd, b, b).total();
            NTT(t) += w * l2_inner(pd, b, b);
        }
    }

    const double ridge = 1e-12 * (1.0 + G.trace() / K);
    Eigen::LDLT<Eigen::MatrixXd> solver(G + ridge * Eigen::MatrixXd::Identity(K, K));

    RayleighReport rep;
    rep.min_quotient = std::numeric_limits<double>::infinity();
    for (int t = 0; t < T; ++t) {
        const Eigen::VectorXd b = BT.col(t);
        const Eigen::VectorXd c = solver.solve(b);
        const double nn = NTT(t) - 2.0 * c.dot(b) + c.dot(G * c);
        if (nn < 1e-12) continue; // degenerate trial
        const double ll = LTT(t) - 2.0 * c.dot(LZT.col(t)) + c.dot(LZZ * c);
        const double q = ll / nn;
        rep.quotients.push_back(q);
        ++rep.evaluated;
        if (q < rep.min_quotient) {
            rep.min_quotient = q;
            rep.argmin = t;
        }
    }
    if (rep.evaluated == 0) rep.min_quotient = 0.0;
    return rep;
}

// ---------------------------------------------------------------------------
// instability witness
// ---------------------------------------------------------------------------

WitnessReport instability_witness(const AnalyticPair& pair, const QuadratureRule& rule,
                                  const DiffCtx& ctx, int trial_count, std::uint64_t seed) {
    WitnessReport rep;
    const int r = pair.rank;

    // gate: the mechanism concerns pairs with |higgs| far from 1
    double maxu = 0.0, maxR = 0.0;
    const std::int64_t probe = std::min<std::int64_t>(rule.size(), 500);
    for (std::int64_t i = 0; i < probe; ++i) {
        const CPoint p = rule.chart_node(i * std::max<std::int64_t>(1, rule.size() / probe));
        maxu = std::max(maxu, pair.variant == HiggsVariant::Fiber
                                  ? pair.u_at(p).norm()
                                  : std::sqrt(algebra::norm2(pair.phi_at(p))));
        maxR = std::max(maxR, std::sqrt(norm2(pair.geom, p, curvature(ctx, p))));
    }

    auto l_of_w = [&](const VariationPair& var) {
        return quadratic_form(pair, var, rule, ctx);
    };

    std::vector<VariationPair> candidates;
    std::vector<std::string> names;
    if (maxR < 1e-6) {
        // flat connection: covariantly constant sections exist
        for (int f = 0; f < (pair.variant == HiggsVariant::Fiber ? r : algebra::so_dim(r));
             ++f) {
            if (pair.variant == HiggsVariant::Fiber) {
                Vec e = Vec::Zero(r);
                e(f) = 1.0;
                candidates.push_back(
                    fields::ambient_scalar_fiber(pair, [](const Vec&) { return 1.0; }, e));
            } else {
                candidates.push_back(fields::ambient_scalar_adjoint(
                    pair, [](const Vec&) { return 1.0; }, algebra::so_basis(r, f)));
            }
            names.push_back("constant section " + std::to_string(f));
        }
    } else {
        // minimize ∫|d∇w|²/∫|w|² over a smooth trial basis (generalized
        // eigenproblem on monomial-times-direction sections)
        std::vector<VariationPair> basis;
        const int ad = pair.geom.ambient_dim();
        for (int d = 0; d <= 1; ++d)
            for (int a = (d == 0 ? -1 : 0); a < (d == 0 ? 0 : ad); ++a)
                for (int f = 0; f < (pair.variant == HiggsVariant::Fiber ? r : algebra::so_dim(r)); ++f) {
                    auto fn = [a](const Vec& x) { return a < 0 ? 1.0 : x(a); };
                    if (pair.variant == HiggsVariant::Fiber) {
                        Vec e = Vec::Zero(r);
                        e(f) = 1.0;
                        basis.push_back(fields::ambient_scalar_fiber(pair, fn, e));
                    } else {
                        basis.push_back(fields::ambient_scalar_adjoint(pair, fn,
                                                                       algebra::so_basis(r, f)));
                    }
                }
        const int K = static_cast<int>(basis.size());
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(K, K), M = Eigen::MatrixXd::Zero(K, K);
        for (std::int64_t node = 0; node < rule.size(); ++node) {
            const CPoint p = rule.chart_node(node);
            const double w = rule.weights[static_cast<size_t>(node)];
            const double ig = inv_g(pair.geom, p);
            std::vector<VarData> vd(static_cast<size_t>(K));
            for (int k = 0; k < K; ++k)
                vd[static_cast<size_t>(k)] = var_data(pair, basis[static_cast<size_t>(k)], p, ctx);
            for (int k = 0; k < K; ++k)
                for (int l = k; l < K; ++l) {
                    double s = 0.0, m = 0.0;
                    if (pair.variant == HiggsVariant::Fiber) {
                        for (int i = 0; i < pair.geom.n; ++i)
                            s += vd[k].dw.c[i].dot(vd[l].dw.c[i]);
                        s *= ig;
                        m = vd[k].w.dot(vd[l].w);
                    } else {
                        for (int i = 0; i < pair.geom.n; ++i)
                            s += algebra::inner(vd[k].dphi.c[i], vd[l].dphi.c[i]);
                        s *= ig;
                        m = algebra::inner(vd[k].phi, vd[l].phi);
                    }
                    S(k, l) += w * s;
                    M(k, l) += w * m;
                    if (l != k) {
                        S(l, k) = S(k, l);
                        M(l, k) = M(k, l);
                    }
                }
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(S, M);
        const Eigen::VectorXd c = es.eigenvectors().col(0);
        std::vector<std::function<Vec(const CPoint&)>> wfns;
        std::vector<std::function<Mat(const CPoint&)>> pfns;
        for (int k = 0; k < K; ++k) {
            if (pair.variant == HiggsVariant::Fiber) wfns.push_back(basis[static_cast<size_t>(k)].w);
            else pfns.push_back(basis[static_cast<size_t>(k)].phi);
        }
        VariationPair comb;
        if (pair.variant == HiggsVariant::Fiber) {
            comb.w = [wfns, c](const CPoint& p) {
                Vec acc = c(0) * wfns[0](p);
                for (size_t k = 1; k < wfns.size(); ++k) acc += c(static_cast<int>(k)) * wfns[k](p);
                return acc;
            };
        } else {
            comb.phi = [pfns, c](const CPoint& p) {
                Mat acc = c(0) * pfns[0](p);
                for (size_t k = 1; k < pfns.size(); ++k) acc += c(static_cast<int>(k)) * pfns[k](p);
                return acc;
            };
        }
        candidates.push_back(comb);
        names.push_back("dirichlet-minimizing section");
    }

    // sweep of smooth Higgs-slot trials (seeded, deterministic)
    {
        std::mt19937_64 rng(seed);
        const int ad = pair.geom.ambient_dim();
        std::uniform_int_distribution<int> mono(0, ad - 1);
        std::uniform_int_distribution<int> degree(0, 2);
        std::uniform_int_distribution<int> fib(0, r - 1);
        std::uniform_int_distribution<int> alg(0, algebra::so_dim(r) - 1);
        for (int k = static_cast<int>(candidates.size()); k < trial_count; ++k) {
            const int d = degree(rng);
            const int a = d >= 1 ? mono(rng) : -1;
            const int b = d >= 2 ? mono(rng) : -1;
            auto fn = [a, b](const Vec& x) {
                double v = 1.0;
                if (a >= 0) v *= x(a);
                if (b >= 0) v *= x(b);
                return v;
            };
            if (pair.variant == HiggsVariant::Fiber) {
                Vec e = Vec::Zero(r);
                e(fib(rng)) = 1.0;
                candidates.push_back(fields::ambient_scalar_fiber(pair, fn, e));
            } else {
                candidates.push_back(
                    fields::ambient_scalar_adjoint(pair, fn, algebra::so_basis(r, alg(rng))));
            }
            names.push_back("trial " + std::to_string(k));
        }
    }

    rep.value = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < candidates.size(); ++k) {
        const QuadraticReport q = l_of_w(candidates[k]);
        if (q.norm2 < 1e-12) continue;
        if (q.value < rep.value) {
            rep.value = q.value;
            rep.rayleigh = q.value / q.norm2;
            rep.description = names[k] + (maxu > 0.1 ? " [warn: |higgs| not small]" : "");
        }
    }
    rep.negative = rep.value < 0.0;
    return rep;
}

bool el_admissible(const AnalyticPair& pair, const QuadratureRule& rule, const DiffCtx& ctx,
                   double threshold) {
    const auto res = smoothfields::el_residual(pair, rule, ctx.h1, ctx.h2);
    return std::max(res.eq_connection, res.eq_higgs) < threshold;
}

} // namespace ymh::variational
