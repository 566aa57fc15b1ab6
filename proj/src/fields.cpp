#include "ymh/fields.hpp"

#include <map>
#include <random>
#include <sstream>

namespace ymh::fields {

using geometry::BaseKind;
using geometry::chart_embed;
using geometry::chart_jacobian;
using geometry::chart_transition;

// ---------------------------------------------------------------------------
// Quaternion / 't Hooft machinery
// ---------------------------------------------------------------------------

// eta[a][mu][nu], mu,nu in 0..3 with index 3 playing the distinguished role.
static double thooft_eta(int a, int mu, int nu, bool bar) {
    auto eps = [](int i, int j, int k) -> double {
        if (i == j || j == k || i == k) return 0.0;
        return ((j - i) * (k - j) * (k - i) > 0) ? 1.0 : -1.0;
    };
    const double s = bar ? -1.0 : 1.0;
    if (mu < 3 && nu < 3) return eps(a, mu, nu);
    if (nu == 3 && mu < 3) return s * (a == mu ? 1.0 : 0.0);
    if (mu == 3 && nu < 3) return -s * (a == nu ? 1.0 : 0.0);
    return 0.0;
}

Mat quaternion_rotation(const Vec& q) {
    // q = (q0, q1, q2, q3); returns M(q)/|q|² with M quadratic homogeneous.
    const double q0 = q(0);
    Eigen::Vector3d qv(q(1), q(2), q(3));
    const double n2 = q.squaredNorm();
    Eigen::Matrix3d K;
    K << 0, -qv(2), qv(1), qv(2), 0, -qv(0), -qv(1), qv(0), 0;
    Eigen::Matrix3d M = (q0 * q0 - qv.squaredNorm()) * Eigen::Matrix3d::Identity() +
                        2.0 * qv * qv.transpose() + 2.0 * q0 * K;
    Mat R(3, 3);
    R = M / n2;
    return R;
}

// d/dq_k of quaternion_rotation at q (exact; M is quadratic in q).
static Mat quaternion_rotation_deriv(const Vec& q, int k) {
    const double q0 = q(0);
    Eigen::Vector3d qv(q(1), q(2), q(3));
    const double n2 = q.squaredNorm();
    Eigen::Matrix3d K;
    K << 0, -qv(2), qv(1), qv(2), 0, -qv(0), -qv(1), qv(0), 0;
    Eigen::Matrix3d M = (q0 * q0 - qv.squaredNorm()) * Eigen::Matrix3d::Identity() +
                        2.0 * qv * qv.transpose() + 2.0 * q0 * K;
    Eigen::Matrix3d dM;
    if (k == 0) {
        dM = 2.0 * q0 * Eigen::Matrix3d::Identity() + 2.0 * K;
    } else {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e(k - 1) = 1.0;
        Eigen::Matrix3d dK;
        dK << 0, -e(2), e(1), e(2), 0, -e(0), -e(1), e(0), 0;
        dM = -2.0 * qv(k - 1) * Eigen::Matrix3d::Identity() +
             2.0 * (e * qv.transpose() + qv * e.transpose()) + 2.0 * q0 * dK;
    }
    Eigen::Matrix3d dR = (dM * n2 - M * 2.0 * q(k)) / (n2 * n2);
    Mat out(3, 3);
    out = dR;
    return out;
}

// ---------------------------------------------------------------------------
// Flat entries
// ---------------------------------------------------------------------------

AnalyticPair make_flat_unit(const Geometry& g, HiggsVariant v, double lambda, int rank) {
    AnalyticPair p;
    p.geom = g;
    p.rank = rank;
    p.variant = v;
    p.lambda = lambda;
    p.label = "flat_unit";
    if (v == HiggsVariant::Fiber) {
        p.u = [rank](const CPoint&) {
            Vec e = Vec::Zero(rank);
            e(0) = 1.0;
            return e;
        };
    } else {
        p.phi = [rank](const CPoint&) {
            // unit-norm constant adjoint Higgs: |L|² = ½Tr(LᵀL) = 1
            Mat L = Mat::Zero(rank, rank);
            L(0, 1) = 1.0;
            L(1, 0) = -1.0;
            return L;
        };
    }
    return p;
}

AnalyticPair make_flat_zero(const Geometry& g, HiggsVariant v, double lambda, int rank) {
    AnalyticPair p;
    p.geom = g;
    p.rank = rank;
    p.variant = v;
    p.lambda = lambda;
    p.label = "flat_zero";
    return p;
}

// ---------------------------------------------------------------------------
// BPST instanton
// ---------------------------------------------------------------------------

// Regular-gauge potential on R⁴ in the adjoint so(3) embedding:
// A_mu = 2 eta^a_{mu nu} (y-c)_nu / (|y-c|² + ρ²) · L_a.
static Form1G bpst_regular(const Vec& y, const Vec& c, double rho2) {
    Form1G A = Form1G::zero(4, 3);
    Vec d = y - c;
    const double denom = d.squaredNorm() + rho2;
    for (int mu = 0; mu < 4; ++mu) {
        Mat m = Mat::Zero(3, 3);
        for (int a = 0; a < 3; ++a) {
            double coeff = 0.0;
            for (int nu = 0; nu < 4; ++nu) coeff += thooft_eta(a, mu, nu, false) * d(nu);
            if (coeff != 0.0) m += (2.0 * coeff / denom) * algebra::so3_basis(a);
        }
        A.c[mu] = m;
    }
    return A;
}

// vector-part conjugate; the regularizing rotation at the instanton's far pole
// is R(q̄), not R(q)
static Vec quat_conj(const Vec& q) {
    Vec out = q;
    for (int i = 1; i < 4; ++i) out(i) = -q(i);
    return out;
}

AnalyticPair make_bpst(const Geometry& g, const BpstParams& params, HiggsVariant v) {
    if (g.n != 4) throw std::invalid_argument("bpst entries require n = 4");
    if (params.rho <= 0.0) throw std::invalid_argument("bpst: rho must be positive");
    AnalyticPair p;
    p.geom = g;
    p.rank = 3;
    p.variant = v;
    p.lambda = params.lambda;
    const double rho2 = params.rho * params.rho;

    if (g.kind == BaseKind::Torus) {
        Vec c = params.center;
        if (c.size() != 4) {
            c = Vec::Zero(4);
            for (int i = 0; i < 4; ++i) c(i) = 0.5 * g.L;
        }
        p.label = "bpst_scaled";
        p.A = [c, rho2, g](const CPoint& q) {
            // minimum-image displacement keeps the entry smooth across the seam
            Vec y = q.y;
            for (int i = 0; i < 4; ++i) {
                double d = std::remainder(y(i) - c(i), g.L);
                y(i) = c(i) + d;
            }
            return bpst_regular(y, c, rho2);
        };
        if (params.higgs == "hedgehog" && v == HiggsVariant::Fiber) {
            p.u = [c, g](const CPoint& q) {
                Vec d(4);
                for (int i = 0; i < 4; ++i) d(i) = std::remainder(q.y(i) - c(i), g.L);
                Vec e = Vec::Zero(3);
                e(0) = 1.0;
                if (d.norm() < 1e-14) return e;
                return Vec(quaternion_rotation(d) * e);
            };
        }
        return p;
    }

    // Sphere: native formula in the chart centered at the instanton pole,
    // inversion pullback + hedgehog gauge rotation in the other chart.
    const int home = params.pole; // chart id whose center carries the instanton
    p.label = "bpst_s4";
    p.transition = [home](const Vec& y1) -> Mat {
        // g_{1←0}: chart-0 sections conjugate by this to live in chart 1
        if (home == 0) return quaternion_rotation(quat_conj(y1));
        const Vec y0 = chart_transition(y1);
        return Mat(quaternion_rotation(quat_conj(y0)).transpose());
    };
    p.A = [home, rho2](const CPoint& q) -> Form1G {
        const Vec zero_c = Vec::Zero(4);
        if (q.chart == home) return bpst_regular(q.y, zero_c, rho2);
        // other chart: y_home = y/|y|², pull back, then gauge-rotate
        Vec yp = q.y;
        double s2 = yp.squaredNorm();
        if (s2 < 1e-20) {
            // the gauged field is smooth at the far pole; nudge off the
            // removable 0/0 of the hedgehog rotation
            yp(0) += 1e-9;
            s2 = yp.squaredNorm();
        }
        const Vec yh = chart_transition(yp);
        Form1G Ah = bpst_regular(yh, Vec::Zero(4), rho2);
        // pullback: Ap_i(yp) = Σ_j Ah_j(yh) ∂yh_j/∂yp_i
        Form1G Ap = Form1G::zero(4, 3);
        for (int i = 0; i < 4; ++i) {
            Mat m = Mat::Zero(3, 3);
            for (int j = 0; j < 4; ++j) {
                const double dji =
                    ((i == j ? 1.0 : 0.0) * s2 - 2.0 * yp(i) * yp(j)) / (s2 * s2);
                m += Ah.c[j] * dji;
            }
            Ap.c[i] = m;
        }
        // gauge: A ↦ R A Rᵀ − (∂R)Rᵀ with R = R(conj(ŷ)) exact
        const Vec qc = quat_conj(yp);
        const Mat R = quaternion_rotation(qc);
        Form1G out = Form1G::zero(4, 3);
        for (int i = 0; i < 4; ++i) {
            const double sign = i == 0 ? 1.0 : -1.0; // chain rule through conj
            Mat dR = sign * quaternion_rotation_deriv(qc, i);
            Mat a = R * Ap.c[i] * R.transpose() - dR * R.transpose();
            out.c[i] = algebra::antisym_part(a); // antisym up to fp noise
        }
        return out;
    };
    return p;
}

// ---------------------------------------------------------------------------
// Perturbations
// ---------------------------------------------------------------------------

namespace {

struct PolyTerm {
    double coeff;
    std::array<int, 8> pows; // ambient monomial powers
    int dir;                 // ambient form direction (A-terms)
    int alg;                 // so(r) basis index or fiber index
};

double eval_poly(const PolyTerm& t, const Vec& x) {
    double v = t.coeff;
    for (int i = 0; i < x.size(); ++i)
        for (int k = 0; k < t.pows[static_cast<size_t>(i)]; ++k) v *= x(i);
    return v;
}

} // namespace

AnalyticPair make_perturbed(const AnalyticPair& base, std::uint64_t seed, double amp) {
    AnalyticPair p = base;
    p.label = "perturbed(" + base.label + ")";
    const int n = base.geom.n;
    const int ad = base.geom.ambient_dim();
    const int r = base.rank;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pow_dist(0, 2);
    std::uniform_int_distribution<int> dir_dist(0, ad - 1);
    std::uniform_int_distribution<int> alg_dist(0, algebra::so_dim(r) - 1);
    std::uniform_int_distribution<int> fib_dist(0, r - 1);
    std::normal_distribution<double> coeff_dist(0.0, 1.0);

    std::vector<PolyTerm> a_terms(6), u_terms(4);
    for (auto& t : a_terms) {
        t.coeff = coeff_dist(rng);
        t.pows.fill(0);
        t.pows[static_cast<size_t>(dir_dist(rng))] = pow_dist(rng);
        t.dir = dir_dist(rng);
        t.alg = alg_dist(rng);
    }
    for (auto& t : u_terms) {
        t.coeff = coeff_dist(rng);
        t.pows.fill(0);
        t.pows[static_cast<size_t>(dir_dist(rng))] = pow_dist(rng);
        t.dir = 0;
        t.alg = fib_dist(rng);
    }

    auto base_A = base.A;
    auto trans = base.transition;
    const auto geom = base.geom;
    p.A = [=](const CPoint& q) -> Form1G {
        Form1G A = base_A ? base_A(q) : Form1G::zero(n, r);
        const Vec x = chart_embed(geom, q);
        const Mat J = chart_jacobian(geom, q);
        Mat g;
        const bool conj = trans && q.chart == 1;
        if (conj) g = trans(q.y);
        for (const auto& t : a_terms) {
            const double f = amp * eval_poly(t, x);
            if (f == 0.0) continue;
            Mat M = algebra::so_basis(r, t.alg);
            if (conj) M = g * M * g.transpose();
            for (int i = 0; i < n; ++i) A.c[i] += f * J(t.dir, i) * M;
        }
        return A;
    };

    if (base.variant == HiggsVariant::Fiber) {
        auto base_u = base.u;
        p.u = [=](const CPoint& q) -> Vec {
            Vec u = base_u ? base_u(q) : Vec::Zero(r);
            const Vec x = chart_embed(geom, q);
            Mat g;
            const bool conj = trans && q.chart == 1;
            if (conj) g = trans(q.y);
            for (const auto& t : u_terms) {
                const double f = amp * eval_poly(t, x);
                Vec e = Vec::Zero(r);
                e(t.alg) = 1.0;
                if (conj) e = g * e;
                u += f * e;
            }
            return u;
        };
    } else {
        auto base_phi = base.phi;
        p.phi = [=](const CPoint& q) -> Mat {
            Mat phi = base_phi ? base_phi(q) : Mat::Zero(r, r);
            const Vec x = chart_embed(geom, q);
            Mat g;
            const bool conj = trans && q.chart == 1;
            if (conj) g = trans(q.y);
            for (const auto& t : u_terms) {
                const double f = amp * eval_poly(t, x);
                Mat M = algebra::so_basis(r, t.alg % algebra::so_dim(r));
                if (conj) M = g * M * g.transpose();
                phi += f * M;
            }
            return phi;
        };
    }
    return p;
}

// ---------------------------------------------------------------------------
// Section builders
// ---------------------------------------------------------------------------

VariationPair ambient_one_form(const AnalyticPair& pair,
                               std::function<double(const Vec&)> f, int m, const Mat& M) {
    VariationPair var;
    const auto geom = pair.geom;
    const int n = geom.n;
    auto trans = pair.transition;
    var.B = [=](const CPoint& q) -> Form1G {
        Form1G B = Form1G::zero(n, static_cast<int>(M.rows()));
        const Vec x = chart_embed(geom, q);
        const Mat J = chart_jacobian(geom, q);
        const double fv = f(x);
        Mat Mq = M;
        if (trans && q.chart == 1) {
            const Mat g = trans(q.y);
            Mq = g * M * g.transpose();
        }
        for (int i = 0; i < n; ++i) B.c[i] = fv * J(m, i) * Mq;
        return B;
    };
    return var;
}

VariationPair ambient_scalar_fiber(const AnalyticPair& pair,
                                   std::function<double(const Vec&)> f, const Vec& e) {
    VariationPair var;
    const auto geom = pair.geom;
    auto trans = pair.transition;
    var.w = [=](const CPoint& q) -> Vec {
        const Vec x = chart_embed(geom, q);
        Vec eq = e;
        if (trans && q.chart == 1) eq = trans(q.y) * e;
        return f(x) * eq;
    };
    return var;
}

VariationPair ambient_scalar_adjoint(const AnalyticPair& pair,
                                     std::function<double(const Vec&)> f, const Mat& M) {
    VariationPair var;
    const auto geom = pair.geom;
    auto trans = pair.transition;
    var.phi = [=](const CPoint& q) -> Mat {
        const Vec x = chart_embed(geom, q);
        Mat Mq = M;
        if (trans && q.chart == 1) {
            const Mat g = trans(q.y);
            Mq = g * M * g.transpose();
        }
        return f(x) * Mq;
    };
    return var;
}

AnalyticPair gauge_transformed(const AnalyticPair& base,
                               std::function<Mat(const CPoint&)> gauge, double h) {
    AnalyticPair p = base;
    p.label = base.label + "+gauge";
    const int n = base.geom.n;
    const int r = base.rank;
    auto base_A = base.A;
    p.A = [=](const CPoint& q) -> Form1G {
        Form1G A = base_A ? base_A(q) : Form1G::zero(n, r);
        const Mat g = gauge(q);
        Form1G out = Form1G::zero(n, r);
        for (int i = 0; i < n; ++i) {
            CPoint qp = q, qm = q;
            qp.y(i) += h;
            qm.y(i) -= h;
            const Mat dg = (gauge(qp) - gauge(qm)) / (2.0 * h);
            out.c[i] = algebra::antisym_part(g * A.c[i] * g.transpose() -
                                             dg * g.transpose());
        }
        return out;
    };
    if (base.variant == HiggsVariant::Fiber) {
        auto base_u = base.u;
        p.u = [=](const CPoint& q) -> Vec {
            const Vec u = base_u ? base_u(q) : Vec::Zero(r);
            return gauge(q) * u;
        };
    } else {
        auto base_phi = base.phi;
        p.phi = [=](const CPoint& q) -> Mat {
            const Mat phi = base_phi ? base_phi(q) : Mat::Zero(r, r);
            const Mat g = gauge(q);
            return g * phi * g.transpose();
        };
    }
    return p;
}

// ---------------------------------------------------------------------------
// Catalog parsing
// ---------------------------------------------------------------------------

static std::map<std::string, std::string> parse_params(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("catalog parameter must be key=value: " + item);
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

std::vector<CatalogEntry> catalog_list() {
    return {
        {"flat_unit", "lambda=<real>=1"},
        {"flat_zero", "lambda=<real>=1"},
        {"bpst_s4", "rho=<real>0=1, x0={north,south}=north, lambda=<real>=0"},
        {"bpst_scaled",
         "rho=<real>0=1, x0={north,south}|center=<real>, base={s4,t4}=s4, "
         "lambda=<real>=0, higgs={zero,hedgehog}=zero"},
        {"perturbed", "base=<entry>=flat_unit, seed=<int>=1, amp=<real>=0.1"},
    };
}

AnalyticPair parse_entry(const std::string& text, const Geometry& default_geom, HiggsVariant v) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    std::map<std::string, std::string> kv;
    if (colon != std::string::npos) kv = parse_params(text.substr(colon + 1));

    auto take = [&kv](const std::string& key, const std::string& dflt) {
        auto it = kv.find(key);
        if (it == kv.end()) return dflt;
        std::string val = it->second;
        kv.erase(it);
        return val;
    };
    auto done = [&kv, &name]() {
        if (!kv.empty())
            throw std::invalid_argument("unknown parameter '" + kv.begin()->first +
                                        "' for catalog entry " + name);
    };

    if (name == "flat_unit" || name == "flat_zero") {
        const double lambda = std::stod(take("lambda", "1"));
        if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
        done();
        return name == "flat_unit" ? make_flat_unit(default_geom, v, lambda)
                                   : make_flat_zero(default_geom, v, lambda);
    }
    if (name == "bpst_s4" || name == "bpst_scaled") {
        BpstParams bp;
        bp.rho = std::stod(take("rho", "1"));
        if (bp.rho <= 0) throw std::invalid_argument("bpst: rho must be > 0");
        bp.lambda = std::stod(take("lambda", "0"));
        if (bp.lambda < 0) throw std::invalid_argument("lambda must be >= 0");
        const std::string x0 = take("x0", "north");
        bp.pole = x0 == "south" ? 1 : 0;
        bp.higgs = take("higgs", "zero");
        if (bp.higgs != "zero" && bp.higgs != "hedgehog")
            throw std::invalid_argument("bpst: higgs must be zero|hedgehog");
        std::string base = take("base", name == "bpst_s4" ? "s4" : "s4");
        const std::string center = take("center", "");
        Geometry g = default_geom;
        if (base == "t4") {
            g = geometry::torus(4, default_geom.kind == BaseKind::Torus ? default_geom.L : 1.0);
            if (!center.empty()) {
                bp.center = Vec::Constant(4, std::stod(center));
            }
        } else if (base == "s4") {
            g = geometry::sphere(4);
        } else {
            throw std::invalid_argument("bpst: base must be s4|t4");
        }
        done();
        return make_bpst(g, bp, v);
    }
    if (name == "perturbed") {
        const std::string base = take("base", "flat_unit");
        const std::uint64_t seed = std::stoull(take("seed", "1"));
        const double amp = std::stod(take("amp", "0.1"));
        done();
        return make_perturbed(parse_entry(base, default_geom, v), seed, amp);
    }
    throw std::invalid_argument("unknown catalog entry: " + name);
}

void validate_entry(const std::string& text) {
    parse_entry(text, geometry::sphere(4), HiggsVariant::Fiber);
}

} // namespace ymh::fields
