#include "ymh/geometry.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstring>

namespace ymh::geometry {

// ---------------------------------------------------------------------------
// Charts
// ---------------------------------------------------------------------------

Vec chart_embed(const Geometry& g, const CPoint& p) {
    if (g.kind == BaseKind::Torus) {
        Vec x = p.y;
        for (int i = 0; i < g.n; ++i) {
            x(i) = std::fmod(x(i), g.L);
            if (x(i) < 0) x(i) += g.L;
        }
        return x;
    }
    const int n = g.n;
    const double s = p.chart == 0 ? 1.0 : -1.0;
    const double q = p.y.squaredNorm();
    Vec x(n + 1);
    for (int i = 0; i < n; ++i) x(i) = 2.0 * p.y(i) / (1.0 + q);
    x(n) = s * (1.0 - q) / (1.0 + q);
    return x;
}

Vec chart_project(const Geometry& g, const Vec& x, int chart) {
    if (g.kind == BaseKind::Torus) return x;
    const int n = g.n;
    const double s = chart == 0 ? 1.0 : -1.0;
    const double denom = 1.0 + s * x(n);
    Vec y(n);
    for (int i = 0; i < n; ++i) y(i) = x(i) / denom;
    return y;
}

int preferred_chart(const Geometry& g, const Vec& x) {
    if (g.kind == BaseKind::Torus) return 0;
    return x(g.n) >= 0.0 ? 0 : 1;
}

CPoint chart_point(const Geometry& g, const Vec& x) {
    const int c = preferred_chart(g, x);
    return CPoint{c, chart_project(g, x, c)};
}

Mat chart_jacobian(const Geometry& g, const CPoint& p) {
    if (g.kind == BaseKind::Torus) {
        return Mat::Identity(g.n, g.n);
    }
    const int n = g.n;
    const double s = p.chart == 0 ? 1.0 : -1.0;
    const double q = p.y.squaredNorm();
    const double d = 1.0 + q;
    Mat J(n + 1, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            J(i, j) = 2.0 * ((i == j ? 1.0 : 0.0) / d - 2.0 * p.y(i) * p.y(j) / (d * d));
    for (int j = 0; j < n; ++j) J(n, j) = -4.0 * s * p.y(j) / (d * d);
    return J;
}

Vec chart_components(const Geometry& g, const CPoint& p, const Vec& w_ambient) {
    if (g.kind == BaseKind::Torus) return w_ambient;
    const double rho = conf_rho(g, p.y);
    Mat J = chart_jacobian(g, p);
    return (J.transpose() * w_ambient) / (rho * rho);
}

PointFrame PointFrame::at(const Geometry& g, const CPoint& p) {
    PointFrame f;
    f.geom = g;
    f.p = p;
    f.rho = conf_rho(g, p.y);
    if (g.kind == BaseKind::Torus) {
        f.frame = Mat::Identity(g.n, g.n);
    } else {
        f.frame = chart_jacobian(g, p) / f.rho;
    }
    return f;
}

// ---------------------------------------------------------------------------
// Gauss–Legendre nodes
// ---------------------------------------------------------------------------

// Nodes/weights on [-1,1] by Newton iteration on the Legendre recurrence.
static void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[m - 1 - i] = w[i];
    }
}

QuadratureRule build_rule(const Geometry& g, int order) {
    if (order < 2) throw std::invalid_argument("quadrature order must be >= 2");
    QuadratureRule rule;
    rule.geom = g;
    rule.order = order;
    const int n = g.n;

    if (g.kind == BaseKind::Torus) {
        // uniform periodic grid, m = order sites per axis
        std::int64_t count = 1;
        for (int i = 0; i < n; ++i) count *= order;
        const double h = g.L / order;
        const double w = std::pow(h, n);
        rule.nodes.resize(static_cast<size_t>(count) * n);
        rule.weights.assign(static_cast<size_t>(count), w);
        for (std::int64_t idx = 0; idx < count; ++idx) {
            std::int64_t rem = idx;
            for (int k = 0; k < n; ++k) {
                rule.nodes[static_cast<size_t>(idx) * n + k] = h * (rem % order);
                rem /= order;
            }
        }
        return rule;
    }

    // Sⁿ: angles t_1..t_{n-1} in [0,π], t_n in [0,2π];
    // dV = Π_{k=1}^{n-1} sin^{n-k}(t_k) dt.
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);

    std::int64_t count = 1;
    for (int i = 0; i < n; ++i) count *= order;
    rule.nodes.resize(static_cast<size_t>(count) * (n + 1));
    rule.weights.resize(static_cast<size_t>(count));

    std::vector<double> theta(n), wt(n);
    for (std::int64_t idx = 0; idx < count; ++idx) {
        std::int64_t rem = idx;
        for (int k = 0; k < n; ++k) {
            const int j = static_cast<int>(rem % order);
            rem /= order;
            if (k < n - 1) {
                theta[k] = 0.5 * M_PI * (gx[j] + 1.0);
                wt[k] = 0.5 * M_PI * gw[j];
            } else {
                theta[k] = M_PI * (gx[j] + 1.0);
                wt[k] = M_PI * gw[j];
            }
        }
        double weight = 1.0, sines = 1.0;
        for (int k = 0; k < n; ++k) {
            weight *= wt[k];
            if (k < n - 1) weight *= std::pow(std::sin(theta[k]), n - 1 - k);
        }
        double* node = &rule.nodes[static_cast<size_t>(idx) * (n + 1)];
        sines = 1.0;
        for (int k = 0; k < n; ++k) {
            node[k] = sines * std::cos(theta[k]);
            sines *= std::sin(theta[k]);
        }
        node[n] = sines;
        rule.weights[static_cast<size_t>(idx)] = weight;
    }
    return rule;
}

CPoint QuadratureRule::chart_node(std::int64_t i) const {
    if (geom.kind == BaseKind::Torus) return CPoint{0, node(i)};
    return chart_point(geom, node(i));
}

double QuadratureRule::weight_sum() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double integrate(const QuadratureRule& rule, const std::function<double(const CPoint&)>& f) {
    const std::int64_t count = rule.size();
    // Probe sequentially for non-finite values first only when small; otherwise
    // trust the parallel pass and re-scan on NaN totals.
    double total = parallel_sum(count, 4096, [&](std::int64_t i) {
        return rule.weights[static_cast<size_t>(i)] * f(rule.chart_node(i));
    });
    if (!std::isfinite(total)) {
        for (std::int64_t i = 0; i < count; ++i) {
            const double v = f(rule.chart_node(i));
            if (!std::isfinite(v))
                throw std::runtime_error("integrate: non-finite integrand at node " +
                                         std::to_string(i));
        }
    }
    return total;
}

double volume(const Geometry& g) {
    if (g.kind == BaseKind::Torus) return std::pow(g.L, g.n);
    return 2.0 * std::pow(M_PI, 0.5 * (g.n + 1)) / std::tgamma(0.5 * (g.n + 1));
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

static std::string b64_encode(const std::vector<double>& v) {
    static const char* tbl = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    const unsigned char* data = reinterpret_cast<const unsigned char*>(v.data());
    const size_t len = v.size() * sizeof(double);
    std::string out;
    out.reserve((len + 2) / 3 * 4);
    for (size_t i = 0; i < len; i += 3) {
        unsigned int b = data[i] << 16;
        if (i + 1 < len) b |= data[i + 1] << 8;
        if (i + 2 < len) b |= data[i + 2];
        out.push_back(tbl[(b >> 18) & 63]);
        out.push_back(tbl[(b >> 12) & 63]);
        out.push_back(i + 1 < len ? tbl[(b >> 6) & 63] : '=');
        out.push_back(i + 2 < len ? tbl[b & 63] : '=');
    }
    return out;
}

static std::vector<double> b64_decode(const std::string& s) {
    auto val = [](char c) -> int {
        if (c >= 'A' && c <= 'Z') return c - 'A';
        if (c >= 'a' && c <= 'z') return c - 'a' + 26;
        if (c >= '0' && c <= '9') return c - '0' + 52;
        if (c == '+') return 62;
        if (c == '/') return 63;
        return -1;
    };
    std::vector<unsigned char> bytes;
    bytes.reserve(s.size() / 4 * 3);
    int buf = 0, bits = 0;
    for (char c : s) {
        if (c == '=' || c == '\n') continue;
        const int v = val(c);
        if (v < 0) throw std::runtime_error("invalid base64 payload");
        buf = (buf << 6) | v;
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            bytes.push_back(static_cast<unsigned char>((buf >> bits) & 0xff));
        }
    }
    if (bytes.size() % sizeof(double) != 0)
        throw std::runtime_error("base64 payload is not a sequence of f64");
    std::vector<double> out(bytes.size() / sizeof(double));
    std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

std::string QuadratureRule::to_json() const {
    nlohmann::json j;
    j["kind"] = geom.kind == BaseKind::Sphere ? "sphere" : "torus";
    j["n"] = geom.n;
    j["L"] = geom.L;
    j["order"] = order;
    j["count"] = weights.size();
    j["nodes_b64"] = b64_encode(nodes);
    j["weights_b64"] = b64_encode(weights);
    return j.dump(2);
}

QuadratureRule QuadratureRule::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    QuadratureRule rule;
    rule.geom.kind = j.at("kind") == "sphere" ? BaseKind::Sphere : BaseKind::Torus;
    rule.geom.n = j.at("n");
    rule.geom.L = j.at("L");
    rule.order = j.at("order");
    rule.nodes = b64_decode(j.at("nodes_b64"));
    rule.weights = b64_decode(j.at("weights_b64"));
    const size_t count = j.at("count");
    if (rule.weights.size() != count ||
        rule.nodes.size() != count * static_cast<size_t>(rule.geom.ambient_dim()))
        throw std::runtime_error("quadrature rule payload size mismatch");
    for (double w : rule.weights)
        if (!(w > 0.0)) throw std::runtime_error("quadrature weights must be positive");
    return rule;
}

// ---------------------------------------------------------------------------
// Killing fields
// ---------------------------------------------------------------------------

Vec killing_field(const Geometry& g, const Vec& v, const Vec& x) {
    if (g.kind != BaseKind::Sphere) throw std::invalid_argument("killing_field: sphere only");
    if (std::abs(x.norm() - 1.0) > 1e-8)
        throw std::invalid_argument("killing_field: |x| != 1");
    return v - v.dot(x) * x;
}

// Chart components of V at chart coordinates y.
static Vec killing_chart(const Geometry& g, const CPoint& p, const Vec& v) {
    const Vec x = chart_embed(g, p);
    const Vec V = v - v.dot(x) * x;
    return chart_components(g, p, V);
}

KillingResiduals killing_identities_residual(const Geometry& g, const Vec& v, const Vec& x,
                                             const Vec& X_ambient, double h1, double h2) {
    const CPoint p = chart_point(g, x);
    const int n = g.n;
    const double rho = conf_rho(g, p.y);
    const double fv = v.dot(x);

    const Vec Xc = chart_components(g, p, X_ambient);

    // first covariant derivative D_X V, central differences
    Mat dV(n, n); // dV(j, i) = ∂_j V^i
    for (int j = 0; j < n; ++j) {
        CPoint pp = p, pm = p;
        pp.y(j) += h1;
        pm.y(j) -= h1;
        const Vec Vp = killing_chart(g, pp, v);
        const Vec Vm = killing_chart(g, pm, v);
        for (int i = 0; i < n; ++i) dV(j, i) = (Vp(i) - Vm(i)) / (2.0 * h1);
    }
    const Vec V0 = killing_chart(g, p, v);
    Vec DXV = Vec::Zero(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            DXV(i) += Xc(j) * dV(j, i);
            for (int k = 0; k < n; ++k)
                DXV(i) += christoffel(g, p, i, j, k) * Xc(j) * V0(k);
        }
    }
    Vec res1 = DXV + fv * Xc;

    // rough Laplacian D*DV = −Σ_j (D_{ê_j}D_{ê_j} − D_{D_{ê_j}ê_j}) V
    // computed from chart second differences with both Christoffel corrections.
    auto DjV = [&](const CPoint& q, int j) -> Vec {
        CPoint qp = q, qm = q;
        qp.y(j) += h1;
        qm.y(j) -= h1;
        const Vec Vp = killing_chart(g, qp, v);
        const Vec Vm = killing_chart(g, qm, v);
        const Vec Vq = killing_chart(g, q, v);
        Vec out(n);
        for (int i = 0; i < n; ++i) {
            out(i) = (Vp(i) - Vm(i)) / (2.0 * h1);
            for (int k = 0; k < n; ++k) out(i) += christoffel(g, q, i, j, k) * Vq(k);
        }
        return out;
    };
    Vec lap = Vec::Zero(n);
    for (int j = 0; j < n; ++j) {
        // second covariant derivative contracted in coordinate directions:
        // (D_j D_j V)^i − Γ^l_{jj}(D_l V)^i, then contract with g^{jj} = ρ^{-2}
        CPoint pp = p, pm = p;
        pp.y(j) += h2;
        pm.y(j) -= h2;
        const Vec Tp = DjV(pp, j);
        const Vec Tm = DjV(pm, j);
        const Vec T0 = DjV(p, j);
        Vec second(n);
        for (int i = 0; i < n; ++i) {
            second(i) = (Tp(i) - Tm(i)) / (2.0 * h2);
            for (int k = 0; k < n; ++k) second(i) += christoffel(g, p, i, j, k) * T0(k);
        }
        for (int l = 0; l < n; ++l) {
            const double gam = christoffel(g, p, l, j, j);
            if (gam != 0.0) second -= gam * DjV(p, l);
        }
        lap += second;
    }
    lap = -lap / (rho * rho);
    Vec res2 = lap - V0;

    auto gnorm = [&](const Vec& w) { return rho * w.norm(); };
    return KillingResiduals{gnorm(res1), gnorm(res2), gnorm(DXV)};
}

} // namespace ymh::geometry
