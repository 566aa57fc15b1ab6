#include "ymh/smoothfields.hpp"

namespace ymh::smoothfields {

using geometry::christoffel;

static CPoint shifted(const CPoint& p, int i, double h) {
    CPoint q = p;
    q.y(i) += h;
    return q;
}

// ---------------------------------------------------------------------------
// first derivatives
// ---------------------------------------------------------------------------

Form1E dnabla_u(const DiffCtx& ctx, const UFn& u, const CPoint& p, double h) {
    const int n = ctx.n();
    Form1E out = Form1E::zero(n, ctx.r());
    const Form1G A = ctx.pair->A_at(p);
    const Vec u0 = u(p);
    for (int i = 0; i < n; ++i) {
        const Vec up = u(shifted(p, i, h));
        const Vec um = u(shifted(p, i, -h));
        out.c[i] = (up - um) / (2.0 * h) + A.c[i] * u0;
    }
    return out;
}

Form1G dnabla_phi(const DiffCtx& ctx, const PFn& phi, const CPoint& p, double h) {
    const int n = ctx.n();
    Form1G out = Form1G::zero(n, ctx.r());
    const Form1G A = ctx.pair->A_at(p);
    const Mat p0 = phi(p);
    for (int i = 0; i < n; ++i) {
        const Mat pp = phi(shifted(p, i, h));
        const Mat pm = phi(shifted(p, i, -h));
        out.c[i] = (pp - pm) / (2.0 * h) + algebra::bracket(A.c[i], p0);
    }
    return out;
}

Form1G dnabla_sigma(const DiffCtx& ctx, const PFn& s, const CPoint& p, double h) {
    return dnabla_phi(ctx, s, p, h);
}

FirstDerivs1G first_derivs_B(const DiffCtx& ctx, const AFn& B, const CPoint& p, double h) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G A = ctx.pair->A_at(p);
    const Form1G B0 = B(p);

    // ∂_i B_j for all i, j
    std::array<Form1G, 7> dB;
    for (int i = 0; i < n; ++i) {
        const Form1G Bp = B(shifted(p, i, h));
        const Form1G Bm = B(shifted(p, i, -h));
        dB[i] = Form1G::zero(n, r);
        for (int j = 0; j < n; ++j) dB[i].c[j] = (Bp.c[j] - Bm.c[j]) / (2.0 * h);
    }

    FirstDerivs1G out;
    out.d = Form2G::zero(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            out.d.c[i][j] = dB[i].c[j] - dB[j].c[i] + algebra::bracket(A.c[i], B0.c[j]) -
                            algebra::bracket(A.c[j], B0.c[i]);
        }

    const double ig = inv_g(ctx.geom(), p);
    Mat del = Mat::Zero(r, r);
    for (int i = 0; i < n; ++i) {
        Mat t = dB[i].c[i] + algebra::bracket(A.c[i], B0.c[i]);
        for (int k = 0; k < n; ++k) {
            const double gam = christoffel(ctx.geom(), p, k, i, i);
            if (gam != 0.0) t -= gam * B0.c[k];
        }
        del += t;
    }
    out.del = -ig * del;
    return out;
}

Form2E dnabla_W(const DiffCtx& ctx, const W1Fn& W, const CPoint& p, double h) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G A = ctx.pair->A_at(p);
    const Form1E W0 = W(p);
    std::array<Form1E, 7> dW;
    for (int i = 0; i < n; ++i) {
        const Form1E Wp = W(shifted(p, i, h));
        const Form1E Wm = W(shifted(p, i, -h));
        dW[i] = Form1E::zero(n, r);
        for (int j = 0; j < n; ++j) dW[i].c[j] = (Wp.c[j] - Wm.c[j]) / (2.0 * h);
    }
    Form2E out = Form2E::zero(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            out.c[i][j] = dW[i].c[j] - dW[j].c[i] + A.c[i] * W0.c[j] - A.c[j] * W0.c[i];
        }
    return out;
}

Vec delta_W(const DiffCtx& ctx, const W1Fn& W, const CPoint& p, double h) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G A = ctx.pair->A_at(p);
    const Form1E W0 = W(p);
    Vec acc = Vec::Zero(r);
    for (int i = 0; i < n; ++i) {
        const Form1E Wp = W(shifted(p, i, h));
        const Form1E Wm = W(shifted(p, i, -h));
        Vec t = (Wp.c[i] - Wm.c[i]) / (2.0 * h) + A.c[i] * W0.c[i];
        for (int k = 0; k < n; ++k) {
            const double gam = christoffel(ctx.geom(), p, k, i, i);
            if (gam != 0.0) t -= gam * W0.c[k];
        }
        acc += t;
    }
    return -inv_g(ctx.geom(), p) * acc;
}

Form1G delta_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p, double h) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G A = ctx.pair->A_at(p);
    const Form2G F0 = F(p);
    Form1G out = Form1G::zero(n, r);
    for (int i = 0; i < n; ++i) {
        const Form2G Fp = F(shifted(p, i, h));
        const Form2G Fm = F(shifted(p, i, -h));
        for (int j = 0; j < n; ++j) {
            // (∇_i F)_{ij} = ∂_iF_ij − Γ^l_{ii}F_lj − Γ^l_{ij}F_il + [A_i, F_ij]
            Mat t = (Fp.c[i][j] - Fm.c[i][j]) / (2.0 * h) +
                    algebra::bracket(A.c[i], F0.c[i][j]);
            for (int l = 0; l < n; ++l) {
                const double g1 = christoffel(ctx.geom(), p, l, i, i);
                if (g1 != 0.0) t -= g1 * F0.c[l][j];
                const double g2 = christoffel(ctx.geom(), p, l, i, j);
                if (g2 != 0.0) t -= g2 * F0.c[i][l];
            }
            out.c[j] -= t;
        }
    }
    const double ig = inv_g(ctx.geom(), p);
    for (int j = 0; j < n; ++j) out.c[j] *= ig;
    return out;
}

Form3G dnabla_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p, double h) {
    const int n = ctx.n();
    const Form1G A = ctx.pair->A_at(p);
    const Form2G F0 = F(p);
    // covariant-exterior: Christoffels cancel, only ∂ + bracket terms remain
    std::array<Form2G, 7> dF;
    for (int i = 0; i < n; ++i) {
        const Form2G Fp = F(shifted(p, i, h));
        const Form2G Fm = F(shifted(p, i, -h));
        dF[i] = Form2G::zero(n, ctx.r());
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                dF[i].c[a][b] = (Fp.c[a][b] - Fm.c[a][b]) / (2.0 * h) +
                                algebra::bracket(A.c[i], F0.c[a][b]);
    }
    Form3G out;
    out.n = n;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                out.c[i][j][k] = dF[i].c[j][k] - dF[j].c[i][k] + dF[k].c[i][j];
    return out;
}

// δ on the rank-3 intermediate: (δT)_{jk} = −g^{ii}(∇_iT)_{ijk}
static Form2G delta_T3(const DiffCtx& ctx, const std::function<Form3G(const CPoint&)>& T,
                       const CPoint& p, double h) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G A = ctx.pair->A_at(p);
    const Form3G T0 = T(p);
    Form2G out = Form2G::zero(n, r);
    for (int i = 0; i < n; ++i) {
        const Form3G Tp = T(shifted(p, i, h));
        const Form3G Tm = T(shifted(p, i, -h));
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                Mat t = (Tp.c[i][j][k] - Tm.c[i][j][k]) / (2.0 * h) +
                        algebra::bracket(A.c[i], T0.c[i][j][k]);
                for (int l = 0; l < n; ++l) {
                    const double g1 = christoffel(ctx.geom(), p, l, i, i);
                    if (g1 != 0.0) t -= g1 * T0.c[l][j][k];
                    const double g2 = christoffel(ctx.geom(), p, l, i, j);
                    if (g2 != 0.0) t -= g2 * T0.c[i][l][k];
                    const double g3 = christoffel(ctx.geom(), p, l, i, k);
                    if (g3 != 0.0) t -= g3 * T0.c[i][j][l];
                }
                out.c[j][k] -= t;
            }
    }
    const double ig = inv_g(ctx.geom(), p);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out.c[j][k] *= ig;
    return out;
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

Form2G curvature_of(const DiffCtx& ctx, const AFn& A, const CPoint& p, double h) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G A0 = A(p);
    std::array<Form1G, 7> dA;
    for (int i = 0; i < n; ++i) {
        const Form1G Ap = A(shifted(p, i, h));
        const Form1G Am = A(shifted(p, i, -h));
        dA[i] = Form1G::zero(n, r);
        for (int j = 0; j < n; ++j) dA[i].c[j] = (Ap.c[j] - Am.c[j]) / (2.0 * h);
    }
    Form2G F = Form2G::zero(n, r);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            F.c[i][j] = dA[i].c[j] - dA[j].c[i] + algebra::bracket(A0.c[i], A0.c[j]);
            F.c[j][i] = -F.c[i][j];
        }
    return F;
}

Form2G curvature(const DiffCtx& ctx, const CPoint& p) {
    if (!ctx.pair->A) return Form2G::zero(ctx.n(), ctx.r());
    return curvature_of(ctx, ctx.pair->A, p, ctx.h1);
}

Form1G rfrak_1(const Geometry& g, const CPoint& p, const Form2G& R, const Form1G& psi) {
    const int n = psi.n;
    const double ig = inv_g(g, p);
    Form1G out = Form1G::zero(n, static_cast<int>(psi.c[0].rows()));
    for (int i = 0; i < n; ++i) {
        Mat acc = Mat::Zero(psi.c[0].rows(), psi.c[0].rows());
        for (int j = 0; j < n; ++j) acc += algebra::bracket(R.c[j][i], psi.c[j]);
        out.c[i] = ig * acc;
    }
    return out;
}

Form2G rfrak_2(const Geometry& g, const CPoint& p, const Form2G& R, const Form2G& phi) {
    const int n = phi.n;
    const int r = static_cast<int>(phi.c[0][0].rows());
    const double ig = inv_g(g, p);
    Form2G out = Form2G::zero(n, r);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            Mat acc = Mat::Zero(r, r);
            for (int j = 0; j < n; ++j)
                acc += algebra::bracket(R.c[j][x], phi.c[j][y]) -
                       algebra::bracket(R.c[j][y], phi.c[j][x]);
            out.c[x][y] = ig * acc;
        }
    return out;
}

// ---------------------------------------------------------------------------
// second-order operators
// ---------------------------------------------------------------------------

Form1G hodge_laplace_B(const DiffCtx& ctx, const AFn& B, const CPoint& p) {
    F2Fn dB = [&](const CPoint& q) { return dnabla_B(ctx, B, q, ctx.h1); };
    PFn delB = [&](const CPoint& q) { return delta_B(ctx, B, q, ctx.h1); };
    Form1G out = delta_F(ctx, dB, p, ctx.h2);
    const Form1G d_del = dnabla_phi(ctx, delB, p, ctx.h2);
    for (int i = 0; i < out.n; ++i) out.c[i] += d_del.c[i];
    return out;
}

Form2G hodge_laplace_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p) {
    std::function<Form3G(const CPoint&)> dF = [&](const CPoint& q) {
        return dnabla_F(ctx, F, q, ctx.h1);
    };
    AFn delF = [&](const CPoint& q) { return delta_F(ctx, F, q, ctx.h1); };
    Form2G out = delta_T3(ctx, dF, p, ctx.h2);
    const Form2G d_del = dnabla_B(ctx, delF, p, ctx.h2);
    for (int i = 0; i < out.n; ++i)
        for (int j = 0; j < out.n; ++j) out.c[i][j] += d_del.c[i][j];
    return out;
}

Form1G rough_laplace_B(const DiffCtx& ctx, const AFn& B, const CPoint& p) {
    const int n = ctx.n();
    const int r = ctx.r();
    // T(q) = full covariant derivative (∇_j B)_i
    auto T = [&](const CPoint& q) -> Form2G {
        const Form1G A = ctx.pair->A_at(q);
        const Form1G B0 = B(q);
        Form2G t = Form2G::zero(n, r); // t.c[j][i] = (∇_j B)_i  (not antisymmetric)
        for (int j = 0; j < n; ++j) {
            const Form1G Bp = B(shifted(q, j, ctx.h1));
            const Form1G Bm = B(shifted(q, j, -ctx.h1));
            for (int i = 0; i < n; ++i) {
                Mat v = (Bp.c[i] - Bm.c[i]) / (2.0 * ctx.h1) +
                        algebra::bracket(A.c[j], B0.c[i]);
                for (int k = 0; k < n; ++k) {
                    const double gam = christoffel(ctx.geom(), q, k, j, i);
                    if (gam != 0.0) v -= gam * B0.c[k];
                }
                t.c[j][i] = v;
            }
        }
        return t;
    };
    const Form2G T0 = T(p);
    const Form1G A = ctx.pair->A_at(p);
    Form1G out = Form1G::zero(n, r);
    for (int j = 0; j < n; ++j) {
        const Form2G Tp = T(shifted(p, j, ctx.h2));
        const Form2G Tm = T(shifted(p, j, -ctx.h2));
        for (int i = 0; i < n; ++i) {
            // (∇_j T)_{j,i} with corrections on both lower indices
            Mat v = (Tp.c[j][i] - Tm.c[j][i]) / (2.0 * ctx.h2) +
                    algebra::bracket(A.c[j], T0.c[j][i]);
            for (int m = 0; m < n; ++m) {
                const double g1 = christoffel(ctx.geom(), p, m, j, j);
                if (g1 != 0.0) v -= g1 * T0.c[m][i];
                const double g2 = christoffel(ctx.geom(), p, m, j, i);
                if (g2 != 0.0) v -= g2 * T0.c[j][m];
            }
            out.c[i] -= v;
        }
    }
    const double ig = inv_g(ctx.geom(), p);
    for (int i = 0; i < n; ++i) out.c[i] *= ig;
    return out;
}

Form2G rough_laplace_F(const DiffCtx& ctx, const F2Fn& F, const CPoint& p) {
    const int n = ctx.n();
    const int r = ctx.r();
    auto T = [&](const CPoint& q) -> Form3G {
        const Form1G A = ctx.pair->A_at(q);
        const Form2G F0 = F(q);
        Form3G t;
        t.n = n; // t.c[j][a][b] = (∇_j F)_{ab}
        for (int j = 0; j < n; ++j) {
            const Form2G Fp = F(shifted(q, j, ctx.h1));
            const Form2G Fm = F(shifted(q, j, -ctx.h1));
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    Mat v = (Fp.c[a][b] - Fm.c[a][b]) / (2.0 * ctx.h1) +
                            algebra::bracket(A.c[j], F0.c[a][b]);
                    for (int k = 0; k < n; ++k) {
                        const double g1 = christoffel(ctx.geom(), q, k, j, a);
                        if (g1 != 0.0) v -= g1 * F0.c[k][b];
                        const double g2 = christoffel(ctx.geom(), q, k, j, b);
                        if (g2 != 0.0) v -= g2 * F0.c[a][k];
                    }
                    t.c[j][a][b] = v;
                }
        }
        return t;
    };
    const Form3G T0 = T(p);
    const Form1G A = ctx.pair->A_at(p);
    Form2G out = Form2G::zero(n, r);
    for (int j = 0; j < n; ++j) {
        const Form3G Tp = T(shifted(p, j, ctx.h2));
        const Form3G Tm = T(shifted(p, j, -ctx.h2));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                Mat v = (Tp.c[j][a][b] - Tm.c[j][a][b]) / (2.0 * ctx.h2) +
                        algebra::bracket(A.c[j], T0.c[j][a][b]);
                for (int m = 0; m < n; ++m) {
                    const double g1 = christoffel(ctx.geom(), p, m, j, j);
                    if (g1 != 0.0) v -= g1 * T0.c[m][a][b];
                    const double g2 = christoffel(ctx.geom(), p, m, j, a);
                    if (g2 != 0.0) v -= g2 * T0.c[j][m][b];
                    const double g3 = christoffel(ctx.geom(), p, m, j, b);
                    if (g3 != 0.0) v -= g3 * T0.c[j][a][m];
                }
                out.c[a][b] -= v;
            }
    }
    const double ig = inv_g(ctx.geom(), p);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out.c[a][b] *= ig;
    return out;
}

Vec delta_d_u(const DiffCtx& ctx, const UFn& u, const CPoint& p) {
    W1Fn du = [&](const CPoint& q) { return dnabla_u(ctx, u, q, ctx.h1); };
    return delta_W(ctx, du, p, ctx.h2);
}

Mat delta_d_phi(const DiffCtx& ctx, const PFn& phi, const CPoint& p) {
    AFn dphi = [&](const CPoint& q) { return dnabla_phi(ctx, phi, q, ctx.h1); };
    return delta_B(ctx, dphi, p, ctx.h2);
}

Form1G delta_curvature(const DiffCtx& ctx, const CPoint& p) {
    if (!ctx.pair->A) return Form1G::zero(ctx.n(), ctx.r());
    F2Fn R = [&](const CPoint& q) { return curvature(ctx, q); };
    return delta_F(ctx, R, p, ctx.h2);
}

// ---------------------------------------------------------------------------
// named checks
// ---------------------------------------------------------------------------

double bochner_residual_1(const DiffCtx& ctx, const AFn& psi, const CPoint& p) {
    if (ctx.geom().kind != geometry::BaseKind::Sphere)
        throw std::invalid_argument("bochner residual: sphere only");
    const int n = ctx.n();
    const Form1G lap = hodge_laplace_B(ctx, psi, p);
    const Form1G rough = rough_laplace_B(ctx, psi, p);
    const Form2G R = curvature(ctx, p);
    const Form1G psi0 = psi(p);
    const Form1G rf = rfrak_1(ctx.geom(), p, R, psi0);
    const double c = n - 1.0;
    Form1G res = Form1G::zero(n, ctx.r());
    for (int i = 0; i < n; ++i) res.c[i] = lap.c[i] - rough.c[i] - c * psi0.c[i] - rf.c[i];
    return std::sqrt(norm2(ctx.geom(), p, res));
}

double bochner_residual_2(const DiffCtx& ctx, const F2Fn& phi, const CPoint& p) {
    if (ctx.geom().kind != geometry::BaseKind::Sphere)
        throw std::invalid_argument("bochner residual: sphere only");
    const int n = ctx.n();
    const Form2G lap = hodge_laplace_F(ctx, phi, p);
    const Form2G rough = rough_laplace_F(ctx, phi, p);
    const Form2G R = curvature(ctx, p);
    const Form2G phi0 = phi(p);
    const Form2G rf = rfrak_2(ctx.geom(), p, R, phi0);
    const double c = 2.0 * (n - 2.0);
    Form2G res = Form2G::zero(n, ctx.r());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            res.c[i][j] = lap.c[i][j] - rough.c[i][j] - c * phi0.c[i][j] - rf.c[i][j];
    return std::sqrt(norm2(ctx.geom(), p, res));
}

ElPointResidual el_residual_at(const DiffCtx& ctx, const CPoint& p) {
    const int n = ctx.n();
    const int r = ctx.r();
    const Form1G dR = delta_curvature(ctx, p);

    ElPointResidual out{0.0, 0.0};
    if (ctx.pair->variant == HiggsVariant::Fiber) {
        UFn u = [&](const CPoint& q) { return ctx.pair->u_at(q); };
        const Vec u0 = ctx.pair->u_at(p);
        const Form1E du = ctx.pair->u ? dnabla_u(ctx, u, p, ctx.h1) : Form1E::zero(n, r);
        Form1G res1 = Form1G::zero(n, r);
        for (int i = 0; i < n; ++i) res1.c[i] = dR.c[i] + algebra::mu(du.c[i], u0);
        out.eq_connection = std::sqrt(norm2(ctx.geom(), p, res1));

        Vec res2 = -0.5 * ctx.pair->lambda * (1.0 - u0.squaredNorm()) * u0;
        if (ctx.pair->u) res2 = delta_d_u(ctx, u, p) + res2;
        out.eq_higgs = res2.norm();
    } else {
        PFn phi = [&](const CPoint& q) { return ctx.pair->phi_at(q); };
        const Mat phi0 = ctx.pair->phi_at(p);
        const Form1G dphi =
            ctx.pair->phi ? dnabla_phi(ctx, phi, p, ctx.h1) : Form1G::zero(n, r);
        Form1G res1 = Form1G::zero(n, r);
        for (int i = 0; i < n; ++i)
            res1.c[i] = dR.c[i] - algebra::bracket(dphi.c[i], phi0);
        out.eq_connection = std::sqrt(norm2(ctx.geom(), p, res1));

        Mat res2 = -0.5 * ctx.pair->lambda * (1.0 - algebra::norm2(phi0)) * phi0;
        if (ctx.pair->phi) res2 = delta_d_phi(ctx, phi, p) + res2;
        out.eq_higgs = std::sqrt(algebra::norm2(res2));
    }
    return out;
}

ElResidual el_residual(const AnalyticPair& pair, const QuadratureRule& rule, double h1,
                       double h2) {
    DiffCtx ctx{&pair, h1, h2};
    const std::int64_t count = rule.size();
    std::vector<double> r1(static_cast<size_t>(count)), r2(static_cast<size_t>(count));
    parallel_for(count, [&](std::int64_t i) {
        const ElPointResidual res = el_residual_at(ctx, rule.chart_node(i));
        r1[static_cast<size_t>(i)] = res.eq_connection;
        r2[static_cast<size_t>(i)] = res.eq_higgs;
    });
    ElResidual out{0.0, 0.0};
    for (std::int64_t i = 0; i < count; ++i) {
        out.eq_connection = std::max(out.eq_connection, r1[static_cast<size_t>(i)]);
        out.eq_higgs = std::max(out.eq_higgs, r2[static_cast<size_t>(i)]);
    }
    return out;
}

} // namespace ymh::smoothfields
