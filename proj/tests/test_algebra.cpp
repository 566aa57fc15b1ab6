#include "ymh/algebra.hpp"

#include <doctest.h>
#include <random>

using namespace ymh;
using namespace ymh::algebra;

TEST_CASE("inner product: ½Tr convention") {
    Mat phi = Mat::Zero(3, 3);
    phi(0, 1) = 1.0;
    phi(1, 0) = -1.0; // E12 − E21
    CHECK(inner(phi, phi) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(inner(Mat::Zero(3, 3), phi) == doctest::Approx(0.0));
    CHECK_THROWS_AS(inner(phi, Mat::Zero(4, 4)), std::invalid_argument);
}

TEST_CASE("inner product: ad-invariance <[a,b],c> = <a,[b,c]>") {
    std::mt19937_64 rng(7);
    for (int k = 0; k < 100; ++k) {
        const Mat a = random_antisym(4, rng), b = random_antisym(4, rng),
                  c = random_antisym(4, rng);
        CHECK(inner(bracket(a, b), c) ==
              doctest::Approx(inner(a, bracket(b, c))).epsilon(1e-12));
    }
}

TEST_CASE("mu: pairing and hand values") {
    Vec e1 = Vec::Zero(3), e2 = Vec::Zero(3);
    e1(0) = 1.0;
    e2(1) = 1.0;

    CHECK(mu(e1, e1).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    // the defining identity <mu(u,phi), psi> = -<phi, psi u> pins the matrix
    // to u φᵀ − φ uᵀ (no ½) under the ½Tr inner product
    Mat m = mu(e1, e2);
    CHECK(m(0, 1) == doctest::Approx(1.0));
    CHECK(m(1, 0) == doctest::Approx(-1.0));
    CHECK(antisymmetry_defect(m) < 1e-15);

    std::mt19937_64 rng(11);
    for (int k = 0; k < 100; ++k) {
        const Vec u = random_vec(3, rng), phi = random_vec(3, rng);
        const Mat psi = random_antisym(3, rng);
        // brute-force trace evaluation of both sides
        const double lhs = 0.5 * (mu(u, phi).transpose() * psi).trace();
        const double rhs = -phi.dot(psi * u);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("bracket: Jacobi identity and so(r) action") {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 100; ++k) {
        const Mat a = random_antisym(5, rng), b = random_antisym(5, rng),
                  c = random_antisym(5, rng);
        const Mat jac = bracket(bracket(a, b), c) + bracket(bracket(b, c), a) +
                        bracket(bracket(c, a), b);
        CHECK(jac.cwiseAbs().maxCoeff() < 1e-12);
    }
    const Mat a = random_antisym(4, rng);
    CHECK(bracket(a, a).cwiseAbs().maxCoeff() < 1e-14);

    for (int k = 0; k < 20; ++k) {
        const Mat phi = random_antisym(4, rng);
        const Vec u = random_vec(4, rng), w = random_vec(4, rng);
        CHECK(apply(phi, u).dot(w) + u.dot(apply(phi, w)) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("so(3) basis: commutators and normalization") {
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const Mat c = bracket(so3_basis(a), so3_basis(b));
            if (a == b) {
                CHECK(c.cwiseAbs().maxCoeff() < 1e-15);
            } else {
                const int cc = 3 - a - b;
                const double sign = ((b - a + 3) % 3 == 1) ? 1.0 : -1.0;
                CHECK((c - sign * so3_basis(cc)).cwiseAbs().maxCoeff() < 1e-15);
            }
        }
        CHECK(inner(so3_basis(a), so3_basis(a)) == doctest::Approx(1.0));
    }
}

TEST_CASE("pack/unpack round trip and expm orthogonality") {
    std::mt19937_64 rng(5);
    const Mat m = random_antisym(5, rng);
    double buf[10];
    so_pack(m, buf);
    Mat back;
    so_unpack(buf, 5, back);
    CHECK((m - back).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    const Mat g = expm_antisym(m);
    CHECK((g * g.transpose() - Mat::Identity(5, 5)).cwiseAbs().maxCoeff() < 1e-12);
}
