#include <doctest.h>

#include <cmath>
#include <random>

#include "leslab/fem.hpp"
#include "leslab/quadrature.hpp"

using namespace leslab;

namespace {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

MixedSpace channel_space(int n, DirichletSpec spec = {}) {
    ChannelSpec cs;
    cs.nx = n;
    cs.ny = n;
    static std::vector<Mesh> keep;  // spaces hold pointers into their mesh
    keep.push_back(build_channel_mesh(cs));
    return MixedSpace::build(keep.back(), spec);
}

Eigen::VectorXd random_field(const MixedSpace& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd u(s.n_vel);
    for (int i = 0; i < s.n_vel; ++i) u[i] = dist(rng);
    return u;
}

}  // namespace

TEST_CASE("quadrature rule is exact to degree 5") {
    const auto& rule = QuadratureRule::instance();
    double wsum = 0.0;
    for (const auto& q : rule.points) wsum += q.w;
    CHECK(std::abs(wsum - 0.5) < 1e-15);

    for (int p = 0; p <= 5; ++p) {
        for (int q = 0; p + q <= 5; ++q) {
            double val = 0.0;
            for (const auto& pt : rule.points)
                val += pt.w * std::pow(pt.xi, p) * std::pow(pt.eta, q);
            const double exact = factorial(p) * factorial(q) / factorial(p + q + 2);
            CHECK(std::abs(val - exact) < 1e-15);
        }
    }
}

TEST_CASE("mass and stiffness quadratic forms on known fields") {
    MixedSpace s = channel_space(4);
    AssembledForms forms = assemble_constant_forms(s);

    Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.n_vel);
    CHECK(std::abs(ones.dot(forms.M * ones) - 2.0) < 1e-12);  // int (1^2 + 1^2)
    CHECK(std::abs(ones.dot(forms.A * ones)) < 1e-12);        // constants have no gradient

    Eigen::VectorXd shear = interpolate(s, [](const Vec2& x) { return Vec2{x.y, 0.0}; });
    CHECK(std::abs(shear.dot(forms.A * shear) - 1.0) < 1e-12);  // |grad| = 1 on the unit square
    CHECK(std::abs(shear.dot(forms.M * shear) - 1.0 / 3.0) < 1e-12);  // int y^2
}

TEST_CASE("divergence-free field is in the kernel of B") {
    MixedSpace s = channel_space(5);
    AssembledForms forms = assemble_constant_forms(s);
    Eigen::VectorXd u = interpolate(s, [](const Vec2& x) { return Vec2{x.x, -x.y}; });
    CHECK((forms.B * u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("divergence pairing matches the analytic integral") {
    MixedSpace s = channel_space(4);
    AssembledForms forms = assemble_constant_forms(s);
    // u = (x, 0): div u = 1, so (q, div u) = int q for every pressure basis q
    Eigen::VectorXd u = interpolate(s, [](const Vec2& x) { return Vec2{x.x, 0.0}; });
    Eigen::VectorXd numeric = forms.B * u;
    Eigen::VectorXd exact = pressure_integrals(s);
    CHECK((numeric - exact).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("trilinear form is skew in its last arguments") {
    MixedSpace s = channel_space(10);
    AssembledForms forms = assemble_constant_forms(s);
    std::mt19937_64 rng(7);
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd u = random_field(s, rng);
        Eigen::VectorXd v = random_field(s, rng);
        Eigen::VectorXd w = random_field(s, rng);
        const double scale = std::sqrt(u.dot(forms.A * u)) * v.dot(forms.A * v);
        CHECK(std::abs(apply_trilinear(s, u, v, v)) <= 1e-12 * scale);
        CHECK(std::abs(apply_trilinear(s, u, v, w) + apply_trilinear(s, u, w, v)) <=
              1e-12 * std::sqrt(u.dot(forms.A * u) * v.dot(forms.A * v) * w.dot(forms.A * w)));
    }
}

TEST_CASE("advection matrix agrees with the trilinear form") {
    MixedSpace s = channel_space(6);
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        Eigen::VectorXd a = random_field(s, rng);
        Eigen::VectorXd v = random_field(s, rng);
        Eigen::VectorXd w = random_field(s, rng);
        SpMat N = assemble_advection(s, a);
        const double via_matrix = w.dot(N * v);
        const double via_form = apply_trilinear(s, a, v, w);
        CHECK(std::abs(via_matrix - via_form) <=
              1e-12 * std::max(1.0, std::abs(via_form)) * 10.0);
    }
}

TEST_CASE("eddy viscosity form reproduces the cubic gradient integral") {
    MixedSpace s = channel_space(4);
    Eigen::VectorXd shear = interpolate(s, [](const Vec2& x) { return Vec2{x.y, 0.0}; });
    SpMat S = assemble_eddy_viscosity(s, shear, 1.0);
    // |grad u| = 1 everywhere, so u^T S(u) u = int |grad u|^3 = 1
    CHECK(std::abs(shear.dot(S * shear) - 1.0) < 1e-10);
    CHECK(std::abs(shear.dot(S * shear) - integral_grad_pow(s, shear, 3.0)) < 1e-12);

    SpMat Z = assemble_eddy_viscosity(s, shear, 0.0);
    CHECK(Eigen::MatrixXd(Z).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eddy viscosity matrix is symmetric positive semidefinite") {
    MixedSpace s = channel_space(5);
    std::mt19937_64 rng(3);
    Eigen::VectorXd lin = random_field(s, rng);
    SpMat S = assemble_eddy_viscosity(s, lin, 0.5);
    SpMat D = SpMat(S.transpose()) - S;
    CHECK(Eigen::Map<const Eigen::ArrayXd>(D.valuePtr(), D.nonZeros()).abs().maxCoeff() < 1e-13);
    for (int k = 0; k < 10; ++k) {
        Eigen::VectorXd w = random_field(s, rng);
        CHECK(w.dot(S * w) >= -1e-12);
    }
}

TEST_CASE("advection matrix is skew-symmetric") {
    MixedSpace s = channel_space(5);
    std::mt19937_64 rng(5);
    Eigen::VectorXd a = random_field(s, rng);
    SpMat N = assemble_advection(s, a);
    SpMat D = SpMat(N.transpose()) + N;
    CHECK(Eigen::Map<const Eigen::ArrayXd>(D.valuePtr(), D.nonZeros()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("parallel assembly is bitwise identical to serial") {
    MixedSpace s = channel_space(8);
    std::mt19937_64 rng(13);
    Eigen::VectorXd lin = random_field(s, rng);

    auto compare = [](const Triplets& a, const Triplets& b) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].row() == b[i].row());
            CHECK(a[i].col() == b[i].col());
            CHECK(a[i].value() == b[i].value());  // bitwise
        }
    };

    Triplets ser, par;
    mass_triplets(s, 1.0, ser, ExecMode::Serial);
    mass_triplets(s, 1.0, par, ExecMode::Parallel);
    compare(ser, par);

    ser.clear(); par.clear();
    stiffness_triplets(s, 2.5, ser, ExecMode::Serial);
    stiffness_triplets(s, 2.5, par, ExecMode::Parallel);
    compare(ser, par);

    ser.clear(); par.clear();
    divergence_triplets(s, ser, ExecMode::Serial);
    divergence_triplets(s, par, ExecMode::Parallel);
    compare(ser, par);

    ser.clear(); par.clear();
    advection_triplets(s, lin, ser, ExecMode::Serial);
    advection_triplets(s, lin, par, ExecMode::Parallel);
    compare(ser, par);

    ser.clear(); par.clear();
    eddy_viscosity_triplets(s, lin, 0.7, ser, ExecMode::Serial);
    eddy_viscosity_triplets(s, lin, 0.7, par, ExecMode::Parallel);
    compare(ser, par);

    CHECK(integral_grad_pow(s, lin, 3.0, ExecMode::Serial) ==
          integral_grad_pow(s, lin, 3.0, ExecMode::Parallel));
    CHECK(apply_trilinear(s, lin, lin, lin, ExecMode::Serial) ==
          apply_trilinear(s, lin, lin, lin, ExecMode::Parallel));
}

TEST_CASE("periodic constraints tie paired boundary nodes") {
    DirichletSpec bc;
    bc[BoundaryMarker::TopWall] = [](const Vec2&) { return Vec2{1.0, 0.0}; };
    bc[BoundaryMarker::BottomWall] = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    MixedSpace s = channel_space(6, bc);

    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd red(s.n_vel_reduced);
    for (int i = 0; i < s.n_vel_reduced; ++i) red[i] = dist(rng);
    Eigen::VectorXd raw = s.expand_velocity(red);

    const double L = 1.0;
    for (int a = 0; a < s.n_vel_nodes(); ++a) {
        if (std::abs(s.vel_nodes[a].x) > 1e-12) continue;
        for (int b = 0; b < s.n_vel_nodes(); ++b) {
            if (std::abs(s.vel_nodes[b].x - L) > 1e-12) continue;
            if (std::abs(s.vel_nodes[a].y - s.vel_nodes[b].y) > 1e-12) continue;
            CHECK(raw[s.vel_dof(a, 0)] == raw[s.vel_dof(b, 0)]);
            CHECK(raw[s.vel_dof(a, 1)] == raw[s.vel_dof(b, 1)]);
        }
    }
}

TEST_CASE("Dirichlet values flow through expansion") {
    DirichletSpec bc;
    bc[BoundaryMarker::TopWall] = [](const Vec2& x) { return Vec2{x.x, 0.0}; };
    bc[BoundaryMarker::BottomWall] = [](const Vec2&) { return Vec2{0.0, 0.0}; };
    MixedSpace s = channel_space(4, bc);
    Eigen::VectorXd raw = s.expand_velocity(Eigen::VectorXd::Zero(s.n_vel_reduced));
    for (int n = 0; n < s.n_vel_nodes(); ++n) {
        if (std::abs(s.vel_nodes[n].y - 1.0) < 1e-12)
            CHECK(raw[s.vel_dof(n, 0)] == doctest::Approx(s.vel_nodes[n].x).epsilon(1e-14));
        else
            CHECK(raw[s.vel_dof(n, 0)] == 0.0);
    }
}

TEST_CASE("interpolation is exact for quadratic fields") {
    MixedSpace s = channel_space(3);
    auto g = [](const Vec2& x) { return Vec2{x.x * x.x + x.y, x.x - x.y * x.y}; };
    Eigen::VectorXd u = interpolate(s, g);
    CHECK(error_l2(s, u, g) < 1e-13);
}

TEST_CASE("integral_l2_sq matches the mass quadratic form") {
    MixedSpace s = channel_space(5);
    AssembledForms forms = assemble_constant_forms(s);
    std::mt19937_64 rng(23);
    Eigen::VectorXd u = random_field(s, rng);
    CHECK(std::abs(integral_l2_sq(s, u) - u.dot(forms.M * u)) < 1e-11);
}
