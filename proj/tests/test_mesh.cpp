#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "leslab/mesh.hpp"

using namespace leslab;

TEST_CASE("channel mesh basic counts and area") {
    ChannelSpec spec;
    Mesh mesh = build_channel_mesh(spec);  // 2x2 default
    CHECK(mesh.n_vertices() == 9);
    CHECK(mesh.n_triangles() == 8);
    CHECK(mesh.area == doctest::Approx(1.0).epsilon(1e-14));

    spec.L = 2.0;
    Mesh big = build_channel_mesh(spec);
    CHECK(big.area == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("channel mesh h_max is the cell diagonal") {
    ChannelSpec spec;
    spec.nx = 10;
    spec.ny = 10;
    Mesh mesh = build_channel_mesh(spec);
    CHECK(std::abs(mesh.h_max - std::sqrt(2.0) / 10.0) < 1e-12);
    CHECK(mesh.h_min > 0.0);
    CHECK(mesh.h_min <= mesh.h_max);
}

TEST_CASE("channel orientation is counterclockwise") {
    ChannelSpec spec;
    spec.nx = 4;
    spec.ny = 3;
    Mesh mesh = build_channel_mesh(spec);
    for (int t = 0; t < mesh.n_triangles(); ++t) CHECK(mesh.signed_area(t) > 0.0);
}

TEST_CASE("align_strip snaps a grid line") {
    ChannelSpec spec;
    spec.nx = 7;
    spec.ny = 7;
    spec.align_strip = 0.1;
    Mesh mesh = build_channel_mesh(spec);
    int on_line = 0;
    for (const auto& v : mesh.vertices)
        if (std::abs(v.y - 0.9) < 1e-13) ++on_line;
    CHECK(on_line == spec.nx + 1);
}

TEST_CASE("channel rejects degenerate subdivisions") {
    ChannelSpec spec;
    spec.nx = 1;
    CHECK_THROWS_AS(build_channel_mesh(spec), precondition_error);
    spec.nx = 4;
    spec.L = 0.0;
    CHECK_THROWS_AS(build_channel_mesh(spec), precondition_error);
}

TEST_CASE("channel boundary markers cover all four sides") {
    Mesh mesh = build_channel_mesh(ChannelSpec{});
    std::set<BoundaryMarker> seen;
    for (const auto& e : mesh.boundary_edges) seen.insert(e.marker);
    CHECK(seen.count(BoundaryMarker::TopWall) == 1);
    CHECK(seen.count(BoundaryMarker::BottomWall) == 1);
    CHECK(seen.count(BoundaryMarker::PeriodicLeft) == 1);
    CHECK(seen.count(BoundaryMarker::PeriodicRight) == 1);
    CHECK(seen.count(BoundaryMarker::OuterCircle) == 0);
}

TEST_CASE("annulus area approaches the analytic value") {
    AnnulusSpec spec;  // outer 1, inner 0.25 offset at (0.3, 0)
    Mesh mesh = build_annulus_mesh(spec);
    const double exact = M_PI * (1.0 - 0.25 * 0.25);
    CHECK(std::abs(mesh.area - exact) / exact < 0.02);
    for (int t = 0; t < mesh.n_triangles(); ++t) CHECK(mesh.signed_area(t) > 0.0);
}

TEST_CASE("annulus boundary vertices sit on their circles") {
    AnnulusSpec spec;
    spec.inner_center = {0.0, 0.0};
    Mesh mesh = build_annulus_mesh(spec);
    for (const auto& e : mesh.boundary_edges) {
        for (int v : {e.v0, e.v1}) {
            const double r = mesh.vertices[v].norm();
            if (e.marker == BoundaryMarker::OuterCircle)
                CHECK(std::abs(r - spec.outer_radius) < 1e-12);
            else
                CHECK(std::abs(r - spec.inner_radius) < 1e-12);
        }
    }
}

TEST_CASE("annulus refinement shrinks h_max") {
    AnnulusSpec coarse;
    Mesh c = build_annulus_mesh(coarse, 1);
    AnnulusSpec fine;
    fine.m = 120;
    fine.n = 60;
    Mesh f = build_annulus_mesh(fine, 2);
    CHECK(f.h_max < c.h_max);
    CHECK(f.n_triangles() > c.n_triangles());
}

TEST_CASE("annulus rejects invalid geometry") {
    AnnulusSpec spec;
    spec.inner_radius = 1.5;  // larger than outer
    CHECK_THROWS(build_annulus_mesh(spec));
    AnnulusSpec off;
    off.inner_center = {0.9, 0.0};  // hole pokes through the outer circle
    CHECK_THROWS(build_annulus_mesh(off));
}

TEST_CASE("finalize validates connectivity") {
    Mesh mesh;
    mesh.vertices = {{0, 0}, {1, 0}, {0, 1}};
    mesh.triangles = {{0, 1, 2}};
    mesh.boundary_edges = {{0, 1, BoundaryMarker::BottomWall},
                           {1, 2, BoundaryMarker::OuterCircle},
                           {2, 0, BoundaryMarker::PeriodicLeft}};
    CHECK_NOTHROW(mesh.finalize());
    CHECK(mesh.h_max == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    Mesh bad = mesh;
    bad.boundary_edges.pop_back();  // missing boundary edge
    CHECK_THROWS_AS(bad.finalize(), numerical_error);

    Mesh zero;
    zero.vertices = {{0, 0}, {1, 0}, {2, 0}};
    zero.triangles = {{0, 1, 2}};
    CHECK_THROWS_AS(zero.finalize(), numerical_error);
}

TEST_CASE("mesh_size rejects empty meshes") {
    Mesh empty;
    CHECK_THROWS_AS(mesh_size(empty), precondition_error);
}

namespace {

// minimal MSH 2.2 writer used only to exercise the importer
void dump_msh(const std::string& path, const Mesh& mesh) {
    std::ofstream out(path);
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n" << mesh.n_vertices() << "\n";
    char buf[128];
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        std::snprintf(buf, sizeof buf, "%d %.17g %.17g 0\n", v + 1, mesh.vertices[v].x,
                      mesh.vertices[v].y);
        out << buf;
    }
    out << "$EndNodes\n$Elements\n"
        << (mesh.boundary_edges.size() + mesh.triangles.size()) << "\n";
    int id = 1;
    for (const auto& e : mesh.boundary_edges)
        out << id++ << " 1 2 " << static_cast<int>(e.marker) << " 0 " << e.v0 + 1 << " "
            << e.v1 + 1 << "\n";
    for (const auto& t : mesh.triangles)
        out << id++ << " 2 2 10 0 " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
    out << "$EndElements\n";
}

}  // namespace

TEST_CASE("MSH import round-trips a channel mesh") {
    ChannelSpec spec;
    spec.nx = 4;
    spec.ny = 3;
    Mesh mesh = build_channel_mesh(spec);
    const std::string path = "roundtrip.msh";
    dump_msh(path, mesh);
    Mesh back = import_msh(path);
    REQUIRE(back.n_vertices() == mesh.n_vertices());
    REQUIRE(back.n_triangles() == mesh.n_triangles());
    CHECK(back.area == doctest::Approx(mesh.area).epsilon(1e-14));
    REQUIRE(back.boundary_edges.size() == mesh.boundary_edges.size());
    for (std::size_t i = 0; i < back.boundary_edges.size(); ++i)
        CHECK(back.boundary_edges[i].marker == mesh.boundary_edges[i].marker);
    std::remove(path.c_str());
}

TEST_CASE("MSH import rejects unknown physical tags") {
    const std::string path = "badtag.msh";
    {
        std::ofstream out(path);
        out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n3\n"
            << "1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n$Elements\n2\n"
            << "1 1 2 99 0 1 2\n"  // physical tag 99 is not in the table
            << "2 2 2 10 0 1 2 3\n$EndElements\n";
    }
    CHECK_THROWS_AS(import_msh(path), precondition_error);
    std::remove(path.c_str());
}

TEST_CASE("MSH import rejects wrong versions") {
    const std::string path = "badver.msh";
    {
        std::ofstream out(path);
        out << "$MeshFormat\n4.1 0 8\n$EndMeshFormat\n";
    }
    CHECK_THROWS_AS(import_msh(path), precondition_error);
    std::remove(path.c_str());
}
