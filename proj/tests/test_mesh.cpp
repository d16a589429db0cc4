#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <poro/mesh.hpp>

using namespace poro;

namespace {

double total_volume(const PolyMesh& m) {
    double v = 0.0;
    for (const auto& c : m.cells) v += c.volume;
    return v;
}

int boundary_faces(const PolyMesh& m) {
    int n = 0;
    for (const auto& f : m.faces) n += f.boundary() ? 1 : 0;
    return n;
}

} // namespace

TEST_CASE("structured hex counts and geometry") {
    Box unit{0, 1, 0, 1, 0, 1};
    PolyMesh m = build_structured_hex(4, 4, 4, unit);
    CHECK(m.cells.size() == 64);
    CHECK(m.nodes.size() == 125);
    CHECK(m.faces.size() == 240);
    validate_mesh(m);
    CHECK(total_volume(m) == doctest::Approx(1.0).epsilon(1e-12));

    PolyMesh one = build_structured_hex(1, 1, 1, unit);
    CHECK(one.cells.size() == 1);
    CHECK(one.cells[0].volume == doctest::Approx(1.0));
    CHECK(boundary_faces(one) == 6);

    PolyMesh two = build_structured_hex(2, 1, 1, Box{0, 2, 0, 1, 0, 1});
    int interior = 0;
    for (const auto& f : two.faces)
        if (!f.boundary()) {
            ++interior;
            CHECK(f.area == doctest::Approx(1.0));
            CHECK(std::abs(f.normal[0]) == doctest::Approx(1.0));
        }
    CHECK(interior == 1);
}

TEST_CASE("structured hex rejects bad input") {
    CHECK_THROWS(build_structured_hex(0, 1, 1, Box{0, 1, 0, 1, 0, 1}));
    CHECK_THROWS(build_structured_hex(1, 1, 1, Box{0, 0, 0, 1, 0, 1}));
}

TEST_CASE("boundary tags cover all six sides") {
    PolyMesh m = build_structured_hex(2, 2, 2, Box{0, 1, 0, 1, 0, 1});
    int count[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& f : m.faces)
        if (f.boundary()) {
            REQUIRE(f.btag >= 0);
            REQUIRE(f.btag < 6);
            count[f.btag]++;
        }
    for (int t = 0; t < 6; ++t) CHECK(count[t] == 4);
}

TEST_CASE("prismatic generator") {
    std::vector<std::array<double, 2>> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}};

    PolyMesh m = build_prismatic(pts, tris, {0.0, 1.0});
    CHECK(m.cells.size() == 2);
    validate_mesh(m);
    CHECK(m.cells[0].volume == doctest::Approx(0.5));
    CHECK(m.cells[1].volume == doctest::Approx(0.5));

    PolyMesh m2 = build_prismatic(pts, tris, {0.0, 1.0, 2.0});
    CHECK(m2.cells.size() == 4);
    validate_mesh(m2);
    int horizontal_interior = 0;
    for (const auto& f : m2.faces)
        if (!f.boundary() && f.nodes.size() == 3) ++horizontal_interior;
    CHECK(horizontal_interior == 2);

    PolyMesh tri1 = build_prismatic({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {0.0, 2.0});
    CHECK(tri1.cells[0].volume == doctest::Approx(1.0));

    CHECK_THROWS(build_prismatic(pts, tris, {0.0}));
    CHECK_THROWS(build_prismatic(pts, tris, {0.0, 0.0}));
    CHECK_THROWS(build_prismatic(pts, {{0, 2, 1}}, {0.0, 1.0}));
}

TEST_CASE("perturb_nodes keeps invariants and is deterministic") {
    Box unit{0, 1, 0, 1, 0, 1};
    PolyMesh m = build_structured_hex(4, 4, 4, unit);

    PolyMesh same = perturb_nodes(m, 0.0, 7);
    REQUIRE(same.nodes.size() == m.nodes.size());
    for (size_t i = 0; i < m.nodes.size(); ++i) CHECK((same.nodes[i] - m.nodes[i]).norm() == 0.0);

    PolyMesh p1 = perturb_nodes(m, 0.1, 7);
    validate_mesh(p1);
    CHECK(total_volume(p1) == doctest::Approx(1.0).epsilon(1e-10));

    PolyMesh p2 = perturb_nodes(m, 0.29, 7);
    PolyMesh p3 = perturb_nodes(m, 0.29, 7);
    REQUIRE(p2.nodes.size() == p3.nodes.size());
    for (size_t i = 0; i < p2.nodes.size(); ++i) CHECK((p2.nodes[i] - p3.nodes[i]).norm() == 0.0);
    validate_mesh(p2);

    // boundary nodes stay on their boundary planes
    for (size_t v = 0; v < p1.nodes.size(); ++v) {
        if (m.nodes[v][0] == 0.0) CHECK(p1.nodes[v][0] == doctest::Approx(0.0).epsilon(1e-14));
        if (m.nodes[v][2] == 1.0) CHECK(p1.nodes[v][2] == doctest::Approx(1.0).epsilon(1e-14));
    }

    CHECK_THROWS(perturb_nodes(m, 0.3, 1));
    CHECK_THROWS(perturb_nodes(m, -0.1, 1));
}

TEST_CASE("perturbed prism mesh stays valid") {
    std::vector<std::array<double, 2>> pts = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}};
    PolyMesh m = build_prismatic(pts, tris, {0.0, 0.5, 1.0});
    PolyMesh p = perturb_nodes(m, 0.15, 3);
    validate_mesh(p);
    CHECK(total_volume(p) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("rcm ordering") {
    // path graph handed over scrambled
    std::vector<std::vector<int>> path(4);
    auto link = [&](int a, int b) {
        path[a].push_back(b);
        path[b].push_back(a);
    };
    link(3, 1);
    link(1, 0);
    link(0, 2);
    std::vector<int> ord = rcm_order(path);
    CHECK(graph_bandwidth(path, ord) == 1);

    PolyMesh m = build_structured_hex(4, 4, 4, Box{0, 1, 0, 1, 0, 1});
    auto adj = m.cell_adjacency();
    std::vector<int> ident(m.cells.size());
    for (size_t i = 0; i < ident.size(); ++i) ident[i] = static_cast<int>(i);
    std::vector<int> rcm = rcm_order(adj);
    CHECK(graph_bandwidth(adj, rcm) <= 17);

    // bijection
    std::vector<char> seen(rcm.size(), 0);
    for (int v : rcm) seen[v] = 1;
    for (char s : seen) CHECK(s == 1);

    CHECK(rcm_order({}).empty());

    // disconnected graph: each component contiguous
    std::vector<std::vector<int>> dis(4);
    dis[0].push_back(1);
    dis[1].push_back(0);
    dis[2].push_back(3);
    dis[3].push_back(2);
    std::vector<int> dord = rcm_order(dis);
    auto comp = [](int v) { return v / 2; };
    CHECK(comp(dord[0]) == comp(dord[1]));
    CHECK(comp(dord[2]) == comp(dord[3]));
}

TEST_CASE("contiguous partitioning") {
    PolyMesh m = build_structured_hex(4, 4, 4, Box{0, 1, 0, 1, 0, 1});
    Partition p4 = partition_contiguous(m, 4);
    CHECK(p4.part_sizes == std::vector<int>{16, 16, 16, 16});
    CHECK_FALSE(p4.has_empty_parts);

    PolyMesh bar = build_structured_hex(10, 1, 1, Box{0, 10, 0, 1, 0, 1});
    Partition p3 = partition_contiguous(bar, 3);
    CHECK(p3.part_sizes == std::vector<int>{4, 3, 3});

    Partition p1 = partition_contiguous(m, 1);
    for (int c : p1.cell_part) CHECK(c == 0);

    Partition big = partition_contiguous(bar, 12);
    CHECK(big.has_empty_parts);

    // node owner is the lowest part among adjacent cells
    for (size_t v = 0; v < m.nodes.size(); ++v) {
        int lo = p4.nparts;
        for (int c : m.node_cells[v]) lo = std::min(lo, p4.cell_part[c]);
        CHECK(p4.node_part[v] == lo);
    }

    // determinism
    Partition again = partition_contiguous(m, 4);
    CHECK(again.cell_part == p4.cell_part);
}
