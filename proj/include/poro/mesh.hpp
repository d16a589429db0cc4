#ifndef PORO_MESH_HPP
#define PORO_MESH_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rcm.hpp"

namespace poro {

using Vec3 = Eigen::Vector3d;

// Boundary tags of generated meshes, assigned from the outward normal.
enum BoundaryTag { TagXMinus = 0, TagXPlus, TagYMinus, TagYPlus, TagZMinus, TagZPlus };

inline const char* tag_name(int t) {
    static const char* names[6] = {"x-", "x+", "y-", "y+", "z-", "z+"};
    return (t >= 0 && t < 6) ? names[t] : "?";
}

struct Face {
    std::vector<int> nodes;   // cyclic
    Vec3 centroid{0, 0, 0};
    Vec3 normal{0, 0, 0};     // unit; outward of cells[0]
    double area = 0.0;
    int cells[2] = {-1, -1};  // cells[1] = -1 on the boundary
    int btag = -1;            // boundary tag, -1 interior

    bool boundary() const { return cells[1] < 0; }
};

struct Cell {
    std::vector<int> faces;
    std::vector<int> nodes;        // unique, sorted
    std::vector<int> corner_nodes; // generator corner list, for VTK export
    int vtk_type = 0;              // 12 hex, 13 wedge
    double volume = 0.0;
    Vec3 centroid{0, 0, 0};
};

// Polyhedral mesh with faces stored once and referenced by both adjacent
// cells through orientation signs. Immutable after construction.
struct PolyMesh {
    std::vector<Vec3> nodes;
    std::vector<Face> faces;
    std::vector<Cell> cells;
    std::vector<std::vector<int>> node_cells;

    int orientation(int cell, int face) const {
        return faces[face].cells[0] == cell ? +1 : -1;
    }

    int num_boundary_faces() const {
        int n = 0;
        for (const auto& f : faces)
            if (f.boundary()) ++n;
        return n;
    }

    std::vector<std::vector<int>> cell_adjacency() const {
        std::vector<std::vector<int>> adj(cells.size());
        for (const auto& f : faces)
            if (!f.boundary()) {
                adj[f.cells[0]].push_back(f.cells[1]);
                adj[f.cells[1]].push_back(f.cells[0]);
            }
        for (auto& a : adj) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        return adj;
    }
};

namespace detail {

inline void face_geometry(const std::vector<Vec3>& nodes, Face& f) {
    const int n = static_cast<int>(f.nodes.size());
    Vec3 xbar = Vec3::Zero();
    for (int i : f.nodes) xbar += nodes[i];
    xbar /= n;
    Vec3 avec = Vec3::Zero();       // area vector
    Vec3 moment = Vec3::Zero();     // area-weighted centroid
    for (int k = 0; k < n; ++k) {
        const Vec3& a = nodes[f.nodes[k]];
        const Vec3& b = nodes[f.nodes[(k + 1) % n]];
        Vec3 c = 0.5 * (a - xbar).cross(b - xbar);
        avec += c;
        moment += c.norm() * (xbar + a + b) / 3.0;
    }
    f.area = avec.norm();
    if (f.area <= 0.0) throw std::runtime_error("degenerate face");
    f.normal = avec / f.area;
    f.centroid = moment / f.area;
}

inline double face_diameter(const std::vector<Vec3>& nodes, const Face& f) {
    double d = 0.0;
    for (size_t i = 0; i < f.nodes.size(); ++i)
        for (size_t j = i + 1; j < f.nodes.size(); ++j)
            d = std::max(d, (nodes[f.nodes[i]] - nodes[f.nodes[j]]).norm());
    return d;
}

inline double face_planarity_defect(const std::vector<Vec3>& nodes, const Face& f) {
    double d = 0.0;
    for (int i : f.nodes)
        d = std::max(d, std::abs((nodes[i] - f.centroid).dot(f.normal)));
    return d;
}

// Volume and centroid from the divergence theorem over fan triangles.
inline void cell_geometry(const PolyMesh& m, Cell& c) {
    double vol = 0.0;
    Vec3 mom = Vec3::Zero();
    for (int fi : c.faces) {
        const Face& f = m.faces[fi];
        double sign = (f.cells[0] == (&c - m.cells.data())) ? 1.0 : -1.0;
        const int n = static_cast<int>(f.nodes.size());
        Vec3 xbar = Vec3::Zero();
        for (int i : f.nodes) xbar += m.nodes[i];
        xbar /= n;
        for (int k = 0; k < n; ++k) {
            const Vec3& a = m.nodes[f.nodes[k]];
            const Vec3& b = m.nodes[f.nodes[(k + 1) % n]];
            Vec3 cr = 0.5 * (a - xbar).cross(b - xbar);  // triangle area vector
            Vec3 tc = (xbar + a + b) / 3.0;
            vol += sign * tc.dot(cr) / 3.0;
            // integral of x_i^2 n_i over the triangle, midpoint rule (exact)
            Vec3 m0 = 0.5 * (xbar + a), m1 = 0.5 * (a + b), m2 = 0.5 * (b + xbar);
            for (int d = 0; d < 3; ++d) {
                double sq = (m0[d] * m0[d] + m1[d] * m1[d] + m2[d] * m2[d]) / 3.0;
                mom[d] += sign * 0.5 * sq * cr[d];
            }
        }
    }
    c.volume = vol;
    if (vol > 0.0) c.centroid = mom / vol;
}

inline void finalize(PolyMesh& m) {
    for (auto& f : m.faces) face_geometry(m.nodes, f);
    for (auto& c : m.cells) {
        std::vector<int> nn;
        for (int fi : c.faces)
            for (int v : m.faces[fi].nodes) nn.push_back(v);
        std::sort(nn.begin(), nn.end());
        nn.erase(std::unique(nn.begin(), nn.end()), nn.end());
        c.nodes = std::move(nn);
        cell_geometry(m, c);
    }
    m.node_cells.assign(m.nodes.size(), {});
    for (size_t c = 0; c < m.cells.size(); ++c)
        for (int v : m.cells[c].nodes) m.node_cells[v].push_back(static_cast<int>(c));
}

inline int boundary_tag_from_normal(const Vec3& n) {
    int axis = 0;
    n.cwiseAbs().maxCoeff(&axis);
    return 2 * axis + (n[axis] > 0 ? 1 : 0);
}

} // namespace detail

// Validates the PolyMesh invariants; throws with a diagnostic on violation.
inline void validate_mesh(const PolyMesh& m) {
    for (size_t fi = 0; fi < m.faces.size(); ++fi) {
        const Face& f = m.faces[fi];
        if (f.nodes.size() < 3) throw std::runtime_error("face " + std::to_string(fi) + " has <3 nodes");
        double defect = detail::face_planarity_defect(m.nodes, f);
        if (defect > 1e-10 * detail::face_diameter(m.nodes, f))
            throw std::runtime_error("face " + std::to_string(fi) + " not planar");
        if (f.cells[0] < 0) throw std::runtime_error("face without cell");
        if (f.boundary() && f.btag < 0)
            throw std::runtime_error("boundary face " + std::to_string(fi) + " untagged");
    }
    for (size_t ci = 0; ci < m.cells.size(); ++ci) {
        const Cell& c = m.cells[ci];
        if (!(c.volume > 0.0))
            throw std::runtime_error("cell " + std::to_string(ci) + " has non-positive volume");
        Vec3 closed = Vec3::Zero();
        double surf = 0.0;
        for (int fi : c.faces) {
            const Face& f = m.faces[fi];
            closed += m.orientation(static_cast<int>(ci), fi) * f.area * f.normal;
            surf += f.area;
        }
        if (closed.norm() > 1e-12 * surf)
            throw std::runtime_error("cell " + std::to_string(ci) + " not closed");
    }
}

struct Box {
    double x0, x1, y0, y1, z0, z1;
    bool degenerate() const { return !(x1 > x0 && y1 > y0 && z1 > z0); }
};

inline PolyMesh build_structured_hex(int nx, int ny, int nz, const Box& ext) {
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("hex grid: counts must be >= 1");
    if (ext.degenerate()) throw std::invalid_argument("hex grid: degenerate extents");
    PolyMesh m;
    auto nid = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };
    auto cid = [&](int i, int j, int k) { return i + nx * (j + ny * k); };
    m.nodes.resize(size_t(nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                m.nodes[nid(i, j, k)] = Vec3(ext.x0 + (ext.x1 - ext.x0) * i / nx,
                                             ext.y0 + (ext.y1 - ext.y0) * j / ny,
                                             ext.z0 + (ext.z1 - ext.z0) * k / nz);
    m.cells.resize(size_t(nx) * ny * nz);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                Cell& c = m.cells[cid(i, j, k)];
                c.vtk_type = 12;
                c.corner_nodes = {nid(i, j, k),         nid(i + 1, j, k),
                                  nid(i + 1, j + 1, k), nid(i, j + 1, k),
                                  nid(i, j, k + 1),     nid(i + 1, j, k + 1),
                                  nid(i + 1, j + 1, k + 1), nid(i, j + 1, k + 1)};
            }
    auto add_face = [&](std::vector<int> fnodes, int c0, int c1, int btag) {
        Face f;
        f.nodes = std::move(fnodes);
        f.cells[0] = c0;
        f.cells[1] = c1;
        f.btag = btag;
        int fi = static_cast<int>(m.faces.size());
        m.faces.push_back(std::move(f));
        m.cells[c0].faces.push_back(fi);
        if (c1 >= 0) m.cells[c1].faces.push_back(fi);
    };
    // x-normal faces; interior normal +x out of the lower cell, boundary outward
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i <= nx; ++i) {
                std::vector<int> fn = {nid(i, j, k), nid(i, j + 1, k), nid(i, j + 1, k + 1), nid(i, j, k + 1)};
                if (i == 0) {
                    std::reverse(fn.begin(), fn.end());
                    add_face(fn, cid(0, j, k), -1, TagXMinus);
                } else if (i == nx) {
                    add_face(fn, cid(nx - 1, j, k), -1, TagXPlus);
                } else {
                    add_face(fn, cid(i - 1, j, k), cid(i, j, k), -1);
                }
            }
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::vector<int> fn = {nid(i, j, k), nid(i, j, k + 1), nid(i + 1, j, k + 1), nid(i + 1, j, k)};
                if (j == 0) {
                    std::reverse(fn.begin(), fn.end());
                    add_face(fn, cid(i, 0, k), -1, TagYMinus);
                } else if (j == ny) {
                    add_face(fn, cid(i, ny - 1, k), -1, TagYPlus);
                } else {
                    add_face(fn, cid(i, j - 1, k), cid(i, j, k), -1);
                }
            }
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                std::vector<int> fn = {nid(i, j, k), nid(i + 1, j, k), nid(i + 1, j + 1, k), nid(i, j + 1, k)};
                if (k == 0) {
                    std::reverse(fn.begin(), fn.end());
                    add_face(fn, cid(i, j, 0), -1, TagZMinus);
                } else if (k == nz) {
                    add_face(fn, cid(i, j, nz - 1), -1, TagZPlus);
                } else {
                    add_face(fn, cid(i, j, k - 1), cid(i, j, k), -1);
                }
            }
    detail::finalize(m);
    return m;
}

// Triangular prisms from a 2D triangulation extruded through z_levels.
// Triangles must be counter-clockwise.
inline PolyMesh build_prismatic(const std::vector<std::array<double, 2>>& pts2d,
                                const std::vector<std::array<int, 3>>& tris,
                                const std::vector<double>& z_levels) {
    if (z_levels.size() < 2) throw std::invalid_argument("prismatic: need >= 2 z levels");
    for (size_t i = 1; i < z_levels.size(); ++i)
        if (!(z_levels[i] > z_levels[i - 1]))
            throw std::invalid_argument("prismatic: z levels must be strictly increasing");
    for (const auto& t : tris) {
        double ax = pts2d[t[1]][0] - pts2d[t[0]][0], ay = pts2d[t[1]][1] - pts2d[t[0]][1];
        double bx = pts2d[t[2]][0] - pts2d[t[0]][0], by = pts2d[t[2]][1] - pts2d[t[0]][1];
        if (!(ax * by - ay * bx > 0.0)) throw std::invalid_argument("prismatic: inverted triangle");
    }
    const int n2 = static_cast<int>(pts2d.size());
    const int nt = static_cast<int>(tris.size());
    const int nl = static_cast<int>(z_levels.size());
    PolyMesh m;
    m.nodes.resize(size_t(n2) * nl);
    for (int l = 0; l < nl; ++l)
        for (int p = 0; p < n2; ++p)
            m.nodes[p + n2 * l] = Vec3(pts2d[p][0], pts2d[p][1], z_levels[l]);
    auto nid = [&](int p, int l) { return p + n2 * l; };
    auto cid = [&](int t, int l) { return t + nt * l; };
    m.cells.resize(size_t(nt) * (nl - 1));
    for (int l = 0; l + 1 < nl; ++l)
        for (int t = 0; t < nt; ++t) {
            Cell& c = m.cells[cid(t, l)];
            c.vtk_type = 13;
            c.corner_nodes = {nid(tris[t][0], l),     nid(tris[t][1], l),     nid(tris[t][2], l),
                              nid(tris[t][0], l + 1), nid(tris[t][1], l + 1), nid(tris[t][2], l + 1)};
        }
    auto add_face = [&](std::vector<int> fnodes, int c0, int c1, int btag) {
        Face f;
        f.nodes = std::move(fnodes);
        f.cells[0] = c0;
        f.cells[1] = c1;
        f.btag = btag;
        int fi = static_cast<int>(m.faces.size());
        m.faces.push_back(std::move(f));
        m.cells[c0].faces.push_back(fi);
        if (c1 >= 0) m.cells[c1].faces.push_back(fi);
    };
    // horizontal triangle faces
    for (int l = 0; l < nl; ++l)
        for (int t = 0; t < nt; ++t) {
            std::vector<int> fn = {nid(tris[t][0], l), nid(tris[t][1], l), nid(tris[t][2], l)};  // +z
            if (l == 0) {
                std::reverse(fn.begin(), fn.end());
                add_face(fn, cid(t, 0), -1, TagZMinus);
            } else if (l == nl - 1) {
                add_face(fn, cid(t, nl - 2), -1, TagZPlus);
            } else {
                add_face(fn, cid(t, l - 1), cid(t, l), -1);
            }
        }
    // vertical quad faces over 2D edges
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;  // -> list of (tri, first node of directed edge)
    for (int t = 0; t < nt; ++t)
        for (int e = 0; e < 3; ++e) {
            int a = tris[t][e], b = tris[t][(e + 1) % 3];
            edges[std::minmax(a, b)].push_back({t, a});
        }
    for (const auto& [key, owners] : edges) {
        if (owners.size() > 2) throw std::invalid_argument("prismatic: non-manifold edge");
        int t0 = owners[0].first;
        int a = owners[0].second;
        int b = (a == key.first) ? key.second : key.first;
        int t1 = owners.size() == 2 ? owners[1].first : -1;
        for (int l = 0; l + 1 < nl; ++l) {
            // normal (b-a) x z: outward of t0 (CCW triangles)
            std::vector<int> fn = {nid(a, l), nid(b, l), nid(b, l + 1), nid(a, l + 1)};
            if (t1 >= 0) {
                add_face(fn, cid(t0, l), cid(t1, l), -1);
            } else {
                Vec3 nrm = (m.nodes[fn[1]] - m.nodes[fn[0]]).cross(m.nodes[fn[3]] - m.nodes[fn[0]]);
                add_face(fn, cid(t0, l), -1, detail::boundary_tag_from_normal(nrm));
            }
        }
    }
    detail::finalize(m);
    return m;
}

// Deterministic random perturbation of interior node positions; boundary
// nodes move only within their boundary plane(s). Faces that lose planarity
// are re-triangulated by a fan from their first node.
inline PolyMesh perturb_nodes(const PolyMesh& in, double amplitude, std::uint64_t seed) {
    if (amplitude < 0.0 || amplitude >= 0.3)
        throw std::invalid_argument("perturb_nodes: amplitude must be in [0, 0.3)");
    if (amplitude == 0.0) return in;
    PolyMesh m = in;

    // local edge length per node
    std::vector<double> edge_len(m.nodes.size(), std::numeric_limits<double>::max());
    for (const auto& f : m.faces)
        for (size_t k = 0; k < f.nodes.size(); ++k) {
            int a = f.nodes[k], b = f.nodes[(k + 1) % f.nodes.size()];
            double L = (m.nodes[a] - m.nodes[b]).norm();
            edge_len[a] = std::min(edge_len[a], L);
            edge_len[b] = std::min(edge_len[b], L);
        }
    // boundary plane normals per node
    std::vector<std::vector<Vec3>> bnormals(m.nodes.size());
    for (const auto& f : m.faces)
        if (f.boundary())
            for (int v : f.nodes) {
                bool dup = false;
                for (const Vec3& n : bnormals[v])
                    if (std::abs(n.dot(f.normal)) > 0.99) dup = true;
                if (!dup) bnormals[v].push_back(f.normal);
            }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (size_t v = 0; v < m.nodes.size(); ++v) {
        Vec3 d(uni(rng), uni(rng), uni(rng));
        d *= amplitude * edge_len[v];
        for (const Vec3& n : bnormals[v]) d -= d.dot(n) * n;
        if (bnormals[v].size() >= 3) d.setZero();
        m.nodes[v] += d;
    }

    // re-triangulate non-planar faces
    std::vector<Face> new_faces;
    std::vector<std::vector<int>> cell_faces(m.cells.size());
    for (auto& f : m.faces) {
        detail::face_geometry(m.nodes, f);
        bool split = f.nodes.size() > 3 &&
                     detail::face_planarity_defect(m.nodes, f) >
                         1e-10 * detail::face_diameter(m.nodes, f);
        auto push = [&](Face nf) {
            int fi = static_cast<int>(new_faces.size());
            detail::face_geometry(m.nodes, nf);
            new_faces.push_back(std::move(nf));
            cell_faces[new_faces[fi].cells[0]].push_back(fi);
            if (new_faces[fi].cells[1] >= 0) cell_faces[new_faces[fi].cells[1]].push_back(fi);
        };
        if (!split) {
            push(f);
        } else {
            for (size_t k = 1; k + 1 < f.nodes.size(); ++k) {
                Face t;
                t.nodes = {f.nodes[0], f.nodes[k], f.nodes[k + 1]};
                t.cells[0] = f.cells[0];
                t.cells[1] = f.cells[1];
                t.btag = f.btag;
                push(std::move(t));
            }
        }
    }
    m.faces = std::move(new_faces);
    for (size_t c = 0; c < m.cells.size(); ++c) m.cells[c].faces = std::move(cell_faces[c]);
    detail::finalize(m);
    for (size_t c = 0; c < m.cells.size(); ++c)
        if (!(m.cells[c].volume > 0.0))
            throw std::runtime_error("perturb_nodes: non-positive volume in cell " + std::to_string(c) +
                                     "; reduce amplitude");
    return m;
}

// Cell ordering by reverse Cuthill-McKee on the face-neighbor graph.
inline std::vector<int> rcm_cell_order(const PolyMesh& m) { return rcm_order(m.cell_adjacency()); }

struct Partition {
    std::vector<int> cell_part;
    std::vector<int> node_part;
    int nparts = 1;
    std::vector<int> part_sizes;
    bool has_empty_parts = false;
};

// Contiguous chunks of RCM-ordered cells; deliberately cost-oblivious.
inline Partition partition_contiguous(const PolyMesh& m, int nparts) {
    if (nparts < 1) throw std::invalid_argument("partition: nparts must be >= 1");
    const int n = static_cast<int>(m.cells.size());
    Partition p;
    p.nparts = nparts;
    p.cell_part.assign(n, 0);
    p.part_sizes.assign(nparts, 0);
    std::vector<int> order = rcm_cell_order(m);
    int base = n / nparts, rem = n % nparts;
    int pos = 0;
    for (int k = 0; k < nparts; ++k) {
        int sz = base + (k < rem ? 1 : 0);
        for (int i = 0; i < sz; ++i) p.cell_part[order[pos++]] = k;
        p.part_sizes[k] = sz;
        if (sz == 0) p.has_empty_parts = true;
    }
    p.node_part.assign(m.nodes.size(), 0);
    for (size_t v = 0; v < m.nodes.size(); ++v) {
        int owner = nparts;
        for (int c : m.node_cells[v]) owner = std::min(owner, p.cell_part[c]);
        p.node_part[v] = (owner == nparts) ? 0 : owner;
    }
    return p;
}

} // namespace poro

#endif
