#ifndef PORO_MODEL_HPP
#define PORO_MODEL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "coupling.hpp"
#include "fvm_flow.hpp"
#include "linalg.hpp"
#include "mesh.hpp"
#include "physics.hpp"
#include "sparse.hpp"
#include "threading.hpp"
#include "vem_mech.hpp"

namespace poro {

// Fully discrete coupled problem on one mesh: resolved boundary conditions,
// flux stencils, symbolic matrix pattern and the per-step assembly that fills
// it. Unknown ordering: cell heads first [0, n_flow), then nodal
// displacements [n_flow, n_flow + 3*n_nodes).
class DiscreteModel {
public:
    PolyMesh mesh;
    std::vector<MediaProperties> media;
    std::vector<int> cell_media;             // media index per cell
    std::vector<std::string> media_names;    // parallel to media, used by qualified BCs
    FluidConstants fluid;
    FluxScheme scheme = FluxScheme::TPFA;

    FlowBCFaces flow_bc;                     // resolved per face
    std::vector<MechBCEntry> mech_face_bc;   // resolved per boundary face
    FluxStencils stencils;
    std::vector<DivOperator> divs;           // discrete divergence per cell
    Eigen::VectorXd traction_load;           // nodal mechanical loads, size 3*nn
    std::vector<char> dof_fixed;             // mech dof constrained flag
    Eigen::VectorXd dof_value;               // prescribed value where fixed

    int n_flow = 0;
    int n_mech = 0;

    DiscreteModel(PolyMesh&& m, std::vector<MediaProperties> med, std::vector<int> cmedia,
                  std::vector<std::string> names, const FlowBC& fbc, const MechBC& mbc,
                  FluidConstants fl, FluxScheme sch)
        : mesh(std::move(m)),
          media(std::move(med)),
          cell_media(std::move(cmedia)),
          media_names(std::move(names)),
          fluid(fl),
          scheme(sch) {
        if (cell_media.size() != mesh.cells.size())
            throw std::invalid_argument("model: cell_media size mismatch");
        for (size_t i = 0; i < media.size(); ++i)
            media[i].validate(i < media_names.size() ? media_names[i] : std::to_string(i));
        n_flow = static_cast<int>(mesh.cells.size());
        n_mech = 3 * static_cast<int>(mesh.nodes.size());
        resolve_flow_bc(fbc);
        resolve_mech_bc(mbc);
        stencils = build_stencils(scheme, mesh, media, cell_media, flow_bc);
        divs.resize(mesh.cells.size());
        parallel_for(mesh.cells.size(), 256, [&](size_t b, size_t e) {
            for (size_t c = b; c < e; ++c) divs[c] = divergence_operator(mesh, static_cast<int>(c));
        });
        build_pattern();
    }

    int media_of(int cell) const { return cell_media[cell]; }
    double alpha_of(int cell) const { return media[cell_media[cell]].alpha; }

    // Assembles the coupled system for one backward Euler step. Deterministic
    // for any worker count: local contributions are computed in parallel per
    // cell, every matrix row is written by exactly one task, and entries
    // accumulate in ascending cell order.
    BlockSystem assemble(double dt, const Eigen::VectorXd& h_prev, const Eigen::VectorXd& u_prev,
                         const Eigen::VectorXd* source = nullptr) const {
        if (!(dt > 0.0)) throw std::invalid_argument("assemble: dt must be positive");
        if (h_prev.size() != n_flow || u_prev.size() != n_mech)
            throw std::invalid_argument("assemble: state size mismatch");
        BlockSystem sys;
        sys.n_flow = n_flow;
        sys.n_mech = n_mech;
        sys.A = pattern_;  // copies the symbolic structure, values stale
        std::fill(sys.A.vals.begin(), sys.A.vals.end(), 0.0);
        sys.b = Eigen::VectorXd::Zero(n_flow + n_mech);
        sys.b.tail(n_mech) = traction_load;

        const int nc = n_flow;
        SparseMatrix& A = sys.A;

        // flow rows: storage, fluxes, flow side of the coupling
        parallel_for(static_cast<size_t>(nc), 256, [&](size_t cb, size_t ce) {
            for (size_t cs = cb; cs < ce; ++cs) {
                int c = static_cast<int>(cs);
                const Cell& cell = mesh.cells[c];
                double stor = media[cell_media[c]].s_stor * cell.volume / dt;
                A.vals[A.slot(c, c)] += stor;
                double rhs = stor * h_prev[c];
                if (source) rhs += (*source)[c] * cell.volume;
                for (int fi : cell.faces) {
                    const Face& f = mesh.faces[fi];
                    const FaceStencil& s = stencils.face[fi];
                    double sign = f.cells[0] == c ? 1.0 : -1.0;
                    for (const auto& t : s.cells) A.vals[A.slot(c, t.cell)] += sign * t.coeff;
                    for (const auto& d : s.dirichlet) rhs -= sign * d.coeff * flow_bc[d.face].value;
                    rhs -= sign * s.constant;
                }
                const DivOperator& d = divs[c];
                double fs = alpha_of(c) / dt;
                double du_prev = 0.0;
                for (size_t k = 0; k < d.nodes.size(); ++k) {
                    for (int r = 0; r < 3; ++r) {
                        int col = n_flow + 3 * d.nodes[k] + r;
                        A.vals[A.slot(c, col)] += fs * d.coeff[k][r];
                        du_prev += d.coeff[k][r] * u_prev[3 * d.nodes[k] + r];
                    }
                }
                rhs += fs * du_prev;
                sys.b[c] += rhs;
            }
        });

        // mechanics rows, processed in cell blocks: parallel local stiffness,
        // then parallel row-owned scatter via node_cells
        const int block = 2048;
        std::vector<Eigen::MatrixXd> local(static_cast<size_t>(std::min(block, nc)));
        for (int cb = 0; cb < nc; cb += block) {
            int ce = std::min(cb + block, nc);
            parallel_for(static_cast<size_t>(ce - cb), 16, [&](size_t b, size_t e) {
                for (size_t k = b; k < e; ++k) {
                    int c = cb + static_cast<int>(k);
                    local[k] = vem_local_stiffness(mesh, c, media[cell_media[c]].stiffness).stiffness;
                }
            });
            parallel_for(mesh.nodes.size(), 512, [&](size_t nb, size_t ne) {
                for (size_t n = nb; n < ne; ++n) {
                    const auto& owners = mesh.node_cells[n];
                    auto it = std::lower_bound(owners.begin(), owners.end(), cb);
                    for (; it != owners.end() && *it < ce; ++it) {
                        int c = *it;
                        const Cell& cell = mesh.cells[c];
                        const Eigen::MatrixXd& Kl = local[*it - cb];
                        int li = static_cast<int>(
                            std::lower_bound(cell.nodes.begin(), cell.nodes.end(), static_cast<int>(n)) -
                            cell.nodes.begin());
                        const DivOperator& d = divs[c];
                        double ms = -alpha_of(c) * fluid.rho_g;
                        double rz = ms * mesh.cells[c].centroid[2];
                        const int ncn = static_cast<int>(cell.nodes.size());
                        for (int r = 0; r < 3; ++r) {
                            int row = n_flow + 3 * static_cast<int>(n) + r;
                            std::int64_t shift =
                                static_cast<std::int64_t>(r) * (A.offsets[row + 1] - A.offsets[row]);
                            A.vals[coup_slot_[node_base_[c] + li] + shift] += ms * d.coeff[li][r];
                            sys.b[row] += rz * d.coeff[li][r];
                            const std::int64_t* ps = &pair_slot_[pair_base_[c] + static_cast<std::int64_t>(li) * ncn];
                            for (int lj = 0; lj < ncn; ++lj) {
                                std::int64_t s0 = ps[lj] + shift;
                                for (int cc = 0; cc < 3; ++cc)
                                    A.vals[s0 + cc] += Kl(3 * li + r, 3 * lj + cc);
                            }
                        }
                    }
                }
            });
        }

        apply_constraints(sys);
        return sys;
    }

private:
    SparseMatrix pattern_;
    // precomputed value slots for the mechanics scatter, all taken at the
    // r=0 row of each node; rows r=1,2 share the pattern and shift by nnz(row)
    std::vector<std::int64_t> node_base_;  // per cell: offset into coup_slot_, size ncells+1
    std::vector<std::int64_t> pair_base_;  // per cell: offset into pair_slot_, size ncells+1
    std::vector<std::int64_t> coup_slot_;  // per (cell, local node i): slot of (row 3*n_i, col = cell)
    std::vector<std::int64_t> pair_slot_;  // per (cell, i, j): slot of (row 3*n_i, col 3*n_j)

    void resolve_flow_bc(const FlowBC& fbc) {
        flow_bc.assign(mesh.faces.size(), FlowBCEntry{});
        std::vector<std::string> uncovered;
        for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
            const Face& f = mesh.faces[fi];
            if (!f.boundary()) continue;
            if (f.btag < 0) throw std::runtime_error("flow bc: boundary face without tag");
            const std::string& region = media_names[cell_media[f.cells[0]]];
            const FlowBCEntry* pick = nullptr;
            for (const auto& q : fbc.qualified)
                if (q.tag == f.btag && q.region == region) pick = &q.entry;
            if (!pick && fbc.by_tag[f.btag]) pick = &*fbc.by_tag[f.btag];
            if (!pick && fbc.fallback) pick = &*fbc.fallback;
            if (!pick) {
                std::string t = tag_name(static_cast<BoundaryTag>(f.btag));
                if (std::find(uncovered.begin(), uncovered.end(), t) == uncovered.end()) uncovered.push_back(t);
                continue;
            }
            flow_bc[fi] = *pick;
        }
        if (!uncovered.empty()) {
            std::string msg = "flow bc: uncovered boundary tags:";
            for (const auto& t : uncovered) msg += " " + t;
            throw std::invalid_argument(msg);
        }
    }

    void resolve_mech_bc(const MechBC& mbc) {
        mech_face_bc.assign(mesh.faces.size(), MechBCEntry{});
        traction_load = Eigen::VectorXd::Zero(n_mech);
        dof_fixed.assign(n_mech, 0);
        dof_value = Eigen::VectorXd::Zero(n_mech);
        std::vector<std::string> uncovered;
        std::vector<size_t> rollers, fixeds;
        for (size_t fi = 0; fi < mesh.faces.size(); ++fi) {
            const Face& f = mesh.faces[fi];
            if (!f.boundary()) continue;
            const MechBCEntry* pick = nullptr;
            if (f.btag >= 0 && mbc.by_tag[f.btag]) pick = &*mbc.by_tag[f.btag];
            if (!pick && mbc.fallback) pick = &*mbc.fallback;
            if (!pick) {
                std::string t = f.btag >= 0 ? tag_name(static_cast<BoundaryTag>(f.btag)) : "untagged";
                if (std::find(uncovered.begin(), uncovered.end(), t) == uncovered.end()) uncovered.push_back(t);
                continue;
            }
            mech_face_bc[fi] = *pick;
            switch (pick->kind) {
                case MechBCKind::Traction: {
                    Vec3 load = pick->value * (f.area / static_cast<double>(f.nodes.size()));
                    for (int nn : f.nodes) traction_load.segment<3>(3 * nn) += load;
                    break;
                }
                case MechBCKind::Roller:
                    rollers.push_back(fi);
                    break;
                case MechBCKind::FixedDisplacement:
                    fixeds.push_back(fi);
                    break;
            }
        }
        if (!uncovered.empty()) {
            std::string msg = "mech bc: uncovered boundary tags:";
            for (const auto& t : uncovered) msg += " " + t;
            throw std::invalid_argument(msg);
        }
        for (size_t fi : rollers) {
            const Face& f = mesh.faces[fi];
            int axis = -1;
            for (int a = 0; a < 3; ++a)
                if (std::abs(std::abs(f.normal[a]) - 1.0) < 1e-8) axis = a;
            if (axis < 0)
                throw std::invalid_argument("mech bc: roller on non-axis-aligned face " + std::to_string(fi));
            for (int nn : f.nodes) {
                dof_fixed[3 * nn + axis] = 1;
                dof_value[3 * nn + axis] = 0.0;
            }
        }
        // fixed displacement wins over roller at shared nodes
        for (size_t fi : fixeds) {
            const Face& f = mesh.faces[fi];
            for (int nn : f.nodes)
                for (int a = 0; a < 3; ++a) {
                    dof_fixed[3 * nn + a] = 1;
                    dof_value[3 * nn + a] = mech_face_bc[fi].value[a];
                }
        }
    }

    void build_pattern() {
        const int nc = n_flow;
        const int nn = static_cast<int>(mesh.nodes.size());
        std::vector<std::vector<int>> rows(nc + 3 * nn);
        parallel_for(static_cast<size_t>(nc), 256, [&](size_t cb, size_t ce) {
            for (size_t cs = cb; cs < ce; ++cs) {
                int c = static_cast<int>(cs);
                std::vector<int>& row = rows[c];
                row.push_back(c);
                for (int fi : mesh.cells[c].faces)
                    for (const auto& t : stencils.face[fi].cells) row.push_back(t.cell);
                for (int node : mesh.cells[c].nodes)
                    for (int r = 0; r < 3; ++r) row.push_back(nc + 3 * node + r);
                std::sort(row.begin(), row.end());
                row.erase(std::unique(row.begin(), row.end()), row.end());
            }
        });
        parallel_for(static_cast<size_t>(nn), 256, [&](size_t nb, size_t ne) {
            for (size_t n = nb; n < ne; ++n) {
                std::vector<int> nbrs;  // node neighbours incl. self
                for (int c : mesh.node_cells[n])
                    nbrs.insert(nbrs.end(), mesh.cells[c].nodes.begin(), mesh.cells[c].nodes.end());
                std::sort(nbrs.begin(), nbrs.end());
                nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
                std::vector<int>& row = rows[nc + 3 * n];
                row.reserve(mesh.node_cells[n].size() + 3 * nbrs.size());
                for (int c : mesh.node_cells[n]) row.push_back(c);
                for (int j : nbrs)
                    for (int r = 0; r < 3; ++r) row.push_back(nc + 3 * j + r);
                rows[nc + 3 * n + 1] = row;
                rows[nc + 3 * n + 2] = row;
            }
        });
        pattern_ = SparseMatrix::from_pattern(nc + 3 * nn, nc + 3 * nn, rows);

        node_base_.assign(nc + 1, 0);
        pair_base_.assign(nc + 1, 0);
        for (int c = 0; c < nc; ++c) {
            std::int64_t k = static_cast<std::int64_t>(mesh.cells[c].nodes.size());
            node_base_[c + 1] = node_base_[c] + k;
            pair_base_[c + 1] = pair_base_[c] + k * k;
        }
        coup_slot_.assign(static_cast<size_t>(node_base_[nc]), 0);
        pair_slot_.assign(static_cast<size_t>(pair_base_[nc]), 0);
        parallel_for(static_cast<size_t>(nc), 256, [&](size_t cb, size_t ce) {
            for (size_t cs = cb; cs < ce; ++cs) {
                int c = static_cast<int>(cs);
                const Cell& cell = mesh.cells[c];
                const int ncn = static_cast<int>(cell.nodes.size());
                for (int i = 0; i < ncn; ++i) {
                    int row = nc + 3 * cell.nodes[i];
                    coup_slot_[node_base_[c] + i] = pattern_.slot(row, c);
                    for (int j = 0; j < ncn; ++j)
                        pair_slot_[pair_base_[c] + static_cast<std::int64_t>(i) * ncn + j] =
                            pattern_.slot(row, nc + 3 * cell.nodes[j]);
                }
            }
        });
    }

    // symmetric elimination of fixed displacement dofs: prescribed values
    // move to the rhs, constrained rows become scale*identity
    void apply_constraints(BlockSystem& sys) const {
        SparseMatrix& A = sys.A;
        const int N = n_flow + n_mech;
        parallel_for(static_cast<size_t>(N), 512, [&](size_t rb, size_t re) {
            for (size_t rs = rb; rs < re; ++rs) {
                int r = static_cast<int>(rs);
                bool row_fixed = r >= n_flow && dof_fixed[r - n_flow];
                if (row_fixed) {
                    double scale = 0.0;
                    for (std::int64_t k = A.offsets[r]; k < A.offsets[r + 1]; ++k) {
                        if (A.cols[k] == r) scale = A.vals[k];
                        A.vals[k] = 0.0;
                    }
                    if (scale == 0.0) scale = 1.0;
                    A.vals[A.slot(r, r)] = scale;
                    sys.b[r] = scale * dof_value[r - n_flow];
                } else {
                    for (std::int64_t k = A.offsets[r]; k < A.offsets[r + 1]; ++k) {
                        int c = A.cols[k];
                        if (c >= n_flow && dof_fixed[c - n_flow]) {
                            sys.b[r] -= A.vals[k] * dof_value[c - n_flow];
                            A.vals[k] = 0.0;
                        }
                    }
                }
            }
        });
    }
};

} // namespace poro

#endif
