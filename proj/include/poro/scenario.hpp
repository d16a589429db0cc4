#ifndef PORO_SCENARIO_HPP
#define PORO_SCENARIO_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesh.hpp"
#include "model.hpp"
#include "physics.hpp"
#include "strategies.hpp"

namespace poro {

struct MeshSpec {
    Box box{0, 1, 0, 1, 0, 1};
    int nx = 1, ny = 1, nz = 1;
    std::vector<double> z_planes;  // optional non-uniform z levels, size nz+1
    double perturb = 0.0;
    std::uint64_t seed = 1;
    FluxScheme scheme = FluxScheme::TPFA;
};

// Media entry as written in the scenario file; stiffness is derived from E
// and nu when the model is built.
struct MediaSpec {
    std::string name;
    Eigen::Matrix3d K = Eigen::Matrix3d::Identity();
    double s_stor = 0.0;
    double E = 0.0;
    double nu = 0.0;
    double alpha = 1.0;
};

// Region rules are applied in declaration order; later rules override.
struct RegionRule {
    enum Kind { Default, BoxRule, SlabRule } kind = Default;
    std::string media;
    Box box{0, 0, 0, 0, 0, 0};
    Vec3 center = Vec3::Zero();   // slab midplane point
    Vec3 normal = Vec3::UnitZ();  // slab midplane normal
    double half_thickness = 0.0;
};

struct Scenario {
    std::string name = "scenario";
    MeshSpec mesh;
    std::vector<MediaSpec> media;
    std::vector<RegionRule> regions;
    FlowBC flow_bc;
    MechBC mech_bc;
    double initial_head = 0.0;
    double total_time = 0.0;
    int steps = 1;
    Strategy strategy = Strategy::Monolithic;
    SolverConfig solver;
    SplitConfig split;
    FluidConstants fluid;
};

namespace detail {

inline int tag_from_string(const std::string& s) {
    static const char* names[6] = {"x-", "x+", "y-", "y+", "z-", "z+"};
    for (int t = 0; t < 6; ++t)
        if (s == names[t]) return t;
    return -1;
}

struct LineError : std::runtime_error {
    LineError(int line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what) {}
};

inline std::vector<std::string> tokens(const std::string& s) {
    std::istringstream is(s);
    std::vector<std::string> out;
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

inline double num(const std::string& s, int line) {
    try {
        size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw LineError(line, "not a number: " + s);
    }
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline Scenario load_scenario(const std::string& text) {
    Scenario sc;
    std::istringstream in(text);
    std::string raw;
    int ln = 0;
    std::string section;
    MediaSpec* cur_media = nullptr;
    bool have_mesh = false, have_time = false, have_regions = false;
    bool have_bc_flow = false, have_bc_mech = false;

    while (std::getline(in, raw)) {
        ++ln;
        std::string line = raw.substr(0, raw.find('#'));
        auto toks = detail::tokens(line);
        if (toks.empty()) continue;
        if (toks[0].front() == '[') {
            std::string joined;
            for (const auto& t : toks) joined += (joined.empty() ? "" : " ") + t;
            if (joined.back() != ']') throw detail::LineError(ln, "unterminated section header");
            section = joined.substr(1, joined.size() - 2);
            cur_media = nullptr;
            if (section.rfind("media ", 0) == 0) {
                std::string name = section.substr(6);
                for (const auto& m : sc.media)
                    if (m.name == name) throw detail::LineError(ln, "duplicate media " + name);
                sc.media.push_back(MediaSpec{});
                sc.media.back().name = name;
                cur_media = &sc.media.back();
                section = "media";
            } else if (section == "mesh") {
                have_mesh = true;
            } else if (section == "regions") {
                have_regions = true;
            } else if (section == "bc.flow") {
                have_bc_flow = true;
            } else if (section == "bc.mech") {
                have_bc_mech = true;
            } else if (section == "time") {
                have_time = true;
            } else if (section != "solver" && section != "split" && section != "fluid" &&
                       section != "scenario") {
                throw detail::LineError(ln, "unknown section [" + section + "]");
            }
            continue;
        }
        auto eq = std::find(toks.begin(), toks.end(), "=");
        if (eq == toks.end() || eq == toks.begin())
            throw detail::LineError(ln, "expected key = value");
        std::string key = toks[0];
        std::vector<std::string> vals(eq + 1, toks.end());
        auto need = [&](size_t n) {
            if (vals.size() != n)
                throw detail::LineError(ln, "key " + key + " expects " + std::to_string(n) + " values");
        };
        auto one = [&]() {
            need(1);
            return detail::num(vals[0], ln);
        };

        if (section == "scenario") {
            if (key == "name") {
                need(1);
                sc.name = vals[0];
            } else
                throw detail::LineError(ln, "unknown key " + key + " in [scenario]");
        } else if (section == "mesh") {
            if (key == "box") {
                need(6);
                sc.mesh.box = {detail::num(vals[0], ln), detail::num(vals[3], ln),
                               detail::num(vals[1], ln), detail::num(vals[4], ln),
                               detail::num(vals[2], ln), detail::num(vals[5], ln)};
            } else if (key == "cells") {
                need(3);
                sc.mesh.nx = static_cast<int>(detail::num(vals[0], ln));
                sc.mesh.ny = static_cast<int>(detail::num(vals[1], ln));
                sc.mesh.nz = static_cast<int>(detail::num(vals[2], ln));
            } else if (key == "z_planes") {
                sc.mesh.z_planes.clear();
                for (const auto& v : vals) sc.mesh.z_planes.push_back(detail::num(v, ln));
            } else if (key == "perturb") {
                if (vals.size() < 1 || vals.size() > 2)
                    throw detail::LineError(ln, "perturb expects amplitude [seed]");
                sc.mesh.perturb = detail::num(vals[0], ln);
                if (vals.size() == 2)
                    sc.mesh.seed = static_cast<std::uint64_t>(detail::num(vals[1], ln));
            } else if (key == "flux") {
                need(1);
                if (vals[0] == "tpfa")
                    sc.mesh.scheme = FluxScheme::TPFA;
                else if (vals[0] == "mpfa-o")
                    sc.mesh.scheme = FluxScheme::MPFA_O;
                else
                    throw detail::LineError(ln, "unknown flux scheme " + vals[0]);
            } else
                throw detail::LineError(ln, "unknown key " + key + " in [mesh]");
        } else if (section == "media") {
            if (key == "k") {
                if (vals.size() == 1) {
                    cur_media->K = detail::num(vals[0], ln) * Eigen::Matrix3d::Identity();
                } else if (vals.size() == 3) {
                    cur_media->K = Eigen::Vector3d(detail::num(vals[0], ln), detail::num(vals[1], ln),
                                                   detail::num(vals[2], ln))
                                       .asDiagonal();
                } else if (vals.size() == 9) {
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            cur_media->K(i, j) = detail::num(vals[3 * i + j], ln);
                } else
                    throw detail::LineError(ln, "k expects 1, 3 or 9 values");
            } else if (key == "s_stor")
                cur_media->s_stor = one();
            else if (key == "e")
                cur_media->E = one();
            else if (key == "nu")
                cur_media->nu = one();
            else if (key == "alpha")
                cur_media->alpha = one();
            else
                throw detail::LineError(ln, "unknown key " + key + " in [media]");
        } else if (section == "regions") {
            RegionRule r;
            r.kind = key == "default" ? RegionRule::Default
                     : key == "box"   ? RegionRule::BoxRule
                     : key == "slab"  ? RegionRule::SlabRule
                                      : throw detail::LineError(ln, "unknown region rule " + key);
            if (vals.empty()) throw detail::LineError(ln, "region rule needs a media name");
            r.media = vals[0];
            if (r.kind == RegionRule::BoxRule) {
                if (vals.size() != 7) throw detail::LineError(ln, "box rule expects media + 6 numbers");
                r.box = {detail::num(vals[1], ln), detail::num(vals[4], ln),
                         detail::num(vals[2], ln), detail::num(vals[5], ln),
                         detail::num(vals[3], ln), detail::num(vals[6], ln)};
            } else if (r.kind == RegionRule::SlabRule) {
                if (vals.size() != 8) throw detail::LineError(ln, "slab rule expects media + 7 numbers");
                for (int i = 0; i < 3; ++i) r.center[i] = detail::num(vals[1 + i], ln);
                for (int i = 0; i < 3; ++i) r.normal[i] = detail::num(vals[4 + i], ln);
                r.half_thickness = detail::num(vals[7], ln);
            } else if (vals.size() != 1)
                throw detail::LineError(ln, "default rule expects only a media name");
            sc.regions.push_back(r);
        } else if (section == "bc.flow") {
            if (vals.empty() || vals.size() > 2) throw detail::LineError(ln, "flow bc expects kind [value]");
            FlowBCEntry e;
            if (vals[0] == "head") {
                e.kind = FlowBCKind::FixedHead;
                e.value = detail::num(vals.at(1), ln);
            } else if (vals[0] == "flux") {
                e.kind = FlowBCKind::NormalFlux;
                e.value = detail::num(vals.at(1), ln);
            } else
                throw detail::LineError(ln, "unknown flow bc kind " + vals[0]);
            auto at = key.find('@');
            if (at != std::string::npos) {
                int tag = detail::tag_from_string(key.substr(0, at));
                if (tag < 0) throw detail::LineError(ln, "unknown boundary tag " + key.substr(0, at));
                sc.flow_bc.qualified.push_back({tag, key.substr(at + 1), e});
            } else if (key == "default") {
                sc.flow_bc.fallback = e;
            } else {
                int tag = detail::tag_from_string(key);
                if (tag < 0) throw detail::LineError(ln, "unknown boundary tag " + key);
                sc.flow_bc.by_tag[tag] = e;
            }
        } else if (section == "bc.mech") {
            MechBCEntry e;
            if (vals[0] == "roller") {
                if (vals.size() != 1) throw detail::LineError(ln, "roller takes no values");
                e.kind = MechBCKind::Roller;
            } else if (vals[0] == "traction" || vals[0] == "fixed") {
                if (vals.size() != 4)
                    throw detail::LineError(ln, vals[0] + " expects 3 components");
                e.kind = vals[0] == "traction" ? MechBCKind::Traction : MechBCKind::FixedDisplacement;
                for (int i = 0; i < 3; ++i) e.value[i] = detail::num(vals[1 + i], ln);
            } else
                throw detail::LineError(ln, "unknown mech bc kind " + vals[0]);
            if (key == "default") {
                sc.mech_bc.fallback = e;
            } else {
                int tag = detail::tag_from_string(key);
                if (tag < 0) throw detail::LineError(ln, "unknown boundary tag " + key);
                sc.mech_bc.by_tag[tag] = e;
            }
        } else if (section == "time") {
            if (key == "total")
                sc.total_time = one();
            else if (key == "steps")
                sc.steps = static_cast<int>(one());
            else if (key == "initial_head")
                sc.initial_head = one();
            else
                throw detail::LineError(ln, "unknown key " + key + " in [time]");
        } else if (section == "solver") {
            if (key == "rel_tol")
                sc.solver.rel_tol = one();
            else if (key == "abs_tol")
                sc.solver.abs_tol = one();
            else if (key == "max_iters")
                sc.solver.max_iters = static_cast<int>(one());
            else if (key == "drop_tol")
                sc.solver.drop_tol = one();
            else if (key == "max_fill")
                sc.solver.max_fill = static_cast<int>(one());
            else if (key == "strategy") {
                need(1);
                if (vals[0] == "monolithic")
                    sc.strategy = Strategy::Monolithic;
                else if (vals[0] == "fixed-strain")
                    sc.strategy = Strategy::FixedStrain;
                else
                    throw detail::LineError(ln, "unknown strategy " + vals[0]);
            } else
                throw detail::LineError(ln, "unknown key " + key + " in [solver]");
        } else if (section == "split") {
            if (key == "eps_abs")
                sc.split.eps_abs = one();
            else if (key == "eps_rel")
                sc.split.eps_rel = one();
            else if (key == "max_iters")
                sc.split.max_split_iters = static_cast<int>(one());
            else
                throw detail::LineError(ln, "unknown key " + key + " in [split]");
        } else if (section == "fluid") {
            if (key == "rho_g")
                sc.fluid.rho_g = one();
            else
                throw detail::LineError(ln, "unknown key " + key + " in [fluid]");
        } else {
            throw detail::LineError(ln, "key outside any section");
        }
    }

    if (!have_mesh) throw std::runtime_error("scenario: missing [mesh] section");
    if (sc.media.empty()) throw std::runtime_error("scenario: no media defined");
    if (!have_regions) throw std::runtime_error("scenario: missing [regions] section");
    if (!have_bc_flow) throw std::runtime_error("scenario: missing [bc.flow] section");
    if (!have_bc_mech) throw std::runtime_error("scenario: missing [bc.mech] section");
    if (!have_time) throw std::runtime_error("scenario: missing [time] section");
    if (sc.steps < 1) throw std::runtime_error("scenario: steps must be >= 1");
    if (!(sc.total_time > 0.0)) throw std::runtime_error("scenario: total time must be positive");
    for (const auto& r : sc.regions) {
        bool found = false;
        for (const auto& m : sc.media) found = found || m.name == r.media;
        if (!found) throw std::runtime_error("scenario: region references unknown media " + r.media);
    }
    for (const auto& q : sc.flow_bc.qualified) {
        bool found = false;
        for (const auto& m : sc.media) found = found || m.name == q.region;
        if (!found) throw std::runtime_error("scenario: flow bc references unknown media " + q.region);
    }
    // explicit per-tag coverage so mistakes fail at load, not mid-run
    if (!sc.flow_bc.fallback)
        for (int t = 0; t < 6; ++t)
            if (!sc.flow_bc.by_tag[t])
                throw std::runtime_error(std::string("scenario: flow bc missing for tag ") +
                                         tag_name(t));
    if (!sc.mech_bc.fallback)
        for (int t = 0; t < 6; ++t)
            if (!sc.mech_bc.by_tag[t])
                throw std::runtime_error(std::string("scenario: mech bc missing for tag ") +
                                         tag_name(t));
    return sc;
}

inline Scenario load_scenario_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open scenario file " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return load_scenario(ss.str());
}

inline std::string render(const Scenario& sc) {
    using detail::fmt;
    std::ostringstream os;
    os << "[scenario]\nname = " << sc.name << "\n\n[mesh]\n";
    os << "box = " << fmt(sc.mesh.box.x0) << " " << fmt(sc.mesh.box.y0) << " " << fmt(sc.mesh.box.z0)
       << " " << fmt(sc.mesh.box.x1) << " " << fmt(sc.mesh.box.y1) << " " << fmt(sc.mesh.box.z1)
       << "\n";
    os << "cells = " << sc.mesh.nx << " " << sc.mesh.ny << " " << sc.mesh.nz << "\n";
    if (!sc.mesh.z_planes.empty()) {
        os << "z_planes =";
        for (double z : sc.mesh.z_planes) os << " " << fmt(z);
        os << "\n";
    }
    if (sc.mesh.perturb > 0.0)
        os << "perturb = " << fmt(sc.mesh.perturb) << " " << sc.mesh.seed << "\n";
    os << "flux = " << scheme_name(sc.mesh.scheme) << "\n";
    for (const auto& m : sc.media) {
        os << "\n[media " << m.name << "]\n";
        os << "k =";
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) os << " " << fmt(m.K(i, j));
        os << "\n";
        os << "s_stor = " << fmt(m.s_stor) << "\n";
        os << "e = " << fmt(m.E) << "\n";
        os << "nu = " << fmt(m.nu) << "\n";
        os << "alpha = " << fmt(m.alpha) << "\n";
    }
    os << "\n[regions]\n";
    for (const auto& r : sc.regions) {
        if (r.kind == RegionRule::Default) {
            os << "default = " << r.media << "\n";
        } else if (r.kind == RegionRule::BoxRule) {
            os << "box = " << r.media << " " << fmt(r.box.x0) << " " << fmt(r.box.y0) << " "
               << fmt(r.box.z0) << " " << fmt(r.box.x1) << " " << fmt(r.box.y1) << " "
               << fmt(r.box.z1) << "\n";
        } else {
            os << "slab = " << r.media;
            for (int i = 0; i < 3; ++i) os << " " << fmt(r.center[i]);
            for (int i = 0; i < 3; ++i) os << " " << fmt(r.normal[i]);
            os << " " << fmt(r.half_thickness) << "\n";
        }
    }
    auto flow_entry = [&](const FlowBCEntry& e) {
        return std::string(e.kind == FlowBCKind::FixedHead ? "head " : "flux ") + fmt(e.value);
    };
    os << "\n[bc.flow]\n";
    for (int t = 0; t < 6; ++t)
        if (sc.flow_bc.by_tag[t]) os << tag_name(t) << " = " << flow_entry(*sc.flow_bc.by_tag[t]) << "\n";
    for (const auto& q : sc.flow_bc.qualified)
        os << tag_name(q.tag) << "@" << q.region << " = " << flow_entry(q.entry) << "\n";
    if (sc.flow_bc.fallback) os << "default = " << flow_entry(*sc.flow_bc.fallback) << "\n";
    auto mech_entry = [&](const MechBCEntry& e) {
        if (e.kind == MechBCKind::Roller) return std::string("roller");
        std::string s = e.kind == MechBCKind::Traction ? "traction" : "fixed";
        for (int i = 0; i < 3; ++i) s += " " + fmt(e.value[i]);
        return s;
    };
    os << "\n[bc.mech]\n";
    for (int t = 0; t < 6; ++t)
        if (sc.mech_bc.by_tag[t]) os << tag_name(t) << " = " << mech_entry(*sc.mech_bc.by_tag[t]) << "\n";
    if (sc.mech_bc.fallback) os << "default = " << mech_entry(*sc.mech_bc.fallback) << "\n";
    os << "\n[time]\n";
    os << "total = " << fmt(sc.total_time) << "\n";
    os << "steps = " << sc.steps << "\n";
    os << "initial_head = " << fmt(sc.initial_head) << "\n";
    os << "\n[solver]\n";
    os << "rel_tol = " << fmt(sc.solver.rel_tol) << "\n";
    os << "abs_tol = " << fmt(sc.solver.abs_tol) << "\n";
    os << "max_iters = " << sc.solver.max_iters << "\n";
    os << "drop_tol = " << fmt(sc.solver.drop_tol) << "\n";
    os << "max_fill = " << sc.solver.max_fill << "\n";
    os << "strategy = " << strategy_name(sc.strategy) << "\n";
    os << "\n[split]\n";
    os << "eps_abs = " << fmt(sc.split.eps_abs) << "\n";
    os << "eps_rel = " << fmt(sc.split.eps_rel) << "\n";
    os << "max_iters = " << sc.split.max_split_iters << "\n";
    os << "\n[fluid]\n";
    os << "rho_g = " << fmt(sc.fluid.rho_g) << "\n";
    return os.str();
}

inline PolyMesh build_scenario_mesh(const MeshSpec& ms) {
    PolyMesh m;
    if (!ms.z_planes.empty()) {
        if (static_cast<int>(ms.z_planes.size()) != ms.nz + 1)
            throw std::runtime_error("mesh: z_planes must list nz+1 values");
        for (size_t i = 1; i < ms.z_planes.size(); ++i)
            if (!(ms.z_planes[i] > ms.z_planes[i - 1]))
                throw std::runtime_error("mesh: z_planes must be strictly increasing");
        Box b = ms.box;
        b.z0 = 0.0;
        b.z1 = static_cast<double>(ms.nz);
        m = build_structured_hex(ms.nx, ms.ny, ms.nz, b);
        for (auto& x : m.nodes) {
            int k = static_cast<int>(std::lround(x[2]));
            x[2] = ms.z_planes[k];
        }
        detail::finalize(m);
    } else {
        m = build_structured_hex(ms.nx, ms.ny, ms.nz, ms.box);
    }
    if (ms.perturb > 0.0) m = perturb_nodes(m, ms.perturb, ms.seed);
    validate_mesh(m);
    return m;
}

// Applies region rules in order to every cell centroid; every cell must end
// up assigned.
inline std::vector<int> assign_regions(const Scenario& sc, const PolyMesh& m) {
    std::map<std::string, int> index;
    for (size_t i = 0; i < sc.media.size(); ++i) index[sc.media[i].name] = static_cast<int>(i);
    std::vector<int> cm(m.cells.size(), -1);
    for (const auto& r : sc.regions) {
        int mi = index.at(r.media);
        for (size_t c = 0; c < m.cells.size(); ++c) {
            const Vec3& x = m.cells[c].centroid;
            bool in = false;
            switch (r.kind) {
                case RegionRule::Default:
                    in = true;
                    break;
                case RegionRule::BoxRule:
                    in = x[0] >= r.box.x0 && x[0] <= r.box.x1 && x[1] >= r.box.y0 &&
                         x[1] <= r.box.y1 && x[2] >= r.box.z0 && x[2] <= r.box.z1;
                    break;
                case RegionRule::SlabRule:
                    in = std::abs((x - r.center).dot(r.normal.normalized())) <= r.half_thickness;
                    break;
            }
            if (in) cm[c] = mi;
        }
    }
    for (size_t c = 0; c < cm.size(); ++c)
        if (cm[c] < 0)
            throw std::runtime_error("regions: cell " + std::to_string(c) + " not covered by any rule");
    return cm;
}

inline DiscreteModel build_model(const Scenario& sc) {
    PolyMesh m = build_scenario_mesh(sc.mesh);
    std::vector<int> cm = assign_regions(sc, m);
    std::vector<MediaProperties> media;
    std::vector<std::string> names;
    for (size_t i = 0; i < sc.media.size(); ++i) {
        const MediaSpec& ms = sc.media[i];
        MediaProperties p;
        p.K = ms.K;
        p.s_stor = ms.s_stor;
        p.stiffness = stiffness_from_E_nu(ms.E, ms.nu);
        p.alpha = ms.alpha;
        p.region_id = static_cast<int>(i);
        media.push_back(p);
        names.push_back(ms.name);
    }
    return DiscreteModel(std::move(m), std::move(media), std::move(cm), std::move(names), sc.flow_bc,
                         sc.mech_bc, sc.fluid, sc.mesh.scheme);
}

inline SimState initial_state(const Scenario& sc, const DiscreteModel& model) {
    SimState st;
    st.h = Eigen::VectorXd::Constant(model.n_flow, sc.initial_head);
    st.u = Eigen::VectorXd::Zero(model.n_mech);
    st.time = 0.0;
    return st;
}

inline RunConfig run_config(const Scenario& sc) {
    RunConfig rc;
    rc.total_time = sc.total_time;
    rc.steps = sc.steps;
    rc.strategy = sc.strategy;
    rc.solver = sc.solver;
    rc.split = sc.split;
    return rc;
}

// Three-layer cube with a dipping fault slab, driven by a fixed high head
// where the aquifer meets the x- boundary. resolution = cells per axis; the
// z grid is graded so layer interfaces at 400 m and 500 m fall on mesh
// planes.
inline Scenario builtin_problem_a(int resolution) {
    if (resolution < 6) throw std::invalid_argument("problem_a: resolution must be >= 6");
    Scenario sc;
    sc.name = "problem_a";
    sc.mesh.box = {0, 900, 0, 900, 0, 900};
    sc.mesh.nx = sc.mesh.ny = sc.mesh.nz = resolution;
    int nb = std::max(1, static_cast<int>(std::lround(resolution * 400.0 / 900.0)));
    int na = std::max(1, static_cast<int>(std::lround(resolution * 100.0 / 900.0)));
    int nt = resolution - nb - na;
    if (nt < 1) {
        nb -= 1 - nt;
        nt = 1;
    }
    sc.mesh.z_planes.clear();
    for (int k = 0; k <= nb; ++k) sc.mesh.z_planes.push_back(400.0 * k / nb);
    for (int k = 1; k <= na; ++k) sc.mesh.z_planes.push_back(400.0 + 100.0 * k / na);
    for (int k = 1; k <= nt; ++k) sc.mesh.z_planes.push_back(500.0 + 400.0 * k / nt);
    sc.mesh.scheme = FluxScheme::TPFA;

    MediaSpec fill{"fill", 2e-13 * Eigen::Matrix3d::Identity(), 8.46603e-7, 2.94e10, 0.12, 1.0};
    MediaSpec aquifer{"aquifer", 1.5e-10 * Eigen::Matrix3d::Identity(), 8.20116e-7, 1.44e10, 0.2, 1.0};
    MediaSpec fault{"fault", 1.5e-9 * Eigen::Matrix3d::Identity(), 1.92276e-6, 1.44e10, 0.2, 1.0};
    sc.media = {fill, aquifer, fault};

    RegionRule rd;
    rd.kind = RegionRule::Default;
    rd.media = "fill";
    RegionRule ra;
    ra.kind = RegionRule::BoxRule;
    ra.media = "aquifer";
    ra.box = {0, 900, 0, 900, 400, 500};
    RegionRule rf;
    rf.kind = RegionRule::SlabRule;
    rf.media = "fault";
    rf.center = Vec3(450, 450, 450);
    double dip = 80.0 * M_PI / 180.0;
    rf.normal = Vec3(std::sin(dip), 0.0, std::cos(dip));
    rf.half_thickness = 25.0;
    sc.regions = {rd, ra, rf};

    sc.flow_bc.by_tag[TagZPlus] = FlowBCEntry{FlowBCKind::FixedHead, 305.81};
    sc.flow_bc.qualified.push_back({TagXMinus, "aquifer", FlowBCEntry{FlowBCKind::FixedHead, 10193.7}});
    sc.flow_bc.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    sc.mech_bc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    sc.mech_bc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};

    sc.initial_head = 305.81;
    sc.total_time = 4e9;
    sc.steps = 4;
    return sc;
}

// Layered box analog of the paper's second problem: 9 horizontal layers with
// log-spaced conductivity and storage, uniform elasticity, injection into the
// most permeable layer on one side.
inline Scenario builtin_problem_b_analog(int resolution) {
    if (resolution < 9) throw std::invalid_argument("problem_b_analog: resolution must be >= 9");
    Scenario sc;
    sc.name = "problem_b_analog";
    sc.mesh.box = {0, 2000, 0, 2000, 0, 900};
    sc.mesh.nx = sc.mesh.ny = sc.mesh.nz = resolution;
    sc.mesh.scheme = FluxScheme::TPFA;
    RegionRule rd;
    rd.kind = RegionRule::Default;
    rd.media = "layer0";
    sc.regions.push_back(rd);
    for (int i = 0; i < 9; ++i) {
        MediaSpec ms;
        ms.name = "layer" + std::to_string(i);
        double k = 1.2e-12 * std::pow(2e-5 / 1.2e-12, i / 8.0);
        ms.K = Eigen::Vector3d(k, k, k / 10.0).asDiagonal();
        ms.s_stor = 1e-6 * std::pow(10.0, i / 8.0);
        ms.E = 1e10;
        ms.nu = 0.2;
        ms.alpha = 1.0;
        sc.media.push_back(ms);
        if (i > 0) {
            RegionRule r;
            r.kind = RegionRule::BoxRule;
            r.media = ms.name;
            r.box = {0, 2000, 0, 2000, 100.0 * i, 100.0 * (i + 1)};
            sc.regions.push_back(r);
        }
    }
    sc.flow_bc.qualified.push_back({TagXMinus, "layer8", FlowBCEntry{FlowBCKind::FixedHead, 1000.0}});
    sc.flow_bc.by_tag[TagXPlus] = FlowBCEntry{FlowBCKind::FixedHead, 100.0};
    sc.flow_bc.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    sc.mech_bc.by_tag[TagZMinus] = MechBCEntry{MechBCKind::FixedDisplacement, Vec3::Zero()};
    sc.mech_bc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3::Zero()};
    sc.mech_bc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    sc.initial_head = 100.0;
    sc.total_time = 2e8;
    sc.steps = 4;
    return sc;
}

// One-dimensional consolidation column in scaled units: unit consolidation
// coefficient, instant surface load, drained at the top. Dimensionless time
// T_v equals physical time.
inline Scenario builtin_terzaghi(int n_layers) {
    if (n_layers < 20) throw std::invalid_argument("terzaghi: n_layers must be >= 20");
    Scenario sc;
    sc.name = "terzaghi";
    sc.mesh.box = {0, 1, 0, 1, 0, 1};
    sc.mesh.nx = sc.mesh.ny = 1;
    sc.mesh.nz = n_layers;
    sc.mesh.scheme = FluxScheme::TPFA;
    MediaSpec soil;
    soil.name = "soil";
    // c = K / (s_stor + alpha^2 rho_g / M) = 1.1 / (0.1 + 1) = 1
    soil.K = 1.1 * Eigen::Matrix3d::Identity();
    soil.s_stor = 0.1;
    soil.E = 1.0;
    soil.nu = 0.0;
    soil.alpha = 1.0;
    sc.media = {soil};
    RegionRule rd;
    rd.kind = RegionRule::Default;
    rd.media = "soil";
    sc.regions = {rd};
    sc.flow_bc.by_tag[TagZPlus] = FlowBCEntry{FlowBCKind::FixedHead, 0.0};
    sc.flow_bc.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    sc.mech_bc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3(0, 0, -1e4)};
    sc.mech_bc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    sc.initial_head = 0.0;
    sc.total_time = 1.0;
    sc.steps = 40;
    sc.fluid.rho_g = 1.0;
    return sc;
}

// Stress test for the splitting strategy: storage so small that the
// coupling dominates and fixed-strain cannot contract within the iteration
// budget, while the monolithic solve remains well posed.
inline Scenario builtin_stress_split() {
    Scenario sc;
    sc.name = "stress_split";
    sc.mesh.box = {0, 10, 0, 10, 0, 10};
    sc.mesh.nx = sc.mesh.ny = sc.mesh.nz = 4;
    sc.mesh.scheme = FluxScheme::TPFA;
    MediaSpec ms;
    ms.name = "gel";
    ms.K = 1e-10 * Eigen::Matrix3d::Identity();
    ms.s_stor = 1e-10;
    ms.E = 1e6;
    ms.nu = 0.2;
    ms.alpha = 1.0;
    sc.media = {ms};
    RegionRule rd;
    rd.kind = RegionRule::Default;
    rd.media = "gel";
    sc.regions = {rd};
    sc.flow_bc.by_tag[TagZPlus] = FlowBCEntry{FlowBCKind::FixedHead, 0.0};
    sc.flow_bc.fallback = FlowBCEntry{FlowBCKind::NormalFlux, 0.0};
    sc.mech_bc.by_tag[TagZPlus] = MechBCEntry{MechBCKind::Traction, Vec3(0, 0, -1e5)};
    sc.mech_bc.fallback = MechBCEntry{MechBCKind::Roller, Vec3::Zero()};
    sc.initial_head = 0.0;
    sc.total_time = 1e8;
    sc.steps = 1;
    sc.strategy = Strategy::FixedStrain;
    return sc;
}

// Resolves builtin:<name> identifiers used by the CLI.
inline Scenario builtin_scenario(const std::string& name) {
    if (name == "problem_a" || name == "problem_a_coarse") return builtin_problem_a(12);
    if (name == "problem_b_analog") return builtin_problem_b_analog(9);
    if (name == "terzaghi") return builtin_terzaghi(40);
    if (name == "stress_split") return builtin_stress_split();
    throw std::runtime_error("unknown builtin scenario " + name +
                             " (known: problem_a, problem_b_analog, terzaghi, stress_split)");
}

} // namespace poro

#endif
