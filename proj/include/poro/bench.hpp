#ifndef PORO_BENCH_HPP
#define PORO_BENCH_HPP

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "model.hpp"
#include "scenario.hpp"
#include "strategies.hpp"
#include "threading.hpp"
#include "vem_mech.hpp"

namespace poro {

struct TimingRow {
    int n_threads = 1;
    double t_total = 0.0;
    double t_assemble = 0.0;
    double t_precond = 0.0;
    double t_iter = 0.0;
    long lin_iters = 0;
    std::vector<int> split_iters;  // per time step
    bool converged = true;
};

struct TimingReport {
    std::string scenario_id;
    std::string strategy_id;
    std::vector<TimingRow> rows;
    std::vector<SimState> finals;  // final state per row, for invariance checks

    bool all_converged() const {
        for (const auto& r : rows)
            if (!r.converged) return false;
        return !rows.empty();
    }
};

// One full simulation per thread count. Numerics must not depend on the
// worker count; only the timings may. With repeat > 1 each stage records its
// minimum over the repeats and the fields come from the first run.
inline TimingReport run_benchmark(const DiscreteModel& model, const SimState& initial,
                                  const RunConfig& rc, const std::vector<int>& threads,
                                  int repeat = 1, const std::string& scenario_id = "scenario") {
    if (threads.empty()) throw std::invalid_argument("benchmark: empty thread list");
    for (size_t i = 0; i < threads.size(); ++i) {
        if (threads[i] < 1) throw std::invalid_argument("benchmark: thread counts must be >= 1");
        if (i > 0 && threads[i] < threads[i - 1])
            throw std::invalid_argument("benchmark: thread counts must be nondecreasing");
    }
    if (repeat < 1) throw std::invalid_argument("benchmark: repeat must be >= 1");
    TimingReport rep;
    rep.scenario_id = scenario_id;
    rep.strategy_id = strategy_name(rc.strategy);
    RunConfig cfg = rc;
    cfg.keep_history = false;
    for (int nt : threads) {
        set_threads(nt);
        TimingRow row;
        row.n_threads = nt;
        for (int r = 0; r < repeat; ++r) {
            RunResult res = run_simulation(model, initial, cfg);
            if (r == 0) {
                row.t_total = res.t_total;
                row.t_assemble = res.t_assemble;
                row.t_precond = res.t_precond;
                row.t_iter = res.t_iter;
                row.lin_iters = res.lin_iters;
                row.split_iters = res.split_iters;
                row.converged = res.converged;
                rep.finals.push_back(res.final_state);
            } else {
                row.t_total = std::min(row.t_total, res.t_total);
                row.t_assemble = std::min(row.t_assemble, res.t_assemble);
                row.t_precond = std::min(row.t_precond, res.t_precond);
                row.t_iter = std::min(row.t_iter, res.t_iter);
            }
        }
        rep.rows.push_back(std::move(row));
    }
    return rep;
}

inline std::string join_split_iters(const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
    return s;
}

inline std::string report_csv(const TimingReport& rep) {
    std::ostringstream os;
    os << "n_threads,T_total,T_assmbl,T_precond,T_iter,lin_iters,split_iters,converged\n";
    for (const auto& r : rep.rows) {
        os << r.n_threads << "," << detail::fmt(r.t_total) << "," << detail::fmt(r.t_assemble) << ","
           << detail::fmt(r.t_precond) << "," << detail::fmt(r.t_iter) << "," << r.lin_iters << ","
           << join_split_iters(r.split_iters) << "," << (r.converged ? "true" : "false") << "\n";
    }
    return os.str();
}

inline TimingReport parse_report_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) ||
        line != "n_threads,T_total,T_assmbl,T_precond,T_iter,lin_iters,split_iters,converged")
        throw std::runtime_error("report csv: bad header");
    TimingReport rep;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::string cur;
        for (char c : line)
            if (c == ',') {
                f.push_back(cur);
                cur.clear();
            } else
                cur += c;
        f.push_back(cur);
        if (f.size() != 8) throw std::runtime_error("report csv: bad row: " + line);
        TimingRow r;
        r.n_threads = std::stoi(f[0]);
        r.t_total = std::stod(f[1]);
        r.t_assemble = std::stod(f[2]);
        r.t_precond = std::stod(f[3]);
        r.t_iter = std::stod(f[4]);
        r.lin_iters = std::stol(f[5]);
        std::string tok;
        for (char c : f[6] + ";") {
            if (c == ';') {
                if (!tok.empty()) r.split_iters.push_back(std::stoi(tok));
                tok.clear();
            } else
                tok += c;
        }
        r.converged = f[7] == "true";
        rep.rows.push_back(std::move(r));
    }
    return rep;
}

// Table in the shape of the reference timing tables, with the speed-up
// column relative to the first (baseline) row.
inline std::string report_table(const TimingReport& rep) {
    std::ostringstream os;
    os << "scenario: " << rep.scenario_id << "  strategy: " << rep.strategy_id << "\n";
    os << "threads  T_total,s  T_assmbl,s  T_precond,s  T_iter,s   #lin.it  split.it  speed-up  ok\n";
    double base = rep.rows.empty() ? 1.0 : rep.rows.front().t_total;
    char buf[256];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%7d  %9.3f  %10.3f  %11.3f  %8.3f  %8ld  %8s  %8.2f  %s\n",
                      r.n_threads, r.t_total, r.t_assemble, r.t_precond, r.t_iter, r.lin_iters,
                      join_split_iters(r.split_iters).c_str(), r.t_total > 0.0 ? base / r.t_total : 1.0,
                      r.converged ? "yes" : "NO");
        os << buf;
    }
    return os.str();
}

// Per-cell total stress magnitudes for the final state.
inline std::vector<double> cell_stress_magnitudes(const DiscreteModel& model, const SimState& st) {
    std::vector<double> mag(model.mesh.cells.size(), 0.0);
    parallel_for(model.mesh.cells.size(), 64, [&](size_t b, size_t e) {
        for (size_t c = b; c < e; ++c) {
            const MediaProperties& mp = model.media[model.cell_media[c]];
            CellProjection P = vem_local_stiffness(model.mesh, static_cast<int>(c), mp.stiffness);
            Eigen::VectorXd uc(3 * P.nodes.size());
            for (size_t k = 0; k < P.nodes.size(); ++k)
                uc.segment<3>(3 * k) = st.u.segment<3>(3 * P.nodes[k]);
            double p = pressure_from_head(st.h[c], model.mesh.cells[c].centroid[2], model.fluid.rho_g);
            mag[c] = compute_cell_stress(P, mp.stiffness, uc, mp.alpha, p).magnitude;
        }
    });
    return mag;
}

// Legacy ASCII VTK export: head and stress magnitude per cell, displacement
// per node.
inline void export_fields(const PolyMesh& m, const SimState& st, const std::vector<double>& stress_mag,
                          const std::string& path) {
    if (st.h.size() != static_cast<int>(m.cells.size()) ||
        st.u.size() != 3 * static_cast<int>(m.nodes.size()) || stress_mag.size() != m.cells.size())
        throw std::invalid_argument("export_fields: field sizes do not match mesh");
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << "# vtk DataFile Version 3.0\nporobench fields\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    os << "POINTS " << m.nodes.size() << " double\n";
    char buf[160];
    for (const auto& x : m.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", x[0], x[1], x[2]);
        os << buf;
    }
    size_t list = 0;
    for (const auto& c : m.cells) list += c.corner_nodes.size() + 1;
    os << "CELLS " << m.cells.size() << " " << list << "\n";
    for (const auto& c : m.cells) {
        os << c.corner_nodes.size();
        for (int n : c.corner_nodes) os << " " << n;
        os << "\n";
    }
    os << "CELL_TYPES " << m.cells.size() << "\n";
    for (const auto& c : m.cells) os << c.vtk_type << "\n";
    os << "CELL_DATA " << m.cells.size() << "\nSCALARS head double 1\nLOOKUP_TABLE default\n";
    for (int c = 0; c < st.h.size(); ++c) {
        std::snprintf(buf, sizeof buf, "%.17g\n", st.h[c]);
        os << buf;
    }
    os << "SCALARS stress_magnitude double 1\nLOOKUP_TABLE default\n";
    for (double v : stress_mag) {
        std::snprintf(buf, sizeof buf, "%.17g\n", v);
        os << buf;
    }
    os << "POINT_DATA " << m.nodes.size() << "\nVECTORS displacement double\n";
    for (size_t n = 0; n < m.nodes.size(); ++n) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", st.u[3 * n], st.u[3 * n + 1],
                      st.u[3 * n + 2]);
        os << buf;
    }
    if (!os) throw std::runtime_error("write failed: " + path);
}

} // namespace poro

#endif
