#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <poro/poro.hpp>

namespace fs = std::filesystem;

static std::vector<int> parse_threads(const std::string& s) {
    std::vector<int> out;
    std::string tok;
    for (char c : s + ",") {
        if (c == ',') {
            if (!tok.empty()) out.push_back(std::stoi(tok));
            tok.clear();
        } else {
            tok += c;
        }
    }
    return out;
}

static poro::Scenario resolve_scenario(const std::string& spec) {
    if (spec.rfind("builtin:", 0) == 0) return poro::builtin_scenario(spec.substr(8));
    return poro::load_scenario_file(spec);
}

int main(int argc, char** argv) {
    CLI::App app{"coupled poroelasticity benchmark"};
    app.require_subcommand(1);

    std::string scenario_spec, strategy_str, threads_str, out_dir;
    int repeat = 1;
    bool export_fields_flag = false, export_matrix_flag = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario over a thread sweep");
    run->add_option("--scenario", scenario_spec, "scenario file or builtin:<name>")->required();
    run->add_option("--strategy", strategy_str, "monolithic or fixed-strain (default: scenario's)");
    run->add_option("--threads", threads_str, "comma-separated worker counts, e.g. 1,2,4");
    run->add_option("--repeat", repeat, "repetitions per row, minimum timing kept");
    run->add_option("--out-dir", out_dir, "directory for report.csv and exports");
    run->add_flag("--export-fields", export_fields_flag, "write final fields as legacy VTK");
    run->add_flag("--export-matrix", export_matrix_flag, "write the first-step matrix (MatrixMarket)");

    CLI::App* rend = app.add_subcommand("render", "print a scenario in file form");
    std::string render_spec;
    rend->add_option("--scenario", render_spec, "scenario file or builtin:<name>")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (rend->parsed()) {
            std::cout << poro::render(resolve_scenario(render_spec));
            return 0;
        }

        poro::Scenario sc = resolve_scenario(scenario_spec);
        if (strategy_str == "monolithic")
            sc.strategy = poro::Strategy::Monolithic;
        else if (strategy_str == "fixed-strain")
            sc.strategy = poro::Strategy::FixedStrain;
        else if (!strategy_str.empty())
            throw std::runtime_error("unknown strategy " + strategy_str);

        std::vector<int> threads;
        if (!threads_str.empty()) {
            threads = parse_threads(threads_str);
        } else if (const char* env = std::getenv("POROBENCH_THREADS")) {
            threads = parse_threads(env);
        } else {
            threads = {1};
        }

        poro::DiscreteModel model = poro::build_model(sc);
        poro::SimState init = poro::initial_state(sc, model);
        poro::RunConfig rc = poro::run_config(sc);

        poro::TimingReport rep = poro::run_benchmark(model, init, rc, threads, repeat, sc.name);
        std::cout << poro::report_table(rep);

        if (!out_dir.empty()) {
            fs::create_directories(out_dir);
            std::ofstream csv(out_dir + "/report.csv");
            csv << poro::report_csv(rep);
            if (!csv) throw std::runtime_error("cannot write report.csv");
        }
        if (export_fields_flag) {
            std::string dir = out_dir.empty() ? "." : out_dir;
            const poro::SimState& fin = rep.finals.front();
            poro::export_fields(model.mesh, fin, poro::cell_stress_magnitudes(model, fin),
                                dir + "/" + sc.name + "_fields.vtk");
        }
        if (export_matrix_flag) {
            std::string dir = out_dir.empty() ? "." : out_dir;
            poro::BlockSystem sys = model.assemble(rc.total_time / rc.steps, init.h, init.u);
            poro::write_matrix_market(sys.A, dir + "/" + sc.name + "_matrix.mtx");
        }
        return rep.all_converged() ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
