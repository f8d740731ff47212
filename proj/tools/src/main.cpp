#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "voxfrac/simulation.hpp"

namespace {

int run_cmd(const std::string& config_path) {
    const voxfrac::RunConfig cfg = voxfrac::load_run_config(config_path);
    voxfrac::Simulation sim(cfg);
    const voxfrac::RunOutputs out = sim.run();
    std::cout << "completed " << out.steps.size() << " steps, "
              << out.erosion_log.size() << " erosions (+" << out.n_initial_crack
              << " from the initial crack), peak force " << out.peak_force
              << " N, final force " << out.final_force << " N; outputs in '"
              << cfg.output_dir << "'\n";
    return 0;
}

int decompose_cmd(const std::string& config_path, const std::string& stats_path) {
    const voxfrac::RunConfig cfg = voxfrac::load_run_config(config_path);
    const voxfrac::VoxelGrid grid = voxfrac::make_input_grid(cfg);
    const voxfrac::CellGrid cells = voxfrac::make_cell_grid(grid, cfg.cells_per_axis);
    const voxfrac::SubcellLayout layout = voxfrac::decompose_grid(
        grid, cells, voxfrac::parse_scheme(cfg.scheme_text), cfg.threshold);
    const voxfrac::DecompositionStats st = voxfrac::decomposition_stats(layout, grid);

    std::cout << "scheme " << cfg.scheme_text << ": " << st.n_subcells
              << " subcells in " << cells.cell_count() << " cells, "
              << st.n_constraints << " hanging-node constraint equations, "
              << "max aspect " << st.max_aspect << ", "
              << (st.consistent ? "consistent" : "NOT consistent") << "\n";

    if (!stats_path.empty()) {
        std::ofstream f(stats_path);
        if (!f) {
            std::cerr << "error: cannot open '" << stats_path << "' for writing\n";
            return 1;
        }
        f.precision(17);
        f << "scheme,n_cells,n_subcells,n_constraints,max_aspect,"
             "global_edge_ratio,consistent\n";
        f << cfg.scheme_text << ',' << cells.cell_count() << ',' << st.n_subcells
          << ',' << st.n_constraints << ',' << st.max_aspect << ','
          << st.global_edge_ratio << ',' << (st.consistent ? 1 : 0) << '\n';
    }
    return 0;
}

std::vector<double> parse_csv_row(const std::string& line) {
    std::vector<double> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

int material_test_cmd(const std::string& phase, const std::string& path,
                      const std::string& out_path) {
    const voxfrac::MaterialParams p = voxfrac::material_preset(phase);

    std::ifstream in(path);
    if (!in) throw voxfrac::InputError("material-test: cannot open '" + path + "'");

    std::ofstream file_out;
    if (!out_path.empty()) {
        file_out.open(out_path);
        if (!file_out)
            throw voxfrac::InputError("material-test: cannot open '" + out_path +
                                      "' for writing");
    }
    std::ostream& os = out_path.empty() ? std::cout : file_out;
    os.precision(17);
    os << "t,tau_xx,tau_yy,tau_zz,tau_xy,tau_yz,tau_xz,von_mises,alpha,psi_e,psi_p\n";

    voxfrac::MaterialState state;
    double t_prev = 0.0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        if (lineno == 1 && line.find_first_not_of("0123456789+-.eE, \t\r") !=
                               std::string::npos)
            continue;  // header row
        std::vector<double> v;
        try {
            v = parse_csv_row(line);
        } catch (const std::exception&) {
            throw voxfrac::InputError("material-test: bad number on line " +
                                      std::to_string(lineno) + " of '" + path + "'");
        }
        if (v.size() != 10)
            throw voxfrac::InputError(
                "material-test: line " + std::to_string(lineno) +
                " needs 10 columns: t,F11,F12,F13,F21,F22,F23,F31,F32,F33");
        const double t = v[0];
        voxfrac::Mat3 F;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                F(i, j) = v[static_cast<std::size_t>(1 + 3 * i + j)];
        const double dt = t - t_prev;
        const voxfrac::MaterialResult r =
            voxfrac::evaluate_material(p, F, state, dt);
        state = r.state;
        t_prev = t;
        os << t << ',' << r.tau(0, 0) << ',' << r.tau(1, 1) << ',' << r.tau(2, 2)
           << ',' << r.tau(0, 1) << ',' << r.tau(1, 2) << ',' << r.tau(0, 2)
           << ',' << r.tau_vm << ',' << r.state.alpha << ',' << r.psi_e << ','
           << r.psi_p << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"voxel-based fracture simulator"};
    app.require_subcommand(1);

    std::string run_config;
    CLI::App* run = app.add_subcommand("run", "run a simulation from a config file");
    run->add_option("config", run_config, "run configuration file")->required();

    std::string dec_config, stats_out;
    CLI::App* dec = app.add_subcommand(
        "decompose", "decompose the specimen and report subcell statistics");
    dec->add_option("config", dec_config, "run configuration file")->required();
    dec->add_option("--stats", stats_out, "write a statistics CSV to this path");

    std::string mt_phase, mt_path, mt_out;
    CLI::App* mt = app.add_subcommand(
        "material-test", "drive one material point along a deformation history");
    mt->add_option("phase", mt_phase, "material preset name")->required();
    mt->add_option("--path", mt_path,
                   "CSV with columns t,F11,F12,F13,F21,F22,F23,F31,F32,F33")
        ->required();
    mt->add_option("--out", mt_out, "output CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_cmd(run_config);
        if (dec->parsed()) return decompose_cmd(dec_config, stats_out);
        if (mt->parsed()) return material_test_cmd(mt_phase, mt_path, mt_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
