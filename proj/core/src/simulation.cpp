#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "voxfrac/simulation.hpp"
#include "voxfrac/vtk_writer.hpp"

namespace voxfrac {

namespace fs = std::filesystem;

Simulation::Simulation(const RunConfig& cfg) : cfg_(cfg) {
    cfg_.validate();

    grid_ = make_input_grid(cfg_);

    for (const auto& [phase, count] : grid_.histogram()) {
        (void)count;
        if (phase < 0 || static_cast<std::size_t>(phase) >= cfg_.materials.size())
            throw InputError("simulation: no material for phase " +
                             std::to_string(phase));
    }

    const CellGrid cells = make_cell_grid(grid_, cfg_.cells_per_axis);
    layout_ = decompose_grid(grid_, cells, parse_scheme(cfg_.scheme_text),
                             cfg_.threshold);

    const ConsistencyReport consistency = check_consistency(layout_);
    if (!consistency.consistent) {
        std::ostringstream ss;
        ss << "simulation: decomposition '" << cfg_.scheme_text
           << "' is not mesh-consistent ("
           << consistency.partial_overlaps.size()
           << " partially overlapping face pairs, " << consistency.n_cycle_nodes
           << " nodes in constraint cycles); refusing to run";
        throw InputError(ss.str());
    }

    mesh_ = std::make_unique<FcmMesh>(build_mesh(
        grid_, layout_, cfg_.materials, cfg_.cell_order, cfg_.switch_order));
    system_ = std::make_unique<StructuralSystem>(*mesh_, cfg_.solver);

    std::vector<FacePrescription> faces;
    for (const BcClause& c : cfg_.bcs) {
        double vel = c.velocity;
        if (c.use_strain_rate)
            vel = c.strain_rate_per_min / 60.0 * domain_length(c.face_axis);
        faces.push_back({c.face_axis, c.face_positive, c.comp, vel});
        if (c.moved && !has_moved_face_) {
            has_moved_face_ = true;
            moved_axis_ = c.face_axis;
            moved_positive_ = c.face_positive;
            moved_comp_ = c.comp;
            moved_velocity_ = vel;
        }
    }
    system_->set_face_prescriptions(std::move(faces));

    if (cfg_.erosion_enabled)
        erosion_ = std::make_unique<ErosionModel>(
            *mesh_, ErosionOptions{cfg_.erosion_c, cfg_.erosion_tie_rel});
}

Simulation::~Simulation() = default;

double Simulation::domain_length(int axis) const {
    return grid_.dims[axis] * grid_.spacing_mm()[axis];
}

double Simulation::moved_face_reaction() const {
    if (!has_moved_face_) return 0.0;
    const FcmMesh& m = *mesh_;
    const int axis = moved_axis_;
    const int comp = moved_comp_;
    const int target = moved_positive_ ? 2 * m.total_voxels[axis] : 0;
    const double raw =
        system_->reaction([&m, axis, comp, target](int node, int c) {
            return c == comp &&
                   m.node_key[static_cast<std::size_t>(node)][axis] == target;
        });
    // report along the outward normal so tension is positive on either face
    return moved_positive_ ? raw : -raw;
}

bool Simulation::solve_and_sweep(double t0, double h, int step, RunOutputs& out) {
    StepReport rep = system_->solve(t0 + h, h);
    last_report_ = rep;
    last_t_new_ = t0 + h;
    iters_accum_ += rep.iterations;
    if (!rep.converged) return false;
    if (erosion_) {
        while (true) {
            const auto eroded = erosion_->erode_step(*system_);
            if (eroded.empty()) break;
            for (const ErosionCandidate& c : eroded) {
                const auto [ci, s] = mesh_->subcell_of(c.gid);
                ErosionEvent ev;
                ev.step = step;
                ev.time_s = t0 + h;
                ev.gid = c.gid;
                ev.cell = ci;
                ev.phase = mesh_->cells[static_cast<std::size_t>(ci)]
                               .sub_phase[static_cast<std::size_t>(s)];
                ev.energy = c.energy;
                ev.delta_area = c.delta_area;
                ev.driving_force = c.driving_force;
                out.erosion_log.push_back(ev);
            }
            rep = system_->solve(t0 + h, h);
            last_report_ = rep;
            iters_accum_ += rep.iterations;
            if (!rep.converged) return false;
        }
    }
    system_->advance_time(h);
    return true;
}

void Simulation::dump_and_abort(int step, double t0, double h,
                                const StepReport& rep, const RunOutputs& out) {
    fs::create_directories(cfg_.output_dir);
    const fs::path dump = fs::path(cfg_.output_dir) / "diagnostic_dump.txt";
    {
        std::ofstream f(dump);
        f.precision(17);
        f << "newton_failure\n";
        f << "  step = " << step << "\n";
        f << "  t_step_start_s = " << t0 << "\n";
        f << "  dt_s = " << h << "\n";
        f << "  iterations = " << rep.iterations << "\n";
        f << "  residual_first = " << rep.e_first << "\n";
        f << "  residual_final = " << rep.e_final << "\n";
        f << "  n_eq = " << system_->n_equations() << "\n";
        f << "  n_eroded = " << (erosion_ ? erosion_->n_eroded() : 0) << "\n";
    }
    if (cfg_.write_vtk)
        write_vtk_snapshot(
            (fs::path(cfg_.output_dir) / "failure_state.vtk").string(), *mesh_,
            system_->D);
    write_outputs(out);
    std::ostringstream ss;
    ss << "simulation: Newton failed at step " << step << " (dt " << h
       << " s) after " << rep.iterations << " iterations; residual went "
       << rep.e_first << " -> " << rep.e_final << "; diagnostics in '"
       << dump.string() << "'";
    throw NumericsError(ss.str());
}

void Simulation::write_snapshot(RunOutputs& out, const std::string& stem) {
    if (!cfg_.write_vtk) return;
    fs::create_directories(cfg_.output_dir);
    const std::string name = stem + ".vtk";
    write_vtk_snapshot((fs::path(cfg_.output_dir) / name).string(), *mesh_,
                       system_->D);
    out.snapshots.push_back(name);
}

RunOutputs Simulation::run() {
    if (ran_) throw InputError("simulation: run() may only be called once");
    ran_ = true;
    if (!(cfg_.dt > 0.0)) throw InputError("simulation: [time] dt must be positive");
    if (cfg_.steps < 1) throw InputError("simulation: [time] steps must be >= 1");

    fs::create_directories(cfg_.output_dir);
    RunOutputs out;
    out.mass_initial = mesh_->total_mass();

    if (cfg_.initial_crack && erosion_)
        out.n_initial_crack = static_cast<int>(
            erosion_->impose_initial_crack(*system_, *cfg_.initial_crack).size());
    out.n_eq_initial = system_->n_equations();

    write_snapshot(out, "snap_000000");

    int n_eq_prev = system_->n_equations();
    int n_free_prev = system_->n_free();
    for (int step = 1; step <= cfg_.steps; ++step) {
        const std::size_t erosion_mark = out.erosion_log.size();
        iters_accum_ = 0;
        bool halved = false;
        if (!solve_and_sweep(t_, cfg_.dt, step, out)) {
            // Retry policy: restore the step-start fields and integrate the
            // same interval as two half steps; a second failure aborts.
            system_->reset_to_snapshot();
            halved = true;
            const double h = 0.5 * cfg_.dt;
            if (!solve_and_sweep(t_, h, step, out))
                dump_and_abort(step, t_, h, last_report_, out);
            const double t_mid = last_t_new_;
            if (!solve_and_sweep(t_mid, h, step, out))
                dump_and_abort(step, t_mid, h, last_report_, out);
            ++out.halved_steps;
        }
        t_ = last_t_new_;

        StepRecord rec;
        rec.step = step;
        rec.time_s = t_;
        rec.ubar_mm = has_moved_face_ ? moved_velocity_ * t_ : 0.0;
        rec.eps = has_moved_face_ ? rec.ubar_mm / domain_length(moved_axis_) : 0.0;
        rec.force_n = moved_face_reaction();
        rec.n_eq = system_->n_equations();
        rec.n_free = system_->n_free();
        rec.n_multipliers = system_->n_multipliers();
        rec.n_eroded_total = erosion_ ? erosion_->n_eroded() : 0;
        rec.newton_iters = iters_accum_;
        rec.halved = halved;
        out.steps.push_back(rec);

        // Equation-count bookkeeping: switching only grows the system. The
        // only admissible shrink is a hanging-node row whose donor eroded
        // away (constraint removal); count those dips but treat a shrinking
        // free count as a defect.
        if (rec.n_free < n_free_prev)
            throw NumericsError("simulation: free equation count shrank at step " +
                                std::to_string(step));
        if (rec.n_eq < n_eq_prev) ++out.n_eq_dips;
        n_free_prev = rec.n_free;
        n_eq_prev = rec.n_eq;

        const bool eroded_now = out.erosion_log.size() > erosion_mark;
        if (eroded_now || step % cfg_.snapshot_every == 0 || step == cfg_.steps) {
            std::ostringstream name;
            name << "snap_" << std::setw(6) << std::setfill('0') << step;
            write_snapshot(out, name.str());
        }

        if (rec.force_n > out.peak_force) out.peak_force = rec.force_n;
        out.final_force = rec.force_n;
        if (cfg_.abort_below_peak_fraction > 0.0 && out.peak_force > 0.0 &&
            rec.n_eroded_total > out.n_initial_crack &&
            rec.force_n < cfg_.abort_below_peak_fraction * out.peak_force) {
            out.stopped_below_peak_fraction = true;
            break;
        }
    }

    out.mass_final = mesh_->total_mass();
    write_outputs(out);
    return out;
}

void Simulation::write_outputs(const RunOutputs& out) const {
    fs::create_directories(cfg_.output_dir);
    const fs::path dir(cfg_.output_dir);
    {
        std::ofstream f(dir / "reaction.csv");
        f.precision(17);
        f << "step,time_s,ubar_mm,eps,force_n\n";
        for (const StepRecord& r : out.steps)
            f << r.step << ',' << r.time_s << ',' << r.ubar_mm << ',' << r.eps
              << ',' << r.force_n << '\n';
    }
    {
        std::ofstream f(dir / "n_eq.csv");
        f << "step,n_eq,n_free,n_multipliers,n_eroded_total,newton_iters,halved\n";
        for (const StepRecord& r : out.steps)
            f << r.step << ',' << r.n_eq << ',' << r.n_free << ','
              << r.n_multipliers << ',' << r.n_eroded_total << ','
              << r.newton_iters << ',' << (r.halved ? 1 : 0) << '\n';
    }
    {
        std::ofstream f(dir / "erosion.csv");
        f.precision(17);
        f << "step,time_s,gid,cell,phase,energy_nmm,delta_area_mm2,driving_force_nmm\n";
        for (const ErosionEvent& e : out.erosion_log)
            f << e.step << ',' << e.time_s << ',' << e.gid << ',' << e.cell << ','
              << e.phase << ',' << e.energy << ',' << e.delta_area << ','
              << e.driving_force << '\n';
    }
    {
        std::ofstream f(dir / "run_summary.txt");
        f.precision(17);
        f << "run_summary\n";
        f << "  config = " << (cfg_.source_path.empty() ? "<inline>" : cfg_.source_path)
          << "\n";
        f << "  voxels = [" << grid_.dims[0] << ", " << grid_.dims[1] << ", "
          << grid_.dims[2] << "]\n";
        f << "  cells = [" << layout_.grid.cells_per_axis[0] << ", "
          << layout_.grid.cells_per_axis[1] << ", "
          << layout_.grid.cells_per_axis[2] << "]\n";
        f << "  scheme = " << cfg_.scheme_text << "\n";
        f << "  subcells = " << layout_.total_subcells() << "\n";
        f << "  steps_completed = " << out.steps.size() << "\n";
        f << "  dt_s = " << cfg_.dt << "\n";
        f << "  time_end_s = " << (out.steps.empty() ? 0.0 : out.steps.back().time_s)
          << "\n";
        f << "  halved_steps = " << out.halved_steps << "\n";
        f << "  n_eq_initial = " << out.n_eq_initial << "\n";
        f << "  n_eq_final = " << system_->n_equations() << "\n";
        f << "  n_eq_dips = " << out.n_eq_dips << "\n";
        f << "  erosions_initial_crack = " << out.n_initial_crack << "\n";
        f << "  erosions_competitive = " << out.erosion_log.size() << "\n";
        f << "  peak_force_n = " << out.peak_force << "\n";
        f << "  final_force_n = " << out.final_force << "\n";
        f << "  mass_initial_t = " << out.mass_initial << "\n";
        f << "  mass_final_t = " << out.mass_final << "\n";
        f << "  stopped_below_peak_fraction = "
          << (out.stopped_below_peak_fraction ? "true" : "false") << "\n";
        f << "  snapshots = [";
        for (std::size_t i = 0; i < out.snapshots.size(); ++i)
            f << (i ? ", " : "") << out.snapshots[i];
        f << "]\n";
    }
}

}  // namespace voxfrac
