#pragma once

#include <memory>
#include <string>
#include <vector>

#include "voxfrac/config.hpp"
#include "voxfrac/erosion.hpp"
#include "voxfrac/mesh.hpp"
#include "voxfrac/system.hpp"
#include "voxfrac/voxel_grid.hpp"

namespace voxfrac {

/// One competitive erosion, as written to the erosion log.
struct ErosionEvent {
    int step = 0;
    double time_s = 0.0;
    int gid = -1;
    int cell = -1;
    int phase = 0;
    double energy = 0.0;
    double delta_area = 0.0;
    double driving_force = 0.0;
};

/// Per-step record of the reaction curve and equation-count trace.
struct StepRecord {
    int step = 0;
    double time_s = 0.0;
    double ubar_mm = 0.0;   ///< prescribed displacement of the moved face
    double eps = 0.0;       ///< ubar / domain length along the moved axis
    double force_n = 0.0;   ///< reaction on the moved face (tension positive)
    int n_eq = 0;
    int n_free = 0;
    int n_multipliers = 0;
    int n_eroded_total = 0;
    int newton_iters = 0;
    bool halved = false;
};

struct RunOutputs {
    std::vector<StepRecord> steps;
    std::vector<ErosionEvent> erosion_log;
    std::vector<std::string> snapshots;  ///< VTK files, in write order
    int n_initial_crack = 0;
    int n_eq_initial = 0;    ///< after setup and initial crack, before stepping
    int n_eq_dips = 0;       ///< constraint-removal dips (logged, not errors)
    int halved_steps = 0;
    double mass_initial = 0.0;
    double mass_final = 0.0;
    double peak_force = 0.0;
    double final_force = 0.0;
    bool stopped_below_peak_fraction = false;
};

/// End-to-end driver: builds the discretization from a run configuration,
/// applies boundary conditions, runs the implicit time loop with staggered
/// erosion sweeps, and writes CSV/VTK/summary outputs.
class Simulation {
public:
    explicit Simulation(const RunConfig& cfg);
    ~Simulation();

    /// Runs the configured number of steps and writes all outputs into the
    /// configured output directory. Throws NumericsError after writing a
    /// diagnostic dump if Newton fails even at the halved step size.
    RunOutputs run();

    const RunConfig& config() const { return cfg_; }
    const VoxelGrid& grid() const { return grid_; }
    const SubcellLayout& layout() const { return layout_; }
    FcmMesh& mesh() { return *mesh_; }
    const FcmMesh& mesh() const { return *mesh_; }
    StructuralSystem& system() { return *system_; }
    ErosionModel* erosion() { return erosion_.get(); }

    /// Domain edge length (mm) along an axis.
    double domain_length(int axis) const;

    /// Reaction force on the moved face (0 when no face is moved).
    double moved_face_reaction() const;

private:
    bool solve_and_sweep(double t0, double h, int step, RunOutputs& out);
    void dump_and_abort(int step, double t0, double h, const StepReport& rep,
                        const RunOutputs& out);
    void write_snapshot(RunOutputs& out, const std::string& stem);
    void write_outputs(const RunOutputs& out) const;

    RunConfig cfg_;
    VoxelGrid grid_;
    SubcellLayout layout_;
    std::unique_ptr<FcmMesh> mesh_;
    std::unique_ptr<StructuralSystem> system_;
    std::unique_ptr<ErosionModel> erosion_;

    double t_ = 0.0;
    double last_t_new_ = 0.0;
    int iters_accum_ = 0;
    bool ran_ = false;
    StepReport last_report_;

    // moved-face bookkeeping (first clause with a nonzero motion)
    bool has_moved_face_ = false;
    int moved_axis_ = 0;
    bool moved_positive_ = true;
    int moved_comp_ = 0;
    double moved_velocity_ = 0.0;
};

}  // namespace voxfrac
