#include <algorithm>
#include <cmath>
#include <set>

#include "voxfrac/erosion.hpp"
#include "voxfrac/quadrature.hpp"

namespace voxfrac {

ErosionModel::ErosionModel(FcmMesh& mesh, ErosionOptions opt)
    : mesh_(mesh), opt_(opt) {
    if (!(opt_.c_eps > 0.0))
        throw InputError("erosion: neighborhood factor must be positive");

    const int rule = rule_for_order(mesh_.switch_order);
    gpps_ = rule * rule * rule;

    double h_max = 0.0;
    for (const MeshCell& cell : mesh_.cells)
        for (const Box3d& b : cell.sub_boxes)
            h_max = std::max({h_max, b.extent()[0], b.extent()[1], b.extent()[2]});
    eps_ = opt_.c_eps * h_max;
    if (!(eps_ > 0.0)) throw InputError("erosion: degenerate subcell geometry");

    const int n_gids = mesh_.n_subcells();
    gp_pos_.resize(static_cast<std::size_t>(n_gids) * gpps_);
    gp_vol_.resize(gp_pos_.size());
    for (const MeshCell& cell : mesh_.cells)
        for (std::size_t s = 0; s < cell.sub_gid.size(); ++s) {
            const int gid = cell.sub_gid[s];
            for (int g = 0; g < gpps_; ++g) {
                const std::size_t local = s * static_cast<std::size_t>(gpps_) + g;
                const std::size_t global =
                    static_cast<std::size_t>(gid) * gpps_ + g;
                gp_pos_[global] = cell.gp_pos[local];
                gp_vol_[global] = cell.quad.w[local];
            }
        }

    for (std::size_t q = 0; q < gp_pos_.size(); ++q)
        buckets_[bucket_of(gp_pos_[q])].push_back(static_cast<int>(q));

    gid_eroded_.assign(static_cast<std::size_t>(n_gids), 0);
    corr_.assign(static_cast<std::size_t>(n_gids), 0.0);
    stamp_.assign(gp_pos_.size(), 0);

    // Intact-state neighborhood volume per candidate: volumes of all points
    // within eps of any of its own points, each counted once.
    s_full_.assign(static_cast<std::size_t>(n_gids), 0.0);
    for (int gid = 0; gid < n_gids; ++gid) {
        ++stamp_counter_;
        double sum = 0.0;
        for (int g = 0; g < gpps_; ++g) {
            const Vec3d& p = gp_pos_[static_cast<std::size_t>(gid) * gpps_ + g];
            for_ball(p, [&](int q) {
                if (stamp_[static_cast<std::size_t>(q)] != stamp_counter_) {
                    stamp_[static_cast<std::size_t>(q)] = stamp_counter_;
                    sum += gp_vol_[static_cast<std::size_t>(q)];
                }
            });
        }
        s_full_[static_cast<std::size_t>(gid)] = sum;
    }
}

ErosionModel::BucketKey ErosionModel::bucket_of(const Vec3d& p) const {
    return {static_cast<int>(std::floor(p[0] / eps_)),
            static_cast<int>(std::floor(p[1] / eps_)),
            static_cast<int>(std::floor(p[2] / eps_))};
}

template <class Fn>
void ErosionModel::for_ball(const Vec3d& center, Fn&& fn) const {
    const BucketKey c = bucket_of(center);
    const double eps2 = eps_ * eps_;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                const auto it = buckets_.find({c[0] + dx, c[1] + dy, c[2] + dz});
                if (it == buckets_.end()) continue;
                for (int q : it->second)
                    if ((gp_pos_[static_cast<std::size_t>(q)] - center).squaredNorm() <=
                        eps2)
                        fn(q);
            }
}

void ErosionModel::mark_eroded(int gid) {
    gid_eroded_[static_cast<std::size_t>(gid)] = 1;
    ++n_eroded_;
    // Every candidate with a point within eps of an absorbed point loses that
    // point's volume from its neighborhood.
    for (int g = 0; g < gpps_; ++g) {
        const std::size_t q = static_cast<std::size_t>(gid) * gpps_ + g;
        ++stamp_counter_;
        // stamp per owning candidate: subtract each absorbed point once
        for_ball(gp_pos_[q], [&](int other) {
            const std::size_t k = static_cast<std::size_t>(other / gpps_);
            if (stamp_[k] == stamp_counter_) return;
            stamp_[k] = stamp_counter_;
            corr_[k] += gp_vol_[q];
        });
    }
}

double ErosionModel::delta_area(int gid) const {
    return (s_full_[static_cast<std::size_t>(gid)] -
            corr_[static_cast<std::size_t>(gid)]) /
           (2.0 * eps_);
}

std::vector<int> ErosionModel::neighborhood(int gid) const {
    std::vector<int> out;
    ++stamp_counter_;
    for (int g = 0; g < gpps_; ++g) {
        const Vec3d& p = gp_pos_[static_cast<std::size_t>(gid) * gpps_ + g];
        for_ball(p, [&](int q) {
            if (stamp_[static_cast<std::size_t>(q)] != stamp_counter_) {
                stamp_[static_cast<std::size_t>(q)] = stamp_counter_;
                out.push_back(q);
            }
        });
    }
    std::sort(out.begin(), out.end());
    return out;
}

double ErosionModel::candidate_energy(int gid, const StructuralSystem& sys) const {
    const auto [ci, s] = mesh_.subcell_of(gid);
    const MeshCell& cell = mesh_.cells[static_cast<std::size_t>(ci)];
    const ElementArrays* trial = nullptr;
    std::size_t base = 0;
    const std::vector<double>* w = nullptr;
    if (cell.active) {
        trial = &sys.cell_trial()[static_cast<std::size_t>(ci)];
        base = static_cast<std::size_t>(s) * gpps_;
        w = &cell.quad.w;
    } else {
        const int ei = cell.sub_element[static_cast<std::size_t>(s)];
        const MeshElement& el = mesh_.elements[static_cast<std::size_t>(ei)];
        if (el.eroded) throw InputError("erosion: energy of an eroded subcell");
        trial = &sys.elem_trial()[static_cast<std::size_t>(ei)];
        base = 0;
        w = &el.quad.w;
    }
    if (trial->new_states.empty())
        throw NumericsError("erosion: no converged trial state available");
    double e = 0.0;
    for (int g = 0; g < gpps_; ++g) {
        const std::size_t i = base + g;
        e += (*w)[i] * (trial->gp_psi_e[i] + trial->gp_psi_p[i] +
                        trial->new_states[i].d_vis);
    }
    return e;
}

std::vector<ErosionCandidate> ErosionModel::evaluate(
    const StructuralSystem& sys) const {
    std::vector<ErosionCandidate> out;
    for (int gid = 0; gid < n_gids(); ++gid) {
        if (gid_eroded_[static_cast<std::size_t>(gid)]) continue;
        const auto [ci, s] = mesh_.subcell_of(gid);
        const MeshCell& cell = mesh_.cells[static_cast<std::size_t>(ci)];
        ErosionCandidate c;
        c.gid = gid;
        c.energy = candidate_energy(gid, sys);
        c.delta_area = delta_area(gid);
        const double gc =
            mesh_.phase_material(cell.sub_phase[static_cast<std::size_t>(s)]).gc();
        c.driving_force = c.energy - gc * c.delta_area;
        out.push_back(c);
    }
    return out;
}

void ErosionModel::erode_gids(StructuralSystem& sys, const std::vector<int>& gids) {
    if (gids.empty()) return;
    std::set<int> to_switch;
    for (int gid : gids) {
        if (is_eroded(gid)) throw InputError("erosion: subcell already eroded");
        const auto [ci, s] = mesh_.subcell_of(gid);
        (void)s;
        if (mesh_.cells[static_cast<std::size_t>(ci)].active) to_switch.insert(ci);
    }
    for (int ci : to_switch)
        mesh_.switch_cell(ci, {&sys.D, &sys.V, &sys.A, &sys.D0, &sys.V0, &sys.A0});
    for (int gid : gids) {
        const auto [ci, s] = mesh_.subcell_of(gid);
        const int ei =
            mesh_.cells[static_cast<std::size_t>(ci)].sub_element[static_cast<std::size_t>(s)];
        mesh_.erode_element(ei);
        mark_eroded(gid);
    }
    mesh_.rebuild_topology();
    sys.refresh();
}

std::vector<ErosionCandidate> ErosionModel::erode_step(StructuralSystem& sys) {
    const auto cands = evaluate(sys);
    double f_max = 0.0;
    bool any = false;
    for (const auto& c : cands)
        if (c.driving_force > 0.0 && (!any || c.driving_force > f_max)) {
            f_max = c.driving_force;
            any = true;
        }
    if (!any) return {};

    std::vector<ErosionCandidate> winners;
    std::vector<int> gids;
    for (const auto& c : cands)
        if (c.driving_force > 0.0 &&
            std::abs(c.driving_force - f_max) < opt_.tie_rel * std::abs(f_max)) {
            winners.push_back(c);
            gids.push_back(c.gid);
        }
    erode_gids(sys, gids);
    return winners;
}

std::vector<int> ErosionModel::impose_initial_crack(StructuralSystem& sys,
                                                    const Box3d& region) {
    std::vector<int> gids;
    for (const MeshCell& cell : mesh_.cells)
        for (std::size_t s = 0; s < cell.sub_boxes.size(); ++s) {
            const Box3d& b = cell.sub_boxes[s];
            bool overlap = true;
            for (int a = 0; a < 3; ++a)
                overlap = overlap && std::min(b.hi[a], region.hi[a]) >
                                         std::max(b.lo[a], region.lo[a]);
            if (overlap && !is_eroded(cell.sub_gid[s])) gids.push_back(cell.sub_gid[s]);
        }
    if (gids.empty())
        throw InputError("erosion: initial crack region misses the specimen");
    erode_gids(sys, gids);
    return gids;
}

}  // namespace voxfrac
