#pragma once

#include <unordered_map>
#include <vector>

#include "voxfrac/mesh.hpp"
#include "voxfrac/system.hpp"

namespace voxfrac {

struct ErosionOptions {
    double c_eps = 0.5;     ///< nonlocal radius = c_eps * largest subcell edge
    double tie_rel = 1e-3;  ///< relative window for simultaneous erosion
};

struct ErosionCandidate {
    int gid = -1;
    double driving_force = 0.0;  ///< released energy minus fracture cost
    double energy = 0.0;         ///< stored + dissipated energy of the candidate
    double delta_area = 0.0;     ///< effective crack-area increment
};

/// Energy-competition erosion over the subcell population. Neighborhoods are
/// built once from the reference quadrature-point positions; erosion marks
/// points absorbed, which lazily shrinks later area increments.
class ErosionModel {
public:
    ErosionModel(FcmMesh& mesh, ErosionOptions opt);

    double eps() const { return eps_; }
    int n_gids() const { return static_cast<int>(gid_eroded_.size()); }
    int n_eroded() const { return n_eroded_; }
    bool is_eroded(int gid) const {
        return gid_eroded_[static_cast<std::size_t>(gid)] != 0;
    }

    /// Crack-area increment of an intact candidate in the current state.
    double delta_area(int gid) const;

    /// All quadrature-point indices (over the whole mesh, point-major) within
    /// eps of any own point of `gid`, sorted ascending. Intended for testing
    /// the hashed neighborhood queries against a pairwise reference.
    std::vector<int> neighborhood(int gid) const;

    /// Stored + dissipated energy of the candidate's quadrature points,
    /// taken from the last converged trial arrays of `sys`.
    double candidate_energy(int gid, const StructuralSystem& sys) const;

    /// Evaluates every intact candidate.
    std::vector<ErosionCandidate> evaluate(const StructuralSystem& sys) const;

    /// Erodes the candidate with the largest positive driving force together
    /// with all candidates tied within the relative window, splitting parent
    /// cells as needed and refreshing the system. Returns the eroded
    /// candidates with the values that decided the competition (empty when
    /// nothing is critical).
    std::vector<ErosionCandidate> erode_step(StructuralSystem& sys);

    /// Erodes every subcell whose box overlaps `region` (mm) with positive
    /// volume; throws InputError when the region misses the specimen.
    std::vector<int> impose_initial_crack(StructuralSystem& sys, const Box3d& region);

    /// Marks the given intact subcells eroded (splitting parents), used by
    /// both erosion paths.
    void erode_gids(StructuralSystem& sys, const std::vector<int>& gids);

private:
    using BucketKey = std::array<int, 3>;
    struct BucketHash {
        std::size_t operator()(const BucketKey& k) const {
            std::size_t h = 1469598103934665603ull;
            for (int v : k) {
                h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull;
                h *= 1099511628211ull;
            }
            return h;
        }
    };

    BucketKey bucket_of(const Vec3d& p) const;
    template <class Fn>
    void for_ball(const Vec3d& center, Fn&& fn) const;  // gp indices within eps
    void mark_eroded(int gid);

    FcmMesh& mesh_;
    ErosionOptions opt_;
    double eps_ = 0.0;
    int gpps_ = 0;

    std::vector<Vec3d> gp_pos_;
    std::vector<double> gp_vol_;
    std::unordered_map<BucketKey, std::vector<int>, BucketHash> buckets_;

    std::vector<double> s_full_;  ///< per gid: neighborhood volume, intact state
    std::vector<double> corr_;    ///< per gid: absorbed neighborhood volume
    std::vector<char> gid_eroded_;
    int n_eroded_ = 0;

    mutable std::vector<int> stamp_;
    mutable int stamp_counter_ = 0;
};

}  // namespace voxfrac
