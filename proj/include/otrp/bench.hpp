#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "otrp/objective.hpp"

namespace otrp {
namespace bench {

// Axis-aligned grid of box rooms sharing walls, with collision points sampled
// on every shared wall outside a centered square door opening. Room (ix,iy,iz)
// occupies the box [i*size, (i+1)*size) per axis; indices flatten x-fastest.
struct RoomGrid {
    std::array<int, 3> shape{1, 1, 1};
    Eigen::Vector3d room_size{4.0, 4.0, 3.0};
    double door_size = 1.2;
    int points_per_wall = 40;
    std::uint64_t seed = 0;
    Eigen::Matrix3Xd collision_points;

    int n_rooms() const { return shape[0] * shape[1] * shape[2]; }
    int index(int ix, int iy, int iz) const { return ix + shape[0] * (iy + shape[1] * iz); }
    std::array<int, 3> coords(int idx) const;
    Eigen::Vector3d room_center(int idx) const;
    bool adjacent(int a, int b) const;
    Eigen::Vector3d door_center(int a, int b) const;  // requires adjacency
    std::vector<int> neighbors(int idx) const;        // deterministic order

    nlohmann::json to_json() const;
    static RoomGrid from_json(const nlohmann::json& j);
};

// Deterministic for a given seed; every collision point lies exactly on its
// shared-wall plane and strictly outside the centered door rectangle.
RoomGrid generate_environment(const std::array<int, 3>& shape, const Eigen::Vector3d& room_size,
                              double door_size, int points_per_wall, std::uint64_t seed);

// Seeded random walk over room adjacencies that never returns to the room it
// just left unless that is the only exit.
std::vector<int> random_room_sequence(const RoomGrid& grid, int length, std::uint64_t seed);

// Piecewise-linear path room center -> door center -> room center -> ...,
// resampled to n_waypoints by arc length. Consecutive rooms must be adjacent.
Eigen::Matrix3Xd initial_waypoints(const RoomGrid& grid, const std::vector<int>& room_sequence,
                                   int n_waypoints);

// Horizon selection: reference arc length at unit nominal speed, or a fixed
// number of seconds. Serialized as "arclength" or a plain number.
struct HorizonPolicy {
    bool arclength = true;
    double fixed_value = 0.0;

    double resolve(double reference_arc_length) const;
    nlohmann::json to_json() const;
    static HorizonPolicy from_json(const nlohmann::json& j);
};

struct BenchConfig {
    std::array<int, 3> grid_shape{3, 3, 2};
    Eigen::Vector3d room_size{4.0, 4.0, 3.0};
    double door_size = 1.2;
    int points_per_wall = 40;
    int n_waypoints = 15;
    int N_y = 6;
    int N_J = 14;
    int samples = 128;
    HorizonPolicy horizon_policy;
    double rho = -1.0;
    SolverConfig solver;
    std::uint64_t seed = 1;

    nlohmann::json to_json() const;
    static BenchConfig from_json(const nlohmann::json& j);
};

BenchConfig default_config();

// Everything one trial needs: environment, homotopy class, sizes, solver.
struct BenchScenario {
    RoomGrid grid;
    std::vector<int> room_sequence;
    int n_waypoints = 15;
    int N_y = 6;
    int N_J = 14;
    int cost_samples = 128;
    HorizonPolicy horizon_policy;
    double rho = -1.0;
    SolverConfig solver;
    std::uint64_t seed = 1;

    void validate() const;
};

// Rooms visited for a waypoint budget; at least two so the path has one door.
int rooms_for_waypoints(int n_waypoints);

// Environment from the trial seed, walk from a (seed, n_waypoints) stream.
BenchScenario scenario_from_config(const BenchConfig& cfg, int n_waypoints, std::uint64_t seed);

inline constexpr int kContainmentGrid = 200;
inline constexpr int kTrajectorySamples = 200;
inline constexpr int kReferenceCtrlPoints = 15;

struct TrialResult {
    int n_waypoints = 0;
    std::uint64_t seed = 0;
    std::string status;  // solver status, or error:<stage>: <what>
    bool passed = false;
    int sweeps = 0;
    double kkt = 0.0;
    double kkt_tol = 0.0;
    double factorize_s = 0.0;
    double sweep_s = 0.0;
    double corridor_s = 0.0;
    double total_s = 0.0;
    double horizon = 0.0;
    double rho_effective = 0.0;
    int decision_vars = 0;
    double avg_accel_reference = 0.0;
    double avg_accel_solution = 0.0;
    double improvement = 0.0;
    int containment_violations = 0;
    double min_margin = 0.0;
    std::string block_mode;
    int N_y = 0;
    int N_J = 0;
    int cost_samples = 0;
    std::vector<int> fixed_blocks;
    std::vector<int> room_sequence;
    Eigen::VectorXd y;  // flattened solution
    std::vector<std::optional<double>> lambda;
    nlohmann::json corridor;       // serialized CorridorSpec
    Eigen::MatrixXd trajectory;    // 10 x kTrajectorySamples: eps, q, dq/dt, d2q/dt2

    nlohmann::json to_json() const;
};

TrialResult run_trial(const BenchScenario& s);

std::string csv_header();
std::string csv_row(const TrialResult& t);
std::string trajectory_csv(const TrialResult& t);

struct SuiteSummary {
    int n_trials = 0;
    int n_passed = 0;
    double pass_rate = 0.0;
    double mean_improvement_passing = 0.0;

    nlohmann::json to_json() const;
};

// Sweeps waypoint counts x seeds; writes per-trial JSON, per-trial trajectory
// CSV, aggregate.csv and summary.json into out_dir.
SuiteSummary run_suite(const BenchConfig& cfg, const std::vector<int>& waypoint_counts,
                       const std::vector<std::uint64_t>& seeds, const std::string& out_dir);

// Rebuilds corridor and quadratic from a stored trial and re-checks
// containment on the validation grid and the KKT residual of the stored
// solution against the stored tolerance.
nlohmann::json validate_trial(const nlohmann::json& trial);

}  // namespace bench
}  // namespace otrp
