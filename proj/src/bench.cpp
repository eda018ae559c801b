#include "otrp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "otrp/rng.hpp"

namespace otrp {
namespace bench {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_u64(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%llu", static_cast<unsigned long long>(v));
    return buf;
}

// CSV cells must stay comma-free; error messages may carry commas.
std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
    Eigen::VectorXd v(a.size());
    for (size_t i = 0; i < a.size(); ++i) v(int(i)) = a[i].get<double>();
    return v;
}

double curve_arc_length(const BezierCurve& c, int segments = 512) {
    double total = 0.0;
    Eigen::VectorXd prev = c.eval(0.0);
    for (int i = 1; i <= segments; ++i) {
        Eigen::VectorXd cur = c.eval(double(i) / segments);
        total += (cur - prev).norm();
        prev = std::move(cur);
    }
    return total;
}

}  // namespace

std::array<int, 3> RoomGrid::coords(int idx) const {
    return {idx % shape[0], (idx / shape[0]) % shape[1], idx / (shape[0] * shape[1])};
}

Eigen::Vector3d RoomGrid::room_center(int idx) const {
    const std::array<int, 3> c = coords(idx);
    Eigen::Vector3d out;
    for (int d = 0; d < 3; ++d) out(d) = (c[size_t(d)] + 0.5) * room_size(d);
    return out;
}

bool RoomGrid::adjacent(int a, int b) const {
    if (a == b) return false;
    const std::array<int, 3> ca = coords(a), cb = coords(b);
    int diff = 0;
    for (int d = 0; d < 3; ++d) diff += std::abs(ca[size_t(d)] - cb[size_t(d)]);
    return diff == 1;
}

Eigen::Vector3d RoomGrid::door_center(int a, int b) const {
    if (!adjacent(a, b)) throw std::invalid_argument("RoomGrid: rooms are not adjacent");
    const std::array<int, 3> ca = coords(a), cb = coords(b);
    Eigen::Vector3d out;
    for (int d = 0; d < 3; ++d) {
        if (ca[size_t(d)] != cb[size_t(d)])
            out(d) = (std::max(ca[size_t(d)], cb[size_t(d)])) * room_size(d);
        else
            out(d) = (ca[size_t(d)] + 0.5) * room_size(d);
    }
    return out;
}

std::vector<int> RoomGrid::neighbors(int idx) const {
    const std::array<int, 3> c = coords(idx);
    const int stride[3] = {1, shape[0], shape[0] * shape[1]};
    std::vector<int> out;
    for (int d = 0; d < 3; ++d) {
        if (c[size_t(d)] > 0) out.push_back(idx - stride[d]);
        if (c[size_t(d)] + 1 < shape[d]) out.push_back(idx + stride[d]);
    }
    return out;
}

nlohmann::json RoomGrid::to_json() const {
    nlohmann::json j;
    j["grid_shape"] = {shape[0], shape[1], shape[2]};
    j["room_size"] = {room_size(0), room_size(1), room_size(2)};
    j["door_size"] = door_size;
    j["points_per_wall"] = points_per_wall;
    j["seed"] = seed;
    nlohmann::json pts = nlohmann::json::array();
    for (int i = 0; i < collision_points.cols(); ++i)
        pts.push_back({collision_points(0, i), collision_points(1, i), collision_points(2, i)});
    j["collision_points"] = std::move(pts);
    return j;
}

RoomGrid RoomGrid::from_json(const nlohmann::json& j) {
    RoomGrid g;
    for (int d = 0; d < 3; ++d) {
        g.shape[size_t(d)] = j.at("grid_shape").at(size_t(d)).get<int>();
        g.room_size(d) = j.at("room_size").at(size_t(d)).get<double>();
    }
    g.door_size = j.at("door_size").get<double>();
    g.points_per_wall = j.at("points_per_wall").get<int>();
    g.seed = j.at("seed").get<std::uint64_t>();
    const auto& pts = j.at("collision_points");
    g.collision_points.resize(3, Eigen::Index(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i)
        for (int d = 0; d < 3; ++d) g.collision_points(d, Eigen::Index(i)) = pts[i][size_t(d)].get<double>();
    return g;
}

RoomGrid generate_environment(const std::array<int, 3>& shape, const Eigen::Vector3d& room_size,
                              double door_size, int points_per_wall, std::uint64_t seed) {
    for (int d = 0; d < 3; ++d) {
        if (shape[size_t(d)] < 1) throw std::invalid_argument("generate_environment: shape must be positive");
        if (!(room_size(d) > 0.0))
            throw std::invalid_argument("generate_environment: room size must be positive");
    }
    if (!(door_size > 0.0) || door_size >= room_size.minCoeff())
        throw std::invalid_argument(
            "generate_environment: door size must be positive and smaller than every wall extent");
    if (points_per_wall < 1)
        throw std::invalid_argument("generate_environment: points per wall must be positive");

    RoomGrid g;
    g.shape = shape;
    g.room_size = room_size;
    g.door_size = door_size;
    g.points_per_wall = points_per_wall;
    g.seed = seed;

    const int n = g.n_rooms();
    std::vector<Eigen::Vector3d> pts;
    for (int d = 0; d < 3; ++d) {
        const int e1 = (d + 1) % 3, e2 = (d + 2) % 3;
        for (int idx = 0; idx < n; ++idx) {
            const std::array<int, 3> c = g.coords(idx);
            if (c[size_t(d)] + 1 >= shape[size_t(d)]) continue;
            Rng rng(mix_seed(seed, std::uint64_t(d) * std::uint64_t(n) + std::uint64_t(idx)));
            const double plane = (c[size_t(d)] + 1) * room_size(d);
            for (int k = 0; k < points_per_wall; ++k) {
                for (int attempt = 0; attempt < 100000; ++attempt) {
                    const double t1 = rng.uniform(0.0, room_size(e1));
                    const double t2 = rng.uniform(0.0, room_size(e2));
                    const bool in_door = std::abs(t1 - 0.5 * room_size(e1)) < 0.5 * door_size &&
                                         std::abs(t2 - 0.5 * room_size(e2)) < 0.5 * door_size;
                    if (in_door) continue;
                    Eigen::Vector3d p;
                    p(d) = plane;
                    p(e1) = c[size_t(e1)] * room_size(e1) + t1;
                    p(e2) = c[size_t(e2)] * room_size(e2) + t2;
                    pts.push_back(p);
                    break;
                }
            }
        }
    }
    g.collision_points.resize(3, Eigen::Index(pts.size()));
    for (size_t i = 0; i < pts.size(); ++i) g.collision_points.col(Eigen::Index(i)) = pts[i];
    return g;
}

std::vector<int> random_room_sequence(const RoomGrid& grid, int length, std::uint64_t seed) {
    if (length < 1) throw std::invalid_argument("random_room_sequence: length must be positive");
    if (grid.n_rooms() < 2 && length > 1)
        throw std::invalid_argument("random_room_sequence: a single-room grid has no walks");
    Rng rng(seed);
    std::vector<int> seq;
    seq.reserve(size_t(length));
    int cur = rng.uniform_int(0, grid.n_rooms() - 1);
    int prev = -1;
    seq.push_back(cur);
    while (int(seq.size()) < length) {
        std::vector<int> cands;
        for (int nb : grid.neighbors(cur))
            if (nb != prev) cands.push_back(nb);
        if (cands.empty()) cands = grid.neighbors(cur);  // dead end, back out
        const int next = cands[size_t(rng.uniform_int(0, int(cands.size()) - 1))];
        prev = cur;
        cur = next;
        seq.push_back(cur);
    }
    return seq;
}

Eigen::Matrix3Xd initial_waypoints(const RoomGrid& grid, const std::vector<int>& room_sequence,
                                   int n_waypoints) {
    if (room_sequence.size() < 2)
        throw std::invalid_argument("initial_waypoints: need at least two rooms");
    if (n_waypoints < 2) throw std::invalid_argument("initial_waypoints: need at least two waypoints");
    Eigen::Matrix3Xd verts(3, Eigen::Index(2 * room_sequence.size() - 1));
    verts.col(0) = grid.room_center(room_sequence[0]);
    for (size_t i = 1; i < room_sequence.size(); ++i) {
        if (!grid.adjacent(room_sequence[i - 1], room_sequence[i]))
            throw std::invalid_argument("initial_waypoints: consecutive rooms are not adjacent");
        verts.col(Eigen::Index(2 * i - 1)) = grid.door_center(room_sequence[i - 1], room_sequence[i]);
        verts.col(Eigen::Index(2 * i)) = grid.room_center(room_sequence[i]);
    }
    return resample_polyline(verts, n_waypoints);
}

double HorizonPolicy::resolve(double reference_arc_length) const {
    if (arclength) return reference_arc_length;  // unit nominal speed
    return fixed_value;
}

nlohmann::json HorizonPolicy::to_json() const {
    if (arclength) return "arclength";
    return fixed_value;
}

HorizonPolicy HorizonPolicy::from_json(const nlohmann::json& j) {
    HorizonPolicy h;
    if (j.is_string()) {
        if (j.get<std::string>() != "arclength")
            throw std::invalid_argument("horizon_policy: expected \"arclength\" or a number of seconds");
        h.arclength = true;
    } else if (j.is_number()) {
        h.arclength = false;
        h.fixed_value = j.get<double>();
        if (!(h.fixed_value > 0.0))
            throw std::invalid_argument("horizon_policy: fixed horizon must be positive");
    } else {
        throw std::invalid_argument("horizon_policy: expected \"arclength\" or a number of seconds");
    }
    return h;
}

nlohmann::json BenchConfig::to_json() const {
    nlohmann::json j;
    j["grid_shape"] = {grid_shape[0], grid_shape[1], grid_shape[2]};
    j["room_size"] = {room_size(0), room_size(1), room_size(2)};
    j["door_size"] = door_size;
    j["points_per_wall"] = points_per_wall;
    j["n_waypoints"] = n_waypoints;
    j["N_y"] = N_y;
    j["N_J"] = N_J;
    j["samples"] = samples;
    j["horizon_policy"] = horizon_policy.to_json();
    j["rho"] = rho;
    j["solver"] = {{"max_sweeps", solver.max_sweeps},
                   {"kkt_tol", solver.kkt_tol},
                   {"block_mode", to_string(solver.block_mode)}};
    j["seed"] = seed;
    return j;
}

BenchConfig BenchConfig::from_json(const nlohmann::json& j) {
    BenchConfig c;
    for (int d = 0; d < 3; ++d) {
        c.grid_shape[size_t(d)] = j.at("grid_shape").at(size_t(d)).get<int>();
        c.room_size(d) = j.at("room_size").at(size_t(d)).get<double>();
    }
    c.door_size = j.at("door_size").get<double>();
    c.points_per_wall = j.at("points_per_wall").get<int>();
    c.n_waypoints = j.at("n_waypoints").get<int>();
    c.N_y = j.at("N_y").get<int>();
    c.N_J = j.at("N_J").get<int>();
    c.samples = j.at("samples").get<int>();
    c.horizon_policy = HorizonPolicy::from_json(j.at("horizon_policy"));
    c.rho = j.at("rho").get<double>();
    const auto& s = j.at("solver");
    c.solver.max_sweeps = s.at("max_sweeps").get<int>();
    c.solver.kkt_tol = s.at("kkt_tol").get<double>();
    c.solver.block_mode = block_mode_from_string(s.at("block_mode").get<std::string>());
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

BenchConfig default_config() { return BenchConfig{}; }

void BenchScenario::validate() const {
    if (n_waypoints < 11 || n_waypoints > 30)
        throw std::invalid_argument("BenchScenario: waypoint count must lie in [11, 30]");
    if (room_sequence.size() < 2)
        throw std::invalid_argument("BenchScenario: need at least two rooms");
    for (size_t i = 1; i < room_sequence.size(); ++i)
        if (!grid.adjacent(room_sequence[i - 1], room_sequence[i]))
            throw std::invalid_argument("BenchScenario: consecutive rooms are not adjacent");
    if (N_J < 5)
        throw std::invalid_argument(
            "BenchScenario: need N_J >= 5 so a free block remains after fixing the ends");
    LiftConfig cfg{3, N_y, N_J};
    cfg.validate();
    if (cost_samples < 2) throw std::invalid_argument("BenchScenario: need at least two cost samples");
    solver.validate();
}

int rooms_for_waypoints(int n_waypoints) { return std::max(2, n_waypoints / 3 + 1); }

BenchScenario scenario_from_config(const BenchConfig& cfg, int n_waypoints, std::uint64_t seed) {
    BenchScenario s;
    s.grid = generate_environment(cfg.grid_shape, cfg.room_size, cfg.door_size,
                                  cfg.points_per_wall, seed);
    s.room_sequence =
        random_room_sequence(s.grid, rooms_for_waypoints(n_waypoints), mix_seed(seed, std::uint64_t(n_waypoints)));
    s.n_waypoints = n_waypoints;
    s.N_y = cfg.N_y;
    s.N_J = cfg.N_J;
    s.cost_samples = cfg.samples;
    s.horizon_policy = cfg.horizon_policy;
    s.rho = cfg.rho;
    s.solver = cfg.solver;
    s.seed = seed;
    return s;
}

nlohmann::json TrialResult::to_json() const {
    nlohmann::json j;
    j["n_waypoints"] = n_waypoints;
    j["seed"] = seed;
    j["status"] = status;
    j["passed"] = passed;
    j["sweeps"] = sweeps;
    j["kkt"] = kkt;
    j["kkt_tol"] = kkt_tol;
    j["factorize_s"] = factorize_s;
    j["sweep_s"] = sweep_s;
    j["corridor_s"] = corridor_s;
    j["total_s"] = total_s;
    j["horizon"] = horizon;
    j["rho_effective"] = rho_effective;
    j["decision_vars"] = decision_vars;
    j["avg_accel_reference"] = avg_accel_reference;
    j["avg_accel_solution"] = avg_accel_solution;
    j["improvement"] = improvement;
    j["containment_violations"] = containment_violations;
    j["min_margin"] = min_margin;
    j["block_mode"] = block_mode;
    j["N_y"] = N_y;
    j["N_J"] = N_J;
    j["cost_samples"] = cost_samples;
    j["fixed_blocks"] = fixed_blocks;
    j["room_sequence"] = room_sequence;
    j["y"] = vec_to_json(y);
    nlohmann::json lam = nlohmann::json::array();
    for (const auto& l : lambda) {
        if (l)
            lam.push_back(*l);
        else
            lam.push_back(nullptr);
    }
    j["lambda"] = std::move(lam);
    j["corridor"] = corridor;
    return j;
}

TrialResult run_trial(const BenchScenario& s) {
    s.validate();
    const auto t_start = std::chrono::steady_clock::now();

    TrialResult t;
    t.n_waypoints = s.n_waypoints;
    t.seed = s.seed;
    t.N_y = s.N_y;
    t.N_J = s.N_J;
    t.cost_samples = s.cost_samples;
    t.room_sequence = s.room_sequence;
    t.block_mode = to_string(s.solver.block_mode);
    t.kkt_tol = s.solver.kkt_tol;
    t.decision_vars = s.N_J * s.N_y;
    t.fixed_blocks = {0, 1, s.N_J - 2, s.N_J - 1};

    CorridorSpec corridor;
    double horizon = 0.0;
    try {
        const Eigen::Matrix3Xd waypoints = initial_waypoints(s.grid, s.room_sequence, s.n_waypoints);
        const ReferenceFit ref = fit_reference(waypoints, kReferenceCtrlPoints, true);
        horizon = s.horizon_policy.resolve(curve_arc_length(ref.curve));
        if (!(horizon > 0.0)) throw std::runtime_error("non-positive horizon");

        const double cutoff = 2.0 * s.grid.room_size.norm();
        // Every transit threads a door, so free-space claims wider than the
        // door add nothing; capping radii at the door scale also keeps the
        // radius profile in a band the least-squares axes fit tracks without
        // oscillation.
        const double r_cap = s.grid.door_size;
        const double u_min = 1.0 / (r_cap * r_cap);
        std::vector<CorridorKnot> knots;
        std::vector<Eigen::MatrixXd> ptsets;
        knots.reserve(size_t(s.n_waypoints));
        for (int k = 0; k < s.n_waypoints; ++k) {
            const double eps = ref.waypoint_params[size_t(k)];
            const Eigen::VectorXd center = ref.curve.eval(eps);
            std::vector<int> near;
            for (int i = 0; i < s.grid.collision_points.cols(); ++i)
                if ((s.grid.collision_points.col(i) - center).norm() <= cutoff) near.push_back(i);
            Eigen::MatrixXd pts(3, Eigen::Index(near.size()));
            for (size_t i = 0; i < near.size(); ++i)
                pts.col(Eigen::Index(i)) = s.grid.collision_points.col(near[i]);
            knots.push_back({eps, fit_ellipsoid(center, pts, u_min)});
            ptsets.push_back(std::move(pts));
        }
        // The axes control count trades tracking against overshoot; keep the
        // candidate that needs the mildest exclusion shrink.
        double best_shrink = -1.0;
        std::string last_error = "no positive axes fit";
        for (int nc = std::min(12, s.n_waypoints); nc >= 4; --nc) {
            try {
                CorridorSpec candidate = CorridorSpec::build(knots, ref.curve, &ptsets, nc);
                if (candidate.shrink_factor() > best_shrink) {
                    best_shrink = candidate.shrink_factor();
                    corridor = std::move(candidate);
                }
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (best_shrink < 0.0) throw std::runtime_error(last_error);
    } catch (const std::exception& e) {
        t.status = std::string("error:corridor: ") + e.what();
        t.total_s = seconds_since(t_start);
        return t;
    }
    t.corridor_s = seconds_since(t_start);
    t.horizon = horizon;
    t.corridor = corridor.to_json();

    const LiftConfig cfg{3, s.N_y, s.N_J};
    const LiftedMap map(cfg, std::move(corridor));
    const CostSpec cost = CostSpec::uniform(2, s.cost_samples, horizon, s.rho);

    try {
        QuadraticObjective qobj = build_quadratic(map, cost);
        t.rho_effective = qobj.rho_effective;

        std::map<int, Eigen::VectorXd> fixed;
        for (int b : t.fixed_blocks) fixed[b] = Eigen::VectorXd::Zero(s.N_y);
        const OrthTrpProblem problem = qobj.problem.with_fixed_blocks(std::move(fixed));

        const auto [state, report] = otrp::solve(problem, s.solver);
        t.status = to_string(report.status);
        t.sweeps = report.sweeps;
        t.kkt = report.kkt_residual;
        t.factorize_s = report.factorize_seconds;
        t.sweep_s = report.sweep_seconds;
        t.y = state.flatten();
        t.lambda = state.lambda_blocks;

        const ParamPoint y_sol = ParamPoint::from_flat(cfg, t.y);
        t.avg_accel_solution = average_acceleration(map, cost, y_sol);
        t.avg_accel_reference = average_acceleration(map, cost, ParamPoint::zero(cfg));
        t.improvement = t.avg_accel_reference > 1e-12
                            ? (t.avg_accel_reference - t.avg_accel_solution) / t.avg_accel_reference
                            : 0.0;

        t.min_margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < kContainmentGrid; ++i) {
            const double eps = double(i) / (kContainmentGrid - 1);
            const auto c = map.corridor().contains(eps, map.traj_eval(y_sol, eps, 0));
            t.min_margin = std::min(t.min_margin, c.margin);
            if (!c.inside) ++t.containment_violations;
        }

        t.trajectory.resize(10, kTrajectorySamples);
        for (int i = 0; i < kTrajectorySamples; ++i) {
            const double eps = double(i) / (kTrajectorySamples - 1);
            t.trajectory(0, i) = eps;
            t.trajectory.block<3, 1>(1, i) = map.traj_eval(y_sol, eps, 0);
            t.trajectory.block<3, 1>(4, i) = map.traj_eval(y_sol, eps, 1) / horizon;
            t.trajectory.block<3, 1>(7, i) = map.traj_eval(y_sol, eps, 2) / (horizon * horizon);
        }

        t.passed = report.status == SolveStatus::kkt_met && t.containment_violations == 0;
    } catch (const std::exception& e) {
        t.status = std::string("error:objective: ") + e.what();
    }
    t.total_s = seconds_since(t_start);
    return t;
}

std::string csv_header() {
    return "n_waypoints,seed,total_s,factorize_s,sweep_s,sweeps,kkt,improvement,status";
}

std::string csv_row(const TrialResult& t) {
    std::string row;
    row += std::to_string(t.n_waypoints);
    row += ',';
    row += fmt_u64(t.seed);
    row += ',';
    row += fmt_g17(t.total_s);
    row += ',';
    row += fmt_g17(t.factorize_s);
    row += ',';
    row += fmt_g17(t.sweep_s);
    row += ',';
    row += std::to_string(t.sweeps);
    row += ',';
    row += fmt_g17(t.kkt);
    row += ',';
    row += fmt_g17(t.improvement);
    row += ',';
    row += csv_safe(t.status);
    return row;
}

std::string trajectory_csv(const TrialResult& t) {
    std::string out = "eps,qx,qy,qz,vx,vy,vz,ax,ay,az\n";
    for (int i = 0; i < t.trajectory.cols(); ++i) {
        for (int r = 0; r < 10; ++r) {
            out += fmt_g17(t.trajectory(r, i));
            out += r + 1 < 10 ? ',' : '\n';
        }
    }
    return out;
}

nlohmann::json SuiteSummary::to_json() const {
    return {{"n_trials", n_trials},
            {"n_passed", n_passed},
            {"pass_rate", pass_rate},
            {"mean_improvement_passing", mean_improvement_passing}};
}

SuiteSummary run_suite(const BenchConfig& cfg, const std::vector<int>& waypoint_counts,
                       const std::vector<std::uint64_t>& seeds, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::ofstream agg(fs::path(out_dir) / "aggregate.csv");
    if (!agg) throw std::runtime_error("run_suite: cannot write to " + out_dir);
    agg << csv_header() << '\n';

    SuiteSummary summary;
    double improvement_sum = 0.0;
    for (int w : waypoint_counts) {
        for (std::uint64_t seed : seeds) {
            const TrialResult t = run_trial(scenario_from_config(cfg, w, seed));
            agg << csv_row(t) << '\n';

            const std::string stem = "trial_w" + std::to_string(w) + "_s" + fmt_u64(seed);
            std::ofstream(fs::path(out_dir) / (stem + ".json")) << t.to_json().dump(2) << '\n';
            if (t.trajectory.cols() > 0)
                std::ofstream(fs::path(out_dir) / (stem + "_traj.csv")) << trajectory_csv(t);

            ++summary.n_trials;
            if (t.passed) {
                ++summary.n_passed;
                improvement_sum += t.improvement;
            }
        }
    }
    summary.pass_rate = summary.n_trials > 0 ? double(summary.n_passed) / summary.n_trials : 0.0;
    summary.mean_improvement_passing =
        summary.n_passed > 0 ? improvement_sum / summary.n_passed : 0.0;
    std::ofstream(fs::path(out_dir) / "summary.json") << summary.to_json().dump(2) << '\n';
    return summary;
}

nlohmann::json validate_trial(const nlohmann::json& trial) {
    const CorridorSpec corridor = CorridorSpec::from_json(trial.at("corridor"));
    const int N_y = trial.at("N_y").get<int>();
    const int N_J = trial.at("N_J").get<int>();
    const LiftConfig cfg{corridor.config_dim(), N_y, N_J};
    const LiftedMap map(cfg, corridor);

    const Eigen::VectorXd y = vec_from_json(trial.at("y"));
    const ParamPoint yp = ParamPoint::from_flat(cfg, y);

    int violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kContainmentGrid; ++i) {
        const double eps = double(i) / (kContainmentGrid - 1);
        const auto c = map.corridor().contains(eps, map.traj_eval(yp, eps, 0));
        min_margin = std::min(min_margin, c.margin);
        if (!c.inside) ++violations;
    }

    const CostSpec cost = CostSpec::uniform(2, trial.at("cost_samples").get<int>(),
                                            trial.at("horizon").get<double>(),
                                            trial.at("rho_effective").get<double>());
    QuadraticObjective qobj = build_quadratic(map, cost);
    std::map<int, Eigen::VectorXd> fixed;
    for (const auto& b : trial.at("fixed_blocks")) fixed[b.get<int>()] = Eigen::VectorXd::Zero(N_y);
    const OrthTrpProblem problem = qobj.problem.with_fixed_blocks(std::move(fixed));

    std::vector<Eigen::VectorXd> y_blocks;
    std::vector<std::optional<double>> lambda_blocks;
    for (int b = 0; b < N_J; ++b) y_blocks.push_back(y.segment(b * N_y, N_y));
    for (const auto& l : trial.at("lambda")) {
        if (l.is_null())
            lambda_blocks.push_back(std::nullopt);
        else
            lambda_blocks.push_back(l.get<double>());
    }

    const double kkt = kkt_residual(problem, y_blocks, lambda_blocks);
    const double kkt_tol = trial.at("kkt_tol").get<double>();
    const bool kkt_ok = kkt <= kkt_tol;
    const bool containment_ok = violations == 0;

    return {{"recomputed_kkt", kkt},           {"kkt_tol", kkt_tol},
            {"kkt_ok", kkt_ok},                {"containment_violations", violations},
            {"min_margin", min_margin},        {"containment_ok", containment_ok},
            {"passed", kkt_ok && containment_ok}};
}

}  // namespace bench
}  // namespace otrp
