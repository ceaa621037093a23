#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pursuit/extensions.hpp"
#include "pursuit/integrate.hpp"
#include "pursuit/polyhedron.hpp"
#include "pursuit/quadcopter.hpp"
#include "pursuit/shapes.hpp"

namespace pursuit {

enum class SimMode { PointMass, Quadcopter };

/// Target formation: a polygon spec, or a polyhedral development reduced to
/// its minimal PPS, with optional template positions for reference.
struct FormationSetup {
  enum class Kind { Polygon, Polyhedron } kind = Kind::Polygon;
  PolygonSpec polygon;
  MinimalPPS pps;
  int robot_count = 0;
  ConstraintMatrix constraints;
};

FormationSetup polygon_formation(const PolygonSpec& spec);
FormationSetup polyhedron_formation(const Development& d, int robot_count, int root_face = 0);

struct InitialBall {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
};

struct SimConfig {
  double dt = 1e-3;
  double t_end = 10.0;
  Integrator integrator = Integrator::Rk4;
};

struct DisturbanceSpec {
  double angle_max_deg = 0.0;  // uniform per-robot rotation-angle error, resampled each window
  bool enabled() const { return angle_max_deg > 0.0; }
};

/// Complete description of one simulation run.
struct Scenario {
  std::string name;
  std::string description;
  std::string figure_tag;

  FormationSetup formation;

  // Polygon-mode controller; for polyhedra the per-face gain/horizon below.
  CyclicParams cyclic;
  double face_gain = 1.0;
  int face_horizon = 1;

  std::optional<SizeParams> size;
  std::optional<CenterParams> center;
  std::optional<CollisionParams> collision;

  SimConfig sim;
  double tau = 0.1;
  std::uint64_t seed = 0;
  DisturbanceSpec disturbance;

  SimMode mode = SimMode::PointMass;
  QuadParams quad;
  TrackerGains tracker;

  std::variant<VecX, InitialBall> initial = VecX();
  bool reindex = true;  // sort robots by projected angle before starting

  int robot_count() const { return formation.robot_count; }
};

struct Event {
  double t = 0.0;
  std::string type;
  std::string detail;
};

struct TrajectoryLog {
  std::vector<double> times;
  std::vector<VecX> positions;   // stacked 3n per sample
  std::vector<VecX> velocities;  // quadcopter mode only
  std::vector<double> formation_error;  // ||Vbar x||
  std::vector<VecX> side_errors;        // p_i over the size-controlled cycle
  std::vector<double> p_bar;
  std::vector<double> min_distance;
  std::vector<double> center_error;
  std::vector<double> control_norm;  // ||u_formation||_2
  std::vector<Event> events;

  std::string termination = "completed";  // completed | collision | divergence
  bool completed() const { return termination == "completed"; }
};

/// Permutation ordering robots by projected angle about the projected
/// centroid (clockwise about the plane normal, matching the constraint
/// winding), canonicalized to start at robot 0. Coincident projections fall
/// back to original-index order and are flagged.
std::vector<int> assign_indices(const std::vector<Vec3>& positions, const Mat3& plane_rotation,
                                bool* tie_flag = nullptr);

/// Deterministic fixed-step simulation of the scenario.
TrajectoryLog run(const Scenario& scenario);

struct RunSummary {
  std::uint64_t seed = 0;
  bool collided = false;
  bool converged_shape = false;
  bool converged_size = false;
  bool converged_center = false;
  double final_formation_error = 0.0;
  double initial_formation_error = 0.0;
  double final_p_bar = 0.0;
  double final_center_error = 0.0;
  double min_distance = 0.0;
  std::string termination;
};

struct MonteCarloThresholds {
  double shape_abs = 0.05;       // final ||Vbar x||
  double size_rel = 0.005;       // |p_bar|
  double center_abs = 0.10;      // ||x_c - x_0||, metres
};

struct MonteCarloReport {
  int samples = 0;
  int converged = 0;
  int collisions = 0;
  MonteCarloThresholds thresholds;
  std::vector<RunSummary> runs;
};

RunSummary summarize(const Scenario& scenario, const TrajectoryLog& log,
                     const MonteCarloThresholds& thresholds);

/// Seeded campaign randomizing initial positions in a ball; sub-run seeds are
/// derived deterministically and runs execute in parallel without affecting
/// the result.
MonteCarloReport monte_carlo(const Scenario& base, int samples, const InitialBall& ball,
                             const MonteCarloThresholds& thresholds = {});

}  // namespace pursuit
