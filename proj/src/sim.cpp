#include "pursuit/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "pursuit/rng.hpp"

namespace pursuit {

FormationSetup polygon_formation(const PolygonSpec& spec) {
  FormationSetup f;
  f.kind = FormationSetup::Kind::Polygon;
  f.polygon = spec;
  f.robot_count = spec.n;
  f.constraints = build_polygon_V(spec);
  return f;
}

FormationSetup polyhedron_formation(const Development& d, int robot_count, int root_face) {
  FormationSetup f;
  f.kind = FormationSetup::Kind::Polyhedron;
  f.pps = extract_minimal_pps(d, robot_count, root_face);
  f.robot_count = robot_count;
  f.constraints = build_reduced_V(f.pps, robot_count);
  return f;
}

std::vector<int> assign_indices(const std::vector<Vec3>& positions, const Mat3& plane_rotation,
                                bool* tie_flag) {
  const int n = int(positions.size());
  if (n < 3) throw std::invalid_argument("assign_indices: need at least 3 robots");
  Vec3 centroid = Vec3::Zero();
  std::vector<Vec3> local(n);
  for (int i = 0; i < n; ++i) {
    local[i] = plane_rotation * positions[i];
    centroid += local[i];
  }
  centroid /= double(n);

  std::vector<double> angle(n);
  for (int i = 0; i < n; ++i)
    angle[i] = std::atan2(local[i].y() - centroid.y(), local[i].x() - centroid.x());

  if (tie_flag) {
    *tie_flag = false;
    for (int i = 0; i < n && !*tie_flag; ++i)
      for (int j = i + 1; j < n; ++j)
        if (std::abs(angle[i] - angle[j]) < 1e-12) {
          *tie_flag = true;
          break;
        }
  }

  // Decreasing angle = clockwise about the plane normal, the winding the
  // rotational constraints encode.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (angle[a] != angle[b]) return angle[a] > angle[b];
    return a < b;
  });
  const auto zero_at = std::find(order.begin(), order.end(), 0);
  std::rotate(order.begin(), zero_at, order.end());
  return order;
}

namespace {

// Symmetric cyclic control with a common angle offset (hybrid size term) and
// optional per-robot angle perturbations (disturbance injection).
VecX modified_cyclic_control(const VecX& x, const CyclicParams& p, double alpha_offset,
                             const VecX* per_robot_delta) {
  const int n = p.n;
  const int N = p.horizon();
  VecX u = VecX::Zero(3 * n);
  for (int i = 0; i < n; ++i) {
    const Vec3 xi = x.segment<3>(3 * i);
    const double delta = per_robot_delta ? (*per_robot_delta)[i] : 0.0;
    Vec3 acc = Vec3::Zero();
    for (int m = 1; m <= N; ++m) {
      const Mat3 rot = similarity_rotate(
          p.plane_rotation, rotation_about_z(p.angles[m - 1] + alpha_offset + delta));
      const Vec3 fwd = x.segment<3>(3 * ((i + m) % n)) - xi;
      const Vec3 rear = x.segment<3>(3 * (((i - m) % n + n) % n)) - xi;
      acc += p.gains[m - 1] * (rot * fwd + rot.transpose() * rear);
    }
    u.segment<3>(3 * i) = acc;
  }
  return u;
}

struct PolyhedronSizeLayout {
  std::vector<int> face0_ids;
  std::vector<bool> in_face0;
  CyclicParams face0_params;
  SharedEdgeInfo shared_edge;
};

PolyhedronSizeLayout make_size_layout(const Scenario& sc) {
  const MinimalPPS& pps = sc.formation.pps;
  if (pps.face_count() < 2)
    throw std::invalid_argument("size control on a polyhedron needs at least two faces");
  PolyhedronSizeLayout lay;
  lay.face0_ids = pps.faces[0].vertex_ids;
  lay.in_face0.assign(sc.robot_count(), false);
  for (int id : lay.face0_ids) lay.in_face0[id] = true;

  const int n0 = int(lay.face0_ids.size());
  lay.face0_params.n = n0;
  const int N = std::min(sc.face_horizon, n0 - 2);
  lay.face0_params.gains = VecX::Constant(N, sc.face_gain);
  lay.face0_params.angles = fixed_size_angles(n0, N);
  lay.face0_params.plane_rotation = pps.faces[0].normal_rotation;

  const Rule* link = nullptr;
  for (const Rule& r : pps.rules)
    if (r.face_a == 0 || r.face_b == 0) {
      link = &r;
      break;
    }
  if (!link) throw std::logic_error("make_size_layout: face 0 has no tree neighbor");
  const int other = link->face_a == 0 ? link->face_b : link->face_a;

  // Orient the shared edge along face 0's winding.
  int tail = -1, head = -1;
  for (int i = 0; i < n0; ++i) {
    const int a = lay.face0_ids[i], b = lay.face0_ids[(i + 1) % n0];
    if ((a == link->edge[0] && b == link->edge[1]) || (a == link->edge[1] && b == link->edge[0])) {
      tail = a;
      head = b;
      break;
    }
  }
  if (tail < 0) throw std::logic_error("make_size_layout: shared edge not on face 0 boundary");
  lay.shared_edge.edge_tail = tail;
  lay.shared_edge.edge_head = head;
  lay.shared_edge.q2_normal_rotation = pps.faces[other].normal_rotation;
  return lay;
}

// Normalized side-length errors along the cycle used for size feedback:
// the whole polygon, or face 0 of a polyhedron.
std::pair<VecX, double> cycle_errors(const VecX& x, double rho,
                                     const std::vector<int>* face0_ids) {
  if (!face0_ids) return inter_robot_errors(x, rho);
  const int n0 = int(face0_ids->size());
  VecX sub(3 * n0);
  for (int i = 0; i < n0; ++i) sub.segment<3>(3 * i) = x.segment<3>(3 * (*face0_ids)[i]);
  return inter_robot_errors(sub, rho);
}

struct FormationLayer {
  const Scenario* sc = nullptr;
  std::vector<CyclicParams> face_params;   // polyhedron mode
  std::optional<PolyhedronSizeLayout> size_layout;

  // Hybrid inputs, frozen within each lag window.
  double alpha_s = 0.0;
  Vec3 center_delayed = Vec3::Zero();
  VecX delta_alpha;  // per-robot disturbance, radians

  void init(const Scenario& scenario) {
    sc = &scenario;
    delta_alpha = VecX::Zero(scenario.robot_count());
    if (scenario.formation.kind == FormationSetup::Kind::Polyhedron) {
      face_params =
          default_face_params(scenario.formation.pps, scenario.face_gain, scenario.face_horizon);
      if (scenario.size) size_layout = make_size_layout(scenario);
    }
  }

  // Shape-forming velocity command (cyclic / polyhedral part only).
  VecX shape_command(const VecX& x) const {
    const bool disturbed = sc->disturbance.enabled();
    if (sc->formation.kind == FormationSetup::Kind::Polygon) {
      return modified_cyclic_control(x, sc->cyclic, alpha_s,
                                     disturbed ? &delta_alpha : nullptr);
    }
    const MinimalPPS& pps = sc->formation.pps;
    if (!size_layout) return polyhedron_control(x, face_params, pps);

    // Decoupled polyhedral size control: face 0 robots run the hybrid
    // size-modified cyclic law plus the one-sided rotational controller;
    // everyone else runs the standard per-face superposition.
    const PolyhedronSizeLayout& lay = *size_layout;
    VecX u = VecX::Zero(x.size());
    const int n0 = int(lay.face0_ids.size());
    VecX x0(3 * n0);
    for (int i = 0; i < n0; ++i) x0.segment<3>(3 * i) = x.segment<3>(3 * lay.face0_ids[i]);
    const VecX u_face0 = modified_cyclic_control(x0, lay.face0_params, alpha_s, nullptr) +
                         rotational_q1_control(x, lay.face0_ids,
                                               lay.face0_params.plane_rotation, lay.shared_edge);
    for (int i = 0; i < n0; ++i)
      u.segment<3>(3 * lay.face0_ids[i]) = u_face0.segment<3>(3 * i);

    for (size_t k = 1; k < pps.faces.size(); ++k) {
      const Face& f = pps.faces[k];
      const int nk = f.size();
      VecX xk(3 * nk);
      for (int i = 0; i < nk; ++i) xk.segment<3>(3 * i) = x.segment<3>(3 * f.vertex_ids[i]);
      const VecX uk = cyclic_control(xk, face_params[k]);
      for (int i = 0; i < nk; ++i) {
        const int id = f.vertex_ids[i];
        if (!lay.in_face0[id]) u.segment<3>(3 * id) += uk.segment<3>(3 * i);
      }
    }
    return u;
  }

  // Full velocity command; velocity_estimate feeds the LOS collision gate.
  VecX command(const VecX& x, const VecX* velocity_estimate, double* shape_norm,
               bool* collided) const {
    VecX u = shape_command(x);
    if (shape_norm) *shape_norm = u.norm();
    if (sc->center)
      u += center_control(sc->robot_count(), *sc->center, center_delayed);
    if (sc->collision) {
      std::optional<VecX> vel;
      if (sc->collision->variant == CollisionVariant::LosGated) {
        if (velocity_estimate)
          vel = *velocity_estimate;
        else
          vel = u;  // point-mass velocity is the command itself
      }
      CollisionControl cc = collision_control(x, vel, *sc->collision);
      if (collided) *collided = cc.collided;
      u += cc.u;
    }
    return u;
  }
};

constexpr int kQuadDim = 16;  // 13 rigid-body states + 3 tracker integrals

VecX gather_positions(const Scenario& sc, const VecX& state) {
  if (sc.mode == SimMode::PointMass) return state;
  const int n = sc.robot_count();
  VecX x(3 * n);
  for (int i = 0; i < n; ++i) x.segment<3>(3 * i) = state.segment<3>(kQuadDim * i);
  return x;
}

VecX gather_velocities(const Scenario& sc, const VecX& state) {
  const int n = sc.robot_count();
  VecX v = VecX::Zero(3 * n);
  if (sc.mode == SimMode::Quadcopter)
    for (int i = 0; i < n; ++i) v.segment<3>(3 * i) = state.segment<3>(kQuadDim * i + 3);
  return v;
}

double min_pairwise_distance(const VecX& x, std::pair<int, int>* pair = nullptr) {
  const int n = int(x.size() / 3);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double d = (x.segment<3>(3 * j) - x.segment<3>(3 * i)).norm();
      if (d < best) {
        best = d;
        if (pair) *pair = {i, j};
      }
    }
  return best;
}

void validate_scenario(const Scenario& sc) {
  if (sc.robot_count() < 3) throw std::invalid_argument("scenario: need at least 3 robots");
  if (!(sc.sim.dt > 0.0)) throw std::invalid_argument("scenario: dt must be positive");
  if (!(sc.sim.t_end > 0.0)) throw std::invalid_argument("scenario: t_end must be positive");
  const bool hybrid = sc.size.has_value() || sc.center.has_value() || sc.disturbance.enabled();
  if (hybrid && !(sc.tau > 0.0))
    throw std::invalid_argument("scenario: hybrid control needs tau > 0");
  if ((sc.size || sc.center) && sc.sim.dt > sc.tau / 10.0 + 1e-15)
    throw std::invalid_argument("scenario: dt must not exceed tau/10 with size or center control");
  if (sc.disturbance.enabled() && sc.formation.kind != FormationSetup::Kind::Polygon)
    throw std::invalid_argument("scenario: angle disturbances apply to polygon formations only");
  if (sc.formation.kind == FormationSetup::Kind::Polygon) {
    sc.cyclic.validate();
    if (sc.cyclic.n != sc.formation.polygon.n)
      throw std::invalid_argument("scenario: controller robot count mismatch");
    if ((sc.cyclic.plane_rotation - sc.formation.polygon.plane_rotation).norm() > 1e-9)
      throw std::invalid_argument("scenario: controller and formation plane rotations differ");
  }
  if (sc.mode == SimMode::Quadcopter) {
    sc.quad.validate();
    sc.tracker.validate();
    if (sc.tracker.kd_v.norm() != 0.0)
      throw std::invalid_argument("scenario: velocity derivative gain unsupported in simulation");
  }
  if (std::holds_alternative<VecX>(sc.initial) &&
      std::get<VecX>(sc.initial).size() != 3 * sc.robot_count())
    throw std::invalid_argument("scenario: initial positions have wrong dimension");
}

}  // namespace

TrajectoryLog run(const Scenario& sc) {
  validate_scenario(sc);
  const int n = sc.robot_count();
  TrajectoryLog log;

  Rng rng(sc.seed);

  // Initial positions.
  VecX x0(3 * n);
  if (std::holds_alternative<VecX>(sc.initial)) {
    x0 = std::get<VecX>(sc.initial);
  } else {
    const InitialBall& ball = std::get<InitialBall>(sc.initial);
    for (int i = 0; i < n; ++i) x0.segment<3>(3 * i) = rng.in_ball(ball.center, ball.radius);
  }

  if (sc.reindex) {
    Mat3 plane = Mat3::Identity();
    if (sc.formation.kind == FormationSetup::Kind::Polygon)
      plane = sc.formation.polygon.plane_rotation;
    else
      plane = sc.formation.pps.faces[0].normal_rotation;
    std::vector<Vec3> pos(n);
    for (int i = 0; i < n; ++i) pos[i] = x0.segment<3>(3 * i);
    bool tie = false;
    const std::vector<int> order = assign_indices(pos, plane, &tie);
    if (tie) log.events.push_back({0.0, "index_tie", "coincident projections; original order used"});
    VecX permuted(3 * n);
    for (int i = 0; i < n; ++i) permuted.segment<3>(3 * i) = x0.segment<3>(3 * order[i]);
    x0 = permuted;
  }

  // Timing grid; with hybrid control active the step divides the lag window.
  const bool hybrid = sc.size.has_value() || sc.center.has_value() || sc.disturbance.enabled();
  double dt = sc.sim.dt;
  long steps_per_window = 0;
  if (hybrid) {
    steps_per_window = std::max<long>(1, std::lround(sc.tau / dt));
    dt = sc.tau / double(steps_per_window);
  }
  const long n_steps = std::max<long>(1, std::lround(sc.sim.t_end / dt));

  FormationLayer layer;
  layer.init(sc);

  // Full simulation state.
  VecX state;
  if (sc.mode == SimMode::PointMass) {
    state = x0;
  } else {
    state = VecX::Zero(kQuadDim * n);
    for (int i = 0; i < n; ++i) {
      state.segment<3>(kQuadDim * i) = x0.segment<3>(3 * i);
      state[kQuadDim * i + 6] = 1.0;  // identity attitude, hover
    }
  }

  // Lag pipeline: the value sampled at (k-1) tau drives window k; the t = 0
  // sample drives both windows 0 and 1.
  std::vector<double> p_bar_samples;
  std::vector<Vec3> center_samples;
  const double rho = sc.size ? sc.size->rho : 1.0;
  const std::vector<int>* face0 =
      layer.size_layout ? &layer.size_layout->face0_ids : nullptr;
  auto sample_window_inputs = [&](const VecX& x) {
    if (sc.size) p_bar_samples.push_back(cycle_errors(x, rho, face0).second);
    center_samples.push_back(geometric_center(x));
  };
  auto apply_window = [&](long window) {
    const size_t lag_index = size_t(std::max<long>(0, window - 1));
    if (sc.size)
      layer.alpha_s = sc.size->alpha_s0 * sc.size->fs(p_bar_samples[lag_index]);
    layer.center_delayed = center_samples[lag_index];
    if (sc.disturbance.enabled()) {
      const double cap = sc.disturbance.angle_max_deg * kPi / 180.0;
      for (int i = 0; i < n; ++i) layer.delta_alpha[i] = rng.uniform(-cap, cap);
    }
  };
  sample_window_inputs(gather_positions(sc, state));
  apply_window(0);

  // Derivative of the full state with window inputs frozen.
  auto derivative = [&](double, const VecX& s) -> VecX {
    if (sc.mode == SimMode::PointMass) return layer.command(s, nullptr, nullptr, nullptr);
    VecX dot(s.size());
    const VecX x = gather_positions(sc, s);
    const VecX v = gather_velocities(sc, s);
    const VecX u_form = layer.command(x, &v, nullptr, nullptr);
    for (int i = 0; i < n; ++i) {
      const QuadState qs = QuadState::unpack(s.segment<13>(kQuadDim * i));
      const Vec3 integral = s.segment<3>(kQuadDim * i + 13);
      const Vec3 v_d = saturate_velocity(u_form.segment<3>(3 * i), sc.tracker.v_max);
      const TrackerCommand cmd =
          tracker_command(qs, v_d, sc.tracker, sc.quad, integral, Vec3::Zero());
      dot.segment<13>(kQuadDim * i) = quad_derivative(qs, cmd.tm, sc.quad);
      dot.segment<3>(kQuadDim * i + 13) =
          cmd.thrust_floor_hit ? Vec3::Zero() : cmd.velocity_error;
    }
    return dot;
  };

  bool saturated_prev = false;
  auto record = [&](double t, const VecX& s) -> bool {
    const VecX x = gather_positions(sc, s);
    log.times.push_back(t);
    log.positions.push_back(x);
    if (sc.mode == SimMode::Quadcopter) log.velocities.push_back(gather_velocities(sc, s));
    log.formation_error.push_back(formation_error(sc.formation.constraints, x));
    if (sc.size) {
      auto [p, pb] = cycle_errors(x, rho, face0);
      log.side_errors.push_back(p);
      log.p_bar.push_back(pb);
    }
    std::pair<int, int> pair{-1, -1};
    const double dmin = min_pairwise_distance(x, &pair);
    log.min_distance.push_back(dmin);
    if (sc.center)
      log.center_error.push_back((sc.center->target - geometric_center(x)).norm());
    double shape_norm = 0.0;
    const VecX v = gather_velocities(sc, s);
    layer.command(x, &v, &shape_norm, nullptr);
    log.control_norm.push_back(shape_norm);

    if (!x.allFinite()) {
      log.events.push_back({t, "divergence", "non-finite state"});
      log.termination = "divergence";
      return false;
    }
    if (sc.collision && dmin <= sc.collision->r1) {
      log.events.push_back({t, "collision",
                            "robots " + std::to_string(pair.first) + " and " +
                                std::to_string(pair.second) + " at distance " +
                                std::to_string(dmin)});
      log.termination = "collision";
      return false;
    }
    if (sc.mode == SimMode::Quadcopter) {
      bool saturated = false;
      const VecX u_form = layer.command(x, &v, nullptr, nullptr);
      for (int i = 0; i < n && !saturated; ++i)
        saturated = u_form.segment<3>(3 * i).norm() > sc.tracker.v_max;
      if (saturated != saturated_prev)
        log.events.push_back({t, "saturation", saturated ? "on" : "off"});
      saturated_prev = saturated;
    }
    return true;
  };

  for (long step = 0; step <= n_steps; ++step) {
    const double t = double(step) * dt;
    if (hybrid && step > 0 && step % steps_per_window == 0) {
      const long window = step / steps_per_window;
      sample_window_inputs(gather_positions(sc, state));
      apply_window(window);
      log.events.push_back({t, "window_switch", "window " + std::to_string(window)});
    }
    if (!record(t, state)) return log;
    if (step == n_steps) break;
    state = integrate_step(sc.sim.integrator, derivative, t, state, dt);
    if (sc.mode == SimMode::Quadcopter)
      for (int i = 0; i < n; ++i) {
        auto q = state.segment<4>(kQuadDim * i + 6);
        q /= q.norm();
      }
  }
  return log;
}

RunSummary summarize(const Scenario& sc, const TrajectoryLog& log,
                     const MonteCarloThresholds& th) {
  RunSummary s;
  s.seed = sc.seed;
  s.termination = log.termination;
  s.collided = log.termination == "collision";
  s.initial_formation_error = log.formation_error.front();
  s.final_formation_error = log.formation_error.back();
  s.min_distance = *std::min_element(log.min_distance.begin(), log.min_distance.end());
  s.converged_shape = log.completed() && s.final_formation_error <= th.shape_abs;
  s.final_p_bar = log.p_bar.empty() ? 0.0 : log.p_bar.back();
  s.converged_size = !sc.size || (log.completed() && std::abs(s.final_p_bar) <= th.size_rel);
  s.final_center_error = log.center_error.empty() ? 0.0 : log.center_error.back();
  s.converged_center =
      !sc.center || (log.completed() && s.final_center_error <= th.center_abs);
  return s;
}

MonteCarloReport monte_carlo(const Scenario& base, int samples, const InitialBall& ball,
                             const MonteCarloThresholds& thresholds) {
  if (samples < 1) throw std::invalid_argument("monte_carlo: need at least one sample");
  MonteCarloReport report;
  report.samples = samples;
  report.thresholds = thresholds;
  report.runs.resize(samples);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int i; (i = next.fetch_add(1)) < samples;) {
      Scenario sc = base;
      sc.seed = Rng::derive(base.seed, std::uint64_t(i));
      sc.initial = ball;
      const TrajectoryLog log = run(sc);
      report.runs[i] = summarize(sc, log, thresholds);
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned n_workers = std::min<unsigned>(hw, unsigned(samples));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  for (const RunSummary& r : report.runs) {
    if (r.collided) ++report.collisions;
    if (r.converged_shape && r.converged_size && r.converged_center) ++report.converged;
  }
  return report;
}

}  // namespace pursuit
