#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/cyclic.hpp"

namespace pursuit {

/// One polygonal face of a development: the robot ids tracing its boundary
/// and the rotation R_eta with R_eta^T e_z = outward unit normal. The cyclic
/// vertex order must wind clockwise about the outward normal, matching the
/// rotational-constraint convention.
struct Face {
  std::vector<int> vertex_ids;
  Mat3 normal_rotation = Mat3::Identity();

  int size() const { return int(vertex_ids.size()); }
  Vec3 outward_normal() const { return normal_rotation.transpose() * Vec3::UnitZ(); }
};

/// Edge-matching rule: faces face_a and face_b share the edge between the two
/// listed robot ids. Dihedral data is carried implicitly by the face normals.
struct Rule {
  int face_a = -1;
  int face_b = -1;
  std::array<int, 2> edge{-1, -1};
};

/// Development (Q, R): polygons plus edge-matching rules.
struct Development {
  std::vector<Face> faces;
  std::vector<Rule> rules;
};

struct ValidationReport {
  bool valid = true;
  std::vector<std::string> violations;
};

/// Minimal partial polyhedral surface: a face subset whose dual graph is a
/// tree spanning every vertex, ordered so each face's tree path from face 0
/// visits only lower indices.
struct MinimalPPS {
  std::vector<Face> faces;
  std::vector<Rule> rules;             // tree rules, rewritten to the new face indices
  std::vector<int> source_face_ids;    // index into the original development
  int robot_count = 0;

  int face_count() const { return int(faces.size()); }
};

ValidationReport validate_development(const Development& d, int robot_count);

/// Greedy breadth-first tree growth from root_face, preferring faces that add
/// the most uncovered vertices (ties by lowest face id), with backtracking.
/// Throws if no vertex-spanning tree subgraph exists.
MinimalPPS extract_minimal_pps(const Development& d, int robot_count, int root_face = 0);

/// Selection matrix E^(k) = Ebar^(k) (x) I_3 extracting face robots in face order.
MatX selection_matrix(const Face& face, int robot_count);

/// Face constraint block. Full form W P R_eta E has 3(|V_k|-2)+1 rows; the
/// reduced form drops the in-plane row.
MatX build_face_constraints(const Face& face, int robot_count, bool reduced);

/// Stacked reduced constraint matrix: full constraints for faces 0-1, reduced
/// for the rest. Rank equals 3 sum|V_k| - 6L + 2 and the null space dimension
/// is 4 (translations plus scaling). Throws naming the offending face when a
/// face introduces dependent rows.
ConstraintMatrix build_reduced_V(const MinimalPPS& pps, int robot_count);

/// Per-face gains for the polyhedral controller; angles are pinned to
/// m pi / |V_k| so every face is an equilibrium at any size.
std::vector<CyclicParams> default_face_params(const MinimalPPS& pps, double gain, int horizon);

void validate_face_params(const MinimalPPS& pps, const std::vector<CyclicParams>& params);

/// Superposition controller u = sum_k -E^(k)T L_eta^(k) E^(k) x computed in
/// decentralized per-robot form.
VecX polyhedron_control(const VecX& x, const std::vector<CyclicParams>& params,
                        const MinimalPPS& pps);

/// Dense matrix M = sum_k E^(k)T L_eta^(k) E^(k), so polyhedron_control = -M x.
MatX assemble_polyhedron_L(const std::vector<CyclicParams>& params, const MinimalPPS& pps);

struct Theorem7Report {
  double lambda_max = 0.0;       // lambda_max of sym(V (-M) V^T)
  double margin = 0.0;           // -lambda_max
  double projected_rate = 0.0;   // lambda_min of sym(Vbar M Vbar^T); decay rate of ||Vbar x||
  bool certified = false;
};

Theorem7Report theorem7_certify(const ConstraintMatrix& cm, const MinimalPPS& pps,
                                const std::vector<CyclicParams>& params);

}  // namespace pursuit
