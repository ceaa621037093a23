#include "pursuit/shapes.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pursuit {

namespace {

Vec3 vertex(const VecX& x, int i) { return x.segment<3>(3 * i); }

Vec3 face_centroid(const std::vector<int>& ids, const VecX& x) {
  Vec3 c = Vec3::Zero();
  for (int id : ids) c += vertex(x, id);
  return c / double(ids.size());
}

// Newell normal of the cyclic vertex order (right-hand rule).
Vec3 winding_normal(const std::vector<int>& ids, const VecX& x) {
  const Vec3 c = face_centroid(ids, x);
  Vec3 n = Vec3::Zero();
  for (size_t i = 0; i < ids.size(); ++i) {
    const Vec3 a = vertex(x, ids[i]) - c;
    const Vec3 b = vertex(x, ids[(i + 1) % ids.size()]) - c;
    n += a.cross(b);
  }
  return n.normalized();
}

// Build a face from a vertex cycle: the outward normal points away from the
// solid centroid, and the cycle is reordered (reversed if needed) to wind
// clockwise about it, as the rotational constraints require.
Face make_face(std::vector<int> ids, const VecX& x, const Vec3& interior_point) {
  Vec3 outward = -winding_normal(ids, x);  // clockwise winding has inward Newell normal
  if (outward.dot(face_centroid(ids, x) - interior_point) < 0.0) {
    std::reverse(ids.begin() + 1, ids.end());  // keep first vertex, flip orientation
    outward = -outward;
  }
  Face f;
  f.vertex_ids = std::move(ids);
  f.normal_rotation = rotation_between(outward, Vec3::UnitZ());
  return f;
}

// Rules from geometric adjacency: every vertex pair consecutive in two faces.
std::vector<Rule> derive_rules(const std::vector<Face>& faces) {
  std::map<std::array<int, 2>, std::vector<int>> side_owners;
  for (size_t k = 0; k < faces.size(); ++k) {
    const auto& ids = faces[k].vertex_ids;
    for (size_t i = 0; i < ids.size(); ++i) {
      int a = ids[i], b = ids[(i + 1) % ids.size()];
      side_owners[{std::min(a, b), std::max(a, b)}].push_back(int(k));
    }
  }
  std::vector<Rule> rules;
  for (const auto& [edge, owners] : side_owners)
    if (owners.size() == 2) rules.push_back({owners[0], owners[1], edge});
  return rules;
}

ShapeTemplate assemble(std::string name, const std::vector<Vec3>& verts,
                       const std::vector<std::vector<int>>& face_cycles) {
  ShapeTemplate t;
  t.name = std::move(name);
  t.robot_count = int(verts.size());
  t.template_positions.resize(3 * verts.size());
  Vec3 center = Vec3::Zero();
  for (size_t i = 0; i < verts.size(); ++i) center += verts[i];
  center /= double(verts.size());
  for (size_t i = 0; i < verts.size(); ++i)
    t.template_positions.segment<3>(3 * i) = verts[i] - center;
  for (const auto& cycle : face_cycles)
    t.development.faces.push_back(make_face(cycle, t.template_positions, Vec3::Zero()));
  t.development.rules = derive_rules(t.development.faces);
  return t;
}

ShapeTemplate make_cube() {
  std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                         {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  return assemble("cube", v,
                  {{0, 1, 2, 3},      // bottom
                   {4, 5, 6, 7},      // top
                   {0, 1, 5, 4},      // front
                   {1, 2, 6, 5},      // right
                   {2, 3, 7, 6},      // back
                   {3, 0, 4, 7}});    // left
}

ShapeTemplate make_tetrahedron() {
  const double s = 1.0 / (2.0 * std::sqrt(2.0));  // unit edge length
  std::vector<Vec3> v = {Vec3(1, 1, 1) * s, Vec3(1, -1, -1) * s, Vec3(-1, 1, -1) * s,
                         Vec3(-1, -1, 1) * s};
  return assemble("tetrahedron", v, {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}});
}

ShapeTemplate make_octahedron() {
  std::vector<Vec3> v = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  return assemble("octahedron", v,
                  {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
                   {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}});
}

ShapeTemplate make_hexagonal_box() {
  // Hexagonal prism with unit edges everywhere: hexagon circumradius 1,
  // height 1, so the six side faces are unit squares.
  std::vector<Vec3> v;
  for (int ring = 0; ring < 2; ++ring)
    for (int i = 0; i < 6; ++i) {
      const double a = kPi / 3.0 * double(i);
      v.emplace_back(std::cos(a), std::sin(a), double(ring));
    }
  std::vector<std::vector<int>> cycles;
  cycles.push_back({0, 1, 2, 3, 4, 5});        // bottom hexagon
  cycles.push_back({6, 7, 8, 9, 10, 11});      // top hexagon
  for (int i = 0; i < 6; ++i) {
    int j = (i + 1) % 6;
    cycles.push_back({i, j, j + 6, i + 6});    // side squares
  }
  return assemble("hexagonal_box", v, cycles);
}

ShapeTemplate make_dome() {
  // Tree of nine unit squares: a top square, four side squares folded down by
  // 30 degrees about the top edges, and four lower squares folded a further
  // 30 degrees about the side squares' outer edges. 20 robots; the dual
  // graph is a star of chains rooted at the top square.
  const double d1 = kPi / 6.0, d2 = kPi / 3.0;
  std::vector<Vec3> v(20);
  v[0] = {0.5, -0.5, 0};
  v[1] = {0.5, 0.5, 0};
  v[2] = {-0.5, 0.5, 0};
  v[3] = {-0.5, -0.5, 0};
  // Arm along +x before rotation: upper pair then lower pair.
  const Vec3 u0(0.5 + std::cos(d1), -0.5, -std::sin(d1));
  const Vec3 u1(0.5 + std::cos(d1), 0.5, -std::sin(d1));
  const Vec3 b0(0.5 + std::cos(d1) + std::cos(d2), -0.5, -std::sin(d1) - std::sin(d2));
  const Vec3 b1(0.5 + std::cos(d1) + std::cos(d2), 0.5, -std::sin(d1) - std::sin(d2));
  for (int arm = 0; arm < 4; ++arm) {
    const Mat3 rz = rotation_about_z(kPi / 2.0 * double(arm));
    v[4 + 4 * arm + 0] = rz * u0;
    v[4 + 4 * arm + 1] = rz * u1;
    v[4 + 4 * arm + 2] = rz * b0;
    v[4 + 4 * arm + 3] = rz * b1;
  }

  std::vector<std::vector<int>> cycles;
  cycles.push_back({0, 1, 2, 3});  // top
  const int top_edge[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};
  for (int arm = 0; arm < 4; ++arm) {
    const int u_a = 4 + 4 * arm, u_b = u_a + 1, b_a = u_a + 2, b_b = u_a + 3;
    cycles.push_back({top_edge[arm][0], top_edge[arm][1], u_b, u_a});  // side square
    cycles.push_back({u_a, u_b, b_b, b_a});                            // lower square
  }

  ShapeTemplate t;
  t.name = "dome";
  t.robot_count = 20;
  t.template_positions.resize(60);
  Vec3 center = Vec3::Zero();
  for (const Vec3& p : v) center += p;
  center /= 20.0;
  for (int i = 0; i < 20; ++i) t.template_positions.segment<3>(3 * i) = v[i] - center;

  // Outward here means away from the dome interior (below the cap): every
  // outward normal has positive z. Stored cycles wind clockwise about it.
  for (const auto& cycle : cycles) {
    std::vector<int> ids = cycle;
    Vec3 nw = winding_normal(ids, t.template_positions);
    if (nw.z() > 0.0) {
      std::reverse(ids.begin() + 1, ids.end());
      nw = -nw;
    }
    Face f;
    f.vertex_ids = std::move(ids);
    f.normal_rotation = rotation_between(-nw, Vec3::UnitZ());
    t.development.faces.push_back(std::move(f));
  }
  t.development.rules = derive_rules(t.development.faces);
  return t;
}

}  // namespace

std::vector<std::string> shape_names() {
  return {"cube", "octahedron", "hexagonal_box", "tetrahedron", "dome"};
}

ShapeTemplate make_shape(const std::string& name) {
  if (name == "cube") return make_cube();
  if (name == "octahedron") return make_octahedron();
  if (name == "hexagonal_box") return make_hexagonal_box();
  if (name == "tetrahedron") return make_tetrahedron();
  if (name == "dome") return make_dome();
  throw std::invalid_argument("unknown shape: " + name);
}

}  // namespace pursuit
