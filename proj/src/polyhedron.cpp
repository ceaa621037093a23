#include "pursuit/polyhedron.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace pursuit {

namespace {

// Sides of a face as unordered id pairs, in boundary order.
std::vector<std::array<int, 2>> face_sides(const Face& f) {
  std::vector<std::array<int, 2>> sides;
  const int m = f.size();
  sides.reserve(m);
  for (int i = 0; i < m; ++i) {
    int a = f.vertex_ids[i], b = f.vertex_ids[(i + 1) % m];
    sides.push_back({std::min(a, b), std::max(a, b)});
  }
  return sides;
}

bool face_has_side(const Face& f, int a, int b) {
  for (const auto& s : face_sides(f))
    if (s[0] == std::min(a, b) && s[1] == std::max(a, b)) return true;
  return false;
}

}  // namespace

ValidationReport validate_development(const Development& d, int robot_count) {
  ValidationReport rep;
  auto fail = [&rep](std::string msg) {
    rep.valid = false;
    rep.violations.push_back(std::move(msg));
  };

  const int L = int(d.faces.size());
  if (L == 0) fail("development has no faces");

  for (int k = 0; k < L; ++k) {
    const Face& f = d.faces[k];
    if (f.size() < 3) fail("face " + std::to_string(k) + " has fewer than 3 vertices");
    std::set<int> ids;
    for (int id : f.vertex_ids) {
      if (id < 0 || id >= robot_count)
        fail("face " + std::to_string(k) + " references robot " + std::to_string(id) +
             " outside 0.." + std::to_string(robot_count - 1));
      if (!ids.insert(id).second)
        fail("face " + std::to_string(k) + " repeats robot " + std::to_string(id));
    }
    if (!is_rotation(f.normal_rotation))
      fail("face " + std::to_string(k) + " normal_rotation is not a rotation");
  }
  if (!rep.valid) return rep;

  // Property 1: every rule names two faces sharing that side; every
  // geometrically adjacent pair has a rule.
  std::map<std::array<int, 2>, std::set<std::array<int, 2>>> ruled_pairs;  // face pair -> edges
  for (size_t r = 0; r < d.rules.size(); ++r) {
    const Rule& rule = d.rules[r];
    if (rule.face_a < 0 || rule.face_a >= L || rule.face_b < 0 || rule.face_b >= L ||
        rule.face_a == rule.face_b) {
      fail("rule " + std::to_string(r) + " names invalid faces");
      continue;
    }
    const int a = rule.edge[0], b = rule.edge[1];
    if (a == b || !face_has_side(d.faces[rule.face_a], a, b) ||
        !face_has_side(d.faces[rule.face_b], a, b)) {
      fail("rule " + std::to_string(r) + " edge (" + std::to_string(a) + "," +
           std::to_string(b) + ") is not a side of both faces");
      continue;
    }
    std::array<int, 2> pair{std::min(rule.face_a, rule.face_b), std::max(rule.face_a, rule.face_b)};
    std::array<int, 2> edge{std::min(a, b), std::max(a, b)};
    if (!ruled_pairs[pair].insert(edge).second)
      fail("shared edge (" + std::to_string(a) + "," + std::to_string(b) +
           ") appears in more than one rule");
  }

  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j) {
      const auto sides_i = face_sides(d.faces[i]);
      for (const auto& s : sides_i)
        if (face_has_side(d.faces[j], s[0], s[1])) {
          auto it = ruled_pairs.find({i, j});
          if (it == ruled_pairs.end() || !it->second.count(s))
            fail("faces " + std::to_string(i) + " and " + std::to_string(j) +
                 " share edge (" + std::to_string(s[0]) + "," + std::to_string(s[1]) +
                 ") without a rule");
        }
    }

  // Property 3: each side matched with at most one other polygon's edge.
  std::map<std::pair<int, std::array<int, 2>>, int> side_matches;
  for (const Rule& rule : d.rules) {
    if (rule.face_a < 0 || rule.face_a >= L || rule.face_b < 0 || rule.face_b >= L) continue;
    std::array<int, 2> edge{std::min(rule.edge[0], rule.edge[1]),
                            std::max(rule.edge[0], rule.edge[1])};
    for (int f : {rule.face_a, rule.face_b})
      if (++side_matches[{f, edge}] > 1)
        fail("face " + std::to_string(f) + " side (" + std::to_string(edge[0]) + "," +
             std::to_string(edge[1]) + ") matched more than once");
  }

  // Property 2: dual graph connected through the rules.
  std::vector<std::vector<int>> adj(L);
  for (const Rule& rule : d.rules) {
    if (rule.face_a < 0 || rule.face_a >= L || rule.face_b < 0 || rule.face_b >= L) continue;
    adj[rule.face_a].push_back(rule.face_b);
    adj[rule.face_b].push_back(rule.face_a);
  }
  std::vector<bool> seen(L, false);
  std::vector<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    int f = queue.back();
    queue.pop_back();
    for (int g : adj[f])
      if (!seen[g]) {
        seen[g] = true;
        queue.push_back(g);
      }
  }
  for (int f = 0; f < L; ++f)
    if (!seen[f]) fail("development is disconnected: face " + std::to_string(f) +
                       " unreachable from face 0");

  return rep;
}

namespace {

struct GrowState {
  std::vector<int> selected;            // original face ids, in addition order
  std::vector<Rule> tree_rules;         // connecting rules, original face ids
  std::set<int> covered;
};

// Recursive greedy growth with backtracking. Candidates must be adjacent to
// exactly one selected face so the induced dual subgraph stays a tree.
bool grow(const Development& d, int robot_count, GrowState& st) {
  if (int(st.covered.size()) == robot_count) return true;

  struct Candidate {
    int face;
    int new_vertices;
    Rule rule;
  };
  std::vector<Candidate> candidates;
  std::set<int> in_tree(st.selected.begin(), st.selected.end());

  for (int f = 0; f < int(d.faces.size()); ++f) {
    if (in_tree.count(f)) continue;
    std::vector<Rule> links;
    for (const Rule& r : d.rules) {
      int other = -1;
      if (r.face_a == f && in_tree.count(r.face_b)) other = r.face_b;
      if (r.face_b == f && in_tree.count(r.face_a)) other = r.face_a;
      if (other >= 0) links.push_back(r);
    }
    if (links.size() != 1) continue;  // 0 = unreachable, >1 = would close a cycle
    int fresh = 0;
    for (int id : d.faces[f].vertex_ids)
      if (!st.covered.count(id)) ++fresh;
    candidates.push_back({f, fresh, links.front()});
  }

  std::stable_sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.new_vertices != b.new_vertices) return a.new_vertices > b.new_vertices;
    return a.face < b.face;
  });

  for (const Candidate& c : candidates) {
    st.selected.push_back(c.face);
    st.tree_rules.push_back(c.rule);
    std::vector<int> added;
    for (int id : d.faces[c.face].vertex_ids)
      if (st.covered.insert(id).second) added.push_back(id);
    if (grow(d, robot_count, st)) return true;
    for (int id : added) st.covered.erase(id);
    st.tree_rules.pop_back();
    st.selected.pop_back();
  }
  return false;
}

}  // namespace

MinimalPPS extract_minimal_pps(const Development& d, int robot_count, int root_face) {
  ValidationReport rep = validate_development(d, robot_count);
  if (!rep.valid)
    throw std::invalid_argument("extract_minimal_pps: invalid development: " + rep.violations.front());
  if (root_face < 0 || root_face >= int(d.faces.size()))
    throw std::invalid_argument("extract_minimal_pps: root face out of range");

  GrowState st;
  st.selected.push_back(root_face);
  for (int id : d.faces[root_face].vertex_ids) st.covered.insert(id);
  if (!grow(d, robot_count, st))
    throw std::runtime_error("extract_minimal_pps: no vertex-spanning tree of faces exists");

  MinimalPPS pps;
  pps.robot_count = robot_count;
  pps.source_face_ids = st.selected;
  std::map<int, int> new_index;
  for (size_t i = 0; i < st.selected.size(); ++i) {
    new_index[st.selected[i]] = int(i);
    pps.faces.push_back(d.faces[st.selected[i]]);
  }
  for (const Rule& r : st.tree_rules)
    pps.rules.push_back({new_index.at(r.face_a), new_index.at(r.face_b), r.edge});
  return pps;
}

MatX selection_matrix(const Face& face, int robot_count) {
  MatX ebar = MatX::Zero(face.size(), robot_count);
  for (int i = 0; i < face.size(); ++i) ebar(i, face.vertex_ids[i]) = 1.0;
  return kron(ebar, Mat3::Identity());
}

MatX build_face_constraints(const Face& face, int robot_count, bool reduced) {
  const int nk = face.size();
  const MatX full = polygon_selector(nk) * polygon_projector(nk) *
                    kron(MatX::Identity(nk, nk), face.normal_rotation) *
                    selection_matrix(face, robot_count);
  return reduced ? MatX(full.topRows(3 * (nk - 2))) : full;
}

namespace {

bool faces_share_edge(const MinimalPPS& pps, int a, int b) {
  for (const Rule& r : pps.rules)
    if ((r.face_a == a && r.face_b == b) || (r.face_a == b && r.face_b == a)) return true;
  return false;
}

}  // namespace

ConstraintMatrix build_reduced_V(const MinimalPPS& pps, int robot_count) {
  const int L = pps.face_count();
  if (L < 1) throw std::invalid_argument("build_reduced_V: empty PPS");
  if (L >= 2 && !faces_share_edge(pps, 0, 1))
    throw std::invalid_argument("build_reduced_V: faces 0 and 1 must share an edge");

  Eigen::Index rows = 0;
  std::vector<MatX> blocks;
  blocks.reserve(L);
  for (int k = 0; k < L; ++k) {
    blocks.push_back(build_face_constraints(pps.faces[k], robot_count, /*reduced=*/k >= 2));
    rows += blocks.back().rows();
  }
  MatX v(rows, 3 * robot_count);
  Eigen::Index at = 0;
  for (const MatX& b : blocks) {
    v.middleRows(at, b.rows()) = b;
    at += b.rows();
  }

  ConstraintMatrix cm;
  cm.V = std::move(v);
  try {
    Orthonormalized orth = orthonormalize(cm.V);
    cm.Vbar = std::move(orth.Vbar);
    cm.Ubar = std::move(orth.Ubar);
    cm.rank = orth.rank;
  } catch (const std::runtime_error&) {
    // Identify the first face whose block makes the stack rank deficient.
    Eigen::Index upto = 0;
    for (int k = 0; k < L; ++k) {
      upto += blocks[k].rows();
      Eigen::JacobiSVD<MatX> svd(cm.V.topRows(upto));
      const VecX sigma = svd.singularValues();
      Eigen::Index rank = 0;
      for (Eigen::Index i = 0; i < sigma.size(); ++i)
        if (sigma[i] > 1e-10 * sigma[0]) ++rank;
      if (rank < upto)
        throw std::runtime_error("build_reduced_V: face " + std::to_string(k) +
                                 " introduces linearly dependent constraints");
    }
    throw;
  }
  return cm;
}

std::vector<CyclicParams> default_face_params(const MinimalPPS& pps, double gain, int horizon) {
  std::vector<CyclicParams> params;
  params.reserve(pps.faces.size());
  for (const Face& f : pps.faces) {
    CyclicParams p;
    p.n = f.size();
    const int N = std::min(horizon, f.size() - 2);
    p.gains = VecX::Constant(N, gain);
    p.angles = fixed_size_angles(f.size(), N);
    p.plane_rotation = f.normal_rotation;
    params.push_back(std::move(p));
  }
  return params;
}

void validate_face_params(const MinimalPPS& pps, const std::vector<CyclicParams>& params) {
  if (params.size() != pps.faces.size())
    throw std::invalid_argument("face params: one CyclicParams per face required");
  for (size_t k = 0; k < params.size(); ++k) {
    const Face& f = pps.faces[k];
    params[k].validate();
    if (params[k].n != f.size())
      throw std::invalid_argument("face params: robot count mismatch on face " + std::to_string(k));
    for (int m = 1; m <= params[k].horizon(); ++m)
      if (std::abs(params[k].angles[m - 1] - double(m) * kPi / double(f.size())) > 1e-12)
        throw std::invalid_argument(
            "face params: angles must equal m pi / |V_k| (flow-invariance) on face " +
            std::to_string(k));
    if ((params[k].plane_rotation - f.normal_rotation).norm() > 1e-9)
      throw std::invalid_argument("face params: plane_rotation must match face normal_rotation");
  }
}

VecX polyhedron_control(const VecX& x, const std::vector<CyclicParams>& params,
                        const MinimalPPS& pps) {
  if (x.size() != 3 * pps.robot_count)
    throw std::invalid_argument("polyhedron_control: state dimension mismatch");
  validate_face_params(pps, params);
  VecX u = VecX::Zero(x.size());
  for (size_t k = 0; k < pps.faces.size(); ++k) {
    const Face& f = pps.faces[k];
    const int nk = f.size();
    VecX xk(3 * nk);
    for (int i = 0; i < nk; ++i) xk.segment<3>(3 * i) = x.segment<3>(3 * f.vertex_ids[i]);
    const VecX uk = cyclic_control(xk, params[k]);
    for (int i = 0; i < nk; ++i) u.segment<3>(3 * f.vertex_ids[i]) += uk.segment<3>(3 * i);
  }
  return u;
}

MatX assemble_polyhedron_L(const std::vector<CyclicParams>& params, const MinimalPPS& pps) {
  validate_face_params(pps, params);
  const int n = pps.robot_count;
  MatX m = MatX::Zero(3 * n, 3 * n);
  for (size_t k = 0; k < pps.faces.size(); ++k) {
    const MatX e = selection_matrix(pps.faces[k], n);
    m += e.transpose() * assemble_L(params[k]) * e;
  }
  return m;
}

Theorem7Report theorem7_certify(const ConstraintMatrix& cm, const MinimalPPS& pps,
                                const std::vector<CyclicParams>& params) {
  const MatX m = assemble_polyhedron_L(params, pps);
  const MatX j = cm.V * (-m) * cm.V.transpose();
  const MatX j_sym = 0.5 * (j + j.transpose());
  Eigen::SelfAdjointEigenSolver<MatX> es(j_sym);
  Theorem7Report rep;
  rep.lambda_max = es.eigenvalues().maxCoeff();
  rep.margin = -rep.lambda_max;
  rep.certified = rep.lambda_max < -1e-10;
  const MatX proj = cm.Vbar * m * cm.Vbar.transpose();
  Eigen::SelfAdjointEigenSolver<MatX> esp(0.5 * (proj + proj.transpose()));
  rep.projected_rate = esp.eigenvalues().minCoeff();
  return rep;
}

}  // namespace pursuit
