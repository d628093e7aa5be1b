#include "conesmith/complexes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace conesmith {

namespace {

std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

bool subset_of(const std::vector<int>& a, const std::vector<int>& b) {
  // both sorted
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

std::vector<int> intersection_of(const std::vector<int>& a,
                                 const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

}  // namespace

int AllRightComplex::vertex_id(const std::string& name) const {
  for (int i = 0; i < vertex_count(); ++i)
    if (names_[i] == name) return i;
  return -1;
}

int AllRightComplex::simplex_id(std::vector<int> verts) const {
  std::sort(verts.begin(), verts.end());
  auto it = id_by_verts_.find(verts);
  return it == id_by_verts_.end() ? -1 : it->second;
}

const std::vector<int>& AllRightComplex::simplices_of_dim(int k) const {
  static const std::vector<int> empty;
  if (k < 0 || k >= static_cast<int>(by_dim_.size())) return empty;
  return by_dim_[k];
}

bool AllRightComplex::is_face(int a, int b) const {
  return subset_of(simplices_[a], simplices_[b]);
}

int AllRightComplex::intersect(int a, int b) const {
  std::vector<int> common = intersection_of(simplices_[a], simplices_[b]);
  if (common.empty()) return -1;
  auto it = id_by_verts_.find(common);
  return it == id_by_verts_.end() ? -1 : it->second;
}

std::vector<long long> AllRightComplex::f_vector() const {
  std::vector<long long> f(dim_ + 1, 0);
  for (int id = 0; id < simplex_count(); ++id) ++f[simplex_dim(id)];
  return f;
}

bool AllRightComplex::intersection_condition_holds() const {
  // With simplices keyed by vertex sets, two simplices can only meet in the
  // face spanned by their shared vertices; verify that this face is always
  // present, so the pairwise intersection is a single common face.
  for (int a = 0; a < simplex_count(); ++a)
    for (int b = a + 1; b < simplex_count(); ++b) {
      std::vector<int> common = intersection_of(simplices_[a], simplices_[b]);
      if (common.empty()) continue;
      if (id_by_verts_.find(common) == id_by_verts_.end()) return false;
    }
  return true;
}

bool AllRightComplex::same_simplex_set(const AllRightComplex& other) const {
  if (simplex_count() != other.simplex_count()) return false;
  for (const auto& [verts, id] : id_by_verts_)
    if (other.id_by_verts_.find(verts) == other.id_by_verts_.end())
      return false;
  return true;
}

void AllRightComplex::finalize() {
  const int n = simplex_count();
  cofaces_.assign(n, {});
  is_maximal_.assign(n, true);
  dim_ = -1;
  for (int id = 0; id < n; ++id) dim_ = std::max(dim_, simplex_dim(id));
  by_dim_.assign(dim_ + 1, {});
  for (int id = 0; id < n; ++id) by_dim_[simplex_dim(id)].push_back(id);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      if (subset_of(simplices_[a], simplices_[b])) {
        cofaces_[a].push_back(b);
        is_maximal_[a] = false;
      }
    }
  maximal_.clear();
  for (int id = 0; id < n; ++id)
    if (is_maximal_[id]) maximal_.push_back(id);
}

AllRightComplex AllRightComplex::from_maximal_ids(
    std::vector<std::string> vertex_names,
    const std::vector<std::vector<int>>& maximal) {
  AllRightComplex P;
  P.names_ = std::move(vertex_names);
  std::set<std::vector<int>> seen_maximal;
  for (const auto& raw : maximal) {
    std::vector<int> verts = sorted_copy(raw);
    if (std::adjacent_find(verts.begin(), verts.end()) != verts.end())
      throw std::invalid_argument("simplex repeats a vertex");
    for (int v : verts)
      if (v < 0 || v >= P.vertex_count())
        throw std::invalid_argument("simplex references unknown vertex");
    if (!seen_maximal.insert(verts).second)
      throw std::invalid_argument("duplicate maximal simplex");
    // face closure by bitmask over the vertex list
    const int k = static_cast<int>(verts.size());
    if (k > 24) throw std::invalid_argument("simplex too large");
    for (unsigned mask = 1; mask < (1u << k); ++mask) {
      std::vector<int> face;
      for (int i = 0; i < k; ++i)
        if (mask & (1u << i)) face.push_back(verts[i]);
      if (P.id_by_verts_.emplace(face, P.simplex_count()).second)
        P.simplices_.push_back(face);
    }
  }
  P.finalize();
  return P;
}

AllRightComplex AllRightComplex::from_maximal(
    std::vector<std::string> vertex_names,
    const std::vector<std::vector<std::string>>& maximal) {
  std::map<std::string, int> by_name;
  for (int i = 0; i < static_cast<int>(vertex_names.size()); ++i)
    if (!by_name.emplace(vertex_names[i], i).second)
      throw std::invalid_argument("duplicate vertex name");
  std::vector<std::vector<int>> ids;
  for (const auto& s : maximal) {
    std::vector<int> v;
    for (const auto& name : s) {
      auto it = by_name.find(name);
      if (it == by_name.end())
        throw std::invalid_argument("unknown vertex name: " + name);
      v.push_back(it->second);
    }
    ids.push_back(std::move(v));
  }
  return from_maximal_ids(std::move(vertex_names), ids);
}

AllRightComplex AllRightComplex::canonical_sphere(int m) {
  if (m < 0) throw std::invalid_argument("canonical_sphere needs m >= 0");
  std::vector<std::string> names;
  for (int i = 0; i <= m; ++i) {
    names.push_back("x" + std::to_string(i) + "+");
    names.push_back("x" + std::to_string(i) + "-");
  }
  std::vector<std::vector<int>> maximal;
  for (unsigned signs = 0; signs < (1u << (m + 1)); ++signs) {
    std::vector<int> s;
    for (int i = 0; i <= m; ++i)
      s.push_back(2 * i + ((signs >> i) & 1u));
    maximal.push_back(std::move(s));
  }
  return from_maximal_ids(std::move(names), maximal);
}

AllRightComplex AllRightComplex::circle_complex(int kprime) {
  if (kprime < 3)
    throw std::invalid_argument(
        "circle_complex needs at least 3 edges; fewer would glue two edges "
        "along both endpoints");
  std::vector<std::string> names;
  for (int i = 0; i < kprime; ++i) names.push_back("v" + std::to_string(i));
  std::vector<std::vector<int>> maximal;
  for (int i = 0; i < kprime; ++i)
    maximal.push_back({i, (i + 1) % kprime});
  return from_maximal_ids(std::move(names), maximal);
}

AllRightComplex AllRightComplex::suspension(const AllRightComplex& base) {
  std::vector<std::string> names;
  for (int i = 0; i < base.vertex_count(); ++i)
    names.push_back(base.vertex_name(i));
  auto fresh = [&names](std::string stem) {
    std::string candidate = stem;
    int suffix = 0;
    while (std::find(names.begin(), names.end(), candidate) != names.end())
      candidate = stem + std::to_string(++suffix);
    return candidate;
  };
  const std::string north = fresh("N"), south = fresh("S");
  names.push_back(north);
  names.push_back(south);
  const int n = static_cast<int>(names.size()) - 2;
  const int s = n + 1;
  std::vector<std::vector<int>> maximal;
  for (int id : base.maximal_simplices()) {
    std::vector<int> up = base.simplex(id), down = base.simplex(id);
    up.push_back(n);
    down.push_back(s);
    maximal.push_back(std::move(up));
    maximal.push_back(std::move(down));
  }
  if (base.simplex_count() == 0) {
    maximal.push_back({n});
    maximal.push_back({s});
  }
  return from_maximal_ids(std::move(names), maximal);
}

void validate_point(const AllRightComplex& P, const SimplexPoint& x,
                    double tol_unit, double tol_neg) {
  if (x.simplex < 0 || x.simplex >= P.simplex_count())
    throw std::invalid_argument("point carrier is not a simplex id");
  const int k = P.simplex_dim(x.simplex);
  if (x.dir.size() != k + 1)
    throw std::invalid_argument("point has wrong coordinate count");
  if (std::abs(x.dir.norm() - 1.0) > tol_unit)
    throw std::invalid_argument("point direction is not a unit vector");
  for (int i = 0; i <= k; ++i)
    if (x.dir[i] < -tol_neg)
      throw std::invalid_argument("point has a negative coordinate");
}

SimplexPoint canonicalize(const AllRightComplex& P, const SimplexPoint& x,
                          double support_tol) {
  const std::vector<int>& verts = P.simplex(x.simplex);
  std::vector<int> support;
  std::vector<double> comps;
  for (int i = 0; i < static_cast<int>(verts.size()); ++i)
    if (x.dir[i] > support_tol) {
      support.push_back(verts[i]);
      comps.push_back(x.dir[i]);
    }
  if (support.empty())
    throw std::invalid_argument("point has empty support");
  SimplexPoint out;
  out.simplex = P.simplex_id(support);
  out.dir = Eigen::Map<Eigen::VectorXd>(comps.data(), comps.size());
  out.dir.normalize();
  return out;
}

SimplexPoint barycenter(const AllRightComplex& P, int simplex) {
  const int k = P.simplex_dim(simplex);
  SimplexPoint b;
  b.simplex = simplex;
  b.dir = Eigen::VectorXd::Constant(k + 1, 1.0 / std::sqrt(k + 1.0));
  return b;
}

std::optional<StarSplit> star_split(const AllRightComplex& P,
                                    const SimplexPoint& x, int delta) {
  const SimplexPoint cx = canonicalize(P, x);
  const std::vector<int>& support = P.simplex(cx.simplex);
  const std::vector<int>& dverts = P.simplex(delta);

  // A simplex containing both delta and the carrier of x; its existence is
  // exactly membership of x in the star of delta.
  int join = -1;
  if (subset_of(dverts, support)) {
    join = cx.simplex;
  } else {
    for (int c : P.cofaces(cx.simplex)) {
      if (subset_of(dverts, P.simplex(c))) {
        join = c;
        break;
      }
    }
  }
  if (join < 0) return std::nullopt;

  const std::vector<int>& jverts = P.simplex(join);
  // Components of x in the join's coordinates (zero off the support).
  Eigen::VectorXd comps = Eigen::VectorXd::Zero(jverts.size());
  for (int i = 0; i < static_cast<int>(support.size()); ++i) {
    auto it = std::lower_bound(jverts.begin(), jverts.end(), support[i]);
    comps[it - jverts.begin()] = cx.dir[i];
  }

  // Both legs of the split are summed directly; deriving either one from
  // 1 - cos2 would lose the thin-angle digits to cancellation.
  double cos2 = 0.0, sin2 = 0.0;
  for (int i = 0; i < static_cast<int>(jverts.size()); ++i) {
    if (std::binary_search(dverts.begin(), dverts.end(), jverts[i]))
      cos2 += comps[i] * comps[i];
    else
      sin2 += comps[i] * comps[i];
  }
  // A support on the face has all its mass there; pin the angle to exactly
  // zero instead of the acos-near-one noise floor.
  if (subset_of(support, dverts)) {
    cos2 = 1.0;
    sin2 = 0.0;
  }
  const double cosb = std::sqrt(std::min(1.0, cos2));
  const double sinb = std::sqrt(std::min(1.0, sin2));

  StarSplit split;
  split.join = join;
  split.beta = std::atan2(sinb, cosb);

  const double part_tol = 1e-14;
  if (cosb > part_tol) {
    std::vector<int> wverts;
    std::vector<double> wcomps;
    for (int i = 0; i < static_cast<int>(jverts.size()); ++i)
      if (std::binary_search(dverts.begin(), dverts.end(), jverts[i]) &&
          comps[i] > 0.0) {
        wverts.push_back(jverts[i]);
        wcomps.push_back(comps[i] / cosb);
      }
    split.w.simplex = P.simplex_id(wverts);
    split.w.dir = Eigen::Map<Eigen::VectorXd>(wcomps.data(), wcomps.size());
    split.w.dir.normalize();
  }
  if (sinb > part_tol) {
    std::vector<int> uverts;
    std::vector<double> ucomps;
    for (int i = 0; i < static_cast<int>(jverts.size()); ++i)
      if (!std::binary_search(dverts.begin(), dverts.end(), jverts[i]) &&
          comps[i] > 0.0) {
        uverts.push_back(jverts[i]);
        ucomps.push_back(comps[i] / sinb);
      }
    split.u.simplex = P.simplex_id(uverts);
    split.u.dir = Eigen::Map<Eigen::VectorXd>(ucomps.data(), ucomps.size());
    split.u.dir.normalize();
  }
  return split;
}

std::optional<double> star_local_distance(const AllRightComplex& P,
                                          const SimplexPoint& x, int delta) {
  auto split = star_split(P, x, delta);
  if (!split) return std::nullopt;
  return split->beta;
}

std::map<int, double> star_distances(const AllRightComplex& P,
                                     const SimplexPoint& x) {
  const SimplexPoint cx = canonicalize(P, x);
  const std::vector<int>& support = P.simplex(cx.simplex);
  std::map<int, double> comp;  // vertex id -> coordinate of x
  for (int i = 0; i < static_cast<int>(support.size()); ++i)
    comp[support[i]] = cx.dir[i];

  // The squared cosine of the distance to a face is the squared mass of x on
  // that face's vertices, independently of which containing simplex carries
  // the computation.
  std::map<int, double> out;
  std::vector<int> joins = P.cofaces(cx.simplex);
  joins.push_back(cx.simplex);
  for (int J : joins) {
    const std::vector<int>& jverts = P.simplex(J);
    const int n = static_cast<int>(jverts.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
      std::vector<int> verts;
      // Summing the off-face mass directly keeps thin angles accurate;
      // 1 - cos2 would cancel away their digits.
      double cos2 = 0.0, sin2 = 0.0;
      int carried = 0;
      for (int i = 0; i < n; ++i) {
        auto it = comp.find(jverts[i]);
        const double m2 =
            it == comp.end() ? 0.0 : it->second * it->second;
        if (mask & (1u << i)) {
          verts.push_back(jverts[i]);
          if (it != comp.end()) ++carried;
          cos2 += m2;
        } else {
          sin2 += m2;
        }
      }
      // Faces holding the whole support are at distance exactly zero.
      if (carried == static_cast<int>(support.size())) {
        cos2 = 1.0;
        sin2 = 0.0;
      }
      const int id = P.simplex_id(verts);
      if (out.find(id) != out.end()) continue;
      const double c = std::sqrt(std::min(1.0, cos2));
      const double s = std::sqrt(std::min(1.0, sin2));
      out[id] = std::atan2(s, c);
    }
  }
  return out;
}

LinkComplex simplicial_link(const AllRightComplex& P, int delta) {
  LinkComplex link;
  link.base = delta;
  const std::vector<int>& dverts = P.simplex(delta);

  // Link vertices in parent order.
  std::vector<int> lverts;
  for (int v = 0; v < P.vertex_count(); ++v) {
    if (std::binary_search(dverts.begin(), dverts.end(), v)) continue;
    std::vector<int> joined = dverts;
    joined.push_back(v);
    if (P.simplex_id(joined) >= 0) lverts.push_back(v);
  }
  link.vertex_to_parent = lverts;
  std::map<int, int> to_link;
  std::vector<std::string> names;
  for (int i = 0; i < static_cast<int>(lverts.size()); ++i) {
    to_link[lverts[i]] = i;
    names.push_back(P.vertex_name(lverts[i]));
  }

  // Maximal opposite faces come from maximal cofaces of delta.
  std::vector<std::vector<int>> maximal;
  for (int c : P.cofaces(delta)) {
    if (!P.is_maximal(c)) continue;
    std::vector<int> opp;
    for (int v : P.simplex(c))
      if (!std::binary_search(dverts.begin(), dverts.end(), v))
        opp.push_back(to_link.at(v));
    if (!opp.empty()) maximal.push_back(std::move(opp));
  }
  link.complex = AllRightComplex::from_maximal_ids(std::move(names), maximal);

  link.simplex_to_parent.assign(link.complex.simplex_count(), -1);
  link.simplex_to_join.assign(link.complex.simplex_count(), -1);
  for (int id = 0; id < link.complex.simplex_count(); ++id) {
    std::vector<int> parent_verts;
    for (int v : link.complex.simplex(id))
      parent_verts.push_back(link.vertex_to_parent[v]);
    link.simplex_to_parent[id] = P.simplex_id(parent_verts);
    std::vector<int> joined = parent_verts;
    joined.insert(joined.end(), dverts.begin(), dverts.end());
    link.simplex_to_join[id] = P.simplex_id(joined);
  }
  return link;
}

SimplexPoint LinkComplex::from_parent(const AllRightComplex& parent,
                                      const SimplexPoint& u) const {
  // Vertex order inside a simplex is preserved because link vertices are
  // numbered in increasing parent order.
  const std::vector<int>& uverts = parent.simplex(u.simplex);
  std::vector<int> lverts;
  for (int v : uverts) {
    auto it = std::find(vertex_to_parent.begin(), vertex_to_parent.end(), v);
    if (it == vertex_to_parent.end())
      throw std::invalid_argument("point is not on an opposite face");
    lverts.push_back(static_cast<int>(it - vertex_to_parent.begin()));
  }
  SimplexPoint out;
  out.simplex = complex.simplex_id(lverts);
  if (out.simplex < 0)
    throw std::invalid_argument("opposite face missing from link");
  out.dir = u.dir;
  return out;
}

SimplexPoint LinkComplex::to_parent(const AllRightComplex& parent,
                                    const SimplexPoint& u) const {
  std::vector<int> pverts;
  for (int v : complex.simplex(u.simplex))
    pverts.push_back(vertex_to_parent[v]);
  SimplexPoint out;
  out.simplex = parent.simplex_id(pverts);
  out.dir = u.dir;
  return out;
}

// ---------------------------------------------------------------------------
// Cubical complexes

int CubicalComplex::cube_id(std::vector<int> sorted_verts) const {
  std::sort(sorted_verts.begin(), sorted_verts.end());
  auto it = id_by_verts_.find(sorted_verts);
  return it == id_by_verts_.end() ? -1 : it->second;
}

const std::vector<int>& CubicalComplex::cubes_of_dim(int k) const {
  static const std::vector<int> empty;
  if (k < 0 || k >= static_cast<int>(by_dim_.size())) return empty;
  return by_dim_[k];
}

bool CubicalComplex::is_face(int a, int b) const {
  return subset_of(sorted_copy(cubes_[a]), sorted_copy(cubes_[b]));
}

int CubicalComplex::intersect(int a, int b) const {
  std::vector<int> common =
      intersection_of(sorted_copy(cubes_[a]), sorted_copy(cubes_[b]));
  if (common.empty()) return -1;
  auto it = id_by_verts_.find(common);
  return it == id_by_verts_.end() ? -1 : it->second;
}

std::pair<int, int> CubicalComplex::facets_along(int id, int axis) const {
  const std::vector<int>& verts = cubes_[id];
  const int k = dims_[id];
  if (axis < 0 || axis >= k)
    throw std::invalid_argument("facet axis out of range for cube dimension");
  std::vector<int> low, high;
  for (int j = 0; j < (1 << (k - 1)); ++j) {
    const unsigned rest_low = (j & ((1u << axis) - 1u));
    const unsigned rest_high = (static_cast<unsigned>(j) >> axis) << (axis + 1);
    low.push_back(verts[rest_high | rest_low]);
    high.push_back(verts[rest_high | (1u << axis) | rest_low]);
  }
  return {cube_id(low), cube_id(high)};
}

std::vector<int> CubicalComplex::facets(int id) const {
  std::vector<int> out;
  for (int axis = 0; axis < dims_[id]; ++axis) {
    auto [lo, hi] = facets_along(id, axis);
    out.push_back(lo);
    out.push_back(hi);
  }
  return out;
}

bool CubicalComplex::face_intersection_property() const {
  for (int top : maximal_) {
    const int n = dims_[top];
    std::vector<int> top_facets = facets(top);
    for (int f = 0; f < cube_count(); ++f) {
      if (f == top || !is_face(f, top)) continue;
      int containing = 0;
      for (int facet : top_facets)
        if (is_face(f, facet)) ++containing;
      if (containing != n - dims_[f]) return false;
    }
  }
  return true;
}

void CubicalComplex::close_faces() {
  // Breadth-first facet closure, deduplicating by vertex set.
  for (size_t i = 0; i < cubes_.size(); ++i) {
    if (dims_[i] == 0) continue;
    const std::vector<int> verts = cubes_[i];
    const int k = dims_[i];
    for (int axis = 0; axis < k; ++axis) {
      for (int side = 0; side < 2; ++side) {
        std::vector<int> face;
        for (int j = 0; j < (1 << (k - 1)); ++j) {
          const unsigned rest_low = (j & ((1u << axis) - 1u));
          const unsigned rest_high = (static_cast<unsigned>(j) >> axis)
                                     << (axis + 1);
          const unsigned pos =
              rest_high | (side ? (1u << axis) : 0u) | rest_low;
          face.push_back(verts[pos]);
        }
        std::vector<int> key = sorted_copy(face);
        if (id_by_verts_.emplace(key, cube_count()).second) {
          cubes_.push_back(face);
          dims_.push_back(k - 1);
        }
      }
    }
  }
  // cofaces, maximality, dimension buckets
  const int n = cube_count();
  cofaces_.assign(n, {});
  is_maximal_.assign(n, true);
  dim_ = 0;
  for (int d : dims_) dim_ = std::max(dim_, d);
  by_dim_.assign(dim_ + 1, {});
  for (int id = 0; id < n; ++id) by_dim_[dims_[id]].push_back(id);
  for (int a = 0; a < n; ++a) {
    const std::vector<int> sa = sorted_copy(cubes_[a]);
    for (int b = 0; b < n; ++b) {
      if (a == b) continue;
      if (subset_of(sa, sorted_copy(cubes_[b]))) {
        cofaces_[a].push_back(b);
        is_maximal_[a] = false;
      }
    }
  }
  maximal_.clear();
  for (int id = 0; id < n; ++id)
    if (is_maximal_[id]) maximal_.push_back(id);
}

CubicalComplex CubicalComplex::from_maximal_ids(
    std::vector<std::string> vertex_names,
    const std::vector<std::vector<int>>& maximal) {
  CubicalComplex K;
  K.names_ = std::move(vertex_names);
  for (const auto& verts : maximal) {
    int k = 0;
    while ((1 << k) < static_cast<int>(verts.size())) ++k;
    if ((1 << k) != static_cast<int>(verts.size()))
      throw std::invalid_argument("cube vertex count is not a power of two");
    for (int v : verts)
      if (v < 0 || v >= K.vertex_count())
        throw std::invalid_argument("cube references unknown vertex");
    std::vector<int> key = sorted_copy(verts);
    if (std::adjacent_find(key.begin(), key.end()) != key.end())
      throw std::invalid_argument("cube repeats a vertex");
    if (!K.id_by_verts_.emplace(key, K.cube_count()).second)
      throw std::invalid_argument("duplicate maximal cube");
    K.cubes_.push_back(verts);
    K.dims_.push_back(k);
  }
  K.close_faces();
  return K;
}

CubicalComplex CubicalComplex::from_maximal(
    std::vector<std::string> vertex_names,
    const std::vector<std::vector<std::string>>& maximal) {
  std::map<std::string, int> by_name;
  for (int i = 0; i < static_cast<int>(vertex_names.size()); ++i)
    if (!by_name.emplace(vertex_names[i], i).second)
      throw std::invalid_argument("duplicate vertex name");
  std::vector<std::vector<int>> ids;
  for (const auto& c : maximal) {
    std::vector<int> v;
    for (const auto& name : c) {
      auto it = by_name.find(name);
      if (it == by_name.end())
        throw std::invalid_argument("unknown vertex name: " + name);
      v.push_back(it->second);
    }
    ids.push_back(std::move(v));
  }
  return from_maximal_ids(std::move(vertex_names), ids);
}

namespace {
std::string corner_name(unsigned bits, int n) {
  std::string s;
  for (int i = n - 1; i >= 0; --i) s += ((bits >> i) & 1u) ? '1' : '0';
  return s;
}
}  // namespace

CubicalComplex CubicalComplex::single_cube(int n) {
  std::vector<std::string> names;
  for (unsigned b = 0; b < (1u << n); ++b) names.push_back(corner_name(b, n));
  std::vector<int> all(1 << n);
  for (int i = 0; i < (1 << n); ++i) all[i] = i;
  return from_maximal_ids(std::move(names), {all});
}

CubicalComplex CubicalComplex::cube_boundary(int n) {
  std::vector<std::string> names;
  for (unsigned b = 0; b < (1u << n); ++b) names.push_back(corner_name(b, n));
  std::vector<std::vector<int>> maximal;
  for (int axis = 0; axis < n; ++axis)
    for (int side = 0; side < 2; ++side) {
      std::vector<int> facet;
      for (int j = 0; j < (1 << (n - 1)); ++j) {
        const unsigned rest_low = (j & ((1u << axis) - 1u));
        const unsigned rest_high = (static_cast<unsigned>(j) >> axis)
                                   << (axis + 1);
        facet.push_back(rest_high | (side ? (1u << axis) : 0u) | rest_low);
      }
      maximal.push_back(std::move(facet));
    }
  return from_maximal_ids(std::move(names), maximal);
}

CubicalComplex CubicalComplex::glued_pair(int n) {
  // Two n-cubes sharing the facet where the first coordinate equals 1.
  // Corners live on the grid {0,1,2} x {0,1}^{n-1}.
  std::vector<std::string> names;
  std::map<std::string, int> ids;
  auto corner = [&](int x, unsigned rest) {
    std::string s = std::to_string(x) + corner_name(rest, n - 1);
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    const int id = static_cast<int>(names.size());
    names.push_back(s);
    ids[s] = id;
    return id;
  };
  std::vector<std::vector<int>> maximal(2);
  for (int cube = 0; cube < 2; ++cube)
    for (unsigned b = 0; b < (1u << n); ++b) {
      const int x = cube + ((b & 1u) ? 1 : 0);
      maximal[cube].push_back(corner(x, b >> 1));
    }
  return from_maximal_ids(std::move(names), maximal);
}

CubeLink cube_link(const CubicalComplex& K, int cube) {
  CubeLink link;
  link.base = cube;

  // Link vertices: cubes one dimension up, in id order.
  std::vector<int> up;
  for (int c : K.cofaces(cube))
    if (K.cube_dim(c) == K.cube_dim(cube) + 1) up.push_back(c);
  std::sort(up.begin(), up.end());
  link.vertex_to_cube = up;
  std::map<int, int> to_link;
  std::vector<std::string> names;
  for (int i = 0; i < static_cast<int>(up.size()); ++i) {
    to_link[up[i]] = i;
    names.push_back("c" + std::to_string(up[i]));
  }

  // Each coface spans the simplex of its intermediate one-up cubes; maximal
  // cofaces give the maximal simplices.
  std::map<std::vector<int>, int> simplex_to_coface;
  std::vector<std::vector<int>> maximal;
  for (int c : K.cofaces(cube)) {
    std::vector<int> verts;
    for (int e : up)
      if (K.is_face(e, c)) verts.push_back(to_link.at(e));
    std::sort(verts.begin(), verts.end());
    simplex_to_coface[verts] = c;
    if (K.is_maximal(c)) maximal.push_back(std::move(verts));
  }
  link.complex = AllRightComplex::from_maximal_ids(std::move(names), maximal);

  link.simplex_to_cube.assign(link.complex.simplex_count(), -1);
  for (int id = 0; id < link.complex.simplex_count(); ++id) {
    std::vector<int> key = link.complex.simplex(id);
    auto it = simplex_to_coface.find(key);
    if (it != simplex_to_coface.end()) link.simplex_to_cube[id] = it->second;
  }
  return link;
}

}  // namespace conesmith
