#pragma once

// All-right spherical complexes and cubical complexes.
//
// Simplices carry the unit-sphere geometry in which every edge has length
// pi/2: a k-simplex is the set of unit vectors with nonnegative coordinates
// in R^{k+1}, one coordinate per vertex. All distance computations stay
// star-local (inside a single simplex through shared coordinates); no global
// geodesic search is ever performed.

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace conesmith {

class AllRightComplex {
 public:
  AllRightComplex() = default;

  // Builds the face closure of the given maximal simplices. Throws if a
  // listed simplex repeats a vertex or duplicates another maximal simplex.
  static AllRightComplex from_maximal(
      std::vector<std::string> vertex_names,
      const std::vector<std::vector<std::string>>& maximal);
  static AllRightComplex from_maximal_ids(
      std::vector<std::string> vertex_names,
      const std::vector<std::vector<int>>& maximal);

  // Boundary complex of the (m+1)-dimensional cross polytope: vertices are
  // the positive and negative coordinate directions of R^{m+1}, and the
  // m-simplices are the intersections of the unit sphere with the closed
  // orthants. This is the canonical triangulation of the m-sphere.
  static AllRightComplex canonical_sphere(int m);

  // Circle assembled from kprime quarter-circle edges (total length
  // kprime * pi/2). Requires kprime >= 3 so that distinct edges share at
  // most one vertex.
  static AllRightComplex circle_complex(int kprime);

  // Spherical suspension: two poles joined to every simplex of the base.
  static AllRightComplex suspension(const AllRightComplex& base);

  int vertex_count() const { return static_cast<int>(names_.size()); }
  const std::string& vertex_name(int v) const { return names_[v]; }
  int vertex_id(const std::string& name) const;

  int simplex_count() const { return static_cast<int>(simplices_.size()); }
  const std::vector<int>& simplex(int id) const { return simplices_[id]; }
  // -1 when the sorted vertex list spans no simplex of the complex.
  int simplex_id(std::vector<int> verts) const;
  int simplex_dim(int id) const {
    return static_cast<int>(simplices_[id].size()) - 1;
  }
  int dim() const { return dim_; }
  const std::vector<int>& simplices_of_dim(int k) const;
  const std::vector<int>& maximal_simplices() const { return maximal_; }
  bool is_maximal(int id) const { return is_maximal_[id]; }
  // Simplices strictly containing `id`, every dimension.
  const std::vector<int>& cofaces(int id) const { return cofaces_[id]; }
  bool is_face(int a, int b) const;  // simplex a contained in simplex b
  // Common face of two simplices: id of the simplex spanned by the shared
  // vertices, or -1 when the vertex sets are disjoint.
  int intersect(int a, int b) const;

  // f_vector()[k] = number of k-simplices.
  std::vector<long long> f_vector() const;

  // Every pairwise intersection of simplices is a single common face. With
  // the vertex-set representation this also certifies that no two distinct
  // simplices share a vertex set.
  bool intersection_condition_holds() const;

  bool same_simplex_set(const AllRightComplex& other) const;

 private:
  void finalize();

  std::vector<std::string> names_;
  std::vector<std::vector<int>> simplices_;  // sorted vertex ids, index = id
  std::map<std::vector<int>, int> id_by_verts_;
  std::vector<std::vector<int>> cofaces_;
  std::vector<std::vector<int>> by_dim_;
  std::vector<bool> is_maximal_;
  std::vector<int> maximal_;
  int dim_ = -1;
};

// A point of the complex: unit direction vector on a carrier simplex, one
// nonnegative component per vertex of the carrier (sorted vertex order).
struct SimplexPoint {
  int simplex = -1;
  Eigen::VectorXd dir;
};

// Checks |dir| = 1 within tol_unit and dir >= -tol_neg componentwise.
void validate_point(const AllRightComplex& P, const SimplexPoint& x,
                    double tol_unit = 1e-12, double tol_neg = 1e-12);

// Canonical representative: the point reported on its support simplex (the
// unique minimal carrier, dropping components below support_tol).
SimplexPoint canonicalize(const AllRightComplex& P, const SimplexPoint& x,
                          double support_tol = 1e-12);

SimplexPoint barycenter(const AllRightComplex& P, int simplex);

// Orthogonal splitting of x across a simplex delta of its star:
//   x = cos(beta) w + sin(beta) u
// with w on delta and u on the opposite face of delta in a shared simplex.
struct StarSplit {
  double beta = 0.0;        // spherical distance from x to delta
  SimplexPoint w;           // closest point on delta (simplex = -1 if beta = pi/2)
  SimplexPoint u;           // direction point on the opposite face (-1 if beta = 0)
  int join = -1;            // a simplex containing both delta and the carrier of x
};

// Spherical distance from x to the simplex `delta`, measured inside any
// simplex containing both; nullopt when x lies outside the star of delta.
std::optional<double> star_local_distance(const AllRightComplex& P,
                                          const SimplexPoint& x, int delta);
std::optional<StarSplit> star_split(const AllRightComplex& P,
                                    const SimplexPoint& x, int delta);

// Distances from x to every simplex whose star contains x (the faces of the
// simplices containing x's support). Any simplex missing from the map is at
// distance >= pi/2 from x and so outside every normal neighborhood.
std::map<int, double> star_distances(const AllRightComplex& P,
                                     const SimplexPoint& x);

// Simplicial link of a simplex, with references back into the parent.
struct LinkComplex {
  AllRightComplex complex;
  int base = -1;                      // the simplex whose link this is
  std::vector<int> vertex_to_parent;  // link vertex -> parent vertex id
  std::vector<int> simplex_to_parent; // link simplex -> opposite-face simplex in parent
  std::vector<int> simplex_to_join;   // link simplex -> the join simplex (base * face)

  // Reinterprets a point on an opposite face of the base as a link point.
  SimplexPoint from_parent(const AllRightComplex& parent,
                           const SimplexPoint& u) const;
  SimplexPoint to_parent(const AllRightComplex& parent,
                         const SimplexPoint& u) const;
  int parent_face(int link_simplex) const {
    return simplex_to_parent[link_simplex];
  }
};

LinkComplex simplicial_link(const AllRightComplex& P, int delta);

// Cubical complexes. A k-cube is stored by its 2^k vertices in
// binary-counter order over the cube's k coordinate directions (bit i of
// the list position is the i-th coordinate). Faces are generated by fixing
// coordinates and are deduplicated by vertex set.
class CubicalComplex {
 public:
  CubicalComplex() = default;

  static CubicalComplex from_maximal(
      std::vector<std::string> vertex_names,
      const std::vector<std::vector<std::string>>& maximal);
  static CubicalComplex from_maximal_ids(
      std::vector<std::string> vertex_names,
      const std::vector<std::vector<int>>& maximal);

  static CubicalComplex single_cube(int n);
  static CubicalComplex cube_boundary(int n);  // facets of the n-cube
  static CubicalComplex glued_pair(int n);     // two n-cubes sharing a facet

  int vertex_count() const { return static_cast<int>(names_.size()); }
  const std::string& vertex_name(int v) const { return names_[v]; }
  int cube_count() const { return static_cast<int>(cubes_.size()); }
  const std::vector<int>& cube(int id) const { return cubes_[id]; }  // binary order
  int cube_dim(int id) const { return dims_[id]; }
  int dim() const { return dim_; }
  const std::vector<int>& cubes_of_dim(int k) const;
  const std::vector<int>& maximal_cubes() const { return maximal_; }
  bool is_maximal(int id) const { return is_maximal_[id]; }
  const std::vector<int>& cofaces(int id) const { return cofaces_[id]; }
  bool is_face(int a, int b) const;
  int intersect(int a, int b) const;  // common face by vertex set, -1 if disjoint
  int cube_id(std::vector<int> sorted_verts) const;

  // The two facets of `id` across coordinate axis, in binary sub-order.
  std::pair<int, int> facets_along(int id, int axis) const;
  std::vector<int> facets(int id) const;

  // Every k-face of a maximal n-cube is the intersection of exactly n-k of
  // its facets; checked exhaustively.
  bool face_intersection_property() const;

 private:
  void close_faces();

  std::vector<std::string> names_;
  std::vector<std::vector<int>> cubes_;  // binary-counter vertex order
  std::vector<int> dims_;
  std::map<std::vector<int>, int> id_by_verts_;  // sorted vertex set -> id
  std::vector<std::vector<int>> cofaces_;
  std::vector<std::vector<int>> by_dim_;
  std::vector<bool> is_maximal_;
  std::vector<int> maximal_;
  int dim_ = -1;
};

// Link of a cube: vertices are the (k+1)-cubes containing it; each
// (k+j+1)-cube containing it spans a j-simplex.
struct CubeLink {
  AllRightComplex complex;
  int base = -1;
  std::vector<int> vertex_to_cube;   // link vertex -> (k+1)-cube id
  std::vector<int> simplex_to_cube;  // link simplex -> coface cube id
};

CubeLink cube_link(const CubicalComplex& K, int cube);

}  // namespace conesmith
