#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fsiwave/mesh.hpp"
#include "fsiwave/quadrature.hpp"

namespace fsiwave {

enum class Family { VectorP2, VectorP1, ScalarP1, ScalarP2 };
enum class Region { Fluid, Solid, Whole };

/// Conforming Lagrange space over the cells of one subdomain (or the
/// whole mesh). Nodes are vertices plus, for quadratic families, edge
/// midpoints; dofs are node-major with `components` entries per node.
struct FeSpace {
    std::shared_ptr<const Mesh> mesh;
    Family family;
    Region region;
    int components = 1;  // 1 for scalar, mesh dim for vector
    int degree = 1;
    int n_local_nodes = 3;

    std::vector<int> cells;  // mesh cell ids covered by this space
    std::vector<std::array<int, 6>> cell_nodes;  // local -> global node
    std::vector<Vec2> node_pos;
    std::vector<long long> node_key;  // vertex id, or n_vertices + edge id
    std::vector<bool> node_on_interface;
    std::vector<bool> node_on_outer;

    int n_nodes() const { return static_cast<int>(node_pos.size()); }
    int n_dofs() const { return n_nodes() * components; }
    int dof(int node, int comp) const { return node * components + comp; }
};

using SpacePtr = std::shared_ptr<const FeSpace>;

SpacePtr make_space(std::shared_ptr<const Mesh> mesh, Family family,
                    Region region);

/// Coefficient vector bound to its space.
struct Field {
    SpacePtr space;
    Eigen::VectorXd coeffs;
};

Field make_field(SpacePtr space);
/// Nodal interpolation of a callable returning `components` values.
Field interpolate(SpacePtr space,
                  const std::function<Eigen::VectorXd(const Vec2&)>& f);

/// Shape function values and physical gradients on one region cell.
struct BasisEval {
    int nloc = 0;
    std::array<double, 6> N{};
    std::array<Vec2, 6> grad{};
};
BasisEval basis_at(const FeSpace& space, int region_cell, const QuadPoint& q);

Eigen::VectorXd eval_value(const Field& f, int region_cell,
                           const QuadPoint& q);
/// Gradient as components x 2 matrix (second column zero in 1d).
Eigen::MatrixXd eval_gradient(const Field& f, int region_cell,
                              const QuadPoint& q);

enum class NormKind { L2, H1, H1Semi };

/// Quadrature-exact norm of a field over its own region.
double norm(const Field& f, NormKind kind);

/// Integral of v . n over the interface, n the solid-outward normal.
double interface_normal_flux(const Field& v);

/// Barycentric coordinates of the point at parameter t in [0,1] along a
/// facet, with respect to the given mesh cell.
QuadPoint facet_point_in_cell(const Mesh& mesh, const Facet& facet, int cell,
                              double t);

/// Index of `cell` within space.cells, or -1.
int region_cell_index(const FeSpace& space, int cell);

/// Node map between spaces over the same mesh: to_node = map[from_node],
/// -1 where the node is not present in `to`.
std::vector<int> map_nodes(const FeSpace& from, const FeSpace& to);

/// Snapshot export: CSV rows (dof_index, x, y, component, value).
void save_field_csv(const Field& f, const std::string& path);
Eigen::VectorXd load_field_csv(const std::string& path, int expected_dofs);

}  // namespace fsiwave
