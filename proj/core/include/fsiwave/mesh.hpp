#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace fsiwave {

using Vec2 = Eigen::Vector2d;

enum class CellTag { Fluid = 0, Solid = 1 };
enum class FacetTag { Outer = 0, Interface = 1 };

/// A boundary or interface facet: an edge in 2d, a single vertex in 1d
/// (v[1] < 0 then). `normal` points out of the solid on interface facets
/// and out of the domain on outer facets.
struct Facet {
    std::array<int, 2> v{-1, -1};
    FacetTag tag = FacetTag::Outer;
    Vec2 normal = Vec2::Zero();
    int fluid_cell = -1;
    int solid_cell = -1;
};

/// Simplicial mesh with fluid/solid subdomain tags. Cells are triangles
/// in 2d and segments in 1d (third vertex index set to -1). Immutable
/// after construction.
struct Mesh {
    int dim = 2;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> cells;
    std::vector<CellTag> cell_tag;
    std::vector<Facet> facets;

    int n_cells() const { return static_cast<int>(cells.size()); }
    int n_vertices() const { return static_cast<int>(vertices.size()); }

    /// Measure (area in 2d, length in 1d) of one cell.
    double cell_measure(int c) const;
    /// Length of one facet (1 in 1d).
    double facet_measure(int f) const;
    /// Sum of cell measures with the given tag.
    double region_measure(CellTag tag) const;
    /// Smallest interior angle over all triangles, in degrees. 60 in 1d.
    double min_angle_deg() const;
    /// Checks the structural invariants; throws InvalidSpec on violation.
    void validate() const;
};

/// Catalogue of test geometries. `h` is the target mesh size.
struct DomainSpec {
    enum class Kind {
        Interval1D,
        DiscInSquare,
        DiscInDisc,
        SquareInSquare,
        BallAnalytic
    };
    Kind kind = Kind::DiscInSquare;
    double h = 0.1;
    // Interval1D
    double a = -1.0, b = 1.0;
    // DiscInSquare
    double L = 4.0, R = 1.0;
    Vec2 center = Vec2::Zero();
    // DiscInDisc
    double R_out = 2.0, R_in = 1.0;
    // SquareInSquare
    double L_out = 3.0, L_in = 1.0;
    // BallAnalytic
    double ball_radius = 1.0;

    static DomainSpec interval(double a, double b, double h);
    static DomainSpec disc_in_square(double L, double R, Vec2 center, double h);
    static DomainSpec disc_in_disc(double R_out, double R_in, double h);
    static DomainSpec square_in_square(double L_out, double L_in, double h);
    static DomainSpec ball_analytic(double r);
};

/// Builds the tagged mesh for a domain spec. BallAnalytic yields a
/// cell-free marker mesh (dim 3). Throws InvalidSpec when containment
/// fails, h <= 0, or the triangle quality floor (20 degrees) cannot be met.
Mesh build_mesh(const DomainSpec& spec);

/// JSON export/import:
/// {vertices: [[x,y],...], cells: [[i,j,k],...], cell_tags: [...],
///  facet_tags: [[v0,v1,tag],...]}
std::string mesh_to_json(const Mesh& mesh);
Mesh mesh_from_json(const std::string& json_text);
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);

}  // namespace fsiwave
