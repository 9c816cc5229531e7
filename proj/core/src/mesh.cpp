#include "fsiwave/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <queue>
#include <unordered_map>

#include <json.hpp>

#include "fsiwave/error.hpp"

namespace fsiwave {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kQualityFloorDeg = 20.0;

double triangle_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) -
                  (c.x() - a.x()) * (b.y() - a.y()));
}

struct MeshBuilder {
    Mesh mesh;

    int add_vertex(const Vec2& p) {
        mesh.vertices.push_back(p);
        return static_cast<int>(mesh.vertices.size()) - 1;
    }
    void add_triangle(int a, int b, int c, CellTag tag) {
        // enforce CCW orientation
        if (triangle_area(mesh.vertices[a], mesh.vertices[b],
                          mesh.vertices[c]) < 0)
            std::swap(b, c);
        mesh.cells.push_back({a, b, c});
        mesh.cell_tag.push_back(tag);
    }
};

/// Triangulates the band between two closed polylines given as vertex ids
/// with strictly increasing periodic parameters in [0,1). Advances along
/// whichever ring has the smaller next parameter (classic annulus sweep).
void triangulate_band(MeshBuilder& mb, const std::vector<int>& inner,
                      const std::vector<double>& tin,
                      const std::vector<int>& outer,
                      const std::vector<double>& tout, CellTag tag) {
    const int p = static_cast<int>(inner.size());
    const int q = static_cast<int>(outer.size());
    int i = 0, j = 0;
    auto next_in = [&](int k) { return k + 1 < p ? tin[k + 1] : tin[0] + 1.0; };
    auto next_out = [&](int k) {
        return k + 1 < q ? tout[k + 1] : tout[0] + 1.0;
    };
    while (i < p || j < q) {
        bool advance_inner;
        if (i >= p)
            advance_inner = false;
        else if (j >= q)
            advance_inner = true;
        else
            advance_inner = next_in(i) <= next_out(j);
        if (advance_inner) {
            mb.add_triangle(inner[i], outer[j % q], inner[(i + 1) % p], tag);
            ++i;
        } else {
            mb.add_triangle(inner[i % p], outer[j], outer[(j + 1) % q], tag);
            ++j;
        }
    }
}

/// Hexagonal-web triangulation of a disc: ring i carries 6i vertices, so
/// all triangles stay near-equilateral. Returns the boundary ring ids in
/// parameter (angle) order together with their parameters.
std::pair<std::vector<int>, std::vector<double>> build_web_disc(
    MeshBuilder& mb, const Vec2& c, double R, int m, CellTag tag) {
    std::vector<int> prev = {mb.add_vertex(c)};
    std::vector<double> prev_t = {0.0};
    std::vector<int> ring;
    std::vector<double> ring_t;
    for (int i = 1; i <= m; ++i) {
        const int n = 6 * i;
        ring.clear();
        ring_t.clear();
        const double r = R * i / m;
        for (int j = 0; j < n; ++j) {
            const double t = static_cast<double>(j) / n;
            const double ang = 2.0 * kPi * t;
            ring.push_back(
                mb.add_vertex(c + r * Vec2(std::cos(ang), std::sin(ang))));
            ring_t.push_back(t);
        }
        if (i == 1) {
            for (int j = 0; j < n; ++j)
                mb.add_triangle(prev[0], ring[j], ring[(j + 1) % n], tag);
        } else {
            triangulate_band(mb, prev, prev_t, ring, ring_t, tag);
        }
        prev = ring;
        prev_t = ring_t;
    }
    return {prev, prev_t};
}

/// Structured triangulation of an axis-aligned square of side L centered
/// at the origin with n subdivisions per side; alternating diagonals.
/// Returns boundary ids in CCW perimeter order starting at (-L/2,-L/2).
std::pair<std::vector<int>, std::vector<double>> build_square_grid(
    MeshBuilder& mb, double L, int n, CellTag tag) {
    std::vector<std::vector<int>> id(n + 1, std::vector<int>(n + 1));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            id[i][j] = mb.add_vertex(
                Vec2(-L / 2 + L * i / n, -L / 2 + L * j / n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            int a = id[i][j], b = id[i + 1][j], cc = id[i + 1][j + 1],
                d = id[i][j + 1];
            if ((i + j) % 2 == 0) {
                mb.add_triangle(a, b, cc, tag);
                mb.add_triangle(a, cc, d, tag);
            } else {
                mb.add_triangle(a, b, d, tag);
                mb.add_triangle(b, cc, d, tag);
            }
        }
    std::vector<int> boundary;
    std::vector<double> params;
    auto push = [&](int v, double t) {
        boundary.push_back(v);
        params.push_back(t);
    };
    for (int i = 0; i < n; ++i) push(id[i][0], 0.00 + 0.25 * i / n);
    for (int j = 0; j < n; ++j) push(id[n][j], 0.25 + 0.25 * j / n);
    for (int i = n; i > 0; --i) push(id[i][n], 0.50 + 0.25 * (n - i) / n);
    for (int j = n; j > 0; --j) push(id[0][j], 0.75 + 0.25 * (n - j) / n);
    return {boundary, params};
}

/// Fills the region between an inner closed curve (already meshed, its
/// boundary ids/params given) and an outer closed curve with rings of
/// triangles. Ring vertex counts double whenever spacing outgrows 1.4 h.
/// Returns the final (outer boundary) ring's vertex ids.
std::vector<int> build_transition_rings(
    MeshBuilder& mb, std::vector<int> ring, std::vector<double> params,
    const std::function<Vec2(double)>& inner_curve,
    const std::function<Vec2(double)>& outer_curve, double h, CellTag tag) {
    double max_dist = 0.0;
    for (double t : params)
        max_dist =
            std::max(max_dist, (outer_curve(t) - inner_curve(t)).norm());
    const int K = std::max(1, static_cast<int>(std::lround(max_dist / h)));
    for (int k = 1; k <= K; ++k) {
        const double s = static_cast<double>(k) / K;
        // decide whether the next ring needs more points
        std::vector<double> next_params = params;
        double max_gap = 0.0;
        const int np = static_cast<int>(params.size());
        for (int j = 0; j < np; ++j) {
            Vec2 a = (1 - s) * inner_curve(params[j]) +
                     s * outer_curve(params[j]);
            double t2 = params[(j + 1) % np];
            Vec2 b = (1 - s) * inner_curve(t2) + s * outer_curve(t2);
            max_gap = std::max(max_gap, (b - a).norm());
        }
        if (max_gap > 1.4 * h) {
            next_params.clear();
            for (int j = 0; j < np; ++j) {
                double t = params[j];
                double t2 = (j + 1 < np) ? params[j + 1] : params[0] + 1.0;
                next_params.push_back(t);
                next_params.push_back(std::fmod(0.5 * (t + t2), 1.0));
            }
        }
        std::vector<int> next_ring;
        for (double t : next_params) {
            Vec2 pos = (1 - s) * inner_curve(t) + s * outer_curve(t);
            next_ring.push_back(mb.add_vertex(pos));
        }
        triangulate_band(mb, ring, params, next_ring, next_params, tag);
        ring = std::move(next_ring);
        params = std::move(next_params);
    }
    return ring;
}

/// Guarded Laplacian smoothing: a movable vertex is pulled toward the
/// centroid of its triangle neighbors, and the move is kept only if the
/// worst angle among its incident triangles improves. Used where the ring
/// construction leaves triangles marginally under the angle floor.
void smooth_vertices(MeshBuilder& mb, const std::vector<int>& movable,
                     int passes) {
    std::unordered_map<int, std::vector<int>> incident;  // vertex -> cells
    for (int v : movable) incident[v];
    for (int c = 0; c < static_cast<int>(mb.mesh.cells.size()); ++c)
        for (int k = 0; k < 3; ++k) {
            auto it = incident.find(mb.mesh.cells[c][k]);
            if (it != incident.end()) it->second.push_back(c);
        }
    auto local_min_angle = [&](const std::vector<int>& cells) {
        double worst = kPi;
        for (int c : cells) {
            const auto& cell = mb.mesh.cells[c];
            for (int k = 0; k < 3; ++k) {
                Vec2 u = mb.mesh.vertices[cell[(k + 1) % 3]] -
                         mb.mesh.vertices[cell[k]];
                Vec2 v = mb.mesh.vertices[cell[(k + 2) % 3]] -
                         mb.mesh.vertices[cell[k]];
                worst = std::min(
                    worst, std::acos(std::clamp(
                               u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)));
            }
        }
        return worst;
    };
    for (int pass = 0; pass < passes; ++pass) {
        for (int v : movable) {
            const auto& cells = incident[v];
            if (cells.empty()) continue;
            Vec2 sum = Vec2::Zero();
            int n = 0;
            for (int c : cells)
                for (int k = 0; k < 3; ++k)
                    if (mb.mesh.cells[c][k] != v) {
                        sum += mb.mesh.vertices[mb.mesh.cells[c][k]];
                        ++n;
                    }
            const Vec2 old = mb.mesh.vertices[v];
            const double before = local_min_angle(cells);
            mb.mesh.vertices[v] = sum / static_cast<double>(n);
            if (local_min_angle(cells) <= before) mb.mesh.vertices[v] = old;
        }
    }
}

Vec2 square_point(double t, double L) {
    // perimeter parameterization, corners at t = 0, .25, .5, .75,
    // starting at the (-L/2,-L/2) corner, CCW
    t = t - std::floor(t);
    const double side = 4.0 * t;
    const int s = std::min(3, static_cast<int>(side));
    const double f = side - s;
    switch (s) {
        case 0: return Vec2(-L / 2 + L * f, -L / 2);
        case 1: return Vec2(L / 2, -L / 2 + L * f);
        case 2: return Vec2(L / 2 - L * f, L / 2);
        default: return Vec2(-L / 2, L / 2 - L * f);
    }
}

/// Maps the disc boundary angle parameter onto the square perimeter
/// parameter so that rings rotate smoothly from circle to square.
double angle_to_perimeter_param(double t) {
    // angle 0 is the midpoint of the right side, i.e. perimeter t=0.375?
    // Perimeter starts at corner (-L/2,-L/2): right-side midpoint is at
    // t = 0.25 + 0.125 = 0.375. Work side by side from the angle.
    const double ang = 2.0 * kPi * t;
    const double cx = std::cos(ang), sy = std::sin(ang);
    const double m = std::max(std::abs(cx), std::abs(sy));
    const double x = cx / m, y = sy / m;  // on the unit square [-1,1]^2
    double p;
    if (std::abs(x - 1.0) < 1e-14)
        p = 0.25 + 0.125 * (y + 1.0);
    else if (std::abs(y - 1.0) < 1e-14)
        p = 0.50 + 0.125 * (1.0 - x);
    else if (std::abs(x + 1.0) < 1e-14)
        p = 0.75 + 0.125 * (1.0 - y);
    else
        p = 0.00 + 0.125 * (x + 1.0);
    return std::fmod(p, 1.0);
}

void extract_facets(Mesh& mesh) {
    struct EdgeInfo {
        int cells[2] = {-1, -1};
        int count = 0;
    };
    std::unordered_map<long long, EdgeInfo> edges;
    const long long nv = mesh.n_vertices();
    auto key = [nv](int a, int b) {
        if (a > b) std::swap(a, b);
        return static_cast<long long>(a) * nv + b;
    };
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto& cell = mesh.cells[c];
        for (int e = 0; e < 3; ++e) {
            int a = cell[e], b = cell[(e + 1) % 3];
            auto& info = edges[key(a, b)];
            if (info.count < 2) info.cells[info.count] = c;
            ++info.count;
        }
    }
    bool has_fluid = std::any_of(mesh.cell_tag.begin(), mesh.cell_tag.end(),
                                 [](CellTag t) { return t == CellTag::Fluid; });
    for (int c = 0; c < mesh.n_cells(); ++c) {
        const auto& cell = mesh.cells[c];
        for (int e = 0; e < 3; ++e) {
            int a = cell[e], b = cell[(e + 1) % 3];
            const auto& info = edges[key(a, b)];
            if (info.count > 2)
                throw InvalidSpec("mesh: edge shared by more than two cells");
            Facet f;
            f.v = {a, b};
            if (info.count == 2) {
                int c2 = info.cells[0] == c ? info.cells[1] : info.cells[0];
                if (mesh.cell_tag[c] == mesh.cell_tag[c2]) continue;
                if (mesh.cell_tag[c] != CellTag::Solid)
                    continue;  // emit once, from the solid side
                f.tag = FacetTag::Interface;
                f.solid_cell = c;
                f.fluid_cell = c2;
            } else {
                f.tag = (mesh.cell_tag[c] == CellTag::Fluid || has_fluid)
                            ? FacetTag::Outer
                            : FacetTag::Interface;
                if (mesh.cell_tag[c] == CellTag::Fluid)
                    f.fluid_cell = c;
                else
                    f.solid_cell = c;
            }
            // outward normal: perpendicular to the edge, away from the
            // owning cell's opposite vertex
            const int own = f.tag == FacetTag::Interface ? f.solid_cell : c;
            const auto& oc = mesh.cells[own];
            int opp = oc[0] + oc[1] + oc[2] - a - b;
            Vec2 tangent = mesh.vertices[b] - mesh.vertices[a];
            Vec2 nrm(tangent.y(), -tangent.x());
            if (nrm.dot(mesh.vertices[opp] - mesh.vertices[a]) > 0) nrm = -nrm;
            f.normal = nrm.normalized();
            mesh.facets.push_back(f);
        }
    }
}

Mesh build_interval(const DomainSpec& spec) {
    if (spec.b <= spec.a) throw InvalidSpec("Interval1D: requires a < b");
    Mesh mesh;
    mesh.dim = 1;
    const int n =
        std::max(1, static_cast<int>(std::lround((spec.b - spec.a) / spec.h)));
    for (int i = 0; i <= n; ++i)
        mesh.vertices.push_back(
            Vec2(spec.a + (spec.b - spec.a) * i / n, 0.0));
    for (int i = 0; i < n; ++i) {
        mesh.cells.push_back({i, i + 1, -1});
        mesh.cell_tag.push_back(CellTag::Solid);
    }
    Facet left;
    left.v = {0, -1};
    left.tag = FacetTag::Interface;
    left.normal = Vec2(-1.0, 0.0);
    left.solid_cell = 0;
    Facet right;
    right.v = {n, -1};
    right.tag = FacetTag::Interface;
    right.normal = Vec2(1.0, 0.0);
    right.solid_cell = n - 1;
    mesh.facets = {left, right};
    return mesh;
}

Mesh try_build(const DomainSpec& spec) {
    MeshBuilder mb;
    switch (spec.kind) {
        case DomainSpec::Kind::DiscInSquare: {
            if (std::max(std::abs(spec.center.x()), std::abs(spec.center.y())) +
                    spec.R >=
                spec.L / 2)
                throw InvalidSpec(
                    "DiscInSquare: disc not strictly inside the square");
            const int m =
                std::max(3, static_cast<int>(std::lround(spec.R / spec.h)));
            auto [ring, params] =
                build_web_disc(mb, spec.center, spec.R, m, CellTag::Solid);
            auto inner = [&](double t) {
                return Vec2(spec.center +
                            spec.R * Vec2(std::cos(2 * kPi * t),
                                          std::sin(2 * kPi * t)));
            };
            auto outer = [&](double t) {
                return square_point(angle_to_perimeter_param(t), spec.L);
            };
            build_transition_rings(mb, ring, params, inner, outer, spec.h,
                                   CellTag::Fluid);
            break;
        }
        case DomainSpec::Kind::DiscInDisc: {
            if (spec.R_in >= spec.R_out)
                throw InvalidSpec("DiscInDisc: requires R_in < R_out");
            const int m =
                std::max(3, static_cast<int>(std::lround(spec.R_in / spec.h)));
            auto [ring, params] =
                build_web_disc(mb, Vec2::Zero(), spec.R_in, m, CellTag::Solid);
            auto inner = [&](double t) {
                return Vec2(spec.R_in * std::cos(2 * kPi * t),
                            spec.R_in * std::sin(2 * kPi * t));
            };
            auto outer = [&](double t) {
                return Vec2(spec.R_out * std::cos(2 * kPi * t),
                            spec.R_out * std::sin(2 * kPi * t));
            };
            build_transition_rings(mb, ring, params, inner, outer, spec.h,
                                   CellTag::Fluid);
            break;
        }
        case DomainSpec::Kind::SquareInSquare: {
            if (spec.L_in >= spec.L_out)
                throw InvalidSpec("SquareInSquare: requires L_in < L_out");
            const int n =
                std::max(2, static_cast<int>(std::lround(spec.L_in / spec.h)));
            auto [ring, params] =
                build_square_grid(mb, spec.L_in, n, CellTag::Solid);
            const int first_band_vertex =
                static_cast<int>(mb.mesh.vertices.size());
            // concentric square rings; per-side point counts grow with the
            // perimeter so spacing stays near h and corners stay corners
            const double half_gap = (spec.L_out - spec.L_in) / 2.0;
            const int K = std::max(
                1, static_cast<int>(std::lround(half_gap / spec.h)));
            std::vector<int> last_ring;
            for (int k = 1; k <= K; ++k) {
                const double s = static_cast<double>(k) / K;
                const double L = (1 - s) * spec.L_in + s * spec.L_out;
                const int m = std::max(
                    n, static_cast<int>(std::lround(L / spec.h)));
                std::vector<int> next_ring;
                std::vector<double> next_params;
                for (int side = 0; side < 4; ++side)
                    for (int j = 0; j < m; ++j) {
                        const double t =
                            0.25 * side + 0.25 * j / static_cast<double>(m);
                        next_params.push_back(t);
                        next_ring.push_back(
                            mb.add_vertex(square_point(t, L)));
                    }
                triangulate_band(mb, ring, params, next_ring, next_params,
                                 CellTag::Fluid);
                ring = std::move(next_ring);
                params = std::move(next_params);
                if (k == K) last_ring = ring;
            }
            // relax interior band vertices where rings turn the corner
            std::vector<bool> fixed(mb.mesh.vertices.size(), false);
            for (int v : last_ring) fixed[v] = true;
            std::vector<int> movable;
            for (int v = first_band_vertex;
                 v < static_cast<int>(mb.mesh.vertices.size()); ++v)
                if (!fixed[v]) movable.push_back(v);
            smooth_vertices(mb, movable, 20);
            break;
        }
        default:
            throw InvalidSpec("try_build: unsupported kind");
    }
    Mesh mesh = std::move(mb.mesh);
    extract_facets(mesh);
    return mesh;
}

}  // namespace

DomainSpec DomainSpec::interval(double a, double b, double h) {
    DomainSpec s;
    s.kind = Kind::Interval1D;
    s.a = a;
    s.b = b;
    s.h = h;
    return s;
}
DomainSpec DomainSpec::disc_in_square(double L, double R, Vec2 center,
                                      double h) {
    DomainSpec s;
    s.kind = Kind::DiscInSquare;
    s.L = L;
    s.R = R;
    s.center = center;
    s.h = h;
    return s;
}
DomainSpec DomainSpec::disc_in_disc(double R_out, double R_in, double h) {
    DomainSpec s;
    s.kind = Kind::DiscInDisc;
    s.R_out = R_out;
    s.R_in = R_in;
    s.h = h;
    return s;
}
DomainSpec DomainSpec::square_in_square(double L_out, double L_in, double h) {
    DomainSpec s;
    s.kind = Kind::SquareInSquare;
    s.L_out = L_out;
    s.L_in = L_in;
    s.h = h;
    return s;
}
DomainSpec DomainSpec::ball_analytic(double r) {
    DomainSpec s;
    s.kind = Kind::BallAnalytic;
    s.ball_radius = r;
    s.h = r;
    return s;
}

double Mesh::cell_measure(int c) const {
    const auto& cell = cells[c];
    if (dim == 1)
        return std::abs(vertices[cell[1]].x() - vertices[cell[0]].x());
    return std::abs(triangle_area(vertices[cell[0]], vertices[cell[1]],
                                  vertices[cell[2]]));
}

double Mesh::facet_measure(int f) const {
    if (dim == 1) return 1.0;
    const auto& fc = facets[f];
    return (vertices[fc.v[1]] - vertices[fc.v[0]]).norm();
}

double Mesh::region_measure(CellTag tag) const {
    double total = 0.0;
    for (int c = 0; c < n_cells(); ++c)
        if (cell_tag[c] == tag) total += cell_measure(c);
    return total;
}

double Mesh::min_angle_deg() const {
    if (dim == 1) return 60.0;
    double min_angle = 180.0;
    for (const auto& cell : cells) {
        for (int k = 0; k < 3; ++k) {
            Vec2 u = vertices[cell[(k + 1) % 3]] - vertices[cell[k]];
            Vec2 v = vertices[cell[(k + 2) % 3]] - vertices[cell[k]];
            double ang = std::acos(std::clamp(
                u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0));
            min_angle = std::min(min_angle, ang * 180.0 / kPi);
        }
    }
    return min_angle;
}

void Mesh::validate() const {
    if (dim == 3) return;  // analytic-only marker
    for (const auto& f : facets) {
        if (std::abs(f.normal.norm() - 1.0) > 1e-12)
            throw InvalidSpec("mesh: facet normal not unit length");
        if (f.tag == FacetTag::Interface && f.solid_cell < 0)
            throw InvalidSpec("mesh: interface facet without solid cell");
        if (f.tag == FacetTag::Outer && f.fluid_cell < 0)
            throw InvalidSpec("mesh: outer facet without fluid cell");
    }
    // solid connectivity: BFS over cells sharing an edge
    std::vector<int> solid_cells;
    for (int c = 0; c < n_cells(); ++c)
        if (cell_tag[c] == CellTag::Solid) solid_cells.push_back(c);
    if (solid_cells.empty()) throw InvalidSpec("mesh: no solid cells");
    std::unordered_map<long long, std::vector<int>> edge_cells;
    const long long nv = n_vertices();
    for (int c : solid_cells) {
        const int ne = dim == 1 ? 1 : 3;
        for (int e = 0; e < ne; ++e) {
            int a = cells[c][e];
            int b = dim == 1 ? a : cells[c][(e + 1) % 3];
            if (a > b) std::swap(a, b);
            edge_cells[static_cast<long long>(a) * nv + b].push_back(c);
        }
    }
    if (dim == 1) {
        // segments: connected iff contiguous, trivially true by build
        return;
    }
    std::unordered_map<int, bool> seen;
    std::queue<int> queue;
    queue.push(solid_cells[0]);
    seen[solid_cells[0]] = true;
    int reached = 0;
    while (!queue.empty()) {
        int c = queue.front();
        queue.pop();
        ++reached;
        for (int e = 0; e < 3; ++e) {
            int a = cells[c][e], b = cells[c][(e + 1) % 3];
            if (a > b) std::swap(a, b);
            for (int c2 : edge_cells[static_cast<long long>(a) * nv + b])
                if (!seen[c2]) {
                    seen[c2] = true;
                    queue.push(c2);
                }
        }
    }
    if (reached != static_cast<int>(solid_cells.size()))
        throw InvalidSpec("mesh: solid region is not connected");
}

Mesh build_mesh(const DomainSpec& spec) {
    if (spec.h <= 0) throw InvalidSpec("build_mesh: h must be positive");
    if (spec.kind == DomainSpec::Kind::BallAnalytic) {
        if (spec.ball_radius <= 0)
            throw InvalidSpec("BallAnalytic: radius must be positive");
        Mesh mesh;
        mesh.dim = 3;
        return mesh;
    }
    if (spec.kind == DomainSpec::Kind::Interval1D) {
        Mesh mesh = build_interval(spec);
        mesh.validate();
        return mesh;
    }
    DomainSpec attempt = spec;
    for (int tries = 0; tries < 3; ++tries) {
        Mesh mesh = try_build(attempt);
        if (mesh.min_angle_deg() >= kQualityFloorDeg) {
            mesh.validate();
            return mesh;
        }
        attempt.h /= 2;
    }
    throw InvalidSpec("build_mesh: could not reach the 20 degree angle floor");
}

std::string mesh_to_json(const Mesh& mesh) {
    nlohmann::json j;
    j["dim"] = mesh.dim;
    auto& verts = j["vertices"] = nlohmann::json::array();
    for (const auto& v : mesh.vertices)
        verts.push_back(mesh.dim == 1 ? nlohmann::json{v.x()}
                                      : nlohmann::json{v.x(), v.y()});
    auto& cells = j["cells"] = nlohmann::json::array();
    for (const auto& c : mesh.cells) {
        if (mesh.dim == 1)
            cells.push_back({c[0], c[1]});
        else
            cells.push_back({c[0], c[1], c[2]});
    }
    auto& tags = j["cell_tags"] = nlohmann::json::array();
    for (auto t : mesh.cell_tag) tags.push_back(static_cast<int>(t));
    auto& facets = j["facet_tags"] = nlohmann::json::array();
    for (const auto& f : mesh.facets)
        facets.push_back({f.v[0], f.v[1], static_cast<int>(f.tag)});
    return j.dump(2);
}

Mesh mesh_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Mesh mesh;
    mesh.dim = j.value("dim", 2);
    for (const auto& v : j.at("vertices"))
        mesh.vertices.push_back(mesh.dim == 1
                                    ? Vec2(v.at(0).get<double>(), 0.0)
                                    : Vec2(v.at(0).get<double>(),
                                           v.at(1).get<double>()));
    for (const auto& c : j.at("cells")) {
        if (mesh.dim == 1)
            mesh.cells.push_back({c.at(0).get<int>(), c.at(1).get<int>(), -1});
        else
            mesh.cells.push_back({c.at(0).get<int>(), c.at(1).get<int>(),
                                  c.at(2).get<int>()});
    }
    for (const auto& t : j.at("cell_tags"))
        mesh.cell_tag.push_back(static_cast<CellTag>(t.get<int>()));
    // facet tags are stored for interchange; geometry-derived facet data
    // (normals, adjacent cells) is rebuilt from the cells
    Mesh rebuilt = mesh;
    if (mesh.dim == 2) {
        extract_facets(rebuilt);
    } else {
        for (const auto& f : j.at("facet_tags")) {
            Facet facet;
            facet.v = {f.at(0).get<int>(), f.at(1).get<int>()};
            facet.tag = static_cast<FacetTag>(f.at(2).get<int>());
            facet.normal =
                Vec2(facet.v[0] == 0 ? -1.0 : 1.0, 0.0);
            facet.solid_cell = facet.v[0] == 0 ? 0 : rebuilt.n_cells() - 1;
            rebuilt.facets.push_back(facet);
        }
    }
    rebuilt.validate();
    return rebuilt;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("save_mesh: cannot open " + path);
    out << mesh_to_json(mesh);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifacts("load_mesh: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return mesh_from_json(text);
}

}  // namespace fsiwave
