#include "fsiwave/space.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fsiwave/error.hpp"
#include "fsiwave/io.hpp"

namespace fsiwave {

namespace {

bool in_region(CellTag tag, Region region) {
    return region == Region::Whole ||
           (region == Region::Fluid && tag == CellTag::Fluid) ||
           (region == Region::Solid && tag == CellTag::Solid);
}

struct CellMap {
    Eigen::Matrix2d JinvT = Eigen::Matrix2d::Zero();
    double inv_len = 0.0;  // 1d only
};

CellMap cell_map(const Mesh& mesh, const std::array<int, 3>& cell) {
    CellMap m;
    if (mesh.dim == 1) {
        m.inv_len = 1.0 /
                    (mesh.vertices[cell[1]].x() - mesh.vertices[cell[0]].x());
        return m;
    }
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices[cell[1]] - mesh.vertices[cell[0]];
    J.col(1) = mesh.vertices[cell[2]] - mesh.vertices[cell[0]];
    m.JinvT = J.inverse().transpose();
    return m;
}

}  // namespace

SpacePtr make_space(std::shared_ptr<const Mesh> mesh, Family family,
                    Region region) {
    auto space = std::make_shared<FeSpace>();
    space->mesh = mesh;
    space->family = family;
    space->region = region;
    space->degree =
        (family == Family::VectorP2 || family == Family::ScalarP2) ? 2 : 1;
    const bool vector =
        family == Family::VectorP2 || family == Family::VectorP1;
    space->components = vector ? std::min(mesh->dim, 2) : 1;
    const int nv_per_cell = mesh->dim == 1 ? 2 : 3;
    space->n_local_nodes =
        space->degree == 1 ? nv_per_cell : (mesh->dim == 1 ? 3 : 6);

    const long long nv = mesh->n_vertices();
    auto edge_key = [nv](int a, int b) {
        if (a > b) std::swap(a, b);
        return nv + static_cast<long long>(a) * nv + b;
    };

    std::unordered_map<long long, int> node_of_key;
    auto get_node = [&](long long key, const Vec2& pos) {
        auto it = node_of_key.find(key);
        if (it != node_of_key.end()) return it->second;
        int id = space->n_nodes();
        node_of_key.emplace(key, id);
        space->node_pos.push_back(pos);
        space->node_key.push_back(key);
        return id;
    };

    for (int c = 0; c < mesh->n_cells(); ++c) {
        if (!in_region(mesh->cell_tag[c], region)) continue;
        space->cells.push_back(c);
        const auto& cell = mesh->cells[c];
        std::array<int, 6> nodes{-1, -1, -1, -1, -1, -1};
        for (int k = 0; k < nv_per_cell; ++k)
            nodes[k] = get_node(cell[k], mesh->vertices[cell[k]]);
        if (space->degree == 2) {
            if (mesh->dim == 1) {
                nodes[2] = get_node(
                    edge_key(cell[0], cell[1]),
                    0.5 * (mesh->vertices[cell[0]] + mesh->vertices[cell[1]]));
            } else {
                for (int e = 0; e < 3; ++e) {
                    int a = cell[e], b = cell[(e + 1) % 3];
                    nodes[3 + e] = get_node(
                        edge_key(a, b),
                        0.5 * (mesh->vertices[a] + mesh->vertices[b]));
                }
            }
        }
        space->cell_nodes.push_back(nodes);
    }

    space->node_on_interface.assign(space->n_nodes(), false);
    space->node_on_outer.assign(space->n_nodes(), false);
    auto mark = [&](long long key, FacetTag tag) {
        auto it = node_of_key.find(key);
        if (it == node_of_key.end()) return;
        if (tag == FacetTag::Interface)
            space->node_on_interface[it->second] = true;
        else
            space->node_on_outer[it->second] = true;
    };
    for (const auto& f : mesh->facets) {
        mark(f.v[0], f.tag);
        if (f.v[1] >= 0) {
            mark(f.v[1], f.tag);
            if (space->degree == 2) mark(edge_key(f.v[0], f.v[1]), f.tag);
        }
    }
    return space;
}

Field make_field(SpacePtr space) {
    Field f;
    f.coeffs = Eigen::VectorXd::Zero(space->n_dofs());
    f.space = std::move(space);
    return f;
}

Field interpolate(SpacePtr space,
                  const std::function<Eigen::VectorXd(const Vec2&)>& f) {
    Field field = make_field(space);
    for (int n = 0; n < space->n_nodes(); ++n) {
        Eigen::VectorXd v = f(space->node_pos[n]);
        for (int c = 0; c < space->components; ++c)
            field.coeffs[space->dof(n, c)] = v[c];
    }
    return field;
}

BasisEval basis_at(const FeSpace& space, int region_cell, const QuadPoint& q) {
    const Mesh& mesh = *space.mesh;
    const auto& cell = mesh.cells[space.cells[region_cell]];
    const CellMap map = cell_map(mesh, cell);
    BasisEval out;
    out.nloc = space.n_local_nodes;
    if (mesh.dim == 1) {
        const double l0 = q.l0, l1 = q.l1;
        const Vec2 g1(map.inv_len, 0.0);
        const Vec2 g0 = -g1;
        if (space.degree == 1) {
            out.N = {l0, l1};
            out.grad = {g0, g1};
        } else {
            out.N = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), 4 * l0 * l1};
            out.grad = {(4 * l0 - 1) * g0, (4 * l1 - 1) * g1,
                        4.0 * (l0 * g1 + l1 * g0)};
        }
        return out;
    }
    const double l[3] = {q.l0, q.l1, q.l2};
    Vec2 gl[3];
    gl[1] = map.JinvT.col(0);
    gl[2] = map.JinvT.col(1);
    gl[0] = -gl[1] - gl[2];
    if (space.degree == 1) {
        for (int i = 0; i < 3; ++i) {
            out.N[i] = l[i];
            out.grad[i] = gl[i];
        }
    } else {
        for (int i = 0; i < 3; ++i) {
            out.N[i] = l[i] * (2 * l[i] - 1);
            out.grad[i] = (4 * l[i] - 1) * gl[i];
        }
        for (int e = 0; e < 3; ++e) {
            int a = e, b = (e + 1) % 3;
            out.N[3 + e] = 4 * l[a] * l[b];
            out.grad[3 + e] = 4 * (l[a] * gl[b] + l[b] * gl[a]);
        }
    }
    return out;
}

Eigen::VectorXd eval_value(const Field& f, int region_cell,
                           const QuadPoint& q) {
    const FeSpace& space = *f.space;
    const BasisEval basis = basis_at(space, region_cell, q);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(space.components);
    const auto& nodes = space.cell_nodes[region_cell];
    for (int k = 0; k < basis.nloc; ++k)
        for (int c = 0; c < space.components; ++c)
            v[c] += basis.N[k] * f.coeffs[space.dof(nodes[k], c)];
    return v;
}

Eigen::MatrixXd eval_gradient(const Field& f, int region_cell,
                              const QuadPoint& q) {
    const FeSpace& space = *f.space;
    const BasisEval basis = basis_at(space, region_cell, q);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(space.components, 2);
    const auto& nodes = space.cell_nodes[region_cell];
    for (int k = 0; k < basis.nloc; ++k)
        for (int c = 0; c < space.components; ++c)
            g.row(c) +=
                f.coeffs[space.dof(nodes[k], c)] * basis.grad[k].transpose();
    return g;
}

double norm(const Field& f, NormKind kind) {
    const FeSpace& space = *f.space;
    const Mesh& mesh = *space.mesh;
    const int qdeg = 2 * space.degree;
    double acc = 0.0;
    const auto& rule = mesh.dim == 1 ? segment_rule(3) : triangle_rule(qdeg);
    for (int rc = 0; rc < static_cast<int>(space.cells.size()); ++rc) {
        const double measure = mesh.cell_measure(space.cells[rc]);
        for (const auto& q : rule) {
            double dv = 0.0;
            if (kind != NormKind::H1Semi) {
                Eigen::VectorXd v = eval_value(f, rc, q);
                dv += v.squaredNorm();
            }
            if (kind != NormKind::L2) {
                Eigen::MatrixXd g = eval_gradient(f, rc, q);
                dv += g.squaredNorm();
            }
            acc += q.w * measure * dv;
        }
    }
    return std::sqrt(acc);
}

QuadPoint facet_point_in_cell(const Mesh& mesh, const Facet& facet, int cell,
                              double t) {
    const auto& c = mesh.cells[cell];
    if (mesh.dim == 1) {
        const double x = mesh.vertices[facet.v[0]].x();
        const double x0 = mesh.vertices[c[0]].x();
        const double x1 = mesh.vertices[c[1]].x();
        const double l1 = (x - x0) / (x1 - x0);
        return {1.0 - l1, l1, 0.0, 1.0};
    }
    const Vec2 p = (1.0 - t) * mesh.vertices[facet.v[0]] +
                   t * mesh.vertices[facet.v[1]];
    Eigen::Matrix2d J;
    J.col(0) = mesh.vertices[c[1]] - mesh.vertices[c[0]];
    J.col(1) = mesh.vertices[c[2]] - mesh.vertices[c[0]];
    const Vec2 ref = J.inverse() * (p - mesh.vertices[c[0]]);
    return {1.0 - ref.x() - ref.y(), ref.x(), ref.y(), 1.0};
}

int region_cell_index(const FeSpace& space, int cell) {
    auto it = std::lower_bound(space.cells.begin(), space.cells.end(), cell);
    if (it == space.cells.end() || *it != cell) return -1;
    return static_cast<int>(it - space.cells.begin());
}

double interface_normal_flux(const Field& v) {
    const FeSpace& space = *v.space;
    const Mesh& mesh = *space.mesh;
    const auto& rule = segment_rule(3);
    double flux = 0.0;
    for (int fi = 0; fi < static_cast<int>(mesh.facets.size()); ++fi) {
        const Facet& f = mesh.facets[fi];
        if (f.tag != FacetTag::Interface) continue;
        int cell = space.region == Region::Fluid ? f.fluid_cell : f.solid_cell;
        if (cell < 0) cell = f.fluid_cell >= 0 ? f.fluid_cell : f.solid_cell;
        const int rc = region_cell_index(space, cell);
        if (rc < 0) continue;
        const double len = mesh.facet_measure(fi);
        if (mesh.dim == 1) {
            QuadPoint qp = facet_point_in_cell(mesh, f, cell, 0.0);
            flux += eval_value(v, rc, qp)[0] * f.normal.x();
            continue;
        }
        for (const auto& q : rule) {
            QuadPoint qp = facet_point_in_cell(mesh, f, cell, q.l1);
            Eigen::VectorXd val = eval_value(v, rc, qp);
            flux += q.w * len * (val[0] * f.normal.x() +
                                 (val.size() > 1 ? val[1] * f.normal.y() : 0));
        }
    }
    return flux;
}

std::vector<int> map_nodes(const FeSpace& from, const FeSpace& to) {
    std::unordered_map<long long, int> lookup;
    for (int n = 0; n < to.n_nodes(); ++n) lookup.emplace(to.node_key[n], n);
    std::vector<int> map(from.n_nodes(), -1);
    for (int n = 0; n < from.n_nodes(); ++n) {
        auto it = lookup.find(from.node_key[n]);
        if (it != lookup.end()) map[n] = it->second;
    }
    return map;
}

void save_field_csv(const Field& f, const std::string& path) {
    CsvWriter csv(path, {"dof_index", "x", "y", "component", "value"});
    const FeSpace& space = *f.space;
    for (int n = 0; n < space.n_nodes(); ++n)
        for (int c = 0; c < space.components; ++c) {
            const int dof = space.dof(n, c);
            csv.row({static_cast<double>(dof), space.node_pos[n].x(),
                     space.node_pos[n].y(), static_cast<double>(c),
                     f.coeffs[dof]});
        }
}

Eigen::VectorXd load_field_csv(const std::string& path, int expected_dofs) {
    std::ifstream in(path);
    if (!in) throw MissingArtifacts("load_field_csv: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(expected_dofs);
    int count = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != 5)
            throw MissingArtifacts("load_field_csv: malformed row in " + path);
        const int dof = static_cast<int>(vals[0]);
        if (dof < 0 || dof >= expected_dofs)
            throw MissingArtifacts("load_field_csv: dof out of range");
        coeffs[dof] = vals[4];
        ++count;
    }
    if (count != expected_dofs)
        throw MissingArtifacts("load_field_csv: wrong dof count in " + path);
    return coeffs;
}

}  // namespace fsiwave
