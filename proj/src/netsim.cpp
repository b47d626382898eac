#include "auxkey/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace auxkey {

double FieldGeometry::distance2(Point a, Point b) const {
    double dx = std::fabs(a.x - b.x);
    double dy = std::fabs(a.y - b.y);
    if (boundary == Boundary::torus) {
        if (dx > 0.5 * side) dx = side - dx;
        if (dy > 0.5 * side) dy = side - dy;
    }
    return dx * dx + dy * dy;
}

double FieldGeometry::distance(Point a, Point b) const { return std::sqrt(distance2(a, b)); }

FieldGeometry compute_field(std::int64_t n, std::int64_t d, double rho, Boundary boundary) {
    if (n < 1) throw InvalidParam("n must be >= 1");
    if (d < 1) throw InvalidParam("d must be >= 1");
    if (!(rho > 0.0) || !std::isfinite(rho)) throw InvalidParam("rho must be > 0");
    FieldGeometry f;
    f.area = static_cast<double>(n) * std::numbers::pi * rho * rho / static_cast<double>(d + 1);
    f.side = std::sqrt(f.area);
    f.rho = rho;
    f.boundary = boundary;
    return f;
}

FieldGeometry make_field(double side, double rho, Boundary boundary) {
    if (!(side > 0.0)) throw InvalidParam("side must be > 0");
    if (!(rho > 0.0)) throw InvalidParam("rho must be > 0");
    return FieldGeometry{side, side * side, rho, boundary};
}

std::vector<Point> deploy_regular(std::size_t n, const FieldGeometry& field, Rng& rng) {
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p.x = rng.uniform() * field.side;
        p.y = rng.uniform() * field.side;
    }
    return pts;
}

std::size_t aux_grid_dimension(std::size_t m) {
    auto c = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
    while (c * c < m) ++c;
    while (c > 0 && (c - 1) * (c - 1) >= m) --c;
    return c;
}

std::vector<Point> deploy_auxiliary(std::size_t m, const FieldGeometry& field, Rng& rng) {
    if (m == 0) return {};
    const std::size_t c = aux_grid_dimension(m);
    const double cell = field.side / static_cast<double>(c);
    std::vector<Point> pts(m);
    for (std::size_t k = 0; k < m; ++k) {
        const auto row = static_cast<double>(k / c);
        const auto col = static_cast<double>(k % c);
        pts[k].x = (col + rng.uniform()) * cell;
        pts[k].y = (row + rng.uniform()) * cell;
    }
    return pts;
}

std::vector<Point> deploy_auxiliary_uniform(std::size_t m, const FieldGeometry& field, Rng& rng) {
    return deploy_regular(m, field, rng);
}

Topology::Topology(std::vector<std::size_t> offsets, std::vector<std::uint32_t> targets)
    : offsets_(std::move(offsets)), targets_(std::move(targets)) {}

std::span<const std::uint32_t> Topology::neighbors(std::size_t node) const {
    if (node >= size()) throw UnknownNode("node " + std::to_string(node) + " not in topology");
    return {targets_.data() + offsets_[node], offsets_[node + 1] - offsets_[node]};
}

bool Topology::adjacent(std::size_t a, std::size_t b) const {
    const auto row = neighbors(a);
    return std::binary_search(row.begin(), row.end(), static_cast<std::uint32_t>(b));
}

double Topology::mean_degree() const {
    return size() == 0 ? 0.0 : static_cast<double>(targets_.size()) / static_cast<double>(size());
}

Topology build_topology_reference(std::span<const Point> points, const FieldGeometry& field) {
    const std::size_t n = points.size();
    std::vector<std::vector<std::uint32_t>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (field.in_range(points[i], points[j])) {
                rows[i].push_back(static_cast<std::uint32_t>(j));
                rows[j].push_back(static_cast<std::uint32_t>(i));
            }
        }
    }
    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + rows[i].size();
    std::vector<std::uint32_t> targets;
    targets.reserve(offsets[n]);
    for (auto& r : rows) {
        std::sort(r.begin(), r.end());
        targets.insert(targets.end(), r.begin(), r.end());
    }
    return Topology(std::move(offsets), std::move(targets));
}

Topology build_topology(std::span<const Point> points, const FieldGeometry& field) {
    const std::size_t n = points.size();
    // Cells are at least rho wide so every neighbour lies in the 3x3 block
    // around a node's own cell. Below 3 cells per side the torus block
    // would visit a cell twice; the reference scan is cheap at that size.
    const auto k = static_cast<std::int64_t>(std::floor(field.side / field.rho));
    if (k < 3) return build_topology_reference(points, field);

    const double cell = field.side / static_cast<double>(k);
    auto cell_of = [&](double v) {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>(v / cell), 0, k - 1);
    };

    const auto cells = static_cast<std::size_t>(k * k);
    std::vector<std::size_t> cell_start(cells + 1, 0);
    std::vector<std::size_t> home(n);
    for (std::size_t i = 0; i < n; ++i) {
        home[i] = static_cast<std::size_t>(cell_of(points[i].y) * k + cell_of(points[i].x));
        ++cell_start[home[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) cell_start[c + 1] += cell_start[c];
    std::vector<std::uint32_t> members(n);
    {
        std::vector<std::size_t> fill(cell_start.begin(), cell_start.end() - 1);
        for (std::size_t i = 0; i < n; ++i) members[fill[home[i]]++] = static_cast<std::uint32_t>(i);
    }

    std::vector<std::vector<std::uint32_t>> rows(n);
    const bool torus = field.boundary == Boundary::torus;
    const auto expected_degree = static_cast<std::size_t>(
        1.25 * static_cast<double>(n) * std::numbers::pi * field.rho * field.rho / (field.side * field.side)) + 4;

#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const std::int64_t cx = static_cast<std::int64_t>(home[i]) % k;
        const std::int64_t cy = static_cast<std::int64_t>(home[i]) / k;
        auto& row = rows[i];
        row.reserve(expected_degree);
        for (std::int64_t dy = -1; dy <= 1; ++dy) {
            std::int64_t y = cy + dy;
            if (torus) {
                y = (y + k) % k;
            } else if (y < 0 || y >= k) {
                continue;
            }
            for (std::int64_t dx = -1; dx <= 1; ++dx) {
                std::int64_t x = cx + dx;
                if (torus) {
                    x = (x + k) % k;
                } else if (x < 0 || x >= k) {
                    continue;
                }
                const auto c = static_cast<std::size_t>(y * k + x);
                for (std::size_t s = cell_start[c]; s < cell_start[c + 1]; ++s) {
                    const std::uint32_t j = members[s];
                    if (j != i && field.in_range(points[i], points[j])) row.push_back(j);
                }
            }
        }
        std::sort(row.begin(), row.end());
    }

    std::vector<std::size_t> offsets(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) offsets[i + 1] = offsets[i] + rows[i].size();
    std::vector<std::uint32_t> targets(offsets[n]);

#pragma omp parallel for schedule(static)
    for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::copy(rows[i].begin(), rows[i].end(), targets.begin() + static_cast<std::ptrdiff_t>(offsets[i]));
    }
    return Topology(std::move(offsets), std::move(targets));
}

Point move_point(Point from, const FieldGeometry& field, double max_step, Rng& rng) {
    if (max_step <= 0.0) return from;
    for (;;) {
        const double r = max_step * std::sqrt(rng.uniform());
        const double theta = 2.0 * std::numbers::pi * rng.uniform();
        Point p{from.x + r * std::cos(theta), from.y + r * std::sin(theta)};
        if (field.boundary == Boundary::torus) {
            p.x = std::fmod(p.x, field.side);
            p.y = std::fmod(p.y, field.side);
            if (p.x < 0.0) p.x += field.side;
            if (p.y < 0.0) p.y += field.side;
            return p;
        }
        if (field.contains(p)) return p;
    }
}

std::vector<NodeId> Network::neighbors(NodeId x) const {
    const auto row = topology.neighbors(static_cast<std::size_t>(x.raw));
    std::vector<NodeId> out;
    out.reserve(row.size());
    for (auto j : row) out.push_back(NodeId{j});
    return out;
}

std::optional<AuxRoute> discover_aux(const Network& net, NodeId v, unsigned hops) {
    if (hops > 1) throw InvalidParam("discovery is limited to one supplemental hop");
    const auto vi = static_cast<std::size_t>(v.raw);
    const auto row = net.topology.neighbors(vi);
    const Point at = net.positions[vi];

    std::optional<std::uint32_t> best;
    double best_d2 = 0.0;
    auto consider = [&](std::uint32_t a) {
        const double d2 = net.field.distance2(at, net.positions[a]);
        if (!best || d2 < best_d2 || (d2 == best_d2 && a < *best)) {
            best = a;
            best_d2 = d2;
        }
    };

    for (auto j : row) {
        if (net.is_auxiliary(j)) consider(j);
    }
    if (best) return AuxRoute{NodeId{*best}, std::nullopt, 0};
    if (hops == 0) return std::nullopt;

    for (auto w : row) {
        if (net.is_auxiliary(w)) continue;
        for (auto a : net.topology.neighbors(w)) {
            if (net.is_auxiliary(a)) consider(a);
        }
    }
    if (!best) return std::nullopt;
    // Rows are sorted, so the first match is the smallest-id helper.
    for (auto w : row) {
        if (!net.is_auxiliary(w) && net.topology.adjacent(w, *best)) {
            return AuxRoute{NodeId{*best}, NodeId{w}, 1};
        }
    }
    return std::nullopt;  // unreachable: best was found through some w
}

}  // namespace auxkey
