#pragma once

// Field geometry, node placement, range-derived topology, auxiliary discovery
// and mobility.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "auxkey/crypto.hpp"

namespace auxkey {

struct InvalidParam : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct UnknownNode : std::out_of_range {
    using std::out_of_range::out_of_range;
};

enum class Boundary : std::uint8_t { torus, bounded };

struct Point {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const Point&, const Point&) = default;
};

struct FieldGeometry {
    double side = 0.0;
    double area = 0.0;
    double rho = 0.0;
    Boundary boundary = Boundary::torus;

    /// Squared distance; on a torus each axis takes the shorter way round.
    double distance2(Point a, Point b) const;
    double distance(Point a, Point b) const;
    /// Closed ball: nodes exactly rho apart are neighbours.
    bool in_range(Point a, Point b) const { return distance2(a, b) <= rho * rho; }
    bool contains(Point p) const { return p.x >= 0.0 && p.x <= side && p.y >= 0.0 && p.y <= side; }
};

/// Square field sized so that n uniformly placed nodes see d neighbours on
/// average: A = n * pi * rho^2 / (d + 1).
FieldGeometry compute_field(std::int64_t n, std::int64_t d, double rho, Boundary boundary = Boundary::torus);
/// Explicit side length, for hand-built fixtures.
FieldGeometry make_field(double side, double rho, Boundary boundary = Boundary::torus);

std::vector<Point> deploy_regular(std::size_t n, const FieldGeometry& field, Rng& rng);

/// Auxiliaries go one per cell of a c x c grid, c = ceil(sqrt(m)), filling
/// cells row-major from the origin; each lands uniformly inside its cell.
std::vector<Point> deploy_auxiliary(std::size_t m, const FieldGeometry& field, Rng& rng);
std::size_t aux_grid_dimension(std::size_t m);

/// Independent uniform placement of auxiliaries. Not the default layout;
/// used to separate placement effects from the connectivity formulas.
std::vector<Point> deploy_auxiliary_uniform(std::size_t m, const FieldGeometry& field, Rng& rng);

/// Symmetric adjacency in compressed-row form. Row i lists the indices of
/// every node within range of node i, sorted ascending, without i itself.
class Topology {
public:
    Topology() = default;
    Topology(std::vector<std::size_t> offsets, std::vector<std::uint32_t> targets);

    std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::span<const std::uint32_t> neighbors(std::size_t node) const;
    bool adjacent(std::size_t a, std::size_t b) const;
    std::size_t edge_count() const { return targets_.size() / 2; }
    double mean_degree() const;

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> targets_;
};

/// Grid-bucketed range query, parallel over nodes with OpenMP.
Topology build_topology(std::span<const Point> points, const FieldGeometry& field);
/// O(N^2) pairwise check. Serial reference for the kernel above.
Topology build_topology_reference(std::span<const Point> points, const FieldGeometry& field);

/// Uniform point in the disk of radius max_step around `from`. Torus fields
/// wrap; bounded fields resample until the point lands inside.
Point move_point(Point from, const FieldGeometry& field, double max_step, Rng& rng);

struct MobilityModel {
    double max_step = 0.0;
    std::size_t rounds = 0;
};

enum class NodeKind : std::uint8_t { regular, auxiliary };

/// Positions, roles and adjacency of one deployment. Index == NodeId::raw.
struct Network {
    FieldGeometry field;
    std::vector<Point> positions;
    std::vector<NodeKind> kinds;
    Topology topology;

    std::size_t size() const { return positions.size(); }
    bool is_auxiliary(std::size_t i) const { return kinds[i] == NodeKind::auxiliary; }
    void rebuild_topology() { topology = build_topology(positions, field); }
    std::vector<NodeId> neighbors(NodeId x) const;
};

struct AuxRoute {
    NodeId aux;
    /// Regular neighbour relaying discovery and the auxiliary exchange (h = 1).
    std::optional<NodeId> helper;
    unsigned hops = 0;
    friend bool operator==(const AuxRoute&, const AuxRoute&) = default;
};

/// Auxiliary for node v within `hops` (0 or 1) hops. Nearest to v wins, ties
/// by smallest id. std::nullopt is the NotFound outcome.
std::optional<AuxRoute> discover_aux(const Network& net, NodeId v, unsigned hops);

}  // namespace auxkey
