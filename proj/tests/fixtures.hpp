#pragma once

// Hand-placed deployments shared by the unit tests and the acceptance binary.

#include <vector>

#include "auxkey/netsim.hpp"
#include "auxkey/simulation.hpp"

namespace auxkey::testing {

struct Layout {
    FieldGeometry field;
    std::vector<Point> regular;
    std::vector<Point> aux;
};

/// One auxiliary at the centre of a 100 m field, four regulars on a 20 m
/// square around it. Every pair is in range: 6 regular pairs, 4 regular-aux.
inline Layout five_node_layout() {
    return {make_field(100.0, 30.0, Boundary::bounded),
            {{40, 40}, {60, 40}, {40, 60}, {60, 60}},
            {{50, 50}}};
}

/// A line: aux(3) -- 0 -- 2 -- 1, 25 m apart. Node 2 only reaches the
/// auxiliary through node 0, so both pairs it answers for are supplemental.
inline Layout supplemental_layout() {
    return {make_field(300.0, 30.0, Boundary::bounded), {{35, 10}, {85, 10}, {60, 10}}, {{10, 10}}};
}

/// Two regulars in range of each other, nothing else within two hops.
inline Layout isolated_pair_layout() {
    return {make_field(300.0, 30.0, Boundary::bounded), {{200, 200}, {210, 200}}, {{10, 10}}};
}

/// 100 seeded points in a 150 m torus with rho = 30 (5 x 5 grid cells), with
/// a few nodes placed on the seams and at exactly rho apart.
inline std::vector<Point> hundred_node_points(std::uint64_t seed = 100) {
    const FieldGeometry field = make_field(150.0, 30.0);
    Rng rng(seed);
    std::vector<Point> pts = deploy_regular(92, field, rng);
    const std::vector<Point> edge{{0, 0}, {150, 150}, {0, 75}, {150, 75}, {30, 100}, {60, 100}, {75, 0}, {75, 30}};
    pts.insert(pts.end(), edge.begin(), edge.end());
    return pts;
}

inline Simulation make_sim(const Layout& l, std::uint64_t seed = 1, unsigned hops = 1) {
    return Simulation(l.field, l.regular, l.aux, seed, hops);
}

}  // namespace auxkey::testing
