#pragma once

#include <numbers>

#include "fermi/model.hpp"

namespace fixture {

/// Few-mode line small enough for dense oracles: L = 3 gives 8 modes below omega_max = 10.
inline fermi::RunConfig tiny(double k_a = 0.0225, double k_b = 0.0225, std::size_t n_max = 2, double t_max = 1.0,
                             double separation = 0.5) {
    fermi::ModelParams p;
    p.k_a = k_a;
    p.k_b = k_b;
    p.x_b = separation;
    fermi::Discretization d;
    d.modes = 64;
    d.omega_max = 10.0;
    d.box_length = 3.0;
    d.n_max = n_max;
    d.t_max = t_max;
    return fermi::validate(p, d);
}

/// Line with separation r and a derived box of 8 r.
inline fermi::RunConfig line(double separation, double k, std::size_t modes, double omega_max, double t_max,
                             fermi::CutoffKind cutoff = fermi::CutoffKind::Sharp, double omega_c = 0.0) {
    fermi::ModelParams p;
    p.k_a = k;
    p.k_b = k;
    p.x_b = separation;
    fermi::Discretization d;
    d.modes = modes;
    d.omega_max = omega_max;
    d.box_length = 8.0 * separation;
    d.t_max = t_max;
    d.cutoff = cutoff;
    d.omega_c = omega_c;
    return fermi::validate(p, d);
}

}  // namespace fixture
