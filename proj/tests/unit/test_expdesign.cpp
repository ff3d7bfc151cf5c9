#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fermi/expdesign.hpp"
#include "oracles.hpp"

using namespace fermi;

namespace {

FluxQubitParams qubit(double ramp) {
    return {3e-7, 2.0 * std::numbers::pi * 1e9, 1.3e-18, ramp};
}

DesignInput full_input() {
    DesignInput in;
    in.a = {3e-7, 1e9, 1.3e-18, 1e-6, 4.884e8};
    in.b = {3e-7, 1e9, 1.3e-18, 1e-10, 2.184e8};
    in.compute_dressing = false;
    return in;
}

}  // namespace

TEST_CASE("flux dispersion and its inverse") {
    const auto p = qubit(0.0);
    CHECK(omega_from_flux({p.persistent_current, p.gap, 0.0, 0.0}) == p.gap);
    const double w = omega_from_flux(p);
    const double e = 2.0 * p.persistent_current * p.flux_offset / kHbar;
    CHECK(w == doctest::Approx(std::hypot(e, p.gap)));
    CHECK(flux_from_omega(w, p) == doctest::Approx(p.flux_offset).epsilon(1e-12));
    CHECK_THROWS_AS(flux_from_omega(0.5 * p.gap, p), std::domain_error);
    CHECK_THROWS_AS(check(FluxQubitParams{}), ValidationError);
}

TEST_CASE("coupling ratio from g / Omega") {
    CHECK(coupling_ratio(0.1, 1.0) == doctest::Approx(0.02));
    CHECK(g_from_K(coupling_ratio(0.3, 2.0), 2.0) == doctest::Approx(0.3));
}

TEST_CASE("Landau-Zener closed form against the library sweep") {
    for (double x : {0.1, 0.3, 1.0, 2.0, 5.0}) {
        const auto s = lz_sweep_numeric(x);
        CHECK(s.p_stay == doctest::Approx(std::exp(-x)).epsilon(1e-2));
    }
    CHECK_THROWS_AS(lz_sweep_numeric(0.0), std::domain_error);
}

TEST_CASE("Landau-Zener sweep against an independent fixed-step integrator") {
    const double x = std::log(2.0);
    const double beta = std::numbers::pi / (2.0 * x);
    const double half = 40.0 * std::max(1.0 / beta, 1.0 / std::sqrt(beta));
    const double rk = oracle::lz_rk4(beta, half, 200000);
    CHECK(rk == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(lz_sweep_numeric(x).p_stay == doctest::Approx(rk).epsilon(2e-3));
}

TEST_CASE("ramp scales and exponent") {
    const auto p = qubit(0.0);
    const double ad = adiabatic_rate_scale(p);
    CHECK(lz_exponent(ad, p) == doctest::Approx(1.0));
    CHECK(ad / diabatic_rate_scale(p) == doctest::Approx(std::numbers::pi / 2.0));
    CHECK(lz_stay_probability(ad / 3.0, p) == doctest::Approx(std::exp(-3.0)));
    // natural-unit bookkeeping: hbar = 1, Delta = 1, I_p = 1 / 2
    const FluxQubitParams unit{0.5, 1.0, 0.0, 0.0};
    CHECK(lz_exponent(1.0, unit, 1.0) == doctest::Approx(std::numbers::pi / 2.0));
}

TEST_CASE("thermal occupancy identities") {
    CHECK(thermal_occupancy(1e9, 0.0) == 0.0);
    const double t = kPlanck * 1e9 / (kBoltzmann * std::log(2.0));
    CHECK(thermal_occupancy(1e9, t) == doctest::Approx(1.0));
    const double hot = 1e3;
    CHECK(thermal_occupancy(1e9, hot) == doctest::Approx(kBoltzmann * hot / (kPlanck * 1e9) - 0.5).epsilon(1e-6));
    CHECK(thermal_occupancy(5e9, 0.02) < 1e-5);
    CHECK_THROWS_AS(thermal_occupancy(-1.0, 0.02), std::domain_error);
}

TEST_CASE("preparation fidelity is the product of its factors") {
    const auto a = qubit(1e-6);
    const auto b = qubit(1e-10);
    const auto f = preparation_fidelity(a, b, 0.1);
    CHECK(f.stay_a == doctest::Approx(lz_stay_probability(1e-6, a)));
    CHECK(f.flip_b == doctest::Approx(1.0 - lz_stay_probability(1e-10, b)));
    CHECK(f.fidelity == doctest::Approx(f.stay_a * f.flip_b * 0.9));
}

TEST_CASE("incomplete design lists every missing field") {
    DesignInput in;
    in.a.gap_hz = 1e9;
    const auto missing = missing_fields(in);
    CHECK(missing.size() == 9);
    try {
        feasibility_report(in);
        FAIL("expected IncompleteDesign");
    } catch (const IncompleteDesign& e) {
        CHECK(e.missing() == missing);
    }
}

TEST_CASE("feasibility report for a weak-coupling design") {
    const auto rep = feasibility_report(full_input());
    CHECK(rep.k_a == doctest::Approx(coupling_ratio(4.884e8 * 2 * std::numbers::pi, rep.omega_a)));
    CHECK(rep.k_a > rep.k_b);
    CHECK(rep.lz_stay_a == doctest::Approx(std::exp(-rep.lz_exponent_a)));
    CHECK(rep.photon_probability == 0.0);
    bool found = false;
    for (const auto& c : rep.checks) {
        if (c.name == "strategy_ka_gt_kb") {
            found = true;
            CHECK(c.pass);
        }
        CHECK(c.pass == (c.margin >= 1.0));
    }
    CHECK(found);
    CHECK(rep.text().find("fidelity") != std::string::npos);
    CHECK(rep.key_values().find("all_pass=") != std::string::npos);
}
