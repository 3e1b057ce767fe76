#include <doctest.h>

#include "rnp/core_model.hpp"

#include <cmath>

using namespace rnp;

TEST_CASE("error parameters") {
    const ErrorParams ok{1e-4, 0.05, 0.05, 0.95, NoiseKind::depolarizing};
    CHECK_NOTHROW(validate(ok));
    CHECK_NOTHROW(validate_purifiable(ok));

    ErrorParams bad = ok;
    bad.fidelity = 1.2;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = ok;
    bad.p_local = -1e-3;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = ok;
    bad.p_meas = std::nan("");
    CHECK_THROWS_AS(validate(bad), DomainError);

    ErrorParams low = ok;
    low.fidelity = 0.4;
    CHECK_NOTHROW(validate(low));
    CHECK_THROWS_AS(validate_purifiable(low), UnpurifiableError);
    low.fidelity = 0.5;
    CHECK_THROWS_AS(validate_purifiable(low), UnpurifiableError);
    try {
        validate_purifiable({0, 0, 0, 0.4, NoiseKind::depolarizing});
    } catch (const UnpurifiableError& e) {
        CHECK(std::string(e.what()).find("unpurifiable fidelity") != std::string::npos);
    }
}

TEST_CASE("enum names round-trip") {
    CHECK(parse_noise_kind("depolarizing") == NoiseKind::depolarizing);
    CHECK(parse_noise_kind(to_string(NoiseKind::dephasing)) == NoiseKind::dephasing);
    CHECK_THROWS_AS(parse_noise_kind("amplitude"), DomainError);
    CHECK(parse_restart_mode("full") == RestartMode::full_restart);
    CHECK(parse_restart_mode("level_restart") == RestartMode::level_restart);
    CHECK(parse_restart_mode(to_string(RestartMode::level_restart)) == RestartMode::level_restart);
    CHECK_THROWS_AS(parse_restart_mode("partial"), DomainError);
}

TEST_CASE("Bell-diagonal state") {
    const BellDiagonalState perfect;
    CHECK(perfect.fidelity() == 1.0);
    CHECK(perfect.infidelity() == 0.0);

    const BellDiagonalState s(0.7, 0.1, 0.15, 0.05);
    CHECK(s.bit_error() == doctest::Approx(0.2).scale(0));
    CHECK(s.phase_error() == doctest::Approx(0.15).scale(0));
    CHECK(s[2] == 0.15);

    CHECK_THROWS_AS(BellDiagonalState(0.7, 0.1, 0.1, 0.2), DomainError);
    CHECK_THROWS_AS(BellDiagonalState(1.1, -0.1, 0.0, 0.0), DomainError);
    CHECK_NOTHROW(BellDiagonalState(0.7, 0.1, 0.1, 0.1 + 5e-13));

    const BellDiagonalState w = BellDiagonalState::werner(0.95);
    CHECK(w.phi_minus() == doctest::Approx(0.05 / 3).epsilon(1e-14).scale(0));
    CHECK(w.psi_minus() == w.psi_plus());

    const auto n = BellDiagonalState::from_unnormalized({2.0, 1.0, 1.0, 0.0});
    CHECK(n.phi_plus() == doctest::Approx(0.5).scale(0));
    CHECK_THROWS_AS(BellDiagonalState::from_unnormalized({0, 0, 0, 0}), DomainError);
}

TEST_CASE("pump schedule") {
    CHECK(PumpSchedule{0, 0}.min_raw_pairs() == 1);
    CHECK(PumpSchedule{4, 5}.min_raw_pairs() == 30);
    CHECK(PumpSchedule{4, 5}.total_steps() == 9);
    CHECK(checked_schedule(15, 15) == PumpSchedule{15, 15});
    CHECK_THROWS_AS(checked_schedule(16, 0), DomainError);
    CHECK_THROWS_AS(checked_schedule(-1, 2), DomainError);
}

TEST_CASE("plan invariants") {
    PlanResult r;
    r.delta_min = 1e-5;
    r.eps_E = 1.5e-5;
    r.t_robust_ent = 1e-4;
    r.t_C = 1.1e-4;
    r.gamma = 4e-5;
    CHECK_NOTHROW(check_plan_invariants(r));

    PlanResult loose = r;
    loose.eps_E = 2.1e-5;
    CHECK_THROWS(check_plan_invariants(loose));
    PlanResult fast = r;
    fast.t_C = 0.9e-4;
    CHECK_THROWS(check_plan_invariants(fast));
    PlanResult cheap = r;
    cheap.gamma = 1e-5;
    CHECK_THROWS(check_plan_invariants(cheap));
}
