#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lscope/config.hpp"
#include "lscope/errors.hpp"
#include "lscope/params.hpp"

using namespace lscope;

TEST_CASE("dispersive transformation reproduces the device values") {
    const auto dp = derive_dispersive(BareParams{});
    CHECK(dp.chi_a == doctest::Approx(50.0).epsilon(1e-12));
    CHECK(dp.chi_b == doctest::Approx(160.0 / 7.0).epsilon(1e-12));
    CHECK(dp.omega_a == doctest::Approx(10.050).epsilon(1e-9));
    CHECK(dp.omega_b == doctest::Approx(12.0228571428571).epsilon(1e-9));
    CHECK(dp.omega_q == doctest::Approx(4.9271428571428).epsilon(1e-9));
}

TEST_CASE("re-deriving from unchanged inputs is bit-identical") {
    const BareParams bare;
    const auto a = derive_dispersive(bare);
    const auto b = derive_dispersive(bare);
    CHECK(a.chi_a == b.chi_a);
    CHECK(a.chi_b == b.chi_b);
    CHECK(a.omega_q == b.omega_q);
}

TEST_CASE("zero coupling leaves frequencies bare") {
    BareParams bare;
    bare.g_a = 1e-12;  // validity bound requires > 0; vanishing coupling
    bare.g_b = 1e-12;
    const auto dp = derive_dispersive(bare);
    CHECK(dp.chi_a == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(dp.omega_a == doctest::Approx(bare.omega_bar_a));
    CHECK(dp.omega_q == doctest::Approx(bare.omega_bar_q));
}

TEST_CASE("qubit above the resonator flips the shift sign") {
    BareParams bare;
    bare.omega_bar_q = 11.0;  // above resonator A, below B
    bare.g_a = 0.15;          // keep the dispersive ratios below the bound
    bare.g_b = 0.15;
    const auto dp = derive_dispersive(bare);
    CHECK(dp.chi_a < 0.0);
    CHECK(dp.chi_b > 0.0);
}

TEST_CASE("dispersive validity bound rejects strong coupling") {
    BareParams bare;
    bare.g_a = 1.2;  // ratio 0.24
    CHECK_THROWS_AS(derive_dispersive(bare), ConfigError);
    bare.g_a = 0.5;
    bare.n_b_max = 1;
    CHECK_THROWS_AS(derive_dispersive(bare), ConfigError);
}

TEST_CASE("angular conversion") {
    CHECK(angular(0.046) == doctest::Approx(0.2890265).epsilon(1e-6));
    CHECK(angular(0.0) == 0.0);
    // round trip within 1 ulp
    const double x = 12.023;
    CHECK(linear(angular(x)) == doctest::Approx(x).epsilon(1e-15));
}

TEST_CASE("nesting window accepts the interior and rejects endpoints") {
    const auto dp = derive_dispersive(BareParams{});
    const auto [lo, hi] = nesting_window(dp);
    CHECK(lo == doctest::Approx(4.8271428571).epsilon(1e-9));
    CHECK(hi == doctest::Approx(4.8814285714).epsilon(1e-9));
    CHECK(in_nesting_window(dp, 4.832));
    CHECK(in_nesting_window(dp, 4.880));
    CHECK_FALSE(in_nesting_window(dp, lo));
    CHECK_FALSE(in_nesting_window(dp, hi));
    CHECK_FALSE(in_nesting_window(dp, 4.9));
    CHECK_THROWS_AS(require_nesting(dp, 4.9), ConfigError);
}

TEST_CASE("probe flux convention") {
    const auto dp = derive_dispersive(BareParams{});
    const auto probe = make_probe(dp, 0.05);
    CHECK(probe.omega_p == doctest::Approx(dp.omega_b - 2e-3 * dp.chi_b).epsilon(1e-12));
    // |E_p|^2 = kappa_b <n_b> / 4 in photons/ns
    CHECK(probe_flux(dp, probe) == doctest::Approx(dp.kappa_b_ang() * 0.05 / 4.0));
}

TEST_CASE("config parsing is fail-fast on unknown keys") {
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"devices": {}})"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"device": {"omega_a": 1}})"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"drive": {"omegad": 4.8}})"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text("not json"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_file("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("config defaults and overrides") {
    const auto cfg = RunConfig::from_json_text(R"({
        "device": {"omega_bar_a": 10.0, "kappa_a": 20.0},
        "drive": {"omega_d": 4.841},
        "probe": {"n_b_mean": 0.1},
        "integrator": {"dt_ns": 0.2, "n_a_max": 2},
        "workers": 3
    })");
    CHECK(cfg.omega_d == 4.841);
    CHECK(cfg.n_b_mean == 0.1);
    CHECK(cfg.dt == 0.2);
    CHECK(cfg.device.n_a_max == 2);
    CHECK(cfg.device.n_b_max == 3);
    CHECK(cfg.effective_workers() == 3);
    CHECK_FALSE(cfg.Omega_d_MHz.has_value());
}

TEST_CASE("config rejects invalid values") {
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"probe": {"n_b_mean": -0.1}})"),
                    ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"integrator": {"dt_ns": 0}})"), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"grids": {"Delta_t_ns": []}})"),
                    ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json_text(R"({"device": {"kappa_a": -2}})"), ConfigError);
}
