#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mspde/config.hpp"
#include "mspde/errors.hpp"

#include <string>

using namespace mspde;

TEST_CASE("defaults round-trip through the canonical rendering") {
    const RunConfig def;
    const RunConfig back = parse_config_text(canonical_config(def));
    CHECK(canonical_config(back) == canonical_config(def));
    CHECK(config_hash(back) == config_hash(def));
}

TEST_CASE("unknown keys are rejected with the key name") {
    try {
        parse_config_text("[model]\nwibble=1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("wibble") != std::string::npos);
    }
}

TEST_CASE("unknown sections are rejected") {
    CHECK_THROWS_AS(parse_config_text("[banana]\n"), ConfigError);
}

TEST_CASE("malformed values name the offending key") {
    try {
        parse_config_text("[solver]\nsteps=\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("steps") != std::string::npos);
    }
    try {
        parse_config_text("[solver]\nsteps=ten\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("steps") != std::string::npos);
    }
}

TEST_CASE("non key=value lines are rejected") {
    CHECK_THROWS_AS(parse_config_text("[model]\njust words\n"), ConfigError);
}

TEST_CASE("comments and blank lines are fine") {
    const RunConfig cfg = parse_config_text("# comment\n\n[solver]\nsteps=128\n");
    CHECK(cfg.steps == 128);
}

TEST_CASE("lists parse") {
    const RunConfig cfg = parse_config_text(
        "[experiment]\np_list=0.5, 1, 2\nmesh_sizes=10,20\nscales=1,2,4\n");
    REQUIRE(cfg.p_list.size() == 3);
    CHECK(cfg.p_list[0] == 0.5);
    REQUIRE(cfg.mesh_sizes.size() == 2);
    CHECK(cfg.mesh_sizes[1] == 20);
}

TEST_CASE("hash distinguishes configs") {
    RunConfig a, b;
    b.steps = a.steps + 1;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("model assembly honors the config") {
    RunConfig cfg;
    cfg.graph_id = "softsign";
    cfg.mesh_n = 41;
    cfg.noise_kind = "additive";
    cfg.k_modes = 4;
    const Model m = build_model(cfg);
    CHECK(m.mesh.n == 41);
    CHECK(m.graph.kind() == GraphKind::SoftSign);
    CHECK(m.noise.k_modes() == 4);
}

TEST_CASE("truncation policies parse") {
    RunConfig cfg;
    cfg.truncation = "fixed:2.5";
    CHECK(build_solver_config(cfg).truncation.mode == TruncationMode::Fixed);
    CHECK(build_solver_config(cfg).truncation.fixed_radius == 2.5);

    cfg.truncation = "adaptive:1,50";
    const auto sc = build_solver_config(cfg);
    CHECK(sc.truncation.mode == TruncationMode::Adaptive);
    CHECK(sc.truncation.start_level == 1);
    CHECK(sc.truncation.max_level == 50);

    cfg.truncation = "sometimes";
    CHECK_THROWS_AS(build_solver_config(cfg), ConfigError);
    cfg.truncation = "adaptive:5";
    CHECK_THROWS_AS(build_solver_config(cfg), ConfigError);
}

TEST_CASE("validation bounds") {
    CHECK_THROWS_AS(parse_config_text("[solver]\nsteps=0\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[solver]\nT=-1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[model]\nn=1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[experiment]\nsamples=0\n"), ConfigError);
}
