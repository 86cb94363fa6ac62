#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>

#include "hez/config.hpp"

using namespace hez;

TEST_CASE("defaults reproduce the reference experiment") {
    const RunConfig c = parse_config_text("");
    CHECK(c.preferences.gamma == 2.0);
    CHECK(c.preferences.psi == 1.5);
    CHECK(c.preferences.delta == 0.08);
    CHECK(c.market.alpha == 5.0);
    CHECK(c.market.k2 == 0.25);
    CHECK(c.market.m2 == 0.0225);
    CHECK(c.market.lambda == 0.47);
    CHECK(c.domain.L == 0.02);
    CHECK(c.domain.y1 == 0.001);
    CHECK(c.domain.y2 == 1.0);
    CHECK(c.mc.dt == 1e-5);
    CHECK(c.assumption.q_ladder.size() == 4);

    const Preferences p = config_preferences(c);
    CHECK(p.theta == doctest::Approx(-3.0));
    const HestonParams hp = config_heston(c);
    CHECK(hp.k == doctest::Approx(0.5));
}

TEST_CASE("sections and keys are parsed with overrides") {
    const std::string text =
        "# reference run, wider band\n"
        "[domain]\n"
        "L = 0.08\n"
        "[market]\n"
        "eps = 0.05\n"
        "[solver]\n"
        "nw = 40\n"
        "scheme = picard\n"
        "[assumption]\n"
        "q_ladder = 1.5, 2, 4\n"
        "[mc]\n"
        "seed = 777\n";
    const RunConfig c = parse_config_text(text);
    CHECK(c.domain.L == 0.08);
    CHECK(c.market.eps == 0.05);
    CHECK(c.solver.nw == 40);
    CHECK(c.solver.scheme == "picard");
    CHECK(c.assumption.q_ladder == std::vector<double>{1.5, 2.0, 4.0});
    CHECK(c.mc.seed == 777);
    CHECK(config_solver_options(c).scheme == Scheme::picard);
}

TEST_CASE("errors carry field paths") {
    CHECK_THROWS_WITH_AS(parse_config_text("[domain]\ny1 = 2\n"),
                         doctest::Contains("domain.y1"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("[domain]\nzz = 1\n"),
                         doctest::Contains("domain.zz"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("[solver]\ntolerance = none\n"),
                         doctest::Contains("solver.tolerance"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(parse_config_text("[mc]\ndt = 0\n"),
                         doctest::Contains("mc.dt"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("stray = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[preferences]\ngamma = 0.5\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[solver]\nscheme = cg\n"), std::invalid_argument);
}

TEST_CASE("comments, blank lines, inline comments") {
    const RunConfig c = parse_config_text(
        "; top comment\n\n[market]\nr = 0.03  # riskfree\n\n# done\n");
    CHECK(c.market.r == 0.03);
}
