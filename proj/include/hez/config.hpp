#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hez/model.hpp"
#include "hez/pde.hpp"

namespace hez {

// Run configuration; every default reproduces the reference experiment so
// `solve` with no overrides is the canonical run.
struct RunConfig {
    struct {
        double gamma = 2.0;
        double psi = 1.5;
        double delta = 0.08;
    } preferences;
    struct {
        double alpha = 5.0;
        double k2 = 0.25;
        double m2 = 0.0225;
        double r = 0.05;
        double lambda = 0.47;
        double eps = 0.0;
        double rho = 0.0;
    } market;
    struct {
        double L = 0.02;
        double y1 = 0.001;
        double y2 = 1.0;
    } domain;
    struct {
        int nw = 200;
        int ny = 200;
        double tolerance = 1e-10;
        int max_iterations = 50;
        double damping = 1.0;
        double c_bar = 5.0;
        std::string scheme = "newton";
    } solver;
    struct {
        std::uint64_t n_paths = 100000;
        double dt = 1e-5;
        std::uint64_t seed = 12345;
    } mc;
    struct {
        std::vector<double> q_ladder{1.01, 1.1, 1.5, 2.0};
    } assumption;
    struct {
        std::string directory = ".";
        std::vector<std::string> formats{"csv", "json"};
    } output;
};

// Key/value sections: [preferences], [market], [domain], [solver], [mc],
// [assumption], [output]. Unknown keys and invariant violations are reported
// with their section.key path.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Validated model objects from a config (throws with field paths).
Preferences config_preferences(const RunConfig& c);
HestonParams config_heston(const RunConfig& c);
RectDomain config_domain(const RunConfig& c);
SolverOptions config_solver_options(const RunConfig& c);

}  // namespace hez
