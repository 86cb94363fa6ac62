#include "hez/config.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hez {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

using SectionMap = std::map<std::string, std::map<std::string, std::string>>;

SectionMap parse_ini(const std::string& text) {
    SectionMap out;
    std::string section;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        if (section.empty())
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": key outside any section");
        out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

double to_double(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(path + ": not a number: '" + v + "'");
    }
}

std::int64_t to_int(const std::string& path, const std::string& v) {
    try {
        std::size_t pos = 0;
        const std::int64_t x = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("");
        return x;
    } catch (...) {
        throw std::invalid_argument(path + ": not an integer: '" + v + "'");
    }
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    const SectionMap ini = parse_ini(text);
    RunConfig c;
    for (const auto& [section, kvs] : ini) {
        for (const auto& [key, value] : kvs) {
            const std::string path = section + "." + key;
            if (section == "preferences") {
                if (key == "gamma") c.preferences.gamma = to_double(path, value);
                else if (key == "psi") c.preferences.psi = to_double(path, value);
                else if (key == "delta") c.preferences.delta = to_double(path, value);
                else throw std::invalid_argument("unknown key '" + path + "'");
            } else if (section == "market") {
                if (key == "alpha") c.market.alpha = to_double(path, value);
                else if (key == "k2") c.market.k2 = to_double(path, value);
                else if (key == "m2") c.market.m2 = to_double(path, value);
                else if (key == "r") c.market.r = to_double(path, value);
                else if (key == "lambda") c.market.lambda = to_double(path, value);
                else if (key == "eps") c.market.eps = to_double(path, value);
                else if (key == "rho") c.market.rho = to_double(path, value);
                else throw std::invalid_argument("unknown key '" + path + "'");
            } else if (section == "domain") {
                if (key == "L") c.domain.L = to_double(path, value);
                else if (key == "y1") c.domain.y1 = to_double(path, value);
                else if (key == "y2") c.domain.y2 = to_double(path, value);
                else throw std::invalid_argument("unknown key '" + path + "'");
            } else if (section == "solver") {
                if (key == "nw") c.solver.nw = static_cast<int>(to_int(path, value));
                else if (key == "ny") c.solver.ny = static_cast<int>(to_int(path, value));
                else if (key == "tolerance") c.solver.tolerance = to_double(path, value);
                else if (key == "max_iterations") c.solver.max_iterations = static_cast<int>(to_int(path, value));
                else if (key == "damping") c.solver.damping = to_double(path, value);
                else if (key == "c_bar") c.solver.c_bar = to_double(path, value);
                else if (key == "scheme") c.solver.scheme = value;
                else throw std::invalid_argument("unknown key '" + path + "'");
            } else if (section == "mc") {
                if (key == "n_paths") c.mc.n_paths = static_cast<std::uint64_t>(to_int(path, value));
                else if (key == "dt") c.mc.dt = to_double(path, value);
                else if (key == "seed") c.mc.seed = static_cast<std::uint64_t>(to_int(path, value));
                else throw std::invalid_argument("unknown key '" + path + "'");
            } else if (section == "assumption") {
                if (key == "q_ladder") {
                    c.assumption.q_ladder.clear();
                    for (const auto& item : split_list(value))
                        c.assumption.q_ladder.push_back(to_double(path, item));
                } else {
                    throw std::invalid_argument("unknown key '" + path + "'");
                }
            } else if (section == "output") {
                if (key == "directory") c.output.directory = value;
                else if (key == "formats") c.output.formats = split_list(value);
                else throw std::invalid_argument("unknown key '" + path + "'");
            } else {
                throw std::invalid_argument("unknown section '" + section + "'");
            }
        }
    }

    // Cross-field invariants, reported with field paths.
    if (!(c.preferences.gamma > 1.0))
        throw std::invalid_argument("preferences.gamma: must exceed 1");
    if (!(c.preferences.psi > 1.0))
        throw std::invalid_argument("preferences.psi: must exceed 1");
    if (!(c.preferences.delta > 0.0))
        throw std::invalid_argument("preferences.delta: must be positive");
    if (!(c.market.alpha > 0.0)) throw std::invalid_argument("market.alpha: must be positive");
    if (!(c.market.k2 > 0.0)) throw std::invalid_argument("market.k2: must be positive");
    if (!(c.market.m2 > 0.0)) throw std::invalid_argument("market.m2: must be positive");
    if (!(c.market.eps >= 0.0)) throw std::invalid_argument("market.eps: must be nonnegative");
    if (c.market.rho != 0.0) throw std::invalid_argument("market.rho: must be 0");
    if (!(c.domain.L > 0.0)) throw std::invalid_argument("domain.L: must be positive");
    if (!(c.domain.y1 > 0.0) || !(c.domain.y1 < c.domain.y2))
        throw std::invalid_argument("domain.y1: need 0 < y1 < y2");
    if (c.solver.nw < 8) throw std::invalid_argument("solver.nw: must be at least 8");
    if (c.solver.ny < 8) throw std::invalid_argument("solver.ny: must be at least 8");
    if (!(c.solver.tolerance > 0.0))
        throw std::invalid_argument("solver.tolerance: must be positive");
    if (c.solver.max_iterations < 1)
        throw std::invalid_argument("solver.max_iterations: must be at least 1");
    if (!(c.solver.damping > 0.0) || c.solver.damping > 1.0)
        throw std::invalid_argument("solver.damping: must lie in (0, 1]");
    if (!(c.solver.c_bar > 0.0)) throw std::invalid_argument("solver.c_bar: must be positive");
    if (c.solver.scheme != "newton" && c.solver.scheme != "picard")
        throw std::invalid_argument("solver.scheme: must be 'newton' or 'picard'");
    if (c.mc.n_paths < 1) throw std::invalid_argument("mc.n_paths: must be at least 1");
    if (!(c.mc.dt > 0.0)) throw std::invalid_argument("mc.dt: must be positive");
    for (double q : c.assumption.q_ladder)
        if (!(q > 1.0)) throw std::invalid_argument("assumption.q_ladder: entries must exceed 1");
    return c;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Preferences config_preferences(const RunConfig& c) {
    return make_preferences(c.preferences.gamma, c.preferences.psi, c.preferences.delta);
}

HestonParams config_heston(const RunConfig& c) {
    return make_heston_params(c.market.alpha, c.market.k2, c.market.m2, c.market.r,
                              c.market.lambda, c.market.eps, c.market.rho);
}

RectDomain config_domain(const RunConfig& c) {
    return make_rect_domain(c.domain.L, c.domain.y1, c.domain.y2);
}

SolverOptions config_solver_options(const RunConfig& c) {
    SolverOptions o;
    o.tolerance = c.solver.tolerance;
    o.max_iterations = c.solver.max_iterations;
    o.damping = c.solver.damping;
    o.c_bar = c.solver.c_bar;
    o.scheme = c.solver.scheme == "picard" ? Scheme::picard : Scheme::newton;
    return o;
}

}  // namespace hez
