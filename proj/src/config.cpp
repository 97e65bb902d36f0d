#include "gstein/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace gstein {

const std::vector<ConfigKey>& configSchema() {
    static const std::vector<ConfigKey> keys = {
        // execution
        {"threads", "0", "worker threads, 0 = OpenMP default"},
        {"seed", "42", "seed of the mt19937_64 stream used by randomized suites"},
        // grid / G-heat
        {"sigma_bar", "1", "upper volatility"},
        {"sigma_under", "1", "lower volatility"},
        {"datum", "cos", "initial datum for gheat solve"},
        {"x_min", "auto", "left end of the box"},
        {"x_max", "auto", "right end of the box"},
        {"nx", "auto", "spatial nodes"},
        {"dx", "0.01", "spatial step when nx is auto"},
        {"dt", "auto", "time step, auto = cfl dx^2 / sigma_bar^2"},
        {"t_final", "1", "final time T"},
        {"cfl", "0.4", "sigma_bar^2 dt / dx^2 used when dt is auto"},
        {"field_layers", "11", "time layers written to field.csv"},
        // models
        {"model", "two-scale", "built-in uncertainty set"},
        {"model_file", "", "uncertainty sets in w@x text form; overrides model"},
        // stein identity
        {"identity_models", "two-scale,wide,skewed", "uncertainty sets of the identity suite"},
        {"identity_functions", "ramp,cos,hat,sine:0.5:0.3", "test functions of the identity suite"},
        {"stein_dx", "0.02", "spatial step of the identity fields"},
        {"quad_eps", "1e-4", "quadrature end gap eps"},
        {"quad_levels", "12", "geometric panel levels toward each end"},
        {"quad_points", "8", "midpoints per panel"},
        {"stein_tol", "1e-2", "identity budget factor: tol (1 + |lhs|)"},
        {"identity_refine", "true", "also run one refinement and require errors to halve"},
        {"one_sided_s", "0.25,0.5,0.75", "s values of the one-sided derivative check"},
        {"one_sided_h", "1e-3", "difference step of the one-sided derivative check"},
        // stein bound
        {"bound_cases", "500", "randomized cases"},
        {"bound_rhs_scale", "1", "multiplier on both right-hand sides; 0 is a harness self-test"},
        // stein classical
        {"classical_sigma", "1", "sigma of the classical reduction"},
        {"classical_functions", "cos,ramp", "functions of the classical residual check"},
        {"classical_probes", "-3:3:61", "probe points x"},
        {"classical_dx", "0.01", "spatial step of the classical fields"},
        {"classical_tol", "1e-3", "largest accepted residual"},
        // regularity
        {"alpha_grid", "0.1:0.9:9", "candidate exponents"},
        {"t_grid", "geom:0.01:1:9", "times of the regularity scan"},
        {"reg_dx", "0.04", "coarsest spatial step of the regularity scan"},
        {"reg_levels", "3", "grid levels, each halving dx"},
        {"window_radius", "1", "pair window of the Hoelder seminorm"},
        {"interior", "5", "half-width of the window where seminorms are taken"},
        {"stability_tol", "0.1", "largest relative change of M(alpha) between the finest levels"},
        {"safety", "0.1", "c = M (1 + safety)"},
        // clt
        {"family", "lipschitz24", "test family: lipschitz24, ramps, sines, hats or a function list"},
        {"n_list", "1,2,4,8,16,32,64,128,256", "sample sizes"},
        {"pde_dx", "0.01", "spatial step of the G-normal solves"},
        {"dp_mode", "auto", "auto, lattice or grid"},
        {"dp_grid_step", "1e-4", "grid mode spacing"},
        {"dp_budget", "1e-3", "largest accepted grid mode interpolation bound"},
        {"trace_n", "4,16", "n values of the telescoping trace"},
        {"slope_slack", "0.05", "slope must be <= -alpha/2 + slack"},
        // non-iid
        {"noniid_model", "wide", "base set; component i is scaled to midpoint sigma ratio^i"},
        {"noniid_ratio", "1.2", "geometric ratio of the sigma profile"},
        {"noniid_n", "8", "number of components"},
    };
    return keys;
}

RunConfig::RunConfig() {
    for (const auto& k : configSchema()) values_[k.name] = k.defaultValue;
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double toReal(const std::string& text, const std::string& what) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(what + ": '" + text + "' is not a finite number");
    }
    return v;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

}  // namespace

void RunConfig::loadFile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    loadText(buf.str(), path.string());
}

void RunConfig::loadText(std::string_view text, const std::string& origin) {
    std::set<std::string> seen;
    std::size_t lineNo = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = text.find('\n', start);
        std::string_view line = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
        ++lineNo;
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        const std::string where = origin + ":" + std::to_string(lineNo);
        if (eq == std::string::npos) {
            throw ConfigError(where + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        if (!seen.insert(key).second) {
            throw ConfigError(where + ": key '" + key + "' repeated");
        }
        try {
            set(key, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown key '" + key + "'");
    }
    it->second = value;
}

const std::string& RunConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) {
        throw ConfigError("unknown key '" + key + "'");
    }
    return it->second;
}

double RunConfig::real(const std::string& key) const { return toReal(get(key), key); }

double RunConfig::realIn(const std::string& key, double lo, double hi) const {
    const double v = real(key);
    if (v < lo || v > hi) {
        std::ostringstream os;
        os << key << " = " << v << " outside [" << lo << ", " << hi << "]";
        throw ConfigError(os.str());
    }
    return v;
}

long RunConfig::integer(const std::string& key, long lo, long hi) const {
    const std::string& text = get(key);
    errno = 0;
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE) {
        throw ConfigError(key + ": '" + text + "' is not an integer");
    }
    if (v < lo || v > hi) {
        throw ConfigError(key + " = " + text + " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return v;
}

bool RunConfig::flag(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": '" + v + "' is not a boolean");
}

std::vector<double> parseRealList(std::string_view text) {
    const std::string t = trim(text);
    if (t.empty()) {
        throw ConfigError("empty list");
    }
    const auto parts = split(t, ':');
    const bool geom = parts.size() == 4 && parts[0] == "geom";
    if (geom || parts.size() == 3) {
        const std::size_t o = geom ? 1 : 0;
        const double lo = toReal(parts[o], "range start");
        const double hi = toReal(parts[o + 1], "range end");
        const double c = toReal(parts[o + 2], "range count");
        if (c < 1 || c != std::floor(c) || c > 1e7) {
            throw ConfigError("range count must be a positive integer");
        }
        const auto count = static_cast<std::size_t>(c);
        if (geom && !(lo > 0.0 && hi > 0.0)) {
            throw ConfigError("geometric range needs positive ends");
        }
        std::vector<double> out(count);
        for (std::size_t i = 0; i < count; ++i) {
            const double f = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            out[i] = geom ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
        }
        out.back() = hi;
        return out;
    }
    if (parts.size() != 1) {
        throw ConfigError("'" + t + "' is neither a list nor a range");
    }
    std::vector<double> out;
    for (const auto& item : split(t, ',')) out.push_back(toReal(item, "list item"));
    return out;
}

std::vector<double> RunConfig::reals(const std::string& key) const {
    try {
        return parseRealList(get(key));
    } catch (const ConfigError& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::vector<std::size_t> RunConfig::counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (double v : reals(key)) {
        if (v < 1 || v != std::floor(v) || v > 1e9) {
            throw ConfigError(key + ": entries must be positive integers");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

std::vector<std::string> RunConfig::words(const std::string& key) const {
    std::vector<std::string> out;
    for (auto& w : split(get(key), ',')) {
        if (w.empty()) throw ConfigError(key + ": empty list entry");
        out.push_back(std::move(w));
    }
    return out;
}

}  // namespace gstein
