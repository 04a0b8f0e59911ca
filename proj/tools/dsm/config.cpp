#include "config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>

namespace dsmcli {

const std::set<std::string>& Config::known_keys() {
    static const std::set<std::string> keys = {
        "problem.benchmark",      "problem.m",

        "method.flow",

        "schedule.kind",          "schedule.eps0",           "schedule.t0",          "schedule.nu",

        "integrator.rel_tol",     "integrator.abs_tol",      "integrator.h_init",    "integrator.h_min",
        "integrator.h_max",       "integrator.t_max",        "integrator.residual_stop",
        "integrator.max_steps",

        "monitor.auxiliary",      "monitor.envelope",        "monitor.envelope_scale",

        "feigenbaum.z",           "feigenbaum.n_max",        "feigenbaum.methods",   "feigenbaum.partition",
        "feigenbaum.seed",        "feigenbaum.eps0",         "feigenbaum.nu",        "feigenbaum.patience",
        "feigenbaum.require_concave", "feigenbaum.t_max",

        "inequality.scenario",    "inequality.t_max",        "inequality.points",    "inequality.pair",
        "inequality.c",

        "rates.expected",         "rates.tolerance",

        "output.dir",
    };
    return keys;
}

Config Config::load(const std::optional<std::string>& path, const std::vector<std::string>& overrides) {
    Config c;
    if (path) {
        boost::property_tree::ptree tree;
        try {
            boost::property_tree::read_ini(*path, tree);
        } catch (const boost::property_tree::ini_parser_error& e) {
            throw ConfigError("cannot read config: " + std::string(e.what()));
        }
        for (const auto& [section, body] : tree) {
            if (body.empty()) throw ConfigError("key '" + section + "' is outside any [section]");
            for (const auto& [key, leaf] : body) c.set(section + "." + key, leaf.get_value<std::string>());
        }
    }
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "' is not section.key=value");
        c.set(boost::algorithm::trim_copy(o.substr(0, eq)), boost::algorithm::trim_copy(o.substr(eq + 1)));
    }
    return c;
}

void Config::set(const std::string& key, const std::string& value) {
    if (!known_keys().count(key)) throw ConfigError("unknown config key '" + key + "'");
    values_[key] = value;
}

std::string Config::str(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
    const std::string t = boost::algorithm::trim_copy(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(key + ": '" + text + "' is not a finite number");
    }
    return v;
}

}  // namespace

double Config::num(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

std::optional<double> Config::opt_num(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return parse_double(key, it->second);
}

long Config::integer(const std::string& key, long fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double v = parse_double(key, it->second);
    if (v != std::floor(v) || std::abs(v) > 1e15) throw ConfigError(key + ": '" + it->second + "' is not an integer");
    return static_cast<long>(v);
}

bool Config::flag(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const std::string v = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(it->second));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": '" + it->second + "' is not a boolean");
}

std::vector<std::string> Config::list(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<std::string> parts;
    boost::algorithm::split(parts, it->second, boost::algorithm::is_any_of(", \t"), boost::algorithm::token_compress_on);
    std::vector<std::string> out;
    for (auto& p : parts) {
        if (!p.empty()) out.push_back(p);
    }
    if (out.empty()) throw ConfigError(key + " is empty");
    return out;
}

std::vector<double> Config::num_list(const std::string& key, const std::vector<double>& fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& p : list(key, {})) out.push_back(parse_double(key, p));
    return out;
}

}  // namespace dsmcli
