#include "simma/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "simma/errors.hpp"
#include "simma/numeric.hpp"

namespace simma {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

[[noreturn]] void fail_at(int line, const std::string& msg) {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// comma-separated entries, each trimmed; an all-blank value is an empty list
std::vector<std::string> split_list(int line, const std::string& dotted, const std::string& v) {
    std::vector<std::string> out;
    if (trim(v).empty()) return out;
    std::size_t pos = 0;
    while (true) {
        std::size_t comma = v.find(',', pos);
        std::string piece = trim(v.substr(pos, comma == std::string::npos ? comma : comma - pos));
        if (piece.empty()) fail_at(line, "key '" + dotted + "' has an empty entry");
        out.push_back(piece);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

double want_double(int line, const std::string& dotted, const std::string& v,
                   bool allow_inf = false) {
    if (v.empty()) fail_at(line, "key '" + dotted + "' has an empty value");
    double d = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || p != v.data() + v.size() || std::isnan(d))
        fail_at(line, "key '" + dotted + "' has malformed value '" + v + "'");
    if (!allow_inf && std::isinf(d))
        fail_at(line, "key '" + dotted + "' must be finite (got '" + v + "')");
    return d;
}

long long want_int(int line, const std::string& dotted, const std::string& v, long long lo,
                   long long hi) {
    if (v.empty()) fail_at(line, "key '" + dotted + "' has an empty value");
    long long n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail_at(line, "key '" + dotted + "' has malformed value '" + v + "'");
    if (n < lo || n > hi)
        fail_at(line, "key '" + dotted + "' must lie in [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] (got " + v + ")");
    return n;
}

std::uint64_t want_u64(int line, const std::string& dotted, const std::string& v) {
    if (v.empty()) fail_at(line, "key '" + dotted + "' has an empty value");
    std::uint64_t n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || p != v.data() + v.size())
        fail_at(line, "key '" + dotted + "' has malformed value '" + v + "'");
    return n;
}

std::string want_enum(int line, const std::string& dotted, const std::string& v,
                      std::initializer_list<const char*> allowed) {
    std::string opts;
    for (const char* a : allowed) {
        if (v == a) return v;
        if (!opts.empty()) opts += ", ";
        opts += a;
    }
    fail_at(line, "key '" + dotted + "' must be one of " + opts + " (got '" + v + "')");
}

std::vector<double> want_double_list(int line, const std::string& dotted, const std::string& v) {
    std::vector<double> out;
    for (const std::string& piece : split_list(line, dotted, v)) {
        double d = 0.0;
        auto [p, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), d);
        if (ec != std::errc{} || p != piece.data() + piece.size() || !std::isfinite(d))
            fail_at(line, "key '" + dotted + "' has malformed entry '" + piece + "'");
        out.push_back(d);
    }
    return out;
}

std::vector<std::size_t> want_size_list(int line, const std::string& dotted,
                                        const std::string& v) {
    std::vector<std::size_t> out;
    for (const std::string& piece : split_list(line, dotted, v)) {
        long long n = 0;
        auto [p, ec] = std::from_chars(piece.data(), piece.data() + piece.size(), n);
        if (ec != std::errc{} || p != piece.data() + piece.size())
            fail_at(line, "key '" + dotted + "' has malformed entry '" + piece + "'");
        if (n < 1 || n > 100000000)
            fail_at(line, "key '" + dotted + "' entries must lie in [1, 100000000] (got " +
                              piece + ")");
        out.push_back(static_cast<std::size_t>(n));
    }
    return out;
}

// "first:second" pairs; weights must be positive, jumps nonzero when asked
std::vector<std::pair<double, double>> want_pair_list(int line, const std::string& dotted,
                                                      const std::string& v, bool nonzero_first) {
    std::vector<std::pair<double, double>> out;
    for (const std::string& piece : split_list(line, dotted, v)) {
        std::size_t colon = piece.find(':');
        auto bad = [&]() {
            fail_at(line, "key '" + dotted + "' has malformed entry '" + piece +
                              "' (want value:weight)");
        };
        if (colon == std::string::npos || piece.find(':', colon + 1) != std::string::npos) bad();
        std::string a = trim(piece.substr(0, colon)), b = trim(piece.substr(colon + 1));
        if (a.empty() || b.empty()) bad();
        double x = 0.0, w = 0.0;
        auto [pa, ea] = std::from_chars(a.data(), a.data() + a.size(), x);
        auto [pb, eb] = std::from_chars(b.data(), b.data() + b.size(), w);
        if (ea != std::errc{} || pa != a.data() + a.size() || !std::isfinite(x)) bad();
        if (eb != std::errc{} || pb != b.data() + b.size() || !std::isfinite(w)) bad();
        if (w <= 0.0)
            fail_at(line, "key '" + dotted + "' entry '" + piece + "' needs a positive weight");
        if (nonzero_first && x == 0.0)
            fail_at(line, "key '" + dotted + "' entry '" + piece + "' needs a nonzero jump");
        out.emplace_back(x, w);
    }
    return out;
}

const std::map<std::string, std::set<std::string>>& key_table() {
    static const std::map<std::string, std::set<std::string>> t = {
        {"process", {"name"}},
        {"driver",
         {"family", "alpha", "lambda", "scale", "atoms", "drift", "sigma2", "origin_exponent",
          "tail_exponent"}},
        {"kernel", {"family", "gamma", "f0"}},
        {"marks", {"type", "value", "atoms"}},
        {"simulation",
         {"horizon", "window", "n_terms", "grid", "seed", "paths", "centering", "symmetric"}},
        {"analysis", {"grids", "tests", "k_jumps"}},
        {"table", {"alphas", "gammas", "lambdas"}},
    };
    return t;
}

// density power at 0 and tail-mass power at infinity implied by the family;
// declarations in the config must agree with these
void expected_exponents(const DriverConfig& d, double& origin, double& tail) {
    const double inf = std::numeric_limits<double>::infinity();
    if (d.family == "compound_poisson") {
        origin = inf;
        tail = -inf;
    } else {
        origin = -d.alpha - 1.0;
        tail = d.family == "stable" ? -d.alpha : -inf;
    }
}

bool exponent_matches(double declared, double expected) {
    if (std::isinf(expected) || std::isinf(declared)) return declared == expected;
    return std::abs(declared - expected) <= 1e-9 * (1.0 + std::abs(expected));
}

} // namespace

InstanceConfig parse_config(const std::string& text) {
    InstanceConfig c;
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    std::set<std::string> sections_seen;
    std::map<std::string, int> key_line; // dotted key -> line it was set on
    int section_line = 0;

    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;

        if (s.front() == '[') {
            if (s.back() != ']') fail_at(line, "unterminated section header '" + s + "'");
            std::string name = trim(s.substr(1, s.size() - 2));
            if (key_table().count(name) == 0) fail_at(line, "unknown section '[" + name + "]'");
            if (!sections_seen.insert(name).second)
                fail_at(line, "duplicate section '[" + name + "]'");
            section = name;
            section_line = line;
            if (name == "driver") c.has_driver = true;
            if (name == "kernel") c.has_kernel = true;
            if (name == "marks") c.has_marks = true;
            if (name == "simulation") c.has_simulation = true;
            if (name == "analysis") c.has_analysis = true;
            if (name == "table") c.has_table = true;
            continue;
        }

        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail_at(line, "malformed line '" + s + "' (want key = value)");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty()) fail_at(line, "missing key before '='");
        if (section.empty()) fail_at(line, "entry '" + key + "' before any section header");
        std::string dotted = section + "." + key;
        if (key_table().at(section).count(key) == 0)
            fail_at(line, "unknown key '" + dotted + "'");
        if (!key_line.emplace(dotted, line).second)
            fail_at(line, "duplicate key '" + dotted + "'");

        if (dotted == "process.name") {
            if (value.empty()) fail_at(line, "key 'process.name' has an empty value");
            c.name = value;
        } else if (dotted == "driver.family") {
            c.driver.family = want_enum(line, dotted, value,
                                        {"stable", "tempered_stable", "compound_poisson"});
        } else if (dotted == "driver.alpha") {
            c.driver.alpha = want_double(line, dotted, value);
        } else if (dotted == "driver.lambda") {
            c.driver.lambda = want_double(line, dotted, value);
        } else if (dotted == "driver.scale") {
            c.driver.scale = want_double(line, dotted, value);
        } else if (dotted == "driver.atoms") {
            for (auto [x, w] : want_pair_list(line, dotted, value, /*nonzero_first=*/true))
                c.driver.atoms.push_back({x, w});
        } else if (dotted == "driver.drift") {
            c.driver.drift = want_double(line, dotted, value);
        } else if (dotted == "driver.sigma2") {
            c.driver.sigma2 = want_double(line, dotted, value);
        } else if (dotted == "driver.origin_exponent") {
            c.driver.origin_exponent = want_double(line, dotted, value, /*allow_inf=*/true);
        } else if (dotted == "driver.tail_exponent") {
            c.driver.tail_exponent = want_double(line, dotted, value, /*allow_inf=*/true);
        } else if (dotted == "kernel.family") {
            c.kernel.family =
                want_enum(line, dotted, value, {"fractional", "exponential_ou", "step"});
        } else if (dotted == "kernel.gamma") {
            c.kernel.gamma = want_double(line, dotted, value);
        } else if (dotted == "kernel.f0") {
            c.kernel.f0 = want_enum(line, dotted, value, {"same", "zero"});
        } else if (dotted == "marks.type") {
            c.marks.type = want_enum(line, dotted, value, {"single", "discrete"});
        } else if (dotted == "marks.value") {
            c.marks.value = want_double(line, dotted, value);
        } else if (dotted == "marks.atoms") {
            for (auto [v, w] : want_pair_list(line, dotted, value, /*nonzero_first=*/false))
                c.marks.atoms.push_back({v, w});
        } else if (dotted == "simulation.horizon") {
            c.simulation.horizon = want_double(line, dotted, value);
        } else if (dotted == "simulation.window") {
            c.simulation.window = want_double(line, dotted, value);
        } else if (dotted == "simulation.n_terms") {
            c.simulation.n_terms =
                static_cast<int>(want_int(line, dotted, value, 0, 1000000000));
        } else if (dotted == "simulation.grid") {
            c.simulation.grid = static_cast<int>(want_int(line, dotted, value, 1, 100000000));
        } else if (dotted == "simulation.seed") {
            c.simulation.seed = want_u64(line, dotted, value);
        } else if (dotted == "simulation.paths") {
            c.simulation.paths = static_cast<int>(want_int(line, dotted, value, 1, 10000000));
        } else if (dotted == "simulation.centering") {
            c.simulation.centering = static_cast<int>(want_int(line, dotted, value, 0, 64));
        } else if (dotted == "simulation.symmetric") {
            c.simulation.symmetric = want_enum(line, dotted, value, {"auto", "true", "false"});
        } else if (dotted == "analysis.grids") {
            c.analysis.grids = want_size_list(line, dotted, value);
        } else if (dotted == "analysis.tests") {
            c.analysis.tests.clear();
            for (const std::string& t : split_list(line, dotted, value))
                c.analysis.tests.push_back(
                    want_enum(line, dotted, t, {"variation", "independence", "jumps"}));
        } else if (dotted == "analysis.k_jumps") {
            c.analysis.k_jumps =
                static_cast<std::size_t>(want_int(line, dotted, value, 1, 1000000));
        } else if (dotted == "table.alphas") {
            c.table.alphas = want_double_list(line, dotted, value);
        } else if (dotted == "table.gammas") {
            c.table.gammas = want_double_list(line, dotted, value);
        } else if (dotted == "table.lambdas") {
            c.table.lambdas = want_double_list(line, dotted, value);
        }
    }

    // cross-key consistency: keys that only make sense for a particular family
    auto only_for = [&](const char* dotted, bool valid, const std::string& why) {
        auto it = key_line.find(dotted);
        if (it != key_line.end() && !valid)
            fail_at(it->second, "key '" + std::string(dotted) + "' is only valid " + why);
    };
    if (c.has_driver) {
        const bool cp = c.driver.family == "compound_poisson";
        only_for("driver.alpha", !cp, "for the stable-like families (family is '" +
                                          c.driver.family + "')");
        only_for("driver.scale", !cp, "for the stable-like families (family is '" +
                                          c.driver.family + "')");
        only_for("driver.lambda", c.driver.family == "tempered_stable",
                 "for family 'tempered_stable' (family is '" + c.driver.family + "')");
        only_for("driver.atoms", cp,
                 "for family 'compound_poisson' (family is '" + c.driver.family + "')");
        if (cp && c.driver.atoms.empty()) {
            auto it = key_line.find("driver.family");
            fail_at(it == key_line.end() ? section_line : it->second,
                    "family 'compound_poisson' needs a 'driver.atoms' list");
        }
        double origin = 0.0, tail = 0.0;
        expected_exponents(c.driver, origin, tail);
        if (c.driver.origin_exponent && !exponent_matches(*c.driver.origin_exponent, origin))
            fail_at(key_line.at("driver.origin_exponent"),
                    "key 'driver.origin_exponent' = " + fmt_double(*c.driver.origin_exponent) +
                        " contradicts family '" + c.driver.family + "' (expected " +
                        fmt_double(origin) + ")");
        if (c.driver.tail_exponent && !exponent_matches(*c.driver.tail_exponent, tail))
            fail_at(key_line.at("driver.tail_exponent"),
                    "key 'driver.tail_exponent' = " + fmt_double(*c.driver.tail_exponent) +
                        " contradicts family '" + c.driver.family + "' (expected " +
                        fmt_double(tail) + ")");
    }
    if (c.has_kernel) {
        only_for("kernel.gamma", c.kernel.family == "fractional",
                 "for family 'fractional' (family is '" + c.kernel.family + "')");
        if (c.kernel.family == "exponential_ou" && !c.has_marks)
            fail_at(key_line.at("kernel.family"),
                    "the exponential_ou kernel needs a [marks] block (its marks are the decay "
                    "rates)");
    }
    if (c.has_marks) {
        const bool discrete = c.marks.type == "discrete";
        only_for("marks.value", !discrete, "for type 'single' (type is 'discrete')");
        only_for("marks.atoms", discrete, "for type 'discrete' (type is 'single')");
        if (discrete && c.marks.atoms.empty()) {
            auto it = key_line.find("marks.type");
            fail_at(it == key_line.end() ? section_line : it->second,
                    "type 'discrete' needs a 'marks.atoms' list");
        }
    }
    return c;
}

InstanceConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("cannot read config file '" + path + "'");
    return parse_config(buf.str());
}

namespace {

void put(std::string& out, const char* key, const std::string& v) {
    out += key;
    out += " = ";
    out += v;
    out += "\n";
}

std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (double d : v) {
        if (!s.empty()) s += ", ";
        s += fmt_double(d);
    }
    return s;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t n : v) {
        if (!s.empty()) s += ", ";
        s += std::to_string(n);
    }
    return s;
}

std::string join_strings(const std::vector<std::string>& v) {
    std::string s;
    for (const std::string& t : v) {
        if (!s.empty()) s += ", ";
        s += t;
    }
    return s;
}

template <class T>
std::string join_pairs(const std::vector<T>& v, double T::*first, double T::*second) {
    std::string s;
    for (const T& a : v) {
        if (!s.empty()) s += ", ";
        s += fmt_double(a.*first) + ":" + fmt_double(a.*second);
    }
    return s;
}

} // namespace

std::string serialize_config(const InstanceConfig& c) {
    std::string out;
    bool first = true;
    auto sect = [&](const char* name) {
        if (!first) out += "\n";
        first = false;
        out += "[";
        out += name;
        out += "]\n";
    };

    if (!c.name.empty()) {
        sect("process");
        put(out, "name", c.name);
    }
    if (c.has_driver) {
        sect("driver");
        put(out, "family", c.driver.family);
        if (c.driver.family == "compound_poisson") {
            put(out, "atoms", join_pairs(c.driver.atoms, &Atom::x, &Atom::w));
        } else {
            put(out, "alpha", fmt_double(c.driver.alpha));
            if (c.driver.family == "tempered_stable")
                put(out, "lambda", fmt_double(c.driver.lambda));
            if (c.driver.scale != 1.0) put(out, "scale", fmt_double(c.driver.scale));
        }
        if (c.driver.drift != 0.0) put(out, "drift", fmt_double(c.driver.drift));
        if (c.driver.sigma2 != 0.0) put(out, "sigma2", fmt_double(c.driver.sigma2));
        if (c.driver.origin_exponent)
            put(out, "origin_exponent", fmt_double(*c.driver.origin_exponent));
        if (c.driver.tail_exponent)
            put(out, "tail_exponent", fmt_double(*c.driver.tail_exponent));
    }
    if (c.has_kernel) {
        sect("kernel");
        put(out, "family", c.kernel.family);
        if (c.kernel.family == "fractional") put(out, "gamma", fmt_double(c.kernel.gamma));
        if (!c.kernel.f0.empty()) put(out, "f0", c.kernel.f0);
    }
    if (c.has_marks) {
        sect("marks");
        put(out, "type", c.marks.type);
        if (c.marks.type == "discrete")
            put(out, "atoms", join_pairs(c.marks.atoms, &MarkAtom::v, &MarkAtom::weight));
        else if (c.marks.value != 0.0)
            put(out, "value", fmt_double(c.marks.value));
    }
    if (c.has_simulation) {
        sect("simulation");
        put(out, "horizon", fmt_double(c.simulation.horizon));
        put(out, "window", fmt_double(c.simulation.window));
        put(out, "n_terms", std::to_string(c.simulation.n_terms));
        put(out, "grid", std::to_string(c.simulation.grid));
        put(out, "seed", std::to_string(c.simulation.seed));
        put(out, "paths", std::to_string(c.simulation.paths));
        if (c.simulation.centering != 0)
            put(out, "centering", std::to_string(c.simulation.centering));
        if (c.simulation.symmetric != "auto") put(out, "symmetric", c.simulation.symmetric);
    }
    if (c.has_analysis) {
        sect("analysis");
        put(out, "grids", join_sizes(c.analysis.grids));
        put(out, "tests", join_strings(c.analysis.tests));
        put(out, "k_jumps", std::to_string(c.analysis.k_jumps));
    }
    if (c.has_table) {
        sect("table");
        if (!c.table.alphas.empty()) put(out, "alphas", join_doubles(c.table.alphas));
        if (!c.table.gammas.empty()) put(out, "gammas", join_doubles(c.table.gammas));
        if (!c.table.lambdas.empty()) put(out, "lambdas", join_doubles(c.table.lambdas));
    }
    return out;
}

std::string config_echo(const InstanceConfig& c) {
    const std::string body = serialize_config(c);
    std::string out = "# config-begin\n";
    std::size_t pos = 0;
    while (pos < body.size()) {
        std::size_t nl = body.find('\n', pos);
        std::string l = body.substr(pos, nl - pos);
        out += l.empty() ? "#" : "# " + l;
        out += "\n";
        pos = nl + 1;
    }
    out += "# config-end\n";
    return out;
}

InstanceConfig parse_echo(const std::string& text) {
    std::istringstream in(text);
    std::string raw, body;
    bool inside = false, done = false;
    while (std::getline(in, raw)) {
        std::string s = trim(raw);
        if (!inside) {
            if (s == "# config-begin") inside = true;
            continue;
        }
        if (s == "# config-end") {
            done = true;
            break;
        }
        if (s.empty() || s[0] != '#')
            fail("config echo block interrupted before 'config-end'");
        std::string payload = s.substr(1);
        if (!payload.empty() && payload[0] == ' ') payload = payload.substr(1);
        body += payload;
        body += "\n";
    }
    if (!inside) fail("no config echo block found");
    if (!done) fail("config echo block is unterminated");
    return parse_config(body);
}

namespace {

LevyMeasure build_levy(const DriverConfig& d) {
    if (d.family == "stable") return LevyMeasure::symmetric_stable(d.alpha, d.scale);
    if (d.family == "tempered_stable")
        return LevyMeasure::symmetric_tempered_stable(d.alpha, d.lambda, d.scale);
    return LevyMeasure::compound_poisson(d.atoms);
}

bool driver_symmetric(const DriverConfig& d) {
    if (d.drift != 0.0) return false;
    if (d.family != "compound_poisson") return true;
    std::map<double, double> weight;
    for (const Atom& a : d.atoms) weight[a.x] += a.w;
    for (const auto& [x, w] : weight) {
        auto it = weight.find(-x);
        if (it == weight.end() || it->second != w) return false;
    }
    return true;
}

} // namespace

RandomMeasure build_random_measure(const InstanceConfig& c) {
    if (!c.has_driver) fail("missing required block [driver]");
    LevyMeasure rho = build_levy(c.driver);
    if (!c.has_marks || c.marks.type == "single")
        return RandomMeasure::single(c.marks.value, std::move(rho), c.driver.drift,
                                     c.driver.sigma2);
    const std::size_t n = c.marks.atoms.size();
    std::vector<LevyMeasure> per(n, rho);
    std::vector<double> drift(n, c.driver.drift), gauss(n, c.driver.sigma2);
    return RandomMeasure::discrete(c.marks.atoms, std::move(per), std::move(drift),
                                   std::move(gauss));
}

KernelSpec build_kernel(const InstanceConfig& c) {
    if (!c.has_kernel) fail("missing required block [kernel]");
    const KernelConfig& k = c.kernel;
    if (k.family == "fractional")
        return KernelSpec::fractional(k.gamma, k.f0 == "zero" ? F0Mode::Zero : F0Mode::SameAsF);
    if (k.family == "exponential_ou")
        return KernelSpec::exponential_ou(k.f0 == "same" ? F0Mode::SameAsF : F0Mode::Zero);
    return KernelSpec::step(k.f0 == "zero" ? F0Mode::Zero : F0Mode::SameAsF);
}

SeriesConfig build_series(const InstanceConfig& c) {
    if (!c.has_simulation) fail("missing required block [simulation]");
    const SimulationConfig& s = c.simulation;
    SeriesConfig cfg;
    cfg.horizon = s.horizon;
    cfg.window = s.window;
    cfg.n_terms = s.n_terms;
    cfg.seed = s.seed;
    cfg.n_centering = s.centering;
    if (s.symmetric == "auto") {
        if (!c.has_driver) fail("missing required block [driver]");
        cfg.symmetric = driver_symmetric(c.driver);
    } else {
        cfg.symmetric = s.symmetric == "true";
    }
    cfg.grid.clear();
    cfg.grid.reserve(static_cast<std::size_t>(s.grid) + 1);
    for (int i = 0; i <= s.grid; ++i)
        cfg.grid.push_back(s.horizon * (static_cast<double>(i) / s.grid));
    cfg.validate();
    return cfg;
}

} // namespace simma
