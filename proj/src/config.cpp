#include "coniwave/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace coniwave {

namespace {

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

using Section = std::map<std::string, Entry>;

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_numbers(const std::string& s, const std::string& key, int line) {
    std::vector<double> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
        try {
            std::size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (...) {
            throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                              "': cannot parse number '" + tok + "'");
        }
    }
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": key '" + key + "' is empty");
    return out;
}

class Reader {
public:
    std::map<std::string, Section> sections;

    Entry* find(const std::string& sec, const std::string& key) {
        auto si = sections.find(sec);
        if (si == sections.end()) return nullptr;
        auto ki = si->second.find(key);
        if (ki == si->second.end()) return nullptr;
        ki->second.used = true;
        return &ki->second;
    }

    double number(const std::string& sec, const std::string& key, double dflt) {
        Entry* e = find(sec, key);
        if (!e) return dflt;
        return parse_numbers(e->value, key, e->line).at(0);
    }

    int integer(const std::string& sec, const std::string& key, int dflt) {
        return static_cast<int>(number(sec, key, dflt));
    }

    std::string text(const std::string& sec, const std::string& key, std::string dflt) {
        Entry* e = find(sec, key);
        return e ? e->value : dflt;
    }

    std::optional<Vec> vector(const std::string& sec, const std::string& key) {
        Entry* e = find(sec, key);
        if (!e) return std::nullopt;
        std::vector<double> nums = parse_numbers(e->value, key, e->line);
        Vec v(nums.size());
        for (std::size_t i = 0; i < nums.size(); ++i) v(static_cast<int>(i)) = nums[i];
        return v;
    }

    void check_all_used() const {
        for (const auto& [sec, entries] : sections)
            for (const auto& [key, e] : entries)
                if (!e.used)
                    throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" +
                                      key + "' in section [" + sec + "]");
    }
};

Vec fixed_dim(const std::optional<Vec>& v, int d, const char* what, const Vec& dflt) {
    if (!v) return dflt;
    if (v->size() != d)
        throw ConfigError(std::string(what) + ": expected " + std::to_string(d) + " numbers");
    return *v;
}

QuadScalar quad_from(Reader& r, const std::string& sec, const std::string& prefix, int d) {
    QuadScalar q = QuadScalar::zero(d);
    q.c0 = r.number(sec, prefix + "_const", 0.0);
    q.g = fixed_dim(r.vector(sec, prefix + "_lin"), d, (prefix + "_lin").c_str(), Vec::Zero(d));
    if (auto flat = r.vector(sec, prefix + "_quad")) {
        if (flat->size() != d * d)
            throw ConfigError(prefix + "_quad: expected " + std::to_string(d * d) + " numbers");
        Mat h(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) h(i, j) = (*flat)(i * d + j);
        q.H = 0.5 * (h + h.transpose());
    }
    return q;
}

InitialSpec initial_from(Reader& r, const std::string& sec, int d, bool required) {
    InitialSpec is;
    auto q0 = r.vector(sec, "q0");
    auto p0 = r.vector(sec, "p0");
    if (required && (!q0 || !p0))
        throw ConfigError("section [" + sec + "] must set q0 and p0");
    is.q0 = fixed_dim(q0, d, "q0", Vec::Zero(d));
    is.p0 = fixed_dim(p0, d, "p0", Vec::Zero(d));
    std::string mode = r.text(sec, "mode", "minus");
    if (mode == "minus") is.mode = Mode::minus;
    else if (mode == "plus") is.mode = Mode::plus;
    else throw ConfigError(sec + ".mode: expected 'minus' or 'plus'");
    is.y0_sign = r.number(sec, "y0_sign", +1.0);
    is.profile_center =
        fixed_dim(r.vector(sec, "profile_center"), d, "profile_center", Vec::Zero(d));
    is.profile_poly =
        fixed_dim(r.vector(sec, "profile_poly"), d, "profile_poly", Vec::Zero(d));
    std::string prof = r.text(sec, "profile", "gaussian");
    if (prof != "gaussian")
        throw ConfigError(sec + ".profile: only 'gaussian' profiles are available");
    return is;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    Reader r;
    std::istringstream is(text);
    std::string raw;
    std::string sec = "run";
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = trim(raw);
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = trim(s.substr(0, hash));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(origin + " line " + std::to_string(line) +
                                  ": malformed section header");
            sec = trim(s.substr(1, s.size() - 2));
            continue;
        }
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + " line " + std::to_string(line) +
                              ": expected 'key = value'");
        std::string key = trim(s.substr(0, eq));
        std::string val = trim(s.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError(origin + " line " + std::to_string(line) +
                              ": empty key or value");
        if (r.sections[sec].count(key))
            throw ConfigError(origin + " line " + std::to_string(line) + ": duplicate key '" +
                              key + "'");
        r.sections[sec][key] = Entry{val, line, false};
    }

    ExperimentConfig cfg;
    std::string kind = r.text("run", "kind", "crossing-single");
    if (kind == "adiabatic") cfg.kind = RunKind::adiabatic;
    else if (kind == "crossing-single") cfg.kind = RunKind::crossing_single;
    else if (kind == "crossing-pair") cfg.kind = RunKind::crossing_pair;
    else if (kind == "lz-table") cfg.kind = RunKind::lz_table;
    else if (kind == "classical-only") cfg.kind = RunKind::classical_only;
    else throw ConfigError("run.kind: unknown kind '" + kind + "'");

    cfg.t0 = r.number("run", "t0", 0.0);
    cfg.T = r.number("run", "T", 0.8);
    if (auto eps = r.vector("run", "epsilons")) {
        cfg.epsilons.assign(eps->data(), eps->data() + eps->size());
        for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
            if (cfg.epsilons[i] <= 0)
                throw ConfigError("run.epsilons: values must be positive");
            if (i > 0 && cfg.epsilons[i] >= cfg.epsilons[i - 1])
                throw ConfigError("run.epsilons: values must be strictly descending");
        }
    } else {
        cfg.epsilons = {0.02};
    }
    cfg.delta_exponent = r.number("run", "delta_exponent", 5.0 / 14.0);
    cfg.beta_R = r.number("run", "beta", 1.0 / 50.0);
    cfg.out_dir = r.text("run", "out_dir", "out");
    cfg.dump_fields = r.number("run", "dump_fields", 0.0) != 0.0;
    cfg.threads = r.integer("run", "threads", 1);

    cfg.dim = r.integer("model", "d", 2);
    if (cfg.dim < 2) throw ConfigError("model.d: dimension must be >= 2");
    cfg.model_name = r.text("model", "name", "linear-isotropic");
    int d = cfg.dim;
    if (cfg.model_name == "linear-isotropic") {
        cfg.model = linear_isotropic(d);
    } else if (cfg.model_name == "tilted") {
        Vec kappa = fixed_dim(r.vector("model", "kappa"), d, "kappa", Vec::Zero(d));
        Mat2X G(2, d);
        G.setZero();
        G(0, 0) = 1.0;
        G(1, 1) = 1.0;
        if (auto flat = r.vector("model", "G")) {
            if (flat->size() != 2 * d)
                throw ConfigError("model.G: expected " + std::to_string(2 * d) + " numbers");
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < d; ++j) G(i, j) = (*flat)(i * d + j);
        }
        Vec2 c(0, 0);
        if (auto cc = r.vector("model", "c")) {
            if (cc->size() != 2) throw ConfigError("model.c: expected 2 numbers");
            c = Vec2((*cc)(0), (*cc)(1));
        }
        cfg.model = tilted(kappa, G, c);
    } else if (cfg.model_name == "custom") {
        QuadScalar v = quad_from(r, "model", "v", d);
        QuadScalar w1 = quad_from(r, "model", "w1", d);
        QuadScalar w2 = quad_from(r, "model", "w2", d);
        cfg.model = PotentialModel(v, w1, w2, "custom");
    } else {
        throw ConfigError("model.name: unknown model '" + cfg.model_name + "'");
    }

    cfg.init_minus = initial_from(r, "initial", d, cfg.kind != RunKind::lz_table);
    if (r.sections.count("initial-plus")) {
        cfg.init_plus = initial_from(r, "initial-plus", d, true);
        cfg.init_plus->mode = Mode::plus;
    }
    if (cfg.kind == RunKind::crossing_pair && !cfg.init_plus)
        throw ConfigError("crossing-pair runs need an [initial-plus] section");

    cfg.profile_n = r.integer("grid", "profile_N", 256);
    cfg.profile_L = r.number("grid", "profile_L", 12.0);
    cfg.phys_n = r.integer("grid", "phys_N", 512);
    cfg.phys_L = r.number("grid", "phys_L", 0.0);
    cfg.dt_factor = r.number("grid", "dt_factor", 20.0);
    if ((cfg.profile_n & (cfg.profile_n - 1)) != 0 || (cfg.phys_n & (cfg.phys_n - 1)) != 0)
        throw ConfigError("grid point counts must be powers of two");

    cfg.profile_opt.dt = r.number("profile_evolution", "dt", 1e-3);
    cfg.profile_opt.tau_switch = r.number("profile_evolution", "tau_switch", 0.05);
    cfg.profile_opt.h_extract = r.number("profile_evolution", "h_extract", 1e-4);

    cfg.lz.eta2_min = r.number("lz", "eta2_min", -4.0);
    cfg.lz.eta2_max = r.number("lz", "eta2_max", 4.0);
    cfg.lz.eta2_step = r.number("lz", "eta2_step", 0.05);
    cfg.lz.r = r.number("lz", "r", 1.0);
    cfg.lz.s0 = r.number("lz", "s0", 200.0);

    r.check_all_used();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

} // namespace coniwave
