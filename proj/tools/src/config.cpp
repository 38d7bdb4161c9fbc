#include "config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cfg {

const char* kind_name(Kind k) {
    switch (k) {
    case Kind::Branches: return "branches";
    case Kind::SimpleGame: return "simple-game";
    case Kind::McVerify: return "mc-verify";
    case Kind::CertifyMonotone: return "certify-monotone";
    case Kind::CertifyThreshold: return "certify-threshold";
    case Kind::CertifyDensityBound: return "certify-density-bound";
    case Kind::TwoPop: return "twopop";
    case Kind::RegimeDiagram: return "regime-diagram";
    }
    return "?";
}

namespace {

// Every key the full schema knows about, across all kinds. Used only to
// sharpen the diagnostic when a key is valid somewhere but not here.
const std::set<std::string>& all_schema_keys() {
    static const std::set<std::string> keys = {
        "kind", "seed",
        "problem.hamiltonian", "problem.a", "problem.b", "problem.delta",
        "problem.c0", "problem.sigma", "problem.alpha", "problem.beta",
        "problem.init", "problem.init_mean", "problem.init_variance",
        "problem.init_lo", "problem.init_hi", "problem.init_mean2",
        "problem.init_variance2", "problem.horizon",
        "numerics.x_min", "numerics.x_max", "numerics.n_x", "numerics.n_t",
        "numerics.fp_tol", "numerics.theta", "numerics.dedup",
        "numerics.max_iter", "numerics.n_random_seeds",
        "mc.n_paths", "mc.n_steps", "mc.n_checkpoints", "mc.control",
        "mc.psi", "mc.psi_lambda", "mc.n_probes",
        "certify.n_pairs",
        "threshold.d", "threshold.L_F", "threshold.L_G",
        "threshold.sup_init_density", "threshold.C_H", "threshold.Cbar_H",
        "threshold.sigma", "threshold.T_max_scan",
        "density_bound.drift", "density_bound.drift_bound",
        "density_bound.sigma", "density_bound.t",
        "twopop.a1", "twopop.b1", "twopop.a2", "twopop.b2",
        "twopop.sigma1", "twopop.sigma2",
        "twopop.alpha1", "twopop.beta1", "twopop.gamma1", "twopop.delta1",
        "twopop.alpha2", "twopop.beta2", "twopop.gamma2", "twopop.delta2",
        "twopop.branches",
        "diagram.c0", "diagram.t_lo", "diagram.t_hi", "diagram.t_n",
        "diagram.mean_lo", "diagram.mean_hi", "diagram.mean_n",
        "output.directory", "output.formats",
        "assert.catalog_size", "assert.root_count", "assert.verdict",
        "assert.max_residual",
    };
    return keys;
}

class Reader {
  public:
    explicit Reader(const toml::Table& tab) : tab_(tab) {}

    bool has(const std::string& key) const { return tab_.count(key) != 0; }

    const toml::Value& take(const std::string& key) {
        auto it = tab_.find(key);
        if (it == tab_.end())
            throw ConfigError(0, "missing required key '" + key + "'");
        consumed_.insert(key);
        return it->second;
    }

    std::string str(const std::string& key, const std::string& def) {
        if (!has(key)) return def;
        const toml::Value& v = take(key);
        if (v.kind != toml::Value::Kind::Str)
            throw ConfigError(v.line, "key '" + key + "' expects a string");
        return v.str;
    }

    std::string str_required(const std::string& key) {
        const toml::Value& v = take(key);
        if (v.kind != toml::Value::Kind::Str)
            throw ConfigError(v.line, "key '" + key + "' expects a string");
        return v.str;
    }

    double num(const std::string& key, double def) {
        if (!has(key)) return def;
        const toml::Value& v = take(key);
        if (v.kind != toml::Value::Kind::Int && v.kind != toml::Value::Kind::Float)
            throw ConfigError(v.line, "key '" + key + "' expects a number");
        return v.number;
    }

    std::int64_t integer(const std::string& key, std::int64_t def) {
        if (!has(key)) return def;
        const toml::Value& v = take(key);
        if (v.kind != toml::Value::Kind::Int)
            throw ConfigError(v.line, "key '" + key + "' expects an integer");
        return v.integer;
    }

    std::size_t size(const std::string& key, std::size_t def) {
        if (!has(key)) return def;
        const toml::Value& v = take(key);
        if (v.kind != toml::Value::Kind::Int)
            throw ConfigError(v.line, "key '" + key + "' expects an integer");
        if (v.integer < 0)
            throw ConfigError(v.line, "key '" + key + "' must be nonnegative");
        return static_cast<std::size_t>(v.integer);
    }

    std::vector<std::string> str_list(const std::string& key,
                                      std::vector<std::string> def) {
        if (!has(key)) return def;
        const toml::Value& v = take(key);
        if (v.kind != toml::Value::Kind::Array)
            throw ConfigError(v.line, "key '" + key + "' expects an array of strings");
        std::vector<std::string> out;
        for (const toml::Value& e : v.array) {
            if (e.kind != toml::Value::Kind::Str)
                throw ConfigError(v.line, "key '" + key + "' expects an array of strings");
            out.push_back(e.str);
        }
        return out;
    }

    int line_of(const std::string& key) const {
        auto it = tab_.find(key);
        return it == tab_.end() ? 0 : it->second.line;
    }

    // Rejects every key that the loader never read. Keys that belong to the
    // schema of some other kind get a pointed message.
    void finish(const std::string& kind_label) const {
        for (const auto& [key, value] : tab_) {
            if (consumed_.count(key)) continue;
            if (all_schema_keys().count(key))
                throw ConfigError(value.line, "key '" + key +
                                  "' does not apply to kind '" + kind_label + "'");
            throw ConfigError(value.line, "unknown key '" + key + "'");
        }
    }

  private:
    const toml::Table& tab_;
    std::set<std::string> consumed_;
};

void check_choice(const std::string& value, const std::vector<std::string>& allowed,
                  const std::string& key, int line) {
    if (std::find(allowed.begin(), allowed.end(), value) != allowed.end()) return;
    std::ostringstream os;
    os << "key '" << key << "' must be one of:";
    for (const auto& a : allowed) os << " " << a;
    os << " (got '" << value << "')";
    throw ConfigError(line, os.str());
}

Kind parse_kind(Reader& r) {
    int line = r.line_of("kind");
    std::string k = r.str_required("kind");
    if (k == "branches") return Kind::Branches;
    if (k == "simple-game") return Kind::SimpleGame;
    if (k == "mc-verify") return Kind::McVerify;
    if (k == "certify-monotone") return Kind::CertifyMonotone;
    if (k == "certify-threshold") return Kind::CertifyThreshold;
    if (k == "certify-density-bound") return Kind::CertifyDensityBound;
    if (k == "twopop") return Kind::TwoPop;
    if (k == "regime-diagram") return Kind::RegimeDiagram;
    check_choice(k, {"branches", "simple-game", "mc-verify", "certify-monotone",
                     "certify-threshold", "certify-density-bound", "twopop",
                     "regime-diagram"}, "kind", line);
    return Kind::Branches; // unreachable
}

// Shared [problem] block. `want_hamiltonian` controls whether the control
// model keys are read; the simple game fixes its Hamiltonian internally.
ProblemConfig read_problem(Reader& r, bool want_hamiltonian, bool want_costs) {
    ProblemConfig p;
    if (want_hamiltonian) {
        int hline = r.line_of("problem.hamiltonian");
        p.hamiltonian = r.str("problem.hamiltonian", p.hamiltonian);
        check_choice(p.hamiltonian, {"bangbang", "smooth-capped", "quadratic-control"},
                     "problem.hamiltonian", hline);
        if (p.hamiltonian == "bangbang") {
            p.a = r.num("problem.a", p.a);
            p.b = r.num("problem.b", p.b);
            if (!(p.a < 0.0 && 0.0 < p.b))
                throw ConfigError(std::max(r.line_of("problem.a"), r.line_of("problem.b")),
                                  "bangbang control interval needs a < 0 < b");
        } else if (p.hamiltonian == "smooth-capped") {
            p.delta = r.num("problem.delta", p.delta);
            if (p.delta <= 0.0)
                throw ConfigError(r.line_of("problem.delta"),
                                  "problem.delta must be positive");
        } else {
            p.c0 = r.num("problem.c0", p.c0);
            if (p.c0 <= 0.0)
                throw ConfigError(r.line_of("problem.c0"),
                                  "problem.c0 must be positive");
        }
    }
    p.sigma = r.num("problem.sigma", p.sigma);
    if (p.sigma <= 0.0)
        throw ConfigError(r.line_of("problem.sigma"), "problem.sigma must be positive");
    if (want_costs) {
        p.alpha = r.num("problem.alpha", p.alpha);
        p.beta = r.num("problem.beta", p.beta);
    }
    int iline = r.line_of("problem.init");
    p.init = r.str("problem.init", p.init);
    check_choice(p.init, {"gaussian", "uniform", "bimodal", "point"}, "problem.init",
                 iline);
    if (p.init == "gaussian" || p.init == "point" || p.init == "bimodal") {
        p.init_mean = r.num("problem.init_mean", p.init_mean);
        if (p.init != "point") {
            p.init_variance = r.num("problem.init_variance", p.init_variance);
            if (p.init_variance <= 0.0)
                throw ConfigError(r.line_of("problem.init_variance"),
                                  "problem.init_variance must be positive");
        }
    }
    if (p.init == "bimodal") {
        p.init_mean2 = r.num("problem.init_mean2", p.init_mean2);
        p.init_variance2 = r.num("problem.init_variance2", p.init_variance2);
        if (p.init_variance2 <= 0.0)
            throw ConfigError(r.line_of("problem.init_variance2"),
                              "problem.init_variance2 must be positive");
    }
    if (p.init == "uniform") {
        p.init_lo = r.num("problem.init_lo", p.init_lo);
        p.init_hi = r.num("problem.init_hi", p.init_hi);
        if (!(p.init_lo < p.init_hi))
            throw ConfigError(std::max(r.line_of("problem.init_lo"),
                                       r.line_of("problem.init_hi")),
                              "need problem.init_lo < problem.init_hi");
    }
    p.horizon = r.num("problem.horizon", p.horizon);
    if (p.horizon <= 0.0)
        throw ConfigError(r.line_of("problem.horizon"),
                          "problem.horizon must be positive");
    return p;
}

NumericsConfig read_numerics(Reader& r) {
    NumericsConfig n;
    n.x_min = r.num("numerics.x_min", n.x_min);
    n.x_max = r.num("numerics.x_max", n.x_max);
    if (!(n.x_min < n.x_max))
        throw ConfigError(std::max(r.line_of("numerics.x_min"),
                                   r.line_of("numerics.x_max")),
                          "need numerics.x_min < numerics.x_max");
    n.n_x = r.size("numerics.n_x", n.n_x);
    n.n_t = r.size("numerics.n_t", n.n_t);
    if (n.n_x < 16)
        throw ConfigError(r.line_of("numerics.n_x"), "numerics.n_x must be at least 16");
    if (n.n_t < 2)
        throw ConfigError(r.line_of("numerics.n_t"), "numerics.n_t must be at least 2");
    n.fp_tol = r.num("numerics.fp_tol", n.fp_tol);
    n.theta = r.num("numerics.theta", n.theta);
    if (n.theta <= 0.0 || n.theta > 1.0)
        throw ConfigError(r.line_of("numerics.theta"),
                          "numerics.theta must lie in (0, 1]");
    n.dedup = r.num("numerics.dedup", n.dedup);
    n.max_iter = r.size("numerics.max_iter", n.max_iter);
    n.n_random_seeds = r.size("numerics.n_random_seeds", n.n_random_seeds);
    return n;
}

McConfig read_mc(Reader& r) {
    McConfig m;
    m.n_paths = r.size("mc.n_paths", m.n_paths);
    m.n_steps = r.size("mc.n_steps", m.n_steps);
    m.n_checkpoints = r.size("mc.n_checkpoints", m.n_checkpoints);
    if (m.n_paths == 0)
        throw ConfigError(r.line_of("mc.n_paths"), "mc.n_paths must be positive");
    if (m.n_steps == 0)
        throw ConfigError(r.line_of("mc.n_steps"), "mc.n_steps must be positive");
    if (m.n_checkpoints < 2)
        throw ConfigError(r.line_of("mc.n_checkpoints"),
                          "mc.n_checkpoints must be at least 2");
    m.control = r.num("mc.control", m.control);
    int pline = r.line_of("mc.psi");
    m.psi = r.str("mc.psi", m.psi);
    check_choice(m.psi, {"identity", "exponential", "tanh"}, "mc.psi", pline);
    if (m.psi != "identity") m.psi_lambda = r.num("mc.psi_lambda", m.psi_lambda);
    m.n_probes = r.size("mc.n_probes", m.n_probes);
    return m;
}

OutputConfig read_output(Reader& r) {
    OutputConfig o;
    o.directory = r.str("output.directory", o.directory);
    int fline = r.line_of("output.formats");
    o.formats = r.str_list("output.formats", o.formats);
    for (const auto& f : o.formats)
        check_choice(f, {"csv", "json", "svg"}, "output.formats", fline);
    return o;
}

AssertConfig read_asserts(Reader& r) {
    AssertConfig a;
    if (r.has("assert.catalog_size"))
        a.catalog_size = r.integer("assert.catalog_size", 0);
    if (r.has("assert.root_count"))
        a.root_count = r.integer("assert.root_count", 0);
    if (r.has("assert.verdict"))
        a.verdict = r.str("assert.verdict", "");
    if (r.has("assert.max_residual"))
        a.max_residual = r.num("assert.max_residual", 0.0);
    return a;
}

} // namespace

ExperimentConfig load_config_text(const std::string& text, const std::string& path) {
    toml::Table tab;
    try {
        tab = toml::parse(text);
    } catch (const toml::ParseError& e) {
        throw ConfigError(e.line, e.what());
    }

    Reader r(tab);
    ExperimentConfig c;
    c.source_path = path;
    c.raw_text = text;
    c.kind = parse_kind(r);
    c.seed = static_cast<std::uint64_t>(r.integer("seed", 1));

    switch (c.kind) {
    case Kind::Branches:
        c.problem = read_problem(r, true, true);
        c.numerics = read_numerics(r);
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    case Kind::SimpleGame: {
        ProblemConfig p;
        p.c0 = r.num("problem.c0", p.c0);
        if (p.c0 <= 0.0)
            throw ConfigError(r.line_of("problem.c0"), "problem.c0 must be positive");
        p.sigma = r.num("problem.sigma", p.sigma);
        if (p.sigma <= 0.0)
            throw ConfigError(r.line_of("problem.sigma"),
                              "problem.sigma must be positive");
        p.horizon = r.num("problem.horizon", p.horizon);
        if (p.horizon <= 0.0)
            throw ConfigError(r.line_of("problem.horizon"),
                              "problem.horizon must be positive");
        p.init_mean = r.num("problem.init_mean", p.init_mean);
        c.problem = p;
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    }
    case Kind::McVerify:
        c.problem = read_problem(r, true, true);
        c.numerics = read_numerics(r);
        c.mc = read_mc(r);
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    case Kind::CertifyMonotone:
        c.problem = read_problem(r, false, true);
        c.numerics = read_numerics(r);
        c.certify.n_pairs = r.size("certify.n_pairs", c.certify.n_pairs);
        if (c.certify.n_pairs == 0)
            throw ConfigError(r.line_of("certify.n_pairs"),
                              "certify.n_pairs must be positive");
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    case Kind::CertifyThreshold: {
        ThresholdConfig t;
        t.d = r.size("threshold.d", t.d);
        if (t.d == 0)
            throw ConfigError(r.line_of("threshold.d"), "threshold.d must be positive");
        t.L_F = r.num("threshold.L_F", t.L_F);
        t.L_G = r.num("threshold.L_G", t.L_G);
        t.sup_init_density = r.num("threshold.sup_init_density", t.sup_init_density);
        t.C_H = r.num("threshold.C_H", t.C_H);
        t.Cbar_H = r.num("threshold.Cbar_H", t.Cbar_H);
        t.sigma = r.num("threshold.sigma", t.sigma);
        if (t.sigma <= 0.0)
            throw ConfigError(r.line_of("threshold.sigma"),
                              "threshold.sigma must be positive");
        t.T_max_scan = r.num("threshold.T_max_scan", t.T_max_scan);
        c.threshold = t;
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    }
    case Kind::CertifyDensityBound: {
        DensityBoundConfig d;
        int dline = r.line_of("density_bound.drift");
        d.drift = r.str("density_bound.drift", d.drift);
        check_choice(d.drift, {"constant", "sin", "zero"}, "density_bound.drift", dline);
        d.drift_bound = r.num("density_bound.drift_bound", d.drift_bound);
        if (d.drift_bound < 0.0)
            throw ConfigError(r.line_of("density_bound.drift_bound"),
                              "density_bound.drift_bound must be nonnegative");
        d.sigma = r.num("density_bound.sigma", d.sigma);
        if (d.sigma <= 0.0)
            throw ConfigError(r.line_of("density_bound.sigma"),
                              "density_bound.sigma must be positive");
        d.t = r.num("density_bound.t", d.t);
        if (d.t <= 0.0)
            throw ConfigError(r.line_of("density_bound.t"),
                              "density_bound.t must be positive");
        c.density_bound = d;
        c.problem = read_problem(r, false, false);
        c.numerics = read_numerics(r);
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    }
    case Kind::TwoPop: {
        TwoPopConfig t;
        t.a1 = r.num("twopop.a1", t.a1);
        t.b1 = r.num("twopop.b1", t.b1);
        t.a2 = r.num("twopop.a2", t.a2);
        t.b2 = r.num("twopop.b2", t.b2);
        if (!(t.a1 < 0.0 && 0.0 < t.b1) || !(t.a2 < 0.0 && 0.0 < t.b2))
            throw ConfigError(0, "twopop control intervals need a < 0 < b");
        t.sigma1 = r.num("twopop.sigma1", t.sigma1);
        t.sigma2 = r.num("twopop.sigma2", t.sigma2);
        if (t.sigma1 <= 0.0 || t.sigma2 <= 0.0)
            throw ConfigError(0, "twopop volatilities must be positive");
        t.alpha1 = r.num("twopop.alpha1", t.alpha1);
        t.beta1 = r.num("twopop.beta1", t.beta1);
        t.gamma1 = r.num("twopop.gamma1", t.gamma1);
        t.delta1 = r.num("twopop.delta1", t.delta1);
        t.alpha2 = r.num("twopop.alpha2", t.alpha2);
        t.beta2 = r.num("twopop.beta2", t.beta2);
        t.gamma2 = r.num("twopop.gamma2", t.gamma2);
        t.delta2 = r.num("twopop.delta2", t.delta2);
        int bline = r.line_of("twopop.branches");
        t.branches = r.str_list("twopop.branches", t.branches);
        for (const auto& b : t.branches) {
            auto slash = b.find('/');
            bool ok = slash != std::string::npos;
            if (ok) {
                std::string lhs = b.substr(0, slash), rhs = b.substr(slash + 1);
                auto tok = [](const std::string& s) {
                    return s == "plus" || s == "minus";
                };
                ok = tok(lhs) && tok(rhs);
            }
            if (!ok)
                throw ConfigError(bline, "twopop.branches entries must look like "
                                         "'plus/minus' (tokens: plus, minus)");
        }
        c.twopop = t;
        c.problem = read_problem(r, false, false);
        c.numerics = read_numerics(r);
        c.output = read_output(r);
        c.asserts = read_asserts(r);
        break;
    }
    case Kind::RegimeDiagram: {
        DiagramConfig d;
        d.c0 = r.num("diagram.c0", d.c0);
        if (d.c0 <= 0.0)
            throw ConfigError(r.line_of("diagram.c0"), "diagram.c0 must be positive");
        d.t_lo = r.num("diagram.t_lo", d.t_lo);
        d.t_hi = r.num("diagram.t_hi", d.t_hi);
        if (!(0.0 < d.t_lo && d.t_lo <= d.t_hi))
            throw ConfigError(std::max(r.line_of("diagram.t_lo"),
                                       r.line_of("diagram.t_hi")),
                              "need 0 < diagram.t_lo <= diagram.t_hi");
        d.t_n = r.size("diagram.t_n", d.t_n);
        d.mean_lo = r.num("diagram.mean_lo", d.mean_lo);
        d.mean_hi = r.num("diagram.mean_hi", d.mean_hi);
        if (!(d.mean_lo <= d.mean_hi))
            throw ConfigError(std::max(r.line_of("diagram.mean_lo"),
                                       r.line_of("diagram.mean_hi")),
                              "need diagram.mean_lo <= diagram.mean_hi");
        d.mean_n = r.size("diagram.mean_n", d.mean_n);
        if (d.t_n == 0 || d.mean_n == 0)
            throw ConfigError(0, "diagram grid sizes must be positive");
        c.diagram = d;
        c.output = read_output(r);
        break;
    }
    }

    r.finish(kind_name(c.kind));
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(0, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_config_text(ss.str(), path);
}

} // namespace cfg
