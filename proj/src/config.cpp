#include "mspde/config.hpp"

#include "mspde/csv.hpp"
#include "mspde/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mspde {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad numeric value for key '" + key + "': " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad integer value for key '" + key + "': " + v);
    }
}

uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("bad seed value for key '" + key + "': " + v);
    }
}

template <typename T, typename Conv>
std::vector<T> to_list(const std::string& key, const std::string& v, Conv&& conv) {
    std::vector<T> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(conv(key, item));
    }
    if (out.empty()) throw ConfigError("empty list for key '" + key + "'");
    return out;
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "solver" && section != "experiment" &&
                section != "run")
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + " is not key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string scoped = section.empty() ? key : section + "." + key;

        if (scoped == "model.graph") cfg.graph_id = val;
        else if (scoped == "model.n") cfg.mesh_n = to_int(key, val);
        else if (scoped == "model.noise") cfg.noise_kind = val;
        else if (scoped == "model.k_modes") cfg.k_modes = to_int(key, val);
        else if (scoped == "model.decay") cfg.noise_decay = to_real(key, val);
        else if (scoped == "model.noise_scale") cfg.noise_scale = to_real(key, val);
        else if (scoped == "model.noise_offset") cfg.noise_offset = to_real(key, val);
        else if (scoped == "model.operator_scale") cfg.operator_scale = to_real(key, val);
        else if (scoped == "solver.T") cfg.T = to_real(key, val);
        else if (scoped == "solver.steps") cfg.steps = to_int(key, val);
        else if (scoped == "solver.lambda") cfg.yosida_lambda = to_real(key, val);
        else if (scoped == "solver.newton_tol") cfg.newton_tol = to_real(key, val);
        else if (scoped == "solver.newton_max_iter") cfg.newton_max_iter = to_int(key, val);
        else if (scoped == "solver.truncation") cfg.truncation = val;
        else if (scoped == "experiment.p_list") cfg.p_list = to_list<double>(key, val, to_real);
        else if (scoped == "experiment.scales") cfg.scales = to_list<double>(key, val, to_real);
        else if (scoped == "experiment.deltas") cfg.deltas = to_list<double>(key, val, to_real);
        else if (scoped == "experiment.mesh_sizes")
            cfg.mesh_sizes = to_list<int>(key, val, to_int);
        else if (scoped == "experiment.fn_ladder")
            cfg.fn_ladder = to_list<int>(key, val, to_int);
        else if (scoped == "experiment.samples") cfg.samples = to_int(key, val);
        else if (scoped == "experiment.t_long") cfg.t_long = to_real(key, val);
        else if (scoped == "experiment.burn_in") cfg.burn_in = to_real(key, val);
        else if (scoped == "run.seed") cfg.seed = to_u64(key, val);
        else if (scoped == "run.out") cfg.out_dir = val;
        else throw ConfigError("unknown config key '" + scoped + "'");
    }

    if (cfg.steps < 1) throw ConfigError("key 'solver.steps' must be >= 1");
    if (cfg.T <= 0.0) throw ConfigError("key 'solver.T' must be positive");
    if (cfg.mesh_n < 2) throw ConfigError("key 'model.n' must be >= 2");
    if (cfg.samples < 1) throw ConfigError("key 'experiment.samples' must be >= 1");
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string canonical_config(const RunConfig& cfg, bool include_run_section) {
    std::ostringstream os;
    auto real = [](double x) { return format_real(x); };
    os << "[model]\n";
    os << "graph=" << cfg.graph_id << "\n";
    os << "n=" << cfg.mesh_n << "\n";
    os << "noise=" << cfg.noise_kind << "\n";
    os << "k_modes=" << cfg.k_modes << "\n";
    os << "decay=" << real(cfg.noise_decay) << "\n";
    os << "noise_scale=" << real(cfg.noise_scale) << "\n";
    os << "noise_offset=" << real(cfg.noise_offset) << "\n";
    os << "operator_scale=" << real(cfg.operator_scale) << "\n";
    os << "[solver]\n";
    os << "T=" << real(cfg.T) << "\n";
    os << "steps=" << cfg.steps << "\n";
    os << "lambda=" << real(cfg.yosida_lambda) << "\n";
    os << "newton_tol=" << real(cfg.newton_tol) << "\n";
    os << "newton_max_iter=" << cfg.newton_max_iter << "\n";
    os << "truncation=" << cfg.truncation << "\n";
    os << "[experiment]\n";
    auto list = [&os, &real](const char* key, const auto& xs) {
        os << key << "=";
        for (size_t i = 0; i < xs.size(); ++i) {
            if (i) os << ",";
            if constexpr (std::is_same_v<std::decay_t<decltype(xs[i])>, double>)
                os << real(xs[i]);
            else
                os << xs[i];
        }
        os << "\n";
    };
    list("p_list", cfg.p_list);
    list("scales", cfg.scales);
    list("deltas", cfg.deltas);
    list("mesh_sizes", cfg.mesh_sizes);
    list("fn_ladder", cfg.fn_ladder);
    os << "samples=" << cfg.samples << "\n";
    os << "t_long=" << real(cfg.t_long) << "\n";
    os << "burn_in=" << real(cfg.burn_in) << "\n";
    if (include_run_section) {
        os << "[run]\n";
        os << "seed=" << cfg.seed << "\n";
        os << "out=" << cfg.out_dir << "\n";
    }
    return os.str();
}

// The hash identifies the mathematical run setup; seed and output
// directory are recorded separately so re-running elsewhere or re-seeding
// stays traceable to the same configuration.
std::string config_hash(const RunConfig& cfg) {
    const std::string canon = canonical_config(cfg, false);
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Model build_model_for_mesh(const RunConfig& cfg, int mesh_n) {
    Model m;
    m.mesh = Mesh(mesh_n);
    m.graph = MonotoneGraph::parse(cfg.graph_id);
    m.op = EllipticOperator::dirichlet_laplacian(m.mesh, cfg.operator_scale);
    m.noise = DiffusionCoefficient(parse_noise_kind(cfg.noise_kind), m.mesh, cfg.k_modes,
                                   cfg.noise_decay, cfg.noise_scale, cfg.noise_offset);
    return m;
}

Model build_model(const RunConfig& cfg) { return build_model_for_mesh(cfg, cfg.mesh_n); }

SolverConfig build_solver_config(const RunConfig& cfg) {
    SolverConfig sc;
    sc.h_time = cfg.T / cfg.steps;
    sc.yosida_lambda = cfg.yosida_lambda;
    sc.newton_tol = cfg.newton_tol;
    sc.newton_max_iter = cfg.newton_max_iter;
    const std::string& tr = cfg.truncation;
    if (tr == "none") {
        sc.truncation.mode = TruncationMode::None;
    } else if (tr.starts_with("fixed:")) {
        sc.truncation.mode = TruncationMode::Fixed;
        sc.truncation.fixed_radius = to_real("solver.truncation", tr.substr(6));
    } else if (tr.starts_with("adaptive:")) {
        sc.truncation.mode = TruncationMode::Adaptive;
        const std::string rest = tr.substr(9);
        const auto comma = rest.find(',');
        if (comma == std::string::npos)
            throw ConfigError("truncation 'adaptive:' needs n0,nmax");
        sc.truncation.start_level = to_int("solver.truncation", rest.substr(0, comma));
        sc.truncation.max_level = to_int("solver.truncation", rest.substr(comma + 1));
    } else {
        throw ConfigError("unknown truncation policy: " + tr);
    }
    sc.validate();
    return sc;
}

} // namespace mspde
