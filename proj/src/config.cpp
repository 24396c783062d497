#include "helmdd/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace helmdd {

namespace pt = boost::property_tree;

std::optional<FilterStrategy> CoarseConfig::filter() const {
    if (strategy == "none") {
        return std::nullopt;
    }
    if (strategy == "tau") {
        return FilterStrategy::tau(value);
    }
    if (strategy == "count") {
        return FilterStrategy::count(static_cast<int>(value));
    }
    if (strategy == "percent") {
        return FilterStrategy::percent(value);
    }
    throw ConfigError("unknown coarse strategy '" + strategy + "'");
}

double parse_angular(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            s += c;
        }
    }
    double factor = 1.0;
    if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
        factor = std::numbers::pi;
        s.resize(s.size() - 2);
        if (!s.empty() && s.back() == '*') {
            s.pop_back();
        }
        if (s.empty()) {
            return factor;
        }
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) {
            throw ConfigError("malformed number '" + text + "'");
        }
        return v * factor;
    } catch (const std::logic_error&) {
        throw ConfigError("malformed number '" + text + "'");
    }
}

namespace {

std::vector<std::string> split_words(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w) {
        out.push_back(w);
    }
    return out;
}

double to_real(const std::string& s) { return parse_angular(s); }

int to_int(const std::string& s) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) {
            throw ConfigError("malformed integer '" + s + "'");
        }
        return v;
    } catch (const std::logic_error&) {
        throw ConfigError("malformed integer '" + s + "'");
    }
}

bool to_bool(const std::string& s) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw ConfigError("malformed boolean '" + s + "'");
}

Complex to_complex(const std::string& s) {
    const auto w = split_words(s);
    if (w.size() == 1) return {to_real(w[0]), 0.0};
    if (w.size() == 2) return {to_real(w[0]), to_real(w[1])};
    throw ConfigError("complex value must be 're' or 're im', got '" + s + "'");
}

class Section {
public:
    Section(const pt::ptree& tree, std::string name) : name_(std::move(name)) {
        if (auto child = tree.get_child_optional(name_)) {
            node_ = *child;
        }
        for (const auto& kv : node_) {
            unused_.insert(kv.first);
        }
    }

    std::optional<std::string> get(const std::string& key) {
        unused_.erase(key);
        if (auto v = node_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
            return *v;
        }
        return std::nullopt;
    }

    void finish() const {
        if (!unused_.empty()) {
            throw ConfigError("unknown key '" + *unused_.begin() + "' in [" + name_ + "]");
        }
    }

private:
    std::string name_;
    pt::ptree node_;
    std::set<std::string> unused_;
};

} // namespace

void ExperimentConfig::validate() const {
    const ProblemConfig& p = problem;
    if (p.nx < 1 || p.ny < 1) throw ConfigError("nx and ny must be positive");
    if (!(p.bounds.xmax > p.bounds.xmin) || !(p.bounds.ymax > p.bounds.ymin))
        throw ConfigError("degenerate bounds");
    if (!(p.omega > 0.0)) throw ConfigError("omega must be positive");
    if (p.medium != "constant" && p.medium != "layers" && p.medium != "wedge" && p.medium != "file")
        throw ConfigError("unknown medium '" + p.medium + "'");
    if (p.medium == "file" && p.medium_file.empty())
        throw ConfigError("medium = file needs medium_file");
    if (p.source_width < 0.0) throw ConfigError("source_width must be nonnegative");
    const DecompositionConfig& d = decomposition;
    if (d.jx < 1 || d.jy < 1) throw ConfigError("jx and jy must be positive");
    if (d.jx > p.nx || d.jy > p.ny) throw ConfigError("more subdomains than elements per axis");
    if (d.overlap < 1) throw ConfigError("overlap must be at least 1");
    if (d.oversample < 1) throw ConfigError("oversample must be at least 1");
    if (auto f = coarse.filter()) {
        if (f->kind == FilterStrategy::Kind::Tau && !(f->value > 0.0))
            throw ConfigError("tau must be positive");
        if (f->kind == FilterStrategy::Kind::Count && f->value < 0.0)
            throw ConfigError("count must be nonnegative");
        if (f->kind == FilterStrategy::Kind::Percent && (!(f->value > 0.0) || f->value > 100.0))
            throw ConfigError("percent must lie in (0, 100]");
    }
    if (solver.mode != "gmres" && solver.mode != "stationary")
        throw ConfigError("solver mode must be gmres or stationary");
    if (!(solver.tol > 0.0)) throw ConfigError("tol must be positive");
    if (solver.maxit < 0) throw ConfigError("maxit must be nonnegative");
    if (solver.restart < 1) throw ConfigError("restart must be positive");
    if (solver.initial != "zero" && solver.initial != "random")
        throw ConfigError("initial must be zero or random");
    if (solver.threads < 1) throw ConfigError("threads must be positive");
    if (analysis.iterations < 1) throw ConfigError("analysis iterations must be positive");
    for (const RampPoint& rp : ramp.points) {
        if (!(rp.omega > 0.0) || rp.nx < 1 || rp.ny < 1 || rp.jx < 1 || rp.jy < 1 ||
            rp.jx > rp.nx || rp.jy > rp.ny)
            throw ConfigError("invalid ramp point");
    }
    for (double pc : ramp.coarse_percents) {
        if (!(pc > 0.0) || pc > 100.0) throw ConfigError("ramp percents must lie in (0, 100]");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw IngestError(e.message(), static_cast<int>(e.line()));
    }
    static const std::set<std::string> known = {"problem", "decomposition", "coarse", "solver",
                                                "analysis", "output", "ramp"};
    for (const auto& kv : tree) {
        if (!known.count(kv.first)) {
            throw ConfigError("unknown section [" + kv.first + "]");
        }
    }

    ExperimentConfig cfg;
    {
        Section s(tree, "problem");
        ProblemConfig& p = cfg.problem;
        if (auto v = s.get("nx")) p.nx = to_int(*v);
        if (auto v = s.get("ny")) p.ny = to_int(*v);
        if (auto v = s.get("bounds")) {
            const auto w = split_words(*v);
            if (w.size() != 4) throw ConfigError("bounds needs 'xmin xmax ymin ymax'");
            p.bounds = {to_real(w[0]), to_real(w[1]), to_real(w[2]), to_real(w[3])};
        }
        if (auto v = s.get("omega")) p.omega = parse_angular(*v);
        if (auto v = s.get("medium")) p.medium = *v;
        if (auto v = s.get("medium_file")) p.medium_file = *v;
        if (auto v = s.get("bands")) p.medium_params.bands = to_int(*v);
        if (auto v = s.get("contrast")) p.medium_params.contrast = to_real(*v);
        if (auto v = s.get("source_center")) {
            const auto w = split_words(*v);
            if (w.size() != 2) throw ConfigError("source_center needs 'x y'");
            p.source_center = Point{to_real(w[0]), to_real(w[1])};
        }
        if (auto v = s.get("source_width")) p.source_width = to_real(*v);
        if (auto v = s.get("source_amplitude")) p.source_amplitude = to_complex(*v);
        if (auto v = s.get("boundary_g")) p.boundary_g = to_complex(*v);
        s.finish();
    }
    {
        Section s(tree, "decomposition");
        DecompositionConfig& d = cfg.decomposition;
        if (auto v = s.get("jx")) d.jx = to_int(*v);
        if (auto v = s.get("jy")) d.jy = to_int(*v);
        if (auto v = s.get("overlap")) d.overlap = to_int(*v);
        if (auto v = s.get("oversample")) d.oversample = to_int(*v);
        s.finish();
    }
    {
        Section s(tree, "coarse");
        if (auto v = s.get("strategy")) cfg.coarse.strategy = *v;
        if (auto v = s.get("value")) cfg.coarse.value = to_real(*v);
        s.finish();
    }
    {
        Section s(tree, "solver");
        SolverConfig& o = cfg.solver;
        if (auto v = s.get("mode")) o.mode = *v;
        if (auto v = s.get("tol")) o.tol = to_real(*v);
        if (auto v = s.get("maxit")) o.maxit = to_int(*v);
        if (auto v = s.get("restart")) o.restart = to_int(*v);
        if (auto v = s.get("seed")) o.seed = static_cast<std::uint64_t>(std::stoull(*v));
        if (auto v = s.get("initial")) o.initial = *v;
        if (auto v = s.get("threads")) o.threads = to_int(*v);
        if (auto v = s.get("reference")) o.reference = to_bool(*v);
        s.finish();
    }
    {
        Section s(tree, "analysis");
        if (auto v = s.get("enabled")) cfg.analysis.enabled = to_bool(*v);
        if (auto v = s.get("iterations")) cfg.analysis.iterations = to_int(*v);
        s.finish();
    }
    {
        Section s(tree, "output");
        if (auto v = s.get("directory")) cfg.output.directory = *v;
        if (auto v = s.get("record_times")) cfg.output.record_times = to_bool(*v);
        if (auto v = s.get("dump_matrices")) cfg.output.dump_matrices = to_bool(*v);
        s.finish();
    }
    {
        Section s(tree, "ramp");
        if (auto v = s.get("points")) {
            std::istringstream list(*v);
            std::string item;
            while (std::getline(list, item, ';')) {
                const auto w = split_words(item);
                if (w.empty()) continue;
                if (w.size() != 5) throw ConfigError("ramp point needs 'omega nx ny jx jy'");
                cfg.ramp.points.push_back(
                    {parse_angular(w[0]), to_int(w[1]), to_int(w[2]), to_int(w[3]), to_int(w[4])});
            }
        }
        if (auto v = s.get("coarse_percents")) {
            for (const auto& w : split_words(*v)) {
                cfg.ramp.coarse_percents.push_back(to_real(w));
            }
        }
        s.finish();
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config '" + path.string() + "'");
    }
    ExperimentConfig cfg = parse_config(in);
    // medium files are looked up next to the config
    if (!cfg.problem.medium_file.empty() && std::filesystem::path(cfg.problem.medium_file).is_relative()) {
        cfg.problem.medium_file = (path.parent_path() / cfg.problem.medium_file).string();
    }
    return cfg;
}

} // namespace helmdd
