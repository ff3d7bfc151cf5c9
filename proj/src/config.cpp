#include "fermi/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <regex>
#include <set>

#include <fmt/format.h>

namespace fermi {

namespace {

// Typed, strict access to one JSON object; problems accumulate in `issues`.
class Section {
public:
    Section(const Json* j, std::string name, std::vector<Issue>& issues, std::set<std::string> allowed)
        : j_(j), name_(std::move(name)), issues_(&issues) {
        if (!j_) return;
        if (!j_->is_object()) {
            fail("", "must be an object");
            j_ = nullptr;
            return;
        }
        for (const auto& [key, value] : j_->items()) {
            if (!allowed.count(key)) fail(key, "unknown key");
        }
    }

    bool present() const { return j_ != nullptr; }
    bool has(const std::string& key) const { return j_ && j_->contains(key); }
    const Json* child(const std::string& key) const { return has(key) ? &j_->at(key) : nullptr; }
    std::string path(const std::string& key) const { return key.empty() ? name_ : name_ + "." + key; }

    void fail(const std::string& key, std::string message) const { issues_->push_back({path(key), std::move(message)}); }

    std::optional<double> number(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        try {
            return parse_scalar(j_->at(key), path(key));
        } catch (const ValidationError& e) {
            for (const auto& i : e.issues()) issues_->push_back(i);
            return std::nullopt;
        }
    }

    double number_or(const std::string& key, double fallback) const { return number(key).value_or(fallback); }

    std::optional<std::size_t> count(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        const Json& v = j_->at(key);
        if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
            return v.get<std::size_t>();
        }
        fail(key, "must be a non-negative integer");
        return std::nullopt;
    }

    std::optional<std::string> text(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        if (!j_->at(key).is_string()) {
            fail(key, "must be a string");
            return std::nullopt;
        }
        return j_->at(key).get<std::string>();
    }

    std::optional<bool> flag(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        if (!j_->at(key).is_boolean()) {
            fail(key, "must be true or false");
            return std::nullopt;
        }
        return j_->at(key).get<bool>();
    }

    void exclusive(const std::string& a, const std::string& b) const {
        if (has(a) && has(b)) fail(b, fmt::format("give either {} or {}, not both", a, b));
    }

private:
    const Json* j_;
    std::string name_;
    std::vector<Issue>* issues_;
};

template <typename F>
auto capture(std::vector<Issue>& issues, F&& f) -> std::optional<decltype(f())> {
    try {
        return f();
    } catch (const ValidationError& e) {
        for (const auto& i : e.issues()) issues.push_back(i);
        return std::nullopt;
    }
}

const Json* member(const Json& doc, const char* key) { return doc.contains(key) ? &doc.at(key) : nullptr; }

// Discretization fields shared by the field section and ladder rungs.
Discretization read_discretization(const Section& s, const Discretization& base, double separation, bool rung) {
    Discretization d = base;
    s.exclusive("box_length", "box_factor");
    if (auto m = s.count("modes")) d.modes = *m;
    if (auto w = s.number("omega_max")) {
        // a rung that rescales omega_max keeps the soft-cutoff ratio unless omega_c is given
        if (rung && base.omega_max > 0.0) d.omega_c = base.omega_c * *w / base.omega_max;
        d.omega_max = *w;
    }
    if (auto n = s.count("n_max")) d.n_max = *n;
    if (auto c = s.text("cutoff")) {
        try {
            d.cutoff = cutoff_from_string(*c);
        } catch (const ValidationError&) {
            s.fail("cutoff", fmt::format("unknown cutoff '{}' (sharp, exponential)", *c));
        }
    }
    if (auto c = s.number("omega_c")) d.omega_c = *c;
    if (auto l = s.number("box_length")) {
        d.box_length = *l;
    } else if (auto f = s.number("box_factor")) {
        d.box_length = *f * separation;
    } else if (!rung) {
        d.box_length = 8.0 * separation;
    }
    return d;
}

std::optional<double> read_required(const Section& s, const std::string& key) {
    if (!s.has(key)) {
        s.fail(key, "is required");
        return std::nullopt;
    }
    return s.number(key);
}

QubitDesign read_qubit_design(const Section& s) {
    QubitDesign q;
    q.persistent_current_a = s.number("persistent_current_a");
    q.gap_hz = s.number("gap_hz");
    q.flux_offset_wb = s.number("flux_offset_wb");
    q.ramp_wb_per_s = s.number("ramp_wb_per_s");
    q.coupling_hz = s.number("coupling_hz");
    return q;
}

const std::set<std::string> kQubitDesignKeys{"persistent_current_a", "gap_hz", "flux_offset_wb", "ramp_wb_per_s",
                                             "coupling_hz"};
const std::set<std::string> kDiscKeys{"modes", "omega_max", "n_max", "cutoff", "omega_c", "box_length", "box_factor"};

}  // namespace

double parse_scalar(const Json& value, const std::string& field) {
    if (value.is_number()) {
        const double x = value.get<double>();
        if (!std::isfinite(x)) throw ValidationError(field, "must be finite");
        return x;
    }
    if (value.is_string()) {
        static const std::regex re(
            R"(^\s*([+-]?(?:[0-9]+\.?[0-9]*|\.[0-9]+)(?:[eE][+-]?[0-9]+)?)?\s*\*?\s*pi\s*(?:/\s*([0-9]+\.?[0-9]*))?\s*$)");
        std::smatch m;
        const std::string s = value.get<std::string>();
        if (std::regex_match(s, m, re)) {
            double x = std::numbers::pi;
            if (m[1].matched) x *= std::stod(m[1].str());
            if (m[2].matched) {
                const double d = std::stod(m[2].str());
                if (d == 0.0) throw ValidationError(field, "division by zero");
                x /= d;
            }
            return x;
        }
        throw ValidationError(field, fmt::format("cannot read '{}' as a number or multiple of pi", s));
    }
    throw ValidationError(field, "must be a number");
}

const RunConfig& AppConfig::require_model() const {
    if (!model) throw ValidationError("qubits", "this command needs the qubits section");
    return *model;
}

const RunSection& AppConfig::require_run() const {
    if (!run) throw ValidationError("qubits", "this command needs the qubits section");
    return *run;
}

AppConfig parse_config(const Json& doc) {
    std::vector<Issue> issues;
    AppConfig out;
    out.canonical = doc;
    const Section top(&doc, "config", issues,
                      {"schema_version", "qubits", "field", "run", "units", "causality", "perturbation", "design",
                       "sweep", "description"});
    if (!top.present()) throw ValidationError(std::move(issues));
    if (auto v = top.count("schema_version"); v && *v != static_cast<std::size_t>(kSchemaVersion)) {
        top.fail("schema_version", fmt::format("unsupported version {}, expected {}", *v, kSchemaVersion));
    }
    if (top.has("description") && !doc.at("description").is_string()) top.fail("description", "must be a string");

    const Section qubits(member(doc, "qubits"), "qubits", issues, {"omega_a", "omega_b", "k_a", "k_b", "x_a", "separation"});
    const Section field(member(doc, "field"), "field", issues, kDiscKeys);
    const Section run(member(doc, "run"), "run", issues,
                      {"t_max", "t_max_factor", "steps", "dt", "tol", "initial_state", "density_cells", "rwa"});

    if (qubits.present()) {
        ModelParams p;
        p.omega_a = qubits.number_or("omega_a", 1.0);
        p.omega_b = qubits.number_or("omega_b", p.omega_a);
        p.k_a = read_required(qubits, "k_a").value_or(0.0);
        p.k_b = read_required(qubits, "k_b").value_or(0.0);
        p.x_a = qubits.number_or("x_a", 0.0);
        const double sep = read_required(qubits, "separation").value_or(1.0);
        p.x_b = p.x_a + sep;

        run.exclusive("t_max", "t_max_factor");
        run.exclusive("steps", "dt");
        const double t_max = run.has("t_max") ? run.number_or("t_max", 1.0) : run.number_or("t_max_factor", 2.0) * sep;

        Discretization base;
        base.t_max = t_max;
        Discretization disc = read_discretization(field, base, sep, false);

        RunSection rs;
        rs.grid.t_max = t_max;
        if (auto n = run.count("steps")) {
            rs.grid.steps = *n;
        } else if (auto dt = run.number("dt")) {
            if (*dt > 0.0) {
                rs.grid.steps = static_cast<std::size_t>(std::ceil(t_max / *dt - 1e-9));
            } else {
                run.fail("dt", "must be positive");
            }
        } else {
            const double omega = std::max(p.omega_a, p.omega_b);
            rs.grid.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(20.0 * omega * t_max - 1e-9)));
        }
        rs.tol = run.number_or("tol", 1e-10);
        if (!(rs.tol > 0.0)) run.fail("tol", "must be positive");
        if (auto s = run.text("initial_state")) {
            if (auto k = capture(issues, [&] { return initial_kind_from_string(*s); })) rs.initial = *k;
        }
        rs.density_cells = run.count("density_cells").value_or(0);
        rs.rwa = run.flag("rwa").value_or(false);

        const std::size_t before = issues.size();
        if (auto cfg = capture(issues, [&] { return validate(p, disc); })) {
            out.model = std::move(*cfg);
            if (issues.size() == before) capture(issues, [&] { check_grid(rs.grid, out.model->disc); return 0; });
        }
        out.run = rs;
    } else {
        if (field.present()) top.fail("field", "needs the qubits section");
        if (run.present()) top.fail("run", "needs the qubits section");
    }

    const Section units(member(doc, "units"), "units", issues, {"freq_a_hz", "speed_m_per_s"});
    if (units.present()) {
        UnitScale u;
        const double f = read_required(units, "freq_a_hz").value_or(1.0);
        if (!(f > 0.0)) units.fail("freq_a_hz", "must be positive");
        u.omega_ref = 2.0 * std::numbers::pi * f;
        u.time_unit_s = 1.0 / u.omega_ref;
        const double c = units.number_or("speed_m_per_s", 0.0);
        if (c < 0.0) units.fail("speed_m_per_s", "must be positive");
        u.length_unit_m = c / u.omega_ref;
        out.units = u;
    }

    const Section caus(member(doc, "causality"), "causality", issues, {"initial_a", "ladder"});
    if (auto s = caus.text("initial_a")) {
        if (auto a = capture(issues, [&] { return initial_a_from_string(*s); })) out.causality.initial_a = *a;
    }
    if (const Json* ladder = caus.child("ladder")) {
        if (!ladder->is_array()) {
            caus.fail("ladder", "must be an array of discretizations");
        } else if (!out.model) {
            caus.fail("ladder", "needs the qubits section");
        } else {
            for (std::size_t i = 0; i < ladder->size(); ++i) {
                const Section rung(&ladder->at(i), fmt::format("causality.ladder[{}]", i), issues, kDiscKeys);
                Discretization d = out.model->disc;
                d.box_length = out.model->disc.box_length;
                out.causality.ladder.push_back(read_discretization(rung, d, out.model->params.separation(), true));
            }
        }
    }

    const Section pert(member(doc, "perturbation"), "perturbation", issues,
                       {"vertex_phase", "include_pair_term", "omit_interference"});
    out.perturbation.vertex_phase = pert.number_or("vertex_phase", 0.0);
    out.perturbation.include_pair_term = pert.flag("include_pair_term").value_or(true);
    out.perturbation.omit_interference = pert.flag("omit_interference").value_or(false);

    const Section design(member(doc, "design"), "design", issues, {"temperature_k", "qubit_a", "qubit_b", "dressing"});
    {
        DesignInput in;
        in.temperature_k = design.number_or("temperature_k", 0.02);
        if (in.temperature_k < 0.0) design.fail("temperature_k", "must be non-negative");
        const Section qa(design.child("qubit_a"), "design.qubit_a", issues, kQubitDesignKeys);
        const Section qb(design.child("qubit_b"), "design.qubit_b", issues, kQubitDesignKeys);
        in.a = read_qubit_design(qa);
        in.b = read_qubit_design(qb);
        std::set<std::string> dkeys = kDiscKeys;
        dkeys.insert({"separation", "enabled"});
        const Section dr(design.child("dressing"), "design.dressing", issues, dkeys);
        in.separation = dr.number_or("separation", in.separation);
        in.compute_dressing = dr.flag("enabled").value_or(true);
        Discretization base = in.dressing;
        base.box_length = 0.0;
        in.dressing = read_discretization(dr, base, in.separation, true);
        out.design = in;
    }

    const Section sweep(member(doc, "sweep"), "sweep", issues, {"command", "axes"});
    if (sweep.present()) {
        SweepSection sw;
        sw.command = sweep.text("command").value_or("");
        static const std::set<std::string> commands{"simulate", "causality", "perturb", "design"};
        if (!commands.count(sw.command)) {
            sweep.fail("command", fmt::format("must be one of simulate, causality, perturb, design; got '{}'", sw.command));
        }
        if (const Json* axes = sweep.child("axes")) {
            if (!axes->is_array()) {
                sweep.fail("axes", "must be an array");
            } else {
                Json stripped = doc;
                stripped.erase("sweep");
                for (std::size_t i = 0; i < axes->size(); ++i) {
                    const std::string name = fmt::format("sweep.axes[{}]", i);
                    const Section ax(&axes->at(i), name, issues, {"path", "values"});
                    if (!ax.present()) continue;
                    SweepAxis axis;
                    axis.path = ax.text("path").value_or("");
                    const Json* vals = ax.child("values");
                    if (!vals || !vals->is_array()) {
                        ax.fail("values", "must be an array");
                        continue;
                    }
                    // the swept field must exist and be numeric in the base document
                    const Json* cur = &stripped;
                    std::size_t pos = 0;
                    bool ok = !axis.path.empty();
                    while (ok && pos <= axis.path.size()) {
                        const std::size_t dot = axis.path.find('.', pos);
                        const std::string key = axis.path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
                        if (!cur->is_object() || !cur->contains(key)) {
                            ok = false;
                            break;
                        }
                        cur = &cur->at(key);
                        if (dot == std::string::npos) break;
                        pos = dot + 1;
                    }
                    if (!ok) {
                        ax.fail("path", fmt::format("'{}' is not a field of this configuration", axis.path));
                        continue;
                    }
                    if (!capture(issues, [&] { return parse_scalar(*cur, name + ".path"); })) continue;
                    for (std::size_t k = 0; k < vals->size(); ++k) {
                        if (capture(issues, [&] { return parse_scalar(vals->at(k), fmt::format("{}.values[{}]", name, k)); })) {
                            axis.values.push_back(vals->at(k));
                        }
                    }
                    sw.axes.push_back(std::move(axis));
                }
            }
        }
        out.sweep = sw;
    }

    if (!issues.empty()) throw ValidationError(std::move(issues));
    return out;
}

AppConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("config", fmt::format("cannot read '{}'", path));
    Json doc;
    try {
        doc = Json::parse(is);
    } catch (const Json::parse_error& e) {
        throw ValidationError("config", fmt::format("'{}' is not valid JSON: {}", path, e.what()));
    }
    return parse_config(doc);
}

std::string canonical_dump(const Json& doc) { return doc.dump(); }

void set_path(Json& doc, const std::string& path, const Json& value) {
    Json* cur = &doc;
    std::size_t pos = 0;
    while (true) {
        const std::size_t dot = path.find('.', pos);
        const std::string key = path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (dot == std::string::npos) {
            (*cur)[key] = value;
            return;
        }
        cur = &(*cur)[key];
        pos = dot + 1;
    }
}

std::vector<Json> expand_sweep(const Json& doc, const SweepSection& sweep) {
    Json base = doc;
    base.erase("sweep");
    std::vector<Json> points{base};
    for (const auto& axis : sweep.axes) {
        if (axis.values.empty()) continue;
        std::vector<Json> next;
        next.reserve(points.size() * axis.values.size());
        for (const auto& p : points) {
            for (const auto& v : axis.values) {
                Json q = p;
                set_path(q, axis.path, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

}  // namespace fermi
