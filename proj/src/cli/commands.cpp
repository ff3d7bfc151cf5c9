#include "fermi/cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include <fmt/format.h>

#include "fermi/csv.hpp"
#include "fermi/digest.hpp"

namespace fermi::cli {

namespace {

std::ostream& log_stream(const Context& ctx) { return ctx.log ? *ctx.log : std::cerr; }

Json discretization_json(const RunConfig& cfg, const TimeGrid& grid) {
    Json j;
    j["modes_nominal"] = cfg.disc.modes;
    j["mode_count"] = cfg.mode_count();
    j["omega_max"] = cfg.disc.omega_max;
    j["box_length"] = cfg.disc.box_length;
    j["dk"] = cfg.dk;
    j["n_max"] = cfg.disc.n_max;
    j["cutoff"] = to_string(cfg.disc.cutoff);
    j["omega_c"] = cfg.disc.omega_c;
    j["dimension"] = FockBasis::predicted_dimension(cfg.mode_count(), cfg.disc.n_max);
    j["t_max"] = grid.t_max;
    j["steps"] = grid.steps;
    return j;
}

void describe(CsvTable& t, const RunConfig& cfg, const TimeGrid& grid) {
    t.meta("separation", cfg.params.separation());
    t.meta("k_a", cfg.params.k_a);
    t.meta("k_b", cfg.params.k_b);
    t.meta("omega_a", cfg.params.omega_a);
    t.meta("omega_b", cfg.params.omega_b);
    t.meta("mode_count", static_cast<double>(cfg.mode_count()));
    t.meta("omega_max", cfg.disc.omega_max);
    t.meta("box_length", cfg.disc.box_length);
    t.meta("n_max", static_cast<double>(cfg.disc.n_max));
    t.meta("cutoff", to_string(cfg.disc.cutoff));
    if (cfg.disc.cutoff == CutoffKind::Exponential) t.meta("omega_c", cfg.disc.omega_c);
    t.meta("t_max", grid.t_max);
    t.meta("steps", static_cast<double>(grid.steps));
    t.meta("units", "hbar = v = 1, times in 1/Omega_A");
}

void add_si_time(CsvTable& t, const AppConfig& cfg, const std::vector<double>& times) {
    if (!cfg.units) return;
    std::vector<double> s(times.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = cfg.units->to_seconds(times[i]);
    t.column("t_s", std::move(s));
}

EvolveOptions evolve_options(const RunSection& run) {
    EvolveOptions eo;
    eo.tol = run.tol;
    eo.store_snapshots = false;
    return eo;
}

std::string fmt_num(double x) { return fmt::format("{:.6g}", x); }

}  // namespace

Products produce_simulate(const AppConfig& cfg) {
    const RunConfig& model = cfg.require_model();
    const RunSection& run = cfg.require_run();
    SimulationOptions so;
    so.evolve = evolve_options(run);
    so.initial = run.initial;
    so.density_cells = run.density_cells;
    so.hamiltonian.rwa = run.rwa;
    const ObservableSeries s = simulate(model, run.grid, so);

    Products out;
    out.discretization = discretization_json(model, run.grid);
    CsvTable t;
    describe(t, model, run.grid);
    t.meta("initial_state", run.initial == InitialKind::ExcitedAGroundB ? "eA_gB_vacuum" : "gA_gB_vacuum");
    t.meta("rwa", run.rwa ? "true" : "false");
    t.column("t", s.times);
    add_si_time(t, cfg, s.times);
    t.column("p_ea", s.p_ea);
    t.column("p_eb", s.p_eb);
    t.column("p_eb_ga", s.p_eb_ga);
    t.column("photons", s.photons);
    t.column("norm_drift", s.norm_drift);
    out.files.push_back({"observables.csv", t.str()});

    if (!s.density.empty()) {
        CsvTable d;
        describe(d, model, run.grid);
        std::string edges;
        for (double e : s.cell_edges) edges += (edges.empty() ? "" : " ") + format_number(e);
        d.meta("cell_edges", edges);
        d.column("t", s.times);
        const std::size_t cells = s.cell_edges.size() - 1;
        for (std::size_t c = 0; c < cells; ++c) {
            std::vector<double> col(s.density.size());
            for (std::size_t i = 0; i < col.size(); ++i) col[i] = s.density[i][c];
            d.column(fmt::format("cell_{}", c), std::move(col));
        }
        out.files.push_back({"density.csv", d.str()});
    }
    return out;
}

Products produce_causality(const AppConfig& cfg) {
    const RunConfig& model = cfg.require_model();
    const RunSection& run = cfg.require_run();
    CausalOptions co;
    co.initial_a = cfg.causality.initial_a;
    co.evolve = evolve_options(run);
    co.hamiltonian.rwa = run.rwa;
    const CausalReport rep = run_differential(model, run.grid, co);
    std::optional<ConvergenceTable> conv;
    if (!cfg.causality.ladder.empty()) conv = convergence_scan(model, run.grid, cfg.causality.ladder, co);

    Products out;
    out.discretization = discretization_json(model, run.grid);
    CsvTable t;
    describe(t, model, run.grid);
    t.meta("initial_a", to_string(co.initial_a));
    t.column("t", rep.times);
    add_si_time(t, cfg, rep.times);
    t.column("p_eb_full", rep.p_eb_full);
    t.column("p_eb_ref", rep.p_eb_ref);
    t.column("delta_p", rep.delta_p);
    out.files.push_back({"delta_p.csv", t.str()});

    const double r = model.params.separation() / model.params.v;
    const double dt = run.grid.dt();
    const auto& f = rep.front;
    std::string s = "Differential light-cone report\n\n";
    s += fmt::format("separation r          {}\n", fmt_num(model.params.separation()));
    s += fmt::format("light-travel time r/v {}\n", fmt_num(r));
    s += fmt::format("K_A, K_B              {}, {}\n", fmt_num(model.params.k_a), fmt_num(model.params.k_b));
    s += fmt::format("initial state of A    {}\n", to_string(co.initial_a));
    s += fmt::format("time step             {}\n", fmt_num(dt));
    s += fmt::format("pre-front residual    {}  (max |dP| for v t <= {} r)\n", fmt_num(f.residual), co.guard);
    s += fmt::format("post-front peak       {}  (max |dP| for r <= v t <= 2 r)\n", fmt_num(f.peak));
    s += fmt::format("residual / peak       {}\n", f.peak > 0.0 ? fmt_num(f.residual / f.peak) : std::string("n/a"));
    if (f.detected) {
        s += fmt::format("front time t*         {}  ({} grid points from r/v)\n", fmt_num(f.front_time),
                         fmt_num((f.front_time - r) / dt));
    } else {
        s += "front time t*         not detected\n";
    }
    if (f.rise_measured) {
        s += fmt::format("rise time (10-90%)    {}  [t10 {}, t90 {}, peak at {}]\n", fmt_num(f.rise_time),
                         fmt_num(f.t10), fmt_num(f.t90), fmt_num(f.rise_peak_time));
        if (cfg.units) s += fmt::format("rise time (SI)        {} s\n", fmt_num(cfg.units->to_seconds(f.rise_time)));
    }
    s += fmt::format("max norm drift        {}\n", fmt_num(rep.max_norm_drift));
    for (const auto& n : rep.notes) s += "note: " + n + "\n";

    if (conv) {
        CsvTable c;
        describe(c, model, run.grid);
        std::vector<double> cols[10];
        for (const auto& row : conv->rows) {
            cols[0].push_back(static_cast<double>(row.disc.modes));
            cols[1].push_back(static_cast<double>(row.mode_count));
            cols[2].push_back(row.disc.omega_max);
            cols[3].push_back(static_cast<double>(row.disc.n_max));
            cols[4].push_back(row.disc.box_length);
            cols[5].push_back(static_cast<double>(row.dimension));
            cols[6].push_back(row.residual);
            cols[7].push_back(row.peak);
            cols[8].push_back(row.relative);
            cols[9].push_back(row.ratio);
        }
        const char* names[10] = {"modes", "mode_count", "omega_max", "n_max", "box_length",
                                 "dimension", "residual", "peak", "relative", "ratio"};
        for (int i = 0; i < 10; ++i) c.column(names[i], std::move(cols[i]));
        c.meta("monotone", conv->monotone ? "true" : "false");
        c.meta("extrapolated_residual", conv->extrapolated);
        out.files.push_back({"convergence.csv", c.str()});

        s += "\nConvergence ladder\n";
        for (const auto& row : conv->rows) {
            s += fmt::format("  M {:>5}  omega_max {:>6}  n_max {}  L {:<10}  residual {:<12} ratio {}\n",
                             row.disc.modes, fmt_num(row.disc.omega_max), row.disc.n_max, fmt_num(row.disc.box_length),
                             fmt_num(row.residual), fmt_num(row.ratio));
        }
        s += fmt::format("  monotone {}  extrapolated residual {}\n", conv->monotone ? "yes" : "no",
                         fmt_num(conv->extrapolated));
        for (const auto& w : conv->warnings) s += "  warning: " + w + "\n";
    }
    out.files.push_back({"report.txt", s});
    return out;
}

Products produce_perturb(const AppConfig& cfg) {
    const RunConfig& model = cfg.require_model();
    const RunSection& run = cfg.require_run();
    const ProbabilityCurves c = prob_curves(model, run.grid, cfg.perturbation);
    Products out;
    out.discretization = discretization_json(model, run.grid);
    CsvTable t;
    describe(t, model, run.grid);
    t.meta("vertex_phase", cfg.perturbation.vertex_phase);
    t.meta("include_pair_term", cfg.perturbation.include_pair_term ? "true" : "false");
    t.meta("omit_interference", cfg.perturbation.omit_interference ? "true" : "false");
    t.column("t", c.times);
    add_si_time(t, cfg, c.times);
    t.column("m1_sq", c.m1_sq);
    t.column("x_sq", c.x_sq);
    t.column("pair_exchange", c.pair_exchange);
    t.column("interference", c.interference);
    t.column("p_r_eb_ga", c.p_r_eb_ga);
    t.column("p_r_eb", c.p_r_eb);
    out.files.push_back({"curves.csv", t.str()});
    return out;
}

Products produce_design(const AppConfig& cfg) {
    const DesignInput in = cfg.design.value_or(DesignInput{});
    const FeasibilityReport rep = feasibility_report(in);
    Products out;
    out.discretization = nullptr;
    out.files.push_back({"feasibility.txt", rep.text()});
    out.files.push_back({"feasibility.kv", rep.key_values()});
    return out;
}

namespace {

Products produce(const std::string& command, const AppConfig& cfg) {
    if (command == "simulate") return produce_simulate(cfg);
    if (command == "causality") return produce_causality(cfg);
    if (command == "perturb") return produce_perturb(cfg);
    if (command == "design") return produce_design(cfg);
    throw ValidationError("command", fmt::format("unknown command '{}'", command));
}

struct Outcome {
    int code = kOk;
    std::string error;
    Products products;
};

// Parses and runs without touching the filesystem.
Outcome attempt(const std::string& command, const Json& doc) {
    Outcome o;
    try {
        const AppConfig cfg = parse_config(doc);
        o.products = produce(command, cfg);
    } catch (const ValidationError& e) {
        o.code = kConfigError;
        for (const auto& i : e.issues()) o.error += fmt::format("config error: {}: {}\n", i.field, i.message);
    } catch (const IncompleteDesign& e) {
        o.code = kConfigError;
        for (const auto& m : e.missing()) o.error += fmt::format("config error: {}: is required\n", m);
    } catch (const std::exception& e) {
        o.code = kRuntimeFailure;
        o.error = fmt::format("runtime failure: {}\n", e.what());
    }
    return o;
}

int run_sweep(const Json& doc, const Context& ctx) {
    std::ostream& log = log_stream(ctx);
    AppConfig cfg;
    try {
        cfg = parse_config(doc);
        if (!cfg.sweep) throw ValidationError("sweep", "the sweep command needs a sweep section");
    } catch (const ValidationError& e) {
        for (const auto& i : e.issues()) log << fmt::format("config error: {}: {}\n", i.field, i.message);
        return kConfigError;
    }
    const SweepSection& sweep = *cfg.sweep;
    const std::vector<Json> points = expand_sweep(doc, sweep);
    const std::string started = utc_now();

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), 0);
    if (ctx.shuffle_seed) {
        std::mt19937_64 rng(*ctx.shuffle_seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    std::vector<int> codes(points.size(), kOk);
    std::vector<std::string> digests(points.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;
    std::exception_ptr io_failure;

    auto worker = [&] {
        for (std::size_t slot = next++; slot < order.size(); slot = next++) {
            const std::size_t i = order[slot];
            const std::string p_start = utc_now();
            Outcome o = attempt(sweep.command, points[i]);
            codes[i] = o.code;
            digests[i] = sha256_hex(canonical_dump(points[i]));
            ManifestFields mf;
            mf.command = sweep.command;
            mf.config = points[i];
            mf.discretization = o.products.discretization;
            mf.started = p_start;
            mf.finished = utc_now();
            if (o.code != kOk) {
                mf.status = "failed";
                mf.error = o.error;
                o.products.files = {{"error.txt", o.error}};
            }
            try {
                write_output_set(ctx.out / fmt::format("point_{:04d}", i), o.products.files,
                                 make_manifest(mf, o.products.files));
            } catch (...) {
                std::lock_guard lock(log_mutex);
                if (!io_failure) io_failure = std::current_exception();
            }
            std::lock_guard lock(log_mutex);
            if (o.code != kOk) log << fmt::format("point {} failed:\n{}", i, o.error);
            if (ctx.verbose) log << fmt::format("point {} done (exit {})\n", i, o.code);
        }
    };
    std::filesystem::create_directories(ctx.out);
    const unsigned jobs = std::max(1u, std::min<unsigned>(ctx.jobs, static_cast<unsigned>(points.size())));
    std::vector<std::thread> pool;
    for (unsigned j = 0; j + 1 < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (io_failure) std::rethrow_exception(io_failure);

    std::string index = "point";
    for (const auto& a : sweep.axes) {
        if (!a.values.empty()) index += "," + a.path;
    }
    index += ",status,exit_code,config_digest\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        index += fmt::format("{:04d}", i);
        for (const auto& a : sweep.axes) {
            if (a.values.empty()) continue;
            const Json* cur = &points[i];
            std::size_t pos = 0;
            while (true) {
                const std::size_t dot = a.path.find('.', pos);
                cur = &cur->at(a.path.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos));
                if (dot == std::string::npos) break;
                pos = dot + 1;
            }
            index += "," + format_number(parse_scalar(*cur, a.path));
        }
        index += fmt::format(",{},{},{}\n", codes[i] == kOk ? "ok" : "failed", codes[i], digests[i]);
    }
    const std::vector<OutputFile> files{{"index.csv", index}};
    ManifestFields mf;
    mf.command = "sweep";
    mf.config = doc;
    mf.discretization = nullptr;
    mf.started = started;
    mf.finished = utc_now();
    const bool any_failed = std::any_of(codes.begin(), codes.end(), [](int c) { return c != kOk; });
    if (any_failed) mf.status = "partial";
    write_output_set(ctx.out, files, make_manifest(mf, files));
    return any_failed ? kPartialFailure : kOk;
}

}  // namespace

int run_command(const std::string& command, const Json& doc, const Context& ctx) {
    std::ostream& log = log_stream(ctx);
    try {
        if (command == "sweep") return run_sweep(doc, ctx);
        const std::string started = utc_now();
        if (ctx.verbose) log << fmt::format("{}: starting\n", command);
        Outcome o = attempt(command, doc);
        if (o.code != kOk) {
            log << o.error;
            return o.code;
        }
        ManifestFields mf;
        mf.command = command;
        mf.config = doc;
        mf.discretization = o.products.discretization;
        mf.started = started;
        mf.finished = utc_now();
        write_output_set(ctx.out, o.products.files, make_manifest(mf, o.products.files));
        if (ctx.verbose) {
            for (const auto& f : o.products.files) log << fmt::format("wrote {}\n", (ctx.out / f.name).string());
        }
        return kOk;
    } catch (const std::exception& e) {
        log << fmt::format("runtime failure: {}\n", e.what());
        return kRuntimeFailure;
    }
}

int run_command_file(const std::string& command, const std::string& config_path, const Context& ctx) {
    std::ifstream is(config_path);
    if (!is) {
        log_stream(ctx) << fmt::format("config error: config: cannot read '{}'\n", config_path);
        return kConfigError;
    }
    Json doc;
    try {
        doc = Json::parse(is);
    } catch (const Json::parse_error& e) {
        log_stream(ctx) << fmt::format("config error: config: '{}' is not valid JSON: {}\n", config_path, e.what());
        return kConfigError;
    }
    return run_command(command, doc, ctx);
}

}  // namespace fermi::cli
