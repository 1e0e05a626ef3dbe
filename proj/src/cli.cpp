#include "csf/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "csf/export.hpp"
#include "csf/figures.hpp"
#include "csf/flow.hpp"
#include "csf/solvers.hpp"
#include "json.hpp"

namespace csf::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct OutputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Config {
    double A = 0.0;
    double B = 0.0;
    double x0 = 0.0;
    double y0 = 0.0;
    double span = 20.0;
    double tol = 1e-10;
    std::string format;
    std::string output;
    bool no_timestamp = false;
};

// What a command produced: curves to draw or tabulate plus a JSON summary.
struct Result {
    std::string name;  // default file stem
    json summary = json::object();
    std::vector<PlaneCurve> curves;
    const Trajectory* phase = nullptr;  // for the first curve, when it is a direct reconstruction
    Trajectory phase_storage;
};

json curve_json(const PlaneCurve& c, const Trajectory* phase) {
    std::ostringstream os;
    write_csv(os, c, phase);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    json cols = json::object();
    const char* names[] = {"s", "x", "y", "theta", "px", "py", "r", "phi"};
    for (const char* n : names) cols[n] = json::array();
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        std::string cell;
        for (const char* n : names) {
            std::getline(ls, cell, ',');
            cols[n].push_back(std::strtod(cell.c_str(), nullptr));
        }
    }
    return cols;
}

std::string render(const Result& r, const json& config, const Config& cfg) {
    json doc = {{"schema", kSchema}, {"config", config}};
    doc.update(r.summary);
    std::ostringstream os;
    if (cfg.format == "json") {
        if (!r.curves.empty()) {
            json curves = json::array();
            for (std::size_t i = 0; i < r.curves.size(); ++i)
                curves.push_back(curve_json(r.curves[i], i == 0 ? r.phase : nullptr));
            doc["curves"] = curves;
        }
        os << doc.dump(2) << '\n';
    } else if (cfg.format == "csv") {
        os << "# " << doc.dump() << '\n';
        for (std::size_t i = 0; i < r.curves.size(); ++i) {
            if (i) os << '\n';
            write_csv(os, r.curves[i], i == 0 ? r.phase : nullptr);
        }
    } else {
        SvgOptions o;
        o.timestamp = !cfg.no_timestamp;
        o.metadata = doc.dump();
        write_svg(os, r.curves, o);
    }
    return os.str();
}

void emit(const std::string& text, const std::string& stem, const Config& cfg, std::ostream& out) {
    const char* env = std::getenv(kOutputDirEnv);
    fs::path path;
    if (!cfg.output.empty()) {
        if (cfg.output == "-") {
            out << text;
            return;
        }
        path = cfg.output;
        if (path.is_relative() && env && *env) path = fs::path(env) / path;
    } else if (env && *env) {
        path = fs::path(env) / (stem + "." + cfg.format);
    } else {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw OutputError("cannot open " + path.string() + " for writing");
    f << text;
    f.close();
    if (!f) throw OutputError("failed writing " + path.string());
}

json base_config(const std::string& command, const Config& c) {
    return {{"command", command}, {"format", c.format}, {"tol", c.tol}};
}

json params_config(json j, const Config& c, bool with_init) {
    j["A"] = c.A;
    j["B"] = c.B;
    if (with_init) {
        j["x0"] = c.x0;
        j["y0"] = c.y0;
        j["span"] = c.span;
    }
    return j;
}

json events_json(const Trajectory& t) {
    json ev = json::array();
    for (const Event& e : t.events())
        ev.push_back({{"kind", to_string(e.kind)}, {"s", e.s}, {"x", e.state.x}, {"y", e.state.y},
                      {"theta", e.theta}});
    return ev;
}

json class_json(const SolitonClass& c) {
    json j = {{"class", to_string(c.tag)}, {"diagnostics", c.diagnostics}};
    if (c.limit_radius) j["limit_radius"] = *c.limit_radius;
    if (c.pq) {
        j["p"] = c.pq->first;
        j["q"] = c.pq->second;
    }
    if (c.delta_theta) j["delta_theta"] = *c.delta_theta;
    return j;
}

Trajectory integrate_config(const Config& c) {
    IntegrateOptions o;
    o.tol = c.tol;
    return integrate({c.A, c.B}, {c.x0, c.y0}, -c.span, c.span, o);
}

// One classification per non-empty, non-comment line "A B x0 y0".
json sweep(const std::string& input, int jobs, const ClassifyOptions& opts) {
    std::ifstream f(input);
    if (!f) throw DomainError("sweep: cannot read " + input);
    std::vector<std::array<double, 4>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::array<double, 4> r{};
        if (!(ls >> r[0] >> r[1] >> r[2] >> r[3]))
            throw DomainError("sweep: line " + std::to_string(lineno) + " is not 'A B x0 y0'");
        rows.push_back(r);
    }
    std::vector<json> results(rows.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < rows.size(); i = next++) {
            const auto& r = rows[i];
            json j = {{"index", i}, {"A", r[0]}, {"B", r[1]}, {"x0", r[2]}, {"y0", r[3]}};
            try {
                j.update(class_json(classify({r[0], r[1]}, {r[2], r[3]}, opts)));
            } catch (const std::exception& e) {
                j["class"] = "Error";
                j["diagnostics"] = e.what();
            }
            results[i] = std::move(j);
        }
    };
    std::vector<std::thread> pool;
    for (int k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return json(results);
}

std::string sweep_csv(const json& results) {
    std::ostringstream os;
    os << "index,A,B,x0,y0,class,p,q,limit_radius\n";
    char buf[64];
    auto num = [&](const json& v) {
        if (v.is_null()) return std::string();
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return std::string(buf);
    };
    for (const json& r : results) {
        os << r["index"].get<std::size_t>() << ',' << num(r["A"]) << ',' << num(r["B"]) << ','
           << num(r["x0"]) << ',' << num(r["y0"]) << ',' << r["class"].get<std::string>() << ','
           << (r.contains("p") ? std::to_string(r["p"].get<int>()) : "") << ','
           << (r.contains("q") ? std::to_string(r["q"].get<int>()) : "") << ','
           << (r.contains("limit_radius") ? num(r["limit_radius"]) : "") << '\n';
    }
    return os.str();
}

json error_record(const char* kind, const std::string& message, int code) {
    return {{"schema", kSchema}, {"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Self-similar solutions of the curve shortening flow", "csf_solitons"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    Config cfg;
    // Per-subcommand storage for options whose defaults differ between subcommands.
    std::map<const CLI::App*, std::string> formats_of;
    std::map<const CLI::App*, double> tol_of;
    auto common_format = [&](CLI::App* sc, std::vector<std::string> formats) {
        std::string& f = formats_of[sc] = formats.front();
        sc->add_option("--format", f, "Output format")->check(CLI::IsMember(formats))->capture_default_str();
        sc->add_option("--output,-o", cfg.output,
                       std::string("Output file ('-' for stdout); relative paths resolve against $") +
                           kOutputDirEnv);
        if (std::find(formats.begin(), formats.end(), "svg") != formats.end())
            sc->add_flag("--no-timestamp", cfg.no_timestamp, "Omit the SVG generation timestamp");
    };
    auto params = [&](CLI::App* sc) {
        sc->add_option("--A", cfg.A, "Rotation rate A")->capture_default_str();
        sc->add_option("--B", cfg.B, "Dilation rate B")->capture_default_str();
    };
    auto init = [&](CLI::App* sc) {
        sc->add_option("--x0", cfg.x0, "Initial curvature x(0)")->capture_default_str();
        sc->add_option("--y0", cfg.y0, "Initial phase coordinate y(0)")->capture_default_str();
        sc->add_option("--span", cfg.span, "Integrate over s in [-span, span]")
            ->check(CLI::PositiveNumber)
            ->capture_default_str();
    };
    auto tolerance = [&](CLI::App* sc, double def) {
        double& tol = tol_of[sc] = def;
        sc->add_option("--tol", tol, "Tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    };
    const std::vector<std::string> curve_formats{"csv", "json", "svg"};

    auto* integrate_cmd = app.add_subcommand("integrate", "Integrate the phase system and reconstruct the curve");
    params(integrate_cmd);
    init(integrate_cmd);

    auto* classify_cmd = app.add_subcommand("classify", "Classify the soliton through (x0, y0)");
    params(classify_cmd);
    ClassifyOptions copts;
    classify_cmd->add_option("--x0", cfg.x0, "Initial curvature x(0)")->capture_default_str();
    classify_cmd->add_option("--y0", cfg.y0, "Initial phase coordinate y(0)")->capture_default_str();
    classify_cmd->add_option("--horizon", copts.horizon, "Arc-length horizon (normalized units)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    classify_cmd->add_option("--max-q", copts.max_denominator, "Largest denominator tried for p/q")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Reconstruct the curve from phase data");
    params(reconstruct_cmd);
    init(reconstruct_cmd);
    std::string input;
    reconstruct_cmd->add_option("--input", input, "CSV with columns s,x,y,theta; integrates from (x0, y0) if absent")
        ->check(CLI::ExistingFile);

    auto* al_cmd = app.add_subcommand("abresch-langer", "Closed shrinker with rotation number p and q excursions");
    int p = 0, q = 0;
    al_cmd->add_option("--p", p, "Rotation number")->required();
    al_cmd->add_option("--q", q, "Excursions")->required();

    auto* comet_cmd = app.add_subcommand("comet", "Comet spiral of a rotating shrinker");
    params(comet_cmd);
    CometOptions cmopts;
    double settle = 1e-3;
    comet_cmd->add_option("--bracket-tol", cmopts.bracket_tol, "Width of the final y0 bracket")->check(CLI::PositiveNumber)->capture_default_str();
    comet_cmd->add_option("--y-max", cmopts.y_max, "Depth of the tail (normalized units)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    comet_cmd->add_option("--settle", settle, "Trim the end that has settled on the circle to this distance")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();

    auto* expander_cmd = app.add_subcommand("expander", "Expander through (x0, 0) with its total curvature");
    params(expander_cmd);
    expander_cmd->add_option("--x0", cfg.x0, "Curvature at the vertex")->capture_default_str();

    auto* evolve_cmd = app.add_subcommand("evolve", "Move a soliton by its self-similar motion");
    params(evolve_cmd);
    init(evolve_cmd);
    double t = 0.0, scale = 1.0;
    evolve_cmd->add_option("--t", t, "Time")->capture_default_str();
    evolve_cmd->add_option("--scale", scale, "Grim Reaper scale when A = B = 0")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify", "Check the soliton and flow equations numerically");
    params(verify_cmd);
    init(verify_cmd);
    verify_cmd->add_option("--scale", scale, "Grim Reaper scale when A = B = 0")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* figure_cmd = app.add_subcommand("figure", "Regenerate a catalogued figure");
    std::string figure_name;
    bool list = false;
    figure_cmd->add_option("name", figure_name, "Figure name");
    figure_cmd->add_flag("--list", list, "List the catalogue");

    auto* sweep_cmd = app.add_subcommand("sweep", "Classify every 'A B x0 y0' line of a file");
    int jobs = 1;
    sweep_cmd->add_option("--input", input, "Input file")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--jobs", jobs, "Worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    sweep_cmd->add_option("--horizon", copts.horizon, "Arc-length horizon (normalized units)")->check(CLI::PositiveNumber)->capture_default_str();

    for (auto* sc : {integrate_cmd, reconstruct_cmd, evolve_cmd, verify_cmd}) tolerance(sc, 1e-10);
    tolerance(al_cmd, 1e-12);
    tolerance(comet_cmd, 1e-11);
    tolerance(expander_cmd, 1e-12);
    tolerance(classify_cmd, 1e-9);
    tolerance(sweep_cmd, 1e-9);
    for (auto* sc : {integrate_cmd, reconstruct_cmd, al_cmd, comet_cmd, expander_cmd, evolve_cmd})
        common_format(sc, curve_formats);
    common_format(figure_cmd, {"svg", "csv", "json"});
    common_format(classify_cmd, {"json"});
    common_format(verify_cmd, {"json"});
    common_format(sweep_cmd, {"json", "csv"});

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << error_record("invalid-arguments", e.what(), kInvalidArguments).dump() << '\n';
        return kInvalidArguments;
    }
    CLI::App* sc = app.get_subcommands().front();
    const std::string cmd = sc->get_name();
    cfg.format = formats_of.at(sc);
    if (tol_of.count(sc)) cfg.tol = tol_of.at(sc);

    try {
        Result r;
        json config = base_config(cmd, cfg);
        if (cmd == "integrate") {
            config = params_config(config, cfg, true);
            r.phase_storage = integrate_config(cfg);
            r.summary = {{"samples", r.phase_storage.size()},
                         {"truncated", r.phase_storage.truncated()},
                         {"events", events_json(r.phase_storage)}};
            r.curves.push_back(reconstruct(r.phase_storage));
            r.phase = &r.phase_storage;
            r.name = "integrate";
        } else if (cmd == "classify") {
            config = params_config(config, cfg, false);
            config["x0"] = cfg.x0;
            config["y0"] = cfg.y0;
            config["horizon"] = copts.horizon;
            config["max_q"] = copts.max_denominator;
            copts.tol = cfg.tol;
            r.summary = class_json(classify({cfg.A, cfg.B}, {cfg.x0, cfg.y0}, copts));
            r.name = "classify";
        } else if (cmd == "reconstruct") {
            config = params_config(config, cfg, input.empty());
            if (!input.empty()) {
                config["input"] = input;
                std::ifstream f(input);
                std::vector<Sample> samples;
                {
                    std::ostringstream body;
                    std::string line;
                    while (std::getline(f, line))
                        if (line.empty() || line[0] != '#') body << line << '\n';
                    std::istringstream is(body.str());
                    samples = read_phase_csv(is);
                }
                r.phase_storage = Trajectory({cfg.A, cfg.B}, std::move(samples), {}, cfg.tol);
            } else {
                r.phase_storage = integrate_config(cfg);
            }
            const PlaneCurve c = reconstruct(r.phase_storage);
            r.summary = {{"samples", c.size()}, {"soliton_residual", soliton_residual(c)}};
            r.curves.push_back(c);
            r.phase = &r.phase_storage;
            r.name = "reconstruct";
        } else if (cmd == "abresch-langer") {
            config["p"] = p;
            config["q"] = q;
            const AbreschLangerResult al = find_abresch_langer(p, q, cfg.tol);
            r.summary = {{"r_max", al.shot.parameter},
                         {"target_delta_theta", al.target},
                         {"residual", al.shot.residual},
                         {"bracket", {al.shot.bracket_lo, al.shot.bracket_hi}},
                         {"evaluations", al.shot.evaluations},
                         {"closure", al.closure}};
            r.phase_storage = al.shot.trajectory;
            r.curves.push_back(reconstruct(r.phase_storage));
            r.phase = &r.phase_storage;
            r.name = "abresch-langer-" + std::to_string(p) + "-" + std::to_string(q);
        } else if (cmd == "comet") {
            config = params_config(config, cfg, false);
            config["bracket_tol"] = cmopts.bracket_tol;
            config["y_max"] = cmopts.y_max;
            config["settle"] = settle;
            cmopts.integration_tol = cfg.tol;
            const CometResult c = find_comet_spiral({cfg.A, cfg.B}, cmopts);
            r.summary = {{"section_x", c.section_x},
                         {"y0", c.shot.parameter},
                         {"bracket", {c.shot.bracket_lo, c.shot.bracket_hi}},
                         {"tail_crossing_y", c.tail_crossing_y},
                         {"residual", c.shot.residual},
                         {"evaluations", c.shot.evaluations},
                         {"monotone", c.monotone},
                         {"tail_in_strip", c.tail_in_strip},
                         {"sink_distance", c.sink_distance},
                         {"reflected", c.normalization.reflected},
                         {"limit_radius", 1.0 / std::sqrt(-cfg.B)}};
            r.phase_storage = settle > 0.0 ? trim_settled(c.shot.trajectory, settle) : c.shot.trajectory;
            r.curves.push_back(reconstruct(r.phase_storage));
            r.phase = &r.phase_storage;
            r.name = "comet";
        } else if (cmd == "expander") {
            config = params_config(config, cfg, false);
            config["x0"] = cfg.x0;
            const ExpanderResult e = solve_expander({cfg.A, cfg.B}, cfg.x0, cfg.tol);
            r.summary = {{"total_curvature", e.total_curvature.value},
                         {"curvature_integral", e.total_curvature.integral},
                         {"tail_bound", e.total_curvature.tail_bound},
                         {"converged", e.total_curvature.converged},
                         {"r_min", cfg.x0 / cfg.B}};
            r.phase_storage = e.trajectory;
            r.curves.push_back(reconstruct(r.phase_storage));
            r.phase = &r.phase_storage;
            r.name = "expander";
        } else if (cmd == "evolve" || cmd == "verify") {
            config = params_config(config, cfg, true);
            const Params prm{cfg.A, cfg.B};
            PlaneCurve curve;
            Motion m;
            if (prm.degenerate()) {
                config["scale"] = scale;
                curve = grim_reaper(scale, 801);
                m = motion_for(prm, Complex(0.0, 1.0 / scale));
            } else {
                curve = reconstruct(integrate_config(cfg));
                m = motion_for(prm);
            }
            if (cmd == "evolve") {
                config["t"] = t;
                r.curves.push_back(evolve(curve, m, t));
                r.summary = {{"f", m.f(t)}, {"g", m.g(t)}, {"H", {m.H(t).real(), m.H(t).imag()}}};
                if (m.t_max()) r.summary["t_max"] = *m.t_max();
                r.name = "evolve";
            } else {
                const CsfCheck chk = check_csf(curve, m);
                r.summary = {{"soliton_residual", prm.degenerate() ? 0.0 : soliton_residual(curve)},
                             {"t", chk.t},
                             {"dt", chk.dts},
                             {"csf_residual", chk.residuals},
                             {"rounding_floor", chk.floors},
                             {"order", chk.order ? json(*chk.order) : json(nullptr)},
                             {"fine_dt", chk.fine_dt},
                             {"fine_residual", chk.fine_residual},
                             {"passed", chk.passed}};
                r.name = "verify";
                emit(render(r, config, cfg), r.name, cfg, out);
                if (!chk.passed) {
                    err << error_record("solver-failure", "flow equation check failed", kSolverFailure).dump()
                        << '\n';
                    return kSolverFailure;
                }
                return kOk;
            }
        } else if (cmd == "figure") {
            if (list) {
                json names = json::array();
                for (const FigureSpec& s : figure_catalog())
                    names.push_back({{"name", s.name},
                                     {"description", s.description},
                                     {"A", s.params.A},
                                     {"B", s.params.B},
                                     {"setup", s.setup}});
                out << json{{"schema", kSchema}, {"figures", names}}.dump(2) << '\n';
                return kOk;
            }
            if (figure_name.empty()) {
                err << error_record("invalid-arguments", "figure: a name or --list is required", kInvalidArguments)
                           .dump()
                    << '\n';
                return kInvalidArguments;
            }
            const Figure f = make_figure(figure_name);
            const FigureSignature sig = figure_signature(f);
            config.erase("tol");
            config["name"] = f.spec.name;
            config["A"] = f.spec.params.A;
            config["B"] = f.spec.params.B;
            config["setup"] = f.spec.setup;
            r.summary = {{"description", f.spec.description},
                         {"signature",
                          {{"bbox", {sig.x_min, sig.x_max, sig.y_min, sig.y_max}},
                           {"winding", sig.winding},
                           {"crossings", sig.crossings},
                           {"unresolved", sig.unresolved},
                           {"loop_areas", sig.loop_areas}}}};
            r.curves = f.curves;
            r.name = "figure-" + f.spec.name;
        } else if (cmd == "sweep") {
            config["input"] = input;
            config["jobs"] = jobs;
            config["horizon"] = copts.horizon;
            copts.tol = cfg.tol;
            const json results = sweep(input, jobs, copts);
            // Worker count does not affect the output.
            config.erase("jobs");
            if (cfg.format == "csv") {
                emit(sweep_csv(results), "sweep", cfg, out);
                return kOk;
            }
            r.summary = {{"results", results}};
            r.name = "sweep";
        }
        emit(render(r, config, cfg), r.name, cfg, out);
        return kOk;
    } catch (const OutputError& e) {
        err << error_record("unwritable-output", e.what(), kUnwritableOutput).dump() << '\n';
        return kUnwritableOutput;
    } catch (const std::exception& e) {
        err << error_record("solver-failure", e.what(), kSolverFailure).dump() << '\n';
        return kSolverFailure;
    }
}

}  // namespace csf::cli
