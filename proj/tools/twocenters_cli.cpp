#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twocenters/twocenters.hpp"

namespace tc = twocenters;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kNumericalFailure = 3 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// JSON config: scalars at the top level configure global options, objects named
/// after a subcommand configure that subcommand. Keys may use '_' for '-'.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& in) const override
    {
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
        }
        if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
        std::vector<CLI::ConfigItem> items;
        collect(j, {}, items);
        return items;
    }

private:
    static std::string option_name(std::string key)
    {
        for (char& ch : key) {
            if (ch == '_') ch = '-';
        }
        return key;
    }

    static std::string scalar(const json& v)
    {
        if (v.is_string()) return v.get<std::string>();
        if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
        if (v.is_number_float()) return tc::format_full(v.get<double>());
        return v.dump();
    }

    static void collect(const json& obj, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& out)
    {
        for (const auto& [key, value] : obj.items()) {
            if (value.is_object()) {
                auto p = parents;
                p.push_back(key);
                collect(value, p, out);
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = option_name(key);
            if (value.is_array()) {
                for (const auto& v : value) item.inputs.push_back(scalar(v));
            } else {
                item.inputs.push_back(scalar(value));
            }
            out.push_back(std::move(item));
        }
    }
};

/// Resolves a preset name to a file: an existing path, or NAME.json in the preset directory.
std::string resolve_config(const std::string& name)
{
    if (name.empty() || fs::exists(name)) return name;
    std::vector<fs::path> dirs;
    if (const char* env = std::getenv("TWOCENTERS_PRESET_DIR")) dirs.emplace_back(env);
#ifdef TWOCENTERS_PRESET_DIR
    dirs.emplace_back(TWOCENTERS_PRESET_DIR);
#endif
    for (const auto& d : dirs) {
        const fs::path p = d / (name + ".json");
        if (fs::exists(p)) return p.string();
    }
    return name;
}

/// Files written by a command; removed again if the command fails.
class Outputs {
public:
    std::ofstream open(const std::string& path)
    {
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open output file " + path);
        paths_.push_back(path);
        return os;
    }

    void commit() noexcept { paths_.clear(); }

    ~Outputs()
    {
        std::error_code ec;
        for (const auto& p : paths_) fs::remove(p, ec);
    }

private:
    std::vector<std::string> paths_;
};

void finish(std::ofstream& os, const std::string& what)
{
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + what);
}

json to_json(const std::vector<tc::Interval>& ivs)
{
    json a = json::array();
    for (const auto& iv : ivs) a.push_back({iv.lo, iv.bounded() ? json(iv.hi) : json("inf")});
    return a;
}

json number(double v)
{
    if (std::isfinite(v)) return v;
    return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

std::string text(const std::vector<tc::Interval>& ivs)
{
    std::string s;
    for (const auto& iv : ivs) {
        if (!s.empty()) s += " u ";
        s += "[" + tc::format_full(iv.lo) + ", " + tc::format_full(iv.hi) + "]";
    }
    return s.empty() ? "empty" : s;
}

std::string text(const tc::CurveSet& cs)
{
    std::string s;
    for (auto id : cs) s += (s.empty() ? "" : ",") + std::string(tc::to_string(id));
    return s.empty() ? "none" : s;
}

json curves_json(const tc::CurveSet& cs)
{
    json a = json::array();
    for (auto id : cs) a.push_back(tc::to_string(id));
    return a;
}

struct Globals {
    std::optional<double> z1;
    std::optional<double> z2;
    bool json_out = false;
    unsigned threads = 0;

    tc::ChargeConfig charges() const
    {
        if (!z1 || !z2) throw ConfigError("charges are required: pass --z1 and --z2 (or a config file)");
        return {*z1, *z2};
    }

    unsigned thread_count() const { return threads > 0 ? threads : tc::default_thread_count(); }
};

struct DiagramArgs {
    double e_min = 0.0;
    double e_max = 5.0;
    double k_min = -8.0;
    double k_max = 2.0;
    std::size_t nx = 101;
    std::size_t ny = 101;
    std::size_t curve_samples = 400;
    std::string grid_out = "diagram_grid.csv";
    std::string curves_out = "diagram_curves.csv";
    std::string svg_out;
};

int cmd_diagram(const Globals& g, const DiagramArgs& a)
{
    const auto charges = g.charges();
    if (!(a.e_max > a.e_min)) throw ConfigError("energy range is empty");
    if (a.e_min < 0.0) throw ConfigError("energy range must lie in E >= 0");
    if (!(a.k_max > a.k_min)) throw ConfigError("K range is empty");
    if (a.nx < 2 || a.ny < 2) throw ConfigError("grid resolution must be at least 2");
    const auto d = tc::sample_diagram({a.e_min, a.e_max}, {a.k_min, a.k_max}, a.nx, a.ny, charges, a.curve_samples,
                                      g.thread_count());
    Outputs out;
    {
        auto os = out.open(a.grid_out);
        tc::write_diagram_grid_csv(os, d);
        finish(os, a.grid_out);
    }
    {
        auto os = out.open(a.curves_out);
        tc::write_diagram_curves_csv(os, d);
        finish(os, a.curves_out);
    }
    if (!a.svg_out.empty()) {
        auto os = out.open(a.svg_out);
        tc::write_diagram_svg(os, d);
        finish(os, a.svg_out);
    }
    out.commit();

    const auto curves = tc::bifurcation_curve_set(charges);
    if (g.json_out) {
        json j{{"charge_case", tc::to_string(tc::charge_case(charges))},
               {"curves", curves_json(curves)},
               {"cells", d.cells.size()},
               {"grid", a.grid_out},
               {"polylines", a.curves_out}};
        if (!a.svg_out.empty()) j["svg"] = a.svg_out;
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "charge_case: " << tc::to_string(tc::charge_case(charges)) << '\n'
                  << "curves: " << text(curves) << '\n'
                  << "cells: " << d.cells.size() << '\n'
                  << "grid: " << a.grid_out << '\n'
                  << "polylines: " << a.curves_out << '\n';
        if (!a.svg_out.empty()) std::cout << "svg: " << a.svg_out << '\n';
    }
    return kOk;
}

struct ClassifyArgs {
    std::optional<double> e;
    std::optional<double> k;
};

int cmd_classify(const Globals& g, const ClassifyArgs& a)
{
    const auto charges = g.charges();
    if (!a.e || !a.k) throw ConfigError("classify needs --e and --k");
    if (*a.e < 0.0) throw ConfigError("E < 0 is out of scope: regions are classified for E >= 0 only");
    const tc::EnergyMomentum em{*a.e, *a.k};
    const auto r = tc::classify(em, charges);
    const double kp = tc::k_plus(em.e, charges);
    const double km = tc::k_minus(em.e, charges);
    if (g.json_out) {
        json j{{"E", em.e},
               {"K", em.k},
               {"label", r.label},
               {"pattern", r.pattern},
               {"x_intervals", to_json(r.x_intervals)},
               {"y_intervals", to_json(r.y_intervals)},
               {"on_curves", curves_json(r.on_curves)},
               {"bounded", r.bounded_component},
               {"k_plus", number(kp)},
               {"k_minus", number(km)},
               {"charge_case", tc::to_string(tc::charge_case(charges))}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "label: " << r.label << '\n'
                  << "pattern: " << r.pattern << '\n'
                  << "x_intervals: " << text(r.x_intervals) << '\n'
                  << "y_intervals: " << text(r.y_intervals) << '\n'
                  << "on_curves: " << text(r.on_curves) << '\n'
                  << "bounded: " << (r.bounded_component ? "true" : "false") << '\n'
                  << "k_plus: " << tc::format_full(kp) << '\n'
                  << "k_minus: " << tc::format_full(km) << '\n'
                  << "charge_case: " << tc::to_string(tc::charge_case(charges)) << '\n';
    }
    return kOk;
}

struct TrajectoryArgs {
    std::optional<double> q1, q2, p1, p2;
    std::optional<double> e, k, x0, y0;
    double px_sign = 1.0;
    double py_sign = 1.0;
    bool lower_sheet = false;
    std::string special;
    double s_max = 100.0;
    double step_tol = 1e-10;
    double x_escape = 1e3;
    std::string out = "trajectory.csv";
    std::string events_out = "events.csv";
    std::string hits_out;
    std::string svg_out;
};

tc::Trajectory run_trajectory(const tc::ChargeConfig& c, const TrajectoryArgs& a)
{
    tc::IntegrationOptions opt;
    opt.s_max = a.s_max;
    opt.step_tol = a.step_tol;
    opt.x_escape = a.x_escape;
    if (!(a.s_max >= 0.0) || !(a.step_tol > 0.0) || !(a.x_escape > 1.0)) {
        throw ConfigError("need s_max >= 0, step_tol > 0, x_escape > 1");
    }
    if (!a.special.empty()) {
        if (!a.e) throw ConfigError("special orbits need --e");
        if (a.special == "interfocal") return tc::interfocal_orbit(c, *a.e, opt);
        if (a.special == "axis-negative") return tc::axis_orbit(c, *a.e, tc::AxisSide::negative, opt);
        if (a.special == "axis-positive") return tc::axis_orbit(c, *a.e, tc::AxisSide::positive, opt);
        throw ConfigError("unknown special orbit '" + a.special + "'");
    }
    const bool cartesian = a.q1 || a.q2 || a.p1 || a.p2;
    if (cartesian) {
        if (!(a.q1 && a.q2 && a.p1 && a.p2)) throw ConfigError("Cartesian start needs --q1 --q2 --p1 --p2");
        tc::check_not_at_focus(*a.q1, *a.q2);
        return tc::integrate(tc::CartesianState{*a.q1, *a.q2, *a.p1, *a.p2}, c, opt);
    }
    if (!(a.e && a.k && a.x0 && a.y0)) {
        throw ConfigError("initial state needs --q1 --q2 --p1 --p2 or --e --k --x0 --y0");
    }
    const auto s0 = tc::state_on_level({*a.e, *a.k}, c, *a.x0, *a.y0, a.px_sign, a.py_sign,
                                       a.lower_sheet ? tc::Sheet::lower : tc::Sheet::upper);
    return tc::integrate(s0, c, opt);
}

int cmd_trajectory(const Globals& g, const TrajectoryArgs& a)
{
    const auto charges = g.charges();
    auto tr = run_trajectory(charges, a);

    std::string section_note = "not requested";
    std::vector<tc::SectionHit> hits;
    if (!a.hits_out.empty()) {
        try {
            const auto section = tc::choose_section(tr.em, charges, a.x_escape);
            hits = tc::poincare_hits(tr, section);
            tc::record_section_hits(tr, hits);
            section_note = tc::to_string(section.kind);
        } catch (const tc::OnBifurcationCurve& e) {
            section_note = std::string("none (") + e.what() + ")";
        } catch (const tc::NoSectionRule& e) {
            section_note = std::string("none (") + e.what() + ")";
        }
    }
    const std::size_t hit_count = hits.size();

    Outputs out;
    {
        auto os = out.open(a.out);
        tc::write_trajectory_csv(os, tr);
        finish(os, a.out);
    }
    {
        auto os = out.open(a.events_out);
        tc::write_events_csv(os, tr);
        finish(os, a.events_out);
    }
    if (!a.hits_out.empty()) {
        auto os = out.open(a.hits_out);
        os << "s,q1,p1,p2\n";
        for (const auto& h : hits) {
            os << tc::format_full(h.s) << ',' << tc::format_full(h.q1) << ',' << tc::format_full(h.p1) << ','
               << tc::format_full(h.p2) << '\n';
        }
        finish(os, a.hits_out);
    }
    if (!a.svg_out.empty()) {
        auto os = out.open(a.svg_out);
        tc::write_trajectory_svg(os, tr);
        finish(os, a.svg_out);
    }
    out.commit();

    if (g.json_out) {
        json j{{"E", tr.em.e},
               {"K", tr.em.k},
               {"termination", tc::to_string(tr.termination)},
               {"samples", tr.samples.size()},
               {"events", tr.events.size()},
               {"s_end", tr.samples.back().s},
               {"t_end", tr.samples.back().t},
               {"max_E_drift", tr.max_e_drift()},
               {"max_K_drift", tr.max_k_drift()},
               {"section", section_note},
               {"section_hits", hit_count},
               {"trajectory", a.out},
               {"events_file", a.events_out}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << "E: " << tc::format_full(tr.em.e) << '\n'
                  << "K: " << tc::format_full(tr.em.k) << '\n'
                  << "termination: " << tc::to_string(tr.termination) << '\n'
                  << "samples: " << tr.samples.size() << '\n'
                  << "events: " << tr.events.size() << '\n'
                  << "s_end: " << tc::format_full(tr.samples.back().s) << '\n'
                  << "t_end: " << tc::format_full(tr.samples.back().t) << '\n'
                  << "max_E_drift: " << tc::format_full(tr.max_e_drift()) << '\n'
                  << "max_K_drift: " << tc::format_full(tr.max_k_drift()) << '\n'
                  << "section: " << section_note << " (" << hit_count << " hits)\n";
    }
    return kOk;
}

struct VerifyArgs {
    double step_tol = 1e-10;
    std::uint64_t seed = 20240611;
    std::vector<std::string> charges;
    bool no_budgets = false;
};

tc::ChargeConfig parse_pair(const std::string& s)
{
    double z1 = 0.0, z2 = 0.0;
    char comma = 0;
    std::istringstream in(s);
    if (!(in >> z1 >> comma >> z2) || comma != ',' || !(in >> std::ws).eof()) {
        throw ConfigError("charges must be given as z1,z2; got '" + s + "'");
    }
    return {z1, z2};
}

int cmd_verify(const Globals& g, const VerifyArgs& a)
{
    if (!(a.step_tol > 0.0)) throw ConfigError("step_tol must be positive");
    tc::VerifyOptions opt;
    opt.step_tol = a.step_tol;
    opt.seed = a.seed;
    opt.threads = g.thread_count();
    opt.enforce_budgets = !a.no_budgets;
    if (!a.charges.empty()) {
        opt.presets.clear();
        for (const auto& s : a.charges) opt.presets.push_back(parse_pair(s));
    }
    const auto results = tc::run_acceptance(opt);
    bool all = true;
    json arr = json::array();
    for (const auto& r : results) {
        all = all && r.passed;
        if (g.json_out) {
            arr.push_back({{"id", r.id},
                           {"name", r.name},
                           {"passed", r.passed},
                           {"measured", number(r.measured)},
                           {"tolerance", r.tolerance},
                           {"seconds", r.seconds},
                           {"detail", r.detail}});
        } else {
            char line[256];
            std::snprintf(line, sizeof line, "[%s] %2d %-15s measured=%-12.4g bound=%-8.3g %6.2fs  ",
                          r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.measured, r.tolerance, r.seconds);
            std::cout << line << r.detail << '\n';
        }
    }
    if (g.json_out) {
        std::cout << json{{"passed", all}, {"checks", arr}}.dump(2) << '\n';
    } else {
        std::cout << (all ? "all checks passed" : "verification FAILED") << '\n';
    }
    return all ? kOk : kVerifyFailed;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Planar two-fixed-centers problem: bifurcation diagrams, region classification, trajectories"};
    app.require_subcommand(1);
    app.fallthrough();
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file or preset name; command-line flags take precedence")
        ->transform([](std::string s) { return resolve_config(s); });

    Globals g;
    app.add_option("--z1", g.z1, "strength of the center at (+1, 0)");
    app.add_option("--z2", g.z2, "strength of the center at (-1, 0)");
    app.add_flag("--json", g.json_out, "print the report as JSON");
    app.add_option("--threads", g.threads, "worker threads (default: TWOCENTERS_THREADS or all cores)");

    DiagramArgs da;
    auto* diagram = app.add_subcommand("diagram", "sample the bifurcation diagram and write CSV/SVG");
    diagram->add_option("--e-min", da.e_min)->capture_default_str();
    diagram->add_option("--e-max", da.e_max)->capture_default_str();
    diagram->add_option("--k-min", da.k_min)->capture_default_str();
    diagram->add_option("--k-max", da.k_max)->capture_default_str();
    diagram->add_option("--nx", da.nx, "grid nodes along E")->capture_default_str();
    diagram->add_option("--ny", da.ny, "grid nodes along K")->capture_default_str();
    diagram->add_option("--curve-samples", da.curve_samples, "vertices per curve")->capture_default_str();
    diagram->add_option("--grid-out", da.grid_out)->capture_default_str();
    diagram->add_option("--curves-out", da.curves_out)->capture_default_str();
    diagram->add_option("--svg-out", da.svg_out, "optional SVG plot");

    ClassifyArgs ca;
    auto* classify = app.add_subcommand("classify", "classify one (E, K) pair");
    classify->add_option("--e", ca.e, "energy E");
    classify->add_option("--k", ca.k, "separation constant K");

    TrajectoryArgs ta;
    auto* trajectory = app.add_subcommand("trajectory", "integrate one trajectory");
    trajectory->add_option("--q1", ta.q1);
    trajectory->add_option("--q2", ta.q2);
    trajectory->add_option("--p1", ta.p1);
    trajectory->add_option("--p2", ta.p2);
    trajectory->add_option("--e", ta.e, "energy (level-set start or special orbit)");
    trajectory->add_option("--k", ta.k, "separation constant (level-set start)");
    trajectory->add_option("--x0", ta.x0, "x = cosh(xi) of the level-set start");
    trajectory->add_option("--y0", ta.y0, "y = cos(eta) of the level-set start");
    trajectory->add_option("--px-sign", ta.px_sign)->capture_default_str();
    trajectory->add_option("--py-sign", ta.py_sign)->capture_default_str();
    trajectory->add_flag("--lower-sheet", ta.lower_sheet, "start in the lower half-plane");
    trajectory->add_option("--special", ta.special, "interfocal | axis-negative | axis-positive");
    trajectory->add_option("--s-max", ta.s_max)->capture_default_str();
    trajectory->add_option("--step-tol", ta.step_tol)->capture_default_str();
    trajectory->add_option("--x-escape", ta.x_escape)->capture_default_str();
    trajectory->add_option("--out", ta.out)->capture_default_str();
    trajectory->add_option("--events-out", ta.events_out)->capture_default_str();
    trajectory->add_option("--hits-out", ta.hits_out, "optional CSV of section crossings");
    trajectory->add_option("--svg-out", ta.svg_out, "optional SVG of the path");

    VerifyArgs va;
    auto* verify = app.add_subcommand("verify", "run the acceptance checks");
    verify->add_option("--step-tol", va.step_tol)->capture_default_str();
    verify->add_option("--seed", va.seed)->capture_default_str();
    verify->add_option("--charges", va.charges, "z1,z2 pairs to run on (repeatable)");
    verify->add_flag("--no-budgets", va.no_budgets, "do not fail checks that exceed their time budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (*diagram) return cmd_diagram(g, da);
        if (*classify) return cmd_classify(g, ca);
        if (*trajectory) return cmd_trajectory(g, ta);
        if (*verify) return cmd_verify(g, va);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const tc::IntegrationFailure& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const tc::IntegratorDefect& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const tc::Error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    }
    return kConfigError;
}
