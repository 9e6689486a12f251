// ringdefect — CLI front end for the two-boson ring-defect solver.
//
// Subcommands:
//   curves    curve families and enumerated roots (curves.csv, roots.csv)
//   roots     enumerated roots only (roots.csv)
//   phase     geometric phase of one state over alpha: 0 -> 2pi
//   sweep     phase-vs-interaction table over an (eta, c) grid
//   validate  fast self-test subset; exit 0 iff all checks pass
//
// Exit codes: 0 success, 1 validation failure, 2 I/O error,
// 3 solver/enumeration failure, 4 ill-defined phase.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "ringdefect/csv.hpp"
#include "ringdefect/geomphase.hpp"
#include "ringdefect/spectrum.hpp"
#include "ringdefect/tmatrix.hpp"
#include "ringdefect/wavefun.hpp"

namespace rd = ringdefect;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitSolver = 3;
constexpr int kExitPhase = 4;

std::pair<int, int> parse_state(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("--state", "expected i,j");
    const int i = std::stoi(s.substr(0, comma));
    const int j = std::stoi(s.substr(comma + 1));
    if (i < 1 || j < 1) throw CLI::ValidationError("--state", "indices must be >= 1");
    return {i, j};
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stod(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

int cmd_curves(double eta, double alpha, double c, double L, double k_min, double k_max,
               double step, const std::string& out_dir) {
    rd::SystemConfig cfg{c, L, rd::DefectParams{eta, alpha}};
    rd::validate(cfg);

    rd::CsvWriter curves("family,branch_id,k1,k2");
    for (auto family : {rd::CurveFamily::horizontal, rd::CurveFamily::vertical}) {
        const char* name = (family == rd::CurveFamily::horizontal) ? "horizontal" : "vertical";
        for (const auto& line : rd::curve_samples(cfg, family, k_min, k_max, step))
            for (const auto& pt : line.points)
                curves.row({name, std::to_string(line.branch_id), rd::format_g17(pt[0]),
                            rd::format_g17(pt[1])});
    }

    rd::CsvWriter roots("i,j,k1,k2,energy,residual");
    rd::SystemConfig free_cfg = cfg;
    free_cfg.c = 0.0;
    int max_index = 0;
    for (double r : rd::free_root_list(free_cfg, 64)) {
        if (r > k_max) break;
        ++max_index;
    }
    if (max_index > 0) {
        const auto states = rd::enumerate_states(cfg, max_index);
        for (const auto& [ij, p] : states)
            roots.row({std::to_string(ij.first), std::to_string(ij.second),
                       rd::format_g17(p.k1), rd::format_g17(p.k2),
                       rd::format_g17(rd::energy(p)), rd::format_g17(p.residual)});
    }

    curves.write(out_dir + "/curves.csv");
    roots.write(out_dir + "/roots.csv");
    return 0;
}

int cmd_roots(double eta, double alpha, double c, double L, int max_index,
              const std::string& out) {
    rd::SystemConfig cfg{c, L, rd::DefectParams{eta, alpha}};
    rd::validate(cfg);
    rd::CsvWriter roots("i,j,k1,k2,energy,residual");
    for (const auto& [ij, p] : rd::enumerate_states(cfg, max_index))
        roots.row({std::to_string(ij.first), std::to_string(ij.second), rd::format_g17(p.k1),
                   rd::format_g17(p.k2), rd::format_g17(rd::energy(p)),
                   rd::format_g17(p.residual)});
    roots.write(out);
    return 0;
}

struct PhaseRecord {
    std::pair<int, int> state;
    double eta, c, L;
    rd::PhaseResult result;
    std::string status = "ok";
};

void emit_phase(const PhaseRecord& rec, const std::string& out, const std::string& format,
                bool with_status) {
    const std::string state = std::to_string(rec.state.first) + "-" +
                              std::to_string(rec.state.second);
    std::string text;
    if (format == "json") {
        nlohmann::json j{{"state", state},
                         {"eta", rec.eta},
                         {"c", rec.c},
                         {"L", rec.L},
                         {"steps_used", rec.result.steps_used},
                         {"theta_g", rec.result.theta_g},
                         {"global_term", rec.result.global_term},
                         {"connection_term", rec.result.connection_term},
                         {"endpoint_overlap_mag", rec.result.endpoint_overlap_mag},
                         {"converged", rec.result.converged},
                         {"status", rec.status}};
        text = j.dump(2) + "\n";
    } else {
        std::string header =
            "state,eta,c,L,steps_used,theta_g,global_term,connection_term,"
            "endpoint_overlap_mag,converged";
        if (with_status) header += ",status";
        rd::CsvWriter csv(header);
        std::vector<std::string> row{state,
                                     rd::format_g17(rec.eta),
                                     rd::format_g17(rec.c),
                                     rd::format_g17(rec.L),
                                     std::to_string(rec.result.steps_used),
                                     rd::format_g17(rec.result.theta_g),
                                     rd::format_g17(rec.result.global_term),
                                     rd::format_g17(rec.result.connection_term),
                                     rd::format_g17(rec.result.endpoint_overlap_mag),
                                     bool_str(rec.result.converged)};
        if (with_status) row.push_back(rec.status);
        csv.row(row);
        text = csv.text();
    }
    if (out.empty() || out == "-") {
        std::cout << text;
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw rd::io_error("cannot open " + out + " for writing");
        f << text;
    }
}

int cmd_phase(const std::string& state_str, double eta, double c, double L, int steps,
              const std::string& out, const std::string& format) {
    PhaseRecord rec{parse_state(state_str), eta, c, L, {}, "ok"};
    rd::ContourSpec spec{rec.state, eta, c, L, steps, 2.0 * M_PI};
    try {
        rec.result = rd::phase_converged(spec);
    } catch (const rd::ill_defined_phase_error& e) {
        rec.result.endpoint_overlap_mag = e.overlap_mag;
        rec.status = "ill-defined-global-phase";
        emit_phase(rec, out, format, true);
        return kExitPhase;
    }
    emit_phase(rec, out, format, false);
    return 0;
}

int cmd_sweep(const std::string& state_str, const std::string& etas_str, double c_min,
              double c_max, int c_count, double L, int steps, const std::string& out) {
    const auto state = parse_state(state_str);
    const auto etas = parse_list(etas_str);
    if (c_count < 1) throw CLI::ValidationError("--c-count", "must be >= 1");
    std::vector<double> c_grid(c_count);
    for (int m = 0; m < c_count; ++m)
        c_grid[m] = (c_count == 1) ? c_min
                                   : c_min + (c_max - c_min) * static_cast<double>(m) /
                                                 (c_count - 1);
    const auto rows = rd::sweep(state, etas, c_grid, L, steps);
    rd::CsvWriter csv("eta,c,theta_g,converged,status");
    std::size_t ok = 0;
    for (const auto& row : rows) {
        csv.row({rd::format_g17(row.eta), rd::format_g17(row.c), rd::format_g17(row.theta_g),
                 bool_str(row.converged), row.status});
        if (row.status == "ok") ++ok;
    }
    csv.write(out);
    const double frac = static_cast<double>(ok) / rows.size();
    return frac >= 0.9 ? 0 : kExitSolver;
}

int cmd_validate() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    struct Check {
        std::string name;
        bool pass;
        std::string detail;
    };
    std::vector<Check> checks;

    {  // group invariant on a fixed pseudorandom parameter set
        std::mt19937 rng(20240901);
        std::uniform_real_distribution<double> eta_d(0.0, 5.0), alpha_d(0.0, 2.0 * M_PI);
        double worst = 0.0;
        for (int m = 0; m < 1000; ++m) {
            const auto tm = rd::make_defect({eta_d(rng), alpha_d(rng)});
            worst = std::max(worst, std::abs(rd::group_residual(tm)));
        }
        checks.push_back({"su11 group invariant", worst < 1e-12, rd::format_g17(worst)});
    }
    {  // free-limit oracle: perturbed seeds refine back onto the closed form
        double worst = 0.0;
        for (double eta : {0.5, 2.0, 4.0})
            for (double alpha : {0.0, 1.0, 3.0}) {
                rd::SystemConfig cfg{0.0, 5.0, {eta, alpha}};
                const auto roots = rd::free_root_list(cfg, 5);
                auto gap = [&](std::size_t i) {
                    return std::min(roots[i] - roots[i - 1], roots[i + 1] - roots[i]);
                };
                const auto p = rd::find_root(roots[1] + 0.1 * gap(1),
                                             roots[3] - 0.1 * gap(3), cfg);
                worst = std::max({worst, std::abs(p.k1 - roots[1]),
                                  std::abs(p.k2 - roots[3])});
            }
        checks.push_back({"free-limit closed form", worst < 1e-10, rd::format_g17(worst)});
    }
    {  // closed-form inner product vs quadrature
        rd::SystemConfig cfg{0.1, 5.0, {2.0, 0.0}};
        const auto states = rd::enumerate_states(cfg, 2);
        const auto a = rd::build_state(states.at({1, 2}), cfg);
        const auto b = rd::build_state(states.at({2, 1}), cfg);
        const auto closed = rd::inner_product(a, b);
        const auto quad = rd::inner_product_quadrature(a, b, 48);
        const double rel = std::abs(closed - quad) / std::max(std::abs(closed), 1.0);
        checks.push_back({"quadrature cross-check", rel < 1e-8, rd::format_g17(rel)});
    }
    {  // gauge invariance of theta_g
        rd::ContourSpec spec{{1, 2}, 1.0, 0.05, 5.0, 16, 2.0 * M_PI};
        auto path = rd::state_path(spec);
        const double base = rd::geometric_phase(path).theta_g;
        std::mt19937 rng(7);
        std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
        auto scrambled = path;
        for (auto& w : scrambled) w = rd::apply_gauge(w, std::polar(1.0, ph(rng)));
        const double alt = rd::geometric_phase(scrambled).theta_g;
        const double dev = rd::circle_distance(base, alt);
        checks.push_back({"gauge invariance", dev < 1e-12, rd::format_g17(dev)});
    }
    if (const char* hook = std::getenv("RINGDEFECT_VALIDATE_INJECT"))
        if (std::string(hook) == "fail")
            checks.push_back({"injected failure (test hook)", false, "forced"});

    bool all = true;
    for (const auto& c : checks) {
        all = all && c.pass;
        std::printf("%-28s %s  (%s)\n", c.name.c_str(), c.pass ? "PASS" : "FAIL",
                    c.detail.c_str());
    }
    const double secs = std::chrono::duration<double>(clock::now() - t0).count();
    std::printf("validate: %s in %.1f s\n", all ? "all checks passed" : "FAILURES present",
                secs);
    return all ? 0 : kExitValidation;
}

// Reads a key=value config file into "--key value" tokens. Lines starting with
// '#' and blank lines are skipped; values may be double-quoted.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw rd::io_error("cannot read config file " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(f, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        const auto eq = line.find('=', first);
        if (eq == std::string::npos)
            throw rd::io_error("config line is not key=value: " + line);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            const auto b = s.find_last_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            s = s.substr(a, b - a + 1);
            if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
                s = s.substr(1, s.size() - 2);
            return s;
        };
        const std::string key = trim(line.substr(first, eq - first));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw rd::io_error("config line has an empty key: " + line);
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectrum and defect-cycling geometric phase of two contact-interacting "
                 "bosons on a ring with an SU(1,1) defect"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    // --config FILE injects key=value pairs as flags right after the
    // subcommand, so explicitly passed flags win.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t m = 0; m < args.size(); ++m) {
            std::string file;
            if (args[m] == "--config" && m + 1 < args.size()) {
                file = args[m + 1];
                args.erase(args.begin() + m, args.begin() + m + 2);
            } else if (args[m].rfind("--config=", 0) == 0) {
                file = args[m].substr(9);
                args.erase(args.begin() + m);
            } else {
                continue;
            }
            const auto tokens = config_tokens(file);
            const std::size_t after_sub = args.empty() ? 0 : 1;
            args.insert(args.begin() + after_sub, tokens.begin(), tokens.end());
            break;
        }
    } catch (const rd::io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    }
    std::vector<char*> argv2;
    argv2.push_back(argv[0]);
    for (auto& a : args) argv2.push_back(a.data());

    double eta = 2.0, alpha = 0.0, c = 0.1, L = 5.0;
    double k_min = 0.02, k_max = 6.0, step = 0.02;
    std::string out_dir = ".", out, format = "csv", state = "1,3";
    std::string etas = "0.5,1,2,3";
    double c_min = 0.0, c_max = 30.0;
    int c_count = 61, steps = 256, max_index = 6;

    std::string config_doc;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_doc,
                        "Read options from a key=value file; flags win")
            ->type_name("FILE");
    };
    auto add_phys = [&](CLI::App* sub, bool with_alpha) {
        add_common(sub);
        sub->add_option("--eta", eta, "Defect barrier strength (>= 0)");
        if (with_alpha) sub->add_option("--alpha", alpha, "Defect phase shift (radians)");
        sub->add_option("--c", c, "Interaction strength (>= 0)");
        sub->add_option("--L", L, "Ring circumference (> 0)");
    };

    auto* curves = app.add_subcommand("curves", "Spectral curve families and roots");
    add_phys(curves, true);
    curves->add_option("--k-min", k_min, "Window lower edge");
    curves->add_option("--k-max", k_max, "Window upper edge");
    curves->add_option("--step", step, "Scan granularity");
    curves->add_option("--out-dir", out_dir, "Output directory");

    auto* roots = app.add_subcommand("roots", "Enumerated spectral roots");
    add_phys(roots, true);
    roots->add_option("--max-index", max_index, "Largest state index");
    roots->add_option("--out", out, "Output file (roots.csv)");

    auto* phase = app.add_subcommand("phase", "Geometric phase of one state");
    add_phys(phase, false);
    phase->add_option("--state", state, "State indices i,j");
    phase->add_option("--steps", steps, "Initial alpha samples (>= 8)");
    phase->add_option("--out", out, "Output file; '-' or empty for stdout");
    phase->add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* sweep = app.add_subcommand("sweep", "Phase vs interaction table");
    add_common(sweep);
    sweep->add_option("--state", state, "State indices i,j");
    sweep->add_option("--etas", etas, "Comma-separated eta values");
    sweep->add_option("--c-min", c_min, "Smallest c");
    sweep->add_option("--c-max", c_max, "Largest c");
    sweep->add_option("--c-count", c_count, "Number of c samples");
    sweep->add_option("--L", L, "Ring circumference");
    sweep->add_option("--steps", steps, "Initial alpha samples per cell");
    sweep->add_option("--out", out, "Output CSV file")->required();

    app.add_subcommand("validate", "Fast self-test; exit 0 iff all checks pass");

    CLI11_PARSE(app, static_cast<int>(argv2.size()), argv2.data());

    try {
        if (curves->parsed())
            return cmd_curves(eta, alpha, c, L, k_min, k_max, step, out_dir);
        if (roots->parsed()) {
            if (out.empty()) out = "roots.csv";
            return cmd_roots(eta, alpha, c, L, max_index, out);
        }
        if (phase->parsed()) return cmd_phase(state, eta, c, L, steps, out, format);
        if (sweep->parsed())
            return cmd_sweep(state, etas, c_min, c_max, c_count, L, steps, out);
        return cmd_validate();
    } catch (const rd::io_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const rd::enumeration_error& e) {
        std::cerr << "enumeration failed for state (" << e.i << "," << e.j << "): " << e.what()
                  << "\n";
        return kExitSolver;
    } catch (const rd::invalid_parameter_error& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitSolver;
    } catch (const rd::error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
}
