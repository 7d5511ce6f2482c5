#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qsl/dynamics.hpp"
#include "qsl/geometry.hpp"
#include "qsl/linalg.hpp"
#include "qsl/measurement.hpp"
#include "qsl/spin_example.hpp"

namespace qsl {

inline constexpr const char* kVersion = "0.1.0";

/// Config or input errors: CLI exit code 1.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
/// Filesystem errors: CLI exit code 3. Compute errors stay std::runtime_error (exit 2).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Experiment { Simulate, SweepF, SweepTSpeed, SweepTDistance, ZenoCheck, SmalltimeCheck };
enum class SystemKind { Spin, Custom };
enum class Method { Exp, Rk4, Commuting };

struct RunConfig {
    Experiment experiment = Experiment::Simulate;
    SystemKind system = SystemKind::Spin;
    Method method = Method::Exp;

    spin::SpinExampleConfig spin;

    // custom system (row-major real/imag parts)
    int dimension = 2;
    std::optional<Matrix> custom_h0;
    std::optional<Matrix> custom_observable;
    std::optional<CVector> custom_initial;

    std::vector<double> f_values;  // empty means experiment default
    double speed_time = 0.1;
    double t_sweep_max = 3.0;
    int t_sweep_points = 300;
    double smalltime_max = 0.01;
    int smalltime_points = 21;

    std::string source_text;  // echoed into the manifest
};

namespace cfg_detail {

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

struct Value {
    enum class Kind { Number, Array, Word } kind;
    double number = 0.0;
    std::vector<double> array;
    std::string word;
    int line = 0;
};

inline std::map<std::string, Value> tokenize(const std::string& text) {
    std::map<std::string, Value> out;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ValidationError("config line " + std::to_string(lineno) + ": empty key or value");
        if (out.count(key))
            throw ValidationError("config line " + std::to_string(lineno) + ": duplicate key '" +
                                  key + "'");
        Value v;
        v.line = lineno;
        if (val.front() == '[') {
            if (val.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) +
                                      ": unterminated array");
            v.kind = Value::Kind::Array;
            std::string body = val.substr(1, val.size() - 2);
            std::stringstream items(body);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = trim(item);
                double x;
                if (!parse_number(item, x))
                    throw ValidationError("config line " + std::to_string(lineno) +
                                          ": bad array element '" + item + "'");
                v.array.push_back(x);
            }
        } else if (parse_number(val, v.number)) {
            v.kind = Value::Kind::Number;
        } else {
            v.kind = Value::Kind::Word;
            v.word = val;
        }
        out.emplace(std::move(key), std::move(v));
    }
    return out;
}

inline const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys{
        "experiment", "system",    "method",         "omega",
        "alpha",      "hbar",      "a1",             "a2",
        "delta_a",    "a_record",  "f",              "t_final",
        "samples",    "dimension", "h0_real",        "h0_imag",
        "observable_real",         "observable_imag", "initial_real",
        "initial_imag", "f_values", "speed_time",    "T_max",
        "T_points",   "t_max",     "t_points"};
    return keys;
}

inline double require_finite(const Value& v, const std::string& key) {
    if (v.kind != Value::Kind::Number)
        throw ValidationError("config key '" + key + "': expected a number");
    if (!std::isfinite(v.number))
        throw ValidationError("config key '" + key + "': value must be finite");
    return v.number;
}

inline Matrix complex_from_parts(const std::vector<double>& re, const std::vector<double>* im,
                                 int d, const std::string& key) {
    if (static_cast<int>(re.size()) != d * d)
        throw ValidationError("config key '" + key + "_real': expected " + std::to_string(d * d) +
                              " row-major entries");
    if (im && static_cast<int>(im->size()) != d * d)
        throw ValidationError("config key '" + key + "_imag': expected " + std::to_string(d * d) +
                              " row-major entries");
    Matrix m(d, d);
    for (int r = 0; r < d; ++r)
        for (int c = 0; c < d; ++c)
            m(r, c) = Complex(re[static_cast<std::size_t>(r * d + c)],
                              im ? (*im)[static_cast<std::size_t>(r * d + c)] : 0.0);
    return m;
}

}  // namespace cfg_detail

inline RunConfig parse_config(const std::string& text) {
    using cfg_detail::Value;
    auto values = cfg_detail::tokenize(text);
    for (const auto& [key, v] : values)
        if (!cfg_detail::known_keys().count(key))
            throw ValidationError("config line " + std::to_string(v.line) + ": unknown key '" + key +
                                  "'");

    RunConfig cfg;
    cfg.source_text = text;

    auto word = [&](const char* key) -> std::optional<std::string> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        if (it->second.kind != Value::Kind::Word)
            throw ValidationError(std::string("config key '") + key + "': expected a word");
        return it->second.word;
    };
    auto number = [&](const char* key, double fallback) {
        auto it = values.find(key);
        return it == values.end() ? fallback : cfg_detail::require_finite(it->second, key);
    };
    auto array = [&](const char* key) -> std::optional<std::vector<double>> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        if (it->second.kind != Value::Kind::Array)
            throw ValidationError(std::string("config key '") + key + "': expected an array");
        for (double x : it->second.array)
            if (!std::isfinite(x))
                throw ValidationError(std::string("config key '") + key +
                                      "': array values must be finite");
        return it->second.array;
    };

    auto exp_word = word("experiment");
    if (!exp_word) throw ValidationError("config: missing required key 'experiment'");
    static const std::map<std::string, Experiment> experiments{
        {"simulate", Experiment::Simulate},
        {"sweep-f", Experiment::SweepF},
        {"sweep-T-speed", Experiment::SweepTSpeed},
        {"sweep-T-distance", Experiment::SweepTDistance},
        {"zeno-check", Experiment::ZenoCheck},
        {"smalltime-check", Experiment::SmalltimeCheck}};
    auto eit = experiments.find(*exp_word);
    if (eit == experiments.end())
        throw ValidationError("config key 'experiment': unknown value '" + *exp_word + "'");
    cfg.experiment = eit->second;

    if (auto s = word("system")) {
        if (*s == "spin")
            cfg.system = SystemKind::Spin;
        else if (*s == "custom")
            cfg.system = SystemKind::Custom;
        else
            throw ValidationError("config key 'system': unknown value '" + *s + "'");
    }
    if (auto m = word("method")) {
        if (*m == "exp")
            cfg.method = Method::Exp;
        else if (*m == "rk4")
            cfg.method = Method::Rk4;
        else if (*m == "commuting")
            cfg.method = Method::Commuting;
        else
            throw ValidationError("config key 'method': unknown value '" + *m + "'");
    }

    spin::SpinExampleConfig& sp = cfg.spin;
    sp.omega = number("omega", sp.omega);
    sp.alpha = number("alpha", sp.alpha);
    sp.hbar = number("hbar", sp.hbar);
    sp.a1 = number("a1", sp.a1);
    sp.a2 = number("a2", sp.a2);
    sp.delta_a = number("delta_a", sp.delta_a);
    sp.a_record = number("a_record", sp.a_record);
    sp.f = number("f", sp.f);
    sp.t_final = number("t_final", sp.t_final);
    sp.samples = static_cast<int>(number("samples", sp.samples));

    cfg.dimension = static_cast<int>(number("dimension", cfg.dimension));
    cfg.speed_time = number("speed_time", cfg.speed_time);
    cfg.t_sweep_max = number("T_max", cfg.t_sweep_max);
    cfg.t_sweep_points = static_cast<int>(number("T_points", cfg.t_sweep_points));
    cfg.smalltime_max = number("t_max", cfg.smalltime_max);
    cfg.smalltime_points = static_cast<int>(number("t_points", cfg.smalltime_points));
    if (auto fv = array("f_values")) cfg.f_values = *fv;

    if (cfg.system == SystemKind::Custom) {
        int d = cfg.dimension;
        if (d < 1 || d > kMaxDim)
            throw ValidationError("config key 'dimension': must be in [1, " +
                                  std::to_string(kMaxDim) + "]");
        auto h0r = array("h0_real");
        if (!h0r) throw ValidationError("config: custom system requires 'h0_real'");
        auto h0i = array("h0_imag");
        cfg.custom_h0 = cfg_detail::complex_from_parts(*h0r, h0i ? &*h0i : nullptr, d, "h0");
        auto ar = array("observable_real");
        if (!ar) throw ValidationError("config: custom system requires 'observable_real'");
        auto ai = array("observable_imag");
        cfg.custom_observable =
            cfg_detail::complex_from_parts(*ar, ai ? &*ai : nullptr, d, "observable");
        auto ir = array("initial_real");
        if (!ir) throw ValidationError("config: custom system requires 'initial_real'");
        auto ii = array("initial_imag");
        if (static_cast<int>(ir->size()) != d || (ii && static_cast<int>(ii->size()) != d))
            throw ValidationError("config: initial state arrays must have 'dimension' entries");
        CVector v(d);
        for (int k = 0; k < d; ++k)
            v[k] = Complex((*ir)[static_cast<std::size_t>(k)],
                           ii ? (*ii)[static_cast<std::size_t>(k)] : 0.0);
        cfg.custom_initial = v;
    } else {
        // spin-system invariants surface as validation errors at parse time
        try {
            sp.validate();
            if (std::abs(sp.omega - sp.alpha) > 1e-12)
                throw std::invalid_argument("SpinExampleConfig: omega must equal alpha");
        } catch (const std::invalid_argument& e) {
            throw ValidationError(e.what());
        }
    }

    if (cfg.system == SystemKind::Custom &&
        (cfg.experiment == Experiment::SweepF || cfg.experiment == Experiment::SweepTSpeed ||
         cfg.experiment == Experiment::SweepTDistance))
        throw ValidationError("config: sweep experiments require system = spin");

    if (!(cfg.speed_time > 0.0)) throw ValidationError("config key 'speed_time': must be > 0");
    if (!(cfg.t_sweep_max > 0.0)) throw ValidationError("config key 'T_max': must be > 0");
    if (cfg.t_sweep_points < 2) throw ValidationError("config key 'T_points': must be >= 2");
    if (!(cfg.smalltime_max > 0.0)) throw ValidationError("config key 't_max': must be > 0");
    if (cfg.smalltime_points < 3) throw ValidationError("config key 't_points': must be >= 3");
    return cfg;
}

inline RunConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Shortest round-trip decimal representation.
inline std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, ptr);
}

namespace run_detail {

struct System {
    SplitHamiltonian hamiltonian;
    MeasurementSpec measurement;
    StateVector psi0;
};

inline System build_system(const RunConfig& cfg) {
    if (cfg.system == SystemKind::Spin) {
        spin::SpinExample ex = spin::build_example(cfg.spin);
        return {std::move(ex.hamiltonian), std::move(ex.measurement), std::move(ex.psi0)};
    }
    try {
        ComplexMatrix h0(*cfg.custom_h0, Symmetry::Hermitian);
        ComplexMatrix a(*cfg.custom_observable, Symmetry::Hermitian);
        MeasurementSpec spec(a, cfg.spin.a_record, cfg.spin.delta_a, cfg.spin.f,
                             MeasurementSpec::default_penalty, cfg.spin.hbar);
        StateVector psi0 = StateVector(*cfg.custom_initial, NormClass::Unnormalized).normalized();
        return {make_hamiltonian(h0, spec), std::move(spec), std::move(psi0)};
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

inline Trajectory evolve(const RunConfig& cfg, const System& sys, const std::vector<double>& grid) {
    switch (cfg.method) {
        case Method::Rk4: return evolve_rk4(sys.hamiltonian, sys.psi0, grid);
        case Method::Commuting: return evolve_commuting(sys.hamiltonian, sys.psi0, grid);
        case Method::Exp: default: return evolve_exp(sys.hamiltonian, sys.psi0, grid);
    }
}

struct Csv {
    std::string name;
    std::string header;
    std::vector<std::vector<double>> rows;
};

struct RunResult {
    std::vector<Csv> csvs;
    std::vector<std::pair<std::string, std::string>> manifest_extra;
};

inline RunResult dispatch(const RunConfig& cfg) {
    RunResult res;
    switch (cfg.experiment) {
        case Experiment::SweepF: {
            auto grid = cfg.f_values.empty() ? spin::default_f_grid() : cfg.f_values;
            Csv csv{"fig1.csv", "f,t,V", {}};
            for (const auto& row : spin::figure1_sweep(cfg.spin, grid, cfg.speed_time))
                csv.rows.push_back({row.f, row.t, row.v});
            res.csvs.push_back(std::move(csv));
            break;
        }
        case Experiment::SweepTSpeed: {
            auto t_grid = spin::linspace(cfg.t_sweep_max / cfg.t_sweep_points, cfg.t_sweep_max,
                                         cfg.t_sweep_points);
            auto f_values = cfg.f_values.empty() ? std::vector<double>{0.0, 5.0} : cfg.f_values;
            Csv csv{"fig2.csv", "T,f,V_bar", {}};
            for (const auto& row : spin::figure2_sweep(cfg.spin, t_grid, f_values))
                csv.rows.push_back({row.T, row.f, row.v_bar});
            res.csvs.push_back(std::move(csv));
            break;
        }
        case Experiment::SweepTDistance: {
            auto t_grid = spin::linspace(cfg.t_sweep_max / cfg.t_sweep_points, cfg.t_sweep_max,
                                         cfg.t_sweep_points);
            auto f_values = cfg.f_values.empty() ? std::vector<double>{0.0, 5.0} : cfg.f_values;
            Csv csv{"fig3.csv", "T,f,S0", {}};
            for (const auto& row : spin::figure3_sweep(cfg.spin, t_grid, f_values))
                csv.rows.push_back({row.T, row.f, row.s0});
            res.csvs.push_back(std::move(csv));
            break;
        }
        case Experiment::Simulate: {
            System sys = build_system(cfg);
            auto grid = spin::linspace(0.0, cfg.spin.t_final, cfg.spin.samples);
            Trajectory traj = evolve(cfg, sys, grid);
            std::vector<double> v(grid.size());
            Csv csv{"trajectory.csv", "t,survival,V", {}};
            for (std::size_t k = 0; k < grid.size(); ++k) {
                v[k] = speed_from_operators(sys.hamiltonian, StateVector(traj.psi[k]), grid[k]);
                csv.rows.push_back({grid[k], traj.survival[k], v[k]});
            }
            QslReport rep = qsl_time(traj, v);
            res.csvs.push_back(std::move(csv));
            res.manifest_extra = {{"v_bar", format_double(rep.v_bar)},
                                  {"path_length", format_double(rep.path_length)},
                                  {"geodesic", format_double(rep.geodesic)},
                                  {"t_qsl", format_double(rep.t_qsl)},
                                  {"total_time", format_double(rep.total_time)}};
            break;
        }
        case Experiment::ZenoCheck: {
            System sys = build_system(cfg);
            ZenoPrediction pred = zeno_prediction(sys.measurement, sys.psi0);
            auto grid = spin::linspace(0.0, cfg.spin.t_final, cfg.spin.samples);
            Trajectory traj = evolve(cfg, sys, grid);
            Csv csv{"zeno.csv", "t,fidelity,V", {}};
            double final_fid = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                double fid = fidelity(traj.psi[k], pred.attractor_state);
                double v = speed_from_operators(sys.hamiltonian, StateVector(traj.psi[k]), grid[k]);
                csv.rows.push_back({grid[k], fid, v});
                final_fid = fid;
            }
            res.csvs.push_back(std::move(csv));
            std::string indices;
            for (int i : pred.attractor_indices)
                indices += (indices.empty() ? "" : " ") + std::to_string(i);
            res.manifest_extra = {
                {"attractor_index", indices},
                {"attractor_tie", pred.tie ? "true" : "false"},
                {"limit_h1_expectation", format_double(pred.limit_h1_expectation)},
                {"final_fidelity", format_double(final_fid)}};
            break;
        }
        case Experiment::SmalltimeCheck: {
            System sys = build_system(cfg);
            auto f_values = cfg.f_values.empty() ? std::vector<double>{1.0, 5.0} : cfg.f_values;
            Csv csv{"smalltime.csv", "f,t,V_full,V_linear,residual", {}};
            double x_value = 0.0;
            for (double f : f_values) {
                RunConfig c = cfg;
                c.spin.f = f;
                System sf = build_system(c);
                auto ts = spin::linspace(0.0, cfg.smalltime_max, cfg.smalltime_points);
                for (double t : ts) {
                    StateVector psi_t =
                        t == 0.0 ? sf.psi0
                                 : StateVector(evolve_exp(sf.hamiltonian, sf.psi0, {0.0, t})
                                                   .psi.back());
                    double v_full = speed_from_operators(sf.hamiltonian, psi_t, t);
                    SmallTimeSpeed st =
                        small_time_speed(sf.measurement, sf.hamiltonian.h0(), sf.psi0, t);
                    x_value = st.x;
                    csv.rows.push_back({f, t, v_full, st.v, std::abs(v_full - st.v)});
                }
            }
            res.csvs.push_back(std::move(csv));
            res.manifest_extra = {{"X", format_double(x_value)},
                                  {"X_sign", x_value > 0 ? "speed-up" : "slow-down"}};
            break;
        }
    }
    return res;
}

}  // namespace run_detail

/// Execute a parsed config: all compute first, then single-writer file output.
/// Returns the list of files written (CSV paths first, manifest last).
inline std::vector<std::filesystem::path> run(const RunConfig& cfg,
                                              const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    auto t0 = std::chrono::steady_clock::now();

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir.string());
    {
        fs::path probe = out_dir / ".qsl_write_probe";
        std::ofstream p(probe);
        if (!p) throw IoError("output directory is not writable: " + out_dir.string());
        p.close();
        fs::remove(probe, ec);
    }

    run_detail::RunResult res = run_detail::dispatch(cfg);
    double wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::vector<fs::path> written;
    auto cleanup = [&]() {
        for (const auto& p : written) {
            std::error_code rec;
            fs::remove(p, rec);
        }
    };
    try {
        for (const auto& csv : res.csvs) {
            fs::path p = out_dir / csv.name;
            std::ofstream out(p, std::ios::binary);
            if (!out) throw IoError("cannot write " + p.string());
            written.push_back(p);
            out << csv.header << "\n";
            for (const auto& row : csv.rows) {
                for (std::size_t k = 0; k < row.size(); ++k)
                    out << (k ? "," : "") << format_double(row[k]);
                out << "\n";
            }
            if (!out) throw IoError("write failure on " + p.string());
        }
        fs::path mp = out_dir / "manifest.txt";
        std::ofstream man(mp, std::ios::binary);
        if (!man) throw IoError("cannot write " + mp.string());
        written.push_back(mp);
        man << "# qsl run manifest\n";
        man << "version = " << kVersion << "\n";
        man << "wall_time_ms = " << format_double(wall_ms) << "\n";
        for (const auto& [k, v] : res.manifest_extra) man << k << " = " << v << "\n";
        man << "\n[tolerances]\n";
        man << "hermitian_tol = " << format_double(kHermitianTol) << "\n";
        man << "norm_tol = " << format_double(kNormTol) << "\n";
        man << "imag_residue_tol = " << format_double(kImagResidueTol) << "\n";
        man << "variance_clamp = " << format_double(kVarianceClamp) << "\n";
        man << "commutator_tol = " << format_double(kCommutatorTol) << "\n";
        man << "richardson_tol = " << format_double(kRichardsonTol) << "\n";
        man << "radicand_gate = " << format_double(kRadicandGate) << "\n";
        man << "survival_floor = " << format_double(kSurvivalFloor) << "\n";
        man << "linearization_window = " << format_double(kLinearizationWindow) << "\n";
        man << "\n[config]\n" << cfg.source_text;
        if (!cfg.source_text.empty() && cfg.source_text.back() != '\n') man << "\n";
        if (!man) throw IoError("write failure on " + mp.string());
    } catch (...) {
        cleanup();
        throw;
    }
    return written;
}

/// Write a self-contained plotting script next to the result CSVs.
inline std::filesystem::path emit_plot_script(const std::filesystem::path& results_dir) {
    namespace fs = std::filesystem;
    static const std::vector<std::pair<std::string, std::string>> expected{
        {"fig1.csv", "speed vs measurement strength"},
        {"fig2.csv", "time-averaged speed vs total time"},
        {"fig3.csv", "geodesic distance vs total time"},
        {"trajectory.csv", "survival and speed vs time"},
        {"zeno.csv", "attractor fidelity and speed vs time"},
        {"smalltime.csv", "small-time speed law vs full numerics"}};
    std::vector<std::string> present;
    for (const auto& [name, _] : expected)
        if (fs::exists(results_dir / name)) present.push_back(name);
    if (present.empty()) {
        std::string names;
        for (const auto& [name, _] : expected) names += (names.empty() ? "" : ", ") + name;
        throw IoError("emit_plot_script: no result CSVs in " + results_dir.string() +
                      " (expected one of: " + names + ")");
    }

    fs::path sp = results_dir / "plot_results.py";
    std::ofstream out(sp, std::ios::binary);
    if (!out) throw IoError("cannot write " + sp.string());
    out << R"PY(#!/usr/bin/env python3
"""Render figures from the CSVs in this directory."""
import csv
import os
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read(name):
    with open(os.path.join(HERE, name), newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {k: [float(r[k]) for r in rows] for k in rows[0]}


def by_f(data, xkey, ykey):
    series = {}
    for x, f, y in zip(data[xkey], data["f"], data[ykey]):
        series.setdefault(f, ([], []))
        series[f][0].append(x)
        series[f][1].append(y)
    return series


def plot_fig1():
    d = read("fig1.csv")
    plt.figure()
    plt.plot(d["f"], d["V"], "k.-")
    plt.xlabel("measurement strength f")
    plt.ylabel("V")
    plt.title("Evolution speed vs measurement strength")
    plt.savefig(os.path.join(HERE, "fig1_speed_vs_strength.png"), dpi=150)


def plot_fig2():
    d = read("fig2.csv")
    plt.figure()
    for f, (x, y) in sorted(by_f(d, "T", "V_bar").items()):
        color = "red" if f == 0 else "blue"
        plt.plot(x, y, color=color, label=f"f = {f:g}")
    plt.xlabel("total time T")
    plt.ylabel("time-averaged speed")
    plt.legend()
    plt.title("Time-averaged speed vs total time")
    plt.savefig(os.path.join(HERE, "fig2_avg_speed_vs_time.png"), dpi=150)


def plot_fig3():
    d = read("fig3.csv")
    plt.figure()
    for f, (x, y) in sorted(by_f(d, "T", "S0").items()):
        color = "red" if f == 0 else "blue"
        plt.plot(x, y, color=color, label=f"f = {f:g}")
    plt.xlabel("total time T")
    plt.ylabel("geodesic distance S0")
    plt.legend()
    plt.title("Distinguishability vs total time")
    plt.savefig(os.path.join(HERE, "fig3_distance_vs_time.png"), dpi=150)


def plot_trajectory():
    d = read("trajectory.csv")
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
    ax1.plot(d["t"], d["survival"], "k-")
    ax1.set_ylabel("survival probability")
    ax2.plot(d["t"], d["V"], "b-")
    ax2.set_ylabel("V")
    ax2.set_xlabel("t")
    fig.suptitle("Simulated trajectory")
    fig.savefig(os.path.join(HERE, "trajectory.png"), dpi=150)


def plot_zeno():
    d = read("zeno.csv")
    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True)
    ax1.plot(d["t"], d["fidelity"], "k-")
    ax1.set_ylabel("attractor fidelity")
    ax2.plot(d["t"], d["V"], "b-")
    ax2.set_ylabel("V")
    ax2.set_xlabel("t")
    fig.suptitle("Zeno freezing check")
    fig.savefig(os.path.join(HERE, "zeno.png"), dpi=150)


def plot_smalltime():
    d = read("smalltime.csv")
    plt.figure()
    for f, (x, y) in sorted(by_f(d, "t", "V_full").items()):
        plt.plot(x, y, "-", label=f"full, f = {f:g}")
    for f, (x, y) in sorted(by_f(d, "t", "V_linear").items()):
        plt.plot(x, y, "--", label=f"first order, f = {f:g}")
    plt.xlabel("t")
    plt.ylabel("V")
    plt.legend()
    plt.title("Small-time speed law")
    plt.savefig(os.path.join(HERE, "smalltime.png"), dpi=150)


PLOTS = {
    "fig1.csv": plot_fig1,
    "fig2.csv": plot_fig2,
    "fig3.csv": plot_fig3,
    "trajectory.csv": plot_trajectory,
    "zeno.csv": plot_zeno,
    "smalltime.csv": plot_smalltime,
}


def main():
    made = 0
    for name, fn in PLOTS.items():
        if os.path.exists(os.path.join(HERE, name)):
            fn()
            made += 1
    if made == 0:
        print("no result CSVs found", file=sys.stderr)
        return 1
    print(f"rendered {made} figure(s) into {HERE}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
)PY";
    if (!out) throw IoError("write failure on " + sp.string());
    return sp;
}

}  // namespace qsl
