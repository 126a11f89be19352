#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "entrain/arnold.hpp"
#include "entrain/error.hpp"
#include "entrain/io.hpp"
#include "entrain/phase_reduce.hpp"
#include "entrain/sim.hpp"
#include "entrain/synthesis.hpp"

using namespace entrain;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Global {
    int jobs = 0;
    fs::path output_dir = ".";
    bool seedless = false;
};

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidArgument:
            return 1;
        case ErrorKind::InfeasibleEnergy:
        case ErrorKind::EntrainmentImpossible:
        case ErrorKind::UndefinedLimit:
        case ErrorKind::NoRangeGain:
        case ErrorKind::NoTongue:
        case ErrorKind::InsufficientDecay:
        case ErrorKind::NoBoundaryFound:
            return 3;
        default:
            return 2;
    }
}

void setup_logging() {
    spdlog::set_default_logger(spdlog::stderr_logger_mt("entrain"));
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("ENTRAIN_LOG");
    spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::info);
}

// A loaded phase model with the raw bytes kept for digests.
struct Loaded {
    PhaseModel pm;
    json doc;
    std::string bytes;
};

Loaded load_phase_model(const std::string& path) {
    Loaded l;
    l.bytes = read_text_file(path);
    try {
        l.doc = json::parse(l.bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, path + ": " + e.what());
    }
    l.pm = phase_model_from_json(l.doc);
    return l;
}

std::optional<ModelConfig> embedded_config(const json& doc) {
    if (!doc.contains("config")) return std::nullopt;
    return model_config_from_json(doc.at("config"));
}

LimitCycle build_cycle(const ModelConfig& cfg, const VectorField& field) {
    spdlog::info("searching for the limit cycle of {}", cfg.model);
    return find_limit_cycle(field, cfg.initial_state(), cfg.cycle_options());
}

// ---- prc ----

struct PrcArgs {
    std::string config;
    bool adjoint = false;
    int phases = 512;
    int order = 64;
};

void cmd_prc(const Global& g, const PrcArgs& a) {
    const std::string bytes = read_text_file(a.config);
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, a.config + ": " + e.what());
    }
    const ModelConfig cfg = model_config_from_json(doc);
    const VectorField field = cfg.field();
    const LimitCycle cycle = build_cycle(cfg, field);
    spdlog::info("period {:.8f}, omega {:.8f}", cycle.period, cycle.omega);

    PrcOptions po;
    po.phases = a.phases;
    po.order = a.order;
    po.jobs = g.jobs;
    const PhaseModel pm = prc_projection(field, cycle, po);

    RunManifest m("prc", ENTRAIN_VERSION);
    m.add_input("config", bytes);
    m.set_parameter("phases", a.phases);
    m.set_parameter("order", a.order);
    m.set_parameter("adjoint", a.adjoint);

    json out = to_json(pm);
    out["config"] = to_json(cfg);
    m.write(g.output_dir, "phase_model.json", out.dump(2) + "\n");
    m.write(g.output_dir, "prc.csv", series_csv(pm.Z, "theta", "Z"));

    std::vector<std::string> header{"theta"};
    for (const auto& n : cfg.column_names()) header.push_back(n);
    std::vector<std::vector<CsvCell>> rows;
    for (int k = 0; k < cycle.resolution(); ++k) {
        std::vector<CsvCell> row{kTwoPi * k / cycle.resolution()};
        for (double x : cycle.samples[k]) row.emplace_back(x);
        rows.push_back(std::move(row));
    }
    m.write(g.output_dir, "limit_cycle.csv", csv_text(header, rows));

    std::cout << "period " << format_number(cycle.period) << " ms, omega " << format_number(cycle.omega)
              << " rad/ms\n";

    if (a.adjoint) {
        const AdjointReport rep = prc_adjoint_report(field, cycle, po);
        const std::vector<double> p = pm.Z.sample(1024), q = rep.model.Z.sample(1024);
        double dev = 0.0, peak = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            dev = std::max(dev, std::abs(p[i] - q[i]));
            peak = std::max(peak, std::abs(p[i]));
        }
        const json check{{"max_deviation", dev},
                         {"relative_deviation", dev / peak},
                         {"adjoint_periods", rep.periods},
                         {"adjoint_closure", rep.closure}};
        m.write(g.output_dir, "prc_check.json", check.dump(2) + "\n");
        std::cout << "adjoint deviation " << format_number(dev / peak) << " of max|Z|\n";
    }
    m.finish(g.output_dir);
}

// ---- synth ----

struct SynthArgs {
    std::string model;
    std::string ratio;
    std::string family;
    std::optional<double> target, power, omega1, omega2;
};

void cmd_synth(const Global& g, const SynthArgs& a) {
    const Loaded l = load_phase_model(a.model);
    const SubharmonicRatio r = SubharmonicRatio::parse(a.ratio);
    const Family fam = family_from_string(a.family);
    auto need = [&](const std::optional<double>& v, const char* flag) {
        if (!v) throw Error(ErrorKind::InvalidArgument, "--family " + a.family + " requires " + flag);
        return *v;
    };

    RunManifest m("synth", ENTRAIN_VERSION);
    m.add_input("phase_model", l.bytes);
    m.set_parameter("ratio", r.str());
    m.set_parameter("family", to_string(fam));

    Waveform w;
    json meta = json::object();
    switch (fam) {
        case Family::MinEnergy:
            w = min_energy_single(l.pm, r, need(a.target, "--target"));
            break;
        case Family::Fast: {
            const FastSolution s = fast_waveform(l.pm, r, need(a.target, "--target"), need(a.power, "--power"));
            w = s.waveform;
            meta = {{"multiplier", s.lambda}, {"predicted_rate", s.predicted_rate}, {"min_power", s.min_power}};
            break;
        }
        case Family::Ensemble: {
            const EnsembleSolution s = ensemble_waveform(
                l.pm, r, {need(a.omega1, "--omega1"), need(a.omega2, "--omega2"), a.target.value_or(l.pm.omega)});
            w = s.waveform;
            meta = {{"case", to_string(s.case_label)}, {"mu_plus", s.mu_plus},         {"mu_minus", s.mu_minus},
                    {"omega_minus", s.omega_minus},    {"omega_plus", s.omega_plus}};
            break;
        }
        case Family::MaxRange: {
            const RangeSolution s = max_range_waveform(l.pm, r, need(a.power, "--power"), a.target);
            w = s.waveform;
            meta = {{"width", s.width}};
            break;
        }
        case Family::Custom:
            throw Error(ErrorKind::InvalidArgument, "custom waveforms are not synthesized");
    }
    m.set_parameter("target", w.target);
    if (a.power) m.set_parameter("power", *a.power);
    if (a.omega1) m.set_parameter("omega1", *a.omega1);
    if (a.omega2) m.set_parameter("omega2", *a.omega2);

    m.write(g.output_dir, "waveform.json", to_json(w).dump(2) + "\n");
    m.write(g.output_dir, "waveform.csv", series_csv(w.v, "eta", "v"));
    if (w.energy > 0.0) {
        const InteractionFn fn = interaction(l.pm.Z, w.v, r);
        m.write(g.output_dir, "interaction.csv", series_csv(fn.lambda, "phi", "lambda"));
        json ij = to_json(fn);
        ij["locking"] = meta;
        m.write(g.output_dir, "interaction.json", ij.dump(2) + "\n");
    } else {
        spdlog::warn("zero detuning gives the zero waveform; no interaction function written");
    }
    m.finish(g.output_dir);
    std::cout << to_string(fam) << " " << r.str() << " energy " << format_number(w.energy) << " rms "
              << format_number(w.rms()) << "\n";
}

// ---- tongue ----

struct TongueArgs {
    std::string model;
    std::string waveform;
    std::string mode = "theory";
    std::string kind = "single";
    int points = 101;
    double span = 0.1;
};

void cmd_tongue(const Global& g, const TongueArgs& a) {
    if (a.points < 1) throw Error(ErrorKind::InvalidArgument, "grid must have at least one point");
    if (!(a.span > 0.0 && a.span < 1.0)) throw Error(ErrorKind::InvalidArgument, "--span must lie in (0, 1)");
    const bool single = a.kind == "single";
    if (!single && a.kind != "ensemble") throw Error(ErrorKind::InvalidArgument, "--kind must be single or ensemble");
    const bool phase_sim = a.mode == "phase-sim" || a.mode == "all";
    const bool state_sim = a.mode == "state-sim" || a.mode == "all";
    if (!phase_sim && !state_sim && a.mode != "theory") {
        throw Error(ErrorKind::InvalidArgument, "--mode must be theory, phase-sim, state-sim or all");
    }
    if (state_sim && !single) throw Error(ErrorKind::InvalidArgument, "state-space sweeps support --kind single only");

    const Loaded l = load_phase_model(a.model);
    const std::string wbytes = read_text_file(a.waveform);
    json wdoc;
    try {
        wdoc = json::parse(wbytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, a.waveform + ": " + e.what());
    }
    const Waveform w = waveform_from_json(wdoc);
    const SubharmonicRatio r = w.ratio;
    const FourierSeries shape = w.unit_shape();

    RunManifest m("tongue", ENTRAIN_VERSION);
    m.add_input("phase_model", l.bytes);
    m.add_input("waveform", wbytes);
    m.set_parameter("mode", a.mode);
    m.set_parameter("kind", a.kind);
    m.set_parameter("points", a.points);
    m.set_parameter("span", a.span);

    const double center = single ? static_cast<double>(r.N()) / r.M() * l.pm.omega : w.target;
    const std::vector<double> grid = frequency_grid(center, a.points, a.span);
    const TongueBoundary theory =
        single ? single_tongue(l.pm, r, shape, grid) : ensemble_tongue(l.pm, r, shape, w.target, grid);
    m.write(g.output_dir, "tongue.csv", tongue_csv(theory));
    const json side{{"case", to_string(theory.case_label)},
                    {"ratio", r.str()},
                    {"axis", to_string(theory.axis)},
                    {"waveform_digest", sha256_hex(wbytes)},
                    {"lambda_plus", theory.lambda_plus},
                    {"lambda_minus", theory.lambda_minus}};
    m.write(g.output_dir, "tongue.json", side.dump(2) + "\n");
    std::cout << "case " << to_string(theory.case_label) << ", " << theory.points.size() << " points\n";

    if (phase_sim || state_sim) {
        // Lower boundary per abscissa: the smaller of the present sides.
        struct Row {
            double abscissa;
            std::optional<double> p;
            Side side;
        };
        std::vector<Row> rows;
        for (const auto& pt : theory.points) {
            Row row{pt.abscissa, std::nullopt, Side::Left};
            if (pt.p_left) row.p = pt.p_left;
            if (pt.p_right && (!row.p || *pt.p_right < *row.p)) {
                row.p = pt.p_right;
                row.side = Side::Right;
            }
            rows.push_back(row);
        }
        auto column = [&](bool state) {
            std::vector<BoundaryJob> jobs;
            std::optional<ModelConfig> cfg;
            std::optional<VectorField> field;
            std::optional<LimitCycle> cycle;
            if (state) {
                cfg = embedded_config(l.doc);
                if (!cfg) throw Error(ErrorKind::InvalidArgument, "phase model has no embedded model config");
                field = cfg->field();
                cycle = build_cycle(*cfg, *field);
            }
            for (const auto& row : rows) {
                if (!row.p || *row.p <= 0.0) continue;
                PhaseModel pm = l.pm;
                double wf = row.abscissa;
                if (!single) {
                    pm.omega = row.abscissa;
                    wf = w.omega_f;
                }
                LockTest lock = state ? state_lock_test(*field, *cycle, pm, shape, r, wf, *row.p)
                                      : phase_lock_test(pm, shape, r, wf, *row.p);
                jobs.push_back({row.abscissa, row.side, *row.p, std::move(lock)});
            }
            spdlog::info("{} sweep over {} points", state ? "state-space" : "phase-model", jobs.size());
            SweepResult res = tongue_sweep(jobs, theory.axis, r, g.jobs);
            std::map<double, std::optional<double>> out;
            for (const auto& pt : res.boundary.points) out[pt.abscissa] = pt.p_left ? pt.p_left : pt.p_right;
            if (res.failures > 0) {
                m.add_warning(std::to_string(res.failures) + (state ? " state-space" : " phase-model") +
                              " points failed");
                spdlog::warn("{} sweep points failed", res.failures);
            }
            return out;
        };
        std::map<double, std::optional<double>> phase_col, state_col;
        if (phase_sim) phase_col = column(false);
        if (state_sim) state_col = column(true);
        std::vector<std::vector<CsvCell>> csv;
        for (const auto& row : rows) {
            csv.push_back({row.abscissa, row.p, phase_col.count(row.abscissa) ? phase_col[row.abscissa] : std::nullopt,
                           state_col.count(row.abscissa) ? state_col[row.abscissa] : std::nullopt});
        }
        m.write(g.output_dir, "sweep.csv",
                csv_text({"abscissa", "p_min_theory", "p_min_phase", "p_min_state"}, csv));
    }
    m.finish(g.output_dir);
}

// ---- rate ----

struct RateArgs {
    std::string model;
    std::string waveform;
    std::optional<double> target;
    bool state_space = false;
    double offset = 0.4;
    int periods = 600;
};

void cmd_rate(const Global& g, const RateArgs& a) {
    const Loaded l = load_phase_model(a.model);
    const std::string wbytes = read_text_file(a.waveform);
    json wdoc;
    try {
        wdoc = json::parse(wbytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, a.waveform + ": " + e.what());
    }
    Waveform w = waveform_from_json(wdoc);
    if (a.target) w = make_waveform(w.v, w.ratio, *a.target, w.family);
    if (a.periods < 60) throw Error(ErrorKind::InvalidArgument, "--periods must be at least 60");

    const InteractionFn fn = interaction(l.pm.Z, w.v, w.ratio);
    const FixedPoints fp = fixed_points(fn, l.pm.omega - w.target);
    if (fp.stable.empty()) {
        throw Error(ErrorKind::InfeasibleEnergy, "waveform does not lock the oscillator at the target frequency");
    }
    // the root nearest zero; the fast family places it there by design
    double lock = fp.stable.front();
    for (double s : fp.stable) {
        if (std::abs(std::remainder(s, kTwoPi)) < std::abs(std::remainder(lock, kTwoPi))) lock = s;
    }
    const double theory = fn.lambda.derivative()(lock);

    RunManifest m("rate", ENTRAIN_VERSION);
    m.add_input("phase_model", l.bytes);
    m.add_input("waveform", wbytes);
    m.set_parameter("target", w.target);
    m.set_parameter("offset", a.offset);
    m.set_parameter("state_space", a.state_space);

    RateEstimate est;
    double settled = lock;
    if (!a.state_space) {
        const std::vector<double> psi = integrate_phase(l.pm, w, lock - a.offset, a.periods);
        const EntrainmentVerdict v = detect_entrainment_phase(psi, w.target);
        if (!v.locked) throw Error(ErrorKind::InsufficientDecay, "phase model did not lock");
        settled = v.series.back();
        est = rate_phase(psi, w.target, settled);
    } else {
        const auto cfg = embedded_config(l.doc);
        if (!cfg) throw Error(ErrorKind::InvalidArgument, "phase model has no embedded model config");
        const VectorField field = cfg->field();
        const LimitCycle cycle = build_cycle(*cfg, field);
        const double Te = kTwoPi / w.target;
        const auto peaks = forced_peak_times(field, cycle, w, lock - a.offset, a.periods * Te);
        est = rate_state(peaks, w.target);
    }
    json out = to_json(est);
    out["theory"] = theory;
    out["lock_phase"] = lock;
    if (!a.state_space) out["settled_phase"] = settled;
    m.write(g.output_dir, "rate.json", out.dump(2) + "\n");
    m.finish(g.output_dir);
    std::cout << (a.state_space ? "kappa2 " : "kappa1 ") << format_number(est.kappa) << ", theory "
              << format_number(theory) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Optimal subharmonic entrainment of oscillators"};
    app.require_subcommand(1);
    Global g;
    std::string out_dir = ".";
    app.add_option("--jobs", g.jobs, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    app.add_option("--output-dir", out_dir, "directory for output files");
    app.add_flag("--seedless", g.seedless, "reserved; every computation is deterministic");

    PrcArgs pa;
    auto* prc = app.add_subcommand("prc", "limit cycle and phase response curve");
    prc->add_option("config", pa.config, "model configuration JSON")->required();
    prc->add_flag("--adjoint", pa.adjoint, "cross-check against the adjoint method");
    prc->add_option("--phases", pa.phases, "phases sampled by the projection method")->check(CLI::PositiveNumber);
    prc->add_option("--order", pa.order, "Fourier order of the PRC")->check(CLI::PositiveNumber);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "optimal waveform synthesis");
    synth->add_option("model", sa.model, "phase model JSON")->required();
    synth->add_option("--ratio", sa.ratio, "N:M")->required();
    synth->add_option("--family", sa.family, "min, fast, ensemble or range")->required();
    synth->add_option("--target", sa.target, "entrainment frequency Omega (rad/ms)");
    synth->add_option("--power", sa.power, "input energy <v^2>");
    synth->add_option("--omega1", sa.omega1, "lowest natural frequency of the ensemble");
    synth->add_option("--omega2", sa.omega2, "highest natural frequency of the ensemble");

    TongueArgs ta;
    auto* tongue = app.add_subcommand("tongue", "Arnold tongue boundaries");
    tongue->add_option("model", ta.model, "phase model JSON")->required();
    tongue->add_option("waveform", ta.waveform, "waveform JSON")->required();
    tongue->add_option("--mode", ta.mode, "theory, phase-sim, state-sim or all");
    tongue->add_option("--kind", ta.kind, "single (forcing-frequency axis) or ensemble (natural-frequency axis)");
    tongue->add_option("--points", ta.points, "grid points");
    tongue->add_option("--span", ta.span, "relative half-width of the grid");

    RateArgs ra;
    auto* rate = app.add_subcommand("rate", "entrainment rate");
    rate->add_option("model", ra.model, "phase model JSON")->required();
    rate->add_option("waveform", ra.waveform, "waveform JSON")->required();
    rate->add_option("--target", ra.target, "override the waveform's target frequency");
    rate->add_flag("--state-space", ra.state_space, "measure on the full model");
    rate->add_option("--offset", ra.offset, "initial phase offset (rad)");
    rate->add_option("--periods", ra.periods, "simulated entrainment periods");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }
    g.output_dir = out_dir;

    try {
        if (*prc) cmd_prc(g, pa);
        if (*synth) cmd_synth(g, sa);
        if (*tongue) cmd_tongue(g, ta);
        if (*rate) cmd_rate(g, ra);
    } catch (const Error& e) {
        std::string msg = e.what();
        if (e.kind() == ErrorKind::InfeasibleEnergy && e.value()) {
            msg += " (minimum feasible power " + format_number(*e.value()) + ")";
        }
        spdlog::error("{}", msg);
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 2;
    }
    return 0;
}
