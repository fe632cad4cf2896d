#include "gmm_agora/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "gmm_agora/errors.hpp"
#include "gmm_agora/format.hpp"
#include "gmm_agora/parallel.hpp"

namespace gmm_agora {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double v) { return shortest(v); }

// Short, stable label for directory names.
std::string label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

std::size_t as_count(double value, const std::string& name) {
    require(value >= 0.0 && std::floor(value) == value, name + " must be a non-negative integer");
    return static_cast<std::size_t>(value);
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

double max_standard_deviation(const std::vector<std::vector<Matrix>>& covariances) {
    double worst = 0.0;
    for (const auto& agent : covariances) {
        for (const auto& cov : agent) {
            const double top = cov.rows() == 1
                                   ? cov(0, 0)
                                   : Eigen::SelfAdjointEigenSolver<Matrix>(cov, Eigen::EigenvaluesOnly)
                                         .eigenvalues()
                                         .maxCoeff();
            worst = std::max(worst, std::sqrt(std::max(top, 0.0)));
        }
    }
    return worst;
}

double max_volume_error(const std::vector<std::vector<Matrix>>& covariances, double target) {
    double worst = 0.0;
    for (const auto& agent : covariances)
        for (const auto& cov : agent) worst = std::max(worst, std::abs(cov.determinant() - target) / target);
    return worst;
}

std::vector<ReplicateOutput> run_configs(const std::vector<SimulationConfig>& configs, std::size_t jobs,
                                         bool keep_weights, bool keep_interactions) {
    for (const auto& c : configs) c.validate();
    std::vector<std::optional<ReplicateOutput>> slots(configs.size());
    parallel_for(configs.size(), jobs, [&](std::size_t idx) {
        slots[idx] = summarize(run_simulation(configs[idx]), configs[idx], keep_weights, keep_interactions);
    });
    std::vector<ReplicateOutput> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

std::vector<SimulationConfig> replicate_configs(const SimulationConfig& config, std::size_t replicates) {
    std::vector<SimulationConfig> out;
    out.reserve(replicates);
    for (std::size_t rep = 0; rep < replicates; ++rep) {
        out.push_back(config);
        out.back().replicate = rep;
    }
    return out;
}

// ---- CSV writers -----------------------------------------------------------

std::string silos_csv(const std::vector<ReplicateOutput>& reps) {
    std::ostringstream out;
    out << "replicate,t,agent,silo\n";
    for (const auto& rep : reps)
        for (std::size_t t = 0; t < rep.silos.size(); ++t)
            for (std::size_t i = 0; i < rep.silos[t].size(); ++i)
                out << rep.replicate << ',' << t << ',' << i << ',' << rep.silos[t][i] << '\n';
    return out.str();
}

std::string weights_csv(const std::vector<ReplicateOutput>& reps) {
    std::ostringstream out;
    out << "replicate,t,agent,component,weight\n";
    for (const auto& rep : reps)
        for (std::size_t t = 0; t < rep.weights.size(); ++t)
            for (std::size_t i = 0; i < rep.weights[t].size(); ++i)
                for (Eigen::Index j = 0; j < rep.weights[t][i].size(); ++j)
                    out << rep.replicate << ',' << t << ',' << i << ',' << j << ','
                        << fmt(rep.weights[t][i][j]) << '\n';
    return out.str();
}

std::string stability_csv(const std::vector<ReplicateOutput>& reps) {
    std::ostringstream out;
    out << "replicate,t,S\n";
    for (const auto& rep : reps)
        for (std::size_t t = 1; t < rep.silos.size(); ++t)
            out << rep.replicate << ',' << t << ',' << fmt(stability(rep.silos[t - 1], rep.silos[t])) << '\n';
    return out.str();
}

std::string silo_counts_csv(const std::vector<ReplicateOutput>& reps, std::size_t n) {
    std::ostringstream out;
    out << "replicate,t,silo,count\n";
    for (const auto& rep : reps) {
        for (std::size_t t = 0; t < rep.silos.size(); ++t) {
            std::vector<std::size_t> counts(n, 0);
            for (const auto label : rep.silos[t]) ++counts[label];
            for (std::size_t s = 0; s < n; ++s)
                out << rep.replicate << ',' << t << ',' << s << ',' << counts[s] << '\n';
        }
    }
    return out.str();
}

std::string interactions_csv(const std::vector<ReplicateOutput>& reps) {
    std::ostringstream out;
    out << "replicate,t,agent,partner,mirrored,removed_slot\n";
    for (const auto& rep : reps)
        for (const auto& rec : rep.interactions)
            out << rep.replicate << ',' << rec.t << ',' << rec.agent << ',' << rec.partner << ','
                << (rec.mirrored ? 1 : 0) << ',' << rec.removed_slot << '\n';
    return out.str();
}

std::string series_csv(const std::vector<ReplicateOutput>& reps, const char* column,
                       std::vector<double> ReplicateOutput::*series) {
    std::ostringstream out;
    out << "replicate,t," << column << '\n';
    for (const auto& rep : reps) {
        const auto& values = rep.*series;
        for (std::size_t t = 0; t < values.size(); ++t)
            out << rep.replicate << ',' << t << ',' << fmt(values[t]) << '\n';
    }
    return out.str();
}

void write_traces(const std::filesystem::path& dir, const std::vector<ReplicateOutput>& reps,
                  const SimulationConfig& config, bool weights, bool interactions) {
    write_file(dir / "silos.csv", silos_csv(reps));
    write_file(dir / "stability.csv", stability_csv(reps));
    write_file(dir / "silo_counts.csv", silo_counts_csv(reps, config.n));
    if (weights) write_file(dir / "weights.csv", weights_csv(reps));
    if (interactions) write_file(dir / "interactions.csv", interactions_csv(reps));
    if (config.variable_covariance) write_file(dir / "maxstd.csv", series_csv(reps, "max_std", &ReplicateOutput::max_std));
    if (config.volume_constraint)
        write_file(dir / "volume.csv", series_csv(reps, "max_rel_det_error", &ReplicateOutput::max_volume_error));
}

// ---- manifest --------------------------------------------------------------

json config_json(const SimulationConfig& c) {
    json j;
    j["T"] = c.T;
    j["p"] = c.p;
    j["k"] = c.k;
    j["r"] = c.r;
    j["n"] = c.n;
    j["m"] = c.m;
    j["epsilon"] = c.epsilon;
    j["variable_covariance"] = c.variable_covariance;
    j["volume_constraint"] = c.volume_constraint ? json(*c.volume_constraint) : json(nullptr);
    j["covariance_regularization"] = c.covariance_regularization;
    j["mass_offset"] = c.mass_offset;
    j["sweep_order"] = c.sweep_order == SweepOrder::fixed ? "fixed" : "permuted";
    return j;
}

void write_manifest(const ExperimentSpec& spec) {
    json j;
    j["experiment"] = to_string(spec.id);
    j["software_version"] = GMM_AGORA_VERSION;
    j["seed"] = spec.base.seed;
    j["replicates"] = spec.replicates;
    json seeds = json::array();
    for (std::size_t rep = 0; rep < spec.replicates; ++rep) seeds.push_back(derive_seed(spec.base.seed, rep));
    j["replicate_seeds"] = seeds;
    j["config"] = config_json(spec.base);
    j["geometry"] = {{"kind", to_string(spec.geometry.kind)},
                     {"delta_mu", spec.geometry.delta_mu},
                     {"sigma", spec.geometry.sigma},
                     {"delta_mu_over_sigma", spec.geometry.delta_mu / spec.geometry.sigma}};
    json sweeps = json::object();
    for (const auto& s : spec.sweeps) sweeps[s.parameter] = s.values;
    j["sweeps"] = sweeps;
    if (spec.id == ExperimentId::fig7) {
        json geoms = json::array();
        for (const auto g : spec.geometries) geoms.push_back(to_string(g));
        j["geometries"] = geoms;
    }
    j["write_weights"] = spec.write_weights;
    j["write_interactions"] = spec.write_interactions;
    write_file(spec.output_dir / "manifest.json", j.dump(2) + "\n");
}

const Sweep* find_sweep(const ExperimentSpec& spec, const std::string& name) {
    for (const auto& s : spec.sweeps)
        if (s.parameter == name) return &s;
    return nullptr;
}

std::vector<double> sweep_values(const ExperimentSpec& spec, const std::string& name) {
    const Sweep* s = find_sweep(spec, name);
    require(s != nullptr && !s->values.empty(), "experiment needs a nonempty '" + name + "' sweep");
    return s->values;
}

bool writes_files(const ExperimentSpec& spec) { return !spec.output_dir.empty(); }

}  // namespace

// ---- names -----------------------------------------------------------------

std::string to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::linear: return "linear";
        case GeometryKind::circle: return "circle";
        case GeometryKind::simplex: return "simplex";
    }
    return "linear";
}

std::string to_string(ExperimentId id) {
    switch (id) {
        case ExperimentId::run: return "run";
        case ExperimentId::fig2: return "fig2";
        case ExperimentId::fig4: return "fig4";
        case ExperimentId::fig5: return "fig5";
        case ExperimentId::fig6: return "fig6";
        case ExperimentId::fig7: return "fig7";
        case ExperimentId::appendixB: return "appendixB";
        case ExperimentId::custom: return "custom";
    }
    return "run";
}

GeometryKind parse_geometry(const std::string& text) {
    if (text == "linear") return GeometryKind::linear;
    if (text == "circle") return GeometryKind::circle;
    if (text == "simplex") return GeometryKind::simplex;
    throw ParameterError("unknown geometry '" + text + "' (linear|circle|simplex)");
}

ExperimentId parse_experiment(const std::string& text) {
    for (const auto id : {ExperimentId::run, ExperimentId::fig2, ExperimentId::fig4, ExperimentId::fig5,
                          ExperimentId::fig6, ExperimentId::fig7, ExperimentId::appendixB, ExperimentId::custom})
        if (to_string(id) == text) return id;
    throw ParameterError("unknown experiment '" + text +
                         "' (fig2|fig4|fig5|fig6|fig7|appendixB|custom)");
}

// ---- geometry --------------------------------------------------------------

MixtureParams mean_geometry(GeometryKind kind, std::size_t n, double delta_mu, double sigma) {
    require(n >= 2, "geometry needs at least two components");
    require(delta_mu > 0.0 && std::isfinite(delta_mu), "delta_mu must be positive");
    std::vector<Vector> means;
    means.reserve(n);
    switch (kind) {
        case GeometryKind::linear:
            for (std::size_t i = 1; i <= n; ++i) means.push_back(Vector::Constant(1, delta_mu * static_cast<double>(i)));
            break;
        case GeometryKind::circle: {
            const double radius = delta_mu / (2.0 * std::sin(std::numbers::pi / static_cast<double>(n)));
            for (std::size_t i = 0; i < n; ++i) {
                const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
                Vector mu(2);
                mu << radius * std::cos(angle), radius * std::sin(angle);
                means.push_back(std::move(mu));
            }
            break;
        }
        case GeometryKind::simplex:
            for (std::size_t i = 0; i < n; ++i) {
                Vector mu = Vector::Zero(static_cast<Eigen::Index>(n));
                mu[static_cast<Eigen::Index>(i)] = delta_mu / std::numbers::sqrt2;
                means.push_back(std::move(mu));
            }
            break;
    }
    return MixtureParams::isotropic(std::move(means), sigma);
}

std::vector<double> separation_grid(GeometryKind kind) {
    double lo = 0.75, hi = 5.0;
    if (kind == GeometryKind::circle) lo = 0.5, hi = 3.0;
    if (kind == GeometryKind::simplex) lo = 2.25, hi = 6.0;
    std::vector<double> grid;
    for (int s = 0; lo + 0.25 * s <= hi + 1e-9; ++s) grid.push_back(lo + 0.25 * s);
    return grid;
}

// ---- specs -----------------------------------------------------------------

ExperimentSpec::ExperimentSpec() : base(mean_geometry(GeometryKind::linear, 30, 1.0, 0.3)) {}

ExperimentSpec default_experiment(ExperimentId id) {
    ExperimentSpec spec;
    spec.id = id;
    spec.jobs = default_jobs();
    auto& c = spec.base;
    switch (id) {
        case ExperimentId::run:
        case ExperimentId::custom:
        case ExperimentId::fig2:
            c.p = 0.4, c.k = 29, c.r = 5, c.T = 100;
            break;
        case ExperimentId::fig4:
            c.p = 0.0, c.T = 80, c.r = 5;
            spec.replicates = 50;
            spec.sweeps.push_back({"k", {1, 2, 4, 8, 16, 29}});
            break;
        case ExperimentId::fig5:
            c.T = 200, c.r = 5;
            spec.sweeps.push_back({"p", {0.0, 0.2, 0.4, 0.7}});
            spec.sweeps.push_back({"k", {1, 4, 29}});
            break;
        case ExperimentId::fig6:
            c.p = 0.2, c.k = 29, c.T = 200, c.r = 10;
            spec.replicates = 50;
            break;
        case ExperimentId::fig7:
            c.p = 0.0, c.k = 29, c.r = 5, c.T = 200;
            spec.replicates = 50;
            spec.geometries = {GeometryKind::linear, GeometryKind::circle, GeometryKind::simplex};
            break;
        case ExperimentId::appendixB:
            c.p = 0.4, c.k = 29, c.r = 5, c.T = 200;
            c.variable_covariance = true;
            spec.replicates = 10;
            break;
    }
    return spec;
}

void apply_setting(ExperimentSpec& spec, const std::string& parameter, double value) {
    auto& c = spec.base;
    if (parameter == "p") c.p = value;
    else if (parameter == "k") c.k = as_count(value, "k");
    else if (parameter == "r") c.r = as_count(value, "r");
    else if (parameter == "T") c.T = as_count(value, "T");
    else if (parameter == "n") c.n = as_count(value, "n");
    else if (parameter == "m") c.m = as_count(value, "m");
    else if (parameter == "epsilon") c.epsilon = value;
    else if (parameter == "sigma") spec.geometry.sigma = value;
    else if (parameter == "delta_mu") spec.geometry.delta_mu = value;
    else if (parameter == "delta_mu_over_sigma") spec.geometry.delta_mu = value * spec.geometry.sigma;
    else throw ParameterError("cannot sweep unknown parameter '" + parameter + "'");
}

SimulationConfig materialize(const ExperimentSpec& spec) {
    SimulationConfig config = spec.base;
    config.params = mean_geometry(spec.geometry.kind, spec.base.n, spec.geometry.delta_mu, spec.geometry.sigma);
    config.replicate = 0;
    config.validate();
    return config;
}

// ---- per-replicate summaries ----------------------------------------------

ReplicateOutput summarize(const Trajectory& trajectory, const SimulationConfig& config, bool keep_weights,
                          bool keep_interactions) {
    ReplicateOutput out;
    out.replicate = config.replicate;
    out.seed = derive_seed(config.seed, config.replicate);
    out.silos.reserve(trajectory.snapshots.size());
    for (const auto& snap : trajectory.snapshots) {
        out.silos.push_back(silos(snap.weights));
        if (keep_weights) out.weights.push_back(snap.weights);
        if (config.variable_covariance) out.max_std.push_back(max_standard_deviation(snap.covariances));
        if (config.volume_constraint)
            out.max_volume_error.push_back(max_volume_error(snap.covariances, *config.volume_constraint));
    }
    if (keep_interactions) out.interactions = trajectory.interactions;
    return out;
}

std::vector<ReplicateOutput> run_replicates(const SimulationConfig& config, std::size_t replicates,
                                            std::size_t jobs, bool keep_weights, bool keep_interactions) {
    return run_configs(replicate_configs(config, replicates), jobs, keep_weights, keep_interactions);
}

std::pair<double, double> mean_and_standard_error(const std::vector<double>& values) {
    if (values.empty()) return {std::nan(""), std::nan("")};
    double sum = 0.0;
    for (const double v : values) sum += v;
    const double mean = sum / static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (const double v : values) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    return {mean, sd / std::sqrt(static_cast<double>(values.size()))};
}

// ---- runners ---------------------------------------------------------------

TraceResult run_traces(const ExperimentSpec& spec) {
    require(spec.replicates >= 1, "replicates must be at least 1");
    const SimulationConfig config = materialize(spec);
    TraceResult result{config, run_replicates(config, spec.replicates, spec.jobs, spec.write_weights,
                                              spec.write_interactions)};
    if (writes_files(spec)) {
        write_traces(spec.output_dir, result.replicates, config, spec.write_weights, spec.write_interactions);
        write_manifest(spec);
    }
    return result;
}

TraceResult run_fig2(const ExperimentSpec& spec) { return run_traces(spec); }

TraceResult run_appendixB(const ExperimentSpec& spec) {
    require(spec.base.variable_covariance, "appendixB runs with variable covariance");
    require(spec.geometry.kind == GeometryKind::linear, "appendixB is defined for the 1-d linear geometry");
    return run_traces(spec);
}

std::vector<SiloCountPoint> run_fig4(const ExperimentSpec& spec) {
    require(spec.replicates >= 1, "replicates must be at least 1");
    const auto ks = sweep_values(spec, "k");
    std::vector<SimulationConfig> configs;
    for (const double k : ks) {
        ExperimentSpec cell = spec;
        apply_setting(cell, "k", k);
        const auto reps = replicate_configs(materialize(cell), spec.replicates);
        configs.insert(configs.end(), reps.begin(), reps.end());
    }
    const auto outputs = run_configs(configs, spec.jobs, false, false);

    std::vector<SiloCountPoint> points;
    std::ostringstream finals, summary;
    finals << "k,replicate,silo_count\n";
    summary << "k,replicates,mean_silo_count,se_silo_count\n";
    for (std::size_t s = 0; s < ks.size(); ++s) {
        SiloCountPoint point;
        point.k = static_cast<std::size_t>(ks[s]);
        std::vector<double> values;
        for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
            const auto& out = outputs[s * spec.replicates + rep];
            const auto count = silo_count(out.silos.back());
            point.final_counts.push_back(count);
            values.push_back(static_cast<double>(count));
            finals << point.k << ',' << rep << ',' << count << '\n';
        }
        std::tie(point.mean, point.standard_error) = mean_and_standard_error(values);
        summary << point.k << ',' << spec.replicates << ',' << fmt(point.mean) << ',' << fmt(point.standard_error)
                << '\n';
        points.push_back(std::move(point));
    }
    if (writes_files(spec)) {
        write_file(spec.output_dir / "final_silos.csv", finals.str());
        write_file(spec.output_dir / "silos_vs_k.csv", summary.str());
        write_manifest(spec);
    }
    return points;
}

std::vector<GridCell> run_fig5(const ExperimentSpec& spec) {
    require(spec.replicates >= 1, "replicates must be at least 1");
    const auto ps = sweep_values(spec, "p");
    const auto ks = sweep_values(spec, "k");
    std::vector<GridCell> cells;
    std::vector<SimulationConfig> configs;
    std::vector<SimulationConfig> cell_configs;
    for (const double p : ps) {
        for (const double k : ks) {
            ExperimentSpec cell = spec;
            apply_setting(cell, "p", p);
            apply_setting(cell, "k", k);
            const auto config = materialize(cell);
            cell_configs.push_back(config);
            const auto reps = replicate_configs(config, spec.replicates);
            configs.insert(configs.end(), reps.begin(), reps.end());
            cells.push_back(GridCell{p, config.k, "p" + label(p) + "_k" + std::to_string(config.k), {}});
        }
    }
    auto outputs = run_configs(configs, spec.jobs, spec.write_weights, false);
    std::ostringstream index;
    index << "cell,p,k,directory\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t rep = 0; rep < spec.replicates; ++rep)
            cells[c].replicates.push_back(std::move(outputs[c * spec.replicates + rep]));
        index << c << ',' << fmt(cells[c].p) << ',' << cells[c].k << ',' << cells[c].directory << '\n';
    }
    if (writes_files(spec)) {
        for (std::size_t c = 0; c < cells.size(); ++c)
            write_traces(spec.output_dir / cells[c].directory, cells[c].replicates, cell_configs[c],
                         spec.write_weights, false);
        write_file(spec.output_dir / "cells.csv", index.str());
        write_manifest(spec);
    }
    return cells;
}

CollapseResult run_fig6(const ExperimentSpec& spec) {
    require(spec.replicates >= 1, "replicates must be at least 1");
    const SimulationConfig config = materialize(spec);
    CollapseResult result;
    result.replicates = run_replicates(config, spec.replicates, spec.jobs, spec.write_weights, false);
    std::ostringstream collapse;
    collapse << "replicate,collapsed,final_silo_count,t_star\n";
    for (const auto& rep : result.replicates) {
        const auto count = silo_count(rep.silos.back());
        const auto t_star = convergence_time(rep.silos);
        result.collapsed.push_back(count == 1);
        collapse << rep.replicate << ',' << (count == 1 ? 1 : 0) << ',' << count << ','
                 << (t_star ? std::to_string(*t_star) : "") << '\n';
    }
    if (writes_files(spec)) {
        write_traces(spec.output_dir, result.replicates, config, spec.write_weights, false);
        write_file(spec.output_dir / "collapse.csv", collapse.str());
        write_manifest(spec);
    }
    return result;
}

std::vector<ConvergencePoint> run_fig7(const ExperimentSpec& spec) {
    require(spec.replicates >= 1, "replicates must be at least 1");
    require(!spec.geometries.empty(), "fig7 needs at least one geometry");
    const Sweep* override_grid = find_sweep(spec, "delta_mu_over_sigma");

    std::vector<ConvergencePoint> points;
    std::vector<SimulationConfig> configs;
    for (const auto kind : spec.geometries) {
        const auto grid = override_grid ? override_grid->values : separation_grid(kind);
        for (const double ratio : grid) {
            ExperimentSpec cell = spec;
            cell.geometry.kind = kind;
            apply_setting(cell, "delta_mu_over_sigma", ratio);
            const auto reps = replicate_configs(materialize(cell), spec.replicates);
            configs.insert(configs.end(), reps.begin(), reps.end());
            ConvergencePoint point;
            point.geometry = kind;
            point.ratio = ratio;
            points.push_back(std::move(point));
        }
    }
    const auto outputs = run_configs(configs, spec.jobs, false, false);

    std::ostringstream raw, summary;
    raw << "geometry,delta_mu_over_sigma,replicate,t_star\n";
    summary << "geometry,delta_mu_over_sigma,replicates,converged,mean_t_star,se_t_star\n";
    for (std::size_t p = 0; p < points.size(); ++p) {
        auto& point = points[p];
        std::vector<double> values;
        for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
            const auto t_star = convergence_time(outputs[p * spec.replicates + rep].silos);
            point.t_star.push_back(t_star);
            if (t_star) values.push_back(static_cast<double>(*t_star));
            raw << to_string(point.geometry) << ',' << fmt(point.ratio) << ',' << rep << ','
                << (t_star ? std::to_string(*t_star) : "") << '\n';
        }
        point.converged = values.size();
        if (!values.empty()) {
            const auto [mean, se] = mean_and_standard_error(values);
            point.mean = mean;
            point.standard_error = se;
        }
        summary << to_string(point.geometry) << ',' << fmt(point.ratio) << ',' << spec.replicates << ','
                << point.converged << ',' << (point.mean ? fmt(*point.mean) : "") << ','
                << (point.standard_error ? fmt(*point.standard_error) : "") << '\n';
    }
    if (writes_files(spec)) {
        write_file(spec.output_dir / "tstar.csv", raw.str());
        write_file(spec.output_dir / "tstar_summary.csv", summary.str());
        write_manifest(spec);
    }
    return points;
}

std::vector<CustomCell> run_custom(const ExperimentSpec& spec) {
    require(spec.replicates >= 1, "replicates must be at least 1");
    // Cartesian product of all sweeps, first sweep varying slowest.
    std::vector<std::vector<std::pair<std::string, double>>> combos{{}};
    for (const auto& sweep : spec.sweeps) {
        require(!sweep.values.empty(), "sweep '" + sweep.parameter + "' is empty");
        std::vector<std::vector<std::pair<std::string, double>>> next;
        for (const auto& combo : combos) {
            for (const double v : sweep.values) {
                auto extended = combo;
                extended.emplace_back(sweep.parameter, v);
                next.push_back(std::move(extended));
            }
        }
        combos = std::move(next);
    }

    std::vector<CustomCell> cells;
    std::vector<SimulationConfig> configs, cell_configs;
    for (const auto& combo : combos) {
        ExperimentSpec cell = spec;
        std::string dir;
        for (const auto& [name, value] : combo) {
            apply_setting(cell, name, value);
            dir += (dir.empty() ? "" : "_") + name + label(value);
        }
        if (dir.empty()) dir = "base";
        const auto config = materialize(cell);
        cell_configs.push_back(config);
        const auto reps = replicate_configs(config, spec.replicates);
        configs.insert(configs.end(), reps.begin(), reps.end());
        cells.push_back(CustomCell{combo, dir, {}});
    }
    auto outputs = run_configs(configs, spec.jobs, spec.write_weights, spec.write_interactions);
    std::ostringstream index;
    index << "cell,directory\n";
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t rep = 0; rep < spec.replicates; ++rep)
            cells[c].replicates.push_back(std::move(outputs[c * spec.replicates + rep]));
        index << c << ',' << cells[c].directory << '\n';
    }
    if (writes_files(spec)) {
        for (std::size_t c = 0; c < cells.size(); ++c)
            write_traces(spec.output_dir / cells[c].directory, cells[c].replicates, cell_configs[c],
                         spec.write_weights, spec.write_interactions);
        write_file(spec.output_dir / "cells.csv", index.str());
        write_manifest(spec);
    }
    return cells;
}

void run_experiment(const ExperimentSpec& spec) {
    switch (spec.id) {
        case ExperimentId::run: run_traces(spec); break;
        case ExperimentId::fig2: run_fig2(spec); break;
        case ExperimentId::fig4: run_fig4(spec); break;
        case ExperimentId::fig5: run_fig5(spec); break;
        case ExperimentId::fig6: run_fig6(spec); break;
        case ExperimentId::fig7: run_fig7(spec); break;
        case ExperimentId::appendixB: run_appendixB(spec); break;
        case ExperimentId::custom: run_custom(spec); break;
    }
}

}  // namespace gmm_agora
