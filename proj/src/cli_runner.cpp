// SPDX-License-Identifier: Apache-2.0
//
// isacbeam: secure ISAC transmit beamforming under a target location prior
// Copyright (C) 2026 The isacbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------



#include "isacbeam/cli_runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "json.hpp"

#include "isacbeam/beam_design.hpp"
#include "isacbeam/evaluation.hpp"
#include "isacbeam/presets.hpp"

namespace isacbeam::cli
{
    namespace
    {
        using json = nlohmann::json;

        const char *covariance_name(CovarianceSpec c)
        {
            switch (c)
            {
            case CovarianceSpec::Isotropic:
                return "isotropic";
            case CovarianceSpec::Optimized:
                return "optimized";
            case CovarianceSpec::Random:
                return "random";
            }
            return "isotropic";
        }

        // Scenario block of the reference preset, in boundary units.
        json paper_sec6_scenario()
        {
            return json{{"n_tx", 8},
                        {"n_rx", 10},
                        {"spacing_ratio", 0.5},
                        {"target_range_m", 1.0},
                        {"target_angles_deg", {-55.0, -35.0, 65.0, 45.0}},
                        {"target_probs", {0.2, 0.3, 0.1, 0.4}},
                        {"sigma_theta", 1e-2},
                        {"target_path_loss_db", 10.0},
                        {"alpha_min_abs", 0.0071},
                        {"noise_user_dbm", -60.0},
                        {"noise_eve_dbm", -60.0},
                        {"noise_radar_dbm", -60.0},
                        {"power_budget_dbm", 20.0},
                        {"user_angle_deg", presets::reference_user_angle_deg},
                        {"user_path_loss_db", 30.0},
                        {"qbar_scale", "published"}};
        }

        // Typed access with key paths in every error.
        class Node
        {
        public:
            Node(const json &j, std::string path) : j_(j), path_(std::move(path)) {}

            void allow_only(std::initializer_list<const char *> keys) const
            {
                if (!j_.is_object())
                    throw ConfigError(path_ + ": expected an object");
                for (auto it = j_.begin(); it != j_.end(); ++it)
                {
                    if (std::none_of(keys.begin(), keys.end(), [&](const char *k) { return it.key() == k; }))
                        throw ConfigError(child_path(it.key()) + ": unknown key");
                }
            }

            bool has(const char *key) const { return j_.contains(key); }

            Node child(const char *key) const
            {
                if (!j_.contains(key))
                    throw ConfigError(child_path(key) + ": missing required key");
                return Node(j_.at(key), child_path(key));
            }

            double number(const char *key) const
            {
                const Node c = child(key);
                if (!c.j_.is_number())
                    throw ConfigError(c.path_ + ": expected a number");
                const double v = c.j_.get<double>();
                if (!std::isfinite(v))
                    throw ConfigError(c.path_ + ": expected a finite number");
                return v;
            }

            double number_or(const char *key, double fallback) const { return has(key) ? number(key) : fallback; }

            int integer(const char *key) const
            {
                const Node c = child(key);
                if (!c.j_.is_number_integer())
                    throw ConfigError(c.path_ + ": expected an integer");
                return c.j_.get<int>();
            }

            int integer_or(const char *key, int fallback) const { return has(key) ? integer(key) : fallback; }

            std::string string(const char *key) const
            {
                const Node c = child(key);
                if (!c.j_.is_string())
                    throw ConfigError(c.path_ + ": expected a string");
                return c.j_.get<std::string>();
            }

            std::vector<double> numbers(const char *key) const
            {
                const Node c = child(key);
                if (!c.j_.is_array())
                    throw ConfigError(c.path_ + ": expected an array of numbers");
                std::vector<double> out;
                for (std::size_t i = 0; i < c.j_.size(); ++i)
                {
                    if (!c.j_[i].is_number())
                        throw ConfigError(c.path_ + "[" + std::to_string(i) + "]: expected a number");
                    out.push_back(c.j_[i].get<double>());
                }
                return out;
            }

            const std::string &path() const { return path_; }

        private:
            std::string child_path(const std::string &key) const { return path_ + "." + key; }

            const json &j_;
            std::string path_;
        };

        std::vector<cdouble> read_channel_file(const std::filesystem::path &file, const std::string &key_path)
        {
            std::ifstream in(file);
            if (!in)
                throw ConfigError(key_path + ": cannot open " + file.string());
            std::vector<cdouble> out;
            std::string line;
            int line_no = 0;
            while (std::getline(in, line))
            {
                ++line_no;
                if (line.empty() || line[0] == '#')
                    continue;
                std::replace(line.begin(), line.end(), ',', ' ');
                std::istringstream ls(line);
                double re = 0.0, im = 0.0;
                if (!(ls >> re >> im))
                    throw ConfigError(fmt::format("{}: {} line {}: expected 're,im'", key_path, file.string(), line_no));
                out.emplace_back(re, im);
            }
            return out;
        }

        ScenarioConfig build_scenario(const Node &s, const std::filesystem::path &base_dir, pcrb::QbarScale &scale)
        {
            s.allow_only({"n_tx", "n_rx", "spacing_ratio", "target_range_m", "target_angles_deg", "target_probs",
                          "sigma_theta", "target_path_loss_db", "alpha_min_abs", "noise_user_dbm", "noise_eve_dbm",
                          "noise_radar_dbm", "power_budget_dbm", "user_angle_deg", "user_path_loss_db",
                          "user_channel_file", "qbar_scale"});
            ScenarioConfig sc;
            sc.array.n_tx = s.integer("n_tx");
            sc.array.n_rx = s.integer("n_rx");
            sc.array.spacing_ratio = s.number("spacing_ratio");
            sc.prior.range_m = s.number("target_range_m");
            for (double d : s.numbers("target_angles_deg"))
                sc.prior.angles_rad.push_back(deg_to_rad(d));
            sc.prior.probs = s.numbers("target_probs");
            sc.prior.sigma_theta = s.number("sigma_theta");
            sc.channels.beta0_over_r2 = db_to_linear(-s.number("target_path_loss_db"));
            sc.channels.alpha_min_abs = s.number("alpha_min_abs");
            sc.channels.noise_user_w = dbm_to_watt(s.number("noise_user_dbm"));
            sc.channels.noise_eve_w = dbm_to_watt(s.number("noise_eve_dbm"));
            sc.channels.noise_radar_w = dbm_to_watt(s.number("noise_radar_dbm"));
            sc.channels.power_budget_w = dbm_to_watt(s.number("power_budget_dbm"));

            const std::string qs = s.string("qbar_scale");
            if (qs == "published")
                scale = pcrb::QbarScale::Published;
            else if (qs == "array-consistent")
                scale = pcrb::QbarScale::ArrayConsistent;
            else
                throw ConfigError(s.path() + ".qbar_scale: expected \"published\" or \"array-consistent\"");

            try
            {
                sc.array.validate();
                if (s.has("user_channel_file"))
                {
                    const std::filesystem::path file = base_dir / s.string("user_channel_file");
                    const std::vector<cdouble> h = read_channel_file(file, s.path() + ".user_channel_file");
                    if (static_cast<int>(h.size()) != sc.array.n_tx)
                        throw ConfigError(fmt::format("{}.user_channel_file: {} entries, expected n_tx = {}", s.path(),
                                                      h.size(), sc.array.n_tx));
                    sc.channels.user_channel = Eigen::Map<const cvec>(h.data(), h.size());
                }
                else
                {
                    sc.channels.user_channel = los_user_channel(deg_to_rad(s.number("user_angle_deg")),
                                                                s.number("user_path_loss_db"), sc.array);
                }
                sc.validate();
            }
            catch (const InvalidInput &e)
            {
                throw ConfigError(s.path() + ": " + e.what());
            }
            return sc;
        }

        std::vector<double> positive_list(const Node &n, const char *key)
        {
            std::vector<double> v = n.numbers(key);
            for (double x : v)
                if (!(x > 0.0))
                    throw ConfigError(n.path() + "." + key + ": values must be positive");
            return v;
        }

        ExperimentParams build_experiment(const Node &e)
        {
            e.allow_only({"name", "gamma_grid", "pcrb_thresholds", "pcrb_threshold", "theta_grid", "sigma_theta_list",
                          "covariance"});
            ExperimentParams p;
            const std::string name = e.string("name");
            if (name == "gamma-sweep")
                p.name = Experiment::GammaSweep;
            else if (name == "beampattern")
                p.name = Experiment::Beampattern;
            else if (name == "tradeoff")
                p.name = Experiment::Tradeoff;
            else if (name == "pcrb-validate")
                p.name = Experiment::PcrbValidate;
            else
                throw ConfigError(e.path() + ".name: expected one of gamma-sweep, beampattern, tradeoff, pcrb-validate");

            if (e.has("gamma_grid"))
            {
                const Node g = e.child("gamma_grid");
                g.allow_only({"min", "max", "points", "golden_iterations"});
                p.gamma_grid.min = g.number_or("min", p.gamma_grid.min);
                p.gamma_grid.max = g.number_or("max", p.gamma_grid.max);
                p.gamma_grid.points = g.integer_or("points", p.gamma_grid.points);
                p.gamma_grid.golden_iterations = g.integer_or("golden_iterations", p.gamma_grid.golden_iterations);
                if (!(p.gamma_grid.min > 0.0) || (p.gamma_grid.max > 0.0 && p.gamma_grid.max <= p.gamma_grid.min))
                    throw ConfigError(g.path() + ": need 0 < min < max");
                if (p.gamma_grid.points < 2 || p.gamma_grid.golden_iterations < 0)
                    throw ConfigError(g.path() + ": need points >= 2 and golden_iterations >= 0");
            }
            if (e.has("pcrb_thresholds"))
                p.pcrb_thresholds = positive_list(e, "pcrb_thresholds");
            p.pcrb_threshold = e.number_or("pcrb_threshold", p.pcrb_threshold);
            if (!(p.pcrb_threshold > 0.0))
                throw ConfigError(e.path() + ".pcrb_threshold: must be positive");
            if (e.has("theta_grid"))
            {
                const Node t = e.child("theta_grid");
                t.allow_only({"min_deg", "max_deg", "step_deg"});
                p.theta_min_deg = t.number_or("min_deg", p.theta_min_deg);
                p.theta_max_deg = t.number_or("max_deg", p.theta_max_deg);
                p.theta_step_deg = t.number_or("step_deg", p.theta_step_deg);
                if (!(p.theta_step_deg > 0.0) || !(p.theta_max_deg >= p.theta_min_deg) || p.theta_min_deg < -90.0 ||
                    p.theta_max_deg > 90.0)
                    throw ConfigError(t.path() + ": need -90 <= min_deg <= max_deg <= 90 and step_deg > 0");
            }
            if (e.has("sigma_theta_list"))
                p.sigma_theta_list = positive_list(e, "sigma_theta_list");
            if (e.has("covariance"))
            {
                const std::string c = e.string("covariance");
                if (c == "isotropic")
                    p.covariance = CovarianceSpec::Isotropic;
                else if (c == "optimized")
                    p.covariance = CovarianceSpec::Optimized;
                else if (c == "random")
                    p.covariance = CovarianceSpec::Random;
                else
                    throw ConfigError(e.path() + ".covariance: expected isotropic, optimized or random");
            }

            const bool needs_thresholds = p.name == Experiment::GammaSweep || p.name == Experiment::Tradeoff;
            if (needs_thresholds && p.pcrb_thresholds.empty())
                throw ConfigError(e.path() + ".pcrb_thresholds: required and non-empty for " + name);
            if (p.name == Experiment::PcrbValidate && p.sigma_theta_list.empty())
                throw ConfigError(e.path() + ".sigma_theta_list: required and non-empty for pcrb-validate");
            std::sort(p.pcrb_thresholds.begin(), p.pcrb_thresholds.end());
            std::sort(p.sigma_theta_list.begin(), p.sigma_theta_list.end());
            return p;
        }

        json experiment_json(const ExperimentParams &p)
        {
            return json{{"name", to_string(p.name)},
                        {"gamma_grid",
                         {{"min", p.gamma_grid.min},
                          {"max", p.gamma_grid.max},
                          {"points", p.gamma_grid.points},
                          {"golden_iterations", p.gamma_grid.golden_iterations}}},
                        {"pcrb_thresholds", p.pcrb_thresholds},
                        {"pcrb_threshold", p.pcrb_threshold},
                        {"theta_grid",
                         {{"min_deg", p.theta_min_deg}, {"max_deg", p.theta_max_deg}, {"step_deg", p.theta_step_deg}}},
                        {"sigma_theta_list", p.sigma_theta_list},
                        {"covariance", covariance_name(p.covariance)}};
        }

        // Builds the whole CSV in memory and writes it in one binary stream, so line endings are '\n'.
        class CsvWriter
        {
        public:
            CsvWriter(const ExperimentConfig &cfg, const std::string &columns) : precision_(cfg.precision)
            {
                text_ = fmt::format("# isacbeam {} config_hash={:016x} experiment={}\n{}\n", version,
                                    fnv1a(cfg.canonical), to_string(cfg.experiment.name), columns);
            }

            CsvWriter &num(double v)
            {
                sep();
                text_ += format_number(v, precision_);
                return *this;
            }

            CsvWriter &str(const std::string &s)
            {
                sep();
                text_ += s;
                return *this;
            }

            void end_row()
            {
                text_ += '\n';
                fresh_ = true;
                ++rows_;
            }

            RunSummary write(const std::filesystem::path &dir, const char *file) const
            {
                std::error_code ec;
                std::filesystem::create_directories(dir, ec);
                if (ec)
                    throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
                const std::filesystem::path path = dir / file;
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                out << text_;
                if (!out)
                    throw std::runtime_error("cannot write " + path.string());
                spdlog::info("wrote {} ({} rows)", path.string(), rows_);
                return RunSummary{path, rows_};
            }

        private:
            void sep()
            {
                if (!fresh_)
                    text_ += ',';
                fresh_ = false;
            }

            int precision_;
            std::string text_;
            bool fresh_ = true;
            std::size_t rows_ = 0;
        };

        design::GammaSearchConfig search_config(const ExperimentConfig &cfg)
        {
            design::GammaSearchConfig g;
            g.gamma_min = cfg.experiment.gamma_grid.min;
            g.gamma_max = cfg.experiment.gamma_grid.max;
            g.grid_points = cfg.experiment.gamma_grid.points;
            g.golden_iterations = cfg.experiment.gamma_grid.golden_iterations;
            return g;
        }

        design::DesignScenario design_scenario(const ExperimentConfig &cfg, double threshold)
        {
            return design::make_design_scenario(cfg.scenario, threshold, cfg.qbar_scale);
        }

        std::string probe_report(const design::DesignScenario &sc)
        {
            const design::FeasibilityProbe p = design::feasibility_probe(sc);
            return fmt::format("sensing threshold {:.6g} unreachable: P lambda_max(Q_bar) = {:.6g} < required {:.6g}",
                               sc.pcrb_threshold, p.max_lhs, p.required_rhs);
        }

        double nan() { return std::numeric_limits<double>::quiet_NaN(); }
    }

    const char *to_string(Experiment e)
    {
        switch (e)
        {
        case Experiment::GammaSweep:
            return "gamma-sweep";
        case Experiment::Beampattern:
            return "beampattern";
        case Experiment::Tradeoff:
            return "tradeoff";
        case Experiment::PcrbValidate:
            return "pcrb-validate";
        }
        return "gamma-sweep";
    }

    std::vector<std::string> preset_names() { return {"paper-sec6"}; }

    std::uint64_t fnv1a(const std::string &bytes)
    {
        std::uint64_t h = 14695981039346656037ull;
        for (unsigned char c : bytes)
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

    std::string format_number(double v, int precision)
    {
        if (std::isnan(v))
            return "nan";
        if (std::isinf(v))
            return v > 0 ? "inf" : "-inf";
        return fmt::format("{:.{}g}", v, precision);
    }

    ExperimentConfig parse_config(const std::string &json_text, const LoadOptions &opt,
                                  const std::filesystem::path &base_dir)
    {
        json root;
        try
        {
            root = json::parse(json_text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError(std::string("$: invalid JSON: ") + e.what());
        }
        const Node top(root, "$");
        top.allow_only({"preset", "scenario", "experiment", "output", "seed"});

        std::string preset = top.has("preset") ? top.string("preset") : std::string();
        if (!opt.preset.empty())
            preset = opt.preset;
        json scenario = json::object();
        if (!preset.empty())
        {
            if (preset != "paper-sec6")
                throw ConfigError("$.preset: unknown preset \"" + preset + "\"");
            scenario = paper_sec6_scenario();
        }
        if (top.has("scenario"))
        {
            const json &user = root.at("scenario");
            if (!user.is_object())
                throw ConfigError("$.scenario: expected an object");
            for (auto it = user.begin(); it != user.end(); ++it)
                scenario[it.key()] = it.value();
        }
        if (!scenario.contains("qbar_scale"))
            scenario["qbar_scale"] = "published";

        ExperimentConfig cfg;
        cfg.scenario = build_scenario(Node(scenario, "$.scenario"), base_dir, cfg.qbar_scale);
        cfg.experiment = build_experiment(top.child("experiment"));

        if (top.has("output"))
        {
            const Node o = top.child("output");
            o.allow_only({"directory", "precision"});
            if (o.has("directory"))
                cfg.output_dir = o.string("directory");
            cfg.precision = o.integer_or("precision", cfg.precision);
            if (cfg.precision < 1 || cfg.precision > 17)
                throw ConfigError("$.output.precision: expected 1..17 significant digits");
        }
        if (!opt.output_override.empty())
            cfg.output_dir = opt.output_override;

        if (top.has("seed"))
        {
            if (!root.at("seed").is_number_unsigned())
                throw ConfigError("$.seed: expected a nonnegative integer");
            cfg.seed = root.at("seed").get<std::uint64_t>();
        }
        if (opt.has_seed)
            cfg.seed = opt.seed;

        if (scenario.contains("user_channel_file"))
        {
            std::ifstream in(base_dir / scenario.at("user_channel_file").get<std::string>(), std::ios::binary);
            std::ostringstream bytes;
            bytes << in.rdbuf();
            scenario["user_channel_file"] = fmt::format("{:016x}", fnv1a(bytes.str()));
        }
        const json canonical{{"scenario", scenario},
                             {"experiment", experiment_json(cfg.experiment)},
                             {"precision", cfg.precision},
                             {"seed", cfg.seed}};
        cfg.canonical = canonical.dump();
        return cfg;
    }

    ExperimentConfig load_config(const std::filesystem::path &path, const LoadOptions &opt)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ConfigError("cannot open config file " + path.string());
        std::ostringstream text;
        text << in.rdbuf();
        return parse_config(text.str(), opt, path.parent_path().empty() ? "." : path.parent_path());
    }

    RunSummary run_gamma_sweep(const ExperimentConfig &cfg)
    {
        CsvWriter csv(cfg, "Gamma,gamma,f_gamma,secrecy_rate_bph,status,is_opt");
        const design::GammaSearchConfig gc = search_config(cfg);
        for (double threshold : cfg.experiment.pcrb_thresholds)
        {
            const design::DesignScenario sc = design_scenario(cfg, threshold);
            std::vector<design::GammaPoint> points;
            double gamma_star = nan();
            try
            {
                const design::BeamformingSolution sol = design::search_gamma(sc, gc);
                points = sol.evaluated;
                gamma_star = sol.gamma_star;
                spdlog::info("Gamma {:.6g}: gamma* {:.6g}, secrecy rate {:.6g} bit/s/Hz", threshold, gamma_star,
                             sol.secrecy_rate);
            }
            catch (const InfeasibleScenario &e)
            {
                spdlog::warn("Gamma {:.6g}: {}", threshold, e.what());
                points = design::evaluate_gamma_points(design::gamma_grid(sc, gc), sc, gc);
            }
            catch (const NumericalError &e)
            {
                spdlog::warn("Gamma {:.6g}: {}", threshold, e.what());
                points = design::evaluate_gamma_points(design::gamma_grid(sc, gc), sc, gc);
            }
            std::stable_sort(points.begin(), points.end(),
                             [](const design::GammaPoint &a, const design::GammaPoint &b) { return a.gamma < b.gamma; });
            bool flagged = false;
            for (const design::GammaPoint &p : points)
            {
                const bool ok = p.status == sdp::Status::Optimal;
                const bool is_opt = !flagged && p.gamma == gamma_star;
                flagged = flagged || is_opt;
                csv.num(threshold)
                    .num(p.gamma)
                    .num(ok ? p.f_gamma : nan())
                    .num(ok ? std::max(0.0, p.g) : nan())
                    .str(sdp::to_string(p.status))
                    .num(is_opt ? 1 : 0);
                csv.end_row();
            }
        }
        return csv.write(cfg.output_dir, "gamma_sweep.csv");
    }

    RunSummary run_beampattern(const ExperimentConfig &cfg)
    {
        const ExperimentParams &ep = cfg.experiment;
        const design::DesignScenario sc = design_scenario(cfg, ep.pcrb_threshold);
        if (!design::feasibility_probe(sc).feasible)
            throw InfeasibleScenario("beampattern: " + probe_report(sc));
        design::BeamformingSolution sol;
        try
        {
            sol = design::search_gamma(sc, search_config(cfg));
        }
        catch (const InfeasibleScenario &e)
        {
            throw InfeasibleScenario(std::string("beampattern: ") + e.what() + "; " + probe_report(sc));
        }
        spdlog::info("Gamma {:.6g}: gamma* {:.6g}, secrecy rate {:.6g} bit/s/Hz, {} AN beams", ep.pcrb_threshold,
                     sol.gamma_star, sol.secrecy_rate, sol.an_beams.size());

        const int n = static_cast<int>(std::floor((ep.theta_max_deg - ep.theta_min_deg) / ep.theta_step_deg + 1e-9)) + 1;
        std::vector<double> deg(n), rad(n);
        for (int i = 0; i < n; ++i)
        {
            deg[i] = ep.theta_min_deg + i * ep.theta_step_deg;
            rad[i] = deg_to_rad(deg[i]);
        }
        const std::vector<eval::BeampatternRow> bp = eval::beampattern(sol.w, sol.an_beams, rad, cfg.scenario.array);

        CsvWriter csv(cfg, "theta_deg,info_power_dbm,an_power_dbm");
        for (int i = 0; i < n; ++i)
        {
            csv.num(deg[i]).num(watt_to_dbm(bp[i].info_power)).num(watt_to_dbm(bp[i].an_power));
            csv.end_row();
        }
        return csv.write(cfg.output_dir, "beampattern.csv");
    }

    RunSummary run_tradeoff(const ExperimentConfig &cfg)
    {
        CsvWriter csv(cfg, "Gamma,scheme,feasible,secrecy_rate_bph");
        const design::GammaSearchConfig gc = search_config(cfg);
        auto row = [&](double threshold, const char *scheme, bool feasible, double rate) {
            csv.num(threshold).str(scheme).num(feasible ? 1 : 0).num(feasible ? rate : nan());
            csv.end_row();
        };
        // A failed design counts as infeasible for that row only.
        auto attempt = [&](double threshold, const char *scheme, auto &&fn) {
            try
            {
                const design::BeamformingSolution sol = fn();
                row(threshold, scheme, sol.feasible, sol.secrecy_rate);
            }
            catch (const InfeasibleScenario &e)
            {
                spdlog::info("Gamma {:.6g} {}: infeasible ({})", threshold, scheme, e.what());
                row(threshold, scheme, false, 0.0);
            }
            catch (const NumericalError &e)
            {
                spdlog::warn("Gamma {:.6g} {}: numerical failure ({})", threshold, scheme, e.what());
                row(threshold, scheme, false, 0.0);
            }
        };
        for (double threshold : cfg.experiment.pcrb_thresholds)
        {
            const design::DesignScenario sc = design_scenario(cfg, threshold);
            attempt(threshold, "proposed", [&] { return design::search_gamma(sc, gc); });
            attempt(threshold, "mrt", [&] { return design::benchmark_mrt(sc); });
            attempt(threshold, "no_an", [&] { return design::benchmark_no_an(sc, gc); });
        }
        return csv.write(cfg.output_dir, "tradeoff.csv");
    }

    RunSummary run_pcrb_validate(const ExperimentConfig &cfg)
    {
        const ExperimentParams &ep = cfg.experiment;
        const ScenarioConfig &base = cfg.scenario;
        const int n = base.array.n_tx;
        const double power = base.channels.power_budget_w;

        cmat rx;
        switch (ep.covariance)
        {
        case CovarianceSpec::Isotropic:
            rx = (power / n) * cmat::Identity(n, n);
            break;
        case CovarianceSpec::Optimized:
        {
            const design::DesignScenario sc = design_scenario(cfg, ep.pcrb_threshold);
            const design::BeamformingSolution sol = design::search_gamma(sc, search_config(cfg));
            rx = pcrb::covariance(sol.w, sol.an_beams);
            break;
        }
        case CovarianceSpec::Random:
        {
            std::mt19937_64 rng(cfg.seed);
            std::normal_distribution<double> gauss(0.0, 1.0);
            cmat g(n, n);
            for (Eigen::Index j = 0; j < g.cols(); ++j)
                for (Eigen::Index i = 0; i < g.rows(); ++i)
                {
                    const double re = gauss(rng);
                    g(i, j) = cdouble(re, gauss(rng));
                }
            rx = hermitian_part(g * g.adjoint());
            rx *= power / rx.trace().real();
            break;
        }
        }

        const cdouble beta(base.channels.beta_min_abs(), 0.0);
        CsvWriter csv(cfg, "sigma_theta,pcrb_exact,pcrb_upper_quad,pcrb_closed_form,rel_err_bound_vs_closed");
        for (double sigma : ep.sigma_theta_list)
        {
            LocationPrior prior = base.prior;
            prior.sigma_theta = sigma;
            const double exact = pcrb::pcrb_exact(rx, beta, prior, base.array, base.channels);
            const double upper = pcrb::pcrb_upper(rx, beta, prior, base.array, base.channels);
            const pcrb::QbarMatrix qbar = pcrb::q_bar(prior, base.array, cfg.qbar_scale);
            const double closed =
                pcrb::pcrb_closed_form_cov(rx, base.channels.beta_min_abs(), qbar, prior, base.channels);
            const double rel = std::abs(closed - upper) / upper;
            spdlog::info("sigma_theta {:.6g}: exact {:.6g}, upper {:.6g}, closed {:.6g}", sigma, exact, upper, closed);
            csv.num(sigma).num(exact).num(upper).num(closed).num(rel);
            csv.end_row();
        }
        return csv.write(cfg.output_dir, "pcrb_validate.csv");
    }

    RunSummary run_experiment(const ExperimentConfig &cfg)
    {
        switch (cfg.experiment.name)
        {
        case Experiment::GammaSweep:
            return run_gamma_sweep(cfg);
        case Experiment::Beampattern:
            return run_beampattern(cfg);
        case Experiment::Tradeoff:
            return run_tradeoff(cfg);
        case Experiment::PcrbValidate:
            return run_pcrb_validate(cfg);
        }
        throw ConfigError("unknown experiment");
    }
}
