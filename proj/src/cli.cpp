#include "kaclab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kaclab/errors.hpp"
#include "kaclab/kac_rice.hpp"
#include "kaclab/limit_process.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/sign_compare.hpp"

namespace kaclab {

namespace {

using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string show(int v) { return std::to_string(v); }
std::string show(std::uint64_t v) { return std::to_string(v); }
std::string show(double v) { return format_double(v); }
std::string show(const std::string& v) { return v; }
std::string show(bool v) { return v ? "true" : "false"; }
template <class T>
std::string show(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += show(v[i]);
    }
    return out;
}

std::string long_name(const std::string& flags) {
    std::stringstream ss(flags);
    std::string token;
    while (std::getline(ss, token, ',')) {
        if (token.rfind("--", 0) == 0) return token.substr(2);
    }
    throw std::logic_error("option without long name: " + flags);
}

template <class T>
constexpr bool is_vector = false;
template <class T>
constexpr bool is_vector<std::vector<T>> = true;

/// One subcommand: its options, the values they resolve to, and its action.
class Command {
public:
    using Action = std::function<int(std::string& csv, json& summary)>;

    Command(CLI::App& parent, const std::string& name, const std::string& description)
        : app(parent.add_subcommand(name, description)), name_(name) {
        app->add_option("--config", config_path, "key=value file; flags override it");
        app->add_option("--out", out_path, "CSV destination (default stdout)");
        app->add_option("--report", report_path, "JSON summary destination (default stderr)");
        add("--threads", threads, "worker threads (0: $KACLAB_THREADS, then all cores)");
        add("--seed", seed, "master seed");
    }

    template <class T>
    CLI::Option* add(const std::string& flags, T& var, const std::string& description) {
        CLI::Option* opt = app->add_option(flags, var, description)->capture_default_str();
        if constexpr (is_vector<T>) opt->delimiter(',');
        settings_.push_back({long_name(flags), opt, [&var] { return show(var); }});
        return opt;
    }

    CLI::Option* add_flag(const std::string& flags, bool& var, const std::string& description) {
        CLI::Option* opt = app->add_flag(flags, var, description);
        settings_.push_back({long_name(flags), opt, [&var] { return show(var); }});
        return opt;
    }

    /// Fills options not given on the command line from the config file.
    void apply_config() {
        if (config_path.empty()) return;
        for (const auto& entry : read_config_file(config_path)) {
            const std::string key = entry.key == "n" ? "degree" : entry.key;
            auto it = std::find_if(settings_.begin(), settings_.end(), [&](const auto& s) { return s.key == key; });
            if (it == settings_.end()) {
                throw ParameterError(config_path + " line " + std::to_string(entry.line) + ": unknown key '" +
                                     entry.key + "' for subcommand " + name_);
            }
            if (it->option->count() > 0) continue;
            try {
                if (it->option->get_type_size() == 0) {
                    // flags take true/false
                    if (entry.value != "true" && entry.value != "false") {
                        throw ParameterError("expected true or false");
                    }
                    if (entry.value == "true") it->option->add_result(std::string("true"));
                } else {
                    it->option->add_result(entry.value);
                }
                it->option->run_callback();
            } catch (const CLI::Error& e) {
                throw ParameterError(config_path + " line " + std::to_string(entry.line) + ": " + e.what());
            } catch (const ParameterError& e) {
                throw ParameterError(config_path + " line " + std::to_string(entry.line) + ": " + e.what());
            }
        }
    }

    /// key=value lines for every setting, in registration order.
    std::vector<std::pair<std::string, std::string>> resolved() const {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& s : settings_) out.emplace_back(s.key, s.show());
        return out;
    }

    CLI::App* app;
    Action action;
    std::string config_path;
    std::string out_path;
    std::string report_path;
    int threads = 0;
    std::uint64_t seed = 42;

    const std::string& name() const { return name_; }

private:
    struct Setting {
        std::string key;
        CLI::Option* option;
        std::function<std::string()> show;
    };

    std::string name_;
    std::vector<Setting> settings_;
};

CountTarget resolve_target(const std::string& interval, const std::string& region, bool real, bool interval_given) {
    const int chosen = (interval_given ? 1 : 0) + (region.empty() ? 0 : 1) + (real ? 1 : 0);
    if (chosen > 1) throw ParameterError("choose one of --interval, --region, --real");
    if (real) return CountTarget::on_real_line();
    if (!region.empty()) return CountTarget::on_region(parse_region(region));
    const auto [a, b] = parse_interval(interval);
    return CountTarget::on_interval(CountInterval::closed(a, b));
}

json tail_json(const TailReport& r) {
    return json{{"mean_count", r.mean_count},
                {"standard_error", r.standard_error},
                {"reference_mean", r.reference_mean},
                {"threshold", r.threshold},
                {"tail_probability_lower", r.tail_probability_lower},
                {"tail_probability_upper", r.tail_probability_upper},
                {"tail_probability_two_sided", r.tail_probability_two_sided},
                {"wilson_ci_lower", {r.wilson_lower.first, r.wilson_lower.second}},
                {"wilson_ci_upper", {r.wilson_upper.first, r.wilson_upper.second}},
                {"wilson_ci_two_sided", {r.wilson_two_sided.first, r.wilson_two_sided.second}},
                {"samples", r.samples},
                {"excluded", r.excluded},
                {"exclusion_budget_exceeded", r.exclusion_budget_exceeded}};
}

// Roots of p in the target, in original coordinates; false if uncertain.
bool target_roots(const KacPolynomial& p, const CountTarget& target, std::vector<double>& roots) {
    auto isolate = [&](const KacPolynomial& q, const CountInterval& interval, auto map_back) {
        const auto r = count_certified(q, interval);
        if (!r.fully_certified()) return false;
        for (const auto& cell : r.isolating_cells) roots.push_back(map_back(refine_root(q, cell, 1e-9)));
        return true;
    };
    auto region_roots = [&](Region region) {
        const auto q = map_region(p, region);
        switch (region) {
            case Region::unit_pos:
                return isolate(q, region_interval(region), [](double x) { return x; });
            case Region::unit_neg:
                return isolate(q, region_interval(region), [](double x) { return -x; });
            case Region::outer_pos:
                return isolate(q, region_interval(region), [](double x) { return 1.0 / x; });
            case Region::outer_neg:
                return isolate(q, region_interval(region), [](double x) { return -1.0 / x; });
        }
        return false;
    };
    bool ok = true;
    switch (target.kind) {
        case CountTarget::Kind::interval:
            ok = isolate(p, target.interval, [](double x) { return x; });
            break;
        case CountTarget::Kind::region:
            ok = region_roots(target.region);
            break;
        case CountTarget::Kind::real_line:
            for (Region region : all_regions) ok = region_roots(region) && ok;
            break;
    }
    std::sort(roots.begin(), roots.end());
    return ok;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string out;
    bool first = true;
    for (const auto& c : cells) {
        if (!first) out += ',';
        out += c;
        first = false;
    }
    return out + '\n';
}

// ---------------------------------------------------------------- commands

void add_sample(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "sample", "Draw coefficient vectors");
    struct State {
        int degree = 10;
        std::string dist = "gaussian";
        double eps0 = CoefficientDistribution::default_epsilon0;
        int samples = 1;
    };
    auto st = std::make_shared<State>();
    cmd->add("-n,--degree", st->degree, "polynomial degree");
    cmd->add("--dist", st->dist, "gaussian | rademacher | uniform | pareto:<exponent>");
    cmd->add("--eps0", st->eps0, "moment exponent epsilon0 of the law");
    cmd->add("--samples", st->samples, "number of coefficient vectors");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        if (st->degree < 0) throw ParameterError("degree must be >= 0");
        if (st->samples < 1) throw ParameterError("samples must be >= 1");
        const auto dist = CoefficientDistribution::parse(st->dist, st->eps0);
        csv = "sample_id,i,coeff\n";
        double sum = 0.0, sum_sq = 0.0, count = 0.0;
        for (int s = 0; s < st->samples; ++s) {
            const auto coeffs = sample_coefficients(dist, st->degree, SeedSpec{c->seed, 0}.child(static_cast<std::uint64_t>(s)));
            for (std::size_t i = 0; i < coeffs.size(); ++i) {
                csv += csv_row({std::to_string(s), std::to_string(i), format_double(coeffs[i])});
                sum += coeffs[i];
                sum_sq += coeffs[i] * coeffs[i];
                count += 1.0;
            }
        }
        summary["dist"] = dist.to_string();
        summary["epsilon0"] = dist.epsilon0();
        summary["c0_bound"] = dist.c0_bound();
        summary["analytic_abs_moment_2_eps"] = dist.analytic_abs_moment(2.0 + dist.epsilon0());
        summary["empirical_mean"] = sum / count;
        summary["empirical_second_moment"] = sum_sq / count;
        return int{exit_ok};
    };
    commands.push_back(std::move(cmd));
}

void add_count(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "count", "Certified real-root counts of sampled polynomials");
    struct State {
        int degree = 1000;
        std::string dist = "gaussian";
        double eps0 = CoefficientDistribution::default_epsilon0;
        int samples = 10;
        std::string interval = "0,1";
        std::string region;
        bool real = false;
        double eps = 0.5;
        int depth = 60;
        bool roots = false;
        CLI::Option* interval_opt = nullptr;
    };
    auto st = std::make_shared<State>();
    cmd->add("-n,--degree", st->degree, "polynomial degree");
    cmd->add("--dist", st->dist, "gaussian | rademacher | uniform | pareto:<exponent>");
    cmd->add("--eps0", st->eps0, "moment exponent epsilon0 of the law");
    cmd->add("--samples", st->samples, "number of polynomials");
    st->interval_opt = cmd->add("--interval", st->interval, "closed interval a,b");
    cmd->add("--region", st->region, "unit+ | unit- | outer+ | outer-");
    cmd->add_flag("--real", st->real, "count on the whole real line");
    cmd->add("--eps", st->eps, "tail scale epsilon (thresholds epsilon log n)");
    cmd->add("--depth", st->depth, "bisection depth budget");
    cmd->add_flag("--roots", st->roots, "emit root locations (sample_id,root) instead of counts");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        ExperimentConfig cfg;
        cfg.n = st->degree;
        cfg.dist = CoefficientDistribution::parse(st->dist, st->eps0);
        cfg.samples = st->samples;
        cfg.target = resolve_target(st->interval, st->region, st->real, st->interval_opt->count() > 0);
        cfg.epsilon = st->eps;
        cfg.seed = SeedSpec{c->seed, 0};
        cfg.parallelism = c->threads;
        if (st->depth < 1) throw ParameterError("depth must be >= 1");
        cfg.count_options.depth_budget = st->depth;
        cfg.validate();
        summary["target"] = cfg.target.describe();
        if (st->roots) {
            std::vector<std::vector<double>> roots(static_cast<std::size_t>(cfg.samples));
            std::vector<int> counts(static_cast<std::size_t>(cfg.samples), 0);
            parallel_for(roots.size(), resolve_threads(cfg.parallelism), [&](std::size_t i) {
                const KacPolynomial p(sample_coefficients(cfg.dist, cfg.n, cfg.seed.child(i)));
                counts[i] = target_roots(p, cfg.target, roots[i]) ? static_cast<int>(roots[i].size()) : -1;
            });
            csv = "sample_id,root\n";
            char buf[64];
            for (std::size_t i = 0; i < roots.size(); ++i) {
                if (counts[i] < 0) continue;
                for (double x : roots[i]) {
                    std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, x);
                    csv += buf;
                }
            }
            const auto report = summarize_counts(counts, reference_expected_count(cfg.n, cfg.target),
                                                 cfg.epsilon * std::log(static_cast<double>(cfg.n)));
            summary["report"] = tail_json(report);
            return int{report.exclusion_budget_exceeded ? exit_numeric_failure : exit_ok};
        }
        const auto run = run_root_count_mc(cfg);
        csv = counts_csv(run.counts);
        summary["report"] = tail_json(run.report);
        if (run.report.exclusion_budget_exceeded) return int{exit_numeric_failure};
        // The Kac-Rice mean is exact only for Gaussian coefficients.
        if (cfg.dist.kind() == DistributionKind::gaussian && run.report.samples >= 30) {
            const bool ok = std::fabs(run.report.mean_count - run.report.reference_mean) <= 3.0 * run.report.standard_error;
            summary["check_mean_within_3se"] = ok;
            if (!ok) return int{exit_assertion_failed};
        }
        return int{exit_ok};
    };
    commands.push_back(std::move(cmd));
}

void add_density(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "density", "Kac-Rice real-root density on [0, 1]");
    struct State {
        int degree = 1000;
        int points = 512;
    };
    auto st = std::make_shared<State>();
    cmd->add("-n,--degree", st->degree, "polynomial degree");
    cmd->add("--points", st->points, "number of equally spaced abscissae in [0, 1]");
    cmd->action = [st](std::string& csv, json& summary) {
        const auto profile = density_profile(st->degree, st->points);
        csv = "x,rho1\n";
        for (std::size_t k = 0; k < profile.grid.size(); ++k) {
            csv += csv_row({format_double(profile.grid[k]), format_double(profile.values[k])});
        }
        summary["rho1_at_0"] = profile.values.front();
        summary["rho1_at_1"] = profile.values.back();
        return int{exit_ok};
    };
    commands.push_back(std::move(cmd));
}

void add_expect(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "expect", "Kac-Rice expected number of real roots");
    struct State {
        int degree = 1000;
        std::string interval = "0,1";
        std::string region;
        bool real = false;
        double m = 0.0;
        double ell = 0.0;
        CLI::Option* interval_opt = nullptr;
        CLI::Option* m_opt = nullptr;
    };
    auto st = std::make_shared<State>();
    cmd->add("-n,--degree", st->degree, "polynomial degree");
    st->interval_opt = cmd->add("--interval", st->interval, "interval a,b");
    cmd->add("--region", st->region, "unit+ | unit- | outer+ | outer-");
    cmd->add_flag("--real", st->real, "whole real line");
    st->m_opt = cmd->add("--m", st->m, "bulk interval [1-1/m, 1-ell/n] (with --ell)");
    cmd->add("--ell", st->ell, "bulk parameter ell (0: 3 log n)");
    cmd->action = [st](std::string& csv, json& summary) {
        const int n = st->degree;
        if (n < 1) throw ParameterError("degree must be >= 1");
        CountTarget target;
        if (st->m > 0.0) {
            if (st->ell <= 0.0) st->ell = 3.0 * std::log(static_cast<double>(n));
            const auto [lo, hi] = BulkParams{n, st->m, st->ell}.interval();
            target = CountTarget::on_interval(CountInterval::closed(lo, hi));
        } else {
            target = resolve_target(st->interval, st->region, st->real, st->interval_opt->count() > 0);
        }
        const double value = reference_expected_count(n, target);
        csv = "n,target,expected_count\n" + csv_row({std::to_string(n), target.describe(), format_double(value)});
        summary["target"] = target.describe();
        summary["expected_count"] = value;
        summary["leading_term_real_line"] = 2.0 / std::numbers::pi * std::log(static_cast<double>(n));
        return int{exit_ok};
    };
    commands.push_back(std::move(cmd));
}

SamplerKind parse_sampler(const std::string& s) {
    if (s == "cov") return SamplerKind::covariance_factor;
    if (s == "kernel") return SamplerKind::kernel_discretized;
    throw ParameterError("sampler must be cov or kernel");
}

void add_process(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "process", "Paths of the limiting stationary process");
    struct State {
        double start = 0.0;
        double end = 20.0;
        double step = 0.01;
        int paths = 2000;
        std::string sampler = "cov";
        bool summary_only = false;
    };
    auto st = std::make_shared<State>();
    cmd->add("--grid-start", st->start, "first grid point");
    cmd->add("--grid-end", st->end, "last grid point");
    cmd->add("--grid-step", st->step, "grid spacing");
    cmd->add("--paths", st->paths, "number of paths");
    cmd->add("--sampler", st->sampler, "cov | kernel");
    cmd->add_flag("--summary-only", st->summary_only, "skip the path CSV");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        const auto grid = ProcessGrid::uniform(st->start, st->end, st->step);
        const auto kind = parse_sampler(st->sampler);
        const auto stats = process_zero_count_mc(grid, st->paths, SeedSpec{c->seed, 0}, c->threads, kind);
        summary["grid_points"] = grid.size();
        summary["mean_zero_crossings"] = stats.mean;
        summary["standard_error"] = stats.standard_error;
        summary["expected_zeros"] = stats.expected;
        if (!st->summary_only) {
            csv = "path_id,t,value\n";
            std::vector<double> values(grid.size());
            const auto seed = SeedSpec{c->seed, 0};
            auto emit = [&](const auto& sampler) {
                for (int i = 0; i < st->paths; ++i) {
                    auto engine = make_engine(seed.child(static_cast<std::uint64_t>(i)));
                    sampler.draw(engine, values);
                    for (std::size_t k = 0; k < grid.size(); ++k) {
                        csv += csv_row({std::to_string(i), format_double(grid.points[k]), format_double(values[k])});
                    }
                }
            };
            if (kind == SamplerKind::covariance_factor) {
                emit(CovarianceSampler(grid));
            } else {
                const auto [du, u_max] = KernelSampler::default_resolution(grid);
                emit(KernelSampler(grid, du, u_max));
            }
        }
        if (st->paths >= 30) {
            const bool ok = std::fabs(stats.mean - stats.expected) <= 3.0 * stats.standard_error;
            summary["check_mean_within_3se"] = ok;
            if (!ok) return int{exit_assertion_failed};
        }
        return int{exit_ok};
    };
    commands.push_back(std::move(cmd));
}

void add_compare(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "compare",
                                         "Comparisons: covariance | universality | sign-vs-root | samplers");
    struct State {
        std::string kind = "covariance";
        int degree = 0;
        double m = 0.0;
        double ell = 0.0;
        double delta = 0.0;
        int samples = 0;
        int draws = 0;
        double start = 0.0;
        double end = 2.0;
        double step = 0.5;
    };
    auto st = std::make_shared<State>();
    cmd->add("--kind", st->kind, "covariance | universality | sign-vs-root | samplers");
    cmd->add("-n,--degree", st->degree, "degree (0: kind default)");
    cmd->add("--m", st->m, "bulk parameter m (0: kind default)");
    cmd->add("--ell", st->ell, "bulk parameter ell (0: 3 log n)");
    cmd->add("--delta", st->delta, "log-grid step (0: kind default)");
    cmd->add("--samples", st->samples, "polynomials per law (0: kind default)");
    cmd->add("--draws", st->draws, "Monte Carlo draws (0: kind default)");
    cmd->add("--grid-start", st->start, "samplers: first grid point");
    cmd->add("--grid-end", st->end, "samplers: last grid point");
    cmd->add("--grid-step", st->step, "samplers: grid spacing");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        const SeedSpec seed{c->seed, 0};
        auto default_ell = [&] {
            if (st->ell <= 0.0) st->ell = 3.0 * std::log(static_cast<double>(st->degree));
        };
        if (st->kind == "covariance") {
            if (st->degree == 0) st->degree = 10000;
            if (st->m == 0.0) st->m = 100.0;
            if (st->draws == 0) st->draws = 10000;
            default_ell();
            const auto spec = make_partition(st->degree, st->m, st->ell, st->delta);
            st->delta = spec.delta;
            const auto pair = build_covariance_pair(st->degree, spec);
            const auto diff = norms(pair.a - pair.b);
            const auto ps = powers_stormer_margin(pair);
            const double disc = coupled_sign_change_discrepancy(pair, st->draws, seed, c->threads);
            csv = "i,j,s_i,s_j,a,b,gap\n";
            for (int i = 0; i < pair.dimension; ++i) {
                for (int j = 0; j < pair.dimension; ++j) {
                    csv += csv_row({std::to_string(i), std::to_string(j), format_double(spec.s[static_cast<std::size_t>(i)]),
                                    format_double(spec.s[static_cast<std::size_t>(j)]), format_double(pair.a(i, j)),
                                    format_double(pair.b(i, j)), format_double(std::fabs(pair.a(i, j) - pair.b(i, j)))});
                }
            }
            summary["dimension"] = pair.dimension;
            summary["max_entry_gap"] = pair.max_entry_gap;
            summary["frobenius_gap"] = diff.frobenius;
            summary["nuclear_gap"] = diff.nuclear;
            summary["ps_lhs"] = ps.lhs;
            summary["ps_rhs"] = ps.rhs;
            summary["discrepancy"] = disc;
            summary["ps_holds"] = ps.holds;
            return int{ps.holds ? exit_ok : exit_assertion_failed};
        }
        if (st->kind == "universality") {
            if (st->degree == 0) st->degree = 1000;
            if (st->samples == 0) st->samples = 5000;
            const auto report = universality_compare(st->degree, st->samples, seed, c->threads);
            st->m = report.m;
            st->ell = report.ell;
            csv = "law,count,probability\n";
            for (const auto& law : report.laws) {
                const auto stats = summarize_counts(law.counts, 0.0, 1.0);
                int max_count = 0;
                for (int v : law.counts) max_count = std::max(max_count, v);
                for (int k = 0; k <= max_count; ++k) {
                    const auto hits = std::count(law.counts.begin(), law.counts.end(), k);
                    csv += csv_row({law.law, std::to_string(k),
                                    format_double(static_cast<double>(hits) / std::max(1, stats.samples))});
                }
            }
            json laws = json::array();
            for (const auto& law : report.laws) {
                laws.push_back({{"law", law.law}, {"mean", law.mean}, {"standard_error", law.standard_error},
                                {"excluded", law.excluded}});
            }
            json dists = json::array();
            for (const auto& d : report.distances) {
                dists.push_back({{"law_a", d.law_a}, {"law_b", d.law_b}, {"ks_distance", d.ks_distance},
                                 {"ks_scale", d.ks_scale}, {"bin_gaps", d.bin_gaps}, {"mean_gap", d.mean_gap},
                                 {"mean_gap_se", d.mean_gap_se}});
            }
            summary["bulk_interval"] = {1.0 - 1.0 / report.m, 1.0 - report.ell / report.n};
            summary["laws"] = laws;
            summary["distances"] = dists;
            const auto& self = report.distances.back();
            const bool ok = self.ks_distance <= 3.0 * self.ks_scale;
            summary["check_self_distance_within_3se"] = ok;
            return int{ok ? exit_ok : exit_assertion_failed};
        }
        if (st->kind == "sign-vs-root") {
            if (st->degree == 0) st->degree = 2000;
            if (st->m == 0.0) st->m = std::pow(static_cast<double>(st->degree), 0.25);
            if (st->delta == 0.0) st->delta = 0.01;
            if (st->samples == 0) st->samples = 10000;
            default_ell();
            const auto r = sign_change_vs_root_mc(st->degree, st->m, st->ell, st->delta, st->samples, seed, c->threads);
            csv = "delta,cells,samples,mismatches,probability,ci_lo,ci_hi,violations\n" +
                  csv_row({format_double(r.delta), std::to_string(r.cells), std::to_string(r.samples),
                           std::to_string(r.mismatches), format_double(r.mismatch_probability), format_double(r.ci.first),
                           format_double(r.ci.second), std::to_string(r.violations)});
            summary["mismatch_probability"] = r.mismatch_probability;
            summary["violations"] = r.violations;
            summary["mean_roots"] = r.mean_roots;
            summary["mean_sign_changes"] = r.mean_sign_changes;
            summary["excluded"] = r.excluded;
            return int{r.violations == 0 ? exit_ok : exit_assertion_failed};
        }
        if (st->kind == "samplers") {
            if (st->draws == 0) st->draws = 100000;
            const auto grid = ProcessGrid::uniform(st->start, st->end, st->step);
            const auto agreement = compare_samplers(grid, st->draws, seed, c->threads);
            csv = "i,j,t_i,t_j,r_cov,r_kernel,target\n";
            const std::size_t w = grid.size();
            for (std::size_t i = 0; i < w; ++i) {
                for (std::size_t j = 0; j < i; ++j) {
                    csv += csv_row({std::to_string(i), std::to_string(j), format_double(grid.points[i]),
                                    format_double(grid.points[j]), format_double(agreement.covariance.correlations[i * w + j]),
                                    format_double(agreement.kernel.correlations[i * w + j]),
                                    format_double(cov_Z(grid.points[i], grid.points[j]))});
                }
            }
            summary["max_correlation_z"] = agreement.max_correlation_z;
            summary["max_target_gap"] = agreement.max_target_gap;
            summary["agree"] = agreement.agree;
            return int{agreement.agree ? exit_ok : exit_assertion_failed};
        }
        throw ParameterError("compare --kind must be covariance, universality, sign-vs-root or samplers");
    };
    commands.push_back(std::move(cmd));
}

void add_concentration(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "concentration",
                                         "Tail experiments: trend | multiroot | anticoncentration | lower-tail");
    struct State {
        std::string kind = "trend";
        int degree = 0;
        std::vector<int> degrees{100, 1000, 10000};
        std::string dist;
        double eps0 = CoefficientDistribution::default_epsilon0;
        double eps = 0.5;
        int samples = 0;
        double x = 0.99;
        std::vector<double> deltas{0.4, 0.2, 0.1, 0.05};
        std::vector<double> m_values{32.0, 64.0};
    };
    auto st = std::make_shared<State>();
    cmd->add("--kind", st->kind, "trend | multiroot | anticoncentration | lower-tail");
    cmd->add("-n,--degree", st->degree, "degree (0: kind default)");
    cmd->add("--degrees", st->degrees, "trend: comma-separated degrees");
    cmd->add("--dist", st->dist, "coefficient law (empty: kind default)");
    cmd->add("--eps0", st->eps0, "moment exponent epsilon0 of the law");
    cmd->add("--eps", st->eps, "trend: tail scale epsilon");
    cmd->add("--samples", st->samples, "samples (0: kind default)");
    cmd->add("--x", st->x, "multiroot: left end of the intervals");
    cmd->add("--deltas", st->deltas, "multiroot: log-lengths delta");
    cmd->add("--m-values", st->m_values, "anticoncentration: values of m");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        const SeedSpec seed{c->seed, 0};
        const bool lower = st->kind == "lower-tail";
        if (st->dist.empty()) st->dist = lower ? "rademacher" : "gaussian";
        const auto dist = CoefficientDistribution::parse(st->dist, st->eps0);
        auto ci_cells = [](std::pair<double, double> ci) { return std::make_pair(format_double(ci.first), format_double(ci.second)); };
        if (st->kind == "trend") {
            if (st->samples == 0) st->samples = 2000;
            const auto trend = concentration_trend(st->degrees, st->eps, st->samples, seed, c->threads, dist);
            csv = "n,mean,se,reference,threshold,p_lower,p_upper,p_two_sided,ci_lo,ci_hi,excluded\n";
            json reports = json::array();
            bool budget = false;
            for (std::size_t k = 0; k < trend.degrees.size(); ++k) {
                const auto& r = trend.reports[k];
                const auto [lo, hi] = ci_cells(r.wilson_two_sided);
                csv += csv_row({std::to_string(trend.degrees[k]), format_double(r.mean_count), format_double(r.standard_error),
                                format_double(r.reference_mean), format_double(r.threshold),
                                format_double(r.tail_probability_lower), format_double(r.tail_probability_upper),
                                format_double(r.tail_probability_two_sided), lo, hi, std::to_string(r.excluded)});
                auto j = tail_json(r);
                j["n"] = trend.degrees[k];
                reports.push_back(j);
                budget = budget || r.exclusion_budget_exceeded;
            }
            summary["reports"] = reports;
            summary["nonincreasing"] = trend.nonincreasing;
            if (budget) return int{exit_numeric_failure};
            return int{trend.nonincreasing ? exit_ok : exit_assertion_failed};
        }
        if (st->kind == "multiroot") {
            if (st->degree == 0) st->degree = 2000;
            if (st->samples == 0) st->samples = 100000;
            const auto scan = multiple_root_scan(st->degree, st->x, st->deltas, st->samples, seed, c->threads, dist);
            csv = "delta,y,events,samples,probability,ci_lo,ci_hi,one_sided\n";
            for (const auto& p : scan.points) {
                const auto [lo, hi] = ci_cells(p.ci);
                csv += csv_row({format_double(p.delta), format_double(p.y), std::to_string(p.events),
                                std::to_string(p.samples), format_double(p.probability), lo, hi, show(p.one_sided)});
            }
            summary["slope"] = scan.slope;
            summary["slope_points"] = scan.slope_points;
            summary["excluded"] = scan.excluded;
            // nested intervals: probabilities must not decrease with delta
            bool monotone = true;
            for (const auto& a : scan.points) {
                for (const auto& b : scan.points) {
                    if (a.delta < b.delta && a.probability > b.probability) monotone = false;
                }
            }
            summary["monotone_in_delta"] = monotone;
            if (scan.excluded * 100 >= st->samples && scan.excluded > 0) return int{exit_numeric_failure};
            return int{monotone ? exit_ok : exit_assertion_failed};
        }
        if (st->kind == "anticoncentration") {
            if (st->degree == 0) st->degree = 1000;
            if (st->samples == 0) st->samples = 100000;
            const auto points = anticoncentration(st->degree, st->m_values, st->samples, seed, c->threads, dist);
            csv = "m,x,threshold,lacunary_length,events,probability,ci_lo,ci_hi\n";
            json arr = json::array();
            for (const auto& p : points) {
                const auto [lo, hi] = ci_cells(p.ci);
                csv += csv_row({format_double(p.m), format_double(p.x), format_double(p.threshold),
                                std::to_string(p.lacunary_length), std::to_string(p.events), format_double(p.probability),
                                lo, hi});
                arr.push_back({{"m", p.m}, {"probability", p.probability}, {"lacunary_length", p.lacunary_length}});
            }
            summary["points"] = arr;
            return int{exit_ok};
        }
        if (lower) {
            if (st->degree == 0) st->degree = 8;
            if (st->samples == 0) st->samples = 100000;
            const auto r = lower_tail_floor(st->degree, st->samples, seed, c->threads, dist);
            const auto [lo, hi] = ci_cells(r.ci);
            csv = "n,samples,no_real_roots,probability,ci_lo,ci_hi\n" +
                  csv_row({std::to_string(r.n), std::to_string(r.samples), std::to_string(r.no_real_roots),
                           format_double(r.probability), lo, hi});
            summary["probability"] = r.probability;
            summary["excluded"] = r.excluded;
            if (r.excluded * 100 >= st->samples && r.excluded > 0) return int{exit_numeric_failure};
            return int{r.probability > 0.0 ? exit_ok : exit_assertion_failed};
        }
        throw ParameterError("concentration --kind must be trend, multiroot, anticoncentration or lower-tail");
    };
    commands.push_back(std::move(cmd));
}

void add_figure1(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "figure1", "Root locations in [0, 1] of sampled polynomials");
    struct State {
        int degree = 1000;
        int samples = 100;
        std::string dist = "gaussian";
        double eps0 = CoefficientDistribution::default_epsilon0;
    };
    auto st = std::make_shared<State>();
    cmd->add("-n,--degree", st->degree, "polynomial degree");
    cmd->add("--samples", st->samples, "number of polynomials");
    cmd->add("--dist", st->dist, "coefficient law");
    cmd->add("--eps0", st->eps0, "moment exponent epsilon0 of the law");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        const auto dist = CoefficientDistribution::parse(st->dist, st->eps0);
        const auto r = figure1_dataset(st->degree, st->samples, dist, SeedSpec{c->seed, 0}, c->threads);
        csv = figure1_csv(r);
        summary["bulk_start"] = r.bulk_start;
        summary["bulk_fraction"] = r.bulk_fraction;
        summary["bulk_fraction_se"] = r.bulk_fraction_se;
        summary["quadrature_ratio"] = r.quadrature_ratio;
        summary["total_roots"] = r.total_roots;
        summary["expected_total"] = r.expected_total;
        summary["total_se"] = r.total_se;
        summary["excluded"] = r.excluded;
        if (r.excluded * 100 >= r.samples && r.excluded > 0) return int{exit_numeric_failure};
        if (dist.kind() == DistributionKind::gaussian && r.samples >= 30) {
            const bool ok = std::fabs(r.bulk_fraction - r.quadrature_ratio) <= 3.0 * r.bulk_fraction_se;
            summary["check_bulk_fraction_within_3se"] = ok;
            if (!ok) return int{exit_assertion_failed};
        }
        return int{exit_ok};
    };
    commands.push_back(std::move(cmd));
}

void add_dyadic(CLI::App& root, std::vector<std::unique_ptr<Command>>& commands) {
    auto cmd = std::make_unique<Command>(root, "dyadic", "Root-count tails on dyadic cells [1-2^-j, 1-2^-(j+1)]");
    struct State {
        int degree = 1000;
        std::string j_range = "0,4";
        std::vector<int> h{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        int samples = 10000;
        int jensen_samples = 200;
        std::string dist = "gaussian";
        double eps0 = CoefficientDistribution::default_epsilon0;
    };
    auto st = std::make_shared<State>();
    cmd->add("-n,--degree", st->degree, "polynomial degree");
    cmd->add("--j-range", st->j_range, "first,last dyadic index");
    cmd->add("--thresholds", st->h, "thresholds h for P(N >= h)");
    cmd->add("--samples", st->samples, "number of polynomials");
    cmd->add("--jensen-samples", st->jensen_samples, "samples that also get the Jensen bound");
    cmd->add("--dist", st->dist, "coefficient law");
    cmd->add("--eps0", st->eps0, "moment exponent epsilon0 of the law");
    Command* c = cmd.get();
    cmd->action = [c, st](std::string& csv, json& summary) {
        const auto [a, b] = parse_interval(st->j_range);
        if (a != std::floor(a) || b != std::floor(b)) throw ParameterError("--j-range needs integers");
        const auto dist = CoefficientDistribution::parse(st->dist, st->eps0);
        const auto scan = dyadic_tail_scan(st->degree, static_cast<int>(a), static_cast<int>(b), st->h, st->samples,
                                           SeedSpec{c->seed, 0}, c->threads, st->jensen_samples, dist);
        csv = "j,lo,hi,h,probability\n";
        json cells = json::array();
        int violations = 0;
        for (const auto& cell : scan.cells) {
            for (std::size_t k = 0; k < scan.h_values.size(); ++k) {
                csv += csv_row({std::to_string(cell.j), format_double(cell.lo), format_double(cell.hi),
                                std::to_string(scan.h_values[k]), format_double(cell.exceedance[k])});
            }
            cells.push_back({{"j", cell.j}, {"max_count", cell.max_count}, {"histogram", cell.histogram},
                             {"jensen_samples", cell.jensen_samples}, {"jensen_mean", cell.jensen_mean},
                             {"jensen_max", cell.jensen_max}, {"jensen_violations", cell.jensen_violations}});
            violations += cell.jensen_violations;
        }
        summary["cells"] = cells;
        summary["excluded"] = scan.excluded;
        if (scan.excluded * 100 >= scan.samples && scan.excluded > 0) return int{exit_numeric_failure};
        return int{violations == 0 ? exit_ok : exit_assertion_failed};
    };
    commands.push_back(std::move(cmd));
}

int write_outputs(const Command& cmd, const std::string& csv, const json& summary, std::ostream& out, std::ostream& err) {
    std::string header = "# kaclab " + cmd.name() + "\n";
    std::string sidecar;
    for (const auto& [key, value] : cmd.resolved()) {
        header += "# " + key + "=" + value + "\n";
        sidecar += key + "=" + value + "\n";
    }
    if (!csv.empty()) {
        if (cmd.out_path.empty()) {
            out << header << csv;
        } else {
            std::ofstream file(cmd.out_path, std::ios::binary);
            if (!file) throw ParameterError("cannot open output file " + cmd.out_path);
            file << header << csv;
            std::ofstream side(cmd.out_path + ".config", std::ios::binary);
            side << sidecar;
        }
    }
    const std::string text = summary.dump(2) + "\n";
    if (cmd.report_path.empty()) {
        err << text;
    } else {
        std::ofstream file(cmd.report_path, std::ios::binary);
        if (!file) throw ParameterError("cannot open report file " + cmd.report_path);
        file << text;
    }
    return 0;
}

}  // namespace

std::pair<double, double> parse_interval(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw ParameterError("interval '" + text + "' must look like a,b");
    double a = 0.0, b = 0.0;
    try {
        std::size_t used = 0;
        const std::string left = trim(text.substr(0, comma));
        const std::string right = trim(text.substr(comma + 1));
        a = std::stod(left, &used);
        if (used != left.size()) throw std::invalid_argument("trailing characters");
        b = std::stod(right, &used);
        if (used != right.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::logic_error&) {
        throw ParameterError("interval '" + text + "' must look like a,b with numbers a <= b");
    }
    if (!std::isfinite(a) || !std::isfinite(b) || a > b) {
        throw ParameterError("interval '" + text + "' needs finite a <= b");
    }
    return {a, b};
}

std::vector<ConfigEntry> parse_config(std::istream& in, const std::string& source) {
    std::vector<ConfigEntry> entries;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ParameterError(source + " line " + std::to_string(number) + ": expected key=value, got '" + text + "'");
        }
        ConfigEntry entry{trim(text.substr(0, eq)), trim(text.substr(eq + 1)), number};
        if (entry.key.empty() || entry.key.find_first_of(" \t") != std::string::npos) {
            throw ParameterError(source + " line " + std::to_string(number) + ": malformed key");
        }
        for (const auto& previous : entries) {
            if (previous.key == entry.key) {
                throw ParameterError(source + " line " + std::to_string(number) + ": duplicate key '" + entry.key + "'");
            }
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<ConfigEntry> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read config file " + path);
    return parse_config(in, path);
}

ExperimentConfig load_config(const std::string& path) {
    ExperimentConfig cfg;
    std::string dist = "gaussian";
    double eps0 = CoefficientDistribution::default_epsilon0;
    std::string interval, region;
    bool real = false;
    for (const auto& e : read_config_file(path)) {
        const std::string where = path + " line " + std::to_string(e.line) + ": ";
        try {
            auto to_int = [&](const std::string& v) {
                std::size_t used = 0;
                const long long x = std::stoll(v, &used);
                if (used != v.size() || x < INT32_MIN || x > INT32_MAX) throw std::invalid_argument(v);
                return static_cast<int>(x);
            };
            auto to_double = [&](const std::string& v) {
                std::size_t used = 0;
                const double x = std::stod(v, &used);
                if (used != v.size()) throw std::invalid_argument(v);
                return x;
            };
            if (e.key == "degree" || e.key == "n") {
                cfg.n = to_int(e.value);
            } else if (e.key == "dist") {
                dist = e.value;
            } else if (e.key == "eps0") {
                eps0 = to_double(e.value);
            } else if (e.key == "samples") {
                cfg.samples = to_int(e.value);
            } else if (e.key == "seed") {
                std::size_t used = 0;
                cfg.seed.master_seed = std::stoull(e.value, &used);
                if (used != e.value.size()) throw std::invalid_argument(e.value);
            } else if (e.key == "interval") {
                interval = e.value;
            } else if (e.key == "region") {
                region = e.value;
            } else if (e.key == "real") {
                if (e.value != "true" && e.value != "false") throw std::invalid_argument(e.value);
                real = e.value == "true";
            } else if (e.key == "eps") {
                cfg.epsilon = to_double(e.value);
            } else if (e.key == "threads") {
                cfg.parallelism = to_int(e.value);
            }
        } catch (const ParameterError& err) {
            throw ParameterError(where + err.what());
        } catch (const std::logic_error&) {
            throw ParameterError(where + "invalid value '" + e.value + "' for key '" + e.key + "'");
        }
    }
    cfg.dist = CoefficientDistribution::parse(dist, eps0);
    cfg.target = resolve_target(interval.empty() ? "0,1" : interval, region, real, !interval.empty());
    cfg.validate();
    return cfg;
}

int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Real roots of random Kac polynomials: certified counting, Kac-Rice, limit process, experiments"};
    app.name("kaclab");
    app.require_subcommand(1);
    std::vector<std::unique_ptr<Command>> commands;
    add_sample(app, commands);
    add_count(app, commands);
    add_density(app, commands);
    add_expect(app, commands);
    add_process(app, commands);
    add_compare(app, commands);
    add_concentration(app, commands);
    add_figure1(app, commands);
    add_dyadic(app, commands);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ConversionError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid_input;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_invalid_input;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return exit_usage;
    }

    Command* cmd = nullptr;
    for (auto& c : commands) {
        if (c->app->parsed()) cmd = c.get();
    }
    if (cmd == nullptr) {
        err << app.help();
        return exit_usage;
    }
    try {
        cmd->apply_config();
        cmd->threads = resolve_threads(cmd->threads);
        std::string csv;
        json summary;
        summary["schema_version"] = 1;
        summary["subcommand"] = cmd->name();
        const int code = cmd->action(csv, summary);
        json config = json::object();
        for (const auto& [key, value] : cmd->resolved()) config[key] = value;
        summary["config"] = config;
        summary["exit_code"] = code;
        write_outputs(*cmd, csv, summary, out, err);
        return code;
    } catch (const QuadratureError& e) {
        err << "numeric failure: " << e.what() << " (best estimate " << e.estimate() << ")\n";
        return exit_numeric_failure;
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << "\n";
        return exit_numeric_failure;
    } catch (const ParameterError& e) {
        err << "invalid input: " << e.what() << "\n";
        return exit_invalid_input;
    }
}

}  // namespace kaclab
