#include "kaclab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "kaclab/errors.hpp"
#include "kaclab/kac_rice.hpp"
#include "kaclab/parallel.hpp"

namespace kaclab {

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials, double z) {
    if (trials <= 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return {std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

std::string CountTarget::describe() const {
    char buf[128];
    switch (kind) {
        case Kind::interval:
            std::snprintf(buf, sizeof buf, "%c%.17g,%.17g%c", interval.lo_closed ? '[' : '(', interval.lo, interval.hi,
                          interval.hi_closed ? ']' : ')');
            return buf;
        case Kind::region:
            return std::string(region_name(region));
        case Kind::real_line:
            return "real";
    }
    return "?";
}

int count_target(const KacPolynomial& p, const CountTarget& target, const CountOptions& options) {
    switch (target.kind) {
        case CountTarget::Kind::interval: {
            const auto r = count_certified(p, target.interval, options);
            return r.fully_certified() ? r.certified_count : -1;
        }
        case CountTarget::Kind::region: {
            const auto r = count_region(p, target.region, options);
            return r.fully_certified() ? r.certified_count : -1;
        }
        case CountTarget::Kind::real_line: {
            int total = 0;
            for (Region region : all_regions) {
                const auto r = count_region(p, region, options);
                if (!r.fully_certified()) return -1;
                total += r.certified_count;
            }
            return total;
        }
    }
    return -1;
}

double reference_expected_count(int n, const CountTarget& target) {
    switch (target.kind) {
        case CountTarget::Kind::region:
            return expected_count_region(n, target.region);
        case CountTarget::Kind::real_line:
            return expected_count_real_line(n);
        case CountTarget::Kind::interval:
            break;
    }
    const double lo = target.interval.lo;
    const double hi = target.interval.hi;
    double total = 0.0;
    // Each piece is mapped into [0, 1] by a law-preserving map.
    auto add = [&](double a, double b) {
        if (b > a) total += expected_count(n, a, b);
    };
    add(std::max(lo, 0.0), std::min(hi, 1.0));
    add(std::max(-hi, 0.0), std::min(-lo, 1.0));
    if (hi > 1.0) add(1.0 / hi, 1.0 / std::max(lo, 1.0));
    if (lo < -1.0) add(1.0 / -lo, 1.0 / std::max(-hi, 1.0));
    return total;
}

void ExperimentConfig::validate() const {
    if (n < 1) throw ParameterError("degree must be >= 1");
    if (samples < 1) throw ParameterError("samples must be >= 1");
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be > 0");
    if (parallelism < 0) throw ParameterError("parallelism must be >= 0");
    if (target.kind == CountTarget::Kind::interval) {
        if (!std::isfinite(target.interval.lo) || !std::isfinite(target.interval.hi) ||
            !(target.interval.lo <= target.interval.hi)) {
            throw ParameterError("interval needs finite a <= b");
        }
    }
}

TailReport summarize_counts(const std::vector<int>& counts, double reference_mean, double threshold) {
    TailReport report;
    report.reference_mean = reference_mean;
    report.threshold = threshold;
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t lower = 0, upper = 0, two_sided = 0;
    for (int c : counts) {
        if (c < 0) {
            ++report.excluded;
            continue;
        }
        ++report.samples;
        sum += c;
        sum_sq += static_cast<double>(c) * c;
        const double dev = c - reference_mean;
        if (dev <= -threshold) ++lower;
        if (dev >= threshold) ++upper;
        if (std::fabs(dev) >= threshold) ++two_sided;
    }
    const int k = report.samples;
    if (k > 0) {
        report.mean_count = sum / k;
        if (k > 1) {
            const double var = std::max(0.0, (sum_sq - k * report.mean_count * report.mean_count) / (k - 1));
            report.standard_error = std::sqrt(var / k);
        }
        report.tail_probability_lower = static_cast<double>(lower) / k;
        report.tail_probability_upper = static_cast<double>(upper) / k;
        report.tail_probability_two_sided = static_cast<double>(two_sided) / k;
    }
    report.wilson_lower = wilson_interval(lower, k);
    report.wilson_upper = wilson_interval(upper, k);
    report.wilson_two_sided = wilson_interval(two_sided, k);
    const int total = report.samples + report.excluded;
    report.exclusion_budget_exceeded = total > 0 && report.excluded * 100 >= total && report.excluded > 0;
    return report;
}

RootCountRun run_root_count_mc(const ExperimentConfig& cfg) {
    cfg.validate();
    RootCountRun run;
    run.counts.assign(static_cast<std::size_t>(cfg.samples), 0);
    parallel_for(run.counts.size(), resolve_threads(cfg.parallelism), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(cfg.dist, cfg.n, cfg.seed.child(i)));
        run.counts[i] = count_target(p, cfg.target, cfg.count_options);
    });
    const double reference = reference_expected_count(cfg.n, cfg.target);
    run.report = summarize_counts(run.counts, reference, cfg.epsilon * std::log(static_cast<double>(cfg.n)));
    return run;
}

std::string counts_csv(const std::vector<int>& counts) {
    std::string out = "sample_id,count\n";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += counts[i] < 0 ? std::string("NA") : std::to_string(counts[i]);
        out += '\n';
    }
    return out;
}

namespace {

// Least-squares slope of y on x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double k = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / k;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / k;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

void require_samples(int samples) {
    if (samples < 1) throw ParameterError("samples must be >= 1");
}

}  // namespace

MultipleRootScan multiple_root_scan(int n, double x_anchor, const std::vector<double>& deltas, int samples,
                                    const SeedSpec& seed, int threads, const CoefficientDistribution& dist) {
    require_samples(samples);
    if (n < 1) throw ParameterError("degree must be >= 1");
    if (!(x_anchor > 0.0 && x_anchor < 1.0)) throw ParameterError("anchor x must lie in (0, 1)");
    if (deltas.empty() || deltas.size() > 62) throw ParameterError("delta list needs 1 to 62 entries");
    for (double d : deltas) {
        if (!(d > 0.0)) throw ParameterError("every delta must be > 0");
    }
    // Widest interval first; nested intervals share the left end.
    std::vector<std::size_t> order(deltas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deltas[a] > deltas[b]; });
    std::vector<double> ys(deltas.size());
    for (std::size_t k = 0; k < deltas.size(); ++k) ys[k] = 1.0 - (1.0 - x_anchor) * std::exp(-deltas[k]);

    // Per sample: bit k set when the interval for delta k holds >= 2 roots;
    // -1 marks an excluded sample.
    std::vector<std::int64_t> hits(static_cast<std::size_t>(samples), 0);
    parallel_for(hits.size(), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        std::int64_t mask = 0;
        for (std::size_t k : order) {
            const auto r = count_certified(p, CountInterval::closed(x_anchor, ys[k]));
            if (!r.fully_certified()) {
                hits[i] = -1;
                return;
            }
            if (r.certified_count < 2) break;
            mask |= std::int64_t{1} << k;
        }
        hits[i] = mask;
    });

    MultipleRootScan scan;
    scan.x_anchor = x_anchor;
    const auto valid = static_cast<std::int64_t>(std::count_if(hits.begin(), hits.end(), [](auto h) { return h >= 0; }));
    scan.excluded = samples - static_cast<int>(valid);
    std::vector<double> log_d, log_p;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        MultipleRootPoint point;
        point.delta = deltas[k];
        point.y = ys[k];
        point.samples = valid;
        for (auto h : hits) {
            if (h >= 0 && ((h >> k) & 1)) ++point.events;
        }
        point.probability = valid > 0 ? static_cast<double>(point.events) / valid : 0.0;
        if (point.events == 0) {
            point.one_sided = true;
            point.ci = {0.0, valid > 0 ? std::min(1.0, 3.0 / valid) : 1.0};
        } else {
            point.ci = wilson_interval(point.events, valid);
            log_d.push_back(std::log(point.delta));
            log_p.push_back(std::log(point.probability));
        }
        scan.points.push_back(point);
    }
    scan.slope_points = static_cast<int>(log_d.size());
    scan.slope = scan.slope_points >= 2 ? fit_slope(log_d, log_p) : 0.0;
    return scan;
}

SignChangeComparison sign_change_vs_root_mc(int n, double m, double ell, double delta, int samples,
                                            const SeedSpec& seed, int threads, const CoefficientDistribution& dist) {
    require_samples(samples);
    const PartitionSpec spec = make_partition(n, m, ell, delta);
    const CountInterval span = CountInterval::closed(spec.x.front(), spec.x.back());
    struct Row {
        int roots = -1;
        int changes = 0;
    };
    std::vector<Row> rows(static_cast<std::size_t>(samples));
    parallel_for(rows.size(), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        const auto r = count_certified(p, span);
        if (!r.fully_certified()) return;
        rows[i].roots = r.certified_count;
        rows[i].changes = count_grid_sign_changes(p, spec);
    });
    SignChangeComparison out;
    out.delta = spec.delta;
    out.cells = static_cast<int>(spec.cell_count());
    double sum_roots = 0.0, sum_changes = 0.0;
    for (const auto& row : rows) {
        if (row.roots < 0) {
            ++out.excluded;
            continue;
        }
        ++out.samples;
        if (row.roots != row.changes) ++out.mismatches;
        if (row.changes > row.roots) ++out.violations;
        sum_roots += row.roots;
        sum_changes += row.changes;
    }
    if (out.samples > 0) {
        out.mismatch_probability = static_cast<double>(out.mismatches) / out.samples;
        out.mean_roots = sum_roots / out.samples;
        out.mean_sign_changes = sum_changes / out.samples;
    }
    out.ci = wilson_interval(out.mismatches, out.samples);
    return out;
}

namespace {

LawCounts law_counts(const std::string& name, const CoefficientDistribution& dist, int n, int samples,
                     const CountInterval& interval, const SeedSpec& seed, int threads) {
    LawCounts law;
    law.law = name;
    law.counts.assign(static_cast<std::size_t>(samples), 0);
    parallel_for(law.counts.size(), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        const auto r = count_certified(p, interval);
        law.counts[i] = r.fully_certified() ? r.certified_count : -1;
    });
    const auto report = summarize_counts(law.counts, 0.0, 1.0);
    law.mean = report.mean_count;
    law.standard_error = report.standard_error;
    law.excluded = report.excluded;
    return law;
}

std::vector<double> count_pmf(const std::vector<int>& counts, int max_count) {
    std::vector<double> pmf(static_cast<std::size_t>(max_count) + 1, 0.0);
    double valid = 0.0;
    for (int c : counts) {
        if (c < 0) continue;
        pmf[static_cast<std::size_t>(c)] += 1.0;
        valid += 1.0;
    }
    if (valid > 0.0) {
        for (auto& v : pmf) v /= valid;
    }
    return pmf;
}

}  // namespace

DistributionDistance compare_counts(const LawCounts& a, const LawCounts& b) {
    DistributionDistance out;
    out.law_a = a.law;
    out.law_b = b.law;
    int max_count = 0;
    for (int c : a.counts) max_count = std::max(max_count, c);
    for (int c : b.counts) max_count = std::max(max_count, c);
    const auto pa = count_pmf(a.counts, max_count);
    const auto pb = count_pmf(b.counts, max_count);
    double ca = 0.0, cb = 0.0;
    for (std::size_t k = 0; k < pa.size(); ++k) {
        ca += pa[k];
        cb += pb[k];
        out.ks_distance = std::max(out.ks_distance, std::fabs(ca - cb));
        out.bin_gaps.push_back(std::fabs(pa[k] - pb[k]));
    }
    const double na = static_cast<double>(a.counts.size() - static_cast<std::size_t>(a.excluded));
    const double nb = static_cast<double>(b.counts.size() - static_cast<std::size_t>(b.excluded));
    out.ks_scale = (na > 0 && nb > 0) ? std::sqrt(1.0 / na + 1.0 / nb) : 0.0;
    out.mean_gap = std::fabs(a.mean - b.mean);
    out.mean_gap_se = std::hypot(a.standard_error, b.standard_error);
    return out;
}

UniversalityReport universality_compare(int n, int samples, const SeedSpec& seed, int threads) {
    require_samples(samples);
    if (n < 2) throw ParameterError("universality comparison needs degree >= 2");
    UniversalityReport report;
    report.n = n;
    report.m = std::pow(static_cast<double>(n), 0.2);
    report.ell = 3.0 * std::log(static_cast<double>(n));
    BulkParams bulk{n, report.m, report.ell};
    const auto [lo, hi] = bulk.interval();
    const CountInterval interval = CountInterval::closed(lo, hi);
    report.laws.push_back(
        law_counts("gaussian", CoefficientDistribution::gaussian(), n, samples, interval, seed.child(0), threads));
    report.laws.push_back(
        law_counts("rademacher", CoefficientDistribution::rademacher(), n, samples, interval, seed.child(1), threads));
    report.laws.push_back(law_counts("uniform", CoefficientDistribution::uniform_symmetric(), n, samples, interval,
                                     seed.child(2), threads));
    report.laws.push_back(law_counts("gaussian-independent", CoefficientDistribution::gaussian(), n, samples, interval,
                                     seed.child(3), threads));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = i + 1; j < 3; ++j) report.distances.push_back(compare_counts(report.laws[i], report.laws[j]));
    }
    report.distances.push_back(compare_counts(report.laws[0], report.laws[3]));
    return report;
}

Figure1Result figure1_dataset(int n, int samples, const CoefficientDistribution& dist, const SeedSpec& seed,
                              int threads) {
    require_samples(samples);
    if (n < 1) throw ParameterError("degree must be >= 1");
    Figure1Result out;
    out.n = n;
    out.samples = samples;
    out.bulk_start = 1.0 - std::pow(static_cast<double>(n), -0.2);
    std::vector<std::vector<double>> roots(static_cast<std::size_t>(samples));
    std::vector<unsigned char> excluded(static_cast<std::size_t>(samples), 0);
    parallel_for(roots.size(), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        const auto r = count_certified(p, CountInterval::closed(0.0, 1.0));
        if (!r.fully_certified()) {
            excluded[i] = 1;
            return;
        }
        for (const auto& cell : r.isolating_cells) roots[i].push_back(refine_root(p, cell, 1e-9));
    });
    std::vector<double> totals, bulk;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (excluded[i]) {
            ++out.excluded;
            out.sample_root_counts.push_back(-1);
            continue;
        }
        out.sample_root_counts.push_back(static_cast<int>(roots[i].size()));
        double in_bulk = 0.0;
        for (double x : roots[i]) {
            out.roots.emplace_back(static_cast<int>(i), x);
            if (x >= out.bulk_start) in_bulk += 1.0;
        }
        totals.push_back(static_cast<double>(roots[i].size()));
        bulk.push_back(in_bulk);
    }
    const double k = static_cast<double>(totals.size());
    const double sum_total = std::accumulate(totals.begin(), totals.end(), 0.0);
    const double sum_bulk = std::accumulate(bulk.begin(), bulk.end(), 0.0);
    out.total_roots = static_cast<std::int64_t>(sum_total);
    if (k > 1 && sum_total > 0) {
        const double ratio = sum_bulk / sum_total;
        const double mean_total = sum_total / k;
        double resid = 0.0, var_total = 0.0;
        for (std::size_t i = 0; i < totals.size(); ++i) {
            resid += (bulk[i] - ratio * totals[i]) * (bulk[i] - ratio * totals[i]);
            var_total += (totals[i] - mean_total) * (totals[i] - mean_total);
        }
        out.bulk_fraction = ratio;
        out.bulk_fraction_se = std::sqrt(resid / (k * (k - 1))) / mean_total;
        out.total_se = std::sqrt(k * var_total / (k - 1));
    }
    const double whole = expected_count(n, 0.0, 1.0);
    out.quadrature_ratio = expected_count(n, out.bulk_start, 1.0) / whole;
    out.expected_total = k * whole;
    return out;
}

std::string figure1_csv(const Figure1Result& result) {
    std::string out = "sample_id,root\n";
    char buf[64];
    std::size_t next = 0;
    for (std::size_t id = 0; id < result.sample_root_counts.size(); ++id) {
        if (result.sample_root_counts[id] <= 0) {
            out += std::to_string(id) + ",NA\n";
            continue;
        }
        for (; next < result.roots.size() && result.roots[next].first == static_cast<int>(id); ++next) {
            std::snprintf(buf, sizeof buf, "%zu,%.12f\n", id, result.roots[next].second);
            out += buf;
        }
    }
    return out;
}

DyadicScan dyadic_tail_scan(int n, int j_lo, int j_hi, const std::vector<int>& h_values, int samples,
                            const SeedSpec& seed, int threads, int jensen_samples,
                            const CoefficientDistribution& dist) {
    require_samples(samples);
    if (n < 1) throw ParameterError("degree must be >= 1");
    if (j_lo < 0 || j_hi < j_lo || j_hi > 50) throw ParameterError("dyadic range needs 0 <= j_lo <= j_hi <= 50");
    for (int h : h_values) {
        if (h < 0) throw ParameterError("thresholds h must be >= 0");
    }
    jensen_samples = std::clamp(jensen_samples, 0, samples);
    const int cells = j_hi - j_lo + 1;
    std::vector<double> lo(static_cast<std::size_t>(cells)), hi(static_cast<std::size_t>(cells));
    for (int c = 0; c < cells; ++c) {
        lo[static_cast<std::size_t>(c)] = 1.0 - std::ldexp(1.0, -(j_lo + c));
        hi[static_cast<std::size_t>(c)] = 1.0 - std::ldexp(1.0, -(j_lo + c + 1));
    }
    // counts[i * cells + c]; jensen[i * cells + c] for i < jensen_samples
    std::vector<int> counts(static_cast<std::size_t>(samples) * cells, 0);
    std::vector<double> jensen(static_cast<std::size_t>(jensen_samples) * cells, 0.0);
    parallel_for(static_cast<std::size_t>(samples), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        for (int c = 0; c < cells; ++c) {
            const auto uc = static_cast<std::size_t>(c);
            const auto r = count_certified(p, CountInterval::closed(lo[uc], hi[uc]));
            counts[i * cells + uc] = r.fully_certified() ? r.certified_count : -1;
            if (i < static_cast<std::size_t>(jensen_samples)) {
                const double width = hi[uc] - lo[uc];
                jensen[i * cells + uc] = jensen_root_bound(p, (lo[uc] + hi[uc]) / 2.0, width / 2.0, width);
            }
        }
    });
    DyadicScan scan;
    scan.n = n;
    scan.h_values = h_values;
    scan.samples = samples;
    std::vector<unsigned char> bad(static_cast<std::size_t>(samples), 0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(samples); ++i) {
        for (int c = 0; c < cells; ++c) {
            if (counts[i * cells + static_cast<std::size_t>(c)] < 0) bad[i] = 1;
        }
        scan.excluded += bad[i];
    }
    const double valid = samples - scan.excluded;
    for (int c = 0; c < cells; ++c) {
        const auto uc = static_cast<std::size_t>(c);
        DyadicCell cell;
        cell.j = j_lo + c;
        cell.lo = lo[uc];
        cell.hi = hi[uc];
        for (std::size_t i = 0; i < static_cast<std::size_t>(samples); ++i) {
            if (bad[i]) continue;
            const int k = counts[i * cells + uc];
            if (static_cast<std::size_t>(k) >= cell.histogram.size()) cell.histogram.resize(static_cast<std::size_t>(k) + 1, 0);
            ++cell.histogram[static_cast<std::size_t>(k)];
            cell.max_count = std::max(cell.max_count, k);
        }
        for (int h : h_values) {
            std::int64_t at_least = 0;
            for (std::size_t k = static_cast<std::size_t>(h); k < cell.histogram.size(); ++k) at_least += cell.histogram[k];
            cell.exceedance.push_back(valid > 0 ? static_cast<double>(at_least) / valid : 0.0);
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < static_cast<std::size_t>(jensen_samples); ++i) {
            if (bad[i]) continue;
            const double bound = jensen[i * cells + uc];
            ++cell.jensen_samples;
            sum += bound;
            cell.jensen_max = std::max(cell.jensen_max, bound);
            if (counts[i * cells + uc] > bound + 1e-9) ++cell.jensen_violations;
        }
        if (cell.jensen_samples > 0) cell.jensen_mean = sum / cell.jensen_samples;
        scan.cells.push_back(std::move(cell));
    }
    return scan;
}

std::vector<AnticoncentrationPoint> anticoncentration(int n, const std::vector<double>& m_values, int samples,
                                                      const SeedSpec& seed, int threads,
                                                      const CoefficientDistribution& dist) {
    require_samples(samples);
    if (n < 1) throw ParameterError("degree must be >= 1");
    if (m_values.empty() || m_values.size() > 32) throw ParameterError("m list needs 1 to 32 entries");
    std::vector<AnticoncentrationPoint> points;
    for (double m : m_values) {
        if (!(m >= 1.0)) throw ParameterError("anticoncentration needs m >= 1");
        AnticoncentrationPoint point;
        point.m = m;
        point.x = 1.0 - 1.0 / (4.0 * m);
        point.threshold = std::pow(m, -3.0) * std::sqrt(variance_at(n, point.x));
        std::vector<double> a(static_cast<std::size_t>(n) + 1);
        double power = 1.0;
        for (auto& v : a) {
            v = power;
            power *= point.x;
        }
        if (a.back() > 0.0 && std::pow(m, -3.0) <= a.front()) {
            point.lacunary_length = lacunary_subsequence(a, std::pow(m, -3.0)).size();
        }
        points.push_back(point);
    }
    // bit k: |f(x_k)| below threshold k
    std::vector<std::uint32_t> hits(static_cast<std::size_t>(samples), 0);
    parallel_for(hits.size(), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        std::uint32_t mask = 0;
        for (std::size_t k = 0; k < points.size() && k < 32; ++k) {
            if (std::fabs(evaluate(p, points[k].x)) <= points[k].threshold) mask |= 1u << k;
        }
        hits[i] = mask;
    });
    for (std::size_t k = 0; k < points.size(); ++k) {
        for (auto h : hits) points[k].events += (h >> k) & 1u;
        points[k].probability = static_cast<double>(points[k].events) / samples;
        points[k].ci = wilson_interval(points[k].events, samples);
    }
    return points;
}

LowerTailFloor lower_tail_floor(int n, int samples, const SeedSpec& seed, int threads,
                                const CoefficientDistribution& dist) {
    ExperimentConfig cfg;
    cfg.n = n;
    cfg.samples = samples;
    cfg.dist = dist;
    cfg.seed = seed;
    cfg.parallelism = threads;
    cfg.target = CountTarget::on_real_line();
    cfg.validate();
    std::vector<int> counts(static_cast<std::size_t>(samples), 0);
    parallel_for(counts.size(), resolve_threads(threads), [&](std::size_t i) {
        const KacPolynomial p(sample_coefficients(dist, n, seed.child(i)));
        counts[i] = count_target(p, cfg.target);
    });
    LowerTailFloor out;
    out.n = n;
    for (int c : counts) {
        if (c < 0) {
            ++out.excluded;
            continue;
        }
        ++out.samples;
        if (c == 0) ++out.no_real_roots;
    }
    out.probability = out.samples > 0 ? static_cast<double>(out.no_real_roots) / out.samples : 0.0;
    out.ci = wilson_interval(out.no_real_roots, out.samples);
    return out;
}

ConcentrationTrend concentration_trend(const std::vector<int>& degrees, double epsilon, int samples,
                                       const SeedSpec& seed, int threads, const CoefficientDistribution& dist) {
    ConcentrationTrend trend;
    trend.degrees = degrees;
    for (std::size_t k = 0; k < degrees.size(); ++k) {
        ExperimentConfig cfg;
        cfg.n = degrees[k];
        cfg.dist = dist;
        cfg.samples = samples;
        cfg.epsilon = epsilon;
        cfg.seed = seed.child(k);
        cfg.parallelism = threads;
        trend.reports.push_back(run_root_count_mc(cfg).report);
    }
    trend.nonincreasing = true;
    for (std::size_t k = 1; k < trend.reports.size(); ++k) {
        if (trend.reports[k].tail_probability_two_sided > trend.reports[k - 1].tail_probability_two_sided) {
            trend.nonincreasing = false;
        }
    }
    return trend;
}

namespace {

// Fills draws x grid values, row i from stream seed.child(i).
std::vector<double> draw_paths(const ProcessGrid& grid, int paths, const SeedSpec& seed, int threads,
                               SamplerKind sampler) {
    if (paths < 1) throw ParameterError("paths must be >= 1");
    const std::size_t width = grid.size();
    std::vector<double> values(static_cast<std::size_t>(paths) * width);
    auto run = [&](const auto& s) {
        parallel_for(static_cast<std::size_t>(paths), resolve_threads(threads), [&](std::size_t i) {
            auto engine = make_engine(seed.child(i));
            s.draw(engine, std::span<double>(values.data() + i * width, width));
        });
    };
    if (sampler == SamplerKind::covariance_factor) {
        run(CovarianceSampler(grid));
    } else {
        const auto [du, u_max] = KernelSampler::default_resolution(grid);
        run(KernelSampler(grid, du, u_max));
    }
    return values;
}

}  // namespace

ProcessZeroStats process_zero_count_mc(const ProcessGrid& grid, int paths, const SeedSpec& seed, int threads,
                                       SamplerKind sampler) {
    const auto values = draw_paths(grid, paths, seed, threads, sampler);
    const std::size_t width = grid.size();
    ProcessZeroStats stats;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < paths; ++i) {
        const int c = count_zero_crossings(std::span<const double>(values.data() + static_cast<std::size_t>(i) * width, width));
        stats.counts.push_back(c);
        sum += c;
        sum_sq += static_cast<double>(c) * c;
    }
    stats.mean = sum / paths;
    if (paths > 1) {
        stats.standard_error = std::sqrt(std::max(0.0, (sum_sq - paths * stats.mean * stats.mean) / (paths - 1)) / paths);
    }
    stats.expected = expected_zeros(grid.points.front(), grid.points.back());
    return stats;
}

ProcessMoments process_moments(const ProcessGrid& grid, int draws, const SeedSpec& seed, int threads,
                               SamplerKind sampler) {
    const auto values = draw_paths(grid, draws, seed, threads, sampler);
    const std::size_t w = grid.size();
    ProcessMoments out;
    out.draws = draws;
    out.means.assign(w, 0.0);
    out.variances.assign(w, 0.0);
    out.correlations.assign(w * w, 0.0);
    for (int i = 0; i < draws; ++i) {
        for (std::size_t k = 0; k < w; ++k) out.means[k] += values[static_cast<std::size_t>(i) * w + k];
    }
    for (auto& v : out.means) v /= draws;
    std::vector<double> cov(w * w, 0.0);
    for (int i = 0; i < draws; ++i) {
        const double* row = values.data() + static_cast<std::size_t>(i) * w;
        for (std::size_t a = 0; a < w; ++a) {
            for (std::size_t b = 0; b <= a; ++b) cov[a * w + b] += (row[a] - out.means[a]) * (row[b] - out.means[b]);
        }
    }
    const double denom = draws > 1 ? draws - 1.0 : 1.0;
    for (std::size_t a = 0; a < w; ++a) out.variances[a] = cov[a * w + a] / denom;
    for (std::size_t a = 0; a < w; ++a) {
        for (std::size_t b = 0; b <= a; ++b) {
            const double r = cov[a * w + b] / denom / std::sqrt(out.variances[a] * out.variances[b]);
            out.correlations[a * w + b] = r;
            out.correlations[b * w + a] = r;
        }
    }
    return out;
}

SamplerAgreement compare_samplers(const ProcessGrid& grid, int draws, const SeedSpec& seed, int threads) {
    SamplerAgreement out;
    out.covariance = process_moments(grid, draws, seed.child(0), threads, SamplerKind::covariance_factor);
    out.kernel = process_moments(grid, draws, seed.child(1), threads, SamplerKind::kernel_discretized);
    const std::size_t w = grid.size();
    const double root_n = std::sqrt(static_cast<double>(draws));
    for (std::size_t a = 0; a < w; ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            const double rc = out.covariance.correlations[a * w + b];
            const double rk = out.kernel.correlations[a * w + b];
            // large-sample SE of a Pearson correlation: (1 - r^2) / sqrt(N)
            const double se = std::hypot((1.0 - rc * rc) / root_n, (1.0 - rk * rk) / root_n);
            const double z = se > 0.0 ? std::fabs(rc - rk) / se : (rc == rk ? 0.0 : INFINITY);
            out.max_correlation_z = std::max(out.max_correlation_z, z);
            const double target = cov_Z(grid.points[a], grid.points[b]);
            out.max_target_gap = std::max({out.max_target_gap, std::fabs(rc - target), std::fabs(rk - target)});
        }
    }
    out.agree = out.max_correlation_z <= 3.0;
    return out;
}

}  // namespace kaclab
