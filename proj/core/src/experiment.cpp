#include "pageopt/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "pageopt/optimizer.hpp"
#include "pageopt/parallel.hpp"
#include "pageopt/problems.hpp"
#include "pageopt/random.hpp"

namespace pageopt {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const char* context,
                        std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) { known = true; break; }
        if (!known)
            throw std::invalid_argument(std::string("config: unknown key \"") + it.key() +
                                        "\" in " + context);
    }
}

ProblemSpec parse_problem_spec(const json& j) {
    require_known_keys(j, "problem",
                       {"family", "d", "n", "spread", "condition", "lambda", "csv_path", "seed",
                        "streaming", "normalize_smoothness", "target_gap"});
    ProblemSpec spec;
    spec.family = j.value("family", spec.family);
    spec.d = j.value("d", spec.d);
    spec.n = j.value("n", spec.n);
    spec.spread = j.value("spread", spec.spread);
    spec.condition = j.value("condition", spec.condition);
    spec.lambda = j.value("lambda", spec.lambda);
    if (j.contains("csv_path")) spec.csv_path = j.at("csv_path").get<std::string>();
    spec.seed = j.value("seed", spec.seed);
    spec.streaming = j.value("streaming", spec.streaming);
    spec.normalize_smoothness = j.value("normalize_smoothness", spec.normalize_smoothness);
    if (j.contains("target_gap") && !j.at("target_gap").is_null())
        spec.target_gap = j.at("target_gap").get<double>();
    return spec;
}

ConfigOverrides parse_overrides(const json& j) {
    require_known_keys(j, "overrides", {"eta", "p", "b", "b_prime", "iters"});
    ConfigOverrides o;
    if (j.contains("eta")) o.eta = j.at("eta").get<double>();
    if (j.contains("p")) o.p = j.at("p").get<double>();
    if (j.contains("b")) o.b = j.at("b").get<std::size_t>();
    if (j.contains("b_prime")) o.b_prime = j.at("b_prime").get<std::size_t>();
    if (j.contains("iters")) o.iters = j.at("iters").get<std::size_t>();
    return o;
}

std::string csv_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

/* Welford mean and standard error of the mean */
MeanSe mean_and_se(const std::vector<double>& values) {
    MeanSe out;
    double m2 = 0.0;
    std::size_t k = 0;
    for (double v : values) {
        ++k;
        double delta = v - out.mean;
        out.mean += delta / static_cast<double>(k);
        m2 += delta * (v - out.mean);
    }
    if (k > 1) out.se = std::sqrt(m2 / (static_cast<double>(k - 1) * static_cast<double>(k)));
    return out;
}

RunResult run_algorithm(const FiniteSumProblem& problem, const PageConfig& proto,
                        const std::string& algorithm, std::uint64_t seed) {
    PageConfig cfg = proto;
    cfg.seed = seed;
    if (algorithm == "page") return run_page(problem, cfg);
    if (algorithm == "sgd")
        return run_sgd(problem, cfg.eta, cfg.params.b, cfg.iters, *cfg.x0, seed,
                       cfg.diagnostics_interval);
    if (algorithm == "gd")
        return run_gd(problem, cfg.eta, cfg.iters, *cfg.x0, seed, cfg.diagnostics_interval);
    throw std::invalid_argument("unknown algorithm \"" + algorithm +
                                "\" (expected page, sgd or gd)");
}

SummaryRow summarize_run(const FiniteSumProblem& problem, std::uint64_t seed,
                         const PageConfig& cfg, const RunResult& result,
                         std::optional<std::size_t> theory_iters) {
    SummaryRow row;
    row.seed = seed;
    row.final_grad_norm = norm(problem.full_gradient(result.x_hat));
    row.final_f = problem.value(result.x_hat);
    row.chosen_index = result.chosen_index;
    row.iters = cfg.iters;
    row.oracle_calls = result.oracle_calls;
    row.paper_calls = result.paper_calls;
    row.theory_iters = theory_iters;
    row.theory_grad_complexity = theory::grad_complexity(
        cfg.params.b, static_cast<double>(cfg.iters), cfg.params.p, cfg.params.b_prime);
    return row;
}

/* guaranteed iteration count for the resolved batch sizes, when f* is known */
std::optional<std::size_t> theory_iteration_count(const FiniteSumProblem& problem,
                                                  const ExperimentSpec& spec,
                                                  const PageConfig& cfg, const Vector& x0) {
    if (!problem.constants().optimal_value) return std::nullopt;
    double delta0 = initial_gap(problem, x0);
    if (delta0 < 0.0) delta0 = 0.0;
    if (spec.mode == theory::Mode::finite_sum)
        return theory::iterations_finite(problem.constants().smoothness, delta0, spec.epsilon,
                                         cfg.params.p, cfg.params.b_prime);
    return theory::iterations_online(problem.constants().smoothness, delta0, spec.epsilon,
                                     cfg.params.p, cfg.params.b_prime);
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    body(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::shared_ptr<FiniteSumProblem> problem_for_seed(
    const std::shared_ptr<FiniteSumProblem>& base, const ProblemSpec& spec, std::uint64_t seed) {
    if (!spec.streaming) return base;
    /* one view per run; run_page reseeds its stream from the run seed anyway */
    return streaming_view(base, RandomSource(seed));
}

}  // namespace

ExperimentSpec parse_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config: top level must be a JSON object");
    require_known_keys(j, "config",
                       {"problem", "algorithm", "mode", "epsilon", "seeds", "output_dir",
                        "diagnostics_interval", "overrides"});
    ExperimentSpec spec;
    try {
        if (j.contains("problem")) spec.problem = parse_problem_spec(j.at("problem"));
        spec.algorithm = j.value("algorithm", spec.algorithm);
        if (j.contains("mode")) spec.mode = parse_mode_name(j.at("mode").get<std::string>());
        spec.epsilon = j.value("epsilon", spec.epsilon);
        if (j.contains("seeds")) {
            spec.seeds.clear();
            for (const auto& s : j.at("seeds")) spec.seeds.push_back(s.get<std::uint64_t>());
        }
        spec.output_dir = j.value("output_dir", spec.output_dir);
        spec.diagnostics_interval = j.value("diagnostics_interval", spec.diagnostics_interval);
        if (j.contains("overrides")) spec.overrides = parse_overrides(j.at("overrides"));
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return spec;
}

ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_spec(text.str());
}

theory::Mode parse_mode_name(const std::string& name) {
    if (name == "finite") return theory::Mode::finite_sum;
    if (name == "online") return theory::Mode::online;
    throw std::invalid_argument("mode must be \"finite\" or \"online\", got \"" + name + "\"");
}

namespace {

std::uint64_t parse_u64_token(const std::string& token) {
    std::uint64_t value = 0;
    const char* first = token.data();
    const char* last = first + token.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw std::invalid_argument("cannot parse \"" + token + "\" as a nonnegative integer");
    return value;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string token =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (token.empty()) throw std::invalid_argument("empty entry in list \"" + text + "\"");
        /* a token is either one integer or a closed range first..last */
        std::size_t dots = token.find("..");
        if (dots == std::string::npos) {
            out.push_back(parse_u64_token(token));
        } else {
            std::uint64_t first = parse_u64_token(token.substr(0, dots));
            std::uint64_t last = parse_u64_token(token.substr(dots + 2));
            if (last < first)
                throw std::invalid_argument("range \"" + token + "\" runs backwards");
            if (last - first >= 1000000)
                throw std::invalid_argument("range \"" + token + "\" has more than 10^6 entries");
            for (std::uint64_t v = first; v <= last; ++v) out.push_back(v);
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

}  // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    return parse_u64_list(text);
}

std::vector<std::size_t> parse_count_list(const std::string& text) {
    std::vector<std::size_t> out;
    for (std::uint64_t v : parse_u64_list(text)) out.push_back(static_cast<std::size_t>(v));
    return out;
}

std::shared_ptr<FiniteSumProblem> build_problem(const ProblemSpec& spec) {
    RandomSource rng(spec.seed);
    std::shared_ptr<FiniteSumProblem> base;
    if (spec.family == "shared_quadratic") {
        base = make_shared_curvature_quadratic(rng, spec.d, spec.n, spec.spread);
    } else if (spec.family == "heterogeneous_quadratic") {
        auto het = make_heterogeneous_quadratic(rng, spec.d, spec.n, spec.condition);
        if (spec.normalize_smoothness) het = het->scaled(1.0 / het->constants().smoothness);
        base = het;
    } else if (spec.family == "logistic") {
        base = spec.csv_path ? load_logistic_csv(*spec.csv_path, spec.lambda)
                             : make_synthetic_logistic(rng, spec.d, spec.n, spec.lambda);
    } else {
        throw std::invalid_argument("unknown problem family \"" + spec.family +
                                    "\" (expected shared_quadratic, heterogeneous_quadratic or "
                                    "logistic)");
    }
    if (spec.normalize_smoothness && spec.family != "heterogeneous_quadratic")
        throw std::invalid_argument("normalize_smoothness is only supported for "
                                    "heterogeneous_quadratic");
    return base;
}

Vector starting_point(const FiniteSumProblem& problem, const ProblemSpec& spec) {
    if (!spec.target_gap) return Vector(problem.dim());
    double gap = *spec.target_gap;
    if (!std::isfinite(gap) || gap <= 0.0)
        throw std::invalid_argument("target_gap must be positive and finite");
    auto x_star = problem.minimizer();
    const auto& constants = problem.constants();
    if (!x_star || !constants.optimal_value)
        throw std::invalid_argument("target_gap needs a problem with a certified minimizer");
    /* a random unit ray; its seed is decoupled from the instance generator draws */
    RandomSource rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);
    Vector direction(problem.dim());
    double len = 0.0;
    do {
        for (std::size_t i = 0; i < direction.size(); ++i) direction[i] = rng.normal();
        len = norm(direction);
    } while (len < 1e-12);
    for (std::size_t i = 0; i < direction.size(); ++i) direction[i] /= len;
    // For the quadratic families the gap grows exactly quadratically along any
    // ray from the minimizer, so one probe at radius 1 pins the radius for the
    // requested gap.
    double unit_gap = problem.value(*x_star + direction) - *constants.optimal_value;
    if (!(unit_gap > 0.0))
        throw std::runtime_error("cannot control the initial gap along the drawn direction");
    double radius = std::sqrt(gap / unit_gap);
    return *x_star + radius * direction;
}

PageConfig resolve_config(const FiniteSumProblem& problem, const ExperimentSpec& spec,
                          const Vector& x0) {
    if (problem.streaming() && spec.mode == theory::Mode::finite_sum)
        throw std::invalid_argument("finite mode cannot run on a streaming problem");
    const auto& constants = problem.constants();
    const ConfigOverrides& o = spec.overrides;

    PageConfig cfg;
    std::size_t b;
    if (o.b) {
        b = *o.b;
    } else if (spec.mode == theory::Mode::finite_sum) {
        b = problem.component_count();
    } else {
        if (!constants.variance_bound)
            throw std::invalid_argument(
                "online defaults need a certified variance bound; set b explicitly");
        std::optional<std::size_t> cap;
        if (!problem.streaming()) cap = problem.component_count();
        b = theory::online_minibatch(*constants.variance_bound, spec.epsilon, cap);
    }
    std::size_t b_prime =
        o.b_prime ? *o.b_prime
                  : std::max<std::size_t>(1, static_cast<std::size_t>(
                                                 std::floor(std::sqrt(static_cast<double>(b)))));
    double p = o.p ? *o.p : theory::default_probability(b, b_prime);
    cfg.params = EstimatorParams{b, b_prime, p};
    cfg.params.validate(problem);

    cfg.eta = o.eta ? *o.eta : theory::stepsize_max(constants.smoothness, p, b_prime);
    if (o.iters) {
        cfg.iters = *o.iters;
        if (cfg.iters == 0) throw std::invalid_argument("iters must be at least 1");
    } else {
        if (!constants.optimal_value)
            throw std::invalid_argument(
                "the default iteration count needs a certified optimal value; set iters "
                "explicitly");
        double delta0 = initial_gap(problem, x0);
        if (delta0 < 0.0) delta0 = 0.0;
        cfg.iters = spec.mode == theory::Mode::finite_sum
                        ? theory::iterations_finite(constants.smoothness, delta0, spec.epsilon,
                                                    p, b_prime)
                        : theory::iterations_online(constants.smoothness, delta0, spec.epsilon,
                                                    p, b_prime);
    }
    cfg.epsilon = spec.epsilon;
    cfg.x0 = x0;
    cfg.diagnostics_interval = spec.diagnostics_interval;
    return cfg;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    if (res.ec != std::errc()) throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const RunResult& result) {
    out << "t,branch,f_val,grad_norm_sq,est_err_sq,lyapunov,oracle_calls,paper_calls\n";
    for (const TelemetryRecord& rec : result.trace) {
        out << rec.t << ',' << branch_name(rec.branch) << ',' << csv_cell(rec.f_val) << ','
            << csv_cell(rec.grad_norm_sq) << ',' << csv_cell(rec.est_err_sq) << ','
            << csv_cell(rec.lyapunov) << ',' << rec.oracle_calls << ',' << rec.paper_calls
            << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
    out << "seed,final_grad_norm,final_f,chosen_index,T,oracle_calls,paper_calls,theory_T,"
           "theory_grad_complexity\n";
    for (const SummaryRow& row : rows) {
        out << row.seed << ',' << format_double(row.final_grad_norm) << ','
            << format_double(row.final_f) << ',' << row.chosen_index << ',' << row.iters << ','
            << row.oracle_calls << ',' << row.paper_calls << ',';
        if (row.theory_iters) out << *row.theory_iters;
        out << ',' << csv_cell(row.theory_grad_complexity) << '\n';
    }
}

void write_verify_report_csv(std::ostream& out, const std::vector<CheckReport>& reports) {
    out << "name,passed,lhs,rhs,margin,tolerance,replicates,standard_error\n";
    for (const CheckReport& r : reports) {
        out << r.name << ',' << (r.passed ? 1 : 0) << ',' << format_double(r.lhs) << ','
            << format_double(r.rhs) << ',' << format_double(r.margin) << ','
            << format_double(r.tolerance) << ',' << r.replicates << ','
            << format_double(r.standard_error) << '\n';
    }
}

int cmd_run(const ExperimentSpec& spec) {
    if (spec.seeds.empty()) throw std::invalid_argument("run needs at least one seed");
    {
        std::vector<std::uint64_t> sorted = spec.seeds;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("run needs distinct seeds (trace files are per seed)");
    }
    auto base = build_problem(spec.problem);
    auto representative = problem_for_seed(base, spec.problem, 0);
    Vector x0 = starting_point(*representative, spec.problem);
    PageConfig proto = resolve_config(*representative, spec, x0);
    std::optional<std::size_t> theory_iters =
        theory_iteration_count(*representative, spec, proto, x0);

    std::filesystem::create_directories(spec.output_dir);
    std::vector<SummaryRow> rows(spec.seeds.size());
    std::vector<char> aborted(spec.seeds.size(), 0);
    parallel_for_index(spec.seeds.size(), worker_limit(), [&](std::size_t i) {
        std::uint64_t seed = spec.seeds[i];
        auto problem = problem_for_seed(base, spec.problem, seed);
        RunResult result = run_algorithm(*problem, proto, spec.algorithm, seed);
        write_file(spec.output_dir + "/trace_" + std::to_string(seed) + ".csv",
                   [&](std::ostream& out) { write_trace_csv(out, result); });
        rows[i] = summarize_run(*problem, seed, proto, result, theory_iters);
        aborted[i] = result.aborted ? 1 : 0;
    });
    write_file(spec.output_dir + "/summary.csv",
               [&](std::ostream& out) { write_summary_csv(out, rows); });

    std::vector<double> grad_norms;
    grad_norms.reserve(rows.size());
    for (const SummaryRow& row : rows) grad_norms.push_back(row.final_grad_norm);
    MeanSe agg = mean_and_se(grad_norms);
    std::cout << spec.algorithm << ": " << spec.seeds.size() << " run(s), T=" << proto.iters
              << ", b=" << proto.params.b << ", b'=" << proto.params.b_prime
              << ", p=" << format_double(proto.params.p)
              << ", eta=" << format_double(proto.eta) << "\n"
              << "mean final ||grad f|| = " << format_double(agg.mean) << " (se "
              << format_double(agg.se) << "), target epsilon = " << format_double(spec.epsilon)
              << "\n"
              << "wrote " << spec.output_dir << "/summary.csv and " << spec.seeds.size()
              << " trace file(s)\n";
    for (std::size_t i = 0; i < aborted.size(); ++i)
        if (aborted[i])
            std::cerr << "warning: seed " << spec.seeds[i] << " diverged; its row reports the "
                      << "last recorded iterate\n";
    return 0;
}

int cmd_verify(VerifyLevel level, const std::string& output_dir) {
    std::vector<CheckReport> reports = run_verification_suite(level, worker_limit());
    std::filesystem::create_directories(output_dir);
    write_file(output_dir + "/verify_report.csv",
               [&](std::ostream& out) { write_verify_report_csv(out, reports); });

    std::size_t passed = 0;
    for (const CheckReport& r : reports) {
        if (r.passed) ++passed;
        std::printf("[%s] %-44s margin=% .3e tol=%.3e", r.passed ? "PASS" : "FAIL",
                    r.name.c_str(), r.margin, r.tolerance);
        if (r.replicates > 0) std::printf(" (reps=%zu, se=%.3e)", r.replicates, r.standard_error);
        std::printf("\n");
    }
    std::printf("%zu/%zu checks passed; report in %s/verify_report.csv\n", passed,
                reports.size(), output_dir.c_str());
    return passed == reports.size() ? 0 : 1;
}

SweepResult sweep_n(const std::vector<std::size_t>& n_values, double epsilon,
                    const std::vector<std::uint64_t>& seeds) {
    if (n_values.empty()) throw std::invalid_argument("sweep needs at least one n value");
    if (seeds.empty()) throw std::invalid_argument("sweep needs at least one seed");
    if (!std::isfinite(epsilon) || epsilon <= 0.0)
        throw std::invalid_argument("sweep needs epsilon > 0");

    SweepResult result;
    for (std::size_t n : n_values) {
        if (n < 2) throw std::invalid_argument("sweep needs n >= 2");
        /* one instance per n, normalized so L = 1 and f(x0) - f* = 1 */
        ProblemSpec pspec;
        pspec.family = "heterogeneous_quadratic";
        pspec.d = 5;
        pspec.n = n;
        pspec.condition = 10.0;
        pspec.seed = 0x5355454eULL + n;
        pspec.normalize_smoothness = true;
        pspec.target_gap = 1.0;
        auto problem = build_problem(pspec);
        Vector x0 = starting_point(*problem, pspec);
        double smoothness = problem->constants().smoothness;

        SweepRow row;
        row.n = n;
        row.b = n;
        row.b_prime = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n)))));
        row.p = theory::default_probability(row.b, row.b_prime);
        row.eta = theory::stepsize_max(smoothness, row.p, row.b_prime);
        row.iters = theory::iterations_finite(smoothness, initial_gap(*problem, x0), epsilon,
                                              row.p, row.b_prime);

        PageConfig cfg;
        cfg.eta = row.eta;
        cfg.params = EstimatorParams{row.b, row.b_prime, row.p};
        cfg.iters = row.iters;
        cfg.epsilon = epsilon;
        cfg.x0 = x0;

        std::vector<double> extra(seeds.size(), 0.0);
        parallel_for_index(seeds.size(), worker_limit(), [&](std::size_t i) {
            PageConfig c = cfg;
            c.seed = seeds[i];
            RunResult r = run_page(*problem, c);
            extra[i] = static_cast<double>(r.paper_calls) - static_cast<double>(row.b);
        });
        MeanSe agg = mean_and_se(extra);
        row.mean_extra_paper_calls = agg.mean;
        row.se_extra_paper_calls = agg.se;
        row.theory_extra_paper_calls =
            theory::grad_complexity(row.b, static_cast<double>(row.iters), row.p, row.b_prime) -
            static_cast<double>(row.b);
        result.rows.push_back(row);
    }

    /* least-squares line through (ln n, ln mean extra calls) */
    bool fittable = result.rows.size() >= 2;
    for (const SweepRow& row : result.rows)
        if (!(row.mean_extra_paper_calls > 0.0)) fittable = false;
    if (fittable) {
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        double k = static_cast<double>(result.rows.size());
        for (const SweepRow& row : result.rows) {
            double x = std::log(static_cast<double>(row.n));
            double y = std::log(row.mean_extra_paper_calls);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        double denom = k * sxx - sx * sx;
        if (denom > 0.0) {
            result.slope = (k * sxy - sx * sy) / denom;
            result.intercept = (sy - *result.slope * sx) / k;
        }
    }
    return result;
}

int cmd_sweep_n(const std::vector<std::size_t>& n_values, double epsilon,
                const std::vector<std::uint64_t>& seeds, const std::string& output_dir) {
    SweepResult result = sweep_n(n_values, epsilon, seeds);
    std::filesystem::create_directories(output_dir);
    write_file(output_dir + "/sweep.csv", [&](std::ostream& out) {
        out << "n,b,b_prime,p,eta,T,mean_extra_paper_calls,se_extra_paper_calls,"
               "theory_extra_paper_calls\n";
        for (const SweepRow& row : result.rows) {
            out << row.n << ',' << row.b << ',' << row.b_prime << ',' << format_double(row.p)
                << ',' << format_double(row.eta) << ',' << row.iters << ','
                << format_double(row.mean_extra_paper_calls) << ','
                << format_double(row.se_extra_paper_calls) << ','
                << format_double(row.theory_extra_paper_calls) << '\n';
        }
    });
    write_file(output_dir + "/sweep_fit.csv", [&](std::ostream& out) {
        out << "slope,intercept\n";
        out << csv_cell(result.slope) << ',' << csv_cell(result.intercept) << '\n';
    });

    for (const SweepRow& row : result.rows)
        std::cout << "n=" << row.n << ": T=" << row.iters
                  << ", mean extra calls=" << format_double(row.mean_extra_paper_calls)
                  << " (se " << format_double(row.se_extra_paper_calls)
                  << "), theory=" << format_double(row.theory_extra_paper_calls) << "\n";
    if (result.slope)
        std::cout << "log-log slope of extra calls vs n: " << format_double(*result.slope)
                  << " (sqrt scaling predicts about 0.5)\n";
    else
        std::cout << "log-log slope: not fitted (needs two n values with positive means)\n";
    std::cout << "wrote " << output_dir << "/sweep.csv and " << output_dir << "/sweep_fit.csv\n";
    return 0;
}

int cmd_compare(const ExperimentSpec& spec) {
    if (spec.seeds.empty()) throw std::invalid_argument("compare needs at least one seed");
    if (spec.problem.streaming)
        throw std::invalid_argument(
            "compare needs a finite problem (the full-gradient baseline has no streaming "
            "analogue)");
    auto problem = build_problem(spec.problem);
    Vector x0 = starting_point(*problem, spec.problem);
    PageConfig proto = resolve_config(*problem, spec, x0);
    std::size_t n = problem->component_count();

    /* every algorithm gets the same amortized gradient budget */
    double budget_real = theory::grad_complexity(
        proto.params.b, static_cast<double>(proto.iters), proto.params.p, proto.params.b_prime);
    std::uint64_t budget = static_cast<std::uint64_t>(std::ceil(budget_real));
    auto capped_iters = [budget](std::size_t batch) {
        std::uint64_t base_cost = batch;
        if (budget <= base_cost) return std::size_t{1};
        return std::max<std::size_t>(1, static_cast<std::size_t>((budget - base_cost) / batch));
    };

    struct Arm {
        std::string algorithm;
        std::size_t iters;
        std::size_t b;
    };
    std::vector<Arm> arms = {{"page", proto.iters, proto.params.b},
                             {"sgd", capped_iters(proto.params.b), proto.params.b},
                             {"gd", capped_iters(n), n}};

    std::filesystem::create_directories(spec.output_dir);
    std::ostringstream csv;
    csv << "algorithm,T,b,budget_paper_calls,mean_paper_calls,mean_final_grad_norm,"
           "se_final_grad_norm\n";
    std::cout << "equal budget of " << budget << " amortized gradient calls, "
              << spec.seeds.size() << " seed(s)\n";
    for (const Arm& arm : arms) {
        PageConfig cfg = proto;
        cfg.iters = arm.iters;
        std::vector<double> grad_norms(spec.seeds.size(), 0.0);
        std::vector<double> calls(spec.seeds.size(), 0.0);
        parallel_for_index(spec.seeds.size(), worker_limit(), [&](std::size_t i) {
            RunResult r = run_algorithm(*problem, cfg, arm.algorithm, spec.seeds[i]);
            grad_norms[i] = norm(problem->full_gradient(r.x_hat));
            calls[i] = static_cast<double>(r.paper_calls);
        });
        MeanSe g = mean_and_se(grad_norms);
        MeanSe c = mean_and_se(calls);
        csv << arm.algorithm << ',' << arm.iters << ',' << arm.b << ',' << budget << ','
            << format_double(c.mean) << ',' << format_double(g.mean) << ','
            << format_double(g.se) << '\n';
        std::cout << arm.algorithm << ": T=" << arm.iters
                  << ", mean calls=" << format_double(c.mean)
                  << ", mean final ||grad f||=" << format_double(g.mean) << " (se "
                  << format_double(g.se) << ")\n";
    }
    write_file(spec.output_dir + "/compare.csv",
               [&](std::ostream& out) { out << csv.str(); });
    std::cout << "wrote " << spec.output_dir << "/compare.csv\n";
    return 0;
}

}  // namespace pageopt
