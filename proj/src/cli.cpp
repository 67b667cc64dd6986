#include "homsvm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "homsvm/dataset.hpp"
#include "homsvm/losses.hpp"
#include "homsvm/metrics.hpp"
#include "homsvm/oracle.hpp"
#include "homsvm/rng.hpp"
#include "homsvm/schedule.hpp"
#include "homsvm/solver.hpp"
#include "homsvm/trace_io.hpp"

namespace homsvm {

namespace {

struct DataOpts {
    std::string path;
    std::string gen = "canonical";
    std::string multipliers = "2,3,4";  // empty string selects the bare 4-point set
    std::uint64_t seed = 1;
    int rand_n = 64;
    int rand_d = 2;
    double rand_margin = 1.0;
    int scale_axis = -1;
    double scale_factor = 1.0;
};

struct PlanOpts {
    double p = 0.5;
    double r = 2.0;
    int s0 = 10;
};

std::vector<int> parse_multipliers(const std::string& text) {
    std::vector<int> out;
    if (text.empty()) return out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(item, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse multiplier '" + item + "'");
        }
        if (used != item.size())
            throw std::invalid_argument("cannot parse multiplier '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (end != item.c_str() + item.size() || item.empty())
            throw std::invalid_argument(std::string(what) + ": cannot parse '" + item + "'");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument(std::string(what) + ": empty list");
    return out;
}

std::vector<double> parse_grid(const std::string& text) {
    double lo = 0.0, hi = 0.0, step = 0.0;
    char trail = 0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &trail) != 3)
        throw std::invalid_argument("grid must look like lo:hi:step, got '" + text + "'");
    if (!(lo > 0.0)) throw std::invalid_argument("grid lower end must be > 0");
    if (!(step > 0.0)) throw std::invalid_argument("grid step must be > 0");
    if (hi < lo) throw std::invalid_argument("grid upper end must be >= lower end");
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> out;
    out.reserve(count + 1);
    for (int i = 0; i <= count; ++i) out.push_back(lo + i * step);
    return out;
}

Dataset build_dataset(const DataOpts& o) {
    Dataset data;
    if (!o.path.empty()) {
        data = read_csv(o.path);
    } else if (o.gen == "canonical") {
        data = canonical_dataset(parse_multipliers(o.multipliers));
    } else if (o.gen == "random") {
        data = random_separable(o.seed, o.rand_n, o.rand_d, o.rand_margin);
    } else {
        throw std::invalid_argument("unknown generator '" + o.gen +
                                    "' (expected canonical or random)");
    }
    if (o.scale_axis >= 0) data = scaled_dataset(data, o.scale_axis, o.scale_factor);
    return data;
}

std::string dataset_desc(const DataOpts& o) {
    std::string desc;
    if (!o.path.empty()) {
        desc = "csv:" + o.path;
    } else if (o.gen == "canonical") {
        desc = "canonical multipliers=[" + o.multipliers + "]";
    } else {
        desc = "random seed=" + std::to_string(o.seed) + " n=" + std::to_string(o.rand_n) +
               " d=" + std::to_string(o.rand_d) + " margin=" + format_g17(o.rand_margin);
    }
    if (o.scale_axis >= 0)
        desc += " scaled axis=" + std::to_string(o.scale_axis) +
                " factor=" + format_g17(o.scale_factor);
    return desc;
}

std::string join_args(const std::vector<std::string>& args) {
    std::string s;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i > 0) s += ' ';
        s += args[i];
    }
    return s;
}

std::string join_g17(std::span<const double> v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ',';
        s += format_g17(v[i]);
    }
    return s;
}

ExecPolicy parse_exec(const std::string& text) {
    if (text == "serial") return ExecPolicy::serial;
    if (text == "parallel") return ExecPolicy::parallel;
    throw std::invalid_argument("unknown exec policy '" + text +
                                "' (expected serial or parallel)");
}

bool any_nonzero(std::span<const double> v) {
    for (double x : v)
        if (x != 0.0) return true;
    return false;
}

// Hard-margin reference solution when the oracle applies and is wanted.
// Failures are reported as a note, not an error: traces without reference
// columns are still useful.
std::optional<std::vector<double>> reference_wstar(const Dataset& data, bool no_oracle,
                                                   const std::string& wstar_flag,
                                                   std::ostream& err) {
    if (!wstar_flag.empty()) {
        std::vector<double> w = parse_doubles(wstar_flag, "--wstar");
        if (static_cast<int>(w.size()) != data.d)
            throw std::invalid_argument("--wstar needs exactly " + std::to_string(data.d) +
                                        " components");
        if (!any_nonzero(w)) throw std::invalid_argument("--wstar must be nonzero");
        return w;
    }
    if (no_oracle) return std::nullopt;
    if (data.n > kHardMarginMaxN || data.d > kOracleMaxDim) {
        err << "note: dataset exceeds the oracle caps, reference columns left empty\n";
        return std::nullopt;
    }
    try {
        return exact_hard_margin(data).w;
    } catch (const std::exception& e) {
        err << "note: hard-margin oracle failed (" << e.what()
            << "), reference columns left empty\n";
        return std::nullopt;
    }
}

int cmd_gen(const std::vector<std::string>& args, const DataOpts& dopt,
            const std::string& out_path, std::ostream& out) {
    (void)args;
    const Dataset data = build_dataset(dopt);
    write_csv(data, out_path);
    out << "gen: wrote " << data.n << " points (d = " << data.d << ") to " << out_path
        << "\n";
    return 0;
}

struct RunOpts {
    PlanOpts plan;
    int stages = 0;
    long long budget = 0;
    bool stages_given = false;
    bool budget_given = false;
    std::string update_rule = "averaged";
    std::string step_mode = "plain";
    std::string active_rule = "inclusive";
    std::string exec = "parallel";
    bool with_bias = false;
    std::string wstar;
    bool no_oracle = false;
    double lambda_prime = 0.0;
    bool lambda_prime_given = false;
    bool estimate_lp = false;
    std::string out_path;
};

UpdateRule parse_update_rule(const std::string& s) {
    if (s == "averaged") return UpdateRule::averaged;
    if (s == "best") return UpdateRule::best_iterate;
    throw std::invalid_argument("unknown update rule '" + s + "' (expected averaged or best)");
}

StepMode parse_step_mode(const std::string& s) {
    if (s == "plain") return StepMode::plain;
    if (s == "normalized") return StepMode::normalized;
    throw std::invalid_argument("unknown step mode '" + s + "' (expected plain or normalized)");
}

ActiveRule parse_active_rule(const std::string& s) {
    if (s == "inclusive") return ActiveRule::inclusive;
    if (s == "strict") return ActiveRule::strict;
    throw std::invalid_argument("unknown active rule '" + s +
                                "' (expected inclusive or strict)");
}

int cmd_run(const std::vector<std::string>& args, const DataOpts& dopt, const RunOpts& ropt,
            std::ostream& out, std::ostream& err) {
    if (ropt.stages_given && ropt.budget_given)
        throw std::invalid_argument("pass either --stages or --budget, not both");
    const Dataset data = build_dataset(dopt);
    const LossContext ctx = make_loss_context(data, parse_exec(ropt.exec));
    const SchedulePlan plan = make_plan(ropt.plan.p, ropt.plan.r, ropt.plan.s0);

    SolverConfig config;
    config.plan = plan;
    if (ropt.stages_given)
        config.stages = ropt.stages;
    else
        config.budget = ropt.budget_given ? ropt.budget : 100000;
    config.update_rule = parse_update_rule(ropt.update_rule);
    config.step_mode = parse_step_mode(ropt.step_mode);
    config.active_rule = parse_active_rule(ropt.active_rule);
    config.with_bias = ropt.with_bias;

    const SolveTrace trace = homotopic_solve(ctx, config);
    const std::optional<std::vector<double>> wstar =
        reference_wstar(data, ropt.no_oracle, ropt.wstar, err);
    std::optional<double> lambda_prime;
    if (ropt.lambda_prime_given)
        lambda_prime = ropt.lambda_prime;
    else if (ropt.estimate_lp)
        lambda_prime = estimate_lambda_prime(data, 1e-6);

    TraceWriter tw;
    tw.comment("format", "homsvm-trace-1");
    tw.comment("command", join_args(args));
    tw.comment("dataset", dataset_desc(dopt));
    tw.comment("n", std::to_string(data.n));
    tw.comment("d", std::to_string(data.d));
    tw.comment("p", format_g17(plan.p));
    tw.comment("r", format_g17(plan.r));
    tw.comment("s0", std::to_string(plan.s0));
    tw.comment("epsilon0", format_g17(plan.epsilon0));
    tw.comment("alpha", format_g17(plan.alpha));
    tw.comment("big_c", format_g17(plan.big_c));
    tw.comment("stages", std::to_string(static_cast<int>(trace.checkpoints.size())));
    if (!ropt.stages_given)
        tw.comment("budget", std::to_string(config.budget));
    tw.comment("updates", std::to_string(trace.checkpoints.back().k));
    tw.comment("update_rule", ropt.update_rule);
    tw.comment("step_mode", ropt.step_mode);
    tw.comment("active_rule", ropt.active_rule);
    tw.comment("exec", ropt.exec);
    tw.comment("lipschitz_l", format_g17(ctx.lipschitz_L));
    if (lambda_prime) tw.comment("lambda_prime", format_g17(*lambda_prime));
    if (wstar) tw.comment("w_star", join_g17(*wstar));

    std::vector<std::string> cols = {"stage", "k",    "lambda",   "eta",       "t",
                                     "loss",  "l2_error", "angle_gap", "margin_gap"};
    if (ropt.with_bias) cols.push_back("bias");
    tw.columns(cols);
    for (const Checkpoint& cp : trace.checkpoints) {
        std::vector<std::string> cells;
        cells.push_back(std::to_string(cp.stage));
        cells.push_back(std::to_string(cp.k));
        cells.push_back(format_g17(cp.lambda));
        cells.push_back(format_g17(cp.eta));
        cells.push_back(std::to_string(cp.t));
        cells.push_back(format_g17(cp.loss));
        if (wstar) {
            cells.push_back(format_g17(l2_error(cp.iterate, *wstar)));
            const bool nz = any_nonzero(cp.iterate);
            cells.push_back(nz ? format_g17(angle_gap(cp.iterate, *wstar)) : "");
            cells.push_back(nz ? format_g17(margin_gap(data, cp.iterate, *wstar)) : "");
        } else {
            cells.push_back("");
            cells.push_back("");
            cells.push_back("");
        }
        if (ropt.with_bias) cells.push_back(format_g17(cp.bias.value()));
        tw.row(cells);
    }
    tw.save(ropt.out_path);
    out << "run: " << trace.checkpoints.size() << " stages, "
        << trace.checkpoints.back().k << " updates, trace written to " << ropt.out_path
        << "\n";
    return 0;
}

struct BaselineOpts {
    long long iterations = 100000;
    std::string checkpoints;
    std::string exec = "parallel";
    std::string wstar;
    bool no_oracle = false;
    std::string out_path;
};

std::vector<long long> baseline_checkpoints(const BaselineOpts& bopt) {
    std::vector<long long> ks;
    if (!bopt.checkpoints.empty()) {
        std::stringstream ss(bopt.checkpoints);
        std::string item;
        while (std::getline(ss, item, ',')) {
            std::size_t used = 0;
            long long v = 0;
            try {
                v = std::stoll(item, &used);
            } catch (const std::exception&) {
                throw std::invalid_argument("cannot parse checkpoint '" + item + "'");
            }
            if (used != item.size())
                throw std::invalid_argument("cannot parse checkpoint '" + item + "'");
            ks.push_back(v);
        }
        return ks;
    }
    for (long long k = 1; k < bopt.iterations; k *= 2) ks.push_back(k);
    ks.push_back(bopt.iterations);
    return ks;
}

int cmd_baseline(const std::vector<std::string>& args, const DataOpts& dopt,
                 const BaselineOpts& bopt, std::ostream& out, std::ostream& err) {
    const Dataset data = build_dataset(dopt);
    const LossContext ctx = make_loss_context(data, parse_exec(bopt.exec));
    const std::vector<long long> ks = baseline_checkpoints(bopt);
    const SolveTrace trace = logistic_gd(ctx, bopt.iterations, ks);
    const std::optional<std::vector<double>> wstar =
        reference_wstar(data, bopt.no_oracle, bopt.wstar, err);
    const double sigma = sigma_max(ctx);

    TraceWriter tw;
    tw.comment("format", "homsvm-trace-1");
    tw.comment("command", join_args(args));
    tw.comment("dataset", dataset_desc(dopt));
    tw.comment("n", std::to_string(data.n));
    tw.comment("d", std::to_string(data.d));
    tw.comment("iterations", std::to_string(bopt.iterations));
    tw.comment("sigma_max", format_g17(sigma));
    tw.comment("eta", format_g17(1.0 / sigma));
    tw.comment("exec", bopt.exec);
    tw.comment("lipschitz_l", format_g17(ctx.lipschitz_L));
    if (wstar) tw.comment("w_star", join_g17(*wstar));

    // Same trace shape as `run`; lambda = 0 marks the unregularized baseline.
    tw.columns({"stage", "k", "lambda", "eta", "t", "loss", "l2_error", "angle_gap",
                "margin_gap"});
    for (const Checkpoint& cp : trace.checkpoints) {
        std::vector<std::string> cells;
        cells.push_back(std::to_string(cp.stage));
        cells.push_back(std::to_string(cp.k));
        cells.push_back(format_g17(cp.lambda));
        cells.push_back(format_g17(cp.eta));
        cells.push_back(std::to_string(cp.t));
        cells.push_back(format_g17(cp.loss));
        if (wstar) {
            cells.push_back(format_g17(l2_error(cp.iterate, *wstar)));
            const bool nz = any_nonzero(cp.iterate);
            cells.push_back(nz ? format_g17(angle_gap(cp.iterate, *wstar)) : "");
            cells.push_back(nz ? format_g17(margin_gap(data, cp.iterate, *wstar)) : "");
        } else {
            cells.push_back("");
            cells.push_back("");
            cells.push_back("");
        }
        tw.row(cells);
    }
    tw.save(bopt.out_path);
    out << "baseline: " << trace.checkpoints.size() << " checkpoints, trace written to "
        << bopt.out_path << "\n";
    return 0;
}

int cmd_compare(const std::vector<std::string>& args, const DataOpts& dopt,
                const RunOpts& ropt, std::ostream& out, std::ostream& err) {
    if (ropt.stages_given && ropt.budget_given)
        throw std::invalid_argument("pass either --stages or --budget, not both");
    const Dataset data = build_dataset(dopt);
    const LossContext ctx = make_loss_context(data, parse_exec(ropt.exec));
    const SchedulePlan plan = make_plan(ropt.plan.p, ropt.plan.r, ropt.plan.s0);
    const std::optional<std::vector<double>> wstar =
        reference_wstar(data, ropt.no_oracle, ropt.wstar, err);
    if (!wstar)
        throw std::invalid_argument(
            "compare needs a reference solution: pass --wstar or keep the oracle enabled");

    SolverConfig config;
    config.plan = plan;
    if (ropt.stages_given)
        config.stages = ropt.stages;
    else
        config.budget = ropt.budget_given ? ropt.budget : 100000;
    config.update_rule = parse_update_rule(ropt.update_rule);
    config.step_mode = parse_step_mode(ropt.step_mode);
    config.active_rule = parse_active_rule(ropt.active_rule);

    const SolveTrace hom = homotopic_solve(ctx, config);
    std::vector<long long> ks;
    for (const Checkpoint& cp : hom.checkpoints) ks.push_back(cp.k);
    const SolveTrace log = logistic_gd(ctx, ks.back(), ks);
    const double sigma = sigma_max(ctx);

    TraceWriter tw;
    tw.comment("format", "homsvm-trace-1");
    tw.comment("command", join_args(args));
    tw.comment("dataset", dataset_desc(dopt));
    tw.comment("n", std::to_string(data.n));
    tw.comment("d", std::to_string(data.d));
    tw.comment("p", format_g17(plan.p));
    tw.comment("r", format_g17(plan.r));
    tw.comment("s0", std::to_string(plan.s0));
    tw.comment("stages", std::to_string(static_cast<int>(hom.checkpoints.size())));
    tw.comment("updates", std::to_string(ks.back()));
    tw.comment("update_rule", ropt.update_rule);
    tw.comment("exec", ropt.exec);
    tw.comment("sigma_max", format_g17(sigma));
    tw.comment("logistic_eta", format_g17(1.0 / sigma));
    tw.comment("lipschitz_l", format_g17(ctx.lipschitz_L));
    tw.comment("w_star", join_g17(*wstar));

    tw.columns({"k", "homotopic_angle_gap", "homotopic_margin_gap", "logistic_angle_gap",
                "logistic_margin_gap"});
    for (std::size_t i = 0; i < hom.checkpoints.size(); ++i) {
        const std::vector<double>& hw = hom.checkpoints[i].iterate;
        const std::vector<double>& lw = log.checkpoints[i].iterate;
        std::vector<std::string> cells;
        cells.push_back(std::to_string(ks[i]));
        const bool hz = any_nonzero(hw);
        const bool lz = any_nonzero(lw);
        cells.push_back(hz ? format_g17(angle_gap(hw, *wstar)) : "");
        cells.push_back(hz ? format_g17(margin_gap(data, hw, *wstar)) : "");
        cells.push_back(lz ? format_g17(angle_gap(lw, *wstar)) : "");
        cells.push_back(lz ? format_g17(margin_gap(data, lw, *wstar)) : "");
        tw.row(cells);
    }
    tw.save(ropt.out_path);
    out << "compare: " << hom.checkpoints.size() << " matched checkpoints, trace written to "
        << ropt.out_path << "\n";
    return 0;
}

struct VerifyOpts {
    PlanOpts plan;
    long long budget = 20000;
    std::string grid = "0.05:4.0:0.05";
    int trials = 1000;
    std::uint64_t seed = 1234;
    std::string wstar;
    std::string exec = "parallel";
};

class CheckReporter {
  public:
    explicit CheckReporter(std::ostream& out) : out_(out) {}

    void report(const std::string& name, bool ok, const std::string& detail) {
        ++total_;
        if (ok) {
            out_ << "PASS " << name;
            if (!detail.empty()) out_ << " (" << detail << ")";
        } else {
            out_ << "FAIL " << name << ": " << detail;
            ++failures_;
        }
        out_ << "\n";
    }

    int failures() const { return failures_; }
    int total() const { return total_; }

  private:
    std::ostream& out_;
    int total_ = 0;
    int failures_ = 0;
};

int cmd_verify(const DataOpts& dopt, const VerifyOpts& vopt, std::ostream& out) {
    const Dataset data = build_dataset(dopt);
    if (data.n > kRegularizedMaxN || data.d > kOracleMaxDim)
        throw std::invalid_argument("verify needs the exact oracle, so n <= 16 and d <= 6");
    const LossContext ctx = make_loss_context(data, parse_exec(vopt.exec));
    const double big_l = ctx.lipschitz_L;
    const double max_norm = max_point_norm(data);
    const SchedulePlan plan = make_plan(vopt.plan.p, vopt.plan.r, vopt.plan.s0);
    CheckReporter rep(out);
    KernelScratch scratch;

    // Hard-margin solution with its KKT certificate.
    const OracleSolution hard = exact_hard_margin(data);
    {
        const double feas = min_margin(data, hard.w, ctx.policy, scratch);
        double worst_dual = 0.0;
        for (double b : hard.duals) worst_dual = std::min(worst_dual, b);
        const double wn = l2_error(hard.w, std::vector<double>(data.d, 0.0));
        const bool ok = feas >= 1.0 - 1e-10 && worst_dual >= -1e-12 &&
                        hard.residual <= 1e-9 * (1.0 + wn);
        rep.report("hard-margin-kkt", ok,
                   "min margin " + format_g17(feas) + ", residual " +
                       format_g17(hard.residual));
    }

    if (!vopt.wstar.empty()) {
        const std::vector<double> flag = parse_doubles(vopt.wstar, "--wstar");
        if (static_cast<int>(flag.size()) != data.d)
            throw std::invalid_argument("--wstar needs exactly " + std::to_string(data.d) +
                                        " components");
        const double diff = l2_error(flag, hard.w);
        rep.report("wstar-agreement", diff <= 1e-6,
                   "|supplied - oracle| = " + format_g17(diff));
    }

    // Regularization cutoff: below the estimate the minimizer is exactly w*.
    const RegularizedOracle oracle(data);
    const double lambda_hat = estimate_lambda_prime(data, 1e-6);
    out << "# lambda_hat = " << format_g17(lambda_hat) << "\n";
    {
        const OracleSolution below = oracle.solve(0.99 * lambda_hat);
        const double diff = l2_error(below.w, hard.w);
        rep.report("lambda-prime", diff <= 1e-9,
                   "lambda_hat " + format_g17(lambda_hat) + ", |w(0.99 lambda_hat) - w*| = " +
                       format_g17(diff));
    }

    // Exact minimizers along the grid.
    const std::vector<double> grid = parse_grid(vopt.grid);
    std::vector<OracleSolution> sols;
    sols.reserve(grid.size());
    for (double lam : grid) sols.push_back(oracle.solve(lam));
    {
        double worst = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double wn = 0.0;
            for (double x : sols[i].w) wn += x * x;
            wn = std::sqrt(wn);
            if (sols[i].residual > 1e-9 * (1.0 + wn)) ok = false;
            for (double b : sols[i].duals)
                if (b < -1e-12 || b > 1.0 + 1e-12) ok = false;
            worst = std::max(worst, sols[i].residual / (1.0 + wn));
        }
        rep.report("oracle-certificates", ok, "worst residual ratio " + format_g17(worst));
    }
    {
        bool ok = true;
        double worst = -1e300;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double wn = 0.0;
            for (double x : sols[i].w) wn += x * x;
            wn = std::sqrt(wn);
            const double bound = ctx.mean_norm / grid[i];
            if (wn > bound * (1.0 + 1e-12)) ok = false;
            worst = std::max(worst, wn - bound);
        }
        rep.report("norm-tail", ok, "worst |w| - bound = " + format_g17(worst));
    }
    {
        bool ok = true;
        double worst = -1e300;
        for (std::size_t i = 0; i < grid.size() && ok; ++i)
            for (std::size_t j = i + 1; j < grid.size(); ++j) {
                const double dist = l2_error(sols[i].w, sols[j].w);
                const double bound =
                    0.5 * big_l * std::abs(1.0 / grid[i] - 1.0 / grid[j]) + 1e-9;
                worst = std::max(worst, dist - bound);
                if (dist > bound) {
                    ok = false;
                    break;
                }
            }
        rep.report("minimizer-path-lipschitz", ok,
                   "worst distance - bound = " + format_g17(worst));
    }
    {
        bool ok = true;
        double worst = -1e300;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double dist = l2_error(sols[i].w, hard.w);
            const double bound =
                big_l * grid[i] / (2.0 * lambda_hat * lambda_hat) * (1.0 + 1e-9) + 1e-9;
            worst = std::max(worst, dist - bound);
            if (dist > bound) ok = false;
        }
        rep.report("minimizer-path-to-limit", ok,
                   "worst distance - bound = " + format_g17(worst));
    }
    {
        bool ok = true;
        double prev = -1e300;
        double worst = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double f = regularized_loss(ctx, sols[i].w, grid[i], scratch);
            if (f < prev - 1e-12) {
                ok = false;
                worst = prev - f;
            }
            prev = f;
        }
        rep.report("objective-envelope", ok,
                   ok ? "nondecreasing over " + std::to_string(grid.size()) + " points"
                      : "drop of " + format_g17(worst));
    }

    // One staged run, checked stage by stage.
    SolverConfig config;
    config.plan = plan;
    config.budget = vopt.budget;
    const SolveTrace trace = homotopic_solve(ctx, config);
    out << "# stages = " << trace.checkpoints.size() << ", updates = "
        << trace.checkpoints.back().k << "\n";
    {
        bool ok = true;
        double worst = -1e300;
        for (const Checkpoint& cp : trace.checkpoints) {
            const double bound = iterate_norm_bound(ctx, cp.lambda);
            worst = std::max(worst, cp.max_iterate_norm - bound);
            if (cp.max_iterate_norm > bound * (1.0 + 1e-12)) ok = false;
        }
        rep.report("iterate-norm-bound", ok, "worst |w| - bound = " + format_g17(worst));
    }
    {
        bool ok = true;
        double worst = -1e300;
        for (const Checkpoint& cp : trace.checkpoints) {
            const OracleSolution sol = oracle.solve(cp.lambda);
            const double err2 = [&] {
                double s = 0.0;
                for (int c = 0; c < data.d; ++c) {
                    const double diff = cp.iterate[c] - sol.w[c];
                    s += diff * diff;
                }
                return s;
            }();
            const double radius = stage_radius(plan, cp.stage, big_l);
            const double bound = 2.0 * radius * big_l /
                                 (cp.lambda * std::sqrt(static_cast<double>(cp.t))) *
                                 (1.0 + 1e-9);
            worst = std::max(worst, err2 - bound);
            if (err2 > bound) ok = false;
        }
        rep.report("stage-progress", ok, "worst error^2 - bound = " + format_g17(worst));
    }
    {
        const BoundContext bctx = make_bound_context(big_l, lambda_hat, plan);
        bool ok = true;
        double worst = -1e300;
        for (const Checkpoint& cp : trace.checkpoints) {
            const double errv = l2_error(cp.iterate, hard.w);
            const double bound = convergence_bound(bctx, cp.k);
            worst = std::max(worst, errv - bound);
            if (errv > bound) ok = false;
        }
        rep.report("bound-dominance", ok, "worst error - bound = " + format_g17(worst));
    }

    // Metric identities on random vectors.
    Rng rng(vopt.seed);
    const auto random_vec = [&](double scale) {
        std::vector<double> w(data.d);
        double nw = 0.0;
        do {
            nw = 0.0;
            for (int c = 0; c < data.d; ++c) {
                w[c] = scale * rng.gaussian();
                nw += w[c] * w[c];
            }
        } while (nw < 1e-24);
        return w;
    };
    {
        bool ok = true;
        double worst = 0.0;
        double wsn = 0.0;
        for (double x : hard.w) wsn += x * x;
        wsn = std::sqrt(wsn);
        for (int t = 0; t < vopt.trials; ++t) {
            const std::vector<double> w = random_vec(1.0);
            double wn = 0.0;
            for (double x : w) wn += x * x;
            wn = std::sqrt(wn);
            const double ag = angle_gap(w, hard.w);
            std::vector<double> whn(data.d), wsh(data.d);
            for (int c = 0; c < data.d; ++c) {
                whn[c] = w[c] / wn;
                wsh[c] = hard.w[c] / wsn;
            }
            const double unit_dist = l2_error(whn, wsh);
            const double id_err = std::abs(unit_dist * unit_dist - 2.0 * ag);
            const double angle_bound =
                l2_error(w, hard.w) * l2_error(w, hard.w) / (2.0 * wn * wsn);
            const double mg = margin_gap(data, w, hard.w);
            const double margin_bound = max_norm * std::sqrt(std::max(0.0, 2.0 * ag));
            worst = std::max({worst, id_err, ag - angle_bound - 1e-12,
                              mg - margin_bound - 1e-12, -mg - 1e-12});
            if (id_err > 1e-12 || ag > angle_bound + 1e-12 || mg > margin_bound + 1e-12 ||
                mg < -1e-12)
                ok = false;
        }
        rep.report("gap-identities", ok,
                   std::to_string(vopt.trials) + " trials, worst slack " + format_g17(worst));
    }
    {
        bool ok = true;
        double worst = -1e300;
        const double bias_star = estimate_bias(ctx, hard.w);
        for (int t = 0; t < std::min(vopt.trials, 200); ++t) {
            std::vector<double> w = hard.w;
            const std::vector<double> noise = random_vec(0.1);
            for (int c = 0; c < data.d; ++c) w[c] += noise[c];
            const double lhs = std::abs(estimate_bias(ctx, w) - bias_star);
            const double rhs = max_norm * l2_error(w, hard.w) * (1.0 + 1e-12) + 1e-15;
            worst = std::max(worst, lhs - rhs);
            if (lhs > rhs) ok = false;
        }
        rep.report("bias-lipschitz", ok, "worst |db| - bound = " + format_g17(worst));
    }
    {
        bool ok = true;
        double worst = 0.0;
        const double h = 1e-5;
        for (int t = 0; t < 20; ++t) {
            std::vector<double> w = random_vec(1.0);
            const std::vector<double> g = logistic_gradient(ctx, w);
            for (int c = 0; c < data.d; ++c) {
                std::vector<double> wp = w, wm = w;
                wp[c] += h;
                wm[c] -= h;
                const double fd = (logistic_loss(ctx, wp) - logistic_loss(ctx, wm)) / (2.0 * h);
                worst = std::max(worst, std::abs(fd - g[c]));
            }
        }
        if (worst > 1e-6) ok = false;
        rep.report("logistic-gradient-fd", ok, "max |fd - grad| = " + format_g17(worst));
    }

    out << rep.total() - rep.failures() << "/" << rep.total() << " checks passed\n";
    return rep.failures() > 0 ? 1 : 0;
}

void add_data_opts(CLI::App* cmd, DataOpts& o) {
    auto* data = cmd->add_option("--data", o.path, "read the dataset from a CSV file");
    auto* gen = cmd->add_option("--gen", o.gen, "dataset generator: canonical or random");
    data->excludes(gen);
    cmd->add_option("--multipliers", o.multipliers,
                    "filler multipliers for the canonical set; empty for the 4-point set");
    cmd->add_option("--seed", o.seed, "seed for the random generator");
    cmd->add_option("--rand-n", o.rand_n, "point count for the random generator");
    cmd->add_option("--rand-d", o.rand_d, "dimension for the random generator");
    cmd->add_option("--rand-margin", o.rand_margin, "target margin for the random generator");
    cmd->add_option("--scale-axis", o.scale_axis, "axis to rescale after generation");
    cmd->add_option("--scale-factor", o.scale_factor, "factor for --scale-axis");
}

void add_plan_opts(CLI::App* cmd, PlanOpts& o) {
    cmd->add_option("--p", o.p, "lambda decay exponent, 0 < p < 1");
    cmd->add_option("--r", o.r, "stage length exponent, r > 2p");
    cmd->add_option("--s0", o.s0, "stage offset, integer > 2");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"homotopic subgradient descent for the hard-margin SVM"};
    app.require_subcommand(1);

    DataOpts gen_data;
    std::string gen_out;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a dataset CSV");
    add_data_opts(gen_cmd, gen_data);
    gen_cmd->add_option("--out", gen_out, "output CSV path")->required();

    DataOpts run_data;
    RunOpts run_opts;
    CLI::App* run_cmd = app.add_subcommand("run", "run the staged solver and write a trace");
    add_data_opts(run_cmd, run_data);
    add_plan_opts(run_cmd, run_opts.plan);
    CLI::Option* run_stages = run_cmd->add_option("--stages", run_opts.stages, "stage count");
    CLI::Option* run_budget =
        run_cmd->add_option("--budget", run_opts.budget, "total update budget (default 100000)");
    run_cmd->add_option("--update-rule", run_opts.update_rule, "averaged or best");
    run_cmd->add_option("--step-mode", run_opts.step_mode, "plain or normalized");
    run_cmd->add_option("--active-rule", run_opts.active_rule, "inclusive or strict");
    run_cmd->add_flag("--bias", run_opts.with_bias, "append the recovered intercept column");
    run_cmd->add_option("--exec", run_opts.exec, "serial or parallel");
    run_cmd->add_option("--wstar", run_opts.wstar, "reference solution, comma separated");
    run_cmd->add_flag("--no-oracle", run_opts.no_oracle, "skip the exact reference solution");
    CLI::Option* run_lp = run_cmd->add_option("--lambda-prime", run_opts.lambda_prime,
                                              "regularization cutoff to record in the header");
    run_cmd->add_flag("--estimate-lambda-prime", run_opts.estimate_lp,
                      "estimate the cutoff with the oracle and record it");
    run_cmd->add_option("--out", run_opts.out_path, "output trace path")->required();

    DataOpts base_data;
    BaselineOpts base_opts;
    CLI::App* base_cmd =
        app.add_subcommand("baseline", "run logistic gradient descent and write a trace");
    add_data_opts(base_cmd, base_data);
    base_cmd->add_option("--iterations", base_opts.iterations, "gradient steps");
    base_cmd->add_option("--checkpoints", base_opts.checkpoints,
                         "comma separated iteration counts (default: powers of two)");
    base_cmd->add_option("--exec", base_opts.exec, "serial or parallel");
    base_cmd->add_option("--wstar", base_opts.wstar, "reference solution, comma separated");
    base_cmd->add_flag("--no-oracle", base_opts.no_oracle, "skip the exact reference solution");
    base_cmd->add_option("--out", base_opts.out_path, "output trace path")->required();

    DataOpts cmp_data;
    RunOpts cmp_opts;
    CLI::App* cmp_cmd = app.add_subcommand(
        "compare", "staged solver vs logistic baseline at matched update counts");
    add_data_opts(cmp_cmd, cmp_data);
    add_plan_opts(cmp_cmd, cmp_opts.plan);
    CLI::Option* cmp_stages = cmp_cmd->add_option("--stages", cmp_opts.stages, "stage count");
    CLI::Option* cmp_budget =
        cmp_cmd->add_option("--budget", cmp_opts.budget, "total update budget (default 100000)");
    cmp_cmd->add_option("--update-rule", cmp_opts.update_rule, "averaged or best");
    cmp_cmd->add_option("--step-mode", cmp_opts.step_mode, "plain or normalized");
    cmp_cmd->add_option("--active-rule", cmp_opts.active_rule, "inclusive or strict");
    cmp_cmd->add_option("--exec", cmp_opts.exec, "serial or parallel");
    cmp_cmd->add_option("--wstar", cmp_opts.wstar, "reference solution, comma separated");
    cmp_cmd->add_flag("--no-oracle", cmp_opts.no_oracle, "skip the exact reference solution");
    cmp_cmd->add_option("--out", cmp_opts.out_path, "output trace path")->required();

    DataOpts ver_data;
    VerifyOpts ver_opts;
    CLI::App* ver_cmd =
        app.add_subcommand("verify", "check the analytic invariants against the exact oracle");
    add_data_opts(ver_cmd, ver_data);
    add_plan_opts(ver_cmd, ver_opts.plan);
    ver_cmd->add_option("--budget", ver_opts.budget, "update budget for the staged run");
    ver_cmd->add_option("--grid", ver_opts.grid, "lambda grid as lo:hi:step");
    ver_cmd->add_option("--trials", ver_opts.trials, "random trials for the metric identities");
    ver_cmd->add_option("--check-seed", ver_opts.seed, "seed for the random trials");
    ver_cmd->add_option("--wstar", ver_opts.wstar,
                        "independently known solution to compare with the oracle");
    ver_cmd->add_option("--exec", ver_opts.exec, "serial or parallel");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("homsvm");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (app.got_subcommand(gen_cmd)) return cmd_gen(args, gen_data, gen_out, out);
        if (app.got_subcommand(run_cmd)) {
            run_opts.stages_given = run_stages->count() > 0;
            run_opts.budget_given = run_budget->count() > 0;
            run_opts.lambda_prime_given = run_lp->count() > 0;
            return cmd_run(args, run_data, run_opts, out, err);
        }
        if (app.got_subcommand(base_cmd))
            return cmd_baseline(args, base_data, base_opts, out, err);
        if (app.got_subcommand(cmp_cmd)) {
            cmp_opts.stages_given = cmp_stages->count() > 0;
            cmp_opts.budget_given = cmp_budget->count() > 0;
            return cmd_compare(args, cmp_data, cmp_opts, out, err);
        }
        if (app.got_subcommand(ver_cmd)) return cmd_verify(ver_data, ver_opts, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand selected\n";
    return 2;
}

}  // namespace homsvm
