#include "curvlab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "curvlab/bargmann_fock.hpp"
#include "curvlab/bergman.hpp"
#include "curvlab/curvature.hpp"
#include "curvlab/curve_sampler.hpp"
#include "curvlab/parallel.hpp"
#include "curvlab/projective.hpp"

namespace curvlab {

namespace {

using FlagList = std::vector<std::pair<std::string, std::string>>;

std::map<std::string, FlagList> const& flag_table()
{
    static std::map<std::string, FlagList> const table{
        {"phi", {{"r", "1"}, {"R", "inf"}, {"n", "1000000"}}},
        {"expected-kappa",
         {{"d", "6"},
          {"r", "1"},
          {"R", "4"},
          {"method", "curves"},
          {"curves", "200"},
          {"lines", "500"},
          {"n", "1000000"}}},
        {"curvature-hist",
         {{"d", "6"}, {"curves", "20"}, {"lines", "500"}, {"edges", ""}}},
        {"gauss-bonnet", {{"d", "3"}, {"lines", "200000"}, {"dump", ""}}},
        {"inflections", {{"d", "3"}, {"trials", "1"}, {"tol", "1e-6"}}},
        {"tail-bound",
         {{"d", "8"},
          {"r", "1"},
          {"R", "4"},
          {"eta", "0.8"},
          {"curves", "200"},
          {"lines", "200"}}},
        {"bf-event",
         {{"n", "2000"},
          {"band-lo", "-4"},
          {"band-hi", "-0.125"},
          {"threshold", "0.5"},
          {"tol", "1e-6"},
          {"grid", "24"}}},
        {"lemma-f0",
         {{"grid", "400"},
          {"band-lo", "-2.000001"},
          {"band-hi", "-0.249999"},
          {"dump", ""}}},
        {"bergman", {{"degrees", "64,128,256,512"}, {"pairs", "1000"}, {"k", "0"}}},
    };
    return table;
}

std::optional<double> parse_real(std::string const& s)
{
    if (s == "inf" || s == "+inf")
        return kInf;
    if (s == "-inf")
        return -kInf;
    try
    {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size())
            return std::nullopt;
        return v;
    }
    catch (std::exception const&)
    {
        return std::nullopt;
    }
}

std::vector<std::string> split(std::string const& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        if (!item.empty())
            out.push_back(item);
    return out;
}

//! Typed view of the flag map that records violations instead of throwing.
class Params
{
  public:
    Params(ExperimentConfig const& cfg, std::vector<std::string>* errors)
        : cfg_(cfg), errors_(errors)
    {
        for (auto const& [k, v] : command_flags(cfg.command))
            values_[k] = v;
        for (auto const& [k, v] : cfg.params)
            values_[k] = v;
    }

    std::map<std::string, std::string> const& values() const { return values_; }

    std::string str(std::string const& name) const { return values_.at(name); }

    double real(std::string const& name) const
    {
        auto v = parse_real(str(name));
        if (!v || std::isnan(*v))
        {
            fail("--" + name + " must be a number");
            return 0;
        }
        return *v;
    }

    //! Integer in [lo, hi]; accepts forms like 1e6.
    std::int64_t integer(std::string const& name, std::int64_t lo,
                         std::int64_t hi = std::int64_t{1} << 52) const
    {
        auto v = parse_real(str(name));
        if (!v || !std::isfinite(*v) || std::floor(*v) != *v)
        {
            fail("--" + name + " must be an integer");
            return lo;
        }
        if (*v < static_cast<double>(lo) || *v > static_cast<double>(hi))
        {
            fail("--" + name + " must be in [" + std::to_string(lo) + ", "
                 + std::to_string(hi) + "]");
            return lo;
        }
        return static_cast<std::int64_t>(*v);
    }

    std::vector<double> reals(std::string const& name) const
    {
        std::vector<double> out;
        for (auto const& item : split(str(name), ','))
        {
            auto v = parse_real(item);
            if (!v || std::isnan(*v))
            {
                fail("--" + name + " must be a comma-separated list of numbers");
                return {};
            }
            out.push_back(*v);
        }
        return out;
    }

    void fail(std::string msg) const
    {
        if (errors_)
            errors_->push_back(std::move(msg));
    }

    bool has_poly() const { return !cfg_.poly.empty(); }

  private:
    ExperimentConfig const& cfg_;
    std::vector<std::string>* errors_;
    std::map<std::string, std::string> values_;
};

void check_band_params(Params const& p)
{
    double r = p.real("r");
    double big_r = p.real("R");
    if (!(r > 0))
        p.fail("--r must be > 0");
    if (!(r < big_r))
        p.fail("r must be < R");
}

void check_command(ExperimentConfig const& cfg, Params const& p)
{
    auto const& c = cfg.command;
    if (c == "phi")
    {
        check_band_params(p);
        p.integer("n", 1);
    }
    else if (c == "expected-kappa")
    {
        check_band_params(p);
        p.integer("d", 2, 100000);
        auto m = p.str("method");
        if (m != "curves" && m != "jet")
            p.fail("--method must be curves or jet");
        p.integer("curves", 1);
        p.integer("lines", 1);
        p.integer("n", 1);
    }
    else if (c == "curvature-hist")
    {
        p.integer("d", 1, 100000);
        p.integer("curves", 1);
        p.integer("lines", 1);
        auto e = p.reals("edges");
        for (std::size_t i = 0; i < e.size(); ++i)
        {
            if (!(e[i] < kTwoPi) || !std::isfinite(e[i]))
                p.fail("--edges must be finite and below 2 pi");
            if (i > 0 && !(e[i - 1] < e[i]))
                p.fail("--edges must be strictly increasing");
        }
    }
    else if (c == "gauss-bonnet")
    {
        if (!p.has_poly())
            p.integer("d", 1, 100000);
        p.integer("lines", 1);
    }
    else if (c == "inflections")
    {
        if (!p.has_poly())
            p.integer("d", 2, 6);
        p.integer("trials", 1, 1000000);
        if (!(p.real("tol") > 0))
            p.fail("--tol must be > 0");
    }
    else if (c == "tail-bound")
    {
        check_band_params(p);
        p.integer("d", 2, 100000);
        double eta = p.real("eta");
        if (!(eta > 0 && eta < 1))
            p.fail("--eta must be in (0, 1)");
        p.integer("curves", 1);
        p.integer("lines", 1);
    }
    else if (c == "bf-event")
    {
        p.integer("n", 1);
        if (!(p.real("band-lo") < p.real("band-hi")))
            p.fail("band-lo must be < band-hi");
        if (!(p.real("threshold") >= 0))
            p.fail("--threshold must be >= 0");
        double tol = p.real("tol");
        if (!(tol > 0 && tol < 1))
            p.fail("--tol must be in (0, 1)");
        p.integer("grid", 4, 4096);
    }
    else if (c == "lemma-f0")
    {
        p.integer("grid", 4, 100000);
        if (!(p.real("band-lo") < p.real("band-hi")))
            p.fail("band-lo must be < band-hi");
    }
    else if (c == "bergman")
    {
        auto degrees = p.reals("degrees");
        if (degrees.size() < 3)
            p.fail("--degrees needs at least 3 values");
        for (std::size_t i = 0; i < degrees.size(); ++i)
        {
            if (!(degrees[i] >= 1) || std::floor(degrees[i]) != degrees[i])
                p.fail("--degrees must be positive integers");
            if (i > 0 && !(degrees[i - 1] < degrees[i]))
                p.fail("--degrees must be strictly increasing");
        }
        p.integer("pairs", 1);
        p.integer("k", 0, 2);
    }
}

std::string fmt(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

//! JSON numbers cannot hold infinities; spell those as strings.
nlohmann::json jnum(double x)
{
    if (std::isfinite(x))
        return x;
    return fmt(x);
}

nlohmann::json audit_json(CurvatureAudit const& a)
{
    return {{"evaluations", a.evaluations},
            {"violations", a.violations},
            {"max_k", jnum(a.max_k)}};
}

void set_estimate(nlohmann::json& rec, Estimate const& e)
{
    rec["mean"] = jnum(e.mean);
    rec["stderr"] = jnum(e.std_err);
    rec["n"] = e.n;
}

void write_text(std::string const& path, std::string const& text)
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot open " + path);
    os << text;
}

struct Context
{
    ExperimentConfig const& cfg;
    Params const& p;
    RngStream root;
    Exec exec;
    nlohmann::json& rec;
    nlohmann::json& extra;
    std::optional<std::string>& csv;
};

HomPoly3 input_poly(Context const& ctx, int degree)
{
    if (!ctx.cfg.poly.empty())
        return read_poly(ctx.cfg.poly);
    return sample_kostlan(degree, derive_stream(ctx.root, "poly", 0));
}

void cmd_phi(Context& ctx)
{
    PhiParams params{ctx.p.real("r"), ctx.p.real("R")};
    auto n = static_cast<std::uint64_t>(ctx.p.integer("n", 1));
    auto est = phi_mc(params, n, ctx.root, ctx.exec);
    set_estimate(ctx.rec, est);
    ctx.rec["n_discarded"] = 0;
    ctx.extra["phi_closed"] = phi_closed(params);
}

void cmd_expected_kappa(Context& ctx)
{
    int d = static_cast<int>(ctx.p.integer("d", 2));
    PhiParams params{ctx.p.real("r"), ctx.p.real("R")};
    auto band = fs_band(params.r, params.big_r, d);
    ctx.extra["band"] = {jnum(band.lo), jnum(band.hi)};
    ctx.extra["phi_closed"] = phi_closed(params);
    if (ctx.p.str("method") == "jet")
    {
        auto n = static_cast<std::uint64_t>(ctx.p.integer("n", 1));
        auto res = expected_kappa_jet(d, band, n, ctx.root, ctx.exec);
        set_estimate(ctx.rec, res.est);
        ctx.rec["n_discarded"] = res.n_discarded;
        ctx.extra["audit"] = audit_json(res.audit);
        return;
    }
    auto res = expected_kappa_curves(
        d, band, static_cast<std::uint64_t>(ctx.p.integer("curves", 1)),
        static_cast<std::uint64_t>(ctx.p.integer("lines", 1)), ctx.root,
        ctx.exec);
    set_estimate(ctx.rec, res.est);
    ctx.rec["n_discarded"] = res.n_discarded;
    ctx.extra["audit"] = audit_json(res.audit);
}

std::vector<double> histogram_edges(int d, std::vector<double> interior)
{
    if (interior.empty())
    {
        for (double e : {kTwoPi - 4.0 * d, kTwoPi - d, 0.0})
            if (e < kTwoPi)
                interior.push_back(e);
        std::sort(interior.begin(), interior.end());
        interior.erase(std::unique(interior.begin(), interior.end()),
                       interior.end());
    }
    std::vector<double> edges{-kInf};
    edges.insert(edges.end(), interior.begin(), interior.end());
    edges.push_back(kTwoPi);
    return edges;
}

void cmd_histogram(Context& ctx)
{
    int d = static_cast<int>(ctx.p.integer("d", 1));
    auto edges = histogram_edges(d, ctx.p.reals("edges"));
    auto rows = curvature_histogram(
        d, static_cast<std::uint64_t>(ctx.p.integer("curves", 1)),
        static_cast<std::uint64_t>(ctx.p.integer("lines", 1)), edges, ctx.root,
        ctx.exec);
    std::ostringstream os;
    os << "bin_lo,bin_hi,mass,count\n";
    double total = 0;
    std::uint64_t count = 0;
    nlohmann::json jrows = nlohmann::json::array();
    for (auto const& r : rows)
    {
        os << fmt(r.lo) << ',' << fmt(r.hi) << ',' << fmt(r.mass) << ','
           << r.count << '\n';
        jrows.push_back({{"bin_lo", jnum(r.lo)},
                         {"bin_hi", jnum(r.hi)},
                         {"mass", r.mass},
                         {"count", r.count}});
        total += r.mass;
        count += r.count;
    }
    ctx.rec["mean"] = total;
    ctx.rec["stderr"] = 0.0;
    ctx.rec["n"] = count;
    ctx.rec["n_discarded"] = 0;
    ctx.extra["rows"] = std::move(jrows);
    ctx.csv = os.str();
}

std::string sample_dump(std::vector<CurvatureSample> const& samples)
{
    std::ostringstream os;
    os << "re_x0,im_x0,re_x1,im_x1,re_x2,im_x2,K,discarded\n";
    for (auto const& s : samples)
    {
        for (auto const& x : s.point.rep)
            os << fmt(x.real()) << ',' << fmt(x.imag()) << ',';
        os << fmt(s.k) << ',' << (s.discarded ? 1 : 0) << '\n';
    }
    return os.str();
}

void cmd_gauss_bonnet(Context& ctx)
{
    int d = ctx.p.has_poly() ? 0 : static_cast<int>(ctx.p.integer("d", 1));
    auto poly = input_poly(ctx, d);
    auto lines = static_cast<std::uint64_t>(ctx.p.integer("lines", 1));
    auto line_stream = derive_stream(ctx.root, "lines", 0);
    auto res = gauss_bonnet_check(poly, lines, line_stream, ctx.exec);
    set_estimate(ctx.rec, res.total);
    ctx.rec["n_discarded"] = res.n_discarded;
    ctx.extra["degree"] = poly.degree();
    ctx.extra["target"] = res.target;
    ctx.extra["error"] = res.error;
    ctx.extra["audit"] = audit_json(res.audit);
    if (auto dump = ctx.p.str("dump"); !dump.empty())
        write_text(dump, sample_dump(sample_curve_points(poly, lines,
                                                         line_stream, ctx.exec)));
}

void cmd_inflections(Context& ctx)
{
    int trials = static_cast<int>(ctx.p.integer("trials", 1));
    double tol = ctx.p.real("tol");
    nlohmann::json counts = nlohmann::json::array();
    double sum = 0, sum2 = 0;
    int degree = 0;
    for (int t = 0; t < trials; ++t)
    {
        HomPoly3 poly =
            ctx.p.has_poly()
                ? read_poly(ctx.cfg.poly)
                : sample_kostlan(static_cast<int>(ctx.p.integer("d", 2)),
                                 derive_stream(ctx.root, "poly", t));
        degree = poly.degree();
        int c = inflection_count(poly, tol, derive_stream(ctx.root, "chart", t));
        counts.push_back(c);
        sum += c;
        sum2 += double(c) * c;
    }
    double mean = sum / trials;
    double var = trials > 1 ? (sum2 - trials * mean * mean) / (trials - 1) : 0;
    ctx.rec["mean"] = mean;
    ctx.rec["stderr"] = std::sqrt(std::max(var, 0.0) / trials);
    ctx.rec["n"] = trials;
    ctx.rec["n_discarded"] = 0;
    ctx.extra["counts"] = std::move(counts);
    ctx.extra["expected"] = 3 * degree * (degree - 2);
}

void cmd_tail_bound(Context& ctx)
{
    PhiParams params{ctx.p.real("r"), ctx.p.real("R")};
    auto res = tail_bound_check(
        static_cast<int>(ctx.p.integer("d", 2)), params,
        static_cast<std::uint64_t>(ctx.p.integer("curves", 1)),
        static_cast<std::uint64_t>(ctx.p.integer("lines", 1)),
        ctx.p.real("eta"), ctx.root, ctx.exec);
    set_estimate(ctx.rec, res.empirical_prob);
    ctx.rec["n_discarded"] = res.n_discarded;
    ctx.extra["markov_bound"] = res.markov_bound;
    ctx.extra["mean_kappa"] = res.mean_kappa.mean;
    ctx.extra["mean_kappa_stderr"] = res.mean_kappa.std_err;
}

void cmd_bf_event(Context& ctx)
{
    EventConfig ev;
    ev.band = {ctx.p.real("band-lo"), ctx.p.real("band-hi")};
    ev.threshold = ctx.p.real("threshold");
    ev.tol = ctx.p.real("tol");
    ev.grid = BranchGrid::from_n(static_cast<int>(ctx.p.integer("grid", 4)));
    auto est = prop1_event_probability(
        static_cast<std::uint64_t>(ctx.p.integer("n", 1)), ev, ctx.root,
        ctx.exec);
    set_estimate(ctx.rec, est);
    ctx.rec["n_discarded"] = 0;
}

void cmd_lemma_f0(Context& ctx)
{
    CurvatureBand band{ctx.p.real("band-lo"), ctx.p.real("band-hi")};
    auto grid = BranchGrid::from_n(static_cast<int>(ctx.p.integer("grid", 4)));
    auto cloud = bf_zero_samples(Poly2::f0(), BallRegion{1.0}, grid);
    double total = 0, in_band = 0, k_min = kInf, k_max = -kInf;
    for (auto const& s : cloud.samples)
    {
        total += s.weight;
        if (band.contains(s.k))
            in_band += s.weight;
        k_min = std::min(k_min, s.k);
        k_max = std::max(k_max, s.k);
    }
    ctx.rec["mean"] = total > 0 ? in_band / total : 0.0;
    ctx.rec["stderr"] = 0.0;
    ctx.rec["n"] = cloud.samples.size();
    ctx.rec["n_discarded"] = cloud.n_branch_failures;
    ctx.extra["area"] = total;
    ctx.extra["area_target"] = std::numbers::pi * std::sqrt(3.0);
    ctx.extra["k_min"] = jnum(k_min);
    ctx.extra["k_sup"] = jnum(k_max);
    if (auto dump = ctx.p.str("dump"); !dump.empty())
    {
        std::ostringstream os;
        os << "re_z,im_z,re_w,im_w,K,weight\n";
        for (auto const& s : cloud.samples)
            os << fmt(s.z.real()) << ',' << fmt(s.z.imag()) << ','
               << fmt(s.w.real()) << ',' << fmt(s.w.imag()) << ',' << fmt(s.k)
               << ',' << fmt(s.weight) << '\n';
        write_text(dump, os.str());
    }
}

void cmd_bergman(Context& ctx)
{
    std::vector<int> degrees;
    for (double d : ctx.p.reals("degrees"))
        degrees.push_back(static_cast<int>(d));
    int k = static_cast<int>(ctx.p.integer("k", 0, 2));
    auto n_pairs = static_cast<std::size_t>(ctx.p.integer("pairs", 1));
    auto pairs = ball_pairs(n_pairs, ctx.root);
    auto comps = kernel_convergence(degrees, pairs, k);
    auto fit = rate_fit(comps);
    std::ostringstream os;
    os << "d,sup_err,k\n";
    nlohmann::json rows = nlohmann::json::array();
    for (auto const& c : comps)
    {
        os << c.degree << ',' << fmt(c.sup_err) << ',' << c.order << '\n';
        rows.push_back({{"d", c.degree}, {"sup_err", c.sup_err}, {"k", c.order}});
    }
    ctx.rec["mean"] = fit.slope;
    ctx.rec["stderr"] = 0.0;
    ctx.rec["n"] = n_pairs;
    ctx.rec["n_discarded"] = 0;
    ctx.extra["rows"] = std::move(rows);
    ctx.extra["intercept"] = fit.intercept;
    ctx.extra["fit_residual"] = fit.residual;
    ctx.extra["scale_constant"] = kernel_scale_constant();
    ctx.csv = os.str();
}

std::string scalar_csv(nlohmann::json const& rec)
{
    std::ostringstream os;
    os << "command,mean,stderr,n,n_discarded,seed\n"
       << rec["command"].get<std::string>() << ',' << rec["mean"].dump() << ','
       << rec["stderr"].dump() << ',' << rec["n"].dump() << ','
       << rec["n_discarded"].dump() << ',' << rec["seed"].dump() << '\n';
    return os.str();
}

std::string command_summary(std::string const& name)
{
    static std::map<std::string, std::string> const text{
        {"phi", "Monte Carlo and closed-form phi_{r,R}"},
        {"expected-kappa", "E[kappa] in the band [2pi - Rd, 2pi - rd]"},
        {"curvature-hist", "pooled curvature histogram (csv table)"},
        {"gauss-bonnet", "Crofton estimate of the total curvature"},
        {"inflections", "inflection counts of random curves"},
        {"tail-bound", "P[kappa > eta] against the Markov bound"},
        {"bf-event", "Bargmann-Fock band-area event frequency"},
        {"lemma-f0", "area and curvature range of zw - 1/4"},
        {"bergman", "normalized kernel convergence rate"},
    };
    auto it = text.find(name);
    return it == text.end() ? std::string{} : it->second;
}

}  // namespace

std::vector<std::string> const& command_names()
{
    static std::vector<std::string> const names{
        "phi",         "expected-kappa", "curvature-hist",
        "gauss-bonnet", "inflections",   "tail-bound",
        "bf-event",    "lemma-f0",       "bergman"};
    return names;
}

FlagList const& command_flags(std::string const& command)
{
    static FlagList const empty;
    auto const& table = flag_table();
    auto it = table.find(command);
    return it == table.end() ? empty : it->second;
}

std::vector<std::string> validate(ExperimentConfig const& cfg)
{
    std::vector<std::string> errors;
    if (!flag_table().count(cfg.command))
    {
        errors.push_back("unknown command '" + cfg.command + "'");
        return errors;
    }
    if (cfg.threads < 0)
        errors.push_back("--threads must be >= 0");
    if (cfg.format != "json" && cfg.format != "csv")
        errors.push_back("--format must be json or csv");
    auto const& flags = command_flags(cfg.command);
    for (auto const& [k, v] : cfg.params)
    {
        bool known = std::any_of(flags.begin(), flags.end(),
                                 [&](auto const& f) { return f.first == k; });
        if (!known)
            errors.push_back("unknown flag --" + k + " for " + cfg.command);
    }
    if (!errors.empty())
        return errors;
    Params p(cfg, &errors);
    check_command(cfg, p);
    return errors;
}

RunResult run(ExperimentConfig const& cfg)
{
    RunResult out;
    auto& rec = out.record;
    rec["command"] = cfg.command;
    rec["seed"] = cfg.seed;
    rec["threads"] = cfg.threads;
    rec["artifact_version"] = CURVLAB_VERSION;
    if (!cfg.poly.empty())
        rec["poly"] = cfg.poly;

    auto errors = validate(cfg);
    if (!errors.empty())
    {
        rec["error"] = errors;
        out.exit_code = kExitValidation;
        return out;
    }
    Params p(cfg, nullptr);
    rec["params"] = p.values();

    Exec exec = cfg.threads == 1 ? Exec::serial : Exec::parallel;
    if (cfg.threads > 0)
        set_num_threads(cfg.threads);

    nlohmann::json extra = nlohmann::json::object();
    Context ctx{cfg, p, RngStream(cfg.seed), exec, rec, extra, out.csv};
    using Handler = void (*)(Context&);
    static std::map<std::string, Handler> const handlers{
        {"phi", cmd_phi},
        {"expected-kappa", cmd_expected_kappa},
        {"curvature-hist", cmd_histogram},
        {"gauss-bonnet", cmd_gauss_bonnet},
        {"inflections", cmd_inflections},
        {"tail-bound", cmd_tail_bound},
        {"bf-event", cmd_bf_event},
        {"lemma-f0", cmd_lemma_f0},
        {"bergman", cmd_bergman},
    };

    auto start = std::chrono::steady_clock::now();
    try
    {
        handlers.at(cfg.command)(ctx);
    }
    catch (MalformedInput const& e)
    {
        rec["error"] = std::vector<std::string>{e.what()};
        out.exit_code = kExitValidation;
    }
    catch (std::invalid_argument const& e)
    {
        rec["error"] = std::vector<std::string>{e.what()};
        out.exit_code = kExitValidation;
    }
    catch (NumericalError const& e)
    {
        rec["error"] = std::vector<std::string>{e.what()};
        out.exit_code = kExitNumerical;
    }
    rec["elapsed_ms"] = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    if (!extra.empty())
        rec["extra"] = std::move(extra);
    return out;
}

int cli_main(int argc, char** argv)
{
    CLI::App app{"Curvature statistics of random complex plane curves"};
    app.set_version_flag("--version", std::string(CURVLAB_VERSION));
    ExperimentConfig cfg;
    app.add_option("--seed", cfg.seed, "root seed")->capture_default_str();
    app.add_option("--threads", cfg.threads, "worker threads (0 = all)")
        ->capture_default_str();
    app.add_option("--format", cfg.format, "json or csv")->capture_default_str();
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--poly", cfg.poly, "polynomial JSON input");
    app.require_subcommand(1);

    std::map<std::string, std::map<std::string, std::string>> given;
    for (auto const& name : command_names())
    {
        auto* sub = app.add_subcommand(name, command_summary(name));
        sub->fallthrough();
        for (auto const& [flag, def] : command_flags(name))
        {
            auto* opt = sub->add_option("--" + flag, given[name][flag]);
            if (!def.empty())
                opt->description("default " + def);
        }
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::Success const& e)
    {
        return app.exit(e);
    }
    catch (CLI::ParseError const& e)
    {
        app.exit(e);
        return kExitValidation;
    }

    for (auto* sub : app.get_subcommands())
    {
        cfg.command = sub->get_name();
        for (auto const& [flag, def] : command_flags(cfg.command))
            if (sub->count("--" + flag) > 0)
                cfg.params[flag] = given[cfg.command][flag];
    }

    auto result = run(cfg);
    if (result.exit_code == kExitValidation && result.record.contains("error"))
        for (auto const& msg : result.record["error"])
            std::cerr << "error: " << msg.get<std::string>() << '\n';
    else if (result.record.contains("error"))
        std::cerr << "numerical abort: "
                  << result.record["error"][0].get<std::string>() << '\n';

    std::string text;
    if (cfg.format == "csv")
        text = result.csv ? *result.csv
               : result.exit_code == kExitOk ? scalar_csv(result.record)
                                             : std::string();
    else
        text = result.record.dump(2) + "\n";

    try
    {
        if (cfg.out.empty())
            std::cout << text;
        else
            write_text(cfg.out, text);
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return result.exit_code;
}

}  // namespace curvlab
