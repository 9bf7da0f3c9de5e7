#include "filterlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "filterlab/ergodicity.hpp"
#include "filterlab/filter.hpp"
#include "filterlab/model_io.hpp"
#include "filterlab/models.hpp"
#include "filterlab/parallel.hpp"
#include "filterlab/rng.hpp"
#include "filterlab/rwrs.hpp"
#include "filterlab/scenery.hpp"
#include "filterlab/stats.hpp"
#include "filterlab/table.hpp"

namespace filterlab::cli {

namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// What a subcommand produced besides its table.
struct Outcome {
    std::string table;
    std::optional<std::string> fingerprint;
};

const std::set<std::string> kBuiltinModels = {"xor", "noisy-xor", "pair-chain", "rwrs"};
/// Options that do not change the results and stay out of the canonical command.
const std::set<std::string> kPlumbingOptions = {"help", "out", "manifest", "threads", "config"};

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(text);
    while (std::getline(is, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<std::size_t> parse_indices(const std::string& text, const std::string& flag)
{
    std::vector<std::size_t> out;
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item[0] == '-')
            throw UsageError(flag + " expects nonnegative integers separated by commas, got '" +
                             item + "'");
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) throw UsageError(flag + " is empty");
    return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& flag)
{
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        try {
            out.push_back(parse_real(item));
        } catch (const std::invalid_argument&) {
            throw UsageError(flag + " expects reals separated by commas, got '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(flag + " is empty");
    return out;
}

std::vector<std::size_t> horizons_or(const RunConfig& c, std::vector<std::size_t> fallback)
{
    return c.horizons.empty() ? fallback : parse_indices(c.horizons, "--horizons");
}

void require_increasing(const std::vector<std::size_t>& hs)
{
    for (std::size_t i = 1; i < hs.size(); ++i)
        if (hs[i] <= hs[i - 1]) throw UsageError("--horizons must be strictly increasing");
}

bool is_xor(const RunConfig& c) { return c.model == "xor" || c.model == "noisy-xor"; }

HmmModel resolve_model(const RunConfig& c)
{
    if (c.model == "xor") return build_xor_model(false);
    if (c.model == "noisy-xor") {
        if (!(c.eps > 0.0)) throw UsageError("--eps must be positive for noisy-xor");
        return build_xor_model(true, c.eps);
    }
    if (c.model == "pair-chain") return build_pair_chain(3);
    if (c.model == "rwrs")
        throw UsageError("model rwrs has no finite state space; use it with simulate, "
                         "tail-probe or scenery-extract");
    try {
        return load_model_file(c.model);
    } catch (const std::ios_base::failure&) {
        throw DataError("cannot open model file '" + c.model +
                        "' (--model takes xor, noisy-xor, pair-chain, rwrs or a model file)");
    }
}

void require_rwrs(const RunConfig& c)
{
    if (c.model != "rwrs")
        throw UsageError(c.subcommand + " works on the random walk in random scenery; use --model rwrs");
}

/// mu | uniform | truth | point:<i> | w_0,w_1,...
ProbabilityVector resolve_prior(const std::string& spec, const HmmModel& m,
                                std::optional<std::size_t> true_x0)
{
    const std::size_t n = m.states();
    if (spec == "mu") return m.stationary;
    if (spec == "uniform") return ProbabilityVector::uniform(n);
    if (spec == "truth") {
        if (!true_x0)
            throw UsageError("prior 'truth' needs a simulated trajectory, not an observation file");
        return ProbabilityVector::point_mass(n, *true_x0);
    }
    if (spec.rfind("point:", 0) == 0) {
        const auto idx = parse_indices(spec.substr(6), "point prior");
        if (idx.size() != 1 || idx[0] >= n)
            throw UsageError("prior '" + spec + "' must name one state in [0, " +
                             std::to_string(n - 1) + "]");
        return ProbabilityVector::point_mass(n, idx[0]);
    }
    const auto w = parse_reals(spec, "prior");
    if (w.size() != n)
        throw UsageError("prior has " + std::to_string(w.size()) + " weights, model has " +
                         std::to_string(n) + " states");
    try {
        return ProbabilityVector::from_weights(w);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("prior: ") + e.what());
    }
}

std::vector<double> resolve_f(const RunConfig& c, const HmmModel& m)
{
    if (c.f.empty()) {
        if (is_xor(c)) return xor_current_bit_zero();
        throw UsageError("--f (one value per state) is required for model '" + c.model + "'");
    }
    auto f = parse_reals(c.f, "--f");
    if (f.size() != m.states())
        throw UsageError("--f has " + std::to_string(f.size()) + " values, model has " +
                         std::to_string(m.states()) + " states");
    return f;
}

std::ifstream open_input(const std::string& path, const std::string& what)
{
    std::ifstream is(path);
    if (!is) throw DataError("cannot open " + what + " '" + path + "'");
    return is;
}

/// Accepts the table written by `simulate` (header "k ...") or one
/// observation per line.
std::vector<Observation> read_observation_input(const std::string& path, const HmmModel& m)
{
    auto is = open_input(path, "observation file");
    std::vector<Observation> ys;
    std::string line;
    std::size_t lineno = 0;
    bool table = false;
    while (std::getline(is, line)) {
        ++lineno;
        const auto f = split_fields(line);
        if (f.empty() || f[0][0] == '#') continue;
        if (f[0] == "k") {
            table = true;
            continue;
        }
        try {
            if (!table) {
                ys.push_back(parse_observation(line, m.is_discrete()));
            } else {
                if (f.size() < 4) throw std::invalid_argument("expected k state label observation");
                if (f[3] == "-") continue;
                std::string joined = f[3];
                for (std::size_t i = 4; i < f.size(); ++i) joined += " " + f[i];
                ys.push_back(parse_observation(joined, m.is_discrete()));
            }
            likelihood_weights(m, ys.back());
        } catch (const std::invalid_argument& e) {
            throw DataError(path + " line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return ys;
}

struct ObservationSource {
    std::vector<Observation> ys;
    std::optional<std::size_t> true_x0;
};

ObservationSource observations_for(const RunConfig& c, const HmmModel& m)
{
    if (!c.input.empty()) return {read_observation_input(c.input, m), std::nullopt};
    auto traj = simulate(m, c.n, c.seed);
    return {std::move(traj.observations), traj.states.front()};
}

SymbolMap read_symbol_input(const std::string& path)
{
    auto is = open_input(path, "symbol map");
    try {
        return read_symbol_map(is);
    } catch (const std::invalid_argument& e) {
        throw DataError(path + ": " + e.what());
    }
}

std::string median_of(std::vector<double> v)
{
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<long>(mid)));
    return format_real(m);
}

// ---- subcommands ----------------------------------------------------------

Outcome cmd_simulate(const RunConfig& c)
{
    std::ostringstream os;
    if (c.model == "rwrs") {
        write_rwrs_window(os, generate_rwrs(c.J, c.n, c.seed));
        return {os.str(), std::nullopt};
    }
    const auto m = resolve_model(c);
    const auto traj = simulate(m, c.n, c.seed);
    os << "k\tstate\tlabel\tobservation\n";
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const std::size_t s = traj.states[k];
        os << k << '\t' << s << '\t' << m.labels[s] << '\t'
           << (k == 0 ? std::string("-") : format_observation(traj.observations[k - 1])) << '\n';
    }
    return {os.str(), model_fingerprint(m)};
}

Outcome cmd_filter_run(const RunConfig& c)
{
    const auto m = resolve_model(c);
    const auto src = observations_for(c, m);
    const auto path = run_filter(m, resolve_prior(c.prior, m, src.true_x0), src.ys);
    std::ostringstream os;
    write_filter_path(os, path, m.labels);
    return {os.str(), model_fingerprint(m)};
}

Outcome cmd_smooth(const RunConfig& c)
{
    const auto m = resolve_model(c);
    const auto src = observations_for(c, m);
    const auto prior = resolve_prior(c.prior, m, src.true_x0);
    FilterPath laws;
    for (std::size_t k = 0; k <= src.ys.size(); ++k)
        laws.steps.push_back(smoother(m, prior, std::span(src.ys).first(k)));
    std::ostringstream os;
    write_filter_path(os, laws, m.labels);
    return {os.str(), model_fingerprint(m)};
}

Outcome cmd_gap(const RunConfig& c)
{
    const auto m = resolve_model(c);
    ConvexStatistic stat{resolve_f(c, m), ConvexFunction::square()};
    try {
        stat.kappa = ConvexFunction::parse(c.kappa);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--kappa: ") + e.what());
    }
    const auto hs = horizons_or(c, {c.n});
    for (auto h : hs)
        if (h == 0) throw UsageError("gap horizons must be at least 1");
    const auto est = kunita_gap_curve(m, stat, hs, c.replicates, c.seed, c.threads);
    std::ostringstream os;
    os << "horizon\tlower\tlower_halfwidth\tupper\tupper_halfwidth\tgap\tgap_halfwidth\treplicates\tseed\n";
    for (const auto& e : est)
        os << e.horizon << '\t' << format_real(e.lower) << '\t' << format_real(e.lower_halfwidth)
           << '\t' << format_real(e.upper) << '\t' << format_real(e.upper_halfwidth) << '\t'
           << format_real(e.gap()) << '\t' << format_real(e.gap_halfwidth()) << '\t'
           << e.replicates << '\t' << c.seed << '\n';
    return {os.str(), model_fingerprint(m)};
}

/// Replicate r uses seed derive_stream(seed, r); priors named "truth" refer
/// to that replicate's X_0.
Outcome cmd_stability(const RunConfig& c)
{
    const auto m = resolve_model(c);
    const auto hs = horizons_or(c, [&] {
        std::vector<std::size_t> all(c.n + 1);
        for (std::size_t k = 0; k <= c.n; ++k) all[k] = k;
        return all;
    }());
    require_increasing(hs);
    if (hs.back() > c.n) throw UsageError("--horizons must not exceed --n");
    for (const auto& p : {c.prior, c.prior2}) resolve_prior(p, m, 0);  // reject bad specs early

    std::vector<std::vector<double>> values(hs.size(), std::vector<double>(c.replicates));
    parallel_for(c.replicates, c.threads, [&](std::size_t r) {
        const auto seed = derive_stream(c.seed, r);
        const std::size_t x0 = simulate(m, 0, seed).states.front();
        const auto curve = filter_stability(m, resolve_prior(c.prior, m, x0),
                                            resolve_prior(c.prior2, m, x0), c.n, seed);
        for (std::size_t i = 0; i < hs.size(); ++i) values[i][r] = curve.values[hs[i]];
    });

    std::ostringstream os;
    os << "horizon\tmedian\tmean\tmean_halfwidth\treplicates\tseed\n";
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const auto e = estimate_mean(values[i]);
        os << hs[i] << '\t' << median_of(values[i]) << '\t' << format_real(e.mean) << '\t'
           << format_real(e.halfwidth) << '\t' << c.replicates << '\t' << c.seed << '\n';
    }
    return {os.str(), model_fingerprint(m)};
}

Outcome cmd_mixing(const RunConfig& c)
{
    const auto m = resolve_model(c);
    const auto hs = horizons_or(c, {0, 1, 2, 5, 10, 20, 50, 100});
    require_increasing(hs);
    const auto curve = absolute_regularity(m, hs);
    std::ostringstream os;
    os << "horizon\tvalue\thalfwidth\treplicates\tseed\n";
    for (std::size_t i = 0; i < hs.size(); ++i)
        os << hs[i] << '\t' << format_real(curve.values[i]) << '\t'
           << format_real(curve.halfwidths[i]) << "\t0\t" << c.seed << '\n';
    return {os.str(), model_fingerprint(m)};
}

Outcome cmd_tail_probe(const RunConfig& c)
{
    require_rwrs(c);
    const auto hs = horizons_or(c, {10, 100, 1000});
    require_increasing(hs);
    ZCylinder cyl;
    try {
        cyl = ZCylinder::parse(c.cylinder);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("--cylinder: ") + e.what());
    }
    const auto res =
        tail_triviality_probe(c.J, hs, cyl, c.replicates, c.seed, c.threads, c.min_atom_count);
    std::ostringstream os;
    os << "horizon\tdeviation\thalfwidth\tunconditional\tunconditional_halfwidth\treplicates\tseed\n";
    for (std::size_t i = 0; i < hs.size(); ++i)
        os << hs[i] << '\t' << format_real(res.deviation.values[i]) << '\t'
           << format_real(res.deviation.halfwidths[i]) << '\t' << format_real(res.unconditional[i])
           << '\t' << format_real(res.unconditional_halfwidth[i]) << '\t' << c.replicates << '\t'
           << c.seed << '\n';
    return {os.str(), std::nullopt};
}

Outcome cmd_scenery_extract(const RunConfig& c)
{
    require_rwrs(c);
    std::vector<ZTriple> window;
    if (!c.input.empty()) {
        auto is = open_input(c.input, "window file");
        try {
            window = read_rwrs_triples(is);
        } catch (const std::invalid_argument& e) {
            throw DataError(c.input + ": " + e.what());
        }
        if (window.empty()) throw DataError(c.input + ": no window entries");
    } else {
        window = generate_rwrs(c.J, c.n, c.seed).z;
    }

    std::ostringstream os;
    if (c.stopping_times >= 0) {
        std::vector<int> steps(window.size());
        std::transform(window.begin(), window.end(), steps.begin(),
                       [](const ZTriple& z) { return z.step; });
        os << "j\ttau\n";
        write_stopping_times(os, steps, -c.stopping_times, c.stopping_times);
        return {os.str(), std::nullopt};
    }

    auto scenery = extract_scenery(window).scenery;
    if (c.delta > 0.0) {
        std::vector<int> symbols;
        for (const auto& [j, v] : scenery) symbols.push_back(v);
        const auto noisy = apply_channel(symbols, c.delta, derive_stream(c.seed, 1));
        std::size_t i = 0;
        for (auto& [j, v] : scenery) v = noisy[i++];
    }
    os << "j\txi\tincrement\n";
    for (const auto& [j, v] : scenery) {
        const auto prev = scenery.find(j - 1);
        os << j << '\t' << v << '\t';
        if (prev == scenery.end())
            os << "NA";
        else
            os << ((v - prev->second) % 3 + 3) % 3;
        os << '\n';
    }
    return {os.str(), std::nullopt};
}

Outcome cmd_align(const RunConfig& c)
{
    if (c.input.empty() || c.input2.empty())
        throw UsageError("align needs --input (sequence A) and --input2 (sequence B)");
    const auto res = align(read_symbol_input(c.input), read_symbol_input(c.input2), c.min_overlap);
    std::ostringstream os;
    os << "a\tb\toverlap\n" << res.a << '\t' << res.b << '\t' << res.overlap_length << '\n';
    return {os.str(), std::nullopt};
}

Outcome cmd_channel_calibrate(const RunConfig& c)
{
    const auto eps = parse_reals(c.eps_list, "--eps");
    for (double e : eps)
        if (!(e > 0.0)) throw UsageError("--eps values must be positive");
    std::vector<ChannelErrorEstimate> est(eps.size());
    parallel_for(eps.size(), c.threads, [&](std::size_t i) {
        est[i] = channel_error_from_epsilon(eps[i], c.replicates, derive_stream(c.seed, i));
    });
    std::ostringstream os;
    os << "eps\tdelta\thalfwidth\treplicates\tseed\n";
    for (std::size_t i = 0; i < eps.size(); ++i)
        os << format_real(eps[i]) << '\t' << format_real(est[i].delta) << '\t'
           << format_real(est[i].halfwidth) << '\t' << est[i].replicates << '\t' << c.seed << '\n';
    return {os.str(), std::nullopt};
}

// ---- plumbing -------------------------------------------------------------

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream os(path, std::ios::binary);
    os << text;
    if (!os) throw DataError("cannot write '" + path + "'");
}

/// Every result-affecting option of the subcommand with its effective value.
std::vector<std::pair<std::string, std::string>> effective_options(const CLI::App& sub)
{
    std::vector<std::pair<std::string, std::string>> out;
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (kPlumbingOptions.count(name)) continue;
        std::string value;
        if (opt->count() > 0) {
            for (const auto& r : opt->results()) value += (value.empty() ? "" : ",") + r;
        } else {
            value = opt->get_default_str();
        }
        if (!value.empty()) out.emplace_back(name, value);
    }
    return out;
}

Json make_manifest(const RunConfig& c, const CLI::App& sub, const Outcome& outcome)
{
    Json j;
    j["tool"] = "filterlab";
    j["version"] = kToolVersion;
    j["subcommand"] = c.subcommand;
    Json params = Json::object();
    Json command = Json::array({c.subcommand});
    for (const auto& [name, value] : effective_options(sub)) {
        params[name] = value;
        command.push_back("--" + name);
        command.push_back(value);
    }
    j["parameters"] = params;
    j["seed"] = c.seed;
    j["model_fingerprint"] = outcome.fingerprint ? Json(*outcome.fingerprint) : Json(nullptr);
    j["threads"] = c.threads;
    j["output"] = c.out.empty() ? Json(nullptr) : Json(c.out);
    j["command"] = command;
    return j;
}

int rerun(const std::string& manifest_path, const std::string& out_path, std::ostream& out,
          std::ostream& err)
{
    auto is = open_input(manifest_path, "manifest");
    Json j;
    try {
        j = Json::parse(is);
    } catch (const Json::exception& e) {
        throw DataError(manifest_path + ": not a manifest (" + e.what() + ")");
    }
    if (!j.contains("command") || !j["command"].is_array() || j["command"].empty())
        throw DataError(manifest_path + ": manifest has no command");
    std::vector<std::string> args;
    for (const auto& a : j["command"]) {
        if (!a.is_string()) throw DataError(manifest_path + ": command entries must be strings");
        args.push_back(a.get<std::string>());
    }
    if (args.front() == "rerun") throw DataError(manifest_path + ": manifest refers to rerun");

    const auto params = j.value("parameters", Json::object());
    const auto model = params.value("model", std::string());
    if (!model.empty() && !kBuiltinModels.count(model) && j["model_fingerprint"].is_string()) {
        HmmModel m;
        try {
            m = load_model_file(model);
        } catch (const std::ios_base::failure&) {
            throw DataError("cannot open model file '" + model + "' named in the manifest");
        }
        if (model_fingerprint(m) != j["model_fingerprint"].get<std::string>())
            throw DataError("model file '" + model + "' changed since the recorded run (fingerprint " +
                            model_fingerprint(m) + ", manifest has " +
                            j["model_fingerprint"].get<std::string>() + ")");
    }
    if (!out_path.empty()) {
        args.push_back("--out");
        args.push_back(out_path);
    }
    return run(args, out, err);
}

const std::map<std::string, Outcome (*)(const RunConfig&)> kHandlers = {
    {"simulate", cmd_simulate},
    {"filter-run", cmd_filter_run},
    {"smooth", cmd_smooth},
    {"gap", cmd_gap},
    {"stability", cmd_stability},
    {"mixing", cmd_mixing},
    {"tail-probe", cmd_tail_probe},
    {"scenery-extract", cmd_scenery_extract},
    {"align", cmd_align},
    {"channel-calibrate", cmd_channel_calibrate},
};

// Which options each subcommand takes.
enum Opt : unsigned {
    kModel = 1u << 0,
    kEps = 1u << 1,
    kN = 1u << 2,
    kJ = 1u << 3,
    kReplicates = 1u << 4,
    kHorizons = 1u << 5,
    kDelta = 1u << 6,
    kMinOverlap = 1u << 7,
    kKappa = 1u << 8,
    kStat = 1u << 9,
    kPrior = 1u << 10,
    kPrior2 = 1u << 11,
    kCylinder = 1u << 12,
    kInput = 1u << 13,
    kInput2 = 1u << 14,
    kEpsList = 1u << 15,
    kTau = 1u << 16,
    kThreads = 1u << 17,
};

struct SubcommandSpec {
    const char* name;
    const char* help;
    unsigned options;
    RunConfig defaults;
};

RunConfig with(RunConfig c, const std::function<void(RunConfig&)>& f)
{
    f(c);
    return c;
}

std::vector<SubcommandSpec> subcommand_specs()
{
    const RunConfig base;
    return {
        {"simulate", "Simulate a trajectory (X_k, Y_k), or an RWRS window with --model rwrs",
         kModel | kEps | kN | kJ, base},
        {"filter-run", "Run the filter on simulated or given observations",
         kModel | kEps | kN | kPrior | kInput, base},
        {"smooth", "Law of X_0 given Y_1..Y_k for every k", kModel | kEps | kN | kPrior | kInput,
         base},
        {"gap", "Kunita gap: lower and upper sandwich bounds per horizon",
         kModel | kEps | kN | kReplicates | kHorizons | kKappa | kStat | kThreads,
         with(base, [](RunConfig& c) { c.n = 20; })},
        {"stability", "Total variation between two filters with different priors",
         kModel | kEps | kN | kReplicates | kHorizons | kPrior | kPrior2 | kThreads,
         with(base, [](RunConfig& c) { c.replicates = 1000; c.n = 50; })},
        {"mixing", "Exact absolute-regularity coefficient per horizon", kModel | kEps | kHorizons,
         with(base, [](RunConfig& c) { c.model = "pair-chain"; })},
        {"tail-probe", "Tail-triviality probe for the RWRS observation process",
         kModel | kJ | kReplicates | kHorizons | kCylinder | kThreads,
         with(base, [](RunConfig& c) { c.model = "rwrs"; })},
        {"scenery-extract", "Read the scenery off an RWRS window",
         kModel | kN | kJ | kDelta | kInput | kTau,
         with(base, [](RunConfig& c) { c.model = "rwrs"; c.n = 1000; })},
        {"align", "Find the reflection/shift relating two symbol maps", kMinOverlap | kInput | kInput2,
         base},
        {"channel-calibrate", "Estimate the symbol error rate delta(eps)",
         kReplicates | kEpsList | kThreads, with(base, [](RunConfig& c) { c.replicates = 100000; })},
    };
}

void bind_options(CLI::App* s, RunConfig& c, unsigned opts)
{
    if (opts & kModel)
        s->add_option("--model", c.model, "xor, noisy-xor, pair-chain, rwrs or a model file");
    if (opts & kEps)
        s->add_option("--eps", c.eps, "Gaussian noise scale of noisy-xor")->check(CLI::PositiveNumber);
    if (opts & kN) s->add_option("--n", c.n, "Horizon")->check(CLI::NonNegativeNumber);
    if (opts & kJ) s->add_option("--J", c.J, "Scenery half-width")->check(CLI::PositiveNumber);
    if (opts & kReplicates)
        s->add_option("--replicates", c.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
    if (opts & kHorizons) s->add_option("--horizons", c.horizons, "Comma-separated horizons");
    if (opts & kDelta)
        s->add_option("--delta", c.delta, "Symbol channel error rate")->check(CLI::Range(0.0, 1.0));
    if (opts & kMinOverlap)
        s->add_option("--min-overlap", c.min_overlap, "Least number of compared sites")
            ->check(CLI::PositiveNumber);
    if (opts & kKappa) s->add_option("--kappa", c.kappa, "square or abs:<center>");
    if (opts & kStat) s->add_option("--f", c.f, "Statistic values per state, comma separated");
    if (opts & kPrior)
        s->add_option("--prior", c.prior, "mu, uniform, truth, point:<i> or weights w0,w1,...");
    if (opts & kPrior2) s->add_option("--prior2", c.prior2, "Second prior, same forms as --prior");
    if (opts & kCylinder)
        s->add_option("--cylinder", c.cylinder, "true or <component>=<value> on Z_n");
    if (opts & kInput) s->add_option("--input", c.input, "Input file");
    if (opts & kInput2) s->add_option("--input2", c.input2, "Second input file");
    if (opts & kEpsList) s->add_option("--eps", c.eps_list, "Comma-separated noise scales");
    if (opts & kTau)
        s->add_option("--stopping-times", c.stopping_times,
                      "Write tau_j for |j| <= R instead of the scenery");
    if (opts & kCylinder)
        s->add_option("--min-atom-count", c.min_atom_count, "Least replicates per atom of Z_0")
            ->check(CLI::PositiveNumber);
    s->add_option("--seed", c.seed, "Random seed");
    s->add_option("--out", c.out, "Output table (default: standard output)");
    s->add_option("--manifest", c.manifest, "Manifest path (default: <out>.manifest.json)");
    if (opts & kThreads)
        s->add_option("--threads", c.threads,
                      std::string("Worker threads (0: $") + kThreadsEnv + " or hardware)");
}

int report(std::ostream& err, int code, const std::string& kind, const std::string& what)
{
    err << "filterlab: " << (code == kUsageError ? "usage error: " : "error: ");
    if (!kind.empty() && what.rfind(kind, 0) != 0) err << kind << ": ";
    err << what << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"filterlab: filters, Kunita gaps, mixing and scenery experiments", "filterlab"};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "INI/TOML file with flag values; [subcommand] sections");
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto specs = subcommand_specs();
    std::map<std::string, RunConfig> configs;
    std::map<std::string, CLI::App*> subs;
    for (auto& spec : specs) {
        auto& c = configs[spec.name] = spec.defaults;
        c.subcommand = spec.name;
        auto* s = app.add_subcommand(spec.name, spec.help);
        bind_options(s, c, spec.options);
        subs[spec.name] = s;
    }
    std::string rerun_manifest, rerun_out;
    auto* rerun_cmd = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
    rerun_cmd->add_option("--manifest", rerun_manifest, "Manifest written by an earlier run")->required();
    rerun_cmd->add_option("--out", rerun_out, "Output table (default: standard output)");

    std::vector<const char*> argv{"filterlab"};
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }

    try {
        if (*rerun_cmd) return rerun(rerun_manifest, rerun_out, out, err);
        for (const auto& [name, sub] : subs) {
            if (!*sub) continue;
            const RunConfig& c = configs.at(name);
            const Outcome outcome = kHandlers.at(name)(c);
            const std::string manifest = make_manifest(c, *sub, outcome).dump(2) + "\n";
            if (c.out.empty()) {
                out << outcome.table;
                if (c.manifest.empty())
                    err << manifest;
                else
                    write_text(c.manifest, manifest);
            } else {
                write_text(c.out, outcome.table);
                write_text(c.manifest.empty() ? c.out + ".manifest.json" : c.manifest, manifest);
            }
            return kSuccess;
        }
    } catch (const UsageError& e) {
        return report(err, kUsageError, "", e.what());
    } catch (const ZeroLikelihood& e) {
        return report(err, kDataError, "ZeroLikelihood", e.what());
    } catch (const StoppingTimeOverflow& e) {
        return report(err, kDataError, "StoppingTimeOverflow", e.what());
    } catch (const AlignmentError& e) {
        return report(err, kDataError, "", e.what());
    } catch (const InsufficientReplicates& e) {
        return report(err, kDataError, "InsufficientReplicates", e.what());
    } catch (const InvalidModel& e) {
        return report(err, kDataError, "InvalidModel", e.what());
    } catch (const ModelParseError& e) {
        return report(err, kDataError, "ModelParseError", e.what());
    } catch (const NonConvergence& e) {
        return report(err, kDataError, "NonConvergence", e.what());
    } catch (const WalkExitsScenery& e) {
        return report(err, kDataError, "WalkExitsScenery", e.what());
    } catch (const DataError& e) {
        return report(err, kDataError, "", e.what());
    } catch (const std::invalid_argument& e) {
        return report(err, kUsageError, "", e.what());
    } catch (const std::exception& e) {
        return report(err, kDataError, "", e.what());
    }
    return kUsageError;
}

}  // namespace filterlab::cli
