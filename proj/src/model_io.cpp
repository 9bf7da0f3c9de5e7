#include "filterlab/model_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "filterlab/table.hpp"

namespace filterlab {

namespace {

void write_reals(std::ostream& os, std::span<const double> values)
{
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) os << ' ';
        os << format_real(values[i]);
    }
    os << '\n';
}

/// Token stream over the file with comment lines removed; tracks line numbers
/// for error messages.
class Tokens {
public:
    explicit Tokens(std::istream& is)
    {
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            auto fields = split_fields(line);
            if (fields.empty() || fields[0][0] == '#') continue;
            for (auto& f : fields) tokens_.push_back({std::move(f), lineno});
        }
    }

    bool done() const { return pos_ >= tokens_.size(); }

    const std::string& peek() const
    {
        if (done()) fail("unexpected end of file");
        return tokens_[pos_].text;
    }

    std::string next()
    {
        const std::string& t = peek();
        ++pos_;
        return t;
    }

    void expect(const std::string& keyword)
    {
        const std::string t = next();
        if (t != keyword) fail("expected '" + keyword + "', found '" + t + "'", pos_ - 1);
    }

    std::size_t next_count()
    {
        const std::string t = next();
        std::size_t used = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size() || t.empty() || t[0] == '-')
            fail("expected a nonnegative integer, found '" + t + "'", pos_ - 1);
        return static_cast<std::size_t>(v);
    }

    double next_real()
    {
        const std::string t = next();
        try {
            return parse_real(t);
        } catch (const std::exception&) {
            fail("expected a real number, found '" + t + "'", pos_ - 1);
        }
    }

    std::vector<double> reals(std::size_t count)
    {
        std::vector<double> v(count);
        for (auto& x : v) x = next_real();
        return v;
    }

    Matrix matrix(std::size_t rows, std::size_t cols)
    {
        Matrix m(rows);
        for (auto& r : m) r = reals(cols);
        return m;
    }

    [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos_); }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const
    {
        const std::size_t line =
            tokens_.empty() ? 0 : tokens_[std::min(at, tokens_.size() - 1)].line;
        throw ModelParseError("model file line " + std::to_string(line) + ": " + msg);
    }

private:
    struct Token {
        std::string text;
        std::size_t line;
    };
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

}  // namespace

void write_model(std::ostream& os, const HmmModel& model)
{
    const std::size_t n = model.states();
    os << "filterlab-model 1\n";
    os << "states " << n << '\n';
    os << "labels";
    for (const auto& l : model.labels) os << ' ' << l;
    os << '\n';
    os << "transition\n";
    for (const auto& r : model.transition.rows) write_reals(os, r);
    if (const auto* d = std::get_if<DiscreteChannel>(&model.channel)) {
        os << "channel discrete " << d->symbols() << '\n';
        for (const auto& r : d->emission) write_reals(os, r);
    } else {
        const auto& g = std::get<GaussianChannel>(model.channel);
        os << "channel gaussian " << g.dim() << ' ' << format_real(g.noise_scale) << '\n';
        for (const auto& r : g.means) write_reals(os, r);
    }
    os << "stationary\n";
    write_reals(os, model.stationary.weights());
}

std::string model_to_string(const HmmModel& model)
{
    std::ostringstream os;
    write_model(os, model);
    return os.str();
}

HmmModel read_model(std::istream& is, bool validate)
{
    Tokens tok(is);
    tok.expect("filterlab-model");
    if (tok.next_count() != 1) tok.fail("unsupported model format version");
    tok.expect("states");
    const std::size_t n = tok.next_count();
    if (n == 0) tok.fail("state space must be nonempty");
    tok.expect("labels");
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n; ++i) labels.push_back(tok.next());
    tok.expect("transition");
    TransitionMatrix transition{tok.matrix(n, n)};

    tok.expect("channel");
    const std::string kind = tok.next();
    ObservationChannel channel;
    if (kind == "discrete") {
        const std::size_t m = tok.next_count();
        channel = DiscreteChannel{tok.matrix(n, m)};
    } else if (kind == "gaussian") {
        const std::size_t d = tok.next_count();
        const double scale = tok.next_real();
        channel = GaussianChannel{tok.matrix(n, d), scale};
    } else {
        tok.fail("unknown channel kind '" + kind + "' (expected discrete or gaussian)");
    }

    std::optional<std::vector<double>> stationary;
    if (!tok.done()) {
        tok.expect("stationary");
        stationary = tok.reals(n);
    }
    if (!tok.done()) tok.fail("unexpected trailing content '" + tok.peek() + "'");

    if (validate) {
        std::optional<ProbabilityVector> mu;
        if (stationary) {
            try {
                mu = ProbabilityVector::from_weights(*stationary);
            } catch (const std::invalid_argument& e) {
                ValidationReport r;
                r.issues.push_back(std::string("stationary vector: ") + e.what());
                throw InvalidModel(r);
            }
        }
        return make_model(std::move(transition), std::move(channel), std::move(labels),
                          std::move(mu));
    }

    HmmModel model;
    model.labels = std::move(labels);
    model.transition = std::move(transition);
    model.channel = std::move(channel);
    if (stationary) {
        try {
            model.stationary = ProbabilityVector::from_weights(*stationary);
        } catch (const std::invalid_argument&) {
            // left empty; validate_model reports the size mismatch
        }
    } else {
        model.stationary = stationary_distribution(model.transition);
    }
    return model;
}

HmmModel model_from_string(const std::string& text, bool validate)
{
    std::istringstream is(text);
    return read_model(is, validate);
}

HmmModel load_model_file(const std::string& path, bool validate)
{
    std::ifstream in(path);
    if (!in) throw std::ios_base::failure("cannot open model file '" + path + "'");
    return read_model(in, validate);
}

std::string model_fingerprint(const HmmModel& model)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : model_to_string(model)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace filterlab
