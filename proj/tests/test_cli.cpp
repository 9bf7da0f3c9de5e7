#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "filterlab/cli.hpp"
#include "filterlab/model_io.hpp"
#include "filterlab/models.hpp"
#include "filterlab/table.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = filterlab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

struct TempDir {
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() / ("filterlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

/// Rows of a tab-separated table after the header.
std::vector<std::vector<std::string>> rows(const std::string& table)
{
    std::vector<std::vector<std::string>> out;
    std::istringstream is(table);
    std::string line;
    std::getline(is, line);
    while (std::getline(is, line)) out.push_back(filterlab::split_fields(line));
    return out;
}

}  // namespace

TEST_SUITE("cli")
{
    TEST_CASE("gap on noiseless XOR")
    {
        const auto r = run({"gap", "--model", "xor", "--n", "20", "--replicates", "10000", "--seed", "7"});
        REQUIRE(r.code == 0);
        const auto t = rows(r.out);
        REQUIRE(t.size() == 1);
        CHECK(t[0][0] == "20");
        CHECK(filterlab::parse_real(t[0][1]) == 0.25);
        CHECK(filterlab::parse_real(t[0][2]) == 0.0);
        CHECK(std::abs(filterlab::parse_real(t[0][3]) - 0.5) < 0.02);
        const auto manifest = nlohmann::json::parse(r.err);
        CHECK(manifest["subcommand"] == "gap");
        CHECK(manifest["seed"] == 7);
        CHECK(manifest["parameters"]["replicates"] == "10000");
        CHECK(manifest["model_fingerprint"].is_string());
    }

    TEST_CASE("simulate is byte-identical across runs and reruns")
    {
        TempDir dir;
        const std::vector<std::string> base = {"simulate", "--model", "noisy-xor", "--eps", "0.3",
                                                "--n", "100", "--seed", "1"};
        auto a = base, b = base;
        a.insert(a.end(), {"--out", dir / "a.tsv"});
        b.insert(b.end(), {"--out", dir / "b.tsv"});
        REQUIRE(run(a).code == 0);
        REQUIRE(run(b).code == 0);
        CHECK(slurp(dir / "a.tsv") == slurp(dir / "b.tsv"));
        CHECK(slurp(dir / "a.tsv").size() > 100);

        const auto re = run({"rerun", "--manifest", dir / "a.tsv.manifest.json", "--out", dir / "c.tsv"});
        REQUIRE(re.code == 0);
        CHECK(slurp(dir / "c.tsv") == slurp(dir / "a.tsv"));

        // The simulated table feeds filter-run directly.
        const auto f = run({"filter-run", "--model", "noisy-xor", "--eps", "0.3", "--input", dir / "a.tsv",
                            "--prior", "uniform"});
        REQUIRE(f.code == 0);
        CHECK(rows(f.out).size() == 101);
        const auto g = run({"filter-run", "--model", "noisy-xor", "--eps", "0.3", "--n", "100",
                            "--seed", "1", "--prior", "uniform"});
        CHECK(g.out == f.out);
    }

    TEST_CASE("thread count does not change the output")
    {
        const std::vector<std::string> base = {"gap", "--model", "noisy-xor", "--horizons", "2,8",
                                                "--replicates", "500", "--seed", "3"};
        auto one = base, four = base;
        one.insert(one.end(), {"--threads", "1"});
        four.insert(four.end(), {"--threads", "4"});
        CHECK(run(one).out == run(four).out);
    }

    TEST_CASE("align reports ambiguity and recovers shifts")
    {
        TempDir dir;
        {
            std::ofstream a(dir / "flat.txt");
            for (int j = 0; j < 100; ++j) a << j << "\t1\n";
        }
        const auto r = run({"align", "--input", dir / "flat.txt", "--input2", dir / "flat.txt"});
        CHECK(r.code == 2);
        CHECK(r.err.find("Ambiguous") != std::string::npos);

        REQUIRE(run({"scenery-extract", "--J", "5000", "--n", "4000", "--seed", "5", "--out", dir / "x.tsv"}).code == 0);
        const auto self = run({"align", "--input", dir / "x.tsv", "--input2", dir / "x.tsv"});
        REQUIRE(self.code == 0);
        CHECK(rows(self.out)[0] == std::vector<std::string>{"1", "0", std::to_string(rows(slurp(dir / "x.tsv")).size())});
    }

    TEST_CASE("scenery-extract reads simulated windows")
    {
        TempDir dir;
        REQUIRE(run({"simulate", "--model", "rwrs", "--J", "300", "--n", "200", "--seed", "9",
                     "--out", dir / "w.tsv"}).code == 0);
        const auto from_file = run({"scenery-extract", "--input", dir / "w.tsv"});
        const auto direct = run({"scenery-extract", "--J", "300", "--n", "200", "--seed", "9"});
        REQUIRE(from_file.code == 0);
        CHECK(from_file.out == direct.out);
        const auto tau = run({"scenery-extract", "--input", dir / "w.tsv", "--stopping-times", "500"});
        CHECK(tau.out.find("INF") != std::string::npos);
        std::ofstream(dir / "junk.tsv") << "k\tstep\twalk\tleft\tright\n0\t5\t0\t0\t0\n";
        CHECK(run({"scenery-extract", "--input", dir / "junk.tsv"}).code == 2);
    }

    TEST_CASE("exit codes name the failure")
    {
        CHECK(run({"gap", "--bogus", "1"}).code == 1);
        CHECK(run({}).code == 1);
        CHECK(run({"gap", "--replicates", "0"}).code == 1);
        CHECK(run({"--version"}).code == 0);

        const auto missing = run({"mixing", "--model", "/nonexistent/model.txt"});
        CHECK(missing.code == 2);
        CHECK(missing.err.find("/nonexistent/model.txt") != std::string::npos);

        CHECK(run({"gap", "--model", "rwrs"}).code == 1);
        CHECK(run({"tail-probe", "--model", "xor"}).code == 1);

        const auto few = run({"tail-probe", "--J", "50", "--horizons", "5", "--replicates", "50"});
        CHECK(few.code == 2);
        CHECK(few.err.find("InsufficientReplicates") != std::string::npos);

        TempDir dir;
        const auto frozen = filterlab::make_model(filterlab::TransitionMatrix{{{1.0, 0.0}, {0.0, 1.0}}},
                                                  filterlab::DiscreteChannel{{{1.0, 0.0}, {0.0, 1.0}}}, {},
                                                  filterlab::ProbabilityVector::uniform(2));
        std::ofstream(dir / "frozen.model") << filterlab::model_to_string(frozen);
        std::ofstream(dir / "ys.txt") << "0\n0\n";
        const auto z = run({"filter-run", "--model", dir / "frozen.model", "--input", dir / "ys.txt",
                            "--prior", "point:1"});
        CHECK(z.code == 2);
        CHECK(z.err.find("ZeroLikelihood") != std::string::npos);

        std::ofstream(dir / "bad.txt") << "0\n7\n";
        const auto bad = run({"filter-run", "--model", dir / "frozen.model", "--input", dir / "bad.txt"});
        CHECK(bad.code == 2);
        CHECK(bad.err.find("line 2") != std::string::npos);

        std::ofstream(dir / "broken.model") << "filterlab-model 1\nstates 2\n";
        CHECK(run({"mixing", "--model", dir / "broken.model"}).code == 2);
    }

    TEST_CASE("rerun refuses a changed model file")
    {
        TempDir dir;
        const auto path = dir / "m.model";
        std::ofstream(path) << filterlab::model_to_string(filterlab::build_random_model(3, 2, 1));
        REQUIRE(run({"mixing", "--model", path, "--out", dir / "mix.tsv"}).code == 0);
        CHECK(run({"rerun", "--manifest", dir / "mix.tsv.manifest.json"}).code == 0);
        std::ofstream(path) << filterlab::model_to_string(filterlab::build_random_model(3, 2, 2));
        const auto r = run({"rerun", "--manifest", dir / "mix.tsv.manifest.json"});
        CHECK(r.code == 2);
        CHECK(r.err.find("changed") != std::string::npos);
    }

    TEST_CASE("config files supply the same keys as flags")
    {
        TempDir dir;
        std::ofstream(dir / "run.ini") << "[channel-calibrate]\neps=\"0.5,2\"\nreplicates=2000\nseed=4\n";
        const auto r = run({"--config", dir / "run.ini", "channel-calibrate"});
        REQUIRE(r.code == 0);
        const auto t = rows(r.out);
        REQUIRE(t.size() == 2);
        CHECK(t[0][0] == "0.5");
        CHECK(t[1][3] == "2000");
        const auto flags = run({"channel-calibrate", "--eps", "0.5,2", "--replicates", "2000", "--seed", "4"});
        CHECK(flags.out == r.out);
    }

    TEST_CASE("mixing and stability tables")
    {
        const auto mix = run({"mixing", "--model", "pair-chain", "--horizons", "1,2"});
        REQUIRE(mix.code == 0);
        const auto t = rows(mix.out);
        CHECK(std::abs(filterlab::parse_real(t[1][1])) < 1e-14);

        const auto st = run({"stability", "--model", "xor", "--n", "5", "--replicates", "20"});
        REQUIRE(st.code == 0);
        const auto s = rows(st.out);
        REQUIRE(s.size() == 6);
        CHECK(s[3][1] == "0.5");

        const auto sm = run({"smooth", "--model", "noisy-xor", "--n", "4", "--seed", "2"});
        REQUIRE(sm.code == 0);
        CHECK(rows(sm.out).size() == 5);
    }
}
