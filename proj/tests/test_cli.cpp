#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rowswarm/training.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;

    TempDir() {
        path = fs::temp_directory_path() /
               ("rowswarm_cli_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    std::string file(const std::string& leaf) const {
        return (path / leaf).string();
    }
};

// Run the binary with `args`; returns its exit status (-1 on launch
// failure). Output is silenced.
int run_cli(const std::string& args) {
    std::string cmd =
        std::string(ROWSWARM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    if (rc == -1 || !WIFEXITED(rc)) return -1;
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("help exits clean, usage errors exit 2") {
    CHECK(run_cli("--help") == 0);
    CHECK(run_cli("gen --help") == 0);
    CHECK(run_cli("") == 2);                    // a subcommand is required
    CHECK(run_cli("orbit") == 2);               // unknown subcommand
    CHECK(run_cli("gen") == 2);                 // --out is required
    CHECK(run_cli("simulate --bogus-flag") == 2);
    CHECK(run_cli("simulate --controller bogus") == 2);
    CHECK(run_cli("probe --kind sideways --out x.csv --controller manual") == 2);
    CHECK(run_cli("eval --task 3 --out-dir x") == 2);
}

TEST_CASE("gen writes datasets; zero runs are legal") {
    TempDir tmp;
    std::string out = tmp.file("ds.jsonl");
    CHECK(run_cli("gen --out " + out + " --runs 3 --n-agents 5 --avg-gap 8 --seed 2") == 0);
    CHECK(fs::exists(out));
    CHECK(fs::exists(tmp.file("ds.meta.json")));
    CHECK(fs::file_size(out) > 0);

    std::string empty = tmp.file("none.jsonl");
    CHECK(run_cli("gen --out " + empty + " --runs 0") == 0);
    CHECK(fs::exists(empty));
    CHECK(fs::file_size(empty) == 0);

    CHECK(run_cli("gen --out " + tmp.file("x.jsonl") + " --controller bogus") == 2);
    CHECK(run_cli("gen --out " + tmp.file("y.jsonl") + " --n-agents 9:5") == 2);
    CHECK(run_cli("gen --out " + tmp.file("z.jsonl") + " --avg-gap big") == 2);
}

TEST_CASE("gen output bytes are reproducible") {
    TempDir tmp;
    std::string a = tmp.file("a.jsonl");
    std::string b = tmp.file("b.jsonl");
    std::string args = " --runs 4 --n-agents 5:6 --avg-gap variable --seed 9";
    REQUIRE(run_cli("gen --out " + a + args) == 0);
    REQUIRE(run_cli("gen --out " + b + args) == 0);
    CHECK(slurp(a) == slurp(b));

    std::string c = tmp.file("c.jsonl");
    REQUIRE(run_cli("gen --out " + c + args + "9") == 0); // --seed 99
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("simulate runs scripted controllers and writes traces") {
    TempDir tmp;
    std::string trace = tmp.file("trace.csv");
    CHECK(run_cli("simulate --controller expert --n-agents 5 --avg-gap 10 "
                  "--seed 3 --trace-out " + trace) == 0);
    std::string body = slurp(trace);
    CHECK(body.rfind("step,agent,x,goal,speed,message,colour\n", 0) == 0);
    CHECK(body.find("\n0,0,") != std::string::npos);

    CHECK(run_cli("simulate --controller manual-colour --n-agents 6 --seed 4") == 0);
    // Learned controllers demand a checkpoint.
    CHECK(run_cli("simulate --controller net-distributed") == 2);
    CHECK(run_cli("simulate --controller net-distributed --model " +
                  tmp.file("missing.json")) == 1);
}

TEST_CASE("model and controller archs must agree") {
    TempDir tmp;
    std::string ckpt = tmp.file("distributed.json");
    rowswarm::save_checkpoint(ckpt,
                              rowswarm::make_mlp(rowswarm::Arch::distributed, 7, 1));

    CHECK(run_cli("simulate --controller net-distributed --model " + ckpt +
                  " --n-agents 5") == 0);
    // A colouring run with a spacing checkpoint is a usage error.
    CHECK(run_cli("simulate --controller net-colour --model " + ckpt) == 2);
    // Wrong input width for the checkpoint: also usage.
    CHECK(run_cli("simulate --controller net-distributed --model " + ckpt +
                  " --input all_sensors") == 2);
}

TEST_CASE("the whole pipeline runs end to end") {
    TempDir tmp;
    std::string ds = tmp.file("expert.jsonl");
    std::string ckpt = tmp.file("net.json");
    std::string evaldir = tmp.file("eval");

    REQUIRE(run_cli("gen --out " + ds +
                    " --runs 8 --n-agents 5 --avg-gap 8 --seed 5") == 0);
    REQUIRE(run_cli("train --pipeline distributed --dataset " + ds + " --out " +
                    ckpt + " --epochs 2 --seed 6") == 0);
    CHECK(fs::exists(ckpt));
    CHECK(fs::exists(ckpt + ".curve.csv"));
    std::string curve = slurp(ckpt + ".curve.csv");
    CHECK(curve.rfind("epoch,train_loss,val_loss\n", 0) == 0);

    REQUIRE(run_cli("eval --task 1 --model " + ckpt + " --runs 3 --seed 7 "
                    "--out-dir " + evaldir) == 0);
    CHECK(fs::exists(evaldir + "/distance_expert.csv"));
    CHECK(fs::exists(evaldir + "/distance_manual.csv"));
    CHECK(fs::exists(evaldir + "/distance_net-distributed.csv"));
    CHECK(fs::exists(evaldir + "/r2.csv"));
    std::string r2 = slurp(evaldir + "/r2.csv");
    CHECK(r2.rfind("controller,r2\n", 0) == 0);
    CHECK(r2.find("expert,1\n") != std::string::npos);

    // Task mismatch between flag and model.
    CHECK(run_cli("eval --task 2 --model " + ckpt + " --out-dir " +
                  tmp.file("bad")) == 2);
    CHECK(run_cli("eval --task 2 --baselines expert --out-dir " +
                  tmp.file("bad2")) == 2);

    // The colouring side of eval.
    std::string evaldir2 = tmp.file("eval2");
    REQUIRE(run_cli("eval --task 2 --runs 3 --seed 7 --out-dir " + evaldir2) == 0);
    CHECK(fs::exists(evaldir2 + "/wrong_colour_manual-colour.csv"));

    // Training without a dataset is a usage error.
    CHECK(run_cli("train --pipeline distributed --out " + tmp.file("no.json")) == 2);
    CHECK(run_cli("train --dataset " + ds + " --out " + tmp.file("no2.json")) == 2);
}

TEST_CASE("probes emit their curves") {
    TempDir tmp;
    std::string front = tmp.file("front.csv");
    CHECK(run_cli("probe --kind sensing --controller manual --axis front "
                  "--points 11 --out " + front) == 0);
    std::string body = slurp(front);
    CHECK(body.rfind("reading,speed\n", 0) == 0);

    std::string pos = tmp.file("pos.csv");
    CHECK(run_cli("probe --kind position --controller expert --jitters 3 "
                  "--position-points 7 --out " + pos) == 0);
    CHECK(slurp(pos).rfind("position,mean_speed,std_speed\n", 0) == 0);

    CHECK(run_cli("probe --kind sensing --out " + tmp.file("x.csv")) == 2);
}
