// End-to-end tests that spawn the real command-line binary and check exit
// codes, report contents, and byte-level determinism of its outputs.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

namespace {

namespace fs = std::filesystem;

const std::string kBin = F4SIM_BINARY;

struct CmdResult {
    int exit_code = -1;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Runs the binary through the shell, capturing stdout only; stderr is
// dropped because it carries wall-clock timing and must not be compared.
CmdResult run(const std::string& args, const std::string& env_prefix = "") {
    static int counter = 0;
    const fs::path out_path =
        fs::temp_directory_path() /
        ("f4sim_out_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    const std::string cmd =
        env_prefix + " \"" + kBin + "\" " + args + " > " + out_path.string() + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    CmdResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    fs::remove(out_path);
    return r;
}

fs::path scratch_dir() {
    const fs::path dir =
        fs::temp_directory_path() / ("f4sim_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("plan report carries manifest and known geometry") {
    const CmdResult r = run("plan --network alexnet");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "# manifest="));
    CHECK(contains(r.out, "layer,M,N,Nc,Nk,mode,scheme,S,g,T,rho,T_B,frames,utilization"));
    // 27x27 input, 5x5 kernel, 96 in, 256 out on a 4096 plane: block tiling,
    // grid 132, one row of filters per block, two frames.
    CHECK(contains(r.out, "1,27,5,96,256,same,mixed,31,132,17424,1,132,2"));
}

TEST_CASE("perf totals match hand-checked frame counts") {
    const CmdResult r = run("perf --network alexnet --scheme all");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "none,all,,,,,,1,368928,0.184464"));
    CHECK(contains(r.out, "channel,all,,,,,,1,1376,0.000688"));
    CHECK(contains(r.out, "mixed,all,,,,,,1,15,7.5e-06"));
    CHECK(contains(r.out, "filter,all,,,,,,1,1123,0.0005615"));

    const CmdResult v = run("perf --network vgg16-cifar --scheme channel");
    REQUIRE(v.exit_code == 0);
    CHECK(contains(v.out, "channel,all,,,,,,1,4224,0.002112"));
}

TEST_CASE("exit codes distinguish failure classes") {
    CHECK(run("plan --network alexnet").exit_code == 0);
    CHECK(run("plan").exit_code == 2);                                // missing required flag
    CHECK(run("plan --network alexnet --scheme bogus").exit_code == 2);
    CHECK(run("plan --network alexnet --scheme all").exit_code == 2);
    CHECK(run("plan --network alexnet --slm-d 100").exit_code == 3);  // cell exceeds plane
    CHECK(run("plan --network /no/such/file.json").exit_code == 4);
    CHECK(run("--help").exit_code == 0);

    const fs::path dir = scratch_dir();
    const fs::path bad = dir / "bad.json";
    std::ofstream(bad) << "not json{";
    CHECK(run("plan --network " + bad.string()).exit_code == 4);
}

TEST_CASE("environment variables apply and flags win") {
    const CmdResult env_only = run("perf --network alexnet", "F4SIM_SCHEME=channel");
    REQUIRE(env_only.exit_code == 0);
    CHECK(contains(env_only.out, "channel,all"));
    CHECK(!contains(env_only.out, "mixed,all"));

    const CmdResult flag_wins =
        run("perf --network alexnet --scheme mixed", "F4SIM_SCHEME=channel");
    REQUIRE(flag_wins.exit_code == 0);
    CHECK(contains(flag_wins.out, "mixed,all"));
    CHECK(!contains(flag_wins.out, "channel,all"));
}

TEST_CASE("generated artifacts and reports are byte-stable") {
    const fs::path dir = scratch_dir();
    const fs::path model_a = dir / "a.f4nn";
    const fs::path model_b = dir / "b.f4nn";
    REQUIRE(run("gen-model --out " + model_a.string()).exit_code == 0);
    REQUIRE(run("gen-model --out " + model_b.string()).exit_code == 0);
    CHECK(slurp(model_a) == slurp(model_b));

    const fs::path ds = dir / "ds";
    REQUIRE(run("gen-dataset --out " + ds.string() + " --per-class 4").exit_code == 0);

    const std::string sim = "simulate --model " + model_a.string() + " --dataset " +
                            ds.string() +
                            " --backend channel4f --bits 8 --snr-db 20 --seed 42 --mse "
                            "--per-image";
    const CmdResult t1a = run(sim + " --threads 1");
    const CmdResult t1b = run(sim + " --threads 1");
    const CmdResult t4 = run(sim + " --threads 4");
    REQUIRE(t1a.exit_code == 0);
    REQUIRE(t4.exit_code == 0);
    CHECK(t1a.out == t1b.out);  // same run twice
    CHECK(t1a.out == t4.out);   // thread count must not leak into the report
    CHECK(contains(t1a.out, "result,accuracy,"));
    CHECK(contains(t1a.out, "result,mean_mse_conv0,"));
    CHECK(contains(t1a.out, "result,image_0,"));
}

TEST_CASE("sweep emits one row per grid cell") {
    const fs::path dir = scratch_dir();
    const fs::path model = dir / "a.f4nn";
    const fs::path ds = dir / "ds";
    if (!fs::exists(model)) REQUIRE(run("gen-model --out " + model.string()).exit_code == 0);
    if (!fs::exists(ds))
        REQUIRE(run("gen-dataset --out " + ds.string() + " --per-class 4").exit_code == 0);
    const CmdResult r = run("sweep --model " + model.string() + " --dataset " + ds.string() +
                            " --backend channel4f --snr-db-list inf,20 --bits-list inf,8 "
                            "--seed 7 --threads 4");
    REQUIRE(r.exit_code == 0);
    CHECK(contains(r.out, "snr_db,bits,accuracy,correct,total"));
    CHECK(contains(r.out, "inf,inf,"));
    CHECK(contains(r.out, "inf,8,"));
    CHECK(contains(r.out, "20,inf,"));
    CHECK(contains(r.out, "20,8,"));
}
