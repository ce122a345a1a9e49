#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string output;
};

// runs the CLI with stdout+stderr captured
RunResult run_cli(const std::string& args) {
    fs::path out = fs::temp_directory_path() / "mems_cli_out.txt";
    std::string cmd = std::string(MEMSFLOW_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream f(out);
    std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    return {WEXITSTATUS(rc), text};
}

fs::path workdir() {
    fs::path d = fs::temp_directory_path() / "mems_cli";
    fs::create_directories(d);
    mems::write_fixtures("gyro", d.string());
    mems::write_fixtures("accel", d.string());
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), {});
}

}  // namespace

TEST_CASE("synth-layout produces a CIF whose counts match the netlist") {
    fs::path wd = workdir();
    fs::path cif = wd / "out.cif";
    RunResult r = run_cli("synth-layout " + (wd / "gyro.net").string() + " --stack " +
                          (wd / "soi.stack").string() + " -o " + cif.string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("38 instances") != std::string::npos);
    CHECK(r.output.find("126 shapes") != std::string::npos);
    CHECK(fs::exists(cif));

    // identical inputs give byte-identical outputs
    std::string first = slurp(cif);
    RunResult again = run_cli("synth-layout " + (wd / "gyro.net").string() + " --stack " +
                              (wd / "soi.stack").string() + " -o " + cif.string());
    CHECK(again.exit_code == 0);
    CHECK(slurp(cif) == first);
}

TEST_CASE("the solid route and the direct route close the triangle") {
    fs::path wd = workdir();
    RunResult synth = run_cli("synth-solid " + (wd / "gyro.net").string() + " --stack " +
                              (wd / "soi.stack").string() + " -o " + (wd / "g.esm").string());
    CHECK(synth.exit_code == 0);
    RunResult proj = run_cli("solid2layout " + (wd / "g.esm").string() + " --stack " +
                             (wd / "soi.stack").string() + " -o " + (wd / "g2.cif").string());
    CHECK(proj.exit_code == 0);
    RunResult back = run_cli("layout2solid " + (wd / "g2.cif").string() + " --stack " +
                             (wd / "soi.stack").string() + " -o " + (wd / "g2.esm").string());
    CHECK(back.exit_code == 0);
    CHECK(slurp(wd / "g2.esm") == slurp(wd / "g.esm"));

    RunResult tri = run_cli("verify-triangle " + (wd / "gyro.net").string() + " --stack " +
                            (wd / "soi.stack").string());
    CHECK(tri.exit_code == 0);
    CHECK(tri.output.find("closed triangle exact") != std::string::npos);
}

TEST_CASE("extract recovers the accelerometer netlist from its layout") {
    fs::path wd = workdir();
    RunResult r = run_cli("extract " + (wd / "accel.cif").string() + " --stack " +
                          (wd / "accel.stack").string() + " --rules " +
                          (wd / "extract.rules").string() + " -o " + (wd / "x.net").string());
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("0 unrecognized") != std::string::npos);
    CHECK(slurp(wd / "x.net").find("beam") != std::string::npos);
}

TEST_CASE("exit codes partition the documented error classes") {
    fs::path wd = workdir();
    RunResult io = run_cli("synth-layout /no/such/file.net --stack " +
                           (wd / "soi.stack").string() + " -o " + (wd / "o.cif").string());
    CHECK(io.exit_code == 4);
    CHECK(io.output.find("error: io: /no/such/file.net") != std::string::npos);

    fs::path bad = wd / "bad.net";
    {
        std::ofstream f(bad);
        f << "beam b1 l=200u\n";
    }
    RunResult parse = run_cli("synth-layout " + bad.string() + " --stack " +
                              (wd / "soi.stack").string() + " -o " + (wd / "o.cif").string());
    CHECK(parse.exit_code == 2);
    CHECK(parse.output.find("error: parse:") != std::string::npos);

    fs::path unknown_layer = wd / "ul.net";
    {
        std::ofstream f(unknown_layer);
        f << "process \"soi\"\n"
          << "material si E=160e9 nu=0.28 rho=2330\n"
          << "anchor a node=(g) w=20u h=20u anchor_layer=ANCHOR pos=(0u,0u) layer=METAL9\n";
    }
    RunResult sem = run_cli("synth-layout " + unknown_layer.string() + " --stack " +
                            (wd / "soi.stack").string() + " -o " + (wd / "o.cif").string());
    CHECK(sem.exit_code == 3);
    CHECK(sem.output.find("error: semantic:") != std::string::npos);
}

TEST_CASE("fea-assemble then mor-reduce then sim-transient compose as a pipeline") {
    fs::path wd = workdir();
    RunResult x = run_cli("extract " + (wd / "accel.cif").string() + " --stack " +
                          (wd / "accel.stack").string() + " -o " + (wd / "x.net").string());
    REQUIRE(x.exit_code == 0);
    RunResult fea = run_cli("fea-assemble " + (wd / "x.net").string() + " --stack " +
                            (wd / "accel.stack").string() +
                            " --refine 1 --input mass0:uz --output mass0:uz --beta 2e-9 -o " +
                            (wd / "f").string());
    CHECK(fea.exit_code == 0);
    RunResult mor = run_cli("mor-reduce " + (wd / "f").string() + " --q 10 --mode shift:0 -o " +
                            (wd / "r").string());
    CHECK(mor.exit_code == 0);
    CHECK(mor.output.find("order 10") != std::string::npos);

    fs::path cfg = wd / "sim.cfg";
    {
        std::ofstream f(cfg);
        f << "macromodel=r\ndt=1e-6\ntend=2e-4\n"
          << "source=force@in,kind=sine,amp=1e-6,freq=3000\nprobe=y0\n";
    }
    RunResult sim = run_cli("sim-transient " + cfg.string() + " -o " + (wd / "t.csv").string());
    CHECK(sim.exit_code == 0);
    CHECK(slurp(wd / "t.csv").rfind("t,y0\n", 0) == 0);

    fs::path acfg = wd / "ac.cfg";
    {
        std::ofstream f(acfg);
        f << "macromodel=r\ninput=force@in\noutput=y0\n"
          << "freq_start=500\nfreq_stop=50000\nfreq_points=9\nfreq_scale=log\n";
    }
    RunResult ac = run_cli("sim-ac " + acfg.string() + " -o " + (wd / "ac.csv").string());
    CHECK(ac.exit_code == 0);
    CHECK(slurp(wd / "ac.csv").rfind("f,y0.re,", 0) == 0);
}

TEST_CASE("committed fixture files track the generators byte-for-byte") {
    fs::path wd = workdir();
    fs::path repo(MEMSFLOW_FIXTURE_DIR);
    for (const char* name : {"gyro.net", "soi.stack", "accel.cif", "accel.stack", "extract.rules"})
        CHECK(slurp(repo / name) == slurp(wd / name));
}
