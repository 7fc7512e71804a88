#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "catch_amalgamated.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(ISLM_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    std::size_t n = 0;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("islm_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string params03() {
    return (fs::path(testsup::data_dir()) / "params_eps03.txt").string();
}

std::string params08() {
    return (fs::path(testsup::data_dir()) / "params_eps08.txt").string();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

} // namespace

TEST_CASE("cli rejects empty and malformed invocations") {
    REQUIRE(run_cli("").code == 2);
    REQUIRE(run_cli("frobnicate").code == 2);
    REQUIRE(run_cli("analyze").code == 2); // --params is required
    const RunResult help = run_cli("--help");
    REQUIRE(help.code == 0);
    REQUIRE(help.out.find("analyze") != std::string::npos);
    REQUIRE(help.out.find("simulate") != std::string::npos);
    REQUIRE(help.out.find("waveform") != std::string::npos);
    REQUIRE(help.out.find("sweep") != std::string::npos);
}

TEST_CASE("cli analyze writes matching reports") {
    const fs::path dir = fresh_dir("analyze");
    const RunResult r =
        run_cli("analyze --params " + params03() + " --out " + dir.string());
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("IS-LM model") != std::string::npos);
    REQUIRE(fs::exists(dir / "report.txt"));
    REQUIRE(fs::exists(dir / "report.kv"));

    const auto kvs = islm::parse_machine_report(slurp(dir / "report.kv"));
    REQUIRE(islm::machine_value(kvs, "eq.Y0") == 500.0);
    REQUIRE(kvs.at("nf.ok") == "1");

    // The same analysis in-process must agree bit for bit.
    const islm::AnalysisResult ar = islm::analyze(islm::parse_params_file(params03()));
    REQUIRE(islm::machine_value(kvs, "hopf.0.tau0") == ar.stab.hopf_points.at(0).tau0);
    REQUIRE(islm::machine_value(kvs, "nf.C1_re") == ar.nf.main.C1.real());
}

TEST_CASE("cli analyze is deterministic") {
    const fs::path d1 = fresh_dir("det1"), d2 = fresh_dir("det2");
    REQUIRE(run_cli("analyze --params " + params03() + " --out " + d1.string()).code == 0);
    REQUIRE(run_cli("analyze --params " + params03() + " --out " + d2.string()).code == 0);
    REQUIRE(slurp(d1 / "report.kv") == slurp(d2 / "report.kv"));
    REQUIRE(slurp(d1 / "report.txt") == slurp(d2 / "report.txt"));
}

TEST_CASE("cli analyze reports degenerate parameter sets with exit 3") {
    const fs::path dir = fresh_dir("deg");
    const RunResult r = run_cli("analyze --params " + params03() +
                                " --set epsilon=0 --out " + dir.string());
    REQUIRE(r.code == 3);
    REQUIRE(r.out.find("degenerate analysis") != std::string::npos);
    REQUIRE(r.out.find("no stability switch") != std::string::npos);
}

TEST_CASE("cli input validation failures exit with code 2") {
    REQUIRE(run_cli("analyze --params /no/such/file.txt").code == 2);
    REQUIRE(run_cli("analyze --params " + params03() + " --set nope=1").code == 2);
    REQUIRE(run_cli("analyze --params " + params03() + " --set epsilon=1.5").code == 2);
    REQUIRE(run_cli("simulate --params " + params03() + " --tau 1.0 --dt 0.3").code == 2);
}

TEST_CASE("cli simulate holds the equilibrium") {
    const fs::path dir = fresh_dir("simeq");
    const RunResult r = run_cli("simulate --params " + params03() +
                                " --tau 4.5 --dt 0.002197265625 --tmax 50 --out " +
                                dir.string());
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("classification=equilibrium") != std::string::npos);
    REQUIRE(r.out.find("period=n/a") != std::string::npos);

    std::ifstream csv(dir / "trajectory.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    REQUIRE(line == "t,Y,r,K,M");
    double max_dev = 0.0;
    while (std::getline(csv, line)) {
        const auto cells = split_csv_line(line);
        REQUIRE(cells.size() == 5);
        max_dev = std::max(max_dev,
                           std::abs(std::strtod(cells[1].c_str(), nullptr) - 500.0));
    }
    REQUIRE(max_dev < 1e-9 * 501.0);
}

TEST_CASE("cli simulate classifies a perturbed subcritical run as decaying") {
    const fs::path dir = fresh_dir("simdec");
    const RunResult r = run_cli("simulate --params " + params03() +
                                " --tau 4.5 --dt 0.002197265625 --tmax 100"
                                " --offset 1,0,0,0 --plot --out " +
                                dir.string());
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("classification=decaying") != std::string::npos);
    REQUIRE(r.out.find("period=") != std::string::npos);
    REQUIRE(fs::exists(dir / "plot.gp"));
    REQUIRE(slurp(dir / "plot.gp").find("set datafile separator") != std::string::npos);
}

TEST_CASE("cli simulate surfaces domain exits with exit 4 and a partial CSV") {
    // tau/200 is far beyond the stiffness bound of the liquidity relaxation,
    // so the default step size blows up quickly at this delay.
    const fs::path dir = fresh_dir("simdom");
    const RunResult r = run_cli("simulate --params " + params08() +
                                " --tau 1.15 --offset 1,0,0,0 --out " + dir.string());
    REQUIRE(r.code == 4);
    REQUIRE(r.out.find("partial trajectory") != std::string::npos);
    std::ifstream csv(dir / "trajectory.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    REQUIRE(line == "t,Y,r,K,M");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    REQUIRE(rows > 1);
}

TEST_CASE("cli waveform writes the observable columns") {
    const fs::path dir = fresh_dir("wave");
    const RunResult r =
        run_cli("waveform --params " + params08() + " --out " + dir.string());
    REQUIRE(r.code == 0);
    REQUIRE(r.out.find("summary: omega0=") != std::string::npos);
    std::ifstream csv(dir / "waveform.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    REQUIRE(line == "t,Y,r,K,M,I,L");
    std::size_t rows = 0;
    while (std::getline(csv, line)) ++rows;
    REQUIRE(rows > 1000);

    const RunResult deg = run_cli("waveform --params " + params08() +
                                  " --set epsilon=0 --out " + dir.string());
    REQUIRE(deg.code == 3);
}

TEST_CASE("cli sweep over epsilon matches in-process analysis bit for bit") {
    const fs::path dir = fresh_dir("sweepeps");
    const RunResult r = run_cli("sweep --params " + params03() +
                                " --sweep epsilon --from 0.3 --to 0.8 --steps 6 --out " +
                                dir.string());
    REQUIRE(r.code == 0);
    std::ifstream csv(dir / "sweep.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    REQUIRE(line == "epsilon,omega0,tau0,mu2,beta2,T2");

    std::vector<std::vector<std::string>> rows;
    while (std::getline(csv, line)) rows.push_back(split_csv_line(line));
    REQUIRE(rows.size() == 6);

    double tau0_first = 0.0, tau0_last = 0.0;
    for (const auto& cells : rows) {
        REQUIRE(cells.size() == 6);
        const double x = std::strtod(cells[0].c_str(), nullptr);
        islm::ModelParams p = islm::parse_params_file(params03());
        islm::set_param(p, "epsilon", x);
        const islm::AnalysisResult ar = islm::analyze(p);
        REQUIRE(ar.has_hopf);
        REQUIRE(ar.nf_ok);
        REQUIRE(cells[1] == islm::fmt17(ar.stab.hopf_points.front().omega0));
        REQUIRE(cells[2] == islm::fmt17(ar.stab.hopf_points.front().tau0));
        REQUIRE(cells[3] == islm::fmt17(ar.nf.main.mu2));
        REQUIRE(cells[4] == islm::fmt17(ar.nf.main.beta2));
        REQUIRE(cells[5] == islm::fmt17(ar.nf.main.T2));
        if (&cells == &rows.front()) tau0_first = ar.stab.hopf_points.front().tau0;
        if (&cells == &rows.back()) tau0_last = ar.stab.hopf_points.front().tau0;
    }
    // The critical delay shrinks as the delayed share of investment grows.
    REQUIRE(tau0_last < tau0_first);
}

TEST_CASE("cli sweep over tau repeats the delay-independent columns") {
    const fs::path dir = fresh_dir("sweeptau");
    const RunResult r = run_cli("sweep --params " + params08() +
                                " --sweep tau --from 0.5 --to 1.5 --steps 3 --out " +
                                dir.string());
    REQUIRE(r.code == 0);
    std::ifstream csv(dir / "sweep.csv");
    std::string line;
    REQUIRE(std::getline(csv, line));
    REQUIRE(line == "tau,omega0,tau0,mu2,beta2,T2");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(csv, line)) rows.push_back(split_csv_line(line));
    REQUIRE(rows.size() == 3);
    REQUIRE(rows[0][0] != rows[1][0]);
    for (std::size_t c = 1; c < 6; ++c) {
        REQUIRE(rows[0][c] == rows[1][c]);
        REQUIRE(rows[0][c] == rows[2][c]);
    }
}

TEST_CASE("cli sweep argument validation") {
    REQUIRE(run_cli("sweep --params " + params03() +
                    " --sweep epsilon --from 0.5 --to 0.5 --steps 3").code == 2);
    REQUIRE(run_cli("sweep --params " + params03() +
                    " --sweep epsilon --from 0.3 --to 0.8 --steps 1").code == 2);
    REQUIRE(run_cli("sweep --params " + params03() +
                    " --sweep delta --from 0.1 --to 0.2 --steps 3").code == 2);
}
