#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "qdetect/ensemble_io.hpp"

using namespace qdetect;

namespace {

const std::string& temp_dir() {
    static const std::string dir = [] {
        namespace fs = std::filesystem;
        fs::path p = fs::temp_directory_path() /
                     ("qdetect_tests_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p.string();
    }();
    return dir;
}

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& tag) {
    const std::string capture = temp_dir() + "/" + tag + ".out";
    const std::string cmd =
        std::string(QDETECT_CLI_PATH) + " " + args + " > " + capture + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    if (rc != -1 && WIFEXITED(rc)) r.exit_code = WEXITSTATUS(rc);
    r.out = read_text_file(capture);
    return r;
}

std::string data_file(const std::string& name) {
    return std::string(QDETECT_DATA_DIR) + "/" + name;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

int count_char(const std::string& s, char c) {
    int n = 0;
    for (char ch : s)
        if (ch == c) ++n;
    return n;
}

}  // namespace

TEST_CASE("ensemble documents round trip bitwise") {
    const UncertainEnsemble ens = fixtures::three_ensemble(0.9);
    const UncertainEnsemble back = parse_ensemble(format_ensemble(ens));
    REQUIRE(back.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(frobenius_distance({back.states()[i].op()},
                                 {ens.states()[i].op()}) == 0.0);
        CHECK(back.priors()[i] == ens.priors()[i]);
        CHECK(back.bounds()[i] == ens.bounds()[i]);
    }

    const std::string path = temp_dir() + "/roundtrip.json";
    save_ensemble(ens, path);
    const UncertainEnsemble loaded = load_ensemble(path);
    CHECK(frobenius_distance({loaded.states()[2].op()},
                             {ens.states()[2].op()}) == 0.0);
}

TEST_CASE("parse errors name the offending field") {
    CHECK_THROWS_AS(parse_ensemble("not json at all"), ParseError);
    CHECK_THROWS_AS(parse_ensemble(R"({"dim": 0, "states": []})"), ParseError);
    CHECK_THROWS_AS(parse_ensemble(R"({"states": []})"), ParseError);

    const std::string missing_prior = R"({"dim": 1, "states": [
        {"matrix": [[[1, 0]]], "q": 0.5}]})";
    try {
        parse_ensemble(missing_prior);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(contains(e.what(), "states[0]"));
        CHECK(contains(e.what(), "prior"));
    }

    const std::string bad_entry = R"({"dim": 2, "states": [
        {"matrix": [[[1, 0], [0]], [[0, 0], [0, 0]]], "prior": 1.0, "q": 0.5}]})";
    try {
        parse_ensemble(bad_entry);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(contains(e.what(), "matrix"));
    }

    const std::string skew = R"({"dim": 2, "states": [
        {"matrix": [[[0.5, 0], [0.1, 0]], [[0.1000001, 0], [0.5, 0]]],
         "prior": 0.5, "q": 0.5},
        {"matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]],
         "prior": 0.5, "q": 0.5}]})";
    CHECK_THROWS_AS(parse_ensemble(skew), ParseError);
}

TEST_CASE("solution documents round trip") {
    const RobustDesign rd = design_worst_case(fixtures::three_ensemble(0.9));
    REQUIRE(rd.converged);
    const WorstCaseSolution& ws = rd.program_solution;

    SolutionFile sf;
    sf.criterion = Criterion::WORST;
    sf.dim = 3;
    sf.value = rd.worst_case_value;
    sf.gap = ws.gap;
    sf.iterations = ws.iterations;
    sf.converged = true;
    sf.povm = rd.chosen_povm.operators();
    sf.dual = ws.dual;
    sf.bounds = ws.bounds;
    sf.regime = rd.regime;

    const std::string path = temp_dir() + "/solution.json";
    save_solution(sf, path);
    const SolutionFile back = load_solution(path);
    CHECK(back.criterion == Criterion::WORST);
    CHECK(back.dim == 3);
    CHECK(back.value == sf.value);
    CHECK(back.gap == sf.gap);
    CHECK(back.iterations == sf.iterations);
    CHECK(back.converged);
    CHECK(back.bounds == sf.bounds);
    REQUIRE(back.regime.has_value());
    CHECK(*back.regime == rd.regime);
    REQUIRE(back.dual.has_value());
    CHECK(frobenius_distance({*back.dual}, {ws.dual}) == 0.0);
    REQUIRE(back.povm.size() == sf.povm.size());
    for (std::size_t i = 0; i < sf.povm.size(); ++i)
        CHECK(frobenius_distance({back.povm[i]}, {sf.povm[i]}) == 0.0);

    nlohmann::json doc = nlohmann::json::parse(format_solution(sf));
    doc.erase("dual");
    CHECK_THROWS_AS(parse_solution(doc.dump()), ParseError);
    nlohmann::json doc2 = nlohmann::json::parse(format_solution(sf));
    doc2.erase("lambda");
    CHECK_THROWS_AS(parse_solution(doc2.dump()), ParseError);
}

TEST_CASE("criterion names round trip") {
    for (Criterion c :
         {Criterion::NOMINAL, Criterion::WORST, Criterion::AVERAGE})
        CHECK(criterion_from_name(criterion_name(c)) == c);
    CHECK_THROWS_AS(criterion_from_name("bogus"), ParseError);
}

TEST_CASE("sweep csv is shaped sanitized and deterministic") {
    SweepRecord good;
    good.q = 0.5;
    good.ok = true;
    good.nom_value = 0.88;
    good.wc_value = 0.5;
    good.avg_value = 0.75;
    good.nom.nominal = 0.882432492515219;
    good.nom.adversarial = 0.4;
    good.nom.best = 0.95;
    good.nom.maximally_mixed = 0.7;

    SweepRecord bad;
    bad.q = 0.75;
    bad.status = "solver failed, badly\nrow truncated";

    const std::string csv = sweep_to_csv({good, bad});
    CHECK(csv == sweep_to_csv({good, bad}));

    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < csv.size()) {
        const std::size_t stop = csv.find('\n', start);
        lines.push_back(csv.substr(start, stop - start));
        if (stop == std::string::npos) break;
        start = stop + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "q,pd_nom_nominal,pd_nom_wc,pd_nom_bc,pd_nom_mm,pd_wc_nominal,"
          "pd_wc_wc,pd_wc_bc,pd_wc_mm,pd_avg_nominal,pd_avg_wc,pd_avg_bc,"
          "pd_avg_mm,dist_wc_nom,dist_avg_nom,diff_wc,diff_avg,status");
    for (const std::string& line : lines) CHECK(count_char(line, ',') == 17);
    CHECK(contains(lines[1], "0.882432492515"));
    CHECK(contains(lines[2], "nan"));
    CHECK(contains(lines[2], "solver failed; badly;row truncated"));
}

TEST_CASE("cli designs and verifies through files") {
    const std::string input = data_file("three_state.json");
    const RunResult design = run_cli("design " + input, "design_nominal");
    CHECK(design.exit_code == 0);
    CHECK(contains(design.out, "0.882432"));

    const std::string sol = temp_dir() + "/wc_solution.json";
    const RunResult worst = run_cli(
        "design " + input + " --criterion worst --out " + sol, "design_worst");
    CHECK(worst.exit_code == 0);

    const RunResult verify = run_cli("verify " + input + " " + sol, "verify_ok");
    CHECK(verify.exit_code == 0);
    CHECK(contains(verify.out, "PASS"));

    SolutionFile tampered = load_solution(sol);
    CMat m = tampered.povm[0].mat();
    m.at(0, 0) += 0.01;
    tampered.povm[0] = HermitianOperator(m);
    const std::string bad_sol = temp_dir() + "/wc_tampered.json";
    save_solution(tampered, bad_sol);
    const RunResult reject =
        run_cli("verify " + input + " " + bad_sol, "verify_reject");
    CHECK(reject.exit_code == 1);
    CHECK(contains(reject.out, "FAIL"));

    const DensityOperator e0 = DensityOperator::pure({1.0, 0.0});
    const DensityOperator e1 = DensityOperator::pure({0.0, 1.0});
    const std::string qubit = temp_dir() + "/qubit.json";
    save_ensemble(UncertainEnsemble({e0, e1}, {0.6, 0.4}, {0.9, 0.9}), qubit);
    const RunResult mismatch =
        run_cli("verify " + qubit + " " + sol, "verify_mismatch");
    CHECK(mismatch.exit_code == 2);
}

TEST_CASE("cli reports input and convergence failures by exit code") {
    const std::string input = data_file("three_state.json");

    const RunResult unreachable =
        run_cli("design " + input + " --tol 1e-30", "design_unreachable");
    CHECK(unreachable.exit_code == 3);

    const std::string garbage = temp_dir() + "/garbage.json";
    write_text_file(garbage, "{{{{");
    CHECK(run_cli("design " + garbage, "design_garbage").exit_code == 2);
    CHECK(run_cli("design /no/such/file.json", "design_missing").exit_code == 2);
    CHECK(run_cli("design " + input + " --criterion bogus", "design_bogus")
              .exit_code == 2);
    CHECK(run_cli("", "no_subcommand").exit_code == 2);
    CHECK(run_cli("--help", "help").exit_code == 0);
}

TEST_CASE("cli sweep emits deterministic csv") {
    const std::string input = data_file("three_state.json");
    const std::string out1 = temp_dir() + "/sweep1.csv";
    const std::string out2 = temp_dir() + "/sweep2.csv";
    CHECK(run_cli("sweep " + input + " --q-from 0.7 --q-to 0.7 --out " + out1,
                  "sweep1")
              .exit_code == 0);
    CHECK(run_cli("sweep " + input + " --q-from 0.7 --q-to 0.7 --out " + out2,
                  "sweep2")
              .exit_code == 0);
    const std::string csv1 = read_text_file(out1);
    CHECK(csv1 == read_text_file(out2));
    CHECK(count_char(csv1, '\n') == 2);
    CHECK(contains(csv1, "q,pd_nom_nominal"));
}

TEST_CASE("cli monte carlo agrees with the analytic average") {
    const std::string input = data_file("three_state.json");
    const RunResult mc =
        run_cli("mc " + input + " --samples 200 --seed 7", "mc_small");
    CHECK(mc.exit_code == 0);
    CHECK(contains(mc.out, "mc mean"));
}
