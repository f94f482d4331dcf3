#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qdetect/scenario.hpp"

namespace qdetect {

enum class Criterion { NOMINAL, WORST, AVERAGE };

Criterion criterion_from_name(const std::string& name);
const char* criterion_name(Criterion c);

// Ensemble document: {"dim": n, "states": [{"matrix": [[[re, im], ...]],
// "prior": p, "q": q}, ...]}. Complex entries are [re, im] pairs; matrices
// are checked for Hermiticity at parse time with atol 1e-9. Parse failures
// carry the offending field in the message.
UncertainEnsemble parse_ensemble(const std::string& text);
std::string format_ensemble(const UncertainEnsemble& ensemble);
UncertainEnsemble load_ensemble(const std::string& path);
void save_ensemble(const UncertainEnsemble& ensemble, const std::string& path);

// Design output in verifiable form: the measurement, the dual witness and,
// for the worst-case criterion, the bound variables and regime.
struct SolutionFile {
    Criterion criterion = Criterion::NOMINAL;
    int dim = 0;
    double value = 0;
    double gap = 0;
    int iterations = 0;
    bool converged = false;
    std::vector<HermitianOperator> povm;
    std::optional<HermitianOperator> dual;
    std::vector<double> bounds;
    std::optional<Regime> regime;
};

std::string format_solution(const SolutionFile& solution);
SolutionFile parse_solution(const std::string& text);
SolutionFile load_solution(const std::string& path);
void save_solution(const SolutionFile& solution, const std::string& path);

// One CSV line per sweep record, ordered as produced, 12 significant digits,
// byte-deterministic for identical inputs.
std::string sweep_to_csv(const std::vector<SweepRecord>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace qdetect
