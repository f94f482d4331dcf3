#include "qdetect/ensemble_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace qdetect {
namespace {

using nlohmann::json;

CMat matrix_from_json(const json& jm, int dim, const std::string& where) {
    if (!jm.is_array() || static_cast<int>(jm.size()) != dim)
        throw ParseError(where + " must be an array of " + std::to_string(dim) +
                         " rows");
    CMat m(dim);
    for (int i = 0; i < dim; ++i) {
        const json& row = jm[i];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            throw ParseError(where + "[" + std::to_string(i) + "] must have " +
                             std::to_string(dim) + " entries");
        for (int j = 0; j < dim; ++j) {
            const json& e = row[j];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
                !e[1].is_number())
                throw ParseError(where + "[" + std::to_string(i) + "][" +
                                 std::to_string(j) +
                                 "] must be a [re, im] number pair");
            m.at(i, j) = cdouble(e[0].get<double>(), e[1].get<double>());
        }
    }
    return m;
}

HermitianOperator hermitian_from_json(const json& jm, int dim,
                                      const std::string& where) {
    const CMat m = matrix_from_json(jm, dim, where);
    try {
        return HermitianOperator(m, 1e-9);
    } catch (const ValidationError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

json matrix_to_json(const CMat& m) {
    json rows = json::array();
    for (int i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.dim(); ++j)
            row.push_back({m.at(i, j).real(), m.at(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

double number_field(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ParseError(where + "." + key + " must be a number");
    return obj[key].get<double>();
}

void append_csv_number(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

}  // namespace

Criterion criterion_from_name(const std::string& name) {
    if (name == "nominal") return Criterion::NOMINAL;
    if (name == "worst") return Criterion::WORST;
    if (name == "average") return Criterion::AVERAGE;
    throw ParseError("unknown criterion \"" + name +
                     "\" (expected nominal, worst or average)");
}

const char* criterion_name(Criterion c) {
    switch (c) {
        case Criterion::NOMINAL: return "nominal";
        case Criterion::WORST: return "worst";
        case Criterion::AVERAGE: return "average";
    }
    return "nominal";
}

UncertainEnsemble parse_ensemble(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw ParseError("document must be a JSON object");
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() ||
        doc["dim"].get<int>() < 1)
        throw ParseError("dim must be a positive integer");
    const int dim = doc["dim"].get<int>();
    if (!doc.contains("states") || !doc["states"].is_array() ||
        doc["states"].empty())
        throw ParseError("states must be a non-empty array");

    std::vector<DensityOperator> states;
    std::vector<double> priors, bounds;
    for (std::size_t i = 0; i < doc["states"].size(); ++i) {
        const std::string where = "states[" + std::to_string(i) + "]";
        const json& s = doc["states"][i];
        if (!s.is_object()) throw ParseError(where + " must be an object");
        if (!s.contains("matrix"))
            throw ParseError(where + ".matrix is missing");
        HermitianOperator op =
            hermitian_from_json(s["matrix"], dim, where + ".matrix");
        try {
            states.emplace_back(std::move(op));
        } catch (const ValidationError& e) {
            throw ParseError(where + ".matrix: " + e.what());
        }
        priors.push_back(number_field(s, "prior", where));
        bounds.push_back(number_field(s, "q", where));
    }
    return UncertainEnsemble(std::move(states), std::move(priors),
                             std::move(bounds));
}

std::string format_ensemble(const UncertainEnsemble& ensemble) {
    json doc;
    doc["dim"] = ensemble.dim();
    json states = json::array();
    for (int i = 0; i < ensemble.size(); ++i) {
        json s;
        s["matrix"] = matrix_to_json(ensemble.states()[i].mat());
        s["prior"] = ensemble.priors()[i];
        s["q"] = ensemble.bounds()[i];
        states.push_back(std::move(s));
    }
    doc["states"] = std::move(states);
    return doc.dump(2) + "\n";
}

UncertainEnsemble load_ensemble(const std::string& path) {
    return parse_ensemble(read_text_file(path));
}

void save_ensemble(const UncertainEnsemble& ensemble, const std::string& path) {
    write_text_file(path, format_ensemble(ensemble));
}

std::string format_solution(const SolutionFile& solution) {
    json doc;
    doc["criterion"] = criterion_name(solution.criterion);
    doc["dim"] = solution.dim;
    doc["value"] = solution.value;
    doc["gap"] = solution.gap;
    doc["iterations"] = solution.iterations;
    doc["converged"] = solution.converged;
    json povm = json::array();
    for (const auto& op : solution.povm) povm.push_back(matrix_to_json(op.mat()));
    doc["povm"] = std::move(povm);
    if (solution.dual) doc["dual"] = matrix_to_json(solution.dual->mat());
    if (!solution.bounds.empty()) doc["lambda"] = solution.bounds;
    if (solution.regime)
        doc["regime"] =
            *solution.regime == Regime::EFFECTIVE ? "effective" : "guess";
    return doc.dump(2) + "\n";
}

SolutionFile parse_solution(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw ParseError("document must be a JSON object");
    SolutionFile out;
    if (!doc.contains("criterion") || !doc["criterion"].is_string())
        throw ParseError("criterion must be a string");
    out.criterion = criterion_from_name(doc["criterion"].get<std::string>());
    if (!doc.contains("dim") || !doc["dim"].is_number_integer() ||
        doc["dim"].get<int>() < 1)
        throw ParseError("dim must be a positive integer");
    out.dim = doc["dim"].get<int>();
    out.value = number_field(doc, "value", "solution");
    out.gap = number_field(doc, "gap", "solution");
    if (!doc.contains("iterations") || !doc["iterations"].is_number_integer())
        throw ParseError("solution.iterations must be an integer");
    out.iterations = doc["iterations"].get<int>();
    if (!doc.contains("converged") || !doc["converged"].is_boolean())
        throw ParseError("solution.converged must be a boolean");
    out.converged = doc["converged"].get<bool>();

    if (!doc.contains("povm") || !doc["povm"].is_array() || doc["povm"].empty())
        throw ParseError("povm must be a non-empty array");
    for (std::size_t i = 0; i < doc["povm"].size(); ++i)
        out.povm.push_back(hermitian_from_json(
            doc["povm"][i], out.dim, "povm[" + std::to_string(i) + "]"));
    if (!doc.contains("dual"))
        throw ParseError("dual witness is missing");
    out.dual = hermitian_from_json(doc["dual"], out.dim, "dual");

    if (out.criterion == Criterion::WORST) {
        if (!doc.contains("lambda") || !doc["lambda"].is_array() ||
            doc["lambda"].size() != doc["povm"].size())
            throw ParseError("lambda must be an array matching the povm");
        for (const auto& v : doc["lambda"]) {
            if (!v.is_number()) throw ParseError("lambda entries must be numbers");
            out.bounds.push_back(v.get<double>());
        }
        if (!doc.contains("regime") || !doc["regime"].is_string())
            throw ParseError("regime must be a string");
        const std::string r = doc["regime"].get<std::string>();
        if (r == "effective") out.regime = Regime::EFFECTIVE;
        else if (r == "guess") out.regime = Regime::GUESS;
        else throw ParseError("unknown regime \"" + r + "\"");
    }
    return out;
}

SolutionFile load_solution(const std::string& path) {
    return parse_solution(read_text_file(path));
}

void save_solution(const SolutionFile& solution, const std::string& path) {
    write_text_file(path, format_solution(solution));
}

std::string sweep_to_csv(const std::vector<SweepRecord>& records) {
    std::string out =
        "q,pd_nom_nominal,pd_nom_wc,pd_nom_bc,pd_nom_mm"
        ",pd_wc_nominal,pd_wc_wc,pd_wc_bc,pd_wc_mm"
        ",pd_avg_nominal,pd_avg_wc,pd_avg_bc,pd_avg_mm"
        ",dist_wc_nom,dist_avg_nom,diff_wc,diff_avg,status\n";
    for (const auto& r : records) {
        append_csv_number(out, r.q);
        for (const RealizedValues* v : {&r.nom, &r.wc, &r.avg}) {
            out += ',';
            append_csv_number(out, v->nominal);
            out += ',';
            append_csv_number(out, v->adversarial);
            out += ',';
            append_csv_number(out, v->best);
            out += ',';
            append_csv_number(out, v->maximally_mixed);
        }
        for (double v : {r.dist_wc_nom, r.dist_avg_nom, r.diff_wc, r.diff_avg}) {
            out += ',';
            append_csv_number(out, v);
        }
        out += ',';
        for (char c : r.status) out += (c == ',' || c == '\n') ? ';' : c;
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw ParseError("cannot read file: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw Error("cannot open file for writing: " + path);
    outf << text;
    outf.flush();
    if (!outf) throw Error("cannot write file: " + path);
}

}  // namespace qdetect
