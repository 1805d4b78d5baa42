#include "vmfe/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "vmfe/errors.hpp"

namespace vmfe::io {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, std::string_view what) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size()) {
        throw ParseError(std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    return value;
}

namespace {

const json& field(const json& doc, const std::string& key) {
    if (!doc.contains(key)) throw ParseError("missing field '" + key + "'");
    return doc.at(key);
}

double number_at(const json& node, const std::string& path) {
    if (!node.is_number()) throw ParseError(path + ": expected a number");
    return node.get<double>();
}

Eigen::VectorXd vector_at(const json& node, const std::string& path, int m) {
    if (!node.is_array()) throw ParseError(path + ": expected an array");
    if (static_cast<int>(node.size()) != m) {
        throw ParseError(path + ": expected " + std::to_string(m) + " entries, found " + std::to_string(node.size()));
    }
    Eigen::VectorXd v(m);
    for (int i = 0; i < m; ++i) v[i] = number_at(node[static_cast<std::size_t>(i)], path + "[" + std::to_string(i) + "]");
    return v;
}

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

// Parameter errors are reported against the field that caused them.
template <class F>
auto with_path(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace

json params_to_json(const VmfEllipticalParams& params) {
    const int m = params.dim();
    json lambda = json::array();
    for (int i = 0; i < m; ++i) {
        json row = json::array();
        for (int j = 0; j <= i; ++j) row.push_back(params.lambda()(i, j));
        lambda.push_back(std::move(row));
    }
    json doc;
    doc["m"] = m;
    doc["generator"] = std::string(to_string(params.generator_kind()));
    doc["mu"] = vector_json(params.mu());
    doc["lambda"] = std::move(lambda);
    doc["mu_v"] = vector_json(params.vmf().mu_v().coords());
    doc["tau"] = params.vmf().tau();
    return doc;
}

VmfEllipticalParams params_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("parameters document must be a JSON object");
    const json& m_node = field(doc, "m");
    if (!m_node.is_number_integer() || m_node.get<long long>() < 1) throw ParseError("m: expected a positive integer");
    const int m = m_node.get<int>();

    const json& gen_node = field(doc, "generator");
    if (!gen_node.is_string()) throw ParseError("generator: expected a string");
    const GeneratorKind kind = with_path("generator", [&] { return parse_generator_kind(gen_node.get<std::string>()); });

    const Eigen::VectorXd mu = vector_at(field(doc, "mu"), "mu", m);

    const json& lambda_node = field(doc, "lambda");
    if (!lambda_node.is_array() || static_cast<int>(lambda_node.size()) != m) {
        throw ParseError("lambda: expected " + std::to_string(m) + " rows");
    }
    Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        const json& row = lambda_node[static_cast<std::size_t>(i)];
        const std::string row_path = "lambda[" + std::to_string(i) + "]";
        if (!row.is_array()) throw ParseError(row_path + ": expected an array");
        const int len = static_cast<int>(row.size());
        if (len != i + 1 && len != m) {
            throw ParseError(row_path + ": expected " + std::to_string(i + 1) + " (lower-triangular) or " +
                             std::to_string(m) + " entries, found " + std::to_string(len));
        }
        for (int j = 0; j < len; ++j) {
            const std::string path = row_path + "[" + std::to_string(j) + "]";
            const double value = number_at(row[static_cast<std::size_t>(j)], path);
            if (j > i) {
                if (value != 0.0) throw ParseError(path + ": lambda must be lower-triangular");
                continue;
            }
            lambda(i, j) = value;
        }
    }

    const Eigen::VectorXd mu_v = vector_at(field(doc, "mu_v"), "mu_v", m);
    const double tau = number_at(field(doc, "tau"), "tau");
    const UnitVector direction = with_path("mu_v", [&] { return UnitVector(mu_v); });
    const VmfParams vmf = with_path("tau", [&] { return VmfParams(direction, tau); });
    return with_path("lambda", [&] { return VmfEllipticalParams(mu, lambda, vmf, kind); });
}

VmfEllipticalParams read_params(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    try {
        return params_from_json(doc);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

namespace {

// 17 significant digits survive dump() unchanged; nlohmann prints the shortest round-trip form.
void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

void write_params(const std::filesystem::path& path, const VmfEllipticalParams& params) {
    write_json(path, params_to_json(params));
}

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    while (true) {
        const std::size_t comma = line.find(',');
        cells.push_back(line.substr(0, comma));
        if (comma == std::string_view::npos) return cells;
        line.remove_prefix(comma + 1);
    }
}

// Next non-blank line with any trailing CR removed; false at end of input.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

}  // namespace

SampleMatrix read_samples(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw ParseError("line 1: missing header");
    const std::vector<std::string_view> header = split_csv(line);
    const auto m = static_cast<Eigen::Index>(header.size());
    for (Eigen::Index j = 0; j < m; ++j) {
        if (header[static_cast<std::size_t>(j)] != "x" + std::to_string(j + 1)) {
            throw ParseError("line " + std::to_string(line_no) + ": expected header x1..x" + std::to_string(m));
        }
    }

    std::vector<double> values;
    Eigen::Index rows = 0;
    while (next_line(in, line, line_no)) {
        const std::vector<std::string_view> cells = split_csv(line);
        const std::string where = "line " + std::to_string(line_no);
        if (static_cast<Eigen::Index>(cells.size()) != m) {
            throw ParseError(where + ": expected " + std::to_string(m) + " fields, found " + std::to_string(cells.size()));
        }
        for (std::size_t j = 0; j < cells.size(); ++j) {
            const std::string what = where + ", column " + std::to_string(j + 1);
            const double value = parse_double(cells[j], what);
            if (!std::isfinite(value)) throw ParseError(what + ": value is not finite");
            values.push_back(value);
        }
        ++rows;
    }
    RowMatrix matrix(rows, m);
    std::copy(values.begin(), values.end(), matrix.data());
    return SampleMatrix(std::move(matrix));
}

SampleMatrix read_samples(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return read_samples(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_samples(std::ostream& out, const SampleMatrix& data) {
    const Eigen::Index m = data.dim();
    for (Eigen::Index j = 0; j < m; ++j) out << (j ? "," : "") << 'x' << j + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index j = 0; j < m; ++j) out << (j ? "," : "") << format_double(data.matrix()(i, j));
        out << '\n';
    }
}

void write_samples(const std::filesystem::path& path, const SampleMatrix& data) {
    std::ofstream out = open_output(path);
    write_samples(out, data);
    if (!out) throw IoError("failed writing " + path.string());
}

json report_to_json(const FitReport& report, const FitConfig& config, std::string_view trace_path) {
    json doc;
    doc["final_loglik"] = report.final_loglik();
    doc["initial_loglik"] = report.loglik_trace.front();
    doc["iters"] = report.iters;
    doc["converged"] = report.converged;
    doc["method"] = std::string(to_string(config.method));
    doc["init"] = std::string(to_string(config.init));
    doc["learning_rate"] = config.learning_rate;
    doc["max_iters"] = config.max_iters;
    doc["tol"] = config.tol;
    doc["warnings"] = report.warnings;
    doc["trace"] = std::string(trace_path);
    doc["params"] = params_to_json(report.params);
    return doc;
}

void write_trace(std::ostream& out, const FitReport& report) {
    out << "iter,loglik\n";
    for (std::size_t k = 0; k < report.loglik_trace.size(); ++k) {
        out << k << ',' << format_double(report.loglik_trace[k]) << '\n';
    }
}

ExperimentSpec spec_from_json(const json& doc) {
    if (!doc.is_object()) throw ParseError("experiment spec must be a JSON object");
    static const std::vector<std::string> known{"taus", "dims", "generators", "n_samples", "trials",
                                                "eccentricity_max", "seed", "method", "learning_rate",
                                                "max_iters", "tol", "init_from_truth"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) throw ParseError("unknown field '" + key + "'");
    }
    ExperimentSpec spec;
    auto list = [&](const char* key) -> const json& {
        const json& node = doc.at(key);
        if (!node.is_array()) throw ParseError(std::string(key) + ": expected an array");
        return node;
    };
    auto integer = [&](const json& node, const std::string& path) {
        if (!node.is_number_integer()) throw ParseError(path + ": expected an integer");
        return node.get<long long>();
    };
    if (doc.contains("taus")) {
        spec.taus.clear();
        const json& node = list("taus");
        for (std::size_t i = 0; i < node.size(); ++i) spec.taus.push_back(number_at(node[i], "taus[" + std::to_string(i) + "]"));
    }
    if (doc.contains("dims")) {
        spec.dims.clear();
        const json& node = list("dims");
        for (std::size_t i = 0; i < node.size(); ++i) {
            spec.dims.push_back(static_cast<int>(integer(node[i], "dims[" + std::to_string(i) + "]")));
        }
    }
    if (doc.contains("generators")) {
        spec.generators.clear();
        const json& node = list("generators");
        for (std::size_t i = 0; i < node.size(); ++i) {
            const std::string path = "generators[" + std::to_string(i) + "]";
            if (!node[i].is_string()) throw ParseError(path + ": expected a string");
            spec.generators.push_back(with_path(path, [&] { return parse_generator_kind(node[i].get<std::string>()); }));
        }
    }
    if (doc.contains("n_samples")) spec.n_samples = static_cast<int>(integer(doc.at("n_samples"), "n_samples"));
    if (doc.contains("trials")) spec.trials = static_cast<int>(integer(doc.at("trials"), "trials"));
    if (doc.contains("eccentricity_max")) spec.eccentricity_max = number_at(doc.at("eccentricity_max"), "eccentricity_max");
    if (doc.contains("seed")) {
        const json& node = doc.at("seed");
        if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<long long>() >= 0)) {
            throw ParseError("seed: expected a non-negative integer");
        }
        spec.seed = node.get<std::uint64_t>();
    }
    if (doc.contains("method")) {
        if (!doc.at("method").is_string()) throw ParseError("method: expected a string");
        spec.method = with_path("method", [&] { return parse_fit_method(doc.at("method").get<std::string>()); });
    }
    if (doc.contains("learning_rate")) spec.learning_rate = number_at(doc.at("learning_rate"), "learning_rate");
    if (doc.contains("max_iters")) spec.max_iters = static_cast<int>(integer(doc.at("max_iters"), "max_iters"));
    if (doc.contains("tol")) spec.tol = number_at(doc.at("tol"), "tol");
    if (doc.contains("init_from_truth")) {
        if (!doc.at("init_from_truth").is_boolean()) throw ParseError("init_from_truth: expected a boolean");
        spec.init_from_truth = doc.at("init_from_truth").get<bool>();
    }
    with_path("spec", [&] {
        spec.validate();
        return 0;
    });
    return spec;
}

json spec_to_json(const ExperimentSpec& spec) {
    json doc;
    doc["taus"] = spec.taus;
    doc["dims"] = spec.dims;
    json gens = json::array();
    for (GeneratorKind g : spec.generators) gens.push_back(std::string(to_string(g)));
    doc["generators"] = std::move(gens);
    doc["n_samples"] = spec.n_samples;
    doc["trials"] = spec.trials;
    doc["eccentricity_max"] = spec.eccentricity_max;
    doc["seed"] = spec.seed;
    doc["method"] = std::string(to_string(spec.method));
    doc["learning_rate"] = spec.learning_rate;
    doc["max_iters"] = spec.max_iters;
    doc["tol"] = spec.tol;
    doc["init_from_truth"] = spec.init_from_truth;
    return doc;
}

}  // namespace vmfe::io
