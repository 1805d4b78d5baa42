#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "vmfe/errors.hpp"
#include "vmfe/io.hpp"

using namespace vmfe;
using nlohmann::json;

namespace {

VmfEllipticalParams example_params() {
    Eigen::Matrix3d lambda;
    lambda << 1.0 / 3.0, 0, 0, 0.1, 2.0, 0, -0.7, 1e-17, 0.9;
    return VmfEllipticalParams(Eigen::Vector3d(0.1, -2.0 / 7.0, 1e300), lambda,
                               VmfParams(UnitVector(Eigen::Vector3d(1.0, 2.0, 2.0) / 3.0), std::sqrt(2.0)),
                               GeneratorKind::Cauchy);
}

std::filesystem::path temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "vmfe_test_io";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string parse_error_of(const json& doc) {
    try {
        io::params_from_json(doc);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(FormatDouble, ShortestRoundTrip) {
    EXPECT_EQ(io::format_double(0.1), "0.1");
    EXPECT_EQ(io::format_double(2.0), "2");
    EXPECT_EQ(io::format_double(std::numeric_limits<double>::infinity()), "inf");
    EXPECT_EQ(io::format_double(-std::numeric_limits<double>::infinity()), "-inf");
    EXPECT_EQ(io::format_double(std::nan("")), "nan");
    RandomSource rng(1);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.normal() * std::pow(10.0, 40.0 * rng.uniform() - 20.0);
        EXPECT_EQ(io::parse_double(io::format_double(x), "x"), x);
    }
}

TEST(ParseDouble, RejectsJunk) {
    EXPECT_THROW(io::parse_double("1.5x", "cell"), ParseError);
    EXPECT_THROW(io::parse_double("", "cell"), ParseError);
    EXPECT_THROW(io::parse_double("abc", "cell"), ParseError);
    EXPECT_DOUBLE_EQ(io::parse_double(" 2.5 ", "cell"), 2.5);
    EXPECT_DOUBLE_EQ(io::parse_double("+1e3", "cell"), 1000.0);
}

TEST(ParamsDocument, RoundTripIsExact) {
    const VmfEllipticalParams p = example_params();
    const json doc = io::params_to_json(p);
    EXPECT_EQ(doc["lambda"][0].size(), 1u);
    EXPECT_EQ(doc["lambda"][2].size(), 3u);
    const VmfEllipticalParams back = io::params_from_json(json::parse(doc.dump()));
    EXPECT_EQ(back.mu(), p.mu());
    EXPECT_EQ(back.lambda(), p.lambda());
    EXPECT_EQ(back.vmf().mu_v().coords(), p.vmf().mu_v().coords());
    EXPECT_EQ(back.vmf().tau(), p.vmf().tau());
    EXPECT_EQ(back.generator_kind(), GeneratorKind::Cauchy);

    const auto path = temp_path("params.json");
    io::write_params(path, p);
    EXPECT_EQ(io::read_params(path).lambda(), p.lambda());
}

TEST(ParamsDocument, AcceptsFullLowerTriangularRows) {
    json doc = io::params_to_json(example_params());
    doc["lambda"] = json::array({json::array({1.0, 0.0, 0.0}), json::array({0.5, 2.0, 0.0}), json::array({0.1, 0.2, 3.0})});
    EXPECT_DOUBLE_EQ(io::params_from_json(doc).lambda()(2, 1), 0.2);
}

TEST(ParamsDocument, ErrorsNameTheField) {
    const json good = io::params_to_json(example_params());
    json doc = good;
    doc.erase("tau");
    EXPECT_NE(parse_error_of(doc).find("tau"), std::string::npos);

    doc = good;
    doc["lambda"][1][0] = "x";
    EXPECT_NE(parse_error_of(doc).find("lambda[1][0]"), std::string::npos);

    doc = good;
    doc["lambda"] = json::array({json::array({1.0, 0.5, 0.0}), json::array({0.0, 1.0, 0.0}), json::array({0.0, 0.0, 1.0})});
    EXPECT_NE(parse_error_of(doc).find("lambda[0][1]"), std::string::npos);

    doc = good;
    doc["mu"] = json::array({1.0, 2.0});
    EXPECT_NE(parse_error_of(doc).find("mu"), std::string::npos);

    doc = good;
    doc["mu_v"] = json::array({1.0, 1.0, 0.0});
    EXPECT_NE(parse_error_of(doc).find("mu_v"), std::string::npos);

    doc = good;
    doc["tau"] = -1.0;
    EXPECT_NE(parse_error_of(doc).find("tau"), std::string::npos);

    doc = good;
    doc["lambda"][1][1] = -2.0;
    EXPECT_NE(parse_error_of(doc).find("lambda"), std::string::npos);

    doc = good;
    doc["generator"] = "laplace";
    EXPECT_NE(parse_error_of(doc).find("generator"), std::string::npos);
}

TEST(ReadParams, MissingFileIsIoError) {
    EXPECT_THROW(io::read_params(temp_path("does_not_exist.json")), IoError);
    const auto path = temp_path("broken.json");
    std::ofstream(path) << "{not json";
    EXPECT_THROW(io::read_params(path), ParseError);
}

TEST(Samples, RoundTripIsExact) {
    RandomSource rng(2);
    const SampleMatrix s = sample(example_params().with_location(Eigen::Vector3d::Zero()), 100, rng);
    std::stringstream buf;
    io::write_samples(buf, s);
    EXPECT_EQ(buf.str().substr(0, 9), "x1,x2,x3\n");
    const SampleMatrix back = io::read_samples(buf);
    EXPECT_EQ(back.matrix(), s.matrix());
}

TEST(Samples, HeaderOnlyIsEmpty) {
    std::istringstream in("x1,x2\n");
    const SampleMatrix s = io::read_samples(in);
    EXPECT_EQ(s.size(), 0);
    EXPECT_EQ(s.dim(), 2);
}

TEST(Samples, ToleratesCrlfAndBlankLines) {
    std::istringstream in("x1,x2\r\n1,2\r\n\r\n3,4\r\n");
    const SampleMatrix s = io::read_samples(in);
    ASSERT_EQ(s.size(), 2);
    EXPECT_EQ(s.matrix()(1, 0), 3.0);
}

TEST(Samples, ErrorsCarryLineNumbers) {
    auto message = [](const std::string& text) {
        std::istringstream in(text);
        try {
            io::read_samples(in);
        } catch (const ParseError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message("x1,x2\n1,2\n3\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("x1,x2\n1,2\n3,4,5\n").find("line 3"), std::string::npos);
    EXPECT_NE(message("x1,x2\n1,oops\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("x1,x2\n1,inf\n").find("line 2"), std::string::npos);
    EXPECT_NE(message("a,b\n1,2\n").find("line 1"), std::string::npos);
    EXPECT_NE(message("").find("header"), std::string::npos);
}

TEST(Report, ContainsTraceAndSummary) {
    RandomSource rng(3);
    const VmfEllipticalParams p = example_params().with_location(Eigen::Vector3d::Zero());
    const SampleMatrix s = sample(p, 200, rng);
    FitConfig config;
    config.max_iters = 20;
    const FitReport report = fit(s, GeneratorKind::Cauchy, config, rng);
    const json doc = io::report_to_json(report, config, "trace.csv");
    EXPECT_EQ(doc["iters"].get<int>(), report.iters);
    EXPECT_EQ(doc["final_loglik"].get<double>(), report.final_loglik());
    EXPECT_EQ(doc["trace"].get<std::string>(), "trace.csv");
    EXPECT_EQ(doc["method"].get<std::string>(), "gd");

    std::ostringstream out;
    io::write_trace(out, report);
    std::istringstream lines(out.str());
    std::string line;
    int count = -1;
    while (std::getline(lines, line)) ++count;
    EXPECT_EQ(count, static_cast<int>(report.loglik_trace.size()));
}

TEST(ExperimentSpecJson, RoundTripAndOverrides) {
    ExperimentSpec spec;
    spec.dims = {3, 5};
    spec.generators = {GeneratorKind::Cauchy};
    spec.seed = 123456789012345ull;
    spec.method = FitMethod::GradientDescent;
    const ExperimentSpec back = io::spec_from_json(json::parse(io::spec_to_json(spec).dump()));
    EXPECT_EQ(back.dims, spec.dims);
    EXPECT_EQ(back.taus, spec.taus);
    EXPECT_EQ(back.generators, spec.generators);
    EXPECT_EQ(back.seed, spec.seed);
    EXPECT_EQ(back.method, spec.method);

    const ExperimentSpec partial = io::spec_from_json(json::parse(R"({"trials": 3})"));
    EXPECT_EQ(partial.trials, 3);
    EXPECT_EQ(partial.dims, ExperimentSpec{}.dims);
}

TEST(ExperimentSpecJson, Errors) {
    EXPECT_THROW(io::spec_from_json(json::parse(R"({"trails": 3})")), ParseError);
    EXPECT_THROW(io::spec_from_json(json::parse(R"({"dims": [2, "x"]})")), ParseError);
    EXPECT_THROW(io::spec_from_json(json::parse(R"({"taus": [-1]})")), ParseError);
    EXPECT_THROW(io::spec_from_json(json::parse(R"({"generators": ["laplace"]})")), ParseError);
}

TEST(OpenOutput, UnwritablePathIsIoError) {
    EXPECT_THROW(io::open_output("/nonexistent_dir_vmfe/x.csv"), IoError);
}
