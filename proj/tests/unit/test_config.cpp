#include <gtest/gtest.h>

#include <sstream>

#include "dcmin/config.hpp"
#include "dcmin/errors.hpp"

namespace dcmin {
namespace {

ExperimentConfig parse(const std::string& text, std::optional<Preset> preset = {}) {
    std::istringstream in(text);
    return parse_config(in, preset);
}

TEST(ParseEnums, CaseInsensitive) {
    EXPECT_EQ(parse_problem("mdm"), Problem::MDM);
    EXPECT_EQ(parse_preset("FULL"), Preset::Full);
    EXPECT_EQ(parse_variant("s2"), StateVariant::S2);
    EXPECT_EQ(parse_controller("Heuristic"), ControllerKind::Heuristic);
    EXPECT_THROW(parse_problem("xyz"), ConfigError);
    EXPECT_THROW(parse_variant("S5"), ConfigError);
}

TEST(Curve, ParseAndFormat) {
    const Curve c = parse_curve("0:340, 1:400");
    EXPECT_DOUBLE_EQ(c(0.5), 370.0);
    EXPECT_EQ(format_curve(c), "0:340,1:400");
    EXPECT_THROW(parse_curve("0:340"), ConfigError);
    EXPECT_THROW(parse_curve("0-340,1:400"), ConfigError);
}

TEST(ExperimentConfig, Defaults) {
    const auto c = parse("");
    EXPECT_EQ(c.preset, Preset::Desk);
    EXPECT_EQ(c.grid.soc.count, 21);
    EXPECT_EQ(c.effective_variant(), StateVariant::S3);
    EXPECT_EQ(c.cost_kind(), CostKind::c1());
    EXPECT_EQ(c.n_train, 10);
    EXPECT_EQ(c.n_test, 4);

    const auto full = ExperimentConfig::for_preset(Preset::Full);
    EXPECT_EQ(full.grid.soc.count, 101);
    EXPECT_EQ(full.n_train, 300);
    EXPECT_EQ(full.n_test, 100);
}

TEST(ExperimentConfig, ProblemSelectsCostAndVariant) {
    auto c = parse("[experiment]\nproblem = ddm\n");
    EXPECT_EQ(c.effective_variant(), StateVariant::S4);
    EXPECT_EQ(c.cost_kind(), CostKind::c2(0.5));
    EXPECT_EQ(c.peak_reset(), PeakResetMode::Daily);
    c = parse("[experiment]\nproblem = mdm\n[tariff]\nmu_monthly = 12\n");
    EXPECT_EQ(c.cost_kind(), CostKind::c3(12.0));
    EXPECT_EQ(c.peak_reset(), PeakResetMode::Monthly);
}

TEST(ParseConfig, OverridesKeys) {
    const auto c = parse(
        "[paths]\ndata_dir = /tmp/d\n"
        "[experiment]\nseed = 99\nvariant = s1\nfallback = heuristic\nrecouple = true\n"
        "[grid]\nsoc_step = 0.1\naction_min = -10\naction_max = 10\naction_step = 2.5\n"
        "[tariff]\non_peak = 07:00-08:00\nsell = 0.05\n"
        "[battery]\ncapacity_kwh = 13.5\nrho_d = 0.9\n"
        "[synth]\nnoise_kw = 0\n");
    EXPECT_EQ(c.paths.data_dir, "/tmp/d");
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.effective_variant(), StateVariant::S1);
    EXPECT_EQ(c.fallback, ControllerKind::Heuristic);
    EXPECT_TRUE(c.recouple);
    EXPECT_EQ(c.grid.soc.count, 11);
    EXPECT_EQ(c.grid.action.count, 9);
    EXPECT_EQ(c.tariff.on_peak.size(), 1u);
    EXPECT_EQ(c.tariff.sell, 0.05);
    EXPECT_EQ(c.battery.capacity_kwh, 13.5);
    EXPECT_EQ(c.battery.q_nominal, nominal_charge(13.5, c.battery.u_ocv));
    EXPECT_EQ(c.battery.rho_d, 0.9);
    EXPECT_EQ(c.synth.noise_kw, 0.0);
}

TEST(ParseConfig, PresetOverride) {
    const auto c = parse("[experiment]\npreset = desk\n", Preset::Full);
    EXPECT_EQ(c.preset, Preset::Full);
    EXPECT_EQ(c.grid.soc.count, 101);
    EXPECT_EQ(parse("[experiment]\npreset = full\n").grid.peak.count, 101);
}

TEST(ParseConfig, Errors) {
    EXPECT_THROW(parse("[experiment]\nbogus = 1\n"), ConfigError);
    EXPECT_THROW(parse("[nosuch]\nx = 1\n"), ConfigError);
    EXPECT_THROW(parse("[experiment]\nseed = abc\n"), ConfigError);
    EXPECT_THROW(parse("[experiment]\nn_train = 0\n"), ConfigError);
    EXPECT_THROW(parse("[experiment]\nproblem = ddm\nvariant = s3\n"), ConfigError);
    EXPECT_THROW(parse("[grid]\nsoc_step = 0.3\n"), ConfigError);
    EXPECT_THROW(parse("[battery]\nrho_d = 1.5\n"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/dcmin.ini"), ConfigError);
}

TEST(WriteConfig, RoundTrip) {
    auto c = parse("[experiment]\nproblem = mdm\nbp_len = 7\n[tariff]\nfees = 2.5\n");
    std::ostringstream first;
    write_config(first, c);
    const auto back = parse(first.str());
    std::ostringstream second;
    write_config(second, back);
    EXPECT_EQ(first.str(), second.str());
    EXPECT_EQ(back.bp_length, 7);
    EXPECT_EQ(back.problem, Problem::MDM);
    EXPECT_EQ(back.tariff.fees, 2.5);
}

}  // namespace
}  // namespace dcmin
