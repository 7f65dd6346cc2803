#include <gtest/gtest.h>

#include <sstream>

#include "dcmin/artifacts.hpp"
#include "dcmin/errors.hpp"

namespace dcmin {
namespace {

SparseQ sample_q() {
    SparseQ q(StateVariant::S4, 3, 2, 4);
    q.fold({0, 5}, 1, 1, 2, 0.1);
    q.fold({0, 5}, 1, 1, 2, 0.2);
    q.fold({7, 2}, 0, 0, 3, -1.0 / 3.0);
    return q;
}

TEST(GridSignature, DeskPreset) {
    EXPECT_EQ(grid_signature(StateGrid::desk()),
              "H144/dt600/soc0:0.05:21/delta-60:10:13/peak0:5:21/action-20:5:9");
}

TEST(QTable, RoundTripIsExact) {
    const auto q = sample_q();
    std::ostringstream out;
    write_q_table(out, q, {{"problem", "DDM"}});
    std::istringstream in(out.str());
    ArtifactMeta meta;
    const auto back = read_q_table(in, &meta);
    EXPECT_EQ(back, q);
    EXPECT_EQ(meta.at("problem"), "DDM");
    EXPECT_EQ(meta.at("variant"), "s4");
}

TEST(Policy, RoundTripIsExact) {
    Policy p(StateVariant::S3, 4, 1, ControllerKind::Heuristic);
    p.set({3, 1}, 2, 0, 6);
    p.set({140, 12}, 0, 0, 0);
    std::ostringstream out;
    write_policy(out, p, {{"seed", "4"}});
    std::istringstream in(out.str());
    ArtifactMeta meta;
    EXPECT_EQ(read_policy(in, &meta), p);
    EXPECT_EQ(meta.at("seed"), "4");
}

TEST(Artifacts, RejectsForeignFiles) {
    std::ostringstream out;
    write_q_table(out, sample_q(), {});
    std::string text = out.str();
    text.replace(text.find(" v1 "), 4, " v2 ");
    std::istringstream wrong_version(text);
    EXPECT_THROW(read_q_table(wrong_version), ArtifactMismatch);

    std::istringstream not_policy(out.str());
    EXPECT_THROW(read_policy(not_policy), ArtifactMismatch);

    std::istringstream garbage("hello\n");
    EXPECT_THROW(read_q_table(garbage), ArtifactMismatch);
}

TEST(Artifacts, RequireMeta) {
    const ArtifactMeta meta{{"problem", "DEM"}};
    EXPECT_NO_THROW(require_meta(meta, "problem", "DEM"));
    EXPECT_THROW(require_meta(meta, "problem", "MDM"), ArtifactMismatch);
    EXPECT_THROW(require_meta(meta, "grid", "x"), ArtifactMismatch);
}

}  // namespace
}  // namespace dcmin
