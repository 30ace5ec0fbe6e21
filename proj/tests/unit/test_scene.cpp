#include "anigreen/error.hpp"
#include "anigreen/scene.hpp"

#include <gtest/gtest.h>

using namespace anigreen;
using nlohmann::json;

namespace {

const char* kMinimal2d = R"({
  "dim": 2,
  "source_cage": {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]]},
  "matrix": {"theta": "pi/6", "lambdas": [1.0, 4.0]},
  "object": {"vertices": [[0.5, 0.5], [0.25, 0.75]]}
})";

ErrorCode code_of(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_scene_text(text);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(ParseAngle, SymbolicForms) {
  EXPECT_DOUBLE_EQ(parse_angle(json("pi/6")), kPi / 6);
  EXPECT_DOUBLE_EQ(parse_angle(json("-2*pi/3")), -2 * kPi / 3);
  EXPECT_DOUBLE_EQ(parse_angle(json("0.25pi")), 0.25 * kPi);
  EXPECT_DOUBLE_EQ(parse_angle(json("pi")), kPi);
  EXPECT_DOUBLE_EQ(parse_angle(json(0.5)), 0.5);
  EXPECT_THROW(parse_angle(json("tau/2")), Error);
}

TEST(Scene, Minimal2d) {
  Scene s = parse_scene_text(kMinimal2d);
  ASSERT_EQ(s.dim(), 2);
  const auto& d = std::get<SceneData<2>>(s.data);
  EXPECT_LT((d.matrix.entries() - build_2d({kPi / 6, 1.0, 4.0}).entries()).norm(), 1e-15);
  EXPECT_EQ(d.object_vertices.size(), 2u);
  EXPECT_EQ(d.interior_eps, -1.0);
  EXPECT_TRUE(d.use_scale);
  EXPECT_FALSE(d.target.has_value());
  EXPECT_FALSE(d.variational.has_value());
}

TEST(Scene, ClockwiseCageNamesTheField) {
  json j = json::parse(kMinimal2d);
  j["source_cage"]["vertices"] = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};
  std::string msg;
  EXPECT_EQ(code_of(j.dump(), &msg), ErrorCode::WrongOrientation);
  EXPECT_NE(msg.find("source_cage"), std::string::npos);
}

TEST(Scene, SyntaxErrorReportsLine) {
  std::string msg;
  EXPECT_EQ(code_of("{\n  \"dim\": 2,\n  oops\n}", &msg), ErrorCode::ParseError);
  EXPECT_NE(msg.find("line 3"), std::string::npos);
}

TEST(Scene, BadMatrix) {
  json j = json::parse(kMinimal2d);
  j["matrix"]["lambdas"] = {0.0, 1.0};
  EXPECT_EQ(code_of(j.dump()), ErrorCode::NonPositiveEigenvalue);
  j["matrix"] = {{"entries", {{1, 2}, {2, 1}}}};
  EXPECT_EQ(code_of(j.dump()), ErrorCode::NotPositiveDefinite);
}

TEST(Scene, MissingFieldsAndBadTypes) {
  json j = json::parse(kMinimal2d);
  j.erase("source_cage");
  EXPECT_EQ(code_of(j.dump()), ErrorCode::ParseError);
  j = json::parse(kMinimal2d);
  j["dim"] = 4;
  EXPECT_EQ(code_of(j.dump()), ErrorCode::ParseError);
  j = json::parse(kMinimal2d);
  j["use_scale"] = "yes";
  EXPECT_EQ(code_of(j.dump()), ErrorCode::ParseError);
}

TEST(Scene, TargetVertexCountMismatch) {
  json j = json::parse(kMinimal2d);
  j["target_cage"] = {{"vertices", {{0, 0}, {1, 0}, {1, 1}}}};
  EXPECT_EQ(code_of(j.dump()), ErrorCode::ConnectivityMismatch);
}

TEST(Scene, GridKeepsInteriorLatticePoints) {
  json j = json::parse(kMinimal2d);
  j["object"] = {{"grid", {{"nx", 5}, {"ny", 5}, {"bbox", {0, 0, 1, 1}}}}};
  const auto& d = std::get<SceneData<2>>(parse_scene_text(j.dump()).data);
  EXPECT_EQ(d.object_vertices.size(), 9u);
}

TEST(Scene, RoundTrip) {
  for (const char* name : {"square_2d.json", "cube_3d.json"}) {
    Scene a = parse_scene(std::string(ANIGREEN_TEST_DATA) + "/" + name);
    json ja = scene_to_json(a);
    Scene b = parse_scene_json(ja);
    EXPECT_EQ(scene_to_json(b), ja) << name;
    EXPECT_EQ(a.dim(), b.dim());
  }
}

TEST(Scene, VariationalBlock) {
  Scene s = parse_scene(std::string(ANIGREEN_TEST_DATA) + "/square_2d.json");
  const auto& d = std::get<SceneData<2>>(s.data);
  ASSERT_TRUE(d.variational.has_value());
  EXPECT_EQ(d.variational->constraints.size(), 2u);
  EXPECT_EQ(d.variational->weights.lambda1, 100.0);
  EXPECT_EQ(d.variational->weights.lambda2, 10.0);
  EXPECT_EQ(d.variational->weights.lambda3, 0.1);
  EXPECT_EQ(d.variational->hessian_per_face, 10);
  VariationalProblem<2> p = d.variational_problem();
  EXPECT_EQ(p.hessian_points.size(), 80u);
}

TEST(Scene, ObjCageIn3d) {
  Scene s = parse_scene(std::string(ANIGREEN_TEST_DATA) + "/cube_3d.json");
  const auto& d = std::get<SceneData<3>>(s.data);
  EXPECT_EQ(d.source.num_faces(), 12u);
  EXPECT_NEAR(d.source.signed_measure(), 8.0, 1e-12);
  EXPECT_EQ(d.object_faces.size(), 2u);
}

TEST(Scene, FlatPointsRoundTrip) {
  PointList<3> p = {{1, 2, 3}, {-0.5, 1e-300, 7}};
  EXPECT_EQ(points_from_flat_json<3>(points_to_flat_json<3>(p), "x"), p);
  EXPECT_THROW(points_from_flat_json<3>(json::array({1, 2}), "x"), Error);
}
