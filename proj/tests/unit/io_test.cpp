#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include "blendifs/config.hpp"
#include "blendifs/image.hpp"
#include "blendifs/report.hpp"
#include "test_systems.hpp"

namespace blendifs {
namespace {

using testing::kUnitBox;

std::string config_path(const std::string& name) { return std::string(BLENDIFS_CONFIG_DIR) + "/" + name; }

TEST(Config, BundledTwoSystemFile) {
  const auto cfg = load_config_file(config_path("sierpinski-maple.json"));
  EXPECT_EQ(cfg.resolution, 1024);
  ASSERT_TRUE(cfg.delta.has_value());
  EXPECT_EQ(*cfg.delta, 0.1);
  EXPECT_EQ(cfg.system_names(), (std::vector<std::string>{"sierpinski", "maple"}));
  const auto sys = cfg.blend_system();
  EXPECT_EQ(sys.lambda_script_r(), 0.8);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(cfg.systems[1].maps[j], testing::maple_maps()[j]);
}

TEST(Config, BundledThreeSystemFileReadsFractions) {
  const auto cfg = load_config_file(config_path("sierpinski-maple-r3.json"));
  ASSERT_EQ(cfg.systems.size(), 3U);
  for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(cfg.systems[2].maps[j], testing::r3_maps()[j]);
  EXPECT_NEAR(cfg.blend_system().system(3).lambda_r(), 0.5435, 1e-3);
}

TEST(Config, RejectsNonContractiveMapByName) {
  std::istringstream in(R"({"bbox":[0,0,1,1],"resolution":8,
    "systems":[{"name":"ok","maps":[{"a":0.5,"d":0.5}]},
               {"name":"big","maps":[{"a":0.5,"d":0.5},{"a":1.5,"d":0.5}]}]})");
  const auto cfg = load_config(in);
  try {
    cfg.blend_system();
    FAIL();
  } catch (const NotContractiveError& e) {
    EXPECT_EQ(e.index(), 1U);
    EXPECT_NE(std::string(e.what()).find("big"), std::string::npos) << e.what();
  }
}

TEST(Config, ParseErrors) {
  for (const char* text : {
           "[1,2]",
           "{",
           R"({"resolution":8,"systems":[]})",
           R"({"bbox":[0,0,1],"resolution":8,"systems":[{"maps":[]}]})",
           R"({"bbox":[1,0,0,1],"resolution":8,"systems":[{"maps":[]}]})",
           R"({"bbox":[0,0,1,1],"resolution":0,"systems":[{"maps":[]}]})",
           R"({"bbox":[0,0,1,1],"resolution":8,"systems":[{"maps":[{"a":"1/0"}]}]})",
           R"({"bbox":[0,0,1,1],"resolution":8,"systems":[{"maps":[{"a":"half"}]}]})",
           R"({"bbox":[0,0,1,1],"resolution":8,"systems":[{"name":"x","maps":[]},{"name":"x","maps":[]}]})",
       }) {
    std::istringstream in(text);
    try {
      load_config(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::ParseError) << text;
    }
  }
}

TEST(Render, RowZeroIsTheTop) {
  const Grid g(kUnitBox, 2);
  const auto s = DiscreteSet::from_cells(g, std::vector<CellIndex>{{0, 2}, {2, 0}});
  const auto img = render(s);
  ASSERT_EQ(img.width, 3);
  ASSERT_EQ(img.height, 3);
  const std::vector<std::uint8_t> expected{0, 255, 255, 255, 255, 255, 255, 255, 0};
  EXPECT_EQ(img.pixels, expected);
}

TEST(Render, PgmHeader) {
  const Grid g(kUnitBox, 1);
  std::ostringstream os;
  write_pgm(os, render(DiscreteSet::full(g)));
  EXPECT_EQ(os.str(), std::string("P5\n2 2\n255\n") + std::string(4, '\0'));
}

TEST(Render, ScaledOutputAndBadSize) {
  const Grid g(kUnitBox, 9);
  const auto img = render(DiscreteSet::full(g), {5, 5});
  for (auto p : img.pixels) EXPECT_EQ(p, 0);
  EXPECT_THROW(render(DiscreteSet::full(g), {-1, 2}), Error);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Goldens come from the first validated run. Set BLENDIFS_UPDATE_GOLDEN=1 to
// regenerate them deliberately.
void check_golden(const std::string& name, const std::string& bytes) {
  const std::string path = std::string(BLENDIFS_GOLDEN_DIR) + "/" + name;
  if (const char* update = std::getenv("BLENDIFS_UPDATE_GOLDEN"); update != nullptr && std::string(update) == "1") {
    std::ofstream(path, std::ios::binary) << bytes;
  }
  const auto golden = read_file(path);
  ASSERT_FALSE(golden.empty()) << "missing golden " << path;
  EXPECT_TRUE(golden == bytes) << name << " differs from golden";
}

TEST(Golden, AttractorImages) {
  const auto sys = testing::two_systems();
  const Grid g(kUnitBox, 64);
  const auto attractors = compute_attractors(sys, g, 30);
  const char* names[] = {"sierpinski-64.pgm", "maple-64.pgm"};
  for (std::size_t i = 0; i < 2; ++i) {
    std::ostringstream os;
    write_pgm(os, render(attractors[i]));
    check_golden(names[i], os.str());
  }
}

TEST(Golden, BlendCellList) {
  const auto sys = testing::two_systems();
  const Grid g(kUnitBox, 64);
  const auto theta = parse_theta("1,2,2,2,2,2,2,2,1,2,1,2,2,1,1,1,1,1,1,1");
  std::ostringstream os;
  write_cell_list(os, blend_approx(sys, g, theta).output);
  check_golden("blend3-64.cells", os.str());
}

TEST(Report, FlatBetaKeys) {
  const std::vector<double> lam{0.5, 0.8};
  const auto rep = beta_report(parse_theta("1,2,2,2,2,2,2,2,1,2,1,2,2,1,1,1,1,1,1,1"), lam);
  std::ostringstream os;
  write_flat(os, to_json(rep, {"sierpinski", "maple"}));
  const std::string text = os.str();
  EXPECT_NE(text.find("theta=1,2,2,2"), std::string::npos) << text;
  EXPECT_NE(text.find("beta_examples.1=2.6527116288"), std::string::npos) << text;
  EXPECT_NE(text.find("beta_examples.2=1.5867172352"), std::string::npos) << text;
  EXPECT_NE(text.find("name.2=maple"), std::string::npos) << text;
  for (const char* key : {"tail_bound=", "beta_def_lower.1=", "beta_def_upper.2="}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
}

TEST(Report, RadiiJson) {
  const std::vector<double> lam{0.5, 0.8, 0.5435};
  const auto doc = to_json(covering_radii_selfmax(lam, 1.0));
  EXPECT_EQ(doc.at("radius_variant"), "selfmax");
  EXPECT_EQ(doc.at("radii").size(), 3U);
  EXPECT_NEAR(doc.at("radii")[1].at("radius").get<double>(), 4.0, 1e-12);
  std::ostringstream os;
  write_flat(os, doc);
  EXPECT_NE(os.str().find("radius.2=4"), std::string::npos) << os.str();
}

TEST(Report, ShortestRoundTrip) {
  EXPECT_EQ(format_real(0.1), "0.1");
  EXPECT_EQ(format_real(2.5), "2.5");
  EXPECT_EQ(std::stod(format_real(1.0 / 3)), 1.0 / 3);
}

}  // namespace
}  // namespace blendifs
